"""Truncated p-adic power-series rings with exact arithmetic.

The base object is S = (Z/p^N)[x_1..x_r] / J^a where J = (x_1..x_r).
Everything downstream (frames, windows, Witt vectors) is built over S or
over its quotient R = S/ES for a distinguished element E = p + E0 with
E0 in J.  All arithmetic is exact: coefficients are Python ints reduced
modulo a power of p, and every division by p is an exact integer
division carried out at padded precision.
"""

from __future__ import annotations

import itertools


class ExactnessError(ArithmeticError):
    """A division that must be exact (by p^k) left a remainder."""


class NotAUnitError(ArithmeticError):
    """Inversion was requested for a non-unit."""


class ConfigError(ValueError):
    """A serialized ring/window description is malformed."""


def monomials_below(r: int, a: int) -> list[tuple[int, ...]]:
    """All exponent tuples e with len(e) == r and |e| < a, degree-sorted."""
    if r == 0:
        return [()]
    out = []
    for total in range(a):
        for c in itertools.combinations_with_replacement(range(r), total):
            e = [0] * r
            for i in c:
                e[i] += 1
            out.append(tuple(e))
    return out


class SeriesRing:
    """Context object for (Z/p^N)[x_1..x_r]/J^a.

    An optional cap (cap_deg, cap_exp) further reduces coefficients of
    monomials of total degree >= cap_deg modulo p^cap_exp.  That models
    quotients of the form S / p^c J^d used in the general-Frobenius
    tower; cap=None is the plain ring.
    """

    def __init__(self, p: int, N: int, r: int, a: int,
                 cap: tuple[int, int] | None = None):
        if p < 2 or N < 1 or r < 0 or a < 1:
            raise ConfigError(f"bad ring parameters p={p} N={N} r={r} a={a}")
        self.p = p
        self.N = N
        self.r = r
        self.a = a
        self.cap = cap
        self.pN = p ** N
        if cap is not None:
            cd, ce = cap
            if not (0 <= cd <= a and 0 <= ce):
                raise ConfigError(f"bad cap {cap} for a={a}")
            self._cap_mod = p ** min(N, ce)
        self.exps = monomials_below(r, a)
        self._key = (p, N, r, a, cap)

    def __eq__(self, other):
        return isinstance(other, SeriesRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        cap = f" cap={self.cap}" if self.cap else ""
        return f"SeriesRing(p={self.p}, N={self.N}, r={self.r}, a={self.a}{cap})"

    def coeff_mod(self, e: tuple[int, ...]) -> int:
        if self.cap is not None and sum(e) >= self.cap[0]:
            return self._cap_mod
        return self.pN

    # -- element construction ------------------------------------------

    def from_coeffs(self, coeffs: dict) -> TruncSeries:
        c = {}
        for e, v in coeffs.items():
            e = tuple(e)
            if len(e) != self.r or any(k < 0 for k in e) or sum(e) >= self.a:
                continue
            v %= self.coeff_mod(e)
            if v:
                c[e] = v
        return TruncSeries(self, c)

    def zero(self) -> TruncSeries:
        return TruncSeries(self, {})

    def one(self) -> TruncSeries:
        return self.const(1)

    def const(self, v: int) -> TruncSeries:
        e = (0,) * self.r
        v %= self.coeff_mod(e)
        return TruncSeries(self, {e: v} if v else {})

    def var(self, i: int) -> TruncSeries:
        if not 0 <= i < self.r:
            raise IndexError(f"ring has {self.r} variables")
        if self.a < 2:
            return self.zero()
        e = tuple(1 if j == i else 0 for j in range(self.r))
        return TruncSeries(self, {e: 1})

    def monomial(self, e, v: int = 1) -> TruncSeries:
        return self.from_coeffs({tuple(e): v})

    # -- ring protocol (shared shape with QuotientRing / WittRing) -----

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def mul_int(self, x: TruncSeries, k: int) -> TruncSeries:
        c = {}
        for e, v in x.c.items():
            w = (v * k) % self.coeff_mod(e)
            if w:
                c[e] = w
        return TruncSeries(self, c)

    def is_zero(self, x) -> bool:
        return not x.c

    def eq(self, x, y) -> bool:
        return x == y

    def is_unit(self, x: TruncSeries) -> bool:
        return x.c.get((0,) * self.r, 0) % self.p != 0

    def residue(self, x: TruncSeries) -> int:
        """Image in the residue field F_p (constant coefficient mod p)."""
        return x.c.get((0,) * self.r, 0) % self.p

    def invert(self, x: TruncSeries) -> TruncSeries:
        """Inverse of a unit: constant part by modular inverse, the
        radical part by a finite geometric series (it is nilpotent)."""
        c0 = x.c.get((0,) * self.r, 0)
        if c0 % self.p == 0:
            raise NotAUnitError(f"constant coefficient {c0} not a unit mod {self.p}")
        u0 = pow(c0, -1, self.pN)
        t = self.one() - self.mul_int(x, u0)   # in (p) + J, nilpotent
        acc = self.one()
        term = t
        for _ in range(self.N + self.a + 1):
            if not term.c:
                break
            acc = acc + term
            term = term * t
        else:
            raise ExactnessError("geometric series for inversion did not terminate")
        return self.mul_int(acc, u0)

    def random(self, rng) -> TruncSeries:
        c = {}
        for e in self.exps:
            v = rng.randrange(self.coeff_mod(e))
            if v:
                c[e] = v
        return TruncSeries(self, c)

    def random_unit(self, rng) -> TruncSeries:
        x = self.random(rng)
        e0 = (0,) * self.r
        c = dict(x.c)
        c[e0] = rng.randrange(1, self.p) + self.p * rng.randrange(self.pN // self.p)
        return TruncSeries(self, c)

    # -- ring-to-ring conversion ---------------------------------------

    def convert(self, x: TruncSeries, target: SeriesRing) -> TruncSeries:
        """Map coefficients canonically into target (same p and r).

        Covers precision padding/reporting (N up or down), level moves
        (a down, or a up along the canonical monomial section), and cap
        changes.  Coefficients are canonical representatives, so the
        composite down-then-up is the identity on normal forms.
        """
        if target.p != self.p or target.r != self.r:
            raise ConfigError("convert requires matching p and r")
        return target.from_coeffs(x.c)


class TruncSeries:
    """Element of a SeriesRing: dict of exponent tuple -> coefficient.

    Instances are treated as immutable; the coefficient dict is never
    mutated after construction and never contains zeros.
    """

    __slots__ = ("ring", "c")

    def __init__(self, ring: SeriesRing, c: dict):
        self.ring = ring
        self.c = c

    def __eq__(self, other):
        return (isinstance(other, TruncSeries) and self.ring == other.ring
                and self.c == other.c)

    def __repr__(self):
        if not self.c:
            return "0"
        bits = []
        for e in sorted(self.c, key=lambda e: (sum(e), e)):
            v = self.c[e]
            if not any(e):
                bits.append(str(v))
                continue
            mon = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "")
                           for i, k in enumerate(e) if k)
            bits.append(mon if v == 1 else f"{v}*{mon}")
        return " + ".join(bits)

    def _check(self, other):
        if self.ring != other.ring:
            raise ValueError("elements of different rings")

    def __add__(self, other):
        self._check(other)
        ring = self.ring
        c = dict(self.c)
        for e, v in other.c.items():
            w = (c.get(e, 0) + v) % ring.coeff_mod(e)
            if w:
                c[e] = w
            elif e in c:
                del c[e]
        return TruncSeries(ring, c)

    def __neg__(self):
        ring = self.ring
        return TruncSeries(ring, {e: ring.coeff_mod(e) - v for e, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        ring = self.ring
        a = ring.a
        c: dict = {}
        for e1, v1 in self.c.items():
            d1 = sum(e1)
            for e2, v2 in other.c.items():
                if d1 + sum(e2) >= a:
                    continue
                e = tuple(i + j for i, j in zip(e1, e2))
                c[e] = c.get(e, 0) + v1 * v2
        out = {}
        for e, v in c.items():
            v %= ring.coeff_mod(e)
            if v:
                out[e] = v
        return TruncSeries(ring, out)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power; use ring.invert")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def constant_coeff(self) -> int:
        return self.c.get((0,) * self.ring.r, 0)

    def in_radical_part(self) -> bool:
        """True when the element lies in J (zero constant coefficient)."""
        return self.constant_coeff() == 0

    def min_total_degree(self) -> int:
        """Smallest |e| with a nonzero coefficient (ring.a if zero)."""
        return min((sum(e) for e in self.c), default=self.ring.a)


def divide_by_p(x: TruncSeries, k: int) -> TruncSeries:
    """Exact division of every coefficient by p^k, in the same ring.

    The caller is responsible for the precision semantics: the result
    is only trustworthy modulo p^(N-k) relative to how well x was known.
    """
    ring = x.ring
    pk = ring.p ** k
    c = {}
    for e, v in x.c.items():
        if v % pk:
            raise ExactnessError(f"coefficient {v} at {e} not divisible by p^{k}")
        w = (v // pk) % ring.coeff_mod(e)
        if w:
            c[e] = w
    return TruncSeries(ring, c)


class SigmaSpec:
    """A Frobenius lift on a SeriesRing: fixes Z/p^N, sends x_i to a
    prescribed image congruent to x_i^p mod p and lying in J."""

    def __init__(self, ring: SeriesRing, images: list[TruncSeries] | None,
                 standard: bool = False):
        self.ring = ring
        self.standard = standard or images is None
        if self.standard:
            images = [ring.var(i) ** ring.p for i in range(ring.r)]
        if len(images) != ring.r:
            raise ConfigError(f"need {ring.r} sigma images, got {len(images)}")
        for i, img in enumerate(images):
            if img.ring != ring:
                raise ConfigError("sigma image in wrong ring")
            if not img.in_radical_part():
                raise ConfigError(f"sigma(x{i}) has a constant term; must lie in J")
            diff = img - ring.var(i) ** ring.p
            if any(v % ring.p for v in diff.c.values()):
                raise ConfigError(f"sigma(x{i}) is not x{i}^p mod p")
        self.images = images
        # x_i^k for k < a per variable; images lie in J so higher powers die
        self._pows: list[list[TruncSeries]] = []
        for img in images:
            row = [ring.one()]
            for _ in range(1, ring.a):
                row.append(row[-1] * img)
            self._pows.append(row)

    def apply(self, x: TruncSeries) -> TruncSeries:
        ring = self.ring
        if x.ring != ring:
            raise ValueError("sigma applied to element of another ring")
        out = ring.zero()
        for e, v in x.c.items():
            term = ring.const(v)
            for i, k in enumerate(e):
                if k:
                    term = term * self._pows[i][k]
                    if not term.c:
                        break
            out = out + term
        return out

    def convert(self, target: SeriesRing) -> SigmaSpec:
        if self.standard:
            return SigmaSpec(target, None, standard=True)
        return SigmaSpec(target, [self.ring.convert(im, target) for im in self.images])


class RingDesc:
    """Full scenario ring data: the series ring S, the distinguished
    element E = p + E0 with E0 in J, and a Frobenius lift sigma.

    Provides the quotient R = S/ES with decidable normal forms, the
    divided-Frobenius maps tau_n at padded precision, and canonical
    conversions between precision/level variants of itself.
    """

    def __init__(self, ring: SeriesRing, E: TruncSeries, sigma: SigmaSpec):
        if E.ring != ring or sigma.ring != ring:
            raise ConfigError("E or sigma not over the given ring")
        e0 = (0,) * ring.r
        if E.c.get(e0, 0) != ring.p % ring.pN:
            raise ConfigError("E must have constant coefficient exactly p")
        self.ring = ring
        self.E = E
        self.E0 = E - ring.const(ring.p)      # lies in J by the check above
        self.sigma = sigma
        self.quotient = QuotientRing(self)
        self._padded_cache: dict[int, RingDesc] = {}

    @property
    def p(self):
        return self.ring.p

    # -- serialization --------------------------------------------------

    @classmethod
    def from_config(cls, cfg: dict) -> RingDesc:
        try:
            p, N, r, a = int(cfg["p"]), int(cfg["N"]), int(cfg["r"]), int(cfg["a"])
        except KeyError as k:
            raise ConfigError(f"config missing field {k}") from None
        ring = SeriesRing(p, N, r, a)
        ec = {}
        for pair in cfg.get("E", [[[0] * r, p]]):
            e, v = pair
            ec[tuple(int(t) for t in e)] = int(v)
        e0 = (0,) * r
        ec.setdefault(e0, p)
        E = ring.from_coeffs(ec)
        sig = cfg.get("sigma", "standard")
        if sig == "standard":
            sigma = SigmaSpec(ring, None, standard=True)
        else:
            if len(sig) != r:
                raise ConfigError(f"sigma needs {r} images")
            images = [ring.from_coeffs({tuple(int(t) for t in e): int(v)
                                        for e, v in img}) for img in sig]
            sigma = SigmaSpec(ring, images)
        return cls(ring, E, sigma)

    def to_config(self) -> dict:
        ring = self.ring
        ser = lambda x: [[list(e), v] for e, v in sorted(x.c.items())]
        return {
            "p": ring.p, "N": ring.N, "r": ring.r, "a": ring.a,
            "E": ser(self.E),
            "sigma": "standard" if self.sigma.standard
                     else [ser(im) for im in self.sigma.images],
        }

    # -- variants --------------------------------------------------------

    def _with_ring(self, ring2: SeriesRing) -> RingDesc:
        conv = self.ring.convert
        return RingDesc(ring2, conv(self.E, ring2), self.sigma.convert(ring2))

    def padded(self, pad: int) -> RingDesc:
        """Same ring at coefficient precision N + pad (cached).  A cap
        is padded along so capped coefficients gain headroom too."""
        if pad == 0:
            return self
        if pad not in self._padded_cache:
            r = self.ring
            cap = (r.cap[0], r.cap[1] + pad) if r.cap else None
            self._padded_cache[pad] = self._with_ring(
                SeriesRing(r.p, r.N + pad, r.r, r.a, cap))
        return self._padded_cache[pad]

    def truncate_level(self, a2: int) -> RingDesc:
        """Quotient to J^a2 (a2 <= a)."""
        r = self.ring
        if a2 > r.a:
            raise ConfigError("cannot extend the truncation level")
        return self._with_ring(SeriesRing(r.p, r.N, r.r, a2))

    def with_cap(self, cap_deg: int, cap_exp: int) -> RingDesc:
        r = self.ring
        return self._with_ring(SeriesRing(r.p, r.N, r.r, r.a, (cap_deg, cap_exp)))

    def lift_from(self, x: TruncSeries) -> TruncSeries:
        """Canonical section into this ring from any compatible variant."""
        return x.ring.convert(x, self.ring)

    # -- quotient R = S/ES ----------------------------------------------

    def reduce_to_R(self, x: TruncSeries) -> QuotientElem:
        """p-eliminated normal form in R = S/ES.

        Repeatedly splits coefficients into base-p digit and carry and
        rewrites p -> -E0; each pass pushes the carry one step deeper
        into J, so at most a+N+1 passes are needed.
        """
        ring = self.ring
        if x.ring != ring:
            x = self.lift_from(x)
        negE0 = -self.E0
        z = x
        for _ in range(ring.a + ring.N + 2):
            low, carry = {}, {}
            for e, v in z.c.items():
                d, m = divmod(v, ring.p)
                if m:
                    low[e] = m
                if d:
                    carry[e] = d
            if not carry:
                return QuotientElem(self.quotient, low)
            z = TruncSeries(ring, low) + TruncSeries(ring, carry) * negE0
        raise ExactnessError("normal-form rewriting did not terminate")

    def reduce_with_cofactor(self, x: TruncSeries):
        """Normal form together with the y making x = digits + E*y.

        Each rewrite pass subtracts carry*E, so the cofactor is the sum
        of the carries: as canonical as the normal form itself, and
        structurally free of low-degree junk when x is p times a
        boundary monomial.
        """
        ring = self.ring
        if x.ring != ring:
            x = self.lift_from(x)
        negE0 = -self.E0
        z = x
        y = ring.zero()
        for _ in range(ring.a + ring.N + 2):
            low, carry = {}, {}
            for e, v in z.c.items():
                d, m = divmod(v, ring.p)
                if m:
                    low[e] = m
                if d:
                    carry[e] = d
            if not carry:
                return QuotientElem(self.quotient, low), y
            cy = TruncSeries(ring, carry)
            y = y + cy
            z = TruncSeries(ring, low) + cy * negE0
        raise ExactnessError("normal-form rewriting did not terminate")

    def reduction_steps(self, x: TruncSeries, limit: int = 10_000) -> int:
        """Number of rewrite passes reduce_to_R needs for x (oracle hook)."""
        ring = self.ring
        negE0 = -self.E0
        z = x
        for step in range(limit):
            carry = {e: v // ring.p for e, v in z.c.items() if v // ring.p}
            if not carry:
                return step
            low = {e: v % ring.p for e, v in z.c.items() if v % ring.p}
            z = TruncSeries(ring, low) + TruncSeries(ring, carry) * negE0
        raise ExactnessError(f"no fixpoint within {limit} rewriting steps")

    # -- divided Frobenius ------------------------------------------------

    def tau(self, x: TruncSeries, pad: int = 1) -> TruncSeries:
        """tau(x) = (sigma(x) - x^p)/p, reported at the ring's precision.

        Computed at precision N+pad on canonical lifts; exact integer
        division certifies the result modulo p^(N+pad-1).
        """
        if pad < 1:
            raise ValueError("tau needs pad >= 1")
        up = self.padded(pad)
        xx = up.lift_from(x)
        num = up.sigma.apply(xx) - xx ** up.p
        return up.ring.convert(divide_by_p(num, 1), self.ring)

    def tau_iter(self, x: TruncSeries, n: int, pad: int | None = None) -> TruncSeries:
        """tau_n(x) = (sigma(x)^(p^(n-1)) - x^(p^n)) / p^n at precision N.

        pad defaults to n, the exact amount the division consumes.
        """
        if n < 1:
            raise ValueError("tau_iter needs n >= 1")
        if pad is None:
            pad = n
        if pad < n:
            raise ValueError(f"pad={pad} below division depth {n}")
        up = self.padded(pad)
        xx = up.lift_from(x)
        q = up.p ** (n - 1)
        num = up.sigma.apply(xx) ** q - xx ** (q * up.p)
        return up.ring.convert(divide_by_p(num, n), self.ring)

    def sigma1(self, cofactor: TruncSeries) -> TruncSeries:
        """sigma1 on I = ES in cofactor form: sigma1(E*y) = sigma(y)."""
        return self.sigma.apply(cofactor)

    def ideal(self, cofactor: TruncSeries) -> IdealElem:
        return IdealElem(self, cofactor)


class IdealElem:
    """Element of I = E*S held as its cofactor.

    E is a zero divisor at finite precision, so the cofactor is the
    data; the underlying ring element is E*y and is only used when a
    plain series is genuinely required.
    """

    __slots__ = ("desc", "y")

    def __init__(self, desc: RingDesc, y: TruncSeries):
        self.desc = desc
        self.y = y

    def value(self) -> TruncSeries:
        return self.desc.E * self.y

    def __add__(self, other):
        if self.desc is not other.desc and self.desc.ring != other.desc.ring:
            raise ValueError("ideal elements over different rings")
        return IdealElem(self.desc, self.y + other.y)

    def __neg__(self):
        return IdealElem(self.desc, -self.y)

    def scale(self, s: TruncSeries) -> IdealElem:
        return IdealElem(self.desc, s * self.y)

    def sigma1(self) -> TruncSeries:
        return self.desc.sigma1(self.y)

    def __repr__(self):
        return f"E*({self.y!r})"


class QuotientRing:
    """R = S/ES with unique p-eliminated normal forms.

    Elements are maps from exponents (|e| < a) to digits in [0, p);
    two elements are equal in R exactly when the maps coincide.
    """

    def __init__(self, desc: RingDesc):
        self.desc = desc
        self.p = desc.ring.p
        self.exps = desc.ring.exps

    def __eq__(self, other):
        return (isinstance(other, QuotientRing)
                and self.desc.ring == other.desc.ring
                and self.desc.E == other.desc.E)

    def __hash__(self):
        return hash((self.desc.ring, tuple(sorted(self.desc.E.c.items()))))

    def __repr__(self):
        r = self.desc.ring
        return f"QuotientRing(p={r.p}, r={r.r}, a={r.a} | S at N={r.N})"

    def lift(self, q: QuotientElem) -> TruncSeries:
        """Canonical section R -> S (digits read as integers)."""
        return self.desc.ring.from_coeffs(q.c)

    def reduce(self, x: TruncSeries) -> QuotientElem:
        return self.desc.reduce_to_R(x)

    def from_coeffs(self, coeffs: dict) -> QuotientElem:
        return self.reduce(self.desc.ring.from_coeffs(coeffs))

    def zero(self):
        return QuotientElem(self, {})

    def one(self):
        return self.const(1)

    def const(self, v: int):
        return self.reduce(self.desc.ring.const(v))

    def var(self, i: int):
        return self.reduce(self.desc.ring.var(i))

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def mul_int(self, x, k: int):
        return self.reduce(self.desc.ring.mul_int(self.lift(x), k))

    def is_zero(self, x) -> bool:
        return not x.c

    def eq(self, x, y) -> bool:
        return x == y

    def is_unit(self, x: QuotientElem) -> bool:
        return x.c.get((0,) * self.desc.ring.r, 0) % self.p != 0

    def residue(self, x: QuotientElem) -> int:
        return x.c.get((0,) * self.desc.ring.r, 0) % self.p

    def invert(self, x: QuotientElem) -> QuotientElem:
        if not self.is_unit(x):
            raise NotAUnitError("constant digit is zero")
        inv = self.desc.ring.invert(self.lift(x))
        return self.reduce(inv)

    def random(self, rng) -> QuotientElem:
        # routed through from_coeffs so capped digit slots normalise
        return self.from_coeffs({e: v for e in self.exps
                                 if (v := rng.randrange(self.p))})

    def random_unit(self, rng) -> QuotientElem:
        c = dict(self.random(rng).c)
        c[(0,) * self.desc.ring.r] = rng.randrange(1, self.p)
        return self.from_coeffs(c)


class QuotientElem:
    """Normal-form element of R = S/ES; digit dict, values in [0, p)."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: QuotientRing, c: dict):
        self.ring = ring
        self.c = c

    def __eq__(self, other):
        return (isinstance(other, QuotientElem) and self.ring == other.ring
                and self.c == other.c)

    def __repr__(self):
        return f"[{self.ring.lift(self)!r}]R"

    def _lift2(self, other):
        if self.ring != other.ring:
            raise ValueError("elements of different quotient rings")
        return self.ring.lift(self), self.ring.lift(other)

    def __add__(self, other):
        x, y = self._lift2(other)
        return self.ring.reduce(x + y)

    def __sub__(self, other):
        x, y = self._lift2(other)
        return self.ring.reduce(x - y)

    def __neg__(self):
        return self.ring.reduce(-self.ring.lift(self))

    def __mul__(self, other):
        x, y = self._lift2(other)
        return self.ring.reduce(x * y)

    def __pow__(self, k: int):
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def constant_digit(self) -> int:
        return self.c.get((0,) * self.ring.desc.ring.r, 0)

    def min_total_degree(self) -> int:
        return min((sum(e) for e in self.c), default=self.ring.desc.ring.a)
