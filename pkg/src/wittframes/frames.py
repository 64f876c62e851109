"""Frames over truncated series rings and truncated Witt vectors.

A frame packages a ring S, an ideal I, the quotient R = S/I, a Frobenius
lift sigma, and a divided Frobenius sigma1 on I.  Ideal elements are held
in decomposed form (cofactors, log parts) because at finite precision the
decomposition carries more information than the bare ring element: E and
p are zero divisors, so sigma1 is a function of the decomposition.

Four concrete kinds are provided:

  * BreuilFrame          S = truncated series ring, I = E*S
  * WittFrame            S = W_n(R), I = v(W_{n-1}(R))
  * RelativeBreuilFrame  I enlarged by the top monomial layer J^(a-1)
  * RelativeWittFrame    I enlarged by W(b) for a square-zero ideal b

together with strict projections between levels and the twist
factorisation of a general u-homomorphism.
"""

from __future__ import annotations

from .linalg import Mat
from .series import (ConfigError, ExactnessError, IdealElem, QuotientElem,
                     QuotientRing, RingDesc, TruncSeries, divide_by_p)
from .witt import LogVector, WittRing, WittVector


class FrameAxiomError(AssertionError):
    """A structural identity that must hold by construction failed."""


# -- ideal elements for the two relative kinds ---------------------------


class RelSeriesIdeal:
    """Element of E*S + J^jdeg held as the pair (cofactor, top part).

    The two summands overlap at finite precision; the stored split is
    the data and sigma1 is computed from it.  Canonical splits are
    produced by RelativeBreuilFrame.ideal_decompose.
    """

    __slots__ = ("frame", "y", "j")

    def __init__(self, frame: RelativeBreuilFrame, y: TruncSeries, j: TruncSeries):
        self.frame = frame
        self.y = y
        self.j = j

    def value(self) -> TruncSeries:
        return self.frame.desc.E * self.y + self.j

    def __add__(self, other):
        return RelSeriesIdeal(self.frame, self.y + other.y, self.j + other.j)

    def __neg__(self):
        return RelSeriesIdeal(self.frame, -self.y, -self.j)

    def scale(self, s: TruncSeries) -> RelSeriesIdeal:
        return RelSeriesIdeal(self.frame, s * self.y, s * self.j)

    def sigma1(self) -> TruncSeries:
        d = self.frame.desc
        return d.sigma.apply(self.y) + d.tau(self.j)


class WittIdeal:
    """Element of I = v(W_{n-1}(R)): a Witt vector with first entry 0."""

    __slots__ = ("frame", "vec")

    def __init__(self, frame, vec: WittVector):
        if vec.entries and not frame.ring.coeff_ring.is_zero(vec.entries[0]):
            raise ValueError("ideal element must have first Witt entry 0")
        self.frame = frame
        self.vec = vec

    def value(self) -> WittVector:
        return self.vec

    def __add__(self, other):
        return WittIdeal(self.frame, self.frame.ring.add(self.vec, other.vec))

    def __neg__(self):
        return WittIdeal(self.frame, self.frame.ring.neg(self.vec))

    def scale(self, s: WittVector) -> WittIdeal:
        return WittIdeal(self.frame, self.frame.ring.mul(self.vec, s))

    def sigma1(self) -> WittVector:
        return self.frame.ring.f1(self.vec)


class RelWittIdeal:
    """Element of I + W(b) as the pair (v-part, log part).

    v-part is a Witt vector y of length n-1 standing for v(y); the log
    part is a coordinate vector over the square-zero ideal b.  The value
    is v(y) + exp(log); sigma1 is y + exp(shift(log)).
    """

    __slots__ = ("frame", "vpart", "logpart")

    def __init__(self, frame, vpart: WittVector, logpart: LogVector):
        self.frame = frame
        self.vpart = vpart
        self.logpart = logpart

    def value(self) -> WittVector:
        W = self.frame.ring
        return W.add(W.verschiebung(self.vpart), self.logpart.exp())

    def __add__(self, other):
        W = self.frame.ring
        return RelWittIdeal(self.frame, W.add(self.vpart, other.vpart),
                            self.logpart + other.logpart)

    def __neg__(self):
        W = self.frame.ring
        return RelWittIdeal(self.frame, W.neg(self.vpart), -self.logpart)

    def scale(self, s: WittVector) -> RelWittIdeal:
        # v(y)*s = v(y*f(s)); the log part scales by ghost coordinates
        W = self.frame.ring
        return RelWittIdeal(self.frame, W.mul(self.vpart, W.frobenius(s)),
                            self.logpart.module_mul(s))

    def sigma1(self) -> WittVector:
        W = self.frame.ring
        log = self.logpart
        # complete log data shifts within its length; a zero v-part must
        # not truncate the sum
        tail = log.shift(pad=len(log.entries) == W.n).exp()
        if W.is_zero(self.vpart):
            return tail
        return W.add(self.vpart, tail)


# -- frames ----------------------------------------------------------------


class Frame:
    """Shared behaviour; concrete kinds fill in the sigma/ideal methods.

    Attributes every frame carries:
      ring          the S-ring (SeriesRing or WittRing protocol object)
      R             quotient ring object for R = S/I
      theta         distinguished element of S with sigma(i) = theta*sigma1(i)
      unit_witness  pairs (y, x) with x an ideal element and
                    sum y*sigma1(x) = 1
      kind          short string tag used in reports
    """

    generalised = False

    # concrete classes implement: sigma, ideal_gens, ideal_decompose,
    # in_ideal, project_R, lift_R

    def sigma1(self, elem):
        return elem.sigma1()

    def one(self):
        return self.ring.one()

    def zero(self):
        return self.ring.zero()

    def eq_aligned(self, x, y) -> bool:
        """Equality after truncating to a common Witt length (series
        frames compare directly)."""
        return self.ring.eq(x, y)

    def align(self, x):
        return x

    def compute_theta(self):
        """theta from the unit witness: sum y * sigma(value(x))."""
        acc = None
        for y, x in self.unit_witness:
            t = self.ring.mul(y, self.sigma(x.value()))
            acc = t if acc is None else self.ring.add(acc, t)
        if acc is None:
            raise FrameAxiomError("empty unit witness; theta must be stored")
        return acc

    def residue(self, x) -> int:
        return self.ring.residue(x)

    def in_radical(self, x) -> bool:
        return self.ring.residue(x) == 0


class BreuilFrame(Frame):
    """S = (Z/p^N)[x]/J^a, I = E*S, R = S/E with exact normal forms."""

    kind = "breuil"

    def __init__(self, desc: RingDesc):
        self.desc = desc
        self.ring = desc.ring
        self.R = desc.quotient
        self.p = desc.p
        self.theta = desc.sigma.apply(desc.E)
        self.unit_witness = [(self.ring.one(), IdealElem(desc, self.ring.one()))]

    def __repr__(self):
        r = self.ring
        return f"BreuilFrame(p={r.p}, N={r.N}, r={r.r}, a={r.a})"

    def sigma(self, x: TruncSeries) -> TruncSeries:
        return self.desc.sigma.apply(x)

    def ideal(self, cofactor: TruncSeries) -> IdealElem:
        return IdealElem(self.desc, cofactor)

    def ideal_gens(self):
        return [IdealElem(self.desc, self.ring.one())]

    def in_ideal(self, x: TruncSeries) -> bool:
        return not self.desc.reduce_to_R(x).c

    def ideal_decompose(self, x: TruncSeries) -> IdealElem:
        """The carry cofactor y with E*y = x; raises if x is not in E*S."""
        ring = self.ring
        digits, y = self.desc.reduce_with_cofactor(x)
        if digits.c:
            raise ValueError("element is not in the ideal")
        if not ring.eq(self.desc.E * y, x):
            raise ExactnessError("cofactor reconstruction failed")
        return IdealElem(self.desc, y)

    def project_R(self, x: TruncSeries) -> QuotientElem:
        return self.desc.reduce_to_R(x)

    def lift_R(self, r: QuotientElem) -> TruncSeries:
        return self.R.lift(r)


class WittFrame(Frame):
    """S = W_n(R), I = v(W_{n-1}(R)), sigma = Frobenius, sigma1 = f1.

    For the scenario rings R every element is an integer plus a radical
    part, so W_n(R) agrees with the Zink variant built from such sums;
    make_witt_frame checks that reachability on a sample.
    """

    kind = "witt"

    def __init__(self, wring: WittRing):
        self.ring = wring
        self.R = wring.coeff_ring
        self.p = wring.p
        self.n = wring.n
        self.theta = wring.from_int(wring.p)
        one_short = wring.truncated(wring.n - 1).one() if wring.n > 1 else None
        if one_short is None:
            raise ConfigError("Witt frames need length at least 2")
        self.unit_witness = [(wring.one(),
                              WittIdeal(self, wring.verschiebung(one_short)))]

    def __repr__(self):
        return f"WittFrame(W_{self.n} over {self.R!r})"

    def sigma(self, x: WittVector) -> WittVector:
        return self.ring.frobenius(x)

    def ideal(self, vec: WittVector) -> WittIdeal:
        return WittIdeal(self, vec)

    def ideal_gens(self):
        return [self.unit_witness[0][1]]

    def in_ideal(self, x: WittVector) -> bool:
        return bool(x.entries) and self.ring.coeff_ring.is_zero(x.entries[0])

    def ideal_decompose(self, x: WittVector) -> WittIdeal:
        if not self.in_ideal(x):
            raise ValueError("element is not in the ideal")
        return WittIdeal(self, x)

    def project_R(self, x: WittVector):
        return x.entries[0]

    def lift_R(self, r) -> WittVector:
        return self.ring.teichmuller(r)

    def eq_aligned(self, x, y) -> bool:
        m = min(x.length, y.length)
        return x.truncate(m) == y.truncate(m)


class RelativeBreuilFrame(Frame):
    """Enlarged-ideal frame at the boundary level: I = E*S + J^jdeg.

    Requires jdeg = a-1, the square-zero top layer.  sigma1 on the top
    part is the divided Frobenius tau; on that layer sigma(j) = p*tau(j)
    exactly, which makes the frame identities hold on the nose.
    """

    kind = "relative-breuil"

    def __init__(self, desc: RingDesc, jdeg: int):
        ring = desc.ring
        if jdeg != ring.a - 1 or ring.a < 2:
            raise ConfigError("relative series frame needs jdeg = a-1 >= 1")
        self.desc = desc
        self.ring = ring
        self.jdeg = jdeg
        self.p = desc.p
        self.lower = desc.truncate_level(jdeg)
        self.R = self.lower.quotient
        self.theta = desc.sigma.apply(desc.E)
        self.unit_witness = [(ring.one(),
                              RelSeriesIdeal(self, ring.one(), ring.zero()))]
        self._base = BreuilFrame(desc)
        self._check_overlap()

    def _check_overlap(self):
        # the two sigma1 routes must agree where the summands meet:
        # tau(E*m) = sigma(m) for every top-layer monomial m
        d = self.desc
        for e in self.ring.exps:
            if sum(e) < self.jdeg:
                continue
            m = self.ring.monomial(e)
            if d.tau(d.E * m) != d.sigma.apply(m):
                raise FrameAxiomError(f"tau(E*x^{e}) != sigma(x^{e})")

    def __repr__(self):
        r = self.ring
        return f"RelativeBreuilFrame(p={r.p}, N={r.N}, r={r.r}, a={r.a}, jdeg={self.jdeg})"

    def sigma(self, x: TruncSeries) -> TruncSeries:
        return self.desc.sigma.apply(x)

    def ideal(self, cofactor: TruncSeries, jpart: TruncSeries | None = None) -> RelSeriesIdeal:
        jpart = self.ring.zero() if jpart is None else jpart
        if jpart.min_total_degree() < self.jdeg:
            raise ValueError("top part has a coefficient below the boundary degree")
        return RelSeriesIdeal(self, cofactor, jpart)

    def ideal_gens(self):
        gens = [RelSeriesIdeal(self, self.ring.one(), self.ring.zero())]
        for e in self.ring.exps:
            if sum(e) >= self.jdeg:
                gens.append(RelSeriesIdeal(self, self.ring.zero(),
                                           self.ring.monomial(e)))
        return gens

    def in_ideal(self, x: TruncSeries) -> bool:
        digits = self.desc.reduce_to_R(x).c
        return all(sum(e) >= self.jdeg for e in digits)

    def ideal_decompose(self, x: TruncSeries) -> RelSeriesIdeal:
        """Canonical split: top part = high digits of the normal form,
        cofactor = the rewriting carries (so x = E*y + j exactly)."""
        digits, y = self.desc.reduce_with_cofactor(x)
        if any(sum(e) < self.jdeg for e in digits.c):
            raise ValueError("element is not in the enlarged ideal")
        j = self.ring.from_coeffs(digits.c)
        if not self.ring.eq(self.desc.E * y + j, x):
            raise ExactnessError("cofactor reconstruction failed")
        return RelSeriesIdeal(self, y, j)

    def project_R(self, x: TruncSeries) -> QuotientElem:
        digits = self.desc.reduce_to_R(x).c
        low = {e: v for e, v in digits.items() if sum(e) < self.jdeg}
        return QuotientElem(self.R, low)

    def lift_R(self, r: QuotientElem) -> TruncSeries:
        return self.ring.from_coeffs(r.c)


class RelativeWittFrame(Frame):
    """S = W_n(R), ideal enlarged by W(b) for the square-zero monomial
    layer b (total degree >= bdeg).  Ideal elements carry a (v-part,
    log part) split; on the overlap the two sigma1 routes agree because
    log coordinates of b-vectors are their Witt coordinates.
    """

    kind = "relative-witt"

    def __init__(self, wring: WittRing, bdeg: int):
        qring = wring.coeff_ring
        a = qring.desc.ring.a
        if bdeg != a - 1 or a < 2 or 2 * bdeg < a:
            raise ConfigError("relative Witt frame needs the square-zero top layer")
        if wring.n < 2:
            raise ConfigError("Witt frames need length at least 2")
        self.ring = wring
        self.p = wring.p
        self.n = wring.n
        self.bdeg = bdeg
        self.qring = qring
        self.lower = qring.desc.truncate_level(bdeg)
        self.R = self.lower.quotient
        self.theta = wring.from_int(wring.p)
        short = wring.truncated(wring.n - 1)
        zlog = LogVector(wring, (qring.zero(),) * wring.n)
        self.unit_witness = [(wring.one(),
                              RelWittIdeal(self, short.one(), zlog))]

    def __repr__(self):
        return f"RelativeWittFrame(W_{self.n} over {self.qring!r}, bdeg={self.bdeg})"

    def _in_b(self, r) -> bool:
        return r.min_total_degree() >= self.bdeg

    def sigma(self, x: WittVector) -> WittVector:
        return self.ring.frobenius(x)

    def ideal(self, vpart: WittVector, logpart: LogVector | None = None) -> RelWittIdeal:
        if logpart is None:
            logpart = LogVector(self.ring, (self.qring.zero(),) * self.ring.n)
        for b in logpart.entries:
            if not self._in_b(b):
                raise ValueError("log part not inside the square-zero layer")
        return RelWittIdeal(self, vpart, logpart)

    def log_basis(self):
        """Log vectors with one monomial of b in one slot; these
        generate W(b) additively together with S-scaling."""
        out = []
        ring = self.qring
        for e in ring.exps:
            if sum(e) < self.bdeg:
                continue
            m = ring.from_coeffs({e: 1})
            for slot in range(self.ring.n):
                entries = [ring.zero()] * self.ring.n
                entries[slot] = m
                out.append(LogVector(self.ring, tuple(entries)))
        return out

    def ideal_gens(self):
        gens = [self.unit_witness[0][1]]
        short = self.ring.truncated(self.ring.n - 1)
        for lv in self.log_basis():
            gens.append(RelWittIdeal(self, short.zero(), lv))
        return gens

    def in_ideal(self, x: WittVector) -> bool:
        return bool(x.entries) and self._in_b(x.entries[0])

    def ideal_decompose(self, x: WittVector) -> RelWittIdeal:
        """Canonical split: log part <x_0, 0, ...>, v-part the rest.

        A vector with every entry inside b is taken entirely into log
        coordinates (for square-zero b they agree with Witt coordinates
        entrywise); the divided Frobenius then shifts without losing the
        known-zero tail.
        """
        if not self.in_ideal(x):
            raise ValueError("first Witt entry is not in the square-zero layer")
        W = self.ring
        if all(self._in_b(e) for e in x.entries):
            zero = W.truncated(max(x.length - 1, 1)).zero()
            return RelWittIdeal(self, zero, LogVector(x.ring, x.entries))
        head = [self.qring.zero()] * W.n
        head[0] = x.entries[0]
        lv = LogVector(W, tuple(head))
        vpart = W.f1(W.sub(x, lv.exp()))
        return RelWittIdeal(self, vpart, lv)

    def project_R(self, x: WittVector) -> QuotientElem:
        low = {e: v for e, v in x.entries[0].c.items() if sum(e) < self.bdeg}
        return QuotientElem(self.R, low)

    def lift_R(self, r: QuotientElem) -> WittVector:
        return self.ring.teichmuller(self.qring.from_coeffs(r.c))

    def eq_aligned(self, x, y) -> bool:
        m = min(x.length, y.length)
        return x.truncate(m) == y.truncate(m)


class TwistFrame(Frame):
    """The same frame with sigma1 scaled by the inverse of a unit; used
    by the factorisation of a u-homomorphism into strict times twist."""

    def __init__(self, base: Frame, u):
        self.base = base
        self.u = u
        self.uinv = base.ring.invert(u)
        self.ring = base.ring
        self.R = base.R
        self.p = base.p
        self.kind = base.kind + "-twist"
        self.theta = base.ring.mul(u, base.theta)
        self.unit_witness = [(base.ring.mul(u, y), x)
                             for y, x in base.unit_witness]

    def sigma(self, x):
        return self.base.sigma(x)

    def sigma1(self, elem):
        s = self.base.sigma1(elem)
        ring = self.ring
        if isinstance(s, WittVector):
            m = min(s.length, self.uinv.length)
            return ring.mul(s.truncate(m), self.uinv.truncate(m))
        return ring.mul(s, self.uinv)

    def ideal_gens(self):
        return self.base.ideal_gens()

    def in_ideal(self, x):
        return self.base.in_ideal(x)

    def ideal_decompose(self, x):
        return self.base.ideal_decompose(x)

    def project_R(self, x):
        return self.base.project_R(x)

    def lift_R(self, r):
        return self.base.lift_R(r)

    def eq_aligned(self, x, y):
        return self.base.eq_aligned(x, y)


# -- frame homomorphisms -----------------------------------------------------


class FrameHom:
    """Ring map alpha: S -> S' respecting both filtrations up to a unit:
    sigma1'(alpha(i)) = u * alpha(sigma1(i)) and alpha(theta) = u * theta'.

    strict means u = 1.  ideal_map sends decomposed ideal elements
    across; the default re-decomposes the mapped value canonically.
    A section, when present, is a right inverse of the ring map used by
    the lifting machinery.
    """

    def __init__(self, source: Frame, target: Frame, ring_map, u=None,
                 section=None, ideal_map=None, ideal_section=None,
                 name: str = "hom"):
        self.source = source
        self.target = target
        self._map = ring_map
        self.u = target.ring.one() if u is None else u
        self._section = section
        self._ideal_map = ideal_map
        self._ideal_section = ideal_section
        self.name = name

    @property
    def strict(self) -> bool:
        t = self.target.ring
        one = t.one()
        if isinstance(self.u, WittVector):
            m = min(self.u.length, one.length)
            return t.eq(self.u.truncate(m), one.truncate(m))
        return t.eq(self.u, one)

    def __repr__(self):
        return f"FrameHom({self.name}: {self.source.kind} -> {self.target.kind})"

    def map(self, x):
        return self._map(x)

    def map_mat(self, M: Mat) -> Mat:
        return M.map_to(self.target.ring, self._map)

    def map_ideal(self, elem):
        if self._ideal_map is not None:
            return self._ideal_map(elem)
        return self.target.ideal_decompose(self._map(elem.value()))

    def section(self, x):
        if self._section is None:
            raise ValueError(f"hom {self.name} has no section")
        return self._section(x)

    def section_mat(self, M: Mat) -> Mat:
        return M.map_to(self.source.ring, self.section)

    def section_ideal(self, elem):
        """Lift an ideal element of the target to an ideal element of
        the source (used when lifting homomorphism matrices)."""
        if self._ideal_section is None:
            raise ValueError(f"hom {self.name} has no ideal section")
        return self._ideal_section(elem)

    def compose(self, inner: FrameHom) -> FrameHom:
        """self o inner, with u = self(u_inner) * u_self."""
        if inner.target is not self.source and inner.target.ring != self.source.ring:
            raise ValueError("homs do not compose")
        t = self.target.ring
        ua = self._map(inner.u)
        if isinstance(ua, WittVector):
            m = min(ua.length, self.u.length)
            u = t.mul(ua.truncate(m), self.u.truncate(m))
        else:
            u = t.mul(ua, self.u)
        sec = None
        if self._section is not None and inner._section is not None:
            sec = lambda x: inner.section(self.section(x))
        imap = None
        if self._ideal_map is not None and inner._ideal_map is not None:
            imap = lambda el: self._ideal_map(inner._ideal_map(el))
        isec = None
        if self._ideal_section is not None and inner._ideal_section is not None:
            isec = lambda el: inner._ideal_section(self._ideal_section(el))
        return FrameHom(inner.source, self.target,
                        lambda x: self._map(inner._map(x)), u=u, section=sec,
                        ideal_map=imap, ideal_section=isec,
                        name=f"{self.name}.{inner.name}")


def factor_hom(hom: FrameHom) -> tuple[FrameHom, FrameHom]:
    """Write a u-homomorphism as (twist) o (strict hom).

    The middle frame is the target with sigma1 divided by u; the first
    factor is strict onto it, the second is the identity ring map with
    unit u.  Composing the two returns a hom equal to the input.
    """
    tw = TwistFrame(hom.target, hom.u)
    strict_part = FrameHom(hom.source, tw, hom._map, section=hom._section,
                           ideal_map=hom._ideal_map, name=hom.name + ".strict")
    twist_part = FrameHom(tw, hom.target, lambda x: x, u=hom.u,
                          section=lambda x: x, ideal_map=lambda el: el,
                          name=hom.name + ".twist")
    return strict_part, twist_part


# -- validation ---------------------------------------------------------------


def _eq(frame: Frame, x, y) -> bool:
    return frame.eq_aligned(x, y)


def validate_frame(frame: Frame, rng, samples: int = 8) -> list[dict]:
    """Per-axiom report for a frame.  Structural facts are checked on
    generators plus random samples; each row carries a witness string.

    Generalised frames (empty unit witness) skip the generation axiom
    and trust the stored theta.
    """
    S = frame.ring
    out = []

    def row(axiom, ok, witness=""):
        out.append({"axiom": axiom, "pass": bool(ok), "witness": witness})

    # ideal inside the radical, theta in the radical
    gens = frame.ideal_gens()
    ok = all(frame.in_radical(g.value()) for g in gens) \
        and frame.in_radical(frame.theta)
    row("radical", ok, "ideal generators and theta have residue 0")

    # sigma is a ring endomorphism lifting Frobenius
    ok = True
    wit = "sigma(x*y)=sigma(x)sigma(y), sigma(x+y)=sigma(x)+sigma(y)"
    for _ in range(samples):
        x, y = S.random(rng), S.random(rng)
        if not _eq(frame, frame.sigma(S.mul(x, y)),
                   S.mul(frame.sigma(x), frame.sigma(y))):
            ok, wit = False, "multiplicativity failed"
            break
        if not _eq(frame, frame.sigma(S.add(x, y)),
                   S.add(frame.sigma(x), frame.sigma(y))):
            ok, wit = False, "additivity failed"
            break
    row("sigma-endomorphism", ok, wit)

    row("frobenius-lift", *_frobenius_lift_check(frame, rng, samples))

    # sigma(i) = theta * sigma1(i) on generators and random multiples
    ok, wit = True, "checked on ideal generators and random multiples"
    for g in gens:
        cands = [g] + [g.scale(S.random(rng)) for _ in range(2)]
        for c in cands:
            lhs = frame.sigma(c.value())
            s1 = frame.sigma1(c)
            th = frame.theta
            if isinstance(lhs, WittVector):
                m = min(lhs.length, s1.length, th.length)
                rhs = S.mul(th.truncate(m), s1.truncate(m))
                lhs = lhs.truncate(m)
            else:
                rhs = S.mul(th, s1)
            if not _eq(frame, lhs, rhs):
                ok, wit = False, f"failed on {c!r}"
                break
        if not ok:
            break
    row("divided-frobenius", ok, wit)

    # sigma-linearity of sigma1
    ok, wit = True, "sigma1(s*i) = sigma(s)*sigma1(i)"
    for g in gens:
        s = S.random(rng)
        lhs = frame.sigma1(g.scale(s))
        rhs0 = frame.sigma(s)
        s1 = frame.sigma1(g)
        if isinstance(lhs, WittVector):
            m = min(lhs.length, rhs0.length, s1.length)
            rhs = S.mul(rhs0.truncate(m), s1.truncate(m))
            lhs = lhs.truncate(m)
        else:
            rhs = S.mul(rhs0, s1)
        if not _eq(frame, lhs, rhs):
            ok, wit = False, f"failed on generator {g!r}"
            break
    row("sigma1-linearity", ok, wit)

    # generation: the unit witness certifies 1 in the span of sigma1(I)
    if frame.unit_witness:
        acc = None
        for y, x in frame.unit_witness:
            s1 = frame.sigma1(x)
            if isinstance(s1, WittVector):
                m = min(y.length, s1.length)
                t = S.mul(y.truncate(m), s1.truncate(m))
            else:
                t = S.mul(y, s1)
            acc = t if acc is None else S.add(acc, t)
        row("sigma1-generates", _eq(frame, acc, S.one()),
            "unit witness sums to 1")
        th = frame.compute_theta()
        if isinstance(th, WittVector):
            m = min(th.length, frame.theta.length)
            okt = _eq(frame, th.truncate(m), frame.theta.truncate(m))
        else:
            okt = _eq(frame, th, frame.theta)
        row("theta-consistent", okt, "stored theta matches the witness sum")
    else:
        row("sigma1-generates", True, "skipped: generalised frame")
        row("theta-consistent", True, "stored theta taken as given")

    # ideal of definition: the radical J contains I + theta*S and is
    # sigma-stable
    ok = frame.in_radical(frame.theta)
    for _ in range(samples):
        x = S.random(rng)
        if frame.residue(x):
            x = S.sub(x, _residue_lift(frame, x))
        if frame.residue(frame.sigma(x)):
            ok = False
            break
    row("ideal-of-definition", ok, "sigma(J)+I+theta*S inside J")
    return out


def _residue_lift(frame: Frame, x):
    S = frame.ring
    if isinstance(x, WittVector):
        return S.teichmuller(S.coeff_ring.const(S.coeff_ring.residue(x.entries[0])))
    return S.const(frame.residue(x))


def _frobenius_lift_check(frame: Frame, rng, samples: int):
    """sigma(x) = x^p mod pS.  Series side: certified by exact division.
    Witt side: the first coordinate of f(x) - x^p is p*x_1 on the nose,
    which is the mod-p statement in the only coordinate visible in R."""
    S = frame.ring
    if isinstance(S, WittRing):
        cr = S.coeff_ring
        for _ in range(samples):
            x = S.random(rng)
            fx = frame.sigma(x)
            xp = x
            for _ in range(S.p - 1):
                xp = S.mul(xp, x)
            d = S.sub(fx, xp.truncate(fx.length))
            want = cr.mul_int(x.entries[1], S.p)
            if not cr.eq(d.entries[0], want):
                return False, "first coordinate of f(x)-x^p is not p*x_1"
        return True, "f(x)-x^p has first coordinate p*x_1"
    for _ in range(samples):
        x = S.random(rng)
        diff = frame.sigma(x) - x ** S.p
        try:
            divide_by_p(diff, 1)
        except ExactnessError:
            return False, "sigma(x)-x^p not divisible by p"
    return True, "sigma(x)-x^p divisible by p (exact witness)"


def validate_frame_hom(hom: FrameHom, rng, samples: int = 6) -> list[dict]:
    """Report for the u-homomorphism axioms, checked on ideal
    generators, their random multiples, and random ring elements."""
    src, tgt = hom.source, hom.target
    S, T = src.ring, tgt.ring
    out = []

    def row(axiom, ok, witness=""):
        out.append({"axiom": axiom, "pass": bool(ok), "witness": witness})

    gens = src.ideal_gens()
    ok = all(tgt.in_ideal(hom.map(g.value())) for g in gens)
    for g in gens:
        for _ in range(2):
            if not tgt.in_ideal(hom.map(g.scale(S.random(rng)).value())):
                ok = False
    row("maps-ideal", ok, "alpha(I) inside I'")

    ok = True
    for _ in range(samples):
        x = S.random(rng)
        lhs = hom.map(src.sigma(x))
        rhs = tgt.sigma(hom.map(x))
        if isinstance(rhs, WittVector):
            m = min(lhs.length, rhs.length)
            lhs, rhs = lhs.truncate(m), rhs.truncate(m)
        if not tgt.eq_aligned(lhs, rhs):
            ok = False
            break
    row("sigma-compatible", ok, "alpha(sigma(x)) = sigma'(alpha(x))")

    ok = True
    for g in gens:
        cands = [g, g.scale(S.random(rng))]
        for c in cands:
            lhs = tgt.sigma1(hom.map_ideal(c))
            rhs0 = hom.map(src.sigma1(c))
            if isinstance(lhs, WittVector):
                m = min(lhs.length, rhs0.length, hom.u.length)
                rhs = T.mul(hom.u.truncate(m), rhs0.truncate(m))
                lhs = lhs.truncate(m)
            else:
                rhs = T.mul(hom.u, rhs0)
            if not tgt.eq_aligned(lhs, rhs):
                ok = False
                break
        if not ok:
            break
    row("sigma1-compatible", ok, "sigma1'(alpha(i)) = u * alpha(sigma1(i))")

    lhs = hom.map(src.theta)
    rhs0 = tgt.theta
    if isinstance(lhs, WittVector):
        m = min(lhs.length, rhs0.length, hom.u.length)
        okt = tgt.eq_aligned(lhs.truncate(m),
                             T.mul(hom.u.truncate(m), rhs0.truncate(m)))
    else:
        okt = tgt.eq_aligned(lhs, T.mul(hom.u, rhs0))
    row("theta-compatible", okt, "alpha(theta) = u * theta'")

    if hom._section is not None:
        ok = True
        for _ in range(samples):
            x = T.random(rng)
            if not tgt.eq_aligned(hom.map(hom.section(x)), x):
                ok = False
                break
        row("section", ok, "alpha(section(x)) = x")
    return out


# -- constructors -------------------------------------------------------------


def make_breuil_frame(desc: RingDesc) -> BreuilFrame:
    return BreuilFrame(desc)


_FP_QUOTIENTS: dict[int, QuotientRing] = {}


def fp_quotient(p: int) -> QuotientRing:
    """The residue field F_p presented as a quotient ring (cached)."""
    if p not in _FP_QUOTIENTS:
        from .series import SeriesRing, SigmaSpec
        ring = SeriesRing(p, 1, 0, 1)
        desc = RingDesc(ring, ring.const(p), SigmaSpec(ring, None, standard=True))
        _FP_QUOTIENTS[p] = desc.quotient
    return _FP_QUOTIENTS[p]


def residue_witt_int(w: WittVector) -> int:
    """Image of w under W_n(R) -> W_n(F_p) = Z/p^n, as an integer."""
    from .witt import digit_peel_int
    qring = w.ring.coeff_ring
    fp = fp_quotient(w.ring.p)
    Wfp = WittRing(fp, w.length)
    vec = Wfp.from_entries([fp.const(qring.residue(t)) for t in w.entries])
    return digit_peel_int(vec)


def make_witt_frame(qring: QuotientRing, n: int,
                    check_reachability: bool = False, rng=None) -> WittFrame:
    """Truncated Witt frame over R.  With check_reachability, verify on
    a sample that every W_n(R) element is an integer multiple of 1 plus
    a vector with radical entries (the Zink-variant agreement)."""
    W = WittRing(qring, n)
    frame = WittFrame(W)
    if check_reachability:
        if rng is None:
            raise ValueError("reachability check needs an rng")
        for _ in range(6):
            w = W.random(rng)
            d = W.sub(w, W.from_int(residue_witt_int(w)))
            if any(qring.residue(t) for t in d.entries):
                raise FrameAxiomError("W_n(R) element not integer + radical vector")
    return frame


def make_relative_breuil(desc: RingDesc, jdeg: int | None = None) -> RelativeBreuilFrame:
    if jdeg is None:
        jdeg = desc.ring.a - 1
    return RelativeBreuilFrame(desc, jdeg)


def make_relative_dieudonne(qring: QuotientRing, bdeg: int, n: int) -> RelativeWittFrame:
    frame = RelativeWittFrame(WittRing(qring, n), bdeg)
    _check_rel_witt_overlap(frame)
    return frame


def _check_rel_witt_overlap(frame: RelativeWittFrame):
    """Elements of W(b) with first entry 0 admit both splits; the two
    sigma1 values must coincide (log coordinates are Witt coordinates
    on the square-zero layer)."""
    W = frame.ring
    qring = frame.qring
    top = [e for e in qring.desc.ring.exps if sum(e) >= frame.bdeg]
    if not top:
        return
    m = qring.from_coeffs({top[0]: 1})
    entries = [qring.zero()] * W.n
    entries[1] = m
    lv = LogVector(W, tuple(entries))
    w = lv.exp()  # = v-image as well: first entry 0
    via_log = RelWittIdeal(frame, W.truncated(W.n - 1).zero(), lv).sigma1()
    via_v = RelWittIdeal(frame, W.f1(w),
                         LogVector(W, (qring.zero(),) * W.n)).sigma1()
    mm = min(via_log.length, via_v.length)
    if not W.eq(via_log.truncate(mm), via_v.truncate(mm)):
        raise FrameAxiomError("relative Witt sigma1 routes disagree on overlap")


def make_quotient_frame(desc: RingDesc, cap_exp: int) -> RelativeBreuilFrame:
    """Capped boundary frame: coefficients of the top monomial layer are
    reduced mod p^cap_exp.  These are the rungs of the finite tower that
    replaces a crystalline step when sigma does not kill the kernel."""
    jdeg = desc.ring.a - 1
    capped = desc.with_cap(jdeg, cap_exp)
    return RelativeBreuilFrame(capped, jdeg)


# -- standard projections ------------------------------------------------------


def breuil_projection(upper: BreuilFrame, lower: BreuilFrame) -> FrameHom:
    """Strict projection between series frames at levels a+1 -> a (any
    drop in level and/or precision along canonical normal forms)."""
    up, lo = upper.desc, lower.desc
    ring_map = lambda x: up.ring.convert(x, lo.ring)
    section = lambda x: lo.ring.convert(x, up.ring)
    ideal_map = lambda el: IdealElem(lo, ring_map(el.y))
    return FrameHom(upper, lower, ring_map, section=section,
                    ideal_map=ideal_map, name="breuil-proj")


def witt_reduction(upper: WittFrame, lower: WittFrame) -> FrameHom:
    """Strict entrywise reduction W_n(R_up) -> W_m(R_lo), m <= n."""
    if lower.n > upper.n:
        raise ConfigError("cannot lengthen along a reduction")
    lo_q = lower.R
    up_q = upper.R

    def qmap(t):
        return lo_q.reduce(lo_q.desc.ring.from_coeffs(t.c))

    def ring_map(w):
        m = min(w.length, lower.n)
        return lower.ring.truncated(m).from_entries(
            [qmap(t) for t in w.entries[:m]])

    def section(w):
        ents = [up_q.reduce(up_q.desc.ring.from_coeffs(t.c)) for t in w.entries]
        if len(ents) == lower.n:
            ents += [up_q.zero()] * (upper.n - lower.n)
        return upper.ring.truncated(len(ents)).from_entries(ents)

    ideal_map = lambda el: WittIdeal(lower, ring_map(el.vec))
    return FrameHom(upper, lower, ring_map, section=section,
                    ideal_map=ideal_map, name="witt-reduction")


def inclusion_to_relative(base: Frame, rel: Frame) -> FrameHom:
    """Strict identity-on-S hom from a frame into its enlarged-ideal
    variant (series or Witt)."""
    if base.ring != rel.ring:
        raise ConfigError("relative frame must share the ring")
    if isinstance(base, BreuilFrame):
        ideal_map = lambda el: RelSeriesIdeal(rel, el.y, rel.ring.zero())
    else:
        zlog = LogVector(rel.ring, (rel.qring.zero(),) * rel.ring.n)
        ideal_map = lambda el: RelWittIdeal(rel, rel.ring.f1(el.vec), zlog)
    return FrameHom(base, rel, lambda x: x, section=lambda x: x,
                    ideal_map=ideal_map, name="widen-ideal")


def relative_projection(rel: RelativeBreuilFrame, lower: BreuilFrame) -> FrameHom:
    """Strict projection from the enlarged-ideal series frame at level a
    to the plain frame at level a-1; kills the top monomial layer."""
    if lower.desc.ring.a != rel.jdeg:
        raise ConfigError("projection target must sit at the boundary level")
    ring_map = lambda x: rel.ring.convert(x, lower.desc.ring)
    section = lambda x: lower.desc.ring.convert(x, rel.ring)
    ideal_map = lambda el: IdealElem(lower.desc, ring_map(el.y))
    return FrameHom(rel, lower, ring_map, section=section,
                    ideal_map=ideal_map, name="rel-breuil-proj")


def relative_witt_projection(rel: RelativeWittFrame, lower: WittFrame) -> FrameHom:
    """Strict entrywise projection from the relative Witt frame over R_a
    to the plain Witt frame over R_(a-1)."""
    lo_q = lower.R

    def qmap(t):
        return lo_q.reduce(lo_q.desc.ring.from_coeffs(t.c))

    def ring_map(w):
        m = min(w.length, lower.n)
        return lower.ring.truncated(m).from_entries(
            [qmap(t) for t in w.entries[:m]])

    up_q = rel.qring

    def section(w):
        ents = [up_q.reduce(up_q.desc.ring.from_coeffs(t.c)) for t in w.entries]
        if len(ents) == lower.n:
            ents += [up_q.zero()] * (rel.ring.n - lower.n)
        return rel.ring.truncated(len(ents)).from_entries(ents)

    def ideal_map(el):
        vp = el.vpart
        m = min(vp.length, lower.n - 1)
        short = lower.ring.truncated(m)
        return WittIdeal(lower, lower.ring.verschiebung(
            short.from_entries([qmap(t) for t in vp.entries[:m]])))

    return FrameHom(rel, lower, ring_map, section=section,
                    ideal_map=ideal_map, name="rel-witt-proj")
