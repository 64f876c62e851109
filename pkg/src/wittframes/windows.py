"""Windows in normal representation over a frame.

A window is stored as ranks (rkL, rkT) plus the invertible matrix whose
first rkL columns are the divided-Frobenius images of the L-part basis
and whose last rkT columns are the Frobenius images of the T-part basis.
Both operators, duality, the V-linearisation and the nilpotence tests
are derived from that matrix; the submodule Q is never materialized.
"""
from __future__ import annotations

from .frames import Frame, FrameHom
from .linalg import Mat, NotInvertibleError
from .series import QuotientElem, TruncSeries
from .witt import WittVector


class WindowError(ValueError):
    """Window invariant violated."""


class Window:
    """Normal representation of a window.

    Elements of P are coordinate lists of length rkL+rkT over the frame
    ring; elements of Q are given as plain coordinates on the L-part and
    one ideal element (cofactor data) per T-basis vector.
    """

    __slots__ = ("frame", "rkL", "rkT", "psi", "_inv")

    def __init__(self, frame: Frame, rkL: int, rkT: int, psi: Mat,
                 check: bool = True):
        d = rkL + rkT
        if psi.nrows != d or psi.ncols != d:
            raise WindowError(
                f"matrix is {psi.nrows}x{psi.ncols}, ranks require {d}x{d}")
        self.frame = frame
        self.rkL = int(rkL)
        self.rkT = int(rkT)
        self.psi = psi
        self._inv = None
        if check and not frame.generalised:
            try:
                self._inv = psi.invert()
            except NotInvertibleError as exc:
                raise WindowError(f"normal matrix must be invertible: {exc}")

    @property
    def dim(self) -> int:
        return self.rkL + self.rkT

    @property
    def ring(self):
        return self.frame.ring

    def __repr__(self):
        return f"Window({self.frame!r}, rkL={self.rkL}, rkT={self.rkT})"

    def psi_inverse(self) -> Mat:
        if self._inv is None:
            self._inv = self.psi.invert()
        return self._inv

    def f_matrix(self) -> Mat:
        """Linearisation of F on all of P: the L-columns gain theta."""
        ring, th, k = self.ring, self.frame.theta, self.rkL
        rows = [[ring.mul(x, th) if j < k else x
                 for j, x in enumerate(row)] for row in self.psi.rows]
        return Mat(ring, rows)

    def eq(self, other: "Window") -> bool:
        if self.rkL != other.rkL or self.rkT != other.rkT:
            return False
        if self.frame is not other.frame and self.frame != other.frame:
            return False
        ring = self.ring
        return all(ring.eq(a, b)
                   for ra, rb in zip(self.psi.rows, other.psi.rows)
                   for a, b in zip(ra, rb))


def eval_F(w: Window, xs) -> list:
    """F applied to a module element given by its coordinate list."""
    fr = w.frame
    if len(xs) != w.dim:
        raise WindowError("coordinate list has wrong length")
    return w.f_matrix().apply([fr.sigma(x) for x in xs])


def eval_F1(w: Window, lpart, tpart) -> list:
    """F1 applied to an element of Q.

    lpart: rkL plain ring elements; tpart: rkT ideal elements (the
    coefficient of each T-basis vector, carried with its cofactor data).
    """
    fr = w.frame
    if len(lpart) != w.rkL or len(tpart) != w.rkT:
        raise WindowError("coordinate shape mismatch")
    vec = [fr.sigma(x) for x in lpart] + [fr.sigma1(el) for el in tpart]
    return w.psi.apply(vec)


def q_value_coords(w: Window, lpart, tpart) -> list:
    """Coordinates in P of a Q-element given in (lpart, tpart) form."""
    return list(lpart) + [el.value() for el in tpart]


def random_q_elem(w: Window, rng):
    """Random element of Q in (lpart, tpart) form."""
    ring = w.ring
    lpart = [ring.random(rng) for _ in range(w.rkL)]
    tpart = []
    for _ in range(w.rkT):
        gens = w.frame.ideal_gens()
        el = gens[0].scale(ring.random(rng))
        for g in gens[1:]:
            el = el + g.scale(ring.random(rng))
        tpart.append(el)
    return lpart, tpart


def _vec_eq(fr: Frame, xs, ys) -> bool:
    return all(fr.eq_aligned(x, y) for x, y in zip(xs, ys))


def validate_window(w: Window, rng, samples: int = 6) -> list[dict]:
    """Axiom report for a window: invertibility (or generation in the
    generalised case), F = theta*F1 on Q, sigma-linearity of F, and the
    ideal rule F1(a*x) = sigma1(a)*F(x)."""
    fr, ring = w.frame, w.ring
    rows = []

    def row(axiom, ok, witness=""):
        rows.append({"axiom": axiom, "pass": bool(ok), "witness": witness})

    if fr.generalised:
        span = w.psi.hstack(w.f_matrix())
        ok = _residue_rank(fr, span) == w.dim
        row("f1-plus-f-generates", ok, "residue rank of [Psi | F]")
    else:
        row("matrix-invertible", w.psi.is_invertible(), "unit determinant")

    ok = True
    for _ in range(samples):
        lp, tp = random_q_elem(w, rng)
        f1 = eval_F1(w, lp, tp)
        f = eval_F(w, q_value_coords(w, lp, tp))
        if not _vec_eq(fr, f, [ring.mul(fr.theta, y) for y in f1]):
            ok = False
            break
    row("theta-times-f1", ok, "F = theta*F1 on random Q samples")

    ok = True
    for _ in range(samples):
        xs = [ring.random(rng) for _ in range(w.dim)]
        s = ring.random(rng)
        lhs = eval_F(w, [ring.mul(s, x) for x in xs])
        rhs = [ring.mul(fr.sigma(s), y) for y in eval_F(w, xs)]
        if not _vec_eq(fr, lhs, rhs):
            ok = False
            break
    row("sigma-linear", ok, "F(s*x) = sigma(s)*F(x)")

    ok = True
    for _ in range(samples):
        xs = [ring.random(rng) for _ in range(w.dim)]
        gens = fr.ideal_gens()
        a = gens[0].scale(ring.random(rng))
        for g in gens[1:]:
            a = a + g.scale(ring.random(rng))
        lp = [ring.mul(a.value(), xs[i]) for i in range(w.rkL)]
        tp = [a.scale(xs[w.rkL + j]) for j in range(w.rkT)]
        lhs = eval_F1(w, lp, tp)
        rhs = [ring.mul(fr.sigma1(a), y) for y in eval_F(w, xs)]
        if not _vec_eq(fr, lhs, rhs):
            ok = False
            break
    row("divided-ideal-rule", ok, "F1(a*x) = sigma1(a)*F(x)")
    return rows


def _residue_rank(fr: Frame, m: Mat) -> int:
    """Rank of the entrywise residue matrix over the prime field."""
    p = _prime(fr)
    a = [[fr.residue(x) % p for x in row] for row in m.rows]
    rank, ncols = 0, (len(a[0]) if a else 0)
    for col in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][col] % p), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], -1, p)
        a[rank] = [(inv * v) % p for v in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][col]:
                f = a[i][col]
                a[i] = [(v - f * u) % p for v, u in zip(a[i], a[rank])]
        rank += 1
    return rank


def _prime(fr: Frame) -> int:
    ring = fr.ring
    if hasattr(ring, "p"):
        return ring.p
    return ring.coeff_ring.desc.ring.p


# ---------------------------------------------------------------------------
# homomorphisms

class WindowHom:
    """Matrix of a homomorphism between windows over one frame.

    u records the twist unit when the hom was produced by transporting
    along a non-strict frame homomorphism; within a single frame the
    defining conditions always hold with u = 1.
    """

    __slots__ = ("source", "target", "mat", "u")

    def __init__(self, source: Window, target: Window, mat: Mat, u=None):
        if mat.nrows != target.dim or mat.ncols != source.dim:
            raise WindowError("homomorphism matrix has wrong shape")
        self.source = source
        self.target = target
        self.mat = mat
        self.u = source.ring.one() if u is None else u


def check_window_hom(w1: Window, w2: Window, mat: Mat) -> tuple[bool, list]:
    """Verify that a matrix defines a window homomorphism w1 -> w2.

    Checks, on the canonical Q-generators: preservation of Q, the
    divided-Frobenius intertwining, and the Frobenius intertwining.
    Returns (ok, report rows).  All algebra is re-evaluated from
    scratch; nothing about the provenance of mat is trusted.
    """
    fr, ring = w1.frame, w1.ring
    if w2.frame is not fr and w2.frame != fr:
        raise WindowError("windows live over different frames")
    if mat.nrows != w2.dim or mat.ncols != w1.dim:
        raise WindowError("homomorphism matrix has wrong shape")
    rows = []

    def row(axiom, ok, witness=""):
        rows.append({"axiom": axiom, "pass": bool(ok), "witness": witness})

    ok = all(fr.in_ideal(mat.rows[i][j])
             for j in range(w1.rkL) for i in range(w2.rkL, w2.dim))
    row("q-preserved", ok, "T-rows of L-columns lie in the ideal")

    # g(F1(l)) = F1'(g(l)) on the L-basis; the image is decomposed to
    # evaluate F1' through cofactors.
    ok = True
    bad = ""
    if rows[0]["pass"]:
        for j in range(w1.rkL):
            col = mat.col(j)
            lp = col[:w2.rkL]
            tp = [fr.ideal_decompose(c) for c in col[w2.rkL:]]
            lhs = eval_F1(w2, lp, tp)
            rhs = mat.apply(w1.psi.col(j))
            if not _vec_eq(fr, lhs, rhs):
                ok, bad = False, f"L-column {j}"
                break
    else:
        ok, bad = False, "skipped, Q not preserved"
    row("f1-intertwines-L", ok, bad)

    # g(F1(a*t)) = F1'(a*g(t)) for each ideal generator a; scaling the
    # generator keeps exact cofactor data on the left side.
    ok, bad = True, ""
    f2 = w2.f_matrix()
    for j in range(w1.rkT):
        hcol = mat.col(w1.rkL + j)
        base = mat.apply(w1.psi.col(w1.rkL + j))
        for gi, g in enumerate(fr.ideal_gens()):
            scaled = [g.scale(c) for c in hcol]
            lhs = f2.apply([fr.sigma1(el) for el in scaled])
            s1 = fr.sigma1(g)
            rhs = [ring.mul(s1, y) for y in base]
            if not _vec_eq(fr, lhs, rhs):
                ok, bad = False, f"T-column {j}, generator {gi}"
                break
        if not ok:
            break
    row("f1-intertwines-T", ok, bad)

    ok, bad = True, ""
    f1 = w1.f_matrix()
    for m in range(w1.dim):
        lhs = f2.apply([fr.sigma(c) for c in mat.col(m)])
        rhs = mat.apply(f1.col(m))
        if not _vec_eq(fr, lhs, rhs):
            ok, bad = False, f"column {m}"
            break
    row("f-intertwines", ok, bad)
    return all(r["pass"] for r in rows), rows


def is_window_iso(w1: Window, w2: Window, mat: Mat) -> tuple[bool, list]:
    ok, rows = check_window_hom(w1, w2, mat)
    inv_ok = mat.nrows == mat.ncols and mat.is_invertible()
    rows.append({"axiom": "invertible", "pass": inv_ok, "witness": ""})
    return ok and inv_ok, rows


# ---------------------------------------------------------------------------
# base change, duality, Hodge data

def base_change(hom: FrameHom, w: Window) -> Window:
    """Push a window along a frame homomorphism: map the matrix through
    the ring map and scale the L-columns by the twist unit."""
    if w.frame is not hom.source and w.frame != hom.source:
        raise WindowError("window lives over a different frame")
    tgt = hom.target
    m = hom.map_mat(w.psi)
    if not hom.strict:
        ring, k = tgt.ring, w.rkL
        m = Mat(ring, [[ring.mul(x, hom.u) if j < k else x
                        for j, x in enumerate(row)] for row in m.rows])
    return Window(tgt, w.rkL, w.rkT, m)


def _block_swap(m: Mat, k: int) -> Mat:
    """Conjugate by the permutation that moves the last d-k indices in
    front of the first k."""
    d = m.nrows
    perm = list(range(k, d)) + list(range(k))
    rows = [[m.rows[perm[i]][perm[j]] for j in range(d)] for i in range(d)]
    return Mat(m.ring, rows)


def dual(w: Window) -> Window:
    """Dual window: inverse transpose of the matrix with the two index
    blocks swapped; ranks interchange."""
    m = _block_swap(w.psi_inverse().transpose(), w.rkL)
    return Window(w.frame, w.rkT, w.rkL, m)


def hodge(w: Window, dressing: Mat | None = None) -> Mat:
    """The Hodge filtration as a matrix over R whose columns span the
    image of Q in P/IP.

    In normal representation that image is spanned by the L-basis, so
    the plain answer is the first rkL columns of the identity; a
    dressing automorphism of P (as produced by deformation) moves the
    filtration to the projection of its first rkL columns.
    """
    fr = w.frame
    base = dressing if dressing is not None else Mat.identity(w.ring, w.dim)
    rows = [[fr.project_R(base.rows[i][j]) for j in range(w.rkL)]
            for i in range(w.dim)]
    return Mat(fr.R, rows)


def v_sharp(w: Window) -> Mat:
    """Linearisation of the V-operator: diag(1, theta) times the matrix
    inverse."""
    ring = w.ring
    d = Mat.diag(ring, [ring.one()] * w.rkL + [w.frame.theta] * w.rkT)
    return d * w.psi_inverse()


def v_sharp_identity(w: Window) -> bool:
    """Both defining identities of the V-linearisation: V*Psi equals the
    twisted inclusion diag(1, theta), and V*F equals theta times the
    identity."""
    fr, ring = w.frame, w.ring
    v = v_sharp(w)
    inc = Mat.diag(ring, [ring.one()] * w.rkL + [fr.theta] * w.rkT)
    lhs = v * w.psi
    if not all(fr.eq_aligned(a, b) for ra, rb in zip(lhs.rows, inc.rows)
               for a, b in zip(ra, rb)):
        return False
    vf = v * w.f_matrix()
    th = Mat.diag(ring, [fr.theta] * w.dim)
    return all(fr.eq_aligned(a, b) for ra, rb in zip(vf.rows, th.rows)
               for a, b in zip(ra, rb))


# ---------------------------------------------------------------------------
# nilpotence

def _twisted_zero_degree(mat, p, bound):
    """Smallest m with M * M^(sigma) * ... * M^(sigma^(m-1)) = 0 over
    the prime field, where sigma is the entrywise p-th power; None if
    the bound is exceeded."""
    d = len(mat)
    if d == 0:
        return 0
    total = [row[:] for row in mat]
    for m in range(1, bound + 1):
        if all(v % p == 0 for row in total for v in row):
            return m
        twist = [[pow(v, p ** m, p) for v in row] for row in mat]
        total = [[sum(total[i][l] * twist[l][j] for l in range(d)) % p
                  for j in range(d)] for i in range(d)]
    return None


def is_nilpotent(w: Window) -> tuple[bool, int | None, dict]:
    """Nilpotence of the window over the residue field, decided twice:
    by twisted powers of the V-linearisation and by the leading L-block
    of the matrix inverse.  The two verdicts must agree."""
    fr = w.frame
    if fr.residue(fr.theta) != 0:
        raise WindowError("theta must lie in the ideal of definition")
    p = _prime(fr)
    k, d = w.rkL, w.dim

    vbar = [[fr.residue(x) % p for x in row] for row in v_sharp(w).rows]
    vdeg = _twisted_zero_degree(vbar, p, d + 1)

    inv = w.psi_inverse()
    lam = [[fr.residue(inv.rows[i][j]) % p for j in range(k)]
           for i in range(k)]
    ldeg = _twisted_zero_degree(lam, p, k + 1)

    nil_v, nil_l = vdeg is not None, ldeg is not None
    if nil_v != nil_l:
        raise WindowError(
            f"nilpotence criteria disagree: V-power {vdeg}, L-block {ldeg}")
    return nil_v, vdeg, {"v_power_degree": vdeg, "lambda_degree": ldeg}


# ---------------------------------------------------------------------------
# construction and serialization

def random_window(frame: Frame, rkL: int, rkT: int, rng,
                  tries: int = 50) -> Window:
    """Random window with the given ranks; retries until the matrix is
    invertible."""
    d, ring = rkL + rkT, frame.ring
    for _ in range(tries):
        m = Mat(ring, [[ring.random(rng) for _ in range(d)]
                       for _ in range(d)])
        try:
            return Window(frame, rkL, rkT, m)
        except WindowError:
            continue
    raise WindowError(f"no invertible {d}x{d} sample in {tries} tries")


def entry_to_jsonable(x):
    if isinstance(x, WittVector):
        return {"w": [entry_to_jsonable(e) for e in x.entries]}
    if isinstance(x, QuotientElem):
        return {"q": [[list(e), v] for e, v in sorted(x.c.items())]}
    if isinstance(x, TruncSeries):
        return {"s": [[list(e), v] for e, v in sorted(x.c.items())]}
    raise TypeError(f"cannot serialize {type(x).__name__}")


def entry_from_jsonable(ring, data):
    if "w" in data:
        coeffs = [entry_from_jsonable(ring.coeff_ring, e) for e in data["w"]]
        return ring.from_entries(coeffs)
    if "q" in data:
        return ring.from_coeffs({tuple(e): v for e, v in data["q"]})
    if "s" in data:
        return ring.from_coeffs({tuple(e): v for e, v in data["s"]})
    raise ValueError("unknown entry encoding")


def window_to_jsonable(w: Window) -> dict:
    return {
        "frame_ref": repr(w.frame),
        "rkL": w.rkL,
        "rkT": w.rkT,
        "psi": [entry_to_jsonable(x) for row in w.psi.rows for x in row],
    }


def window_from_jsonable(frame: Frame, data: dict) -> Window:
    if data.get("frame_ref") != repr(frame):
        raise WindowError(
            f"window was saved over {data.get('frame_ref')}, "
            f"got {frame!r}")
    rkL, rkT = int(data["rkL"]), int(data["rkT"])
    d = rkL + rkT
    flat = [entry_from_jsonable(frame.ring, e) for e in data["psi"]]
    if len(flat) != d * d:
        raise WindowError("entry list has wrong length")
    rows = [flat[i * d:(i + 1) * d] for i in range(d)]
    return Window(frame, rkL, rkT, Mat(frame.ring, rows))
