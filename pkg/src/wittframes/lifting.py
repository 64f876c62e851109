"""Transport of windows along strict frame surjections.

The central algorithm solves, for two windows that agree modulo the
kernel of the surjection, the fixed-point system whose unique solution
is the isomorphism congruent to the identity.  The same affine
iteration transports homomorphisms given modulo the kernel.  Solver
output is always re-verified against the window axioms from scratch;
the engine never trusts its own algebra.

A kernel killed by sigma is handled in one solve.  Kernels that sigma
only shrinks are handled through an explicit finite filtration,
supplied as a chain of single-layer problems over intermediate frames.
"""

from __future__ import annotations

from .frames import Frame, FrameHom, RelSeriesIdeal, RelWittIdeal
from .linalg import Mat
from .witt import LogVector, WittVector
from .windows import (Window, WindowError, WindowHom, base_change,
                      check_window_hom, eval_F1, is_window_iso)


class LiftError(ArithmeticError):
    """A lifting hypothesis failed or an iteration did not terminate."""


NIL_MODES = ("none", "elementwise", "j-adic")


class LiftProblem:
    """A strict frame surjection together with kernel data.

    kernel_basis is an F_p-basis of the kernel (ring elements of the
    source; all must lie inside the source frame ideal).  contains is
    the kernel membership test used on discrepancies and on solver
    output.  nil_mode names the termination argument: "elementwise"
    means the divided Frobenius is nilpotent on each basis element,
    "j-adic" means a declared ideal power kills the kernel, "none"
    leaves termination to the iteration cap.

    filtration, when set, is the chain of single-layer problems over
    intermediate frames whose composite is this problem; order is from
    the rung touching the target up to the rung touching the source.
    """

    def __init__(self, alpha: FrameHom, kernel_basis, contains=None,
                 fp_dim=None, nil_mode="elementwise", nil_bound=None,
                 j_gens=None, j_bound=None, filtration=None, name="lift"):
        if nil_mode not in NIL_MODES:
            raise LiftError(f"unknown nil_mode {nil_mode!r}")
        if nil_mode == "j-adic" and (j_gens is None or j_bound is None):
            raise LiftError("j-adic mode needs j_gens and j_bound")
        self.alpha = alpha
        self.kernel_basis = list(kernel_basis)
        self.contains = contains
        self.fp_dim = len(self.kernel_basis) if fp_dim is None else fp_dim
        self.nil_mode = nil_mode
        self.nil_bound = nil_bound
        self.j_gens = list(j_gens) if j_gens else []
        self.j_bound = j_bound
        self.filtration = list(filtration) if filtration else None
        self.name = name

    @classmethod
    def tower(cls, rungs, name="tower"):
        """Composite problem for a chain of rungs (target rung first)."""
        if not rungs:
            raise LiftError("empty tower")
        for lower, upper in zip(rungs, rungs[1:]):
            if not _same_frame(upper.alpha.target, lower.alpha.source):
                raise LiftError("tower rungs do not chain")
        alpha = rungs[0].alpha
        for rung in rungs[1:]:
            alpha = alpha.compose(rung.alpha)
        dim = sum(r.fp_dim for r in rungs)
        return cls(alpha, [], contains=None, fp_dim=dim,
                   filtration=list(rungs), name=name)

    def iteration_cap(self, d2: int, k: int) -> int:
        # dimension of the space the unknown lives in, plus slack to
        # detect stabilisation
        return self.fp_dim * d2 * max(k, 1) + 2

    def __repr__(self):
        layers = len(self.filtration) if self.filtration else 1
        return (f"LiftProblem({self.name}: {self.alpha.source.kind} -> "
                f"{self.alpha.target.kind}, dim={self.fp_dim}, layers={layers})")


def _same_frame(a: Frame, b: Frame) -> bool:
    return a is b or (a.kind == b.kind and a.ring == b.ring)


def _prime(ring) -> int:
    return ring.p


def kernel_elements(problem: LiftProblem, limit: int = 4096) -> list:
    """Every F_p-combination of the kernel basis.

    With an F_p-basis (the builders guarantee one) this enumerates the
    whole kernel; used by brute-force uniqueness checks.
    """
    ring = problem.alpha.source.ring
    p = _prime(ring)
    if p ** len(problem.kernel_basis) > limit:
        raise LiftError("kernel too large to enumerate")
    elems = [ring.zero()]
    for b in problem.kernel_basis:
        elems = [ring.add(e, ring.mul_int(b, c))
                 for e in elems for c in range(p)]
    return elems


def validate_lift_problem(problem: LiftProblem, rng, samples: int = 6) -> list[dict]:
    """Per-hypothesis report; layered problems report rung by rung."""
    if problem.filtration:
        out = []
        for i, rung in enumerate(problem.filtration):
            for r in validate_lift_problem(rung, rng, samples):
                out.append({"axiom": f"layer{i}-{r['axiom']}",
                            "pass": r["pass"], "witness": r["witness"]})
        return out

    alpha = problem.alpha
    src, tgt = alpha.source, alpha.target
    S, T = src.ring, tgt.ring
    basis = problem.kernel_basis
    out = []

    def row(axiom, ok, witness=""):
        out.append({"axiom": axiom, "pass": bool(ok), "witness": witness})

    row("alpha-strict", alpha.strict, "transport needs u = 1")

    ok = True
    for _ in range(samples):
        x = T.random(rng)
        if not tgt.eq_aligned(alpha.map(alpha.section(x)), x):
            ok = False
            break
    row("section", ok, "alpha(section(x)) = x")

    row("kernel-vanishes", all(T.is_zero(alpha.map(b)) for b in basis),
        "basis maps to zero")

    row("kernel-in-ideal", all(src.in_ideal(b) for b in basis),
        "sigma1 must be defined on the kernel")

    ok = all(problem.contains(b) for b in basis)
    for b in basis:
        for _ in range(2):
            if not problem.contains(S.mul(S.random(rng), b)):
                ok = False
    row("kernel-module", ok, "membership closed under ring multiples")

    row("sigma-kills", all(S.is_zero(src.sigma(b)) for b in basis),
        "single layer: sigma(kernel) = 0")

    ok = True
    for b in basis:
        try:
            good = S.is_zero(b) or problem.contains(
                src.sigma1(src.ideal_decompose(b)))
        except ValueError:
            good = False
        if not good:
            ok = False
            break
    row("sigma1-preserves", ok, "sigma1(kernel) stays inside the kernel")

    if problem.nil_mode == "elementwise":
        bound = problem.nil_bound or problem.fp_dim + 1
        ok, wit = True, f"each basis element dies within {bound} steps"
        for b in basis:
            c, steps = b, 0
            while not S.is_zero(c):
                steps += 1
                if steps > bound:
                    ok, wit = False, "divided-Frobenius orbit did not vanish"
                    break
                try:
                    c = src.sigma1(src.ideal_decompose(c))
                except ValueError:
                    ok, wit = False, "orbit left the frame ideal"
                    break
            if not ok:
                break
        row("sigma1-nilpotent", ok, wit)
    elif problem.nil_mode == "j-adic":
        from itertools import combinations_with_replacement
        ok = True
        for combo in combinations_with_replacement(problem.j_gens,
                                                   problem.j_bound):
            for b in basis:
                prod = b
                for g in combo:
                    prod = S.mul(g, prod)
                if not S.is_zero(prod):
                    ok = False
        row("j-power-kills", ok,
            f"J^{problem.j_bound} * kernel = 0 on the basis")
    else:
        row("nilpotence", True, "skipped: relying on the iteration cap")
    return out


# ---------------------------------------------------------------------------
# the affine solver

class SolverState:
    """Transcript of one solve: discrepancies, projection blocks, the
    solution split, and how the iteration went."""

    __slots__ = ("eta", "eps", "lam", "tau", "omega_l", "omega_t", "omega",
                 "iterations", "cap", "length_floor", "checks")

    def __init__(self, eta, eps, lam, tau, omega_l, omega, iterations, cap,
                 length_floor):
        self.eta = eta
        self.eps = eps
        self.lam = lam
        self.tau = tau
        self.omega_l = omega_l
        self.omega_t = eps        # the T-part of the solution is the F-discrepancy
        self.omega = omega
        self.iterations = iterations
        self.cap = cap
        self.length_floor = length_floor
        self.checks = None

    def report(self) -> dict:
        return {"iterations": self.iterations, "cap": self.cap,
                "length_floor": self.length_floor,
                "checks": self.checks}


def _sigma1_entries(frame: Frame, m: Mat) -> Mat:
    """Divided Frobenius through the canonical decomposition, entrywise."""
    def one(e):
        try:
            return frame.sigma1(frame.ideal_decompose(e))
        except ValueError as exc:
            raise LiftError(f"kernel entry cannot be decomposed: {exc}")
    return m.map(one)


def _is_identity(ring, m: Mat) -> bool:
    if m.nrows != m.ncols:
        return False
    one, zero = ring.one(), ring.zero()
    return all(ring.eq(e, one if i == j else zero)
               for i, row in enumerate(m.rows) for j, e in enumerate(row))


def _apply_f1_kernel(w: Window, m: Mat) -> Mat:
    # F1 of an ideal-entried combination of basis vectors is the
    # F-linearisation times the entrywise divided Frobenius
    return w.f_matrix() * _sigma1_entries(w.frame, m)


def _mat_from_cols(ring, cols, nrows) -> Mat:
    if not cols:
        return Mat(ring, [[] for _ in range(nrows)])
    return Mat(ring, [[c[i] for c in cols] for i in range(nrows)])


def _mat_aligned_eq(fr: Frame, a: Mat, b: Mat) -> bool:
    if a.nrows != b.nrows or a.ncols != b.ncols:
        return False
    return all(fr.eq_aligned(x, y) for ra, rb in zip(a.rows, b.rows)
               for x, y in zip(ra, rb))


def _length_floor(m: Mat):
    lens = [e.length for row in m.rows for e in row
            if isinstance(e, WittVector)]
    return min(lens) if lens else None


def _solve_transport(problem: LiftProblem, w1: Window, w2: Window,
                     h0: Mat) -> tuple[Mat, SolverState]:
    """Correct h0 by a kernel-valued matrix so it intertwines both
    operators.  h0 must already satisfy the equations modulo the kernel
    and must map the L-part into the T-part only through ideal entries.
    """
    fr = w1.frame
    ring = fr.ring
    k, d1, d2 = w1.rkL, w1.dim, w2.dim
    psi1 = w1.psi
    f2 = w2.f_matrix()

    if w1.rkL == w2.rkL and _is_identity(ring, h0):
        # on basis coordinates the operator values are the stored
        # columns themselves, so the discrepancies are the plain matrix
        # difference, at full working length
        diff = w2.psi - psi1
        eta_cols = [diff.col(j) for j in range(k)]
        eps_cols = [diff.col(j) for j in range(k, d1)]
    else:
        eta_cols = []
        for j in range(k):
            col = h0.col(j)
            lp = col[:w2.rkL]
            tp = [fr.ideal_decompose(c) for c in col[w2.rkL:]]
            lhs = eval_F1(w2, lp, tp)
            rhs = h0.apply(psi1.col(j))
            eta_cols.append([ring.sub(a, b) for a, b in zip(lhs, rhs)])
        eps_cols = []
        for j in range(k, d1):
            col = h0.col(j)
            lhs = f2.apply([fr.sigma(c) for c in col])
            rhs = h0.apply(psi1.col(j))
            eps_cols.append([ring.sub(a, b) for a, b in zip(lhs, rhs)])

    for cols, side in ((eta_cols, "divided-Frobenius"), (eps_cols, "Frobenius")):
        for c in cols:
            for x in c:
                if not problem.contains(x):
                    raise LiftError(
                        f"{side} discrepancy leaves the kernel; the inputs "
                        "do not agree modulo the kernel")

    eta = _mat_from_cols(ring, eta_cols, d2)
    eps = _mat_from_cols(ring, eps_cols, d2)
    inv1 = w1.psi_inverse()
    lam = inv1.submatrix(0, k, 0, k)
    tau = inv1.submatrix(k, d1, 0, k)

    cap = problem.iteration_cap(d2, k)
    iterations = 0
    if k:
        rhs = eta
        if d1 > k:
            rhs = eta + _apply_f1_kernel(w2, eps * tau)
        x = rhs
        while True:
            iterations += 1
            if iterations > cap:
                raise LiftError(
                    f"no fixed point within {cap} iterations; the "
                    "nilpotence hypothesis looks violated")
            corr = _apply_f1_kernel(w2, x * lam)
            nxt = rhs + corr
            done = _mat_aligned_eq(fr, nxt, x)
            if done and _length_floor(corr) == 0:
                # the correction ran out of Witt slots entirely; nothing
                # further is certifiable, so the previous iterate is as
                # certified as any later one and strictly longer
                break
            # keep the newer iterate: its length is what the fixed point
            # is actually certified to
            x = nxt
            if done:
                break
    else:
        x = _mat_from_cols(ring, [], d2)

    omega = x.hstack(eps) * inv1
    if _length_floor(omega) == 0:
        raise LiftError("Witt working length exhausted during the solve; "
                        "rebuild the frames with longer vectors")
    for i, row in enumerate(omega.rows):
        for j, e in enumerate(row):
            if not problem.contains(e):
                raise LiftError(
                    f"solution entry ({i},{j}) left the kernel")
    h = h0 + omega
    state = SolverState(eta, eps, lam, tau, x, omega, iterations, cap,
                        _length_floor(h))
    return h, state


def unique_iso(problem: LiftProblem, w1: Window,
               w2: Window) -> tuple[WindowHom, SolverState]:
    """The unique isomorphism w1 -> w2 congruent to the identity modulo
    the kernel.  Both windows live over the source frame and must have
    matrices agreeing modulo the kernel (checked through the solver's
    discrepancy test).
    """
    if problem.filtration:
        raise LiftError("layered problem: solve rung by rung")
    fr = problem.alpha.source
    if not (_same_frame(w1.frame, fr) and _same_frame(w2.frame, fr)):
        raise WindowError("windows do not live over the source frame")
    if (w1.rkL, w1.rkT) != (w2.rkL, w2.rkT):
        raise LiftError("congruent windows must share ranks")
    h0 = Mat.identity(fr.ring, w1.dim)
    h, state = _solve_transport(problem, w1, w2, h0)
    ok, rows = is_window_iso(w1, w2, h)
    state.checks = rows
    if not ok:
        bad = [r["axiom"] for r in rows if not r["pass"]]
        raise LiftError(f"solver output failed re-verification: {bad}")
    return WindowHom(w1, w2, h), state


def transport_hom(problem: LiftProblem, w1: Window, w2: Window,
                  hmat: Mat) -> tuple[WindowHom, SolverState]:
    """Lift a homomorphism between the pushed-down windows to one
    between the windows themselves, uniquely modulo nothing: the lift
    reducing back to the input is unique and is returned.
    """
    if problem.filtration:
        raise LiftError("layered problem: transport rung by rung")
    alpha = problem.alpha
    push1 = base_change(alpha, w1)
    push2 = base_change(alpha, w2)
    ok, rows = check_window_hom(push1, push2, hmat)
    if not ok:
        bad = [r["axiom"] for r in rows if not r["pass"]]
        raise LiftError(f"input is not a homomorphism downstairs: {bad}")

    tgt = alpha.target
    h0_rows = []
    for i in range(w2.dim):
        row = []
        for j in range(w1.dim):
            e = hmat.rows[i][j]
            if i >= w2.rkL and j < w1.rkL:
                # this block must land in the source ideal, so lift the
                # decomposition rather than the bare value
                row.append(alpha.section_ideal(tgt.ideal_decompose(e)).value())
            else:
                row.append(alpha.section(e))
        h0_rows.append(row)
    h0 = Mat(alpha.source.ring, h0_rows)

    h, state = _solve_transport(problem, w1, w2, h0)
    ok, rows = check_window_hom(w1, w2, h)
    state.checks = rows
    if not ok:
        bad = [r["axiom"] for r in rows if not r["pass"]]
        raise LiftError(f"transported matrix failed re-verification: {bad}")
    if not _mat_aligned_eq(tgt, alpha.map_mat(h), hmat):
        raise LiftError("transported matrix does not reduce to the input")
    return WindowHom(w1, w2, h), state


# ---------------------------------------------------------------------------
# lifting objects

def lift_window(problem: LiftProblem, wp: Window) -> Window:
    """Entrywise section lift of a window across one surjection.

    The lift is a valid window (the kernel sits inside the radical, so
    invertibility survives) and reduces back to the input exactly.
    """
    alpha = problem.alpha
    if not _same_frame(wp.frame, alpha.target):
        raise WindowError("window does not live over the target frame")
    psi0 = alpha.section_mat(wp.psi)
    w = Window(alpha.source, wp.rkL, wp.rkT, psi0)
    back = base_change(alpha, w)
    if not _mat_aligned_eq(alpha.target, back.psi, wp.psi):
        raise LiftError("section lift does not reduce back to the input")
    return w


def crystalline_transport(problem: LiftProblem, wp: Window,
                          transcript: list | None = None) -> Window:
    """Lift a window through the whole filtration, rung by rung."""
    rungs = problem.filtration or [problem]
    if not _same_frame(wp.frame, rungs[0].alpha.target):
        raise WindowError("window does not live over the bottom frame")
    w = wp
    for i, rung in enumerate(rungs):
        if not _same_frame(w.frame, rung.alpha.target):
            raise LiftError(f"rung {i} does not continue the tower")
        w = lift_window(rung, w)
        if transcript is not None:
            transcript.append({"layer": i, "frame": repr(w.frame),
                               "kernel_dim": rung.fp_dim})
    if problem.filtration:
        back = base_change(problem.alpha, w)
        if not _mat_aligned_eq(problem.alpha.target, back.psi, wp.psi):
            raise LiftError("tower transport does not reduce back exactly")
    return w


def tower_transport(problems, wp: Window,
                    transcript: list | None = None) -> Window:
    """Chain transports along several surjections (bottom one first)."""
    w = wp
    for i, problem in enumerate(problems):
        if not _same_frame(w.frame, problem.alpha.target):
            raise LiftError(f"tower stage {i} does not continue")
        w = crystalline_transport(problem, w, transcript)
    return w


# ---------------------------------------------------------------------------
# Hodge-filtration deformation

class HodgeLift:
    """A lift of the Hodge filtration through an ideal widening.

    widen is a strict homomorphism with the same underlying ring whose
    target carries the larger ideal; umod is the T-by-L modification
    matrix with entries in the target ideal, parametrising the chosen
    complement.  Entries outside the ideal are rejected by position.
    """

    def __init__(self, widen: FrameHom, umod: Mat):
        if widen.source.ring != widen.target.ring:
            raise LiftError("widening must keep the underlying ring")
        for i, row in enumerate(umod.rows):
            for j, e in enumerate(row):
                if not widen.target.in_ideal(e):
                    raise LiftError(
                        f"modification entry ({i},{j}) is outside the "
                        "enlarged ideal; the filtration does not lift")
        self.widen = widen
        self.umod = umod

    def dressing(self) -> Mat:
        """Basis change from the modified decomposition to the old one."""
        ring = self.umod.ring
        k, t = self.umod.ncols, self.umod.nrows
        return Mat.block2(Mat.identity(ring, k), Mat.zeros(ring, k, t),
                          self.umod, Mat.identity(ring, t))

    def dressing_inverse(self) -> Mat:
        ring = self.umod.ring
        k, t = self.umod.ncols, self.umod.nrows
        return Mat.block2(Mat.identity(ring, k), Mat.zeros(ring, k, t),
                          -self.umod, Mat.identity(ring, t))


def deform(wp: Window, h: HodgeLift) -> Window:
    """Window over the small-ideal frame cut out by a filtration lift.

    The new window shares the module; its decomposition tilts the
    L-part by the modification.  In the stored basis that reads
    D^(-1) * Psi * (1 + lower-left sigma1(umod)) with D the dressing.
    The result pushed back to the large-ideal frame is isomorphic to
    the input through the dressing, which is verified before returning.
    """
    rel = h.widen.target
    if not _same_frame(wp.frame, rel):
        raise WindowError("window does not live over the widened frame")
    if h.umod.nrows != wp.rkT or h.umod.ncols != wp.rkL:
        raise WindowError("modification has the wrong shape")
    ring = wp.ring
    k, t = wp.rkL, wp.rkT
    s1u = _sigma1_entries(rel, h.umod)
    mod = Mat.block2(Mat.identity(ring, k), Mat.zeros(ring, k, t),
                     s1u, Mat.identity(ring, t))
    psi_new = h.dressing_inverse() * (wp.psi * mod)
    w = Window(h.widen.source, k, t, psi_new)
    pushed = base_change(h.widen, w)
    ok, rows = check_window_hom(pushed, wp, h.dressing())
    if not ok:
        bad = [r["axiom"] for r in rows if not r["pass"]]
        raise LiftError(f"deformed window does not match the input: {bad}")
    return w


# ---------------------------------------------------------------------------
# tower rung builders

def cap_tower_problem(upper, lower) -> LiftProblem:
    """Rung of the boundary-coefficient tower on the series side.

    Both frames carry the enlarged ideal at the same boundary degree;
    the lower ring keeps fewer p-digits on the boundary monomials.  The
    kernel is spanned by the dropped digit layers.  sigma kills it and
    the divided Frobenius vanishes on it, so transport is one-shot.
    """
    su, sl = upper.ring, lower.ring
    if upper.jdeg != lower.jdeg:
        raise LiftError("rungs must share the boundary degree")
    ce_up = min(su.cap[1], su.N) if su.cap else su.N
    ce_lo = min(sl.cap[1], sl.N) if sl.cap else sl.N
    if not 0 <= ce_lo < ce_up:
        raise LiftError("upper ring must keep more boundary precision")
    p = su.p

    ring_map = lambda x: sl.from_coeffs(x.c)
    section = lambda x: su.from_coeffs(x.c)
    imap = lambda el: RelSeriesIdeal(lower, ring_map(el.y), ring_map(el.j))
    isec = lambda el: RelSeriesIdeal(upper, section(el.y), section(el.j))
    alpha = FrameHom(upper, lower, ring_map, section=section, ideal_map=imap,
                     ideal_section=isec, name=f"cap{ce_up}to{ce_lo}")

    top = [e for e in su.exps if sum(e) >= upper.jdeg]
    basis = [su.monomial(e, p ** (ce_lo + j))
             for e in top for j in range(ce_up - ce_lo)]
    pc = p ** ce_lo
    jdeg = upper.jdeg

    def contains(x):
        return all(sum(e) >= jdeg and v % pc == 0 for e, v in x.c.items())

    return LiftProblem(alpha, basis, contains, name=alpha.name)


def witt_boundary_problem(upper, lower) -> LiftProblem:
    """The boundary rung on the Witt-vector side: W_n(R) -> W_n(R/b)
    where b is the square-zero boundary layer.

    The kernel consists of vectors whose entries are boundary classes
    dying in the lower coefficient ring.  sigma multiplies those
    entries by p, which kills them; the divided Frobenius is the
    coordinate shift, nilpotent within the Witt length.  This is the
    rung where the iteration does real work.
    """
    Wu, Wl = upper.ring, lower.ring
    if Wu.n != Wl.n:
        raise LiftError("rungs must keep the Witt length")
    if upper.bdeg != lower.bdeg:
        raise LiftError("rungs must share the boundary degree")
    qu, ql = upper.qring, lower.qring

    def qmap(t):
        return ql.reduce(ql.desc.ring.from_coeffs(t.c))

    def qsec(t):
        return qu.reduce(qu.desc.ring.from_coeffs(t.c))

    def ring_map(w):
        return Wl.truncated(w.length).from_entries([qmap(t) for t in w.entries])

    def section(w):
        return Wu.truncated(w.length).from_entries([qsec(t) for t in w.entries])

    def imap(el):
        vp = el.vpart
        vv = Wl.truncated(vp.length).from_entries([qmap(t) for t in vp.entries])
        lv = LogVector(Wl.truncated(len(el.logpart.entries)),
                       tuple(qmap(t) for t in el.logpart.entries))
        return RelWittIdeal(lower, vv, lv)

    def isec(el):
        vp = el.vpart
        vv = Wu.truncated(vp.length).from_entries([qsec(t) for t in vp.entries])
        lv = LogVector(Wu.truncated(len(el.logpart.entries)),
                       tuple(qsec(t) for t in el.logpart.entries))
        return RelWittIdeal(upper, vv, lv)

    alpha = FrameHom(upper, lower, ring_map, section=section, ideal_map=imap,
                     ideal_section=isec, name="witt-boundary")

    dead = []
    for e in qu.desc.ring.exps:
        if sum(e) < upper.bdeg:
            continue
        m = qu.reduce(qu.desc.ring.monomial(e))
        if not qu.is_zero(m) and ql.is_zero(qmap(m)):
            dead.append(m)
    basis = []
    for m in dead:
        for slot in range(Wu.n):
            entries = [qu.zero()] * Wu.n
            entries[slot] = m
            basis.append(LogVector(Wu, tuple(entries)).exp())
    bdeg = upper.bdeg

    def contains(w):
        if not w.entries:
            # zero remaining length certifies nothing
            return False
        for t in w.entries:
            if not qu.is_zero(t) and t.min_total_degree() < bdeg:
                return False
            if not ql.is_zero(qmap(t)):
                return False
        return True

    return LiftProblem(alpha, basis, contains, nil_bound=Wu.n + 1,
                       name="witt-boundary")
