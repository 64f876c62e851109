"""Matrices over the package's rings.

Rings are duck-typed contexts exposing zero/one/add/mul/neg/is_unit/
invert/eq (SeriesRing, QuotientRing, WittRing all qualify).  Local-ring
inversion is unit-pivot Gauss-Jordan: a matrix over a local ring is
invertible exactly when elimination finds a unit pivot in every column.

Also hosts an exact linear solver over Z/p^N (diagonalization by row
and column operations with p-power pivots) used wherever an equation
has to be solved coefficientwise rather than by elimination with unit
pivots.
"""

from __future__ import annotations


class NotInvertibleError(ArithmeticError):
    pass


class Mat:
    __slots__ = ("ring", "rows")

    def __init__(self, ring, rows):
        self.ring = ring
        self.rows = [list(r) for r in rows]

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def identity(cls, ring, n):
        one, zero = ring.one(), ring.zero()
        return cls(ring, [[one if i == j else zero for j in range(n)]
                          for i in range(n)])

    @classmethod
    def zeros(cls, ring, m, n):
        zero = ring.zero()
        return cls(ring, [[zero] * n for _ in range(m)])

    @classmethod
    def diag(cls, ring, entries):
        zero = ring.zero()
        n = len(entries)
        return cls(ring, [[entries[i] if i == j else zero for j in range(n)]
                          for i in range(n)])

    def copy(self):
        return Mat(self.ring, self.rows)

    def __eq__(self, other):
        if not isinstance(other, Mat) or self.nrows != other.nrows \
                or self.ncols != other.ncols:
            return False
        eq = self.ring.eq
        return all(eq(a, b) for ra, rb in zip(self.rows, other.rows)
                   for a, b in zip(ra, rb))

    def __repr__(self):
        return "Mat[" + "; ".join(", ".join(repr(e) for e in r)
                                  for r in self.rows) + "]"

    def __add__(self, other):
        add = self.ring.add
        return Mat(self.ring, [[add(a, b) for a, b in zip(ra, rb)]
                               for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        sub = self.ring.sub
        return Mat(self.ring, [[sub(a, b) for a, b in zip(ra, rb)]
                               for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        neg = self.ring.neg
        return Mat(self.ring, [[neg(a) for a in r] for r in self.rows])

    def __mul__(self, other):
        if not isinstance(other, Mat):
            raise TypeError("use scale() for ring-element scaling")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} * "
                             f"{other.nrows}x{other.ncols}")
        ring = self.ring
        add, mul, zero = ring.add, ring.mul, ring.zero()
        cols = list(zip(*other.rows))
        out = []
        for row in self.rows:
            orow = []
            for col in cols:
                acc = zero
                for a, b in zip(row, col):
                    acc = add(acc, mul(a, b))
                orow.append(acc)
            out.append(orow)
        return Mat(ring, out)

    def scale(self, s):
        mul = self.ring.mul
        return Mat(self.ring, [[mul(s, a) for a in r] for r in self.rows])

    def map(self, f):
        return Mat(self.ring, [[f(a) for a in r] for r in self.rows])

    def map_to(self, ring2, f):
        return Mat(ring2, [[f(a) for a in r] for r in self.rows])

    def transpose(self):
        return Mat(self.ring, [list(c) for c in zip(*self.rows)])

    def is_zero(self):
        z = self.ring.is_zero
        return all(z(a) for r in self.rows for a in r)

    def submatrix(self, r0, r1, c0, c1):
        return Mat(self.ring, [row[c0:c1] for row in self.rows[r0:r1]])

    def hstack(self, other):
        return Mat(self.ring, [ra + rb for ra, rb in zip(self.rows, other.rows)])

    def vstack(self, other):
        return Mat(self.ring, self.rows + other.rows)

    @classmethod
    def block2(cls, tl, tr, bl, br):
        return tl.hstack(tr).vstack(bl.hstack(br))

    def col(self, j):
        return [r[j] for r in self.rows]

    def with_col(self, j, entries):
        rows = [list(r) for r in self.rows]
        for i, v in enumerate(entries):
            rows[i][j] = v
        return Mat(self.ring, rows)

    def apply(self, vec):
        """Matrix times column vector (list of ring elements)."""
        ring = self.ring
        out = []
        for row in self.rows:
            acc = ring.zero()
            for a, b in zip(row, vec):
                acc = ring.add(acc, ring.mul(a, b))
            out.append(acc)
        return out

    def invert(self):
        """Gauss-Jordan with unit pivots; raises if no unit pivot exists
        in some column, which over a local ring means non-invertible."""
        ring = self.ring
        n = self.nrows
        if n != self.ncols:
            raise NotInvertibleError("not square")
        a = [list(r) for r in self.rows]
        inv = [list(r) for r in Mat.identity(ring, n).rows]
        sub, mul = ring.sub, ring.mul
        for col in range(n):
            piv = next((i for i in range(col, n) if ring.is_unit(a[i][col])), None)
            if piv is None:
                raise NotInvertibleError(f"no unit pivot in column {col}")
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            u = ring.invert(a[col][col])
            a[col] = [mul(u, v) for v in a[col]]
            inv[col] = [mul(u, v) for v in inv[col]]
            for i in range(n):
                if i == col:
                    continue
                f = a[i][col]
                if ring.is_zero(f):
                    continue
                a[i] = [sub(x, mul(f, y)) for x, y in zip(a[i], a[col])]
                inv[i] = [sub(x, mul(f, y)) for x, y in zip(inv[i], inv[col])]
        return Mat(ring, inv)

    def is_invertible(self):
        try:
            self.invert()
            return True
        except NotInvertibleError:
            return False


def solve_prime_power(A, b, p, N):
    """One solution x of A x = b over Z/p^N, or None.

    A: list of rows of ints, b: list of ints.  Diagonalizes by integer
    row/column operations with minimal-valuation pivots (a light Smith
    form; enough because Z/p^N is a chain ring).
    """
    pN = p ** N
    m = len(A)
    n = len(A[0]) if m else 0
    a = [[v % pN for v in row] for row in A]
    rhs = [v % pN for v in b]
    colops = []          # (kind, data) replayed backwards on z
    # V tracked implicitly: record column swaps and col-addition ops
    pivots = []

    def val(v):
        if v == 0:
            return N
        k = 0
        while v % p == 0:
            v //= p
            k += 1
        return k

    row = 0
    for _ in range(min(m, n)):
        # best pivot = minimal valuation in the remaining block
        best = None
        for i in range(row, m):
            for j in range(len(pivots), n):
                k = val(a[i][j])
                if best is None or k < best[0]:
                    best = (k, i, j)
                    if k == 0:
                        break
            if best and best[0] == 0:
                break
        if best is None or best[0] >= N:
            break
        k, bi, bj = best
        a[row], a[bi] = a[bi], a[row]
        rhs[row], rhs[bi] = rhs[bi], rhs[row]
        jcur = len(pivots)
        if bj != jcur:
            for r in a:
                r[jcur], r[bj] = r[bj], r[jcur]
            colops.append(("swap", jcur, bj))
        piv = a[row][jcur]
        u = pow(piv // p ** k, -1, pN)      # unit part inverse
        a[row] = [(u * v) % pN for v in a[row]]
        rhs[row] = (u * rhs[row]) % pN      # pivot now p^k
        for i in range(m):
            if i == row:
                continue
            # minimal-valuation pivot: every entry here is divisible by p^k
            q = a[i][jcur] // p ** k
            if q:
                a[i] = [(x - q * y) % pN for x, y in zip(a[i], a[row])]
                rhs[i] = (rhs[i] - q * rhs[row]) % pN
        # clear the pivot row to the right (column ops)
        for j in range(jcur + 1, n):
            q = a[row][j] // p ** k
            if q:
                for r in a:
                    r[j] = (r[j] - q * r[jcur]) % pN
                colops.append(("add", jcur, j, q))
        pivots.append((row, jcur, k))
        row += 1

    # remaining rows must have zero rhs
    for i in range(row, m):
        if rhs[i] % pN:
            return None
    # any leftover nonzero entries mean the light form failed (should not
    # happen for chain rings, but guard anyway)
    for i in range(row, m):
        if any(v % pN for v in a[i]):
            return None
    z = [0] * n
    for (ri, ci, k) in pivots:
        pk = p ** k
        if rhs[ri] % pk:
            return None
        z[ci] = (rhs[ri] // pk) % (pN // pk)
    # replay column operations backwards: x = V z
    for op in reversed(colops):
        if op[0] == "swap":
            _, i, j = op
            z[i], z[j] = z[j], z[i]
        else:
            _, i, j, q = op
            z[i] = (z[i] - q * z[j]) % pN
    return [v % pN for v in z]
