"""Exact integer and rational linear algebra.

Everything in this module is exact: integer matrices use Python's
arbitrary-precision ints, rational data uses ``fractions.Fraction``.
Floating point is deliberately absent; normal-form intermediates blow up
well past 64 bits even on small inputs.

Provides Hermite and Smith normal forms with transformation matrices,
integer linear-system solving (particular solution + kernel basis), and a
deterministic exact-rational nonnegative feasibility solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

Vector = tuple[int, ...]
RationalVector = tuple[Fraction, ...]


class LinAlgError(ValueError):
    """Raised on malformed input (dimension mismatch, empty matrix, ...)."""


def _exgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g.

    Deterministic: the iterative Euclid recursion fixes x and y.
    """
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def vec_gcd(v: tuple[int, ...]) -> int:
    g = 0
    for a in v:
        g = gcd(g, a)
    return g


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(k: int, v: Vector) -> Vector:
    return tuple(k * a for a in v)


def vec_dot(u, v):
    if len(u) != len(v):
        raise LinAlgError(f"dot: length mismatch {len(u)} vs {len(v)}")
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major tuple of tuples."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        widths = {len(r) for r in self.entries}
        if len(widths) > 1:
            raise LinAlgError("ragged rows")
        for row in self.entries:
            for a in row:
                if not isinstance(a, int):
                    raise LinAlgError(f"non-integer entry {a!r}")

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        return cls(tuple(tuple(int(a) for a in r) for r in rows))

    @classmethod
    def from_columns(cls, cols) -> "IntMatrix":
        cols = [tuple(c) for c in cols]
        if not cols:
            return cls(())
        return cls.from_rows(zip(*cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(tuple((0,) * n for _ in range(m)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries))) if self.entries else IntMatrix(())

    def apply(self, v: Vector) -> Vector:
        """Matrix-vector product A @ v."""
        if len(v) != self.cols:
            raise LinAlgError(f"apply: {self.rows}x{self.cols} to length {len(v)}")
        return tuple(vec_dot(r, v) for r in self.entries)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise LinAlgError(f"matmul: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        bt = other.transpose().entries
        return IntMatrix(tuple(tuple(vec_dot(r, c) for c in bt) for r in self.entries))

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise LinAlgError("det of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and self.det() in (1, -1)

    def rank(self) -> int:
        """Rank over the rationals (equivalently over Z)."""
        return sum(1 for d in smith_normal_form(self).invariant_factors if d != 0) \
            if self.entries and self.cols else 0

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def _swap_cols(m: list[list[int]], i: int, j: int) -> None:
    for row in m:
        row[i], row[j] = row[j], row[i]


def _addmul_col(m: list[list[int]], dst: int, src: int, k: int) -> None:
    for row in m:
        row[dst] += k * row[src]


def _combine_cols(m: list[list[int]], i: int, j: int, a: int, b: int, c: int, d: int) -> None:
    """Columns (i, j) <- (a*col_i + c*col_j, b*col_i + d*col_j)."""
    for row in m:
        x, y = row[i], row[j]
        row[i] = a * x + c * y
        row[j] = b * x + d * y


def hermite_normal_form(a: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Column-style Hermite normal form.

    Returns (H, U) with U unimodular and A @ U = H, where H is in
    lower-triangular column echelon form: pivots (topmost nonzero entries
    of the nonzero columns) sit in strictly increasing rows, are positive,
    and the entries to the left of each pivot in its row are reduced to
    [0, pivot). Zero columns are pushed to the right.
    """
    if a.rows == 0 or a.cols == 0:
        raise LinAlgError("hermite_normal_form: empty matrix")
    h = a.to_lists()
    u = IntMatrix.identity(a.cols).to_lists()
    col = 0
    for row in range(a.rows):
        if col >= a.cols:
            break
        # gcd-fold all columns >= col into column col at this row
        pivot_here = False
        for j in range(col, a.cols):
            if h[row][j] != 0:
                pivot_here = True
                break
        if not pivot_here:
            continue
        for j in range(col + 1, a.cols):
            if h[row][j] == 0:
                continue
            p, q = h[row][col], h[row][j]
            g, x, y = _exgcd(p, q)
            # det of [[x, -q//g], [y, p//g]] is (xp + yq)/g = 1
            _combine_cols(h, col, j, x, -(q // g), y, p // g)
            _combine_cols(u, col, j, x, -(q // g), y, p // g)
        if h[row][col] < 0:
            _addmul_col(h, col, col, -2)
            _addmul_col(u, col, col, -2)
        piv = h[row][col]
        for j in range(col):
            q = h[row][j] // piv  # floor division keeps residue in [0, piv)
            if q != 0:
                _addmul_col(h, j, col, -q)
                _addmul_col(u, j, col, -q)
        col += 1
    return IntMatrix.from_rows(h), IntMatrix.from_rows(u)


def inverse_unimodular(u: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix (column HNF of U is I)."""
    h, w = hermite_normal_form(u)
    if h != IntMatrix.identity(u.rows):
        raise LinAlgError("matrix is not unimodular")
    return w


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V = S with S diagonal, factors d1 | d2 | ... | dk >= 0."""

    s: IntMatrix
    u: IntMatrix
    v: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        k = min(self.s.rows, self.s.cols)
        return tuple(self.s.entries[i][i] for i in range(k))

    def verify(self, a: IntMatrix) -> bool:
        """Entry-exact check of every decomposition invariant."""
        if (self.u @ a) @ self.v != self.s:
            return False
        if not (self.u.is_unimodular() and self.v.is_unimodular()):
            return False
        facs = self.invariant_factors
        for i in range(self.s.rows):
            for j in range(self.s.cols):
                if i != j and self.s.entries[i][j] != 0:
                    return False
        for d, e in zip(facs, facs[1:]):
            if d < 0 or e < 0:
                return False
            if d == 0 and e != 0:
                return False
            if d != 0 and e % d != 0:
                return False
        return True


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form with both transforms.

    Pivot strategy: smallest nonzero absolute value in the active
    submatrix, ties broken by (row, column) index. Keeps entry growth
    tame at the scales this package works at.
    """
    if a.rows == 0 or a.cols == 0:
        raise LinAlgError("smith_normal_form: empty matrix")
    m, n = a.rows, a.cols
    s = a.to_lists()
    u = IntMatrix.identity(m).to_lists()
    v = IntMatrix.identity(n).to_lists()

    def swap_rows(mat, i, j):
        mat[i], mat[j] = mat[j], mat[i]

    def addmul_row(mat, dst, src, k):
        mat[dst] = [x + k * y for x, y in zip(mat[dst], mat[src])]

    def find_pivot(t: int):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                val = abs(s[i][j])
                if val and (best is None or val < best[0]):
                    best = (val, i, j)
        return best

    for t in range(min(m, n)):
        while True:
            best = find_pivot(t)
            if best is None:
                break
            _, bi, bj = best
            if bi != t:
                swap_rows(s, t, bi)
                swap_rows(u, t, bi)
            if bj != t:
                _swap_cols(s, t, bj)
                _swap_cols(v, t, bj)
            piv = s[t][t]
            dirty = False
            for i in range(t + 1, m):
                if s[i][t] != 0:
                    q = s[i][t] // piv
                    addmul_row(s, i, t, -q)
                    addmul_row(u, i, t, -q)
                    if s[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if s[t][j] != 0:
                    q = s[t][j] // piv
                    _addmul_col(s, j, t, -q)
                    _addmul_col(v, j, t, -q)
                    if s[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            # row and column are clear; enforce divisibility of the rest
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if s[i][j] % piv != 0:
                        offender = j
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            _addmul_col(s, t, offender, 1)
            _addmul_col(v, t, offender, 1)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
    return SmithDecomposition(IntMatrix.from_rows(s), IntMatrix.from_rows(u),
                              IntMatrix.from_rows(v))


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel {x : A @ x = 0}.

    The lattice is saturated: any integer kernel vector is an integer
    combination of the columns. Returns a matrix with zero columns count
    when the kernel is trivial (shape cols x 0).
    """
    dec = smith_normal_form(a)
    free = [j for j in range(a.cols)
            if j >= min(a.rows, a.cols) or dec.s.entries[j][j] == 0]
    cols = [dec.v.column(j) for j in free]
    if not cols:
        return IntMatrix(tuple(() for _ in range(a.cols)))
    return IntMatrix.from_columns(cols)


def solve_diophantine(a: IntMatrix, b: Vector) -> tuple[Vector, IntMatrix] | None:
    """Solve A @ x = b over the integers.

    Returns (x0, K) with A @ x0 = b and the columns of K spanning the
    integer kernel of A, or None when no integer solution exists.
    """
    if len(b) != a.rows:
        raise LinAlgError(f"solve_diophantine: rhs length {len(b)} != {a.rows} rows")
    dec = smith_normal_form(a)
    beta = dec.u.apply(tuple(b))
    y = [0] * a.cols
    k = min(a.rows, a.cols)
    for i in range(a.rows):
        d = dec.s.entries[i][i] if i < k else 0
        if d == 0:
            if beta[i] != 0:
                return None
        else:
            if beta[i] % d != 0:
                return None
            y[i] = beta[i] // d
    x0 = dec.v.apply(tuple(y))
    return x0, kernel_basis(a)


def in_image(a: IntMatrix, b: Vector) -> bool:
    """True iff b lies in the integer column span of A."""
    return solve_diophantine(a, b) is not None


# ---------------------------------------------------------------------------
# exact nonnegative feasibility (phase-1 simplex over Fraction)
# ---------------------------------------------------------------------------

def nonneg_rational_solve(a: IntMatrix, b: Vector) -> RationalVector | None:
    """Find rational c >= 0 with A @ c = b, exactly, or None if infeasible.

    Phase-1 simplex over Fraction with Bland's smallest-index entering
    rule and smallest-basic-index leaving tie-break, which makes the
    output a deterministic function of the input and rules out cycling.
    """
    if len(b) != a.rows:
        raise LinAlgError(f"nonneg_rational_solve: rhs length {len(b)} != {a.rows} rows")
    m, n = a.rows, a.cols
    if m == 0:
        return (Fraction(0),) * n
    # tableau rows: [x_0 .. x_{n-1} | art_0 .. art_{m-1} | rhs], rhs >= 0
    tab: list[list[Fraction]] = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign * x) for x in a.entries[i]] if n else []
        art = [Fraction(1) if j == i else Fraction(0) for j in range(m)]
        tab.append(row + art + [Fraction(sign * b[i])])
    basis = [n + i for i in range(m)]
    ncols = n + m
    # reduced cost of minimizing the artificial sum: z_j = -sum of rows
    cost = [-sum(tab[i][j] for i in range(m)) for j in range(ncols + 1)]
    for j in range(n, ncols):
        cost[j] = Fraction(0)

    def pivot(row: int, col: int) -> None:
        piv = tab[row][col]
        tab[row] = [x / piv for x in tab[row]]
        for i in range(m):
            if i != row and tab[i][col] != 0:
                f = tab[i][col]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[row])]
        if cost[col] != 0:
            f = cost[col]
            for j in range(ncols + 1):
                cost[j] -= f * tab[row][j]
        basis[row] = col

    while True:
        enter = next((j for j in range(ncols) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise LinAlgError("phase-1 objective unbounded; inconsistent tableau")
        pivot(leave, enter)

    if -cost[-1] != 0:
        return None
    # drive leftover (necessarily zero-valued) artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is not None:
                pivot(i, col)
    c = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            c[basis[i]] = tab[i][-1]
    return tuple(c)


def solve_rational(a: IntMatrix, b: RationalVector) -> RationalVector | None:
    """Any exact rational solution of A @ x = b (unrestricted sign), or None."""
    m, n = a.rows, a.cols
    aug = [[Fraction(x) for x in a.entries[i]] + [Fraction(b[i])] for i in range(m)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        aug[r] = [x / aug[r][c] for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in pivots:
        x[c] = aug[i][n]
    return tuple(x)
