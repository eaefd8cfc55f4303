"""Exact linear algebra over Q, plus normal forms over the localization Z_(p).

Matrices are tuples of tuples of ``Fraction``.  Dimensions in this package
never exceed a dozen, so plain fraction Gaussian elimination is both exact
and fast; nothing here tries to be asymptotically clever.

The p-adic lattice machinery needs column Hermite and Smith normal forms
over Z_(p) = {a/b in Q : p does not divide b}, a discrete valuation ring in
which every rational prime other than p is a unit.  These differ from the
integer normal forms (extra units are available), so they are implemented
directly: pivots are chosen by minimal p-adic valuation and normalized to
pure powers of p.
"""

from __future__ import annotations

from fractions import Fraction

from .fields import padic_valuation


def mat(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def zeros(m: int, n: int):
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(m))


def shape(A):
    return len(A), len(A[0]) if A else 0


def transpose(A):
    return tuple(zip(*A))


def mat_add(A, B):
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B):
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c, A):
    c = Fraction(c)
    return tuple(tuple(c * a for a in row) for row in A)


def matmul(A, B):
    Bt = tuple(zip(*B))
    return tuple(
        tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A
    )


def matvec(A, v):
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def trace(A):
    return sum(A[i][i] for i in range(len(A)))


def det(A):
    """Determinant by fraction Gaussian elimination with partial pivoting."""
    n = len(A)
    if n == 1:
        return Fraction(A[0][0])
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    M = [list(row) for row in A]
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        inv = 1 / M[c][c]
        for r in range(c + 1, n):
            if M[r][c] == 0:
                continue
            f = M[r][c] * inv
            for k in range(c, n):
                M[r][k] -= f * M[c][k]
    return d


def solve(A, b):
    """Solve A x = b for square invertible A (b a vector)."""
    n = len(A)
    M = [list(row) + [Fraction(x)] for row, x in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(M[r][n] for r in range(n))


def inv(A):
    n = len(A)
    if n == 1:
        return ((1 / Fraction(A[0][0]),),)
    if n == 2:
        d = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        if d == 0:
            raise ZeroDivisionError("singular matrix")
        return (
            (A[1][1] / d, -A[0][1] / d),
            (-A[1][0] / d, A[0][0] / d),
        )
    M = [list(row) + list(erow) for row, erow in zip(A, identity(n))]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        s = 1 / M[c][c]
        M[c] = [x * s for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(tuple(M[r][n:]) for r in range(n))


def rank(A):
    if not A:
        return 0
    M = [list(row) for row in A]
    m, n = len(M), len(M[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv_ = 1 / M[r][c]
        for i in range(r + 1, m):
            if M[i][c] != 0:
                f = M[i][c] * inv_
                for k in range(c, n):
                    M[i][k] -= f * M[r][k]
        r += 1
        if r == m:
            break
    return r


# ---------------------------------------------------------------------
# Normal forms over the localization Z_(p)
# ---------------------------------------------------------------------


def _val(x: Fraction, p: int):
    return None if x == 0 else padic_valuation(x, p)


def canonical_residue(t: Fraction, p: int, m: int) -> Fraction:
    """Canonical representative of t modulo p^m * Z_(p).

    The orbit t + p^m Z_(p) contains exactly one truncated p-adic expansion
    sum_{i=v}^{m-1} c_i p^i; that rational (0 if v_p(t) >= m) is returned.
    """
    t = Fraction(t)
    if t == 0:
        return Fraction(0)
    v = padic_valuation(t, p)
    if v >= m:
        return Fraction(0)
    unit = t / Fraction(p) ** v  # p-unit rational a/b
    mod = p ** (m - v)
    r = (unit.numerator * pow(unit.denominator, -1, mod)) % mod
    return Fraction(r) * Fraction(p) ** v


def hnf_zp(B, p: int, transform: bool = False):
    """Column Hermite normal form of B over Z_(p).

    B is d x k with full row rank d (columns generate a full lattice).  The
    result H is d x d lower triangular with H[i][i] a power of p and the
    subdiagonal entry H[i][j] (i > j) the canonical residue mod H[i][i].
    Column operations are unimodular over Z_(p), so the columns of H generate
    the same Z_(p)-span (hence the same Z_p-lattice) as those of B.

    With ``transform=True`` also returns U (k x k, unimodular over Z_(p))
    with B @ U = [H | 0].
    """
    d, k = shape(B)
    cols = [list(col) for col in zip(*B)]
    U = [list(row) for row in identity(k)] if transform else None

    def colop_sub(j, i, f):
        # col_j -= f * col_i ; f must lie in Z_(p) to stay unimodular
        ci, cj = cols[i], cols[j]
        for r in range(d):
            cj[r] -= f * ci[r]
        if U is not None:
            for r in range(k):
                U[r][j] -= f * U[r][i]

    pivots = 0
    for row in range(d):
        best, bestv = None, None
        for j in range(pivots, k):
            v = _val(cols[j][row], p)
            if v is not None and (bestv is None or v < bestv):
                best, bestv = j, v
        if best is None:
            raise ValueError("matrix does not have full row rank over Z_(p)")
        if best != pivots:
            cols[pivots], cols[best] = cols[best], cols[pivots]
            if U is not None:
                for r in range(k):
                    U[r][pivots], U[r][best] = U[r][best], U[r][pivots]
        unit = cols[pivots][row] / Fraction(p) ** bestv
        s = 1 / unit
        for r in range(d):
            cols[pivots][r] *= s
        if U is not None:
            for r in range(k):
                U[r][pivots] *= s
        for j in range(pivots + 1, k):
            if cols[j][row] != 0:
                colop_sub(j, pivots, cols[j][row] / cols[pivots][row])
        pivots += 1
    if pivots < d:
        raise ValueError("matrix does not have full row rank over Z_(p)")
    # columns beyond the d pivots had every row eliminated, so they are zero

    # canonical reduction of subdiagonal entries; within a column, work the
    # pivot rows in ascending order so later subtractions (which only touch
    # rows >= their pivot) cannot disturb entries already reduced
    for j in range(d):
        for i in range(j + 1, d):
            piv = cols[i][i]
            m = padic_valuation(piv, p)
            t = cols[j][i]
            rho = canonical_residue(t, p, m)
            if t != rho:
                colop_sub(j, i, (t - rho) / piv)
    H = tuple(tuple(cols[j][r] for j in range(d)) for r in range(d))
    if transform:
        return H, tuple(tuple(row) for row in U)
    return H


def smith_zp(A, p: int):
    """Smith normal form over Z_(p): A = U @ S @ V.

    S is diagonal (same shape as A) with diagonal entries p**a_1, ..., p**a_r
    (valuations nondecreasing, so each divides the next) followed by zeros;
    U and V are square unimodular over Z_(p).  Returns (U, diag_exponents, V)
    where diag_exponents is the list of a_i (length r = rank).
    """
    m, n = shape(A)
    S = [list(row) for row in A]
    U = [list(row) for row in identity(m)]
    V = [list(row) for row in identity(n)]

    def row_sub(i, j, f):
        # row_i -= f * row_j ; compensate in U by col_j += f * col_i
        for k in range(n):
            S[i][k] -= f * S[j][k]
        for k in range(m):
            U[k][j] += f * U[k][i]

    def col_sub(i, j, f):
        # col_i -= f * col_j ; compensate in V by row_j += f * row_i
        for k in range(m):
            S[k][i] -= f * S[k][j]
        for k in range(n):
            V[j][k] += f * V[i][k]

    def row_swap(i, j):
        S[i], S[j] = S[j], S[i]
        for k in range(m):
            U[k][i], U[k][j] = U[k][j], U[k][i]

    def col_swap(i, j):
        for k in range(m):
            S[k][i], S[k][j] = S[k][j], S[k][i]
        V[i], V[j] = V[j], V[i]

    exps = []
    t = 0
    limit = min(m, n)
    while t < limit:
        best, bestv = None, None
        for i in range(t, m):
            for j in range(t, n):
                v = _val(S[i][j], p)
                if v is not None and (bestv is None or v < bestv):
                    best, bestv = (i, j), v
        if best is None:
            break
        i0, j0 = best
        row_swap(t, i0)
        col_swap(t, j0)
        # normalize pivot to p**bestv: scale row t by the inverse unit
        unit = S[t][t] / Fraction(p) ** bestv
        sinv = 1 / unit
        for k in range(n):
            S[t][k] *= sinv
        for k in range(m):
            U[k][t] *= unit
        piv = S[t][t]
        for i in range(t + 1, m):
            if S[i][t] != 0:
                row_sub(i, t, S[i][t] / piv)
        for j in range(t + 1, n):
            if S[t][j] != 0:
                col_sub(j, t, S[t][j] / piv)
        exps.append(bestv)
        t += 1
    return tuple(tuple(row) for row in U), exps, tuple(tuple(row) for row in V)


def val_min_entry(A, p: int):
    """Minimal p-adic valuation over the nonzero entries (None if A = 0)."""
    best = None
    for row in A:
        for x in row:
            if x != 0:
                v = padic_valuation(x, p)
                if best is None or v < best:
                    best = v
    return best
