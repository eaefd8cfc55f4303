"""Matrix spaces over a local field, group actions and decompositions.

The ambient objects are the special linear group G of size (n+1), its Levi
subgroup L = GL(n), the space X of (n+1) x n matrices carrying a left G- and
a right L-action, and the opposite space Xbar of n x (n+1) matrices.  A point
of X (resp. Xbar) is regular when it has full rank n; regular points are a
single G-orbit and the quotient maps are realized by block extraction.

Archimedean matrices are numpy arrays, p-adic matrices are nested tuples of
Fractions; the small dispatch helpers below keep the two representations
behind one interface.  Real coordinates of a matrix space flatten row-major,
with complex entries split into (re, im) pairs, so every linear action has a
concrete coordinate matrix obtained by pushing basis matrices through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlinalg as xl
from .fields import FieldDescriptor, abs_norm, padic_valuation


# ---------------------------------------------------------------------
# Matrix representation dispatch
# ---------------------------------------------------------------------


def as_matrix(m, fd: FieldDescriptor):
    """Normalize input to the field's matrix representation."""
    if fd.is_archimedean:
        dtype = complex if fd.kind == "complex" else float
        return np.asarray(m, dtype=dtype)
    return xl.mat(m)


def mmul(a, b, fd: FieldDescriptor):
    if fd.is_archimedean:
        return np.asarray(a) @ np.asarray(b)
    return xl.matmul(a, b)


def minv(a, fd: FieldDescriptor):
    if fd.is_archimedean:
        return np.linalg.inv(np.asarray(a))
    return xl.inv(a)


def mdet(a, fd: FieldDescriptor):
    if fd.is_archimedean:
        return np.linalg.det(np.asarray(a))
    return xl.det(a)


def mtrace(a, fd: FieldDescriptor):
    if fd.is_archimedean:
        return np.trace(np.asarray(a))
    return xl.trace(a)


def mtranspose(a, fd: FieldDescriptor):
    if fd.is_archimedean:
        return np.asarray(a).T
    return xl.transpose(a)


def meye(n: int, fd: FieldDescriptor):
    if fd.is_archimedean:
        dtype = complex if fd.kind == "complex" else float
        return np.eye(n, dtype=dtype)
    return xl.identity(n)


def mat_close(a, b, fd: FieldDescriptor, tol: float = 1e-10) -> bool:
    if fd.is_archimedean:
        return bool(np.allclose(np.asarray(a), np.asarray(b), atol=tol, rtol=tol))
    return xl.mat(a) == xl.mat(b)


def matrix_rank(x, fd: FieldDescriptor, tol: float = 1e-10) -> int:
    if fd.is_archimedean:
        s = np.linalg.svd(np.asarray(x), compute_uv=False)
        return int(np.sum(s > tol))
    return xl.rank(x)


def is_regular(x, fd: FieldDescriptor, tol: float = 1e-10) -> bool:
    """Full rank test: exact for p-adic, smallest singular value for R/C."""
    x_ = np.asarray(x) if fd.is_archimedean else xl.mat(x)
    r = min(len(x_), len(x_[0])) if not fd.is_archimedean else min(x_.shape)
    return matrix_rank(x_, fd, tol) == r


# ---------------------------------------------------------------------
# Coordinate flattening
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixSpace:
    """A space of rows x cols matrices over the field, with flat coordinates."""

    fd: FieldDescriptor
    rows: int
    cols: int

    @property
    def dim(self) -> int:
        """Real coordinate dimension (d_F per entry archimedean, 1 p-adic)."""
        per = self.fd.d_F if self.fd.is_archimedean else 1
        return self.rows * self.cols * per

    @property
    def shape(self):
        return (self.rows, self.cols)

    def transpose_space(self) -> "MatrixSpace":
        return MatrixSpace(self.fd, self.cols, self.rows)

    def coords(self, m):
        """Row-major flat coordinates; complex entries interleave (re, im)."""
        if self.fd.kind == "complex":
            flat = np.asarray(m, dtype=complex).reshape(-1)
            out = np.empty(2 * flat.size)
            out[0::2] = flat.real
            out[1::2] = flat.imag
            return out
        if self.fd.is_archimedean:
            return np.asarray(m, dtype=float).reshape(-1).copy()
        return tuple(Fraction(x) for row in xl.mat(m) for x in row)

    def from_coords(self, v):
        if self.fd.kind == "complex":
            v = np.asarray(v, dtype=float)
            flat = v[0::2] + 1j * v[1::2]
            return flat.reshape(self.rows, self.cols)
        if self.fd.is_archimedean:
            return np.asarray(v, dtype=float).reshape(self.rows, self.cols)
        it = iter(v)
        return tuple(
            tuple(Fraction(next(it)) for _ in range(self.cols)) for _ in range(self.rows)
        )

    def basis_matrices(self):
        """Matrices whose coordinates run through the standard basis."""
        d = self.dim
        out = []
        for k in range(d):
            e = [0.0] * d
            e[k] = 1
            out.append(self.from_coords(e))
        return out


def space_X(n: int, fd: FieldDescriptor) -> MatrixSpace:
    return MatrixSpace(fd, n + 1, n)


def space_Xbar(n: int, fd: FieldDescriptor) -> MatrixSpace:
    return MatrixSpace(fd, n, n + 1)


def space_L(n: int, fd: FieldDescriptor) -> MatrixSpace:
    return MatrixSpace(fd, n, n)


def space_fiber(n: int, fd: FieldDescriptor) -> MatrixSpace:
    """Row vectors z in F^n parametrizing intertwining fibers."""
    return MatrixSpace(fd, 1, n)


def flatten_linear(fn, domain: MatrixSpace, target: MatrixSpace):
    """Coordinate matrix of a linear map between matrix spaces.

    Built by pushing the basis matrices of the domain through ``fn``; exact
    (Fraction matrix) in the p-adic case, a float array otherwise.
    """
    cols = [target.coords(fn(b)) for b in domain.basis_matrices()]
    if domain.fd.is_archimedean:
        return np.column_stack(cols)
    return tuple(tuple(col[r] for col in cols) for r in range(target.dim))


# ---------------------------------------------------------------------
# Actions and quotient maps
# ---------------------------------------------------------------------


def act_g_x(g, x, fd: FieldDescriptor):
    """Left action g.x = g x on the space X."""
    return mmul(g, x, fd)


def act_x_a(x, a, fd: FieldDescriptor):
    """Right action x.a = x a on the space X."""
    return mmul(x, a, fd)


def act_g_y(g, y, fd: FieldDescriptor):
    """Left action g.y = y g^(-1) on the opposite space."""
    return mmul(y, minv(g, fd), fd)


def act_y_a(y, a, fd: FieldDescriptor):
    """Right action y.a = a^(-1) y on the opposite space."""
    return mmul(minv(a, fd), y, fd)


def b_map(g, n: int, fd: FieldDescriptor):
    """Quotient map to X: the left (n+1) x n block of g."""
    if fd.is_archimedean:
        return np.asarray(g)[:, :n].copy()
    return tuple(row[:n] for row in xl.mat(g))


def bbar_map(g, n: int, fd: FieldDescriptor):
    """Quotient map to Xbar: the top n rows of g^(-1)."""
    gi = minv(g, fd)
    if fd.is_archimedean:
        return np.asarray(gi)[:n, :].copy()
    return gi[:n]


def base_point_x(n: int, fd: FieldDescriptor):
    """x0 = [I_n; 0], the base point whose stabilizer is the unipotent radical."""
    return b_map(meye(n + 1, fd), n, fd)


def base_point_y(n: int, fd: FieldDescriptor):
    return bbar_map(meye(n + 1, fd), n, fd)


def n_element(u, n: int, fd: FieldDescriptor):
    """Upper unipotent [[I_n, u], [0, 1]] for a column u in F^n."""
    m = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        m[i][i] = 1
    m[n][n] = 1
    for i in range(n):
        m[i][n] = u[i]
    return as_matrix(m, fd)


def nbar_element(u, n: int, fd: FieldDescriptor):
    """Lower unipotent [[I_n, 0], [u, 1]] for a row u in F^n."""
    m = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        m[i][i] = 1
    m[n][n] = 1
    for j in range(n):
        m[n][j] = u[j]
    return as_matrix(m, fd)


def embed_l(a, fd: FieldDescriptor):
    """Embedding of GL(n) into G as [[a, 0], [0, det(a)^(-1)]]."""
    if fd.is_archimedean:
        a = np.asarray(a)
        n = a.shape[0]
        g = np.zeros((n + 1, n + 1), dtype=a.dtype if a.dtype == complex else float)
        g[:n, :n] = a
        g[n, n] = 1.0 / np.linalg.det(a)
        return g
    a = xl.mat(a)
    n = len(a)
    d = xl.det(a)
    rows = [list(row) + [Fraction(0)] for row in a]
    rows.append([Fraction(0)] * n + [1 / d])
    return xl.mat(rows)


def in_unipotent(m, n: int, fd: FieldDescriptor, tol: float = 1e-10) -> bool:
    """Membership test for the upper unipotent radical."""
    m_ = as_matrix(m, fd)
    expect = n_element(
        [m_[i][n] if not fd.is_archimedean else np.asarray(m_)[i, n] for i in range(n)],
        n,
        fd,
    )
    return mat_close(m_, expect, fd, tol)


def cartan_theta(g, fd: FieldDescriptor):
    """Cartan involution: conjugate-transpose inverse."""
    if fd.is_archimedean:
        return np.linalg.inv(np.asarray(g)).conj().T
    return xl.transpose(xl.inv(g))


# ---------------------------------------------------------------------
# Unimodular completion and fibers
# ---------------------------------------------------------------------


def unimodular_completion(y, n: int, fd: FieldDescriptor, rng=None, tol: float = 1e-10):
    """A determinant-one g with bbar_map(g) = y, for regular y.

    Appends a row w to y with det([y; w]) = 1 and returns [y; w]^(-1).  The
    deterministic choice scans standard basis rows (picking, archimedean, the
    one maximizing |det| for stability); passing ``rng`` draws a random valid
    completion instead, which is how completion-independence is exercised.
    """
    if fd.is_archimedean:
        y_ = np.asarray(y)
        if not is_regular(y_, fd, tol):
            raise ValueError("point is not regular (rank deficient)")
        candidates = []
        if rng is None:
            for j in range(n + 1):
                w = np.zeros(n + 1, dtype=y_.dtype)
                w[j] = 1
                candidates.append(w)
        else:
            # a handful of draws, keeping the best-conditioned one
            for _ in range(8):
                w = rng.standard_normal(n + 1)
                if fd.kind == "complex":
                    w = w + 1j * rng.standard_normal(n + 1)
                candidates.append(w / np.linalg.norm(w))
        best, bestd = None, 0.0
        for w in candidates:
            d = np.linalg.det(np.vstack([y_, w[None, :]]))
            if abs(d) > bestd:
                best, bestd = w, abs(d)
        if best is None or bestd <= tol:
            raise ValueError("could not complete to a unimodular matrix")
        d = np.linalg.det(np.vstack([y_, best[None, :]]))
        g = np.linalg.inv(np.vstack([y_, (best / d)[None, :]]))
        return g
    y_ = xl.mat(y)
    if xl.rank(y_) < n:
        raise ValueError("point is not regular (rank deficient)")
    rows = None
    if rng is None:
        for j in range(n + 1):
            w = tuple(Fraction(1) if k == j else Fraction(0) for k in range(n + 1))
            cand = y_ + (w,)
            if xl.det(cand) != 0:
                rows = cand
                break
    else:
        for _ in range(64):
            w = tuple(Fraction(int(rng.integers(-9, 10))) for _ in range(n + 1))
            cand = y_ + (w,)
            if xl.det(cand) != 0:
                rows = cand
                break
    if rows is None:
        raise ValueError("could not complete to a unimodular matrix")
    d = xl.det(rows)
    scaled = y_ + (tuple(x / d for x in rows[n]),)
    return xl.inv(scaled)


@dataclass(frozen=True)
class Fiber:
    """Affine parametrization z -> A + c z of {x : y x = I_n}.

    A is (n+1) x n with y A = I_n, c is a column with y c = 0, and z runs
    through row vectors in F^n; the fiber measure is Lebesgue dz (transported
    from the unipotent group through a unimodular completion).
    """

    y: object
    A: object
    c: object
    n: int
    fd: FieldDescriptor

    def point(self, z):
        """The fiber point A + c z; z is a flat row of n scalars (or 1 x n)."""
        if self.fd.is_archimedean:
            c = np.asarray(self.c).reshape(-1, 1)
            z_ = np.asarray(z).reshape(1, -1)
            return np.asarray(self.A) + c @ z_
        zf = z[0] if len(z) == 1 and isinstance(z[0], (tuple, list)) else z
        czr = tuple(
            tuple(self.c[i][0] * Fraction(zz) for zz in zf) for i in range(self.n + 1)
        )
        return xl.mat_add(self.A, czr)


def fiber_param(y, n: int, fd: FieldDescriptor, rng=None, tol: float = 1e-10) -> Fiber:
    """Fiber of the intertwining kernel over a regular y."""
    g = unimodular_completion(y, n, fd, rng=rng, tol=tol)
    if fd.is_archimedean:
        g = np.asarray(g)
        A = g[:, :n].copy()
        c = g[:, n].copy().reshape(-1, 1)
    else:
        A = tuple(row[:n] for row in g)
        c = tuple((row[n],) for row in g)
    return Fiber(y=y, A=A, c=c, n=n, fd=fd)


# ---------------------------------------------------------------------
# KAK / Cartan decomposition and weights
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class KAKFactors:
    """k1 @ diag @ k2 with k1, k2 in the maximal compact subgroup.

    Archimedean: singular value decomposition, diagonal sorted decreasing.
    p-adic: Smith decomposition with k1, k2 in GL(n, Z_p) and diagonal
    entries p**m_i, m_1 <= ... <= m_n (so the diagonal is sorted by
    decreasing normalized absolute value in both cases).
    """

    k1: object
    diag: tuple
    k2: object
    fd: FieldDescriptor

    def reconstruct(self):
        n = len(self.diag)
        if self.fd.is_archimedean:
            return np.asarray(self.k1) @ np.diag(self.diag) @ np.asarray(self.k2)
        D = tuple(
            tuple(self.diag[i] if i == j else Fraction(0) for j in range(n))
            for i in range(n)
        )
        return xl.matmul(xl.matmul(self.k1, D), self.k2)


def kak(a, fd: FieldDescriptor, tol: float = 1e-12) -> KAKFactors:
    """Cartan decomposition of an invertible n x n matrix."""
    if fd.is_archimedean:
        a_ = np.asarray(a, dtype=complex if fd.kind == "complex" else float)
        u, s, vh = np.linalg.svd(a_)
        if s[-1] <= tol:
            raise ValueError("singular input")
        return KAKFactors(k1=u, diag=tuple(float(x) for x in s), k2=vh, fd=fd)
    a_ = xl.mat(a)
    if xl.det(a_) == 0:
        raise ValueError("singular input")
    U, exps, V = xl.smith_zp(a_, fd.p)
    diag = tuple(Fraction(fd.p) ** e for e in exps)
    return KAKFactors(k1=U, diag=diag, k2=V, fd=fd)


def rho_weight(diag, n: int, fd: FieldDescriptor) -> float:
    """The spherical decay weight prod_i |a_i|^(i - (n+1)/2).

    The normalized absolute value absorbs the real dimension of the field, so
    the same exponents serve R, C and Q_p.  Diagonal entries are expected in
    the KAK order (decreasing normalized absolute value); the value itself is
    order-dependent but each bound below holds per factor in any order.
    """
    w = 1.0
    for i, ai in enumerate(diag, start=1):
        w *= float(abs_norm(ai, fd)) ** (i - (n + 1) / 2.0)
    return w


def rho_weight_exponents(log_sizes, n: int):
    """Exact log-scale weights for the decay chain.

    ``log_sizes`` are the logarithms base t of the normalized absolute values
    |a_i| (any fixed base t > 1; Fractions).  Returns exact Fractions
    (rho, mid, low) with

        rho = sum_i (i - (n+1)/2) * e_i,
        mid = -(n-1)/2 * sum_i |e_i|,
        low = -(n+1)/2 * sum_i |e_i|,

    so that t**rho = prod |a_i|^(i-(n+1)/2) and the chain rho >= mid >= low
    mirrors prod |a_i|^(i-(n+1)/2) >= prod min(|a_i|, |a_i|^-1)^((n-1)/2)
    >= prod min(|a_i|, |a_i|^-1)^((n+1)/2).
    """
    es = [Fraction(e) for e in log_sizes]
    rho = sum((Fraction(2 * i - (n + 1), 2)) * e for i, e in enumerate(es, start=1))
    total = sum(abs(e) for e in es)
    mid = -Fraction(n - 1, 2) * total
    low = -Fraction(n + 1, 2) * total
    return rho, mid, low


def measure_scale(a, fd: FieldDescriptor):
    """Haar scaling |det a|^-(n+1) of the X measure under x -> x a."""
    n = len(a) if not fd.is_archimedean else np.asarray(a).shape[0]
    d = mdet(a, fd)
    if fd.is_archimedean:
        return float(abs_norm(d, fd)) ** (-(n + 1))
    return abs_norm(d, fd) ** (-(n + 1))


def hc_majorant(diag, p_exponent: float, C_p: float, n: int, fd: FieldDescriptor) -> float:
    """Harish-Chandra style majorant C_p * rho_weight / (1 + ||log a||)^p."""
    logs = [np.log(float(ai)) for ai in diag] if fd.is_archimedean else [
        float(padic_valuation(ai, fd.p)) * np.log(float(fd.p)) * -1.0 for ai in diag
    ]
    norm = float(np.sqrt(sum(x * x for x in logs)))
    return C_p * rho_weight(diag, n, fd) / (1.0 + norm) ** p_exponent
