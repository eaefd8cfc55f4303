"""Z_p-lattices and lattice cosets in Q_p^d, with exact calculus.

A lattice is a full-rank Z_p-submodule of Q_p^d with a rational basis; since
all inputs are rational the whole calculus stays in Q.  The canonical
representative is the column Hermite normal form over Z_(p) (lower
triangular, pivots pure powers of p, subdiagonal entries canonical
residues), so two descriptions of the same lattice produce identical basis
matrices and equality is syntactic.

Cosets carry a canonically reduced center.  Everything needed by the
Schwartz-Bruhat function class lives here: duals, sums, intersections,
images and affine preimages, coset intersection with witnesses, quotient
enumeration, and coordinate projections with exact Fubini volume factors.
"""

from __future__ import annotations

from fractions import Fraction

from . import exactlinalg as xl
from .fields import padic_valuation


class Lattice:
    """Full-rank Z_p-lattice in Q_p^d, stored by its canonical HNF basis.

    ``basis`` is a d x d matrix whose *columns* generate the lattice.
    """

    __slots__ = ("p", "basis", "dim")

    def __init__(self, p: int, basis, _canonical=False):
        basis = xl.mat(basis)
        d, k = xl.shape(basis)
        if not _canonical:
            basis = xl.hnf_zp(basis, p)
        self.p = p
        self.basis = basis
        self.dim = d

    @classmethod
    def standard(cls, p: int, d: int) -> "Lattice":
        """Z_p^d."""
        return cls(p, xl.identity(d), _canonical=True)

    @classmethod
    def scaled_standard(cls, p: int, d: int, k: int) -> "Lattice":
        """p^k Z_p^d."""
        s = Fraction(p) ** k
        return cls(p, tuple(
            tuple(s if i == j else Fraction(0) for j in range(d)) for i in range(d)
        ), _canonical=True)

    def __eq__(self, other):
        return (
            isinstance(other, Lattice)
            and self.p == other.p
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.p, self.basis))

    def __repr__(self):
        return f"Lattice(p={self.p}, basis={[list(r) for r in self.basis]})"

    # -- measure -------------------------------------------------------

    def volume(self) -> Fraction:
        """Haar volume |det(basis)|_p, normalized so vol(Z_p^d) = 1."""
        d = xl.det(self.basis)
        return Fraction(self.p) ** (-padic_valuation(d, self.p))

    def pivot_exponents(self):
        return tuple(
            padic_valuation(self.basis[i][i], self.p) for i in range(self.dim)
        )

    # -- membership ----------------------------------------------------

    def coords(self, vec):
        """Coordinates t with basis @ t = vec (triangular solve)."""
        t = [Fraction(0)] * self.dim
        v = [Fraction(x) for x in vec]
        for i in range(self.dim):
            t[i] = v[i] / self.basis[i][i]
            if t[i] != 0:
                for r in range(i, self.dim):
                    v[r] -= t[i] * self.basis[r][i]
        return tuple(t)

    def contains(self, vec) -> bool:
        return all(c == 0 or padic_valuation(c, self.p) >= 0 for c in self.coords(vec))

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(col) for col in zip(*other.basis))

    def reduce_vector(self, vec):
        """Canonical representative of vec modulo the lattice."""
        t = self.coords(vec)
        frac = tuple(xl.canonical_residue(c, self.p, 0) for c in t)
        return xl.matvec(self.basis, frac)

    # -- constructions ---------------------------------------------------

    def dual(self) -> "Lattice":
        """{y : <y, x> in Z_p for all x in the lattice} for the dot pairing."""
        return Lattice(self.p, xl.transpose(xl.inv(self.basis)))

    def scale(self, c) -> "Lattice":
        return Lattice(self.p, xl.mat_scale(c, self.basis))

    def map_by(self, M) -> "Lattice":
        """Image under an invertible matrix M."""
        return Lattice(self.p, xl.matmul(xl.mat(M), self.basis))

    def sum(self, other: "Lattice") -> "Lattice":
        rows = tuple(ra + rb for ra, rb in zip(self.basis, other.basis))
        return Lattice(self.p, rows)

    def intersect(self, other: "Lattice") -> "Lattice":
        return self.dual().sum(other.dual()).dual()

    def quotient_representatives(self, sub: "Lattice"):
        """Coset representatives of (self / sub) for a sublattice sub.

        Uses the Smith form of basis^(-1) @ sub_basis over Z_(p): the
        quotient is a product of cyclic groups Z/p^(a_i).
        """
        if not self.contains_lattice(sub):
            raise ValueError("not a sublattice")
        D = xl.matmul(xl.inv(self.basis), sub.basis)
        U, exps, _V = xl.smith_zp(D, self.p)
        gens = xl.matmul(self.basis, U)  # columns: adapted basis of self
        reps = [tuple(Fraction(0) for _ in range(self.dim))]
        for i, a in enumerate(exps):
            if a == 0:
                continue
            col = tuple(row[i] for row in gens)
            new = []
            for r in reps:
                for s in range(self.p**a):
                    new.append(tuple(x + s * c for x, c in zip(r, col)))
            reps = new
        return reps

    def granularity_exponent(self) -> int:
        """Smallest g with p^g Z_p^d contained in the lattice."""
        g = 0
        d = self.dim
        for i in range(d):
            e = tuple(Fraction(1) if r == i else Fraction(0) for r in range(d))
            t = self.coords(e)
            worst = min(
                (padic_valuation(c, self.p) for c in t if c != 0), default=0
            )
            g = max(g, -worst)
        return g

    def radius_exponent(self) -> int:
        """Smallest R with the lattice contained in p^(-R) Z_p^d."""
        v = xl.val_min_entry(self.basis, self.p)
        return 0 if v is None else max(0, -v)


class Coset:
    """center + lattice, with the center canonically reduced mod the lattice."""

    __slots__ = ("lattice", "center")

    def __init__(self, lattice: Lattice, center):
        self.lattice = lattice
        self.center = lattice.reduce_vector(tuple(Fraction(x) for x in center))

    @property
    def p(self):
        return self.lattice.p

    @property
    def dim(self):
        return self.lattice.dim

    def __eq__(self, other):
        return (
            isinstance(other, Coset)
            and self.lattice == other.lattice
            and self.center == other.center
        )

    def __hash__(self):
        return hash((self.lattice, self.center))

    def __repr__(self):
        return f"Coset(center={[str(c) for c in self.center]}, {self.lattice!r})"

    def contains(self, vec) -> bool:
        return self.lattice.contains(xl.vec_sub(tuple(Fraction(x) for x in vec), self.center))

    def volume(self) -> Fraction:
        return self.lattice.volume()

    def translate(self, vec) -> "Coset":
        return Coset(self.lattice, xl.vec_add(self.center, tuple(Fraction(x) for x in vec)))

    def intersect(self, other: "Coset"):
        """Intersection coset, or None when disjoint.

        Nonempty iff center difference lies in the lattice sum; a witness is
        produced from the HNF transform of the concatenated bases.
        """
        L1, L2 = self.lattice, other.lattice
        diff = xl.vec_sub(other.center, self.center)
        stacked = tuple(ra + rb for ra, rb in zip(L1.basis, L2.basis))
        H, U = xl.hnf_zp(stacked, self.p, transform=True)
        Hlat = Lattice(self.p, H, _canonical=True)
        if not Hlat.contains(diff):
            return None
        t = Hlat.coords(diff)
        # diff = stacked @ (U[:, :d] @ t) with integral coordinates
        d = self.dim
        w = [sum(U[r][i] * t[i] for i in range(d)) for r in range(2 * d)]
        z1 = w[:d]
        witness = xl.vec_add(self.center, xl.matvec(L1.basis, z1))
        return Coset(L1.intersect(L2), witness)

    def affine_preimage(self, offset, C):
        """Preimage {z : offset + C @ z in self} for injective C (d x m).

        Returns a Coset in dimension m, or None when empty.  Solved through
        the Smith form of basis^(-1) @ C over Z_(p).
        """
        p = self.p
        D = xl.matmul(xl.inv(self.lattice.basis), xl.mat(C))
        dm, m = xl.shape(D)
        U, exps, V = xl.smith_zp(D, p)
        if len(exps) < m:
            raise ValueError("affine map is not injective")
        w = self.lattice.coords(
            xl.vec_sub(self.center, tuple(Fraction(x) for x in offset))
        )
        u = xl.matvec(xl.inv(U), w)
        # rows beyond m carry the solvability constraint u_i in Z_p
        for i in range(m, dm):
            if u[i] != 0 and padic_valuation(u[i], p) < 0:
                return None
        Vinv = xl.inv(V)
        tpart = tuple(u[i] / Fraction(p) ** exps[i] for i in range(m))
        z0 = xl.matvec(Vinv, tpart)
        scale = tuple(
            tuple(
                (Fraction(p) ** (-exps[j]) if j == i else Fraction(0))
                for j in range(m)
            )
            for i in range(m)
        )
        M = Lattice(p, xl.matmul(Vinv, scale))
        return Coset(M, z0)

    def project(self, keep):
        """Push forward along coordinate projection, integrating the rest out.

        Returns (projected coset, fiber volume) so that for any y in the
        projected coset the slice {w : (y,w) in self} has the stated volume,
        and vol(self) = vol(projection) * fiber_volume.
        """
        keep = tuple(keep)
        drop = tuple(i for i in range(self.dim) if i not in keep)
        if not drop:
            return Coset(self.lattice, self.center), Fraction(1)
        p = self.p
        # slice lattice: {w : embedding(w) in lattice}
        emb = tuple(
            tuple(Fraction(1) if drop[j] == r else Fraction(0) for j in range(len(drop)))
            for r in range(self.dim)
        )
        zero = tuple(Fraction(0) for _ in range(self.dim))
        slice_coset = Coset(self.lattice, zero).affine_preimage(zero, emb)
        fiber_vol = slice_coset.lattice.volume()
        proj_basis = tuple(self.lattice.basis[i] for i in keep)
        proj_lat = Lattice(p, proj_basis)
        proj_center = tuple(self.center[i] for i in keep)
        return Coset(proj_lat, proj_center), fiber_vol


# -- spec-facing helpers ------------------------------------------------


def lattice_hnf(p: int, basis) -> Lattice:
    return Lattice(p, basis)


def lattice_dual(L: Lattice) -> Lattice:
    return L.dual()


def lattice_intersect(a, b):
    """Lattice-lattice or coset-coset intersection."""
    if isinstance(a, Lattice) and isinstance(b, Lattice):
        return a.intersect(b)
    return a.intersect(b)


def affine_preimage(coset: Coset, offset, C):
    return coset.affine_preimage(offset, C)


def lattice_volume(L: Lattice) -> Fraction:
    return L.volume()
