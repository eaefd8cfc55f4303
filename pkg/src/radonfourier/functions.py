"""Test functions on matrix spaces: Gaussians, Schwartz-Bruhat sums, evaluables.

Three classes populate the dense submodule on which every transform and
inner product is computed:

* ``GaussianForm``: kappa * exp(-pi <xi, Q xi> + 2 pi i <ell, xi>) in the
  real coordinates xi of a matrix space, with Q symmetric positive definite
  and ell a (possibly complex) phase vector.  The class is closed under
  affine pullbacks, products, partial integration and the Fourier transform,
  all in closed form; this is what makes the archimedean oracles exact.
* ``SBFunction``: a finite combination of indicators of lattice cosets over
  Q_p with exact cyclotomic coefficients.  Closed under the same operations,
  with every result computed exactly.
* ``Evaluable``: an arbitrary vectorized integrand with declared decay
  metadata (a Gaussian envelope and/or a support radius) driving quadrature.
  Products of Gaussians with cutoffs land here.

Free functions at the bottom (`evaluate`, `pullback_linear`,
`translate_group`, `pointwise_mul`, `fiber_restrict`, `integrate`, ...)
dispatch on the class and are the package-level vocabulary.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlinalg as xl
from . import quadrature as quad
from .cyclotomic import CyclotomicValue, ExactValue
from .fields import FieldDescriptor, add_char
from .geometry import MatrixSpace, flatten_linear, mmul
from .lattices import Coset, Lattice


# ---------------------------------------------------------------------
# Gaussian forms
# ---------------------------------------------------------------------


class GaussianForm:
    """kappa * exp(-pi xi'Q xi + 2 pi i ell'xi) on a matrix space's coordinates."""

    kind = "gaussian"

    def __init__(self, space: MatrixSpace, Q=None, kappa=1.0, ell=None):
        if not space.fd.is_archimedean:
            raise ValueError("Gaussian forms live on archimedean spaces")
        d = space.dim
        self.space = space
        self.Q = np.eye(d) if Q is None else np.asarray(Q, dtype=float)
        if self.Q.shape != (d, d):
            raise ValueError("quadratic form has wrong shape")
        if not np.allclose(self.Q, self.Q.T):
            raise ValueError("quadratic form must be symmetric")
        if np.linalg.eigvalsh(self.Q)[0] <= 0:
            raise ValueError("quadratic form must be positive definite")
        self.kappa = complex(kappa)
        self.ell = np.zeros(d, dtype=complex) if ell is None else np.asarray(ell, dtype=complex)

    @classmethod
    def standard(cls, space: MatrixSpace) -> "GaussianForm":
        """The self-normalized Gaussian exp(-pi |xi|^2) with unit integral."""
        return cls(space)

    # -- evaluation ------------------------------------------------------

    def eval_coords(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        quad_part = np.einsum("ni,ij,nj->n", pts, self.Q, pts)
        lin = pts @ self.ell
        return self.kappa * np.exp(-np.pi * quad_part + 2j * np.pi * lin)

    def value(self, x):
        return complex(self.eval_coords(self.space.coords(x)[None, :])[0])

    # -- closed forms ------------------------------------------------------

    def integral(self) -> complex:
        """Closed form kappa * det(Q)^(-1/2) * exp(-pi ell' Q^(-1) ell)."""
        d = np.linalg.det(self.Q)
        expo = -np.pi * (self.ell @ np.linalg.solve(self.Q, self.ell))
        return self.kappa * d ** (-0.5) * cmath.exp(complex(expo))

    def pullback_affine(self, M, offset=None) -> "GaussianForm":
        """The Gaussian z -> f(offset + M z); M must be injective."""
        M = np.asarray(M, dtype=float)
        dz = M.shape[1]
        Qp = M.T @ self.Q @ M
        if np.linalg.eigvalsh((Qp + Qp.T) / 2)[0] <= 0:
            raise ValueError("pullback along a non-injective map loses positivity")
        space = _coords_space(self.space.fd, dz)
        if offset is None:
            return GaussianForm(space, (Qp + Qp.T) / 2, self.kappa, M.T @ self.ell)
        x0 = np.asarray(offset, dtype=float)
        ellp = M.T @ self.ell + 1j * (M.T @ (self.Q @ x0))
        kp = self.kappa * cmath.exp(
            complex(-np.pi * (x0 @ self.Q @ x0) + 2j * np.pi * (self.ell @ x0))
        )
        return GaussianForm(space, (Qp + Qp.T) / 2, kp, ellp)

    def with_space(self, space: MatrixSpace) -> "GaussianForm":
        if space.dim != self.space.dim:
            raise ValueError("coordinate dimension mismatch")
        return GaussianForm(space, self.Q, self.kappa, self.ell)

    def conjugate(self) -> "GaussianForm":
        return GaussianForm(self.space, self.Q, self.kappa.conjugate(), -self.ell.conj())

    def scale(self, c) -> "GaussianForm":
        return GaussianForm(self.space, self.Q, self.kappa * complex(c), self.ell)

    def product(self, other: "GaussianForm") -> "GaussianForm":
        if other.space.dim != self.space.dim:
            raise ValueError("spaces do not match")
        return GaussianForm(
            self.space, self.Q + other.Q, self.kappa * other.kappa, self.ell + other.ell
        )

    def marginalize(self, keep) -> "GaussianForm":
        """Integrate out the coordinates not in ``keep`` (Schur complement)."""
        keep = list(keep)
        drop = [i for i in range(self.space.dim) if i not in keep]
        if not drop:
            return self
        Qkk = self.Q[np.ix_(keep, keep)]
        Qkd = self.Q[np.ix_(keep, drop)]
        Qdd = self.Q[np.ix_(drop, drop)]
        ell_k = self.ell[keep]
        ell_d = self.ell[drop]
        sol = np.linalg.solve(Qdd, ell_d)
        Qp = Qkk - Qkd @ np.linalg.solve(Qdd, Qkd.T)
        ellp = ell_k - Qkd @ sol
        kp = (
            self.kappa
            * np.linalg.det(Qdd) ** (-0.5)
            * cmath.exp(complex(-np.pi * (ell_d @ sol)))
        )
        return GaussianForm(_coords_space(self.space.fd, len(keep)), (Qp + Qp.T) / 2, kp, ellp)

    def fourier(self, P, target: MatrixSpace) -> "GaussianForm":
        """Closed-form transform against the kernel with pairing y'P x.

        The kernel as a function of xi has coefficient vector P'y, so the
        transformed exponent carries P Q^(-1) P' (the orientation matters:
        the pairing permutation is symmetric for n = 1 but not beyond).
        """
        P = np.asarray(P, dtype=float)
        Qi = np.linalg.inv(self.Q)
        Qy = P @ Qi @ P.T
        elly = -1j * (P @ (Qi @ self.ell))
        ky = (
            self.kappa
            * np.linalg.det(self.Q) ** (-0.5)
            * cmath.exp(complex(-np.pi * (self.ell @ Qi @ self.ell)))
        )
        return GaussianForm(target, (Qy + Qy.T) / 2, ky, elly)

    def envelope(self) -> "Envelope":
        """Exact bound |f(xi)| = C exp(-pi (xi-c)'Q(xi-c))."""
        im = np.imag(self.ell)
        if np.any(im):
            u = np.linalg.solve(self.Q, im)
            C = abs(self.kappa) * float(np.exp(np.pi * (u @ self.Q @ u)))
            return Envelope(C=C, Q=self.Q, center=-u)
        return Envelope(C=abs(self.kappa), Q=self.Q, center=None)

    def __repr__(self):
        return f"GaussianForm(dim={self.space.dim}, kappa={self.kappa:.6g})"

    def to_json(self) -> dict:
        return {
            "type": "gaussian",
            "Q": self.Q.tolist(),
            "kappa": [self.kappa.real, self.kappa.imag],
            "ell": [[z.real, z.imag] for z in self.ell],
        }


def _coords_space(fd: FieldDescriptor, dim: int) -> MatrixSpace:
    """A flat stand-in space when a pullback leaves matrix shape behind."""
    per = fd.d_F if fd.is_archimedean else 1
    if dim % per:
        raise ValueError("dimension incompatible with the field")
    return MatrixSpace(fd, 1, dim // per)


# ---------------------------------------------------------------------
# Envelopes and evaluables
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class Envelope:
    """Declared decay: |f(xi)| <= C exp(-pi (xi-center)'Q(xi-center)), and/or
    f = 0 outside the ball of the given radius."""

    C: float
    Q: object = None
    center: object = None
    radius: float = None

    def integrable(self) -> bool:
        return self.Q is not None or self.radius is not None

    def bound_at(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.full(len(pts), self.C)
        if self.Q is not None:
            c = 0 if self.center is None else np.asarray(self.center)[None, :]
            z = pts - c
            out = out * np.exp(-np.pi * np.einsum("ni,ij,nj->n", z, np.asarray(self.Q), z))
        if self.radius is not None:
            out = out * (np.linalg.norm(pts, axis=1) <= self.radius)
        return out


class Evaluable:
    """A vectorized integrand with declared decay metadata."""

    kind = "evaluable"

    def __init__(self, space: MatrixSpace, fn, envelope: Envelope, label: str = ""):
        self.space = space
        self.fn = fn
        self.env = envelope
        self.label = label

    def eval_coords(self, pts):
        return np.asarray(self.fn(np.atleast_2d(np.asarray(pts, dtype=float))), dtype=complex)

    def value(self, x):
        return complex(self.eval_coords(self.space.coords(x)[None, :])[0])

    def conjugate(self) -> "Evaluable":
        return Evaluable(
            self.space, lambda p: np.conj(self.fn(p)), self.env, f"conj({self.label})"
        )

    def scale(self, c) -> "Evaluable":
        c = complex(c)
        env = Envelope(self.env.C * abs(c), self.env.Q, self.env.center, self.env.radius)
        return Evaluable(self.space, lambda p: c * np.asarray(self.fn(p)), env, self.label)

    def pullback_affine(self, M, offset=None) -> "Evaluable":
        M = np.asarray(M, dtype=float)
        dz = M.shape[1]
        x0 = np.zeros(M.shape[0]) if offset is None else np.asarray(offset, dtype=float)
        space = _coords_space(self.space.fd, dz)
        fn = self.fn

        def pulled(pts):
            return fn(pts @ M.T + x0[None, :])

        env = _pullback_envelope(self.env, M, x0)
        return Evaluable(space, pulled, env, f"{self.label}.affine")

    def __repr__(self):
        return f"Evaluable({self.label or 'anonymous'}, dim={self.space.dim})"


def _pullback_envelope(env: Envelope, M, x0) -> Envelope:
    Qp = centerp = None
    if env.Q is not None:
        Q = np.asarray(env.Q)
        c = np.zeros(M.shape[0]) if env.center is None else np.asarray(env.center)
        Qp = M.T @ Q @ M
        Qp = (Qp + Qp.T) / 2
        if np.linalg.eigvalsh(Qp)[0] <= 0:
            Qp = None  # not injective; fall back to radius data only
        else:
            shift = x0 - c
            centerp = -np.linalg.solve(Qp, M.T @ (Q @ shift))
            minval = float(shift @ Q @ shift) - float(
                (M.T @ (Q @ shift)) @ np.linalg.solve(Qp, M.T @ (Q @ shift))
            )
            return Envelope(
                C=env.C * float(np.exp(-np.pi * max(minval, 0.0))),
                Q=Qp,
                center=centerp,
                radius=_pullback_radius(env.radius, M, x0),
            )
    return Envelope(C=env.C, Q=Qp, center=centerp, radius=_pullback_radius(env.radius, M, x0))


def _pullback_radius(radius, M, x0):
    if radius is None:
        return None
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if smin <= 0:
        return None
    return (radius + float(np.linalg.norm(x0))) / float(smin)


# ---------------------------------------------------------------------
# Schwartz-Bruhat functions (p-adic)
# ---------------------------------------------------------------------


class SBFunction:
    """Finite sum of coefficient * indicator(lattice coset) over Q_p.

    Coefficients are ``ExactValue``s (a cyclotomic number times a formal
    q-power), cosets are canonical, and the term list is merged by coset, so
    equality of representations is meaningful and all operations are exact.
    """

    kind = "sb"

    def __init__(self, space: MatrixSpace, terms):
        if space.fd.is_archimedean:
            raise ValueError("Schwartz-Bruhat functions live on p-adic spaces")
        self.space = space
        p = space.fd.p
        merged: dict = {}
        for coeff, coset in terms:
            coeff = _as_exact(coeff, p)
            if coeff.is_zero():
                continue
            if coset.dim != space.dim:
                raise ValueError("coset dimension does not match the space")
            if coset in merged:
                merged[coset] = merged[coset] + coeff
            else:
                merged[coset] = coeff
        self.terms = tuple(
            (c, k) for k, c in merged.items() if not c.is_zero()
        )

    @classmethod
    def indicator(cls, space: MatrixSpace, coset: Coset) -> "SBFunction":
        return cls(space, [(ExactValue.from_cyclo(space.fd.p, 1), coset)])

    @classmethod
    def standard_ball(cls, space: MatrixSpace, scale_exp: int = 0) -> "SBFunction":
        """Indicator of p^scale_exp * Z_p^d."""
        p = space.fd.p
        lat = Lattice.scaled_standard(p, space.dim, scale_exp)
        center = tuple(Fraction(0) for _ in range(space.dim))
        return cls.indicator(space, Coset(lat, center))

    @property
    def p(self) -> int:
        return self.space.fd.p

    def is_zero(self) -> bool:
        return not self.terms

    # -- evaluation -------------------------------------------------------

    def value_coords(self, v) -> ExactValue:
        v = tuple(Fraction(x) for x in v)
        total = ExactValue.from_cyclo(self.p, 0)
        for coeff, coset in self.terms:
            if coset.contains(v):
                total = total + coeff
        return total

    def value(self, x) -> ExactValue:
        return self.value_coords(self.space.coords(x))

    # -- exact calculus ---------------------------------------------------

    def integral(self) -> ExactValue:
        total = ExactValue.from_cyclo(self.p, 0)
        for coeff, coset in self.terms:
            total = total + coeff * coset.volume()
        return total

    def conjugate(self) -> "SBFunction":
        return SBFunction(self.space, [(c.conjugate(), k) for c, k in self.terms])

    def scale(self, c) -> "SBFunction":
        c = _as_exact(c, self.p)
        return SBFunction(self.space, [(coeff * c, k) for coeff, k in self.terms])

    def __add__(self, other: "SBFunction") -> "SBFunction":
        if other.space.dim != self.space.dim:
            raise ValueError("spaces do not match")
        return SBFunction(self.space, self.terms + other.terms)

    def __sub__(self, other: "SBFunction") -> "SBFunction":
        return self + other.scale(Fraction(-1))

    def product(self, other: "SBFunction") -> "SBFunction":
        out = []
        for c1, k1 in self.terms:
            for c2, k2 in other.terms:
                inter = k1.intersect(k2)
                if inter is not None:
                    out.append((c1 * c2, inter))
        return SBFunction(self.space, out)

    def pullback_affine(self, M, offset=None) -> "SBFunction":
        """z -> f(offset + M z) with M an injective Fraction matrix."""
        M = xl.mat(M)
        dz = len(M[0])
        offset = (
            tuple(Fraction(0) for _ in range(len(M)))
            if offset is None
            else tuple(Fraction(x) for x in offset)
        )
        out = []
        for coeff, coset in self.terms:
            pre = coset.affine_preimage(offset, M)
            if pre is not None:
                out.append((coeff, pre))
        return SBFunction(_coords_space(self.space.fd, dz), out)

    def partial_integral(self, keep) -> "SBFunction":
        """Integrate out the coordinates not in ``keep`` (exact Fubini)."""
        out = []
        for coeff, coset in self.terms:
            proj, vol = coset.project(keep)
            out.append((coeff * vol, proj))
        return SBFunction(_coords_space(self.space.fd, len(tuple(keep))), out)

    def refine(self, lattice: Lattice) -> "SBFunction":
        """Rewrite every term over cosets of the given common sublattice."""
        out = []
        for coeff, coset in self.terms:
            if not coset.lattice.contains_lattice(lattice):
                raise ValueError("refinement lattice is not a common sublattice")
            for rep in coset.lattice.quotient_representatives(lattice):
                out.append(
                    (coeff, Coset(lattice, xl.vec_add(coset.center, rep)))
                )
        return SBFunction(self.space, out)

    def is_zero_function(self) -> bool:
        """Exact decision: is the function identically zero?

        Indicators of distinct cosets of one common lattice are linearly
        independent, so refining to the intersection of all term lattices
        and merging decides the question.
        """
        if not self.terms:
            return True
        common = self.terms[0][1].lattice
        for _, coset in self.terms[1:]:
            common = common.intersect(coset.lattice)
        return not self.refine(common).terms

    def equals(self, other: "SBFunction") -> bool:
        return (self - other).is_zero_function()

    def integrate_against_character(self, lam) -> ExactValue:
        """Exact value of integral f(v) chi(<lam, v>) dv for rational lam."""
        lam = tuple(Fraction(x) for x in lam)
        fd = self.space.fd
        total = ExactValue.from_cyclo(self.p, 0)
        for coeff, coset in self.terms:
            pairings = [
                sum(l * b for l, b in zip(lam, col)) for col in zip(*coset.lattice.basis)
            ]
            if any(x != 0 and x.denominator % self.p == 0 for x in pairings):
                continue  # character nontrivial on the lattice: term integrates to 0
            phase = add_char(sum(l * c for l, c in zip(lam, coset.center)), fd)
            total = total + coeff * coset.volume() * phase
        return total

    def fourier(self, P, target: MatrixSpace) -> "SBFunction":
        """Exact transform against chi(<P y, x>): duals, phases, refinement.

        Each indicator of c + L maps to vol(L) chi(<y, Pc>) times the
        indicator of the support lattice {y : <y, P L> in Z_p}; the phase is
        locally constant there, so the support splits into finitely many
        cosets carrying exact root-of-unity coefficients.
        """
        P = xl.mat(P)
        fd = self.space.fd
        p = self.p
        out = []
        for coeff, coset in self.terms:
            B = coset.lattice.basis
            PB = xl.matmul(P, B)
            M = Lattice(p, xl.transpose(xl.inv(PB)))
            w = xl.matvec(P, coset.center)  # phase at y is chi(<y, w>)
            base = coeff * coset.volume()
            u = xl.matvec(xl.transpose(M.basis), w)  # phase in M-coordinates t
            worst = min((xl.padic_valuation(x, p) for x in u if x != 0), default=0)
            zero = tuple(Fraction(0) for _ in range(M.dim))
            if worst >= 0:
                # <w, y> lands in Z_p for every y in M: the phase is 1 there
                out.append((base, Coset(M, zero)))
                continue
            sub = _phase_kernel_sublattice(M.dim, u, p)
            refined = Lattice(p, xl.matmul(M.basis, sub.basis))
            for rep in Lattice.standard(p, M.dim).quotient_representatives(sub):
                y0 = xl.matvec(M.basis, rep)
                phase = add_char(sum(a * b for a, b in zip(w, y0)), fd)
                out.append((base * phase, Coset(refined, y0)))
        return SBFunction(target, out)

    def __repr__(self):
        return f"SBFunction(p={self.p}, terms={len(self.terms)})"

    def to_json(self) -> dict:
        return {
            "type": "sb",
            "terms": [
                {
                    "coeff": c.to_json(),
                    "center": [f"{x.numerator}/{x.denominator}" for x in k.center],
                    "basis": [
                        [f"{x.numerator}/{x.denominator}" for x in row]
                        for row in k.lattice.basis
                    ],
                }
                for c, k in self.terms
            ],
        }


def _phase_kernel_sublattice(d: int, u, p: int) -> Lattice:
    """{t in Z_p^d : <u, t> in Z_p} as a sublattice of Z_p^d."""
    rows = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(d)) for i in range(d)]
    rows.append(tuple(Fraction(x) for x in u))
    zero = tuple(Fraction(0) for _ in range(d + 1))
    cos = Coset(Lattice.standard(p, d + 1), zero).affine_preimage(zero, rows)
    return cos.lattice


def _as_exact(c, p: int) -> ExactValue:
    if isinstance(c, ExactValue):
        if c.p != p:
            raise ValueError("mixed primes")
        return c
    if isinstance(c, (int, Fraction, CyclotomicValue)):
        return ExactValue.from_cyclo(p, c)
    raise TypeError(f"bad coefficient type {type(c).__name__}")


# ---------------------------------------------------------------------
# Cutoffs
# ---------------------------------------------------------------------


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def cutoff_chi(m: int, space: MatrixSpace) -> Evaluable:
    """Smooth truncation approaching the indicator of regular points.

    Equals 1 on {smallest singular value >= 1/m^2, norm <= m} and 0 on
    {smallest singular value <= 1/(m+1)^2} and outside the ball of radius
    m+1, with smoothstep ramps in between.  The shrinking neighborhoods of
    the singular set are the sublevel sets {sigma_min < 1/m^2}; the quadratic
    rate makes their measure fall like m^(-2*min(rows,cols)), fast enough for
    the truncation diagnostics' tolerance.
    """
    if m < 1:
        raise ValueError("cutoff index must be >= 1")
    fd = space.fd
    rows, cols = space.shape
    lo_in, hi_in = 1.0 / (m + 1) ** 2, 1.0 / m**2
    lo_out, hi_out = float(m), float(m + 1)

    def fn(pts):
        pts = np.atleast_2d(pts)
        if fd.kind == "complex":
            flat = pts[:, 0::2] + 1j * pts[:, 1::2]
        else:
            flat = pts
        mats = flat.reshape(len(pts), rows, cols)
        svals = np.linalg.svd(mats, compute_uv=False)
        smin = svals[:, -1]
        norm = np.linalg.norm(pts, axis=1)
        inner = _smoothstep((smin - lo_in) / (hi_in - lo_in))
        outer = 1.0 - _smoothstep((norm - lo_out) / (hi_out - lo_out))
        return (inner * outer).astype(complex)

    return Evaluable(
        space, fn, Envelope(C=1.0, radius=hi_out), label=f"cutoff_chi({m})"
    )


# ---------------------------------------------------------------------
# Dispatching vocabulary
# ---------------------------------------------------------------------


def evaluate(f, x):
    """Pointwise value; complex for archimedean classes, exact for SB."""
    space = f.space
    shape = (
        np.asarray(x).shape
        if space.fd.is_archimedean
        else (len(x), len(x[0]) if len(x) else 0)
    )
    if tuple(shape) != space.shape:
        raise ValueError(f"point of shape {shape} does not live on {space.shape}")
    return f.value(x)


def conjugate(f):
    return f.conjugate()


def pullback_linear(f, M, offset=None):
    """x -> f(offset + M x) in coordinate form; exactness follows the class."""
    return f.pullback_affine(M, offset)


def translate_group(f, m, side: str = "right"):
    """Right translate f^m : x -> f(x m), or left translate x -> f(m x)."""
    space = f.space
    fd = space.fd
    msize = len(m) if not fd.is_archimedean else np.asarray(m).shape[0]
    if side == "right":
        mapper = lambda x: mmul(x, m, fd)
        domain = MatrixSpace(fd, space.rows, msize)
    elif side == "left":
        mapper = lambda x: mmul(m, x, fd)
        domain = MatrixSpace(fd, msize, space.cols)
    else:
        raise ValueError("side must be 'right' or 'left'")
    M = flatten_linear(mapper, domain, space)
    g = f.pullback_affine(M)
    return _with_space(g, domain)


def _with_space(f, space: MatrixSpace):
    if isinstance(f, GaussianForm):
        return GaussianForm(space, f.Q, f.kappa, f.ell)
    if isinstance(f, SBFunction):
        return SBFunction(space, f.terms)
    if isinstance(f, Evaluable):
        return Evaluable(space, f.fn, f.env, f.label)
    raise TypeError(f"unknown function class {type(f).__name__}")


def _envelope_of(f) -> Envelope:
    if isinstance(f, GaussianForm):
        return f.envelope()
    if isinstance(f, Evaluable):
        return f.env
    raise TypeError(f"no envelope for {type(f).__name__}")


def pointwise_mul(f, g):
    """Pointwise product, staying exact or inheriting envelopes as available."""
    if isinstance(f, SBFunction) and isinstance(g, SBFunction):
        return f.product(g)
    if isinstance(f, GaussianForm) and isinstance(g, GaussianForm):
        return f.product(g)
    if isinstance(f, (GaussianForm, Evaluable)) and isinstance(g, (GaussianForm, Evaluable)):
        a, b = f, g
        env = _product_envelope(_envelope_of(a), _envelope_of(b))

        def fn(pts):
            return np.asarray(a.eval_coords(pts)) * np.asarray(b.eval_coords(pts))

        return Evaluable(a.space, fn, env, label="product")
    raise TypeError("unsupported product")


def _product_envelope(ea: Envelope, eb: Envelope) -> Envelope:
    C = ea.C * eb.C
    Qs = [np.asarray(e.Q) for e in (ea, eb) if e.Q is not None]
    centers = [
        np.zeros(q.shape[0]) if e.center is None else np.asarray(e.center)
        for e, q in zip((e for e in (ea, eb) if e.Q is not None), Qs)
    ]
    radius = None
    for e in (ea, eb):
        if e.radius is not None:
            radius = e.radius if radius is None else min(radius, e.radius)
    if not Qs:
        return Envelope(C=C, radius=radius)
    if len(Qs) == 1:
        return Envelope(C=C, Q=Qs[0], center=centers[0], radius=radius)
    Q = Qs[0] + Qs[1]
    rhs = Qs[0] @ centers[0] + Qs[1] @ centers[1]
    center = np.linalg.solve(Q, rhs)
    # the completed square leaves a nonnegative constant; absorbing it into C
    # only loosens the bound, which envelopes are allowed to do
    return Envelope(C=C, Q=Q, center=center, radius=radius)


def fiber_restrict(f, fiber):
    """Restrict a function on X to an affine fiber, as a function of z in F^n."""
    space = f.space
    fd = space.fd
    zspace = MatrixSpace(fd, 1, fiber.n)
    M = flatten_linear(lambda z: _cz(fiber, z, fd), zspace, space)
    offset = space.coords(fiber.A)
    g = f.pullback_affine(M, offset)
    return _with_space(g, zspace)


def _cz(fiber, z, fd):
    if fd.is_archimedean:
        c = np.asarray(fiber.c).reshape(-1, 1)
        return c @ np.asarray(z).reshape(1, -1)
    return tuple(
        tuple(fiber.c[i][0] * z[0][j] for j in range(fiber.n)) for i in range(fiber.n + 1)
    )


def integrate(f, with_error: bool = False, order: int = None):
    """Total integral over the function's space.

    Gaussian and Schwartz-Bruhat inputs use their closed forms (error 0);
    evaluables go through the envelope-driven quadrature engines, reporting a
    two-order difference as the error estimate.
    """
    if isinstance(f, GaussianForm):
        v = f.integral()
        return (v, 0.0) if with_error else v
    if isinstance(f, SBFunction):
        v = f.integral()
        return (v, Fraction(0)) if with_error else v
    if isinstance(f, Evaluable):
        v, e = _integrate_evaluable(f, order)
        return (v, e) if with_error else v
    raise TypeError(f"cannot integrate {type(f).__name__}")


_DEFAULT_ORDERS = {1: 80, 2: 60, 3: 28, 4: 20, 5: 14, 6: 12}


def _integrate_evaluable(f: Evaluable, order=None):
    env = f.env
    d = f.space.dim
    if not env.integrable():
        raise ValueError(
            f"evaluable {f.label!r} has no declared decay; refusing to integrate"
        )
    if order is None:
        order = _DEFAULT_ORDERS.get(d, 10)
    bump = 6 if d <= 4 else 2
    if env.Q is not None:
        v1 = quad.integrate_gauss_hermite(f.fn, env.Q, env.center, order=order)
        v2 = quad.integrate_gauss_hermite(f.fn, env.Q, env.center, order=order + bump)
        return v2, abs(v1 - v2)
    R = env.radius
    v1 = quad.integrate_box(f.fn, [-R] * d, [R] * d, order=order)
    v2 = quad.integrate_box(f.fn, [-R] * d, [R] * d, order=order + bump)
    return v2, abs(v1 - v2)


# ---------------------------------------------------------------------
# JSON ingestion
# ---------------------------------------------------------------------


def function_from_json(obj: dict, space: MatrixSpace):
    """Build a test function from its JSON description.

    Formats: {"type": "gaussian", "Q": [[...]], "kappa": ..., "ell": [...]},
    {"type": "sb", "terms": [{"coeff": ..., "center": [...], "basis": [[...]]}]},
    {"type": "product", "of": [...]}.  Scalars may be numbers, [re, im]
    pairs, or rational strings "num/den" as appropriate to the field.
    """
    t = obj.get("type")
    if t == "gaussian":
        kappa = _json_complex(obj.get("kappa", 1.0))
        ell = [_json_complex(z) for z in obj.get("ell", [])] or None
        Q = obj.get("Q")
        return GaussianForm(space, Q=Q, kappa=kappa, ell=ell)
    if t == "sb":
        p = space.fd.p
        terms = []
        for term in obj["terms"]:
            coeff = _json_exact(term.get("coeff", "1"), p)
            center = [Fraction(x) for x in term["center"]]
            basis = [[Fraction(x) for x in row] for row in term["basis"]]
            terms.append((coeff, Coset(Lattice(p, basis), center)))
        return SBFunction(space, terms)
    if t == "product":
        parts = [function_from_json(o, space) for o in obj["of"]]
        out = parts[0]
        for q in parts[1:]:
            out = pointwise_mul(out, q)
        return out
    raise ValueError(f"unknown function spec type {t!r}")


def _json_complex(v):
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(float(v), 0.0)


def _json_exact(v, p: int) -> ExactValue:
    if isinstance(v, dict):
        if "cyclotomic" in v:
            return ExactValue(
                p, Fraction(v.get("qexp", 0)), CyclotomicValue.from_json(v["cyclotomic"], p)
            )
        return ExactValue.from_cyclo(p, CyclotomicValue.from_json(v, p))
    return ExactValue.from_cyclo(p, Fraction(v))
