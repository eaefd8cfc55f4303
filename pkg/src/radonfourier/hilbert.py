"""Module actions and GL(n)-valued inner products on the dense submodule.

Functions on the matrix space X (resp. the opposite space) carry a right
action of GL(n) by scaled translation and a pairing whose value at a group
element a is

    <f, h>_X(a)    = |det a|^((n+1)/2)  * integral of conj(f(x)) h(x a) dx,
    <f, h>_Xbar(a) = |det a|^(-(n+1)/2) * integral of conj(f(y)) h(a^-1 y) dy.

These pairings take values in functions on GL(n); here they are realized as
``LFunction`` evaluation objects (closed-form for Gaussian pairs, exact for
Schwartz-Bruhat pairs, quadrature otherwise).  The decay diagnostics at the
bottom (Schwartz estimate with explicit constant, spherical majorant fit,
truncation sequence) are the computable surrogates for membership of the
pairings in the reduced group C*-algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlinalg as xl
from . import quadrature as quad
from .cyclotomic import ExactValue
from .fields import FieldDescriptor, abs_norm, padic_valuation
from .functions import (
    Envelope,
    Evaluable,
    GaussianForm,
    SBFunction,
    conjugate,
    cutoff_chi,
    integrate,
    pointwise_mul,
    translate_group,
)
from .geometry import (
    MatrixSpace,
    flatten_linear,
    hc_majorant,
    mdet,
    minv,
    mmul,
)


def _half_power_scale(a, n: int, fd: FieldDescriptor, sign: int):
    """|det a|^(sign*(n+1)/2) as a float or exact q-power."""
    d = mdet(a, fd)
    if fd.is_archimedean:
        return float(abs_norm(d, fd)) ** (sign * (n + 1) / 2.0)
    v = padic_valuation(d, fd.p)
    return ExactValue(fd.p, Fraction(-v * sign * (n + 1), 2), 1)


@dataclass
class LFunction:
    """Evaluation object a -> value on GL(n), with provenance.

    Values are complex (archimedean) or ExactValue (p-adic).  ``with_error``
    evaluation also reports the quadrature error estimate (0 for closed-form
    and exact paths).
    """

    fd: FieldDescriptor
    n: int
    _eval: object
    provenance: str = ""

    def __call__(self, a):
        return self._eval(a, False)[0]

    def with_error(self, a):
        return self._eval(a, True)

    def on_grid(self, grid):
        return [(a, *self._eval(a, True)) for a in grid]


def inner_X(f, h) -> LFunction:
    """The X-side pairing <f,h>_X as a function on GL(n)."""
    space = f.space
    fd = space.fd
    n = space.cols

    def ev(a, with_error):
        ha = translate_group(h, a, side="right")
        prod = pointwise_mul(conjugate(f), ha)
        val, err = integrate(prod, with_error=True)
        scale = _half_power_scale(a, n, fd, +1)
        if fd.is_archimedean:
            return scale * val, scale * err
        return scale * val, Fraction(0)

    return LFunction(fd, n, ev, provenance=f"inner_X({_label(f)},{_label(h)})")


def inner_Xbar(f, h) -> LFunction:
    """The opposite-side pairing <f,h>_Xbar as a function on GL(n)."""
    space = f.space
    fd = space.fd
    n = space.rows

    def ev(a, with_error):
        ha = translate_group(h, minv(a, fd), side="left")
        prod = pointwise_mul(conjugate(f), ha)
        val, err = integrate(prod, with_error=True)
        scale = _half_power_scale(a, n, fd, -1)
        if fd.is_archimedean:
            return scale * val, scale * err
        return scale * val, Fraction(0)

    return LFunction(fd, n, ev, provenance=f"inner_Xbar({_label(f)},{_label(h)})")


def _label(f):
    return getattr(f, "kind", type(f).__name__)


# ---------------------------------------------------------------------
# Module actions
# ---------------------------------------------------------------------


def act_module_X(f, a):
    """f.a(x) = |det a|^(-(n+1)/2) f(x a^(-1)) on the X side."""
    fd = f.space.fd
    n = f.space.cols
    g = translate_group(f, minv(a, fd), side="right")
    return g.scale(_half_power_scale(a, n, fd, -1))


def act_module_Xbar(f, a):
    """f.a(y) = |det a|^((n+1)/2) f(a y) on the opposite side."""
    fd = f.space.fd
    n = f.space.rows
    g = translate_group(f, a, side="left")
    return g.scale(_half_power_scale(a, n, fd, +1))


def act_g(f, g, side: str):
    """Group translation: (g.f)(x) = f(g^(-1) x) on X, (g.f)(y) = f(y g) opposite."""
    fd = f.space.fd
    if side == "x":
        return translate_group(f, minv(g, fd), side="left")
    if side == "xbar":
        return translate_group(f, g, side="right")
    raise ValueError("side must be 'x' or 'xbar'")


def act_module_X_phi(f, phi, support=None, order: int = 24):
    """Integrated action f.phi(x) = int f(x a^(-1)) phi(a) |det a|^(-(n+1)/2) dxa.

    Archimedean: phi is an Evaluable on the n x n matrix space with a compact
    support box ``support = (lows, highs)`` staying inside GL(n); the result
    is an Evaluable computed by tensor quadrature of the given order over the
    support (the multiplicative measure dxa = |det a|^(-n) da is part of the
    weight).

    p-adic: phi is an SBFunction whose cosets a0 + L must be multiplicatively
    safe: a0 invertible, W = a0^(-1) L inside p M_n(Z_p) and W W inside W.
    Each coset then inverts to the coset a0^(-1) + W a0^(-1) with constant
    |det|, and the action evaluates exactly, pointwise.
    """
    fd = f.space.fd
    n = f.space.cols
    if fd.is_archimedean:
        if support is None:
            raise ValueError("compact support box required for the integrated action")
        return _act_module_phi_arch(f, phi, support, n, order)
    return _act_module_phi_padic(f, phi)


def _act_module_phi_arch(f, phi, support, n: int, order: int):
    fd = f.space.fd
    lows = np.asarray(support[0], dtype=float)
    highs = np.asarray(support[1], dtype=float)
    Lspace = MatrixSpace(fd, n, n)
    xg, wg = quad.gauss_legendre_rule(order)
    axes = []
    for lo, hi in zip(lows, highs):
        half = 0.5 * (hi - lo)
        axes.append((lo + half * (xg + 1.0), wg * half))
    mesh = np.meshgrid(*[a for a, _ in axes], indexing="ij")
    nodes = np.stack([m.reshape(-1) for m in mesh], axis=1)
    wmesh = np.meshgrid(*[w for _, w in axes], indexing="ij")
    weights = np.ones(len(nodes))
    for w in wmesh:
        weights = weights * w.reshape(-1)
    phivals = phi.eval_coords(nodes)
    amats = [Lspace.from_coords(v) for v in nodes]
    dets = np.array([abs_norm(np.linalg.det(am), fd) for am in amats])
    if np.any(dets < 1e-12):
        raise ValueError("support box touches the singular set")
    totw = weights * phivals * dets ** (-(n + 1) / 2.0 - float(n))
    pulls = [
        flatten_linear(
            lambda x, ai=np.linalg.inv(am): mmul(x, ai, fd), f.space, f.space
        )
        for am in amats
    ]
    fenv = f.envelope() if isinstance(f, GaussianForm) else f.env
    if fenv.center is not None:
        raise NotImplementedError("integrated action needs a centered envelope")

    def fn(pts):
        acc = np.zeros(len(pts), dtype=complex)
        for M, w in zip(pulls, totw):
            if w == 0:
                continue
            acc += w * np.asarray(f.eval_coords(pts @ M.T))
        return acc

    mass = float(np.sum(np.abs(totw)))
    if fenv.Q is not None:
        lam = min(float(np.linalg.eigvalsh(M.T @ np.asarray(fenv.Q) @ M)[0]) for M in pulls)
        env = Envelope(C=mass * fenv.C, Q=lam * 0.999 * np.eye(f.space.dim))
    else:
        smax = max(float(np.linalg.norm(am, 2)) for am in amats)
        env = Envelope(
            C=mass * fenv.C,
            radius=None if fenv.radius is None else fenv.radius * smax,
        )
    return Evaluable(f.space, fn, env, label="f.phi")


class PadicIntegratedAction:
    """Exact pointwise evaluator for the p-adic integrated action f.phi."""

    kind = "padic-action"

    def __init__(self, f: SBFunction, pieces):
        self.f = f
        self.space = f.space
        self.pieces = pieces  # [(weight ExactValue, inverted coset)]

    def value(self, x) -> ExactValue:
        fd = self.space.fd
        n = self.space.cols
        Lspace = MatrixSpace(fd, n, n)
        M = flatten_linear(lambda b: mmul(x, b, fd), Lspace, self.space)
        total = ExactValue.from_cyclo(fd.p, 0)
        for weight, inv_coset in self.pieces:
            fb = self.f.pullback_affine(M)
            box = SBFunction.indicator(Lspace, inv_coset)
            total = total + weight * fb.product(box).integral()
        return total


def _act_module_phi_padic(f: SBFunction, phi: SBFunction) -> PadicIntegratedAction:
    from .lattices import Coset as _Coset

    fd = f.space.fd
    p = fd.p
    n = f.space.cols
    Lspace = MatrixSpace(fd, n, n)
    pieces = []
    for coeff, coset in phi.terms:
        a0 = Lspace.from_coords(coset.center)
        d0 = xl.det(a0)
        if d0 == 0:
            raise ValueError("phi support touches the singular set")
        a0i = xl.inv(a0)
        W = coset.lattice.map_by(
            flatten_linear(lambda b: xl.matmul(a0i, b), Lspace, Lspace)
        )
        wmin = xl.val_min_entry(W.basis, p)
        if wmin is None or wmin < 1:
            raise ValueError(
                "phi coset not multiplicatively safe: a0^(-1) L must sit in p*M_n(Z_p)"
            )
        gens = [Lspace.from_coords(col) for col in zip(*W.basis)]
        for wi in gens:
            for wj in gens:
                if not W.contains(Lspace.coords(xl.matmul(wi, wj))):
                    raise ValueError(
                        "phi coset not multiplicatively safe: W W must sit in W"
                    )
        inv_lat = W.map_by(
            flatten_linear(lambda b: xl.matmul(b, a0i), Lspace, Lspace)
        )
        inv_coset = _Coset(inv_lat, Lspace.coords(a0i))
        # after b = a^(-1): weight |det b|^((n+1)/2 - n) db with
        # |det b| = |det a0|^(-1) = q^v constant on the inverted coset
        v = padic_valuation(d0, p)
        weight = coeff * ExactValue(p, Fraction(v * (1 - n), 2), 1)
        pieces.append((weight, inv_coset))
    return PadicIntegratedAction(f, pieces)


# ---------------------------------------------------------------------
# Decay diagnostics
# ---------------------------------------------------------------------


def column_product_constant(f):
    """The explicit constant C = prod_i ||f_i||_inf ||f_i||_1 over columns.

    Requires the column-product structure |f(x)| <= prod_i f_i(x_i): for a
    Gaussian this means a quadratic form that is block diagonal across the
    columns of X and no phase; for a Schwartz-Bruhat function, a single
    origin coset whose lattice splits as a direct sum across columns.
    """
    space = f.space
    fd = space.fd
    rows, cols = space.shape
    per = (fd.d_F if fd.is_archimedean else 1) * rows
    if isinstance(f, GaussianForm):
        if np.any(f.ell):
            raise ValueError("phase factors break the column product envelope")
        C = 1.0
        kcol = abs(f.kappa) ** (1.0 / cols)
        for j in range(cols):
            idx = _column_coord_indices(space, j)
            others = [i for i in range(space.dim) if i not in idx]
            if np.any(f.Q[np.ix_(idx, others)]):
                raise ValueError("quadratic form does not split across columns")
            Qj = f.Q[np.ix_(idx, idx)]
            C *= kcol * kcol * float(np.linalg.det(Qj)) ** (-0.5)
        return C
    if isinstance(f, SBFunction):
        if len(f.terms) != 1:
            raise ValueError("need a single-coset function for the product envelope")
        coeff, coset = f.terms[0]
        if any(c != 0 for c in coset.center):
            raise ValueError("need an origin coset for the product envelope")
        if not coeff.cyc.is_rational() or coeff.qexp != 0:
            raise ValueError("need a rational coefficient")
        kval = abs(coeff.cyc.rational_value())
        C = Fraction(1)
        for j in range(cols):
            idx = _column_coord_indices(space, j)
            others = [i for i in range(space.dim) if i not in idx]
            for r in idx:
                for c in others:
                    if coset.lattice.basis[r][c] != 0 or coset.lattice.basis[c][r] != 0:
                        raise ValueError("lattice does not split across columns")
            sub = Lattice_from_block(coset.lattice, idx)
            C *= sub.volume()
        return C * kval * kval
    raise ValueError("no product envelope for this function class")


def _column_coord_indices(space: MatrixSpace, j: int):
    """Flat coordinate indices of the j-th matrix column."""
    fd = space.fd
    per = fd.d_F if fd.is_archimedean else 1
    idx = []
    for r in range(space.rows):
        base = (r * space.cols + j) * per
        idx.extend(range(base, base + per))
    return idx


def Lattice_from_block(lat, idx):
    from .lattices import Lattice

    rows = tuple(tuple(lat.basis[r][c] for c in idx) for r in idx)
    return Lattice(lat.p, rows)


def exact_le(v1, v2) -> bool:
    """v1 <= v2 for positive exact values c * q^e (compared after squaring)."""
    c1, e1 = v1.cyc.rational_value(), v1.qexp
    c2, e2 = v2.cyc.rational_value(), v2.qexp
    if c1 < 0 or c2 < 0:
        raise ValueError("comparison needs positive values")
    de = 2 * (e2 - e1)
    assert de.denominator == 1
    q = Fraction(v1.p) ** int(de)
    return c1 * c1 <= c2 * c2 * q


def decay_bound_check(f, samples, rng=None, tol: float = 1e-9) -> dict:
    """Check |<f,f>_X(k1 a k2)| <= C prod min(|a_i|,|a_i|^-1)^((n+1)/2).

    ``samples`` is a list of KAK triples (k1, diag, k2); the constant C is
    the explicit per-column product constant.  Archimedean comparisons allow
    a relative slack of ``tol`` for roundoff; p-adic comparisons are exact.
    Returns a report dict with per-sample rows and an overall flag.
    """
    space = f.space
    fd = space.fd
    n = space.cols
    C = column_product_constant(f)
    pairing = inner_X(f, f)
    rows = []
    ok = True
    for k1, diag, k2 in samples:
        if fd.is_archimedean:
            a = np.asarray(k1) @ np.diag(diag) @ np.asarray(k2)
            val = abs(pairing(a))
            bound = C
            for ai in diag:
                s = float(abs_norm(ai, fd))
                bound *= min(s, 1.0 / s) ** ((n + 1) / 2.0)
            good = val <= bound * (1.0 + tol) + 1e-300
        else:
            D = tuple(
                tuple(diag[i] if i == j else Fraction(0) for j in range(n))
                for i in range(n)
            )
            a = xl.matmul(xl.matmul(k1, D), k2)
            val = pairing(a)
            expo = Fraction(0)
            for ai in diag:
                v = padic_valuation(ai, fd.p)
                expo += Fraction(-abs(v) * (n + 1), 2)
            bound = ExactValue(fd.p, expo, 1) * C
            good = exact_le(val, bound)
            val, bound = val.to_complex().real, bound.to_complex().real
        row = {"diag": [str(d) for d in diag], "value": val, "bound": bound}
        if not good:
            # failures echo the full decomposition for replay
            row["k1"] = _mat_json(k1, fd)
            row["k2"] = _mat_json(k2, fd)
        rows.append(row)
        ok = ok and good
    return {"C": float(C), "pass": ok, "samples": rows}


def _mat_json(m, fd: FieldDescriptor):
    if fd.is_archimedean:
        return np.asarray(m).tolist() if fd.kind == "real" else [
            [z.real, z.imag] for z in np.asarray(m).reshape(-1)
        ]
    return [[str(x) for x in row] for row in m]


def hc_dominance_report(f, p_exponent: float, grids) -> dict:
    """Fit the majorant constant C_p on nested grids and test stability.

    For each grid of KAK triples, C_p is the largest observed ratio
    |<f,f>_X(k1 a k2)| * (1 + ||log a||)^p / rho_weight(a).  The fit must be
    finite on every grid and stable (no blow-up) under refinement.
    """
    fd = f.space.fd
    n = f.space.cols
    pairing = inner_X(f, f)
    fits = []
    for grid in grids:
        cmax = 0.0
        for k1, diag, k2 in grid:
            if fd.is_archimedean:
                a = np.asarray(k1) @ np.diag(diag) @ np.asarray(k2)
                val = abs(pairing(a))
            else:
                D = tuple(
                    tuple(diag[i] if i == j else Fraction(0) for j in range(n))
                    for i in range(n)
                )
                a = xl.matmul(xl.matmul(k1, D), k2)
                val = abs(pairing(a).to_complex())
            m = hc_majorant(diag, p_exponent, 1.0, n, fd)
            cmax = max(cmax, val / m)
        fits.append(cmax)
    finite = all(np.isfinite(c) for c in fits)
    stable = all(b <= a * 1.05 + 1e-12 for a, b in zip(fits, fits[1:]))
    return {"fits": fits, "finite": finite, "stable": stable, "pass": finite and stable}


def truncation_sequence(f: GaussianForm, m_max: int, a_grid, r_order: int = 40,
                        theta_order: int = 48) -> dict:
    """Sup over the grid of phi_m = <f - f chi_m, f - f chi_m>_X, m = 1..m_max.

    Archimedean only.  The difference f - f chi_m concentrates near the
    singular set and in the far tail, so the two-dimensional case (n = 1)
    integrates in polar panels with breakpoints at every cutoff feature
    radius; this keeps the quadrature honest at all scales down to 1/m^2.
    """
    space = f.space
    fd = space.fd
    if not fd.is_archimedean:
        raise ValueError("truncation diagnostics are archimedean")
    n = space.cols
    if space.dim != 2 or fd.kind != "real":
        raise NotImplementedError("implemented for the two-dimensional real case")
    sups = []
    per_m = []
    for m in range(1, m_max + 1):
        chi = cutoff_chi(m, space)
        cf = chi.fn

        def delta(pts):
            return f.eval_coords(pts) * (1.0 - np.real(cf(pts)))

        vals = []
        for a in a_grid:
            av = float(a)
            M = np.eye(2) * av  # right multiplication by the 1x1 matrix a
            feat = [
                1.0 / (m + 1) ** 2, 1.0 / m**2, float(m), float(m + 1),
            ]
            feat += [x / abs(av) for x in feat]
            r_tail = min(float(m + 1), 4.5 / min(1.0, abs(av)))
            breaks = sorted({0.0, r_tail, *[x for x in feat if 0 < x < r_tail]})

            def integrand(pts, M=M):
                return np.conj(delta(pts)) * delta(pts @ M.T)

            val = quad.integrate_polar_2d(integrand, breaks, r_order, theta_order)
            phi = float(abs_norm(av, fd)) ** ((n + 1) / 2.0) * val.real
            vals.append(abs(phi))
        sups.append(max(vals))
        per_m.append({"m": m, "sup": max(vals)})
    monotone = all(b <= a * (1 + 1e-9) + 1e-15 for a, b in zip(sups, sups[1:]))
    return {
        "sup_values": sups,
        "per_m": per_m,
        "monotone": monotone,
        "final_sup": sups[-1],
    }
