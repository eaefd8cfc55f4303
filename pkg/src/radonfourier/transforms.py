"""Fourier transform, slice/Radon integrals, the normalizing weight gamma_n,
and the verification operations tying them together.

The transform on the matrix space X is

    F f(y) = integral over X of f(x) chi(Tr(y x)) dx

with chi the field's additive character (archimedean kernel
exp(-2 pi i Re Tr(y x))).  The intertwining integral I integrates f over the
affine fiber {x : y x = I_n}; the slice transform T(f)(y, a) does the same
over {x : y x = a}.  The two are linked by the Fourier-slice identity

    F f(y) = integral over M_n of T(f)(y, a) chi(Tr a) da,

the absolutely convergent, pointwise-true face of the statement that the
composition of I with convolution by

    gamma_n(a) = |det a|^((1-n)/2) chi(Tr(a^(-1)))

agrees with F.  The crux is the exact kernel identity

    |det a|^((1-n)/2) gamma_n(a^(-1)) = chi(Tr a),

checked here over every supported field.  A literal iterated composition
diverges pointwise for generic inputs (the fiber integrand decays like
1/||z||), so the composition is exposed only through the kernel and slice
reformulations, plus a p-adic shell-stabilized evaluation whose convergence
is certified by exact vanishing of character sums on successive shells.
Several operations take deliberate perturbation knobs (exponent shifts, a
measure factor, a sign flip) so the negative controls can demonstrate that
each identity actually discriminates.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exactlinalg as xl
from . import quadrature as quad
from .cyclotomic import ExactValue
from .fields import FieldDescriptor, abs_norm, add_char, padic_valuation
from .functions import (
    Envelope,
    Evaluable,
    GaussianForm,
    SBFunction,
    _with_space,
    fiber_restrict,
    integrate,
    translate_group,
)
from .geometry import (
    Fiber,
    MatrixSpace,
    fiber_param,
    flatten_linear,
    is_regular,
    mdet,
    minv,
    mmul,
    mtrace,
    space_L,
)
from .hilbert import act_g, act_module_X, act_module_Xbar, inner_X, inner_Xbar


# ---------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------


@lru_cache(maxsize=None)
def pairing_matrix(yspace: MatrixSpace, xspace: MatrixSpace):
    """Coordinate matrix P of (y, x) -> Re Tr(y x) (Tr(y x) over Q_p).

    Rows index y-coordinates, columns x-coordinates, so the pairing is
    coords(y)^T P coords(x).  P is a signed permutation, hence the Lebesgue
    coordinate measure is self-dual for the associated Fourier kernel.
    """
    fd = yspace.fd
    if yspace.cols != xspace.rows or yspace.rows != xspace.cols:
        raise ValueError("spaces do not pair")
    ybasis = yspace.basis_matrices()
    xbasis = xspace.basis_matrices()
    if fd.is_archimedean:
        P = np.zeros((yspace.dim, xspace.dim))
        for i, yb in enumerate(ybasis):
            for j, xb in enumerate(xbasis):
                P[i, j] = float(np.real(np.trace(np.asarray(yb) @ np.asarray(xb))))
        return P
    return tuple(
        tuple(xl.trace(xl.matmul(yb, xb)) for xb in xbasis) for yb in ybasis
    )


def _pairing_dual(P, fd: FieldDescriptor):
    """The pairing matrix for the conjugate-kernel (inverse) transform."""
    if fd.is_archimedean:
        return -np.asarray(P).T
    return tuple(tuple(-x for x in row) for row in xl.transpose(P))


# ---------------------------------------------------------------------
# Fourier transform
# ---------------------------------------------------------------------


def fourier(f, inverse: bool = False):
    """Transform a function on X to one on Xbar (or back, with ``inverse``).

    Gaussians and Schwartz-Bruhat functions transform in closed form /
    exactly; a bare Evaluable becomes an Evaluable computing values by
    quadrature on demand (bounded, but with no certified decay, so it cannot
    be integrated again).
    """
    space = f.space
    fd = space.fd
    target = space.transpose_space()
    P = pairing_matrix(target, space)
    if inverse:
        P = _pairing_dual(pairing_matrix(space, target), fd)
    if isinstance(f, (GaussianForm, SBFunction)):
        return f.fourier(P, target)
    if isinstance(f, Evaluable):
        return _fourier_evaluable(f, P, target)
    raise TypeError(f"cannot transform {type(f).__name__}")


def _fourier_evaluable(f: Evaluable, P, target: MatrixSpace):
    Pm = np.asarray(P, dtype=float)
    absf = Evaluable(
        f.space, lambda pts: np.abs(np.asarray(f.fn(pts))), f.env, f"|{f.label}|"
    )
    mass = abs(integrate(absf))

    def fn(ypts):
        ypts = np.atleast_2d(ypts)
        out = np.empty(len(ypts), dtype=complex)
        for i, y in enumerate(ypts):
            eta = Pm.T @ y

            def integrand(xpts, eta=eta):
                return np.asarray(f.fn(xpts)) * np.exp(-2j * np.pi * (xpts @ eta))

            out[i] = integrate(
                Evaluable(f.space, integrand, f.env, "fourier-integrand")
            )
        return out

    return Evaluable(target, fn, Envelope(C=float(mass)), label=f"F({f.label})")


def fourier_at(f, y):
    """Value of the transform at a single point of the opposite space."""
    g = fourier(f)
    return g.value(y)


# ---------------------------------------------------------------------
# Normalizing weight and the kernel identity
# ---------------------------------------------------------------------


def gamma_n(a, fd: FieldDescriptor, exponent_shift: Fraction = Fraction(0)):
    """gamma_n(a) = |det a|^((1-n)/2) chi(Tr(a^(-1))).

    ``exponent_shift`` perturbs the magnitude exponent and exists purely for
    the negative controls.  Archimedean values are complex; p-adic values are
    exact (a formal q-power times a root of unity).
    """
    n = len(a) if not fd.is_archimedean else np.asarray(a).shape[0]
    ai = minv(a, fd)
    tr = mtrace(ai, fd)
    if fd.is_archimedean:
        mag = float(abs_norm(mdet(a, fd), fd)) ** (
            float(Fraction(1 - n, 2) + exponent_shift)
        )
        return mag * add_char(tr, fd)
    v = padic_valuation(mdet(a, fd), fd.p)
    qexp = -v * (Fraction(1 - n, 2) + exponent_shift)
    return ExactValue(fd.p, qexp, add_char(tr, fd))


def kernel_identity_check(
    fd: FieldDescriptor,
    n: int,
    samples,
    tol: float = 1e-12,
    exponent_shift: Fraction = Fraction(0),
    max_rows: int = 10,
) -> dict:
    """Verify |det a|^((1-n)/2) gamma_n(a^(-1)) = chi(Tr a) on given samples.

    Archimedean: batched linear algebra, magnitudes compared relatively and
    phases as angles, both at ``tol``; p-adic: exact equality of q-powers and
    roots of unity.  The report keeps the first ``max_rows`` sample records
    and every failing record (failures always carry the discriminating input
    for replay).
    """
    rows = []
    ok = True
    if fd.is_archimedean:
        arr = np.stack([np.asarray(a) for a in samples])
        invs = np.linalg.inv(arr)
        # the left side goes through gamma at the numerical inverse: its own
        # determinant, its own inverse-of-the-inverse trace
        mags = np.array([abs_norm(d, fd) for d in np.linalg.det(arr)])
        mags_inv = np.array([abs_norm(d, fd) for d in np.linalg.det(invs)])
        shift = float(exponent_shift)
        gamma_vals = mags_inv ** ((1 - n) / 2.0 + shift) * np.exp(
            -2j * np.pi * np.real(np.trace(np.linalg.inv(invs), axis1=1, axis2=2))
        )
        lhs = mags ** ((1 - n) / 2.0) * gamma_vals
        rhs = np.exp(-2j * np.pi * np.real(np.trace(arr, axis1=1, axis2=2)))
        mag_err = np.abs(np.abs(lhs) - np.abs(rhs)) / np.abs(rhs)
        ang = np.abs(np.angle(lhs / rhs))
        good = (mag_err <= tol) & (ang <= tol)
        ok = bool(np.all(good))
        for i in range(len(samples)):
            if good[i] and len(rows) >= max_rows:
                continue
            a = samples[i]
            rows.append(
                {
                    "input": np.asarray(a).tolist()
                    if fd.kind == "real"
                    else [[z.real, z.imag] for z in np.asarray(a).reshape(-1)],
                    "lhs": [lhs[i].real, lhs[i].imag],
                    "rhs": [rhs[i].real, rhs[i].imag],
                    "abs_err": float(abs(lhs[i] - rhs[i])),
                    "pass": bool(good[i]),
                }
            )
    else:
        for a in samples:
            ai = xl.inv(a)
            v = padic_valuation(xl.det(a), fd.p)
            lhs = ExactValue(fd.p, -v * Fraction(1 - n, 2), 1) * gamma_n(
                ai, fd, exponent_shift
            )
            rhs = ExactValue.from_cyclo(fd.p, add_char(xl.trace(a), fd))
            good = lhs == rhs
            if good and len(rows) >= max_rows:
                ok = ok and good
                continue
            rows.append(
                {
                    "input": [[str(x) for x in row] for row in a],
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                    "exact_equal": bool(good),
                }
            )
            ok = ok and good
    return {"check": "gamma-kernel", "field": str(fd), "n": n, "pass": ok, "samples": rows}


# ---------------------------------------------------------------------
# Slice transform and intertwining integral
# ---------------------------------------------------------------------


def slice_transform(f, y, a, fiber: Fiber = None, measure_factor=1):
    """T(f)(y, a): integral of f over the affine fiber {x : y x = a}.

    Parametrized as x = A a + c w for w in F^n, where (A, c) comes from a
    unimodular completion of y (y A = I_n, y c = 0), so the fiber measure is
    plain Lebesgue dw.  ``measure_factor`` rescales dw and exists for the
    negative controls.
    """
    space = f.space
    fd = space.fd
    n = space.cols
    if fiber is None:
        fiber = fiber_param(y, n, fd)
    Aa = mmul(fiber.A, a, fd)
    shifted = Fiber(y=y, A=Aa, c=fiber.c, n=n, fd=fd)
    g = fiber_restrict(f, shifted)
    val = integrate(g)
    return _rescale(val, measure_factor, fd)


def _rescale(val, factor, fd: FieldDescriptor):
    if factor == 1:
        return val
    if fd.is_archimedean:
        return val * float(factor)
    return val * Fraction(factor)


def intertwine_I(f, y, fiber: Fiber = None, measure_factor=1, with_error: bool = False):
    """The standard intertwining integral I(f)(y) = T(f)(y, I_n).

    Divergent inputs (an Evaluable whose restricted envelope does not decay)
    raise, reporting insufficient decay.
    """
    space = f.space
    fd = space.fd
    n = space.cols
    if fiber is None:
        fiber = fiber_param(y, n, fd)
    g = fiber_restrict(f, fiber)
    if isinstance(g, Evaluable) and not g.env.integrable():
        raise ValueError("fiber integral diverges: restricted function has no decay")
    val, err = integrate(g, with_error=True)
    val = _rescale(val, measure_factor, fd)
    return (val, err) if with_error else val


def slice_family(f, y, fiber: Fiber = None, measure_factor=1):
    """T(f)(y, .) as a function on the n x n matrix space.

    Pulls f back along the joint linear map (a, w) -> A a + c w (a bijection
    of coordinate spaces since [A | c] completes to determinant one) and
    integrates out the w block: Gaussians by Schur complement, lattice-coset
    functions by exact Fubini.
    """
    space = f.space
    fd = space.fd
    n = space.cols
    if fiber is None:
        fiber = fiber_param(y, n, fd)
    Lsp = space_L(n, fd)
    wsp = MatrixSpace(fd, 1, n)
    da = Lsp.dim
    MA = flatten_linear(lambda a: mmul(fiber.A, a, fd), Lsp, space)
    Mc = flatten_linear(
        lambda z: _cz_block(fiber, z, fd), wsp, space
    )
    if fd.is_archimedean:
        M = np.hstack([np.asarray(MA), np.asarray(Mc)])
    else:
        M = tuple(ra + rb for ra, rb in zip(MA, Mc))
    g = f.pullback_affine(M)
    keep = list(range(da))
    if isinstance(g, GaussianForm):
        out = g.marginalize(keep)
    elif isinstance(g, SBFunction):
        out = g.partial_integral(keep)
    else:
        raise TypeError("slice family needs a Gaussian or Schwartz-Bruhat input")
    out = _with_space(out, Lsp)
    if measure_factor != 1:
        out = out.scale(
            float(measure_factor) if fd.is_archimedean else Fraction(measure_factor)
        )
    return out


def _cz_block(fiber: Fiber, z, fd: FieldDescriptor):
    if fd.is_archimedean:
        c = np.asarray(fiber.c).reshape(-1, 1)
        return c @ np.asarray(z).reshape(1, -1)
    return tuple(
        tuple(fiber.c[i][0] * z[0][j] for j in range(fiber.n)) for i in range(fiber.n + 1)
    )


def trace_form_coords(n: int, fd: FieldDescriptor):
    """Vector lam with <lam, coords(a)> = Re Tr(a) on the n x n space."""
    Lsp = space_L(n, fd)
    P = pairing_matrix(Lsp, Lsp)
    eye = (
        np.eye(n, dtype=complex if fd.kind == "complex" else float)
        if fd.is_archimedean
        else xl.identity(n)
    )
    cI = Lsp.coords(eye)
    if fd.is_archimedean:
        return np.asarray(P).T @ np.asarray(cI)
    return xl.matvec(xl.transpose(P), cI)


def integrate_against_trace_character(g, n: int):
    """integral of g(a) chi(Tr a) da over the n x n matrix space.

    Gaussian g: closed form (the transform of g evaluated at the identity).
    Schwartz-Bruhat g: exact character sum.
    """
    fd = g.space.fd
    Lsp = space_L(n, fd)
    if isinstance(g, GaussianForm):
        P = pairing_matrix(Lsp, Lsp)
        ghat = g.fourier(P, Lsp)
        eye = np.eye(n, dtype=complex if fd.kind == "complex" else float)
        return ghat.value(eye)
    if isinstance(g, SBFunction):
        lam = trace_form_coords(n, fd)
        return g.integrate_against_character(lam)
    raise TypeError("need a Gaussian or Schwartz-Bruhat slice family")


# ---------------------------------------------------------------------
# Convolutions with the normalizing weight
# ---------------------------------------------------------------------


def convolve_C(f, T_fn, support, order: int = 24):
    """Convolution C_T f(x) = int f(x a^(-1)) |det a|^(-(n+1)/2) T(a) dxa.

    ``T_fn`` must come with compact support (a box archimedean, safe cosets
    p-adic); unbounded weights are refused, since only the operational
    gamma-form below makes sense for them.
    """
    from .hilbert import act_module_X_phi

    if support is None:
        raise ValueError(
            "unbounded convolution weight: use the operational gamma form instead"
        )
    return act_module_X_phi(f, T_fn, support, order=order)


def convolve_gamma(f, x):
    """Operational form of convolution by gamma_n at a regular point x:

        C_gamma f(x) = integral over M_n(F) of f(x b) chi(Tr b) db,

    absolutely convergent for Gaussian f (the pullback b -> x b is injective
    for regular x) and a finite exact character sum for Schwartz-Bruhat f.
    """
    space = f.space
    fd = space.fd
    n = space.cols
    if not is_regular(x, fd):
        raise ValueError("point is not regular (rank deficient)")
    Lsp = space_L(n, fd)
    M = flatten_linear(lambda b: mmul(x, b, fd), Lsp, space)
    g = _with_space(f.pullback_affine(M), Lsp)
    return integrate_against_trace_character(g, n)


def compose_shell_stabilized(f: SBFunction, y, k_max: int = 8, fiber: Fiber = None):
    """p-adic composition I(C_gamma f)(y) over growing fiber balls.

    The fiber integral of z -> C_gamma f(A + c z) is accumulated over the
    balls ||z|| <= p^k.  Each shell is split into cosets fine enough that the
    inner character sum is constant on each (the modulus comes from an
    ultrametric bound on the support, so the decomposition is rigorous), and
    the shell contribution is an exact cyclotomic sum.  Once two consecutive
    shells vanish identically the value is declared stable and compared
    against the Fourier transform; otherwise the result is inconclusive and
    the caller falls back to the Fourier-slice identity.

    Returns (value or None, certificate dict).
    """
    space = f.space
    fd = space.fd
    if fd.is_archimedean:
        raise ValueError("shell stabilization is a p-adic operation")
    p = fd.p
    n = space.cols
    if fiber is None:
        fiber = fiber_param(y, n, fd)
    Lsp = space_L(n, fd)

    # rigorous local-constancy modulus: perturbing z by p^s changes x b by
    # c dz b; bounding b through the left inverse y of x = A + c z keeps all
    # entries in p^-rho Z_p, so s >= g0 + rho - v(c) freezes every membership
    g0 = 0
    rf = 0
    for _, coset in f.terms:
        g0 = max(g0, coset.lattice.granularity_exponent())
        rads = [coset.lattice.radius_exponent()]
        rads += [
            max(0, -padic_valuation(c, p)) for c in coset.center if c != 0
        ]
        rf = max(rf, *rads)
    ry = max(
        (max(0, -padic_valuation(e, p)) for row in y for e in row if e != 0),
        default=0,
    )
    vc = min(padic_valuation(fiber.c[i][0], p) for i in range(n + 1) if fiber.c[i][0] != 0)
    s = max(g0 + rf + ry - vc, 0)

    lam = trace_form_coords(n, fd)

    def inner_value(z_vec):
        x = fiber.point(tuple(z_vec))
        Mb = flatten_linear(lambda b: mmul(x, b, fd), Lsp, space)
        g = _with_space(f.pullback_affine(Mb), Lsp)
        return g.integrate_against_character(lam)

    total = ExactValue.from_cyclo(p, 0)
    shells = []
    consecutive_zero = 0
    stable_at = None
    coset_vol = Fraction(1, p ** (n * s))
    for k in range(0, k_max + 1):
        contrib = ExactValue.from_cyclo(p, 0)
        emptied = True
        for z_vec in _shell_points(p, n, k, s):
            val = inner_value(z_vec)
            if not val.is_zero():
                emptied = False
                contrib = contrib + val * coset_vol
        shells.append(
            {"k": k, "contribution": contrib.to_json(), "empty_support": emptied}
        )
        total = total + contrib
        if contrib.is_zero() and k > 0:
            consecutive_zero += 1
            if consecutive_zero >= 2:
                stable_at = k
                break
        elif k > 0:
            consecutive_zero = 0
    certificate = {
        "granularity_exponent": s,
        "shells": shells,
        "stabilization_radius": stable_at,
        "stabilized": stable_at is not None,
    }
    if stable_at is None:
        return None, certificate
    return total, certificate


def _shell_points(p: int, n: int, k: int, s: int):
    """Representatives modulo p^s Z_p^n of the shell {||z|| = p^k}, k >= 1,
    or of the unit ball Z_p^n for k = 0, as rational coordinate tuples.

    Points are d / p^k with digit vectors d in [0, p^(k+s))^n; for k >= 1 the
    shell keeps exactly those with some digit coprime to p.
    """
    import itertools

    denom = p**k
    for digits in itertools.product(range(p ** (k + s)), repeat=n):
        if k >= 1 and all(d % p == 0 for d in digits):
            continue
        yield tuple(Fraction(d, denom) for d in digits)


# ---------------------------------------------------------------------
# Verification reports
# ---------------------------------------------------------------------


def fourier_slice_verify(
    f, y_samples, tol: float = 1e-6, rhs_method: str = "auto", measure_factor=1
) -> dict:
    """Check F f(y) = integral of T(f)(y, a) chi(Tr a) da at sampled y.

    The two sides are computed along independent routes: the left by the
    closed-form / exact transform, the right through the fiber
    parametrization, the joint pullback and the a-integral.  For n = 1
    archimedean inputs ``rhs_method='quadrature'`` forces the a-integral
    through adaptive quadrature on pointwise slice values instead of the
    closed form.
    """
    space = f.space
    fd = space.fd
    n = space.cols
    fhat = fourier(f)
    rows = []
    ok = True
    for y in y_samples:
        lhs = fhat.value(y)
        fam = slice_family(f, y, measure_factor=measure_factor)
        if rhs_method == "quadrature" and fd.kind == "real" and n == 1:
            fib = fiber_param(y, n, fd)

            def point_slice(apts):
                out = np.empty(len(apts), dtype=complex)
                for i, av in enumerate(apts[:, 0]):
                    a = np.array([[av]])
                    out[i] = slice_transform(
                        f, y, a, fiber=fib, measure_factor=measure_factor
                    ) * add_char(av, fd)
                return out

            env = fam.envelope()
            R = 4.0 / np.sqrt(float(np.linalg.eigvalsh(env.Q)[0])) + 1.0
            if env.center is not None:
                R += float(np.linalg.norm(env.center))
            rhs, err = quad.adaptive_line_integral(point_slice, R, tol=tol * 1e-3)
        else:
            rhs = integrate_against_trace_character(fam, n)
            err = 0.0
        if fd.is_archimedean:
            good = abs(lhs - rhs) <= tol
            rows.append(
                {
                    "input": np.asarray(y).tolist(),
                    "lhs": [lhs.real, lhs.imag],
                    "rhs": [complex(rhs).real, complex(rhs).imag],
                    "abs_err": float(abs(lhs - rhs)),
                    "rhs_quadrature_error": float(err),
                }
            )
        else:
            good = lhs == rhs
            rows.append(
                {
                    "input": [[str(e) for e in row] for row in y],
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                    "exact_equal": bool(good),
                }
            )
        ok = ok and good
    return {"check": "slice", "field": str(fd), "n": n, "pass": ok, "samples": rows}


def fourier_equivariance_check(
    f, a, y_samples, tol: float = 1e-8, exponent_sign: int = +1
) -> dict:
    """Check F(f^(a^-1))(y) = |det a|^(+(n+1)) F f(a y) at sampled y.

    The positive exponent is deliberate and is pinned by the discriminating
    Gaussian example (see the tests); flipping ``exponent_sign`` to -1 is the
    negative control.  Also checks the module-level form F(f.a) = F(f).a.
    """
    space = f.space
    fd = space.fd
    n = space.cols
    lhs_fun = fourier(translate_group(f, minv(a, fd), side="right"))
    rhs_fun = fourier(f)
    mod_lhs = fourier(act_module_X(f, a))
    from .hilbert import act_module_Xbar

    mod_rhs = act_module_Xbar(fourier(f), a)
    scale = float(abs_norm(mdet(a, fd), fd)) ** (exponent_sign * (n + 1)) if (
        fd.is_archimedean
    ) else None
    rows = []
    ok = True
    for y in y_samples:
        ay = mmul(a, y, fd)
        if fd.is_archimedean:
            lhs = lhs_fun.value(y)
            rhs = scale * rhs_fun.value(ay)
            err1 = abs(lhs - rhs)
            ml = mod_lhs.value(y)
            mr = mod_rhs.value(y)
            err2 = abs(ml - mr)
            good = err1 <= tol and err2 <= tol
            rows.append(
                {
                    "input": np.asarray(y).tolist(),
                    "lhs": [lhs.real, lhs.imag],
                    "rhs": [rhs.real, rhs.imag],
                    "abs_err": float(err1),
                    "module_form_err": float(err2),
                }
            )
        else:
            v = padic_valuation(xl.det(a), fd.p)
            sgn = exponent_sign * (n + 1)
            sc = ExactValue(fd.p, Fraction(-v * sgn), 1)
            lhs = lhs_fun.value(y)
            rhs = sc * rhs_fun.value(ay)
            ml = mod_lhs.value(y)
            mr = mod_rhs.value(y)
            good = lhs == rhs and ml == mr
            rows.append(
                {
                    "input": [[str(e) for e in row] for row in y],
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                    "exact_equal": bool(good),
                }
            )
        ok = ok and good
    return {
        "check": "fourier-equivariance",
        "field": str(fd),
        "n": n,
        "pass": ok,
        "samples": rows,
    }


def intertwine_equivariance_check(f, g, a, y_samples, tol: float = 1e-6) -> dict:
    """Check I(g.f)(y) = I(f)(y g) and I(f.a)(y) = |det a|^((n+1)/2) I(f)(a y)."""
    from .hilbert import act_g

    space = f.space
    fd = space.fd
    n = space.cols
    gf = act_g(f, g, side="x")
    fa = act_module_X(f, a)
    rows = []
    ok = True
    for y in y_samples:
        yg = mmul(y, g, fd)
        ay = mmul(a, y, fd)
        l1 = intertwine_I(gf, y)
        r1 = intertwine_I(f, yg)
        l2 = intertwine_I(fa, y)
        r2_base = intertwine_I(f, ay)
        if fd.is_archimedean:
            r2 = float(abs_norm(mdet(a, fd), fd)) ** ((n + 1) / 2.0) * r2_base
            e1, e2 = abs(l1 - r1), abs(l2 - r2)
            good = e1 <= tol and e2 <= tol
            rows.append(
                {
                    "input": np.asarray(y).tolist(),
                    "g_side_err": float(e1),
                    "a_side_err": float(e2),
                }
            )
        else:
            v = padic_valuation(xl.det(a), fd.p)
            r2 = ExactValue(fd.p, Fraction(-v * (n + 1), 2), 1) * r2_base
            good = l1 == r1 and l2 == r2
            rows.append(
                {
                    "input": [[str(e) for e in row] for row in y],
                    "g_side_exact": bool(l1 == r1),
                    "a_side_exact": bool(l2 == r2),
                }
            )
        ok = ok and good
    return {
        "check": "intertwine-equivariance",
        "field": str(fd),
        "n": n,
        "pass": ok,
        "samples": rows,
    }


def unitarity_verify(f, h, a_grid, tol: float = 1e-6) -> dict:
    """Check <F f, F h>_Xbar(a) = <f, h>_X(a) over a grid in GL(n)."""
    space = f.space
    fd = space.fd
    n = space.cols
    lhs_fun = inner_Xbar(fourier(f), fourier(h))
    rhs_fun = inner_X(f, h)
    rows = []
    ok = True
    for a in a_grid:
        lhs = lhs_fun(a)
        rhs = rhs_fun(a)
        if fd.is_archimedean:
            err = abs(lhs - rhs)
            good = err <= tol
            rows.append({"input": np.asarray(a).tolist(), "abs_err": float(err)})
        else:
            good = lhs == rhs
            rows.append(
                {
                    "input": [[str(e) for e in row] for row in a],
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                    "exact_equal": bool(good),
                }
            )
        ok = ok and good
    return {"check": "unitarity", "field": str(fd), "n": n, "pass": ok, "samples": rows}
