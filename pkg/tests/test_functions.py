from fractions import Fraction

import numpy as np
import pytest

from radonfourier import (
    Coset,
    Envelope,
    Evaluable,
    ExactValue,
    GaussianForm,
    Lattice,
    SBFunction,
    cutoff_chi,
    evaluate,
    fiber_param,
    fiber_restrict,
    function_from_json,
    integrate,
    pointwise_mul,
    pullback_linear,
    space_X,
    translate_group,
)
from radonfourier import exactlinalg as xl
from radonfourier.functions import _coords_space
from radonfourier.geometry import MatrixSpace, base_point_x
from radonfourier.sampling import rand_fraction, rand_gaussian, rand_sb_function


def one(p):
    return ExactValue.from_cyclo(p, 1)


def test_evaluate_examples(fr, f3):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    assert abs(evaluate(f, np.zeros((2, 1))) - 1.0) < 1e-15
    assert abs(evaluate(f, np.array([[1.0], [0.0]])) - np.exp(-np.pi)) < 1e-15
    Xp = space_X(1, f3)
    ball = SBFunction.standard_ball(Xp)
    assert evaluate(ball, xl.mat([[1], [3]])) == one(3)
    assert evaluate(ball, xl.mat([[Fraction(1, 3)], [0]])).is_zero()
    with pytest.raises(ValueError):
        evaluate(f, np.zeros((1, 2)))  # wrong domain space
    with pytest.raises(ValueError):
        evaluate(ball, xl.mat([[1, 3]]))


def test_pullback_examples(fr, f3):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    g = pullback_linear(f, np.eye(2))
    assert np.allclose(g.Q, f.Q) and g.kappa == f.kappa
    h = pullback_linear(f, 2.0 * np.eye(2))
    assert np.allclose(h.Q, 4.0 * np.eye(2))
    with pytest.raises(ValueError):
        pullback_linear(f, np.array([[1.0], [1.0]]) @ np.array([[1.0, 1.0]]))
    D1 = MatrixSpace(f3, 1, 1)
    ind = SBFunction.indicator(D1, Coset(Lattice.standard(3, 1), (Fraction(0),)))
    pre = pullback_linear(ind, ((Fraction(3),),))
    assert pre.terms[0][1].lattice == Lattice.scaled_standard(3, 1, -1)


def test_translate_group(fr):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    ft = translate_group(f, np.eye(1), side="right")
    assert np.allclose(ft.Q, f.Q)
    fa = translate_group(f, np.array([[2.0]]), side="right")
    assert np.allclose(fa.Q, 4.0 * np.eye(2))
    a, b = np.array([[1.7]]), np.array([[0.4]])
    lhs = translate_group(translate_group(f, a), b)
    rhs = translate_group(f, a @ b)
    assert np.allclose(lhs.Q, rhs.Q) and abs(lhs.kappa - rhs.kappa) < 1e-14


def test_cutoff_chi(rng, fr):
    n = 2
    X = space_X(n, fr)
    chi2 = cutoff_chi(2, X)
    x0 = base_point_x(n, fr)
    assert abs(evaluate(chi2, x0) - 1.0) < 1e-14  # sigma = 1, norm = sqrt(2) <= 2
    rank_def = np.zeros((3, 2))
    rank_def[0, 0] = 1.0
    assert evaluate(chi2, rank_def) == 0
    pts = rng.standard_normal((500, X.dim)) * 3
    vals = np.real(chi2.eval_coords(pts))
    assert np.all(vals >= 0) and np.all(vals <= 1)
    with pytest.raises(ValueError):
        cutoff_chi(0, X)


def test_pointwise_mul(fr, f3):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    onefun = Evaluable(
        X, lambda p: np.ones(len(p), dtype=complex), Envelope(C=1.0, radius=60.0), "one"
    )
    prod = pointwise_mul(f, onefun)
    pts = np.random.default_rng(1).standard_normal((50, 2))
    assert np.allclose(prod.eval_coords(pts), f.eval_coords(pts))
    # ball intersection: 1_{Z_p^2} * 1_{p Z_p^2} = 1_{p Z_p^2}
    Xp = space_X(1, f3)
    ball = SBFunction.standard_ball(Xp)
    small = SBFunction.standard_ball(Xp, 1)
    got = pointwise_mul(ball, small)
    assert got.terms == small.terms
    # Gaussian * cutoff agrees with the Gaussian on the plateau
    chi = cutoff_chi(3, X)
    prod2 = pointwise_mul(f, chi)
    mid = np.array([[1.0, 0.5], [0.3, -1.0], [0.5, 2.0]])
    assert np.allclose(prod2.eval_coords(mid), f.eval_coords(mid))


def test_sb_algebra_closure(rng, f3):
    Xp = space_X(1, f3)
    for _ in range(10):
        f = rand_sb_function(rng, Xp, terms=2)
        g = rand_sb_function(rng, Xp, terms=2)
        prod = pointwise_mul(f, g)
        for _ in range(10):
            v = tuple(rand_fraction(rng, 3, -2, 2) for _ in range(Xp.dim))
            assert prod.value_coords(v) == f.value_coords(v) * g.value_coords(v)


def test_integrate_examples(fr, f3):
    X = space_X(1, fr)
    assert abs(integrate(GaussianForm.standard(X)) - 1.0) < 1e-14
    for d in (1, 2, 3):
        sp = MatrixSpace(f3, 1, d)
        assert integrate(SBFunction.standard_ball(sp)) == one(3)
    Xp = space_X(1, f3)
    assert integrate(SBFunction.standard_ball(Xp, 1)) == ExactValue.from_cyclo(
        3, Fraction(1, 9)
    )


def test_gaussian_closed_form_vs_quadrature(rng, fr):
    # dims up to 6, mostly small; the envelope is exact so the rule converges fast
    dims = [2, 2, 3, 3, 4, 4, 2, 3, 4, 2, 3, 2, 4, 3, 2, 2, 3, 4, 6, 6]
    for d in dims:
        sp = _coords_space(fr, d)
        g = rand_gaussian(rng, sp, with_phase=bool(rng.integers(0, 2)))
        ev = Evaluable(sp, g.eval_coords, g.envelope(), "g")
        got, err = integrate(ev, with_error=True)
        want = g.integral()
        assert abs(got - want) <= 1e-8 * max(1.0, abs(want)), (d, got, want, err)


def test_gaussian_envelope_bounds(rng, fr):
    X = space_X(2, fr)
    for _ in range(10):
        g = rand_gaussian(rng, X)
        env = g.envelope()
        pts = rng.standard_normal((200, X.dim)) * 2
        assert np.all(np.abs(g.eval_coords(pts)) <= env.bound_at(pts) * (1 + 1e-9))


def test_fiber_restrict(fr, f3):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    fib = fiber_param(np.array([[1.0, 0.0]]), 1, fr)
    fz = fiber_restrict(f, fib)
    for z in [0.0, 0.7, -2.0]:
        assert abs(evaluate(fz, np.array([[z]])) - np.exp(-np.pi * (1 + z * z))) < 1e-14
    Xp = space_X(1, f3)
    ball = SBFunction.standard_ball(Xp)
    fibp = fiber_param(xl.mat([[1, 0]]), 1, f3)
    bz = fiber_restrict(ball, fibp)
    assert evaluate(bz, xl.mat([[1]])) == one(3)
    assert evaluate(bz, xl.mat([[Fraction(1, 3)]])).is_zero()
    # constant test envelope restricts to the constant
    const = Evaluable(
        X, lambda p: np.ones(len(p), dtype=complex), Envelope(C=1.0, radius=50.0), "const"
    )
    cz = fiber_restrict(const, fib)
    assert abs(evaluate(cz, np.array([[0.3]])) - 1.0) < 1e-14


def test_evaluable_requires_decay(fr):
    X = space_X(1, fr)
    bad = Evaluable(X, lambda p: np.ones(len(p), dtype=complex), Envelope(C=1.0), "flat")
    with pytest.raises(ValueError):
        integrate(bad)


def test_function_from_json(fr, f3):
    X = space_X(1, fr)
    f = function_from_json(
        {"type": "gaussian", "Q": [[1.0, 0.0], [0.0, 1.0]], "kappa": 1.0, "ell": [0.0, 0.0]},
        X,
    )
    assert abs(integrate(f) - 1.0) < 1e-14
    Xp = space_X(1, f3)
    g = function_from_json(
        {
            "type": "sb",
            "terms": [
                {"coeff": "1/2", "center": ["1", "0"], "basis": [["3", "0"], ["0", "3"]]}
            ],
        },
        Xp,
    )
    assert g.value_coords((Fraction(1), Fraction(3))) == ExactValue.from_cyclo(
        3, Fraction(1, 2)
    )
    prod = function_from_json(
        {"type": "product", "of": [f.to_json(), f.to_json()]}, X
    )
    assert abs(integrate(prod) - 2.0 ** (-1)) < 1e-12
