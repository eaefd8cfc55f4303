from fractions import Fraction

import numpy as np
import pytest

from radonfourier import (
    Evaluable,
    GaussianForm,
    act_g_x,
    act_g_y,
    act_x_a,
    act_y_a,
    b_map,
    bbar_map,
    cartan_theta,
    fiber_param,
    integrate,
    kak,
    measure_scale,
    rho_weight,
    rho_weight_exponents,
    space_X,
    space_Xbar,
    unimodular_completion,
)
from radonfourier import exactlinalg as xl
from radonfourier.geometry import (
    base_point_x,
    base_point_y,
    embed_l,
    flatten_linear,
    in_unipotent,
    is_regular,
    mat_close,
    meye,
    mmul,
    n_element,
    nbar_element,
)
from radonfourier.sampling import rand_gl, rand_regular_point, rand_sl


def test_actions_basic(fr, f3):
    x = np.array([[1.0], [0.0]])
    assert np.allclose(act_g_x(np.eye(2), x, fr), x)
    assert np.allclose(act_x_a(x, np.array([[2.0]]), fr), np.array([[2.0], [0.0]]))
    y = np.array([[1.0, 0.0]])
    assert np.allclose(act_y_a(y, np.array([[2.0]]), fr), np.array([[0.5, 0.0]]))
    assert np.allclose(act_g_y(np.eye(2), y, fr), y)
    yp = xl.mat([[1, 0]])
    assert act_y_a(yp, xl.mat([[2]]), f3) == xl.mat([[Fraction(1, 2), 0]])


def test_action_laws_and_rank(rng, fr):
    n = 2
    X = space_X(n, fr)
    for _ in range(20):
        x = rand_regular_point(rng, X)
        a = rand_gl(rng, n, fr)
        b = rand_gl(rng, n, fr)
        assert np.allclose(act_x_a(act_x_a(x, a, fr), b, fr), act_x_a(x, a @ b, fr))
        assert is_regular(act_x_a(x, a, fr), fr)
        y = rand_regular_point(rng, space_Xbar(n, fr))
        assert np.allclose(
            act_y_a(act_y_a(y, a, fr), b, fr), act_y_a(y, a @ b, fr), atol=1e-9
        )


def test_b_map(rng, fr):
    n = 2
    assert np.allclose(b_map(np.eye(n + 1), n, fr), base_point_x(n, fr))
    for _ in range(100):
        g = rand_sl(rng, n + 1, fr)
        assert is_regular(b_map(g, n, fr), fr)
    # unipotent stabilizer: b(g m) = b(g) for m upper unipotent
    for _ in range(20):
        g = rand_sl(rng, n + 1, fr)
        m = n_element(rng.standard_normal(n), n, fr)
        assert np.allclose(b_map(g @ m, n, fr), b_map(g, n, fr))
        # and a generic right factor moves it
        h = rand_sl(rng, n + 1, fr)
        if not in_unipotent(h, n, fr):
            assert not np.allclose(b_map(g @ h, n, fr), b_map(g, n, fr))


def test_b_map_bijection_mod_unipotent(rng, fr):
    # b(g) = b(g') iff g^(-1) g' is upper unipotent
    n = 2
    for _ in range(40):
        g = rand_sl(rng, n + 1, fr)
        gp = rand_sl(rng, n + 1, fr)
        same = np.allclose(b_map(g, n, fr), b_map(gp, n, fr), atol=1e-9)
        member = in_unipotent(np.linalg.inv(g) @ gp, n, fr, tol=1e-7)
        assert same == member


def test_b_map_l_equivariance(rng, fr):
    n = 2
    for _ in range(20):
        g = rand_sl(rng, n + 1, fr)
        a = rand_gl(rng, n, fr)
        lhs = b_map(g @ embed_l(a, fr), n, fr)
        rhs = act_x_a(b_map(g, n, fr), a, fr)
        assert np.allclose(lhs, rhs, atol=1e-8)


def test_bbar_map(rng, fr):
    n = 2
    assert np.allclose(bbar_map(np.eye(n + 1), n, fr), base_point_y(n, fr))
    for _ in range(20):
        g = rand_sl(rng, n + 1, fr)
        m = nbar_element(rng.standard_normal(n), n, fr)
        assert np.allclose(bbar_map(g @ m, n, fr), bbar_map(g, n, fr), atol=1e-9)
        h = rand_sl(rng, n + 1, fr)
        # equivariance: bbar(h g) = bbar(g) h^(-1)
        assert np.allclose(
            bbar_map(h @ g, n, fr), bbar_map(g, n, fr) @ np.linalg.inv(h), atol=1e-8
        )


def test_unimodular_completion_examples(fr, f3):
    g = unimodular_completion(np.array([[1.0, 0.0]]), 1, fr)
    assert np.allclose(g, np.eye(2))
    gp = unimodular_completion(xl.mat([[Fraction(1, 3), 0]]), 1, f3)
    assert gp == xl.mat([[3, 0], [0, Fraction(1, 3)]])
    with pytest.raises(ValueError):
        unimodular_completion(xl.mat([[0, 0]]), 1, f3)


def test_unimodular_completion_random(rng, fr, f3):
    for _ in range(100):
        y = rand_regular_point(rng, space_Xbar(2, fr))
        g = unimodular_completion(y, 2, fr, rng=rng)
        assert abs(np.linalg.det(g) - 1) < 1e-9
        assert np.allclose(bbar_map(g, 2, fr), y, atol=1e-8)
    for _ in range(30):
        y = rand_regular_point(rng, space_Xbar(2, f3))
        g = unimodular_completion(y, 2, f3, rng=rng)
        assert xl.det(g) == 1
        assert bbar_map(g, 2, f3) == y


def test_fiber_param(rng, fr, f3):
    fib = fiber_param(np.array([[1.0, 0.0]]), 1, fr)
    assert np.allclose(fib.A, np.array([[1.0], [0.0]]))
    assert np.allclose(fib.c, np.array([[0.0], [1.0]]))
    fibp = fiber_param(xl.mat([[Fraction(1, 3), 0]]), 1, f3)
    assert fibp.A == ((Fraction(3),), (Fraction(0),))
    assert fibp.c == ((Fraction(0),), (Fraction(1, 3),))
    # postcondition y (A + c z) = I_n on random fibers
    for _ in range(20):
        n = 2
        y = rand_regular_point(rng, space_Xbar(n, fr))
        fib = fiber_param(y, n, fr)
        z = rng.standard_normal(n)
        pt = fib.point(z)
        assert np.allclose(np.asarray(y) @ pt, np.eye(n), atol=1e-8)


def test_kak(rng, fr, fc, f3):
    f = kak(np.diag([2.0, 0.5]), fr)
    assert np.allclose(sorted(f.diag, reverse=True), [2.0, 0.5])
    assert np.allclose(f.reconstruct(), np.diag([2.0, 0.5]), atol=1e-12)
    for fd in (fr, fc):
        for _ in range(50):
            a = rand_gl(rng, 2, fd)
            fac = kak(a, fd)
            assert np.allclose(fac.reconstruct(), a, atol=1e-10)
            assert fac.diag[0] >= fac.diag[1] > 0
    # p-adic: elementary divisors of diag(3, 1/3) are (3^-1, 3)
    fac = kak(xl.mat([[3, 0], [0, Fraction(1, 3)]]), f3)
    assert fac.diag == (Fraction(1, 3), Fraction(3))
    for _ in range(50):
        a = rand_gl(rng, 2, f3)
        fac = kak(a, f3)
        assert fac.reconstruct() == a
    with pytest.raises(ValueError):
        kak(xl.mat([[1, 1], [1, 1]]), f3)


def test_rho_weight(fr, fc, f3):
    # n = 1 degenerate: weight is identically 1
    for a in [0.3, 1.0, 7.2]:
        assert rho_weight((a,), 1, fr) == 1.0
    assert abs(rho_weight((2.0, 0.5), 2, fr) - 0.5) < 1e-14
    # complex absolute value doubles the exponent through the module
    assert abs(rho_weight((2.0, 0.5), 2, fc) - 0.25) < 1e-14
    # exact chain on log-exponents
    rho, mid, low = rho_weight_exponents([Fraction(2), Fraction(-1)], 2)
    assert rho == Fraction(-3, 2) and mid == Fraction(-3, 2) and low == Fraction(-9, 2)
    assert rho >= mid >= low


def test_rho_chain_random(rng):
    for _ in range(200):
        n = int(rng.integers(1, 5))
        es = sorted((Fraction(int(rng.integers(-12, 13)), 4) for _ in range(n)), reverse=True)
        rho, mid, low = rho_weight_exponents(es, n)
        assert rho >= mid >= low


def test_measure_scale(rng, fr, f3):
    assert measure_scale(np.eye(2), fr) == 1.0
    assert abs(measure_scale(np.array([[2.0]]), fr) - 0.25) < 1e-14
    assert measure_scale(xl.mat([[3]]), f3) == 9  # |3|_3 = 1/3 < 1 expands the measure
    # quadrature oracle: integral of f(x a) = measure_scale * integral of f
    n = 1
    X = space_X(n, fr)
    f = GaussianForm(X, np.array([[1.3, 0.2], [0.2, 0.9]]), kappa=1.1)
    for a in [np.array([[1.7]]), rand_gl(rng, 1, fr)]:
        M = flatten_linear(lambda x: mmul(x, a, fr), X, X)
        fa = Evaluable(X, lambda p, M=M: f.eval_coords(p @ M.T),
                       f.pullback_affine(M).envelope(), "f(xa)")
        lhs = integrate(fa)
        rhs = measure_scale(a, fr) * f.integral()
        assert abs(lhs - rhs) < 1e-8 * abs(rhs)


def test_cartan_theta(rng, fr, fc, f3):
    for fd in (fr, fc, f3):
        eye = meye(3, fd)
        assert mat_close(cartan_theta(eye, fd), eye, fd)
    for fd in (fr, fc):
        for _ in range(20):
            g = rand_sl(rng, 3, fd)
            assert np.allclose(cartan_theta(cartan_theta(g, fd), fd), g, atol=1e-8)
            assert np.allclose(cartan_theta(g, fd) @ np.conj(g).T, np.eye(3), atol=1e-8)
    # theta swaps the unipotent radical with its opposite
    u = n_element([1.5, -0.3], 2, fr)
    th = cartan_theta(u, fr)
    assert np.allclose(th, nbar_element([-1.5, 0.3], 2, fr))
    gp = rand_sl(rng, 3, f3)
    assert cartan_theta(cartan_theta(gp, f3), f3) == gp


def test_disintegration(rng, fr):
    # integral over X of f equals the a-integral of the slice transform
    from radonfourier.transforms import slice_family

    n = 1
    X = space_X(n, fr)
    f = GaussianForm(X, np.array([[1.4, -0.3], [-0.3, 0.8]]), kappa=0.7, ell=[0.2, 0.1])
    for _ in range(5):
        y = rand_regular_point(rng, space_Xbar(n, fr))
        fam = slice_family(f, y)
        assert abs(fam.integral() - f.integral()) < 1e-10
