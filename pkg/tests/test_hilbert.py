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
    act_g,
    act_module_X,
    act_module_X_phi,
    act_module_Xbar,
    hc_majorant,
    inner_X,
    inner_Xbar,
    space_X,
    space_Xbar,
    truncation_sequence,
)
from radonfourier import exactlinalg as xl
from radonfourier.hilbert import decay_bound_check, exact_le, hc_dominance_report
from radonfourier.sampling import (
    default_a_grid,
    rand_gaussian,
    rand_gl,
    rand_kak_sample,
    rand_sl,
)


def test_inner_X_closed_forms(fr, f3):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    ip = inner_X(f, f)
    for av in [0.25, 0.5, 1.0, 2.0, 5.0]:
        assert abs(ip(np.array([[av]])) - av / (1 + av * av)) < 1e-12
    assert ip(np.eye(1)).real > 0  # positivity at the identity
    Xp = space_X(1, f3)
    ball = SBFunction.standard_ball(Xp)
    ipp = inner_X(ball, ball)
    for k in range(-3, 4):
        a = xl.mat([[Fraction(3) ** k]])
        assert ipp(a) == ExactValue.from_cyclo(3, Fraction(3) ** (-abs(k)))


def test_inner_Xbar_mirror(fr, f3):
    Y = space_Xbar(1, fr)
    f = GaussianForm.standard(Y)
    ip = inner_Xbar(f, f)
    for av in [0.5, 1.0, 3.0]:
        assert abs(ip(np.array([[av]])) - av / (1 + av * av)) < 1e-12
    Yp = space_Xbar(1, f3)
    ball = SBFunction.standard_ball(Yp)
    ipp = inner_Xbar(ball, ball)
    for k in range(-2, 3):
        a = xl.mat([[Fraction(3) ** k]])
        assert ipp(a) == ExactValue.from_cyclo(3, Fraction(3) ** (-abs(k)))


def test_act_module_scalings(fr):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    fi = act_module_X(f, np.eye(1))
    assert np.allclose(fi.Q, f.Q) and abs(fi.kappa - f.kappa) < 1e-15
    fa = act_module_X(f, np.array([[2.0]]))
    assert abs(fa.kappa - 0.5) < 1e-15
    assert np.allclose(fa.Q, np.eye(2) / 4.0)
    # action law (f.a).b = f.(ab)
    a, b = np.array([[1.3]]), np.array([[0.6]])
    lhs = act_module_X(act_module_X(f, a), b)
    rhs = act_module_X(f, a @ b)
    assert np.allclose(lhs.Q, rhs.Q) and abs(lhs.kappa - rhs.kappa) < 1e-14
    # opposite side scaling
    Y = space_Xbar(1, fr)
    g = GaussianForm.standard(Y)
    ga = act_module_Xbar(g, np.array([[2.0]]))
    assert abs(ga.kappa - 2.0) < 1e-15
    assert np.allclose(ga.Q, 4.0 * np.eye(2))


def test_module_property_literal(rng, fr):
    # <f, h.a>_X(b) computed both ways
    X = space_X(1, fr)
    f = rand_gaussian(rng, X)
    h = rand_gaussian(rng, X)
    for _ in range(5):
        a = rand_gl(rng, 1, fr)
        b = rand_gl(rng, 1, fr)
        lhs = inner_X(f, act_module_X(h, a))(b)
        scale = float(np.abs(np.linalg.det(a))) ** (-1.0)  # |det a|^(-(n+1)/2), n = 1
        from radonfourier import translate_group

        rhs = scale * inner_X(f, translate_group(h, np.linalg.inv(a)))(b)
        assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(rhs))


def test_hermitian_symmetry(rng, fr, f3):
    X = space_X(1, fr)
    f = rand_gaussian(rng, X)
    h = rand_gaussian(rng, X)
    pf = inner_X(f, h)
    ph = inner_X(h, f)
    for _ in range(5):
        a = rand_gl(rng, 1, fr)
        assert abs(pf(a) - np.conj(ph(np.linalg.inv(a)))) < 1e-10
    Xp = space_X(1, f3)
    from radonfourier.sampling import rand_sb_function

    fp = rand_sb_function(rng, Xp)
    hp = rand_sb_function(rng, Xp)
    pfp = inner_X(fp, hp)
    php = inner_X(hp, fp)
    for k in range(-2, 3):
        a = xl.mat([[Fraction(3) ** k]])
        ai = xl.mat([[Fraction(3) ** (-k)]])
        assert pfp(a) == php(ai).conjugate()


def test_g_invariance(rng, fr):
    X = space_X(1, fr)
    f = rand_gaussian(rng, X)
    h = rand_gaussian(rng, X)
    base = inner_X(f, h)
    for _ in range(3):
        g = rand_sl(rng, 2, fr)
        moved = inner_X(act_g(f, g, "x"), act_g(h, g, "x"))
        for a in [np.array([[0.7]]), np.array([[1.9]])]:
            assert abs(base(a) - moved(a)) < 1e-9 * max(1.0, abs(base(a)))


def test_act_g_laws(rng, fr):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    assert np.allclose(act_g(f, np.eye(2), "x").Q, f.Q)
    g1 = rand_sl(rng, 2, fr)
    g2 = rand_sl(rng, 2, fr)
    lhs = act_g(f, g1 @ g2, "x")
    rhs = act_g(act_g(f, g2, "x"), g1, "x")
    assert np.allclose(lhs.Q, rhs.Q, atol=1e-10)


def test_act_module_X_phi_arch(fr):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    # approximate identity concentrated at 1
    eps = 0.01
    mass = 1.0 / (2 * eps)

    def bump(pts):
        return np.where(np.abs(pts[:, 0] - 1.0) <= eps, mass, 0.0).astype(complex)

    phi = Evaluable(
        __import__("radonfourier").space_L(1, fr), bump,
        Envelope(C=mass, radius=1.2), "approx-id",
    )
    ff = act_module_X_phi(f, phi, support=([1 - eps], [1 + eps]))
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.4, -0.8]])
    assert np.max(np.abs(ff.eval_coords(pts) - f.eval_coords(pts))) < 2e-3
    # point-mass smear at a0 approximates the module action times the mass
    a0 = 2.0

    def bump2(pts):
        return np.where(np.abs(pts[:, 0] - a0) <= eps, mass, 0.0).astype(complex)

    phi2 = Evaluable(
        __import__("radonfourier").space_L(1, fr), bump2,
        Envelope(C=mass, radius=a0 + 1), "smear",
    )
    ff2 = act_module_X_phi(f, phi2, support=([a0 - eps], [a0 + eps]))
    fa = act_module_X(f, np.array([[a0]]))
    haar_mass = 1.0 / a0  # multiplicative measure of the smeared point mass
    assert np.max(np.abs(ff2.eval_coords(pts) - haar_mass * fa.eval_coords(pts))) < 2e-3
    # linearity in phi: smooth weights on a common support box
    Lsp = __import__("radonfourier").space_L(1, fr)
    box = ([0.5], [2.5])
    w1 = Evaluable(
        Lsp, lambda p: ((p[:, 0] - 0.5) * (2.5 - p[:, 0])).astype(complex),
        Envelope(C=1.0, radius=2.5), "w1",
    )
    w2 = Evaluable(
        Lsp, lambda p: np.cos(p[:, 0]).astype(complex),
        Envelope(C=1.0, radius=2.5), "w2",
    )
    wsum = Evaluable(
        Lsp, lambda p: w1.fn(p) + w2.fn(p), Envelope(C=2.0, radius=2.5), "w1+w2"
    )
    g1 = act_module_X_phi(f, w1, support=box)
    g2 = act_module_X_phi(f, w2, support=box)
    gb = act_module_X_phi(f, wsum, support=box)
    assert np.max(
        np.abs(gb.eval_coords(pts) - g1.eval_coords(pts) - g2.eval_coords(pts))
    ) < 1e-10
    with pytest.raises(ValueError):
        act_module_X_phi(f, phi, support=None)


def test_act_module_X_phi_padic(f3):
    # normalized indicator of 1 + p M_n(Z_p) is an exact unit on locally
    # constant inputs at matching granularity
    Xp = space_X(1, f3)
    ball = SBFunction.standard_ball(Xp)
    Lsp = __import__("radonfourier").space_L(1, f3)
    phi_coset = Coset(Lattice.scaled_standard(3, 1, 1), (Fraction(1),))
    phi = SBFunction(Xp and Lsp, [(Fraction(3), phi_coset)])  # mass 1/vol = 3
    ff = act_module_X_phi(ball, phi)
    for x in [xl.mat([[1], [0]]), xl.mat([[1], [3]]), xl.mat([[Fraction(1, 3)], [1]])]:
        assert ff.value(x) == ball.value(x)


def test_decay_bound_gaussian(rng, fr):
    X = space_X(2, fr)
    f = GaussianForm.standard(X)
    samples = [rand_kak_sample(rng, 2, fr) for _ in range(100)]
    rep = decay_bound_check(f, samples)
    assert rep["pass"] and abs(rep["C"] - 1.0) < 1e-12
    # n = 1 closed form: |a|/(1+a^2) <= min(|a|, 1/|a|)
    X1 = space_X(1, fr)
    f1 = GaussianForm.standard(X1)
    ip = inner_X(f1, f1)
    for av in [0.1, 0.5, 1.0, 2.0, 10.0]:
        assert abs(ip(np.array([[av]]))) <= min(av, 1 / av) + 1e-12


def test_decay_bound_padic_equality(rng, f3):
    Xp = space_X(1, f3)
    ball = SBFunction.standard_ball(Xp)
    samples = [rand_kak_sample(rng, 1, f3) for _ in range(50)]
    rep = decay_bound_check(ball, samples)
    assert rep["pass"]
    # the bound is attained: value equals min(|a|,|a|^-1)^((n+1)/2) with C = 1
    ip = inner_X(ball, ball)
    for k1, diag, k2 in samples[:10]:
        D = ((diag[0],),)
        a = xl.matmul(xl.matmul(k1, D), k2)
        v = __import__("radonfourier").padic_valuation(diag[0], 3)
        assert ip(a) == ExactValue.from_cyclo(3, Fraction(3) ** (-abs(v)))


def test_decay_bound_requires_product_structure(rng, fr):
    X = space_X(2, fr)
    g = rand_gaussian(rng, X)  # generic Q does not split across columns
    with pytest.raises(ValueError):
        decay_bound_check(g, [rand_kak_sample(rng, 2, fr)])


def test_exact_le():
    a = ExactValue(3, Fraction(1, 2), Fraction(1))
    b = ExactValue(3, 0, Fraction(2))
    assert exact_le(a, b)  # sqrt(3) <= 2
    assert not exact_le(b, a)


def test_hc_majorant(fr):
    assert abs(hc_majorant((1.0, 1.0), 4.0, 2.5, 2, fr) - 2.5) < 1e-14


def test_hc_dominance(rng, fr):
    X = space_X(2, fr)
    f = GaussianForm.standard(X)
    grids = [
        [rand_kak_sample(rng, 2, fr, spread=3.0) for _ in range(60)],
        [rand_kak_sample(rng, 2, fr, spread=3.0) for _ in range(120)],
    ]
    rep = hc_dominance_report(f, 4.0, grids)
    assert rep["pass"], rep


def test_truncation_bump_vanishes(fr):
    # a function supported on the cutoff plateau has phi_m = 0 from that m on
    X = space_X(1, fr)
    center = np.array([1.5, 0.0])

    def bump(pts):
        r = np.linalg.norm(pts - center[None, :], axis=1)
        out = np.zeros(len(pts), dtype=complex)
        mask = r < 0.4
        out[mask] = np.exp(-1.0 / (1 - (r[mask] / 0.4) ** 2))
        return out

    f = Evaluable(X, bump, Envelope(C=1.0, radius=2.0), "bump")
    from radonfourier import cutoff_chi

    for m in (3, 5):
        chi = cutoff_chi(m, X)
        diff_at = lambda pts: f.eval_coords(pts) * (1 - chi.eval_coords(pts))
        pts = np.random.default_rng(0).standard_normal((2000, 2)) * 2
        assert np.max(np.abs(diff_at(pts))) == 0.0


def test_truncation_sequence_decreases(fr):
    X = space_X(1, fr)
    f = GaussianForm.standard(X)
    grid = [float(a[0][0]) for a in default_a_grid(1, fr)]
    rep = truncation_sequence(f, 6, grid)
    assert rep["monotone"]
    sups = rep["sup_values"]
    assert sups[-1] < sups[0]
    # phi_m(1) is the squared L2 distance and it shrinks
    assert rep["per_m"][-1]["sup"] < 0.01
