import numpy as np
import pytest

from eigenmp import zoo
from eigenmp.operators import (
    DimensionMismatch,
    OperatorError,
    check_degenerate_ellipticity,
    check_homogeneity,
    eval_jet,
    jet,
    shift,
)


def test_jet_validation():
    with pytest.raises(DimensionMismatch):
        jet([0.0, 0.0], 0.0, [1.0], np.zeros((2, 2)))
    with pytest.raises(OperatorError):
        jet([0.0, 0.0], 0.0, [1.0, 0.0], np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eval_linear_drift_example():
    # F[u] = -2xu' at (x=0.5, r=0, p=1, X=0): -2*0.5*1 = -1
    spec = zoo.get("neg_two_x_drift").spec
    assert eval_jet(spec, jet([0.5], 0.0, [1.0], [[0.0]])) == pytest.approx(-1.0)


def test_zero_jet_evaluates_to_zero_for_every_operator():
    # homogeneity at tau = 0 forces F(x, 0, 0, 0) = 0
    for name in zoo.names():
        spec = zoo.get(name).spec
        x = np.full(spec.dim, 0.3)
        assert eval_jet(spec, jet(x, 0.0, np.zeros(spec.dim), np.zeros((spec.dim,) * 2))) == 0.0


def test_pk1_on_negative_definite_hessian():
    spec = zoo.get("neg_pk_1").spec
    X = np.diag([-2.0, -2.0])
    val = eval_jet(spec, jet([0.0, 0.0], 0.0, [0.0, 0.0], X))
    # oracle: direct symmetric eigenvalues, largest is -2
    assert val == pytest.approx(-np.linalg.eigvalsh(X)[-1]) == pytest.approx(2.0)


def test_pk_full_sum_equals_negative_trace():
    spec = zoo.get("neg_pk_2").spec
    rng = np.random.default_rng(3)
    for _ in range(50):
        M = rng.normal(size=(2, 2))
        X = M + M.T
        j = jet(rng.normal(size=2), 0.0, rng.normal(size=2), X)
        assert eval_jet(spec, j) == pytest.approx(-np.trace(X), rel=1e-10, abs=1e-10)


def test_p_laplacian_expanded_form_against_divergence_oracle():
    spec = zoo.get("p_laplacian_3").spec
    # jet with u' = 2, u'' = 1: expanded value -(p-1)|u'|^{p-2} u'' = -4
    val = eval_jet(spec, jet([0.5], 0.0, [2.0], [[1.0]]))
    # oracle: finite difference of the divergence-form flux |u'|^{p-2}u'
    # along a function with u'(x0)=2, u''(x0)=1, e.g. u' = 2 + (x-x0)
    p, step = 3.0, 1e-6
    flux = lambda s: np.abs(s) ** (p - 2) * s
    oracle = -(flux(2.0 + step) - flux(2.0 - step)) / (2 * step)
    assert val == pytest.approx(oracle, rel=1e-6)
    assert val == pytest.approx(-4.0)


def test_inf_laplacian_singularity_envelopes():
    spec = zoo.get("inf_laplacian_2d").spec
    X = np.diag([3.0, -5.0])
    j = jet([0.0, 0.0], 0.0, [0.0, 0.0], X)
    assert eval_jet(spec, j, side="sub") == pytest.approx(-3.0)  # -eta_max
    assert eval_jet(spec, j, side="super") == pytest.approx(5.0)  # -eta_min
    # away from the singularity both sides agree
    j2 = jet([0.0, 0.0], 0.0, [1.0, 0.0], X)
    assert eval_jet(spec, j2, "sub") == eval_jet(spec, j2, "super") == pytest.approx(-3.0)


def test_shift_identity_and_pointwise_values():
    spec = zoo.get("neg_u_xx").spec
    assert eval_jet(shift(spec, 0.0), jet([0.5], 1.2, [0.3], [[0.7]])) == pytest.approx(
        eval_jet(spec, jet([0.5], 1.2, [0.3], [[0.7]]))
    )
    shifted = shift(spec, 1.0)
    # -u'' + u at (r=2, X=0): 0 + 1*2
    assert eval_jet(shifted, jet([0.5], 2.0, [0.0], [[0.0]])) == pytest.approx(2.0)
    # shifting a linear operator folds into c and keeps it linear
    assert shifted.kind == "linear"
    a, b, c = shifted.linear_part.matrices(np.array([[0.5]]))
    assert c[0] == pytest.approx(-1.0)


def test_shift_is_odd_in_r_for_fractional_alpha():
    spec = shift(zoo.get("inf_laplacian_1d").spec, 2.0)
    up = eval_jet(spec, jet([0.0], 1.5, [0.0], [[0.0]]), "sub")
    dn = eval_jet(spec, jet([0.0], -1.5, [0.0], [[0.0]]), "super")
    assert up == pytest.approx(-dn)


def test_dimension_mismatch_raises():
    spec = zoo.get("neg_u_xx").spec
    with pytest.raises(DimensionMismatch):
        eval_jet(spec, jet([0.0, 0.0], 0.0, [0.0, 0.0], np.zeros((2, 2))))


def test_ellipticity_sampler_accepts_laplacian_and_rejects_sign_flip():
    spec = zoo.get("neg_u_xx").spec
    rep = check_degenerate_ellipticity(spec, 10000, rng_seed=5)
    assert rep.ok
    flipped = zoo.get("neg_u_xx").spec.__class__(
        name="plus_laplacian",
        dim=1,
        alpha=1.0,
        kind="linear",
        evaluator=lambda j, side: float(j.X[0, 0]),
        scheme={"family": "linear"},
    )
    bad = check_degenerate_ellipticity(flipped, 200, rng_seed=5)
    assert not bad.ok and bad.max_violation > 0


def test_ellipticity_sampler_accepts_pucci():
    rep = check_degenerate_ellipticity(zoo.get("pucci_max_degenerate").spec, 3000, rng_seed=2)
    assert rep.ok


def test_homogeneity_sampler_linear_and_plap():
    assert check_homogeneity(zoo.get("neg_u_xx").spec, 3000, 1).max_relative_error < 1e-12
    assert check_homogeneity(zoo.get("p_laplacian_3").spec, 3000, 1).max_relative_error < 1e-10


def test_homogeneity_sampler_flags_wrong_alpha():
    from dataclasses import replace

    wrong = replace(zoo.get("eikonal").spec, alpha=2.0)
    rep = check_homogeneity(wrong, 500, 1)
    assert rep.max_relative_error > 1e-2


def test_linear_operators_additive_and_1_homogeneous():
    rng = np.random.default_rng(11)
    for name in ("neg_u_xx", "grushin", "half_x_drift_minus_u", "x_squared_absorption"):
        spec = zoo.get(name).spec
        d = spec.dim
        for _ in range(100):
            x = rng.uniform(-1, 1, size=d)
            r1, r2 = rng.normal(size=2)
            p1, p2 = rng.normal(size=(2, d))
            M1, M2 = rng.normal(size=(2, d, d))
            X1, X2 = M1 + M1.T, M2 + M2.T
            f1 = eval_jet(spec, jet(x, r1, p1, X1))
            f2 = eval_jet(spec, jet(x, r2, p2, X2))
            fsum = eval_jet(spec, jet(x, r1 + r2, p1 + p2, X1 + X2))
            scale = 1.0 + abs(f1) + abs(f2)
            assert abs(fsum - f1 - f2) <= 1e-10 * scale
            t = rng.uniform(0.1, 5.0)
            ft = eval_jet(spec, jet(x, t * r1, t * p1, t * X1))
            assert abs(ft - t * f1) <= 1e-10 * scale * t


def test_p_laplacian_vanishing_gradient_extension():
    spec = zoo.get("p_laplacian_3").spec
    assert eval_jet(spec, jet([0.5], 1.0, [0.0], [[7.0]])) == 0.0


def test_grushin_anisotropic_dilation_covariance():
    # under (x, y) -> (tx, t^2 y) the operator scales by t^2: check the
    # chain-rule identity F[u o theta_t](x) = t^2 F[u](theta_t x) on jets
    spec = zoo.get("grushin").spec
    rng = np.random.default_rng(9)
    for _ in range(100):
        t = rng.uniform(0.5, 2.0)
        x = rng.uniform(-1, 1, size=2)
        p = rng.normal(size=2)
        M = rng.normal(size=(2, 2))
        X = M + M.T
        J = np.diag([t, t**2])
        tx = np.array([t * x[0], t**2 * x[1]])
        JXJ = J @ X @ J
        lhs = eval_jet(spec, jet(x, 0.0, J @ p, 0.5 * (JXJ + JXJ.T)))
        rhs = t**2 * eval_jet(spec, jet(tx, 0.0, p, X))
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))
