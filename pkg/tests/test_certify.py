import numpy as np
import pytest

from eigenmp import certify, zoo
from eigenmp.domains import Domain, disk, interval
from eigenmp.operators import OperatorError


def _families():
    return [
        certify.power(4, interval(0, 1)),
        certify.two_minus_sqrt(interval(0, 1)),
        certify.one_plus_sqrt(interval(0, 1)),
        certify.paraboloid(2.0, disk(0, 0, 1.2)),
        certify.exp_tilt(0.1, 1.5, [1.0, 0.0], Domain("rectangle", (-1.3, 1.3, -0.3, 1.3))),
        certify.constant(1.0, interval(0, 1)),
    ]


@pytest.mark.parametrize("cert", _families(), ids=lambda c: c.family)
def test_analytic_derivatives_match_finite_differences(cert):
    rng = np.random.default_rng(7)
    lo, hi = cert.declared_region.bounding_box
    pts = rng.uniform(lo + 0.1, hi - 0.1, size=(100, cert.dim))
    step = 1e-5
    grad = cert.grad(pts)
    hess = cert.hess(pts)
    for k in range(cert.dim):
        ek = np.zeros(cert.dim)
        ek[k] = step
        fd_grad = (cert.value(pts + ek) - cert.value(pts - ek)) / (2 * step)
        assert np.allclose(grad[:, k], fd_grad, rtol=1e-6, atol=1e-6)
        fd_hcol = (cert.grad(pts + ek) - cert.grad(pts - ek)) / (2 * step)
        assert np.allclose(hess[:, :, k], fd_hcol, rtol=1e-5, atol=1e-5)


def test_two_minus_sqrt_bounds_quarter():
    e = zoo.get("neg_sqrt_x_drift")
    cert = certify.two_minus_sqrt(interval(0, 1))
    rep = certify.verify(cert, e.spec, interval(0, 1), 0.25, 10000)
    assert rep.ok and rep.classification == "bounds-lambda-bar1"
    # margin = sqrt(x)/4 at the sampled points; min over the sample set ~ 0+
    assert 0 <= rep.margin < 1e-3
    best = certify.best_lambda(cert, e.spec, interval(0, 1), 10000)
    assert best == pytest.approx(0.25, abs=1e-6)
    # tight: verifying just below the best lambda passes
    assert certify.verify(cert, e.spec, interval(0, 1), best - 1e-6, 10000).ok


def test_one_plus_sqrt_bounds_eighth():
    e = zoo.get("neg_x_u_xx")
    cert = certify.one_plus_sqrt(interval(0, 1))
    rep = certify.verify(cert, e.spec, interval(0, 1), 0.125, 10000)
    assert rep.ok and rep.classification == "bounds-lambda-bar1"


def test_power_certificate_classification_and_exact_rate():
    e = zoo.get("half_x_drift_minus_u")
    for n in (4, 22):
        cert = certify.power(n, interval(0, 1))
        best = certify.best_lambda(cert, e.spec, interval(0, 1), 10000)
        # F[x^n] = (n/2 - 1) x^n exactly, so the ratio is constant
        assert best == pytest.approx(n / 2 - 1, abs=1e-9)
        rep = certify.verify(cert, e.spec, interval(0, 1), best - 1e-6, 10000)
        assert rep.ok and rep.classification == "bounds-lambda1"  # inf phi = 0


def test_paraboloid_mu1_classification():
    spec = zoo.get("neg_pk_2").spec
    cert = certify.paraboloid(2.0, disk(0, 0, 1.2))
    rep = certify.verify(cert, spec, disk(0, 0, 1.0), 0.5, 10000)
    # F[phi] = 4 (both Hessian eigenvalues -2), phi <= 2: margin >= 3,
    # attained at the center (the sample lattice lands nearby)
    assert rep.ok and 3.0 - 1e-9 <= rep.margin <= 3.001
    assert rep.classification == "bounds-mu1"
    # without a strictly containing declared region, only lambda-bar-1
    rep2 = certify.verify(
        certify.paraboloid(2.0, disk(0, 0, 1.0)), spec, disk(0, 0, 1.0), 0.5, 10000
    )
    assert rep2.classification == "bounds-lambda-bar1"


def test_constant_certificate_best_lambda():
    spec = zoo.get("neg_u_xx_plus_u").spec
    cert = certify.constant(1.0, interval(0, 1))
    assert certify.best_lambda(cert, spec, interval(0, 1), 1000) == pytest.approx(1.0)


def test_best_lambda_matches_bisection_oracle():
    e = zoo.get("neg_sqrt_x_drift")
    cert = certify.two_minus_sqrt(interval(0, 1))
    best = certify.best_lambda(cert, e.spec, interval(0, 1), 2000)
    lo, hi = 0.0, 2.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if certify.verify(cert, e.spec, interval(0, 1), mid, 2000).ok:
            lo = mid
        else:
            hi = mid
    assert best == pytest.approx(lo, abs=1e-9)


def test_scaling_leaves_verdict_invariant():
    e = zoo.get("neg_sqrt_x_drift")
    cert = certify.two_minus_sqrt(interval(0, 1))
    base = certify.verify(cert, e.spec, interval(0, 1), 0.2, 1000)
    for t in (0.1, 10.0):
        scaled = certify.verify(cert.scaled(t), e.spec, interval(0, 1), 0.2, 1000)
        assert scaled.ok == base.ok
        assert scaled.margin == pytest.approx(t * base.margin, rel=1e-9)


def test_best_lambda_antitone_under_domain_enlargement():
    spec = zoo.get("neg_x_u_xx").spec
    cert = certify.one_plus_sqrt(interval(0, 1))
    small = certify.best_lambda(cert, spec, interval(0, 0.5), 2000)
    large = certify.best_lambda(cert, spec, interval(0, 1), 2000)
    assert large < small


def test_certificate_bound_never_exceeds_solver_estimate():
    from eigenmp.eigen import mu1_estimate

    g = zoo.get("grushin")
    declared = Domain("rectangle", (-1.3, 1.3, -0.3, 1.3))
    cert = certify.exp_tilt(0.1, 1.0, [1.0, 0.0], declared)
    best = certify.best_lambda(cert, g.spec, g.domain_default, 2000)
    est = mu1_estimate(g.spec, g.domain_default, 1 / 24, [0.2, 0.1], tol=0.05)
    width = est.bracket[1] - est.bracket[0]
    assert best <= est.value + width + 10 * (1 / 24)


def test_nonpositive_certificate_rejected():
    spec = zoo.get("neg_u_xx").spec
    cert = certify.constant(-1.0, interval(0, 1))
    with pytest.raises(OperatorError):
        certify.verify(cert, spec, interval(0, 1), 0.0, 1000)


def test_sample_count_floor():
    spec = zoo.get("neg_u_xx").spec
    with pytest.raises(OperatorError):
        certify.verify(certify.constant(1.0, interval(0, 1)), spec, interval(0, 1), 0.0, 10)
