import numpy as np
import pytest

from eigenmp import zoo
from eigenmp.domains import Field, build_grid, field_from_function, interval
from eigenmp.operators import OperatorError
from eigenmp.scheme import DiscreteScheme, is_subsolution, is_supersolution, monotonicity_check, residual


def _scheme(name, h, dom=None, **kw):
    e = zoo.get(name)
    return DiscreteScheme(e.spec, build_grid(dom or e.domain_default, h), **kw)


def test_residual_exact_on_quadratic_for_second_difference():
    sch = _scheme("neg_u_xx", 0.01)
    u = field_from_function(sch.grid, lambda p: p[:, 0] * (1 - p[:, 0]))
    r = residual(sch, u)
    inter = sch.grid.interior_mask()
    assert np.all(np.abs(r.pde[inter] - 2.0) < 1e-9)


def test_residual_upwind_first_order_accuracy():
    # F = (x/2)u' - u on x(1-x): exact value -x/2, one-sided error O(h)
    errs = []
    for h in (1e-2, 5e-3):
        sch = _scheme("half_x_drift_minus_u", h)
        u = field_from_function(sch.grid, lambda p: p[:, 0] * (1 - p[:, 0]))
        r = residual(sch, u)
        inter = sch.grid.interior_mask()
        xs = sch.grid.coords()[inter, 0]
        errs.append(np.max(np.abs(r.pde[inter] - (-xs / 2))))
    assert errs[0] < 0.02
    assert errs[1] < 0.7 * errs[0]  # shrinks with h


def test_residual_of_constant_under_pure_drift_is_zero():
    sch = _scheme("neg_two_x_drift", 0.01)
    u = Field(sch.grid, np.ones(sch.grid.size))
    r = residual(sch, u)
    inter = sch.grid.interior_mask()
    assert np.all(np.abs(r.pde[inter]) < 1e-12)
    # the degenerate endpoint x=0 carries no drift penalty: residual 0 there
    band = sch.grid.band_mask()
    xs = sch.grid.coords()[:, 0]
    left = band & (np.abs(xs) < 1e-12)
    assert np.all(np.abs(r.pde[left]) < 1e-12)


def test_indicator_at_degenerate_endpoint_is_a_subsolution():
    sch = _scheme("neg_two_x_drift", 1 / 200)
    xs = sch.grid.coords()[:, 0]
    vals = np.where(np.abs(xs) < 1e-12, 1.0, 0.0)
    v = is_subsolution(sch, Field(sch.grid, vals), sch.default_tolerance())
    assert v.ok
    # under the literal strict-max boundary clause the same field fails
    strict = _scheme("neg_two_x_drift", 1 / 200, boundary_clause="strict-max")
    v2 = is_subsolution(strict, Field(strict.grid, vals), strict.default_tolerance())
    assert not v2.ok


def test_parabola_subsolution_for_drift_absorption():
    sch = _scheme("half_x_drift_minus_u", 1 / 200)
    u = field_from_function(sch.grid, lambda p: np.where(sch.grid.d >= 0, p[:, 0] * (1 - p[:, 0]), 0.0))
    assert is_subsolution(sch, u, 10 * sch.grid.h).ok


def test_positive_constant_fails_via_exterior_pin():
    sch = _scheme("neg_u_xx", 0.01)
    u = Field(sch.grid, np.ones(sch.grid.size))
    v = is_subsolution(sch, u, sch.default_tolerance())
    assert not v.ok
    assert sch.grid.node_class[v.worst_node] != 0  # flagged outside the interior


def test_supersolution_sine_threshold():
    sch = _scheme("neg_u_xx", 0.01)
    phi = field_from_function(sch.grid, lambda p: np.sin(np.pi * p[:, 0]) + 0.05)
    tol = sch.default_tolerance()
    assert is_supersolution(sch, phi, 5.0, tol).ok
    assert not is_supersolution(sch, phi, 8.0, tol).ok


def test_supersolution_sqrt_certificates_on_grid():
    sch = _scheme("neg_sqrt_x_drift", 0.01)
    phi = field_from_function(sch.grid, lambda p: 2 - np.sqrt(np.clip(p[:, 0], 0, None)))
    tol = sch.default_tolerance()
    assert is_supersolution(sch, phi, 0.25, tol).ok
    assert not is_supersolution(sch, phi, 0.5, tol).ok
    sch2 = _scheme("neg_x_u_xx", 0.01)
    phi2 = field_from_function(sch2.grid, lambda p: 1 + np.sqrt(np.clip(p[:, 0], 0, None)))
    assert is_supersolution(sch2, phi2, 0.125, sch2.default_tolerance()).ok


def test_supersolution_requires_positivity():
    sch = _scheme("neg_u_xx", 0.05)
    phi = field_from_function(sch.grid, lambda p: p[:, 0] - 0.5)
    with pytest.raises(OperatorError):
        is_supersolution(sch, phi, 0.0, 0.1)


def test_viscous_term_adds_laplacian():
    e = zoo.get("neg_two_x_drift")
    g = build_grid(interval(0, 1), 0.01)
    plain = DiscreteScheme(e.spec, g)
    visc = DiscreteScheme(e.spec, g, viscous_eps=0.5)
    u = field_from_function(g, lambda p: p[:, 0] * (1 - p[:, 0]))
    inter = g.interior_mask()
    gap = residual(visc, u).pde[inter] - residual(plain, u).pde[inter]
    assert np.allclose(gap, 0.5 * 2.0, atol=1e-9)  # -eps * (u'' = -2)


@pytest.mark.parametrize("name", zoo.names())
def test_scheme_monotonicity_randomized(name):
    e = zoo.get(name)
    h = e.domain_default.inradius / 8
    sch = DiscreteScheme(e.spec, build_grid(e.domain_default, h))
    rep = monotonicity_check(sch, trials=150, rng_seed=42)
    assert rep["violations"] == 0, rep


def test_monotonicity_check_catches_a_broken_scheme():
    # flipping the drift upwinding direction breaks monotonicity
    sch = _scheme("neg_two_x_drift", 1 / 50)
    cp = sch.compiled()
    cp.W[:] = -cp.W  # sabotage: negative neighbor weights
    rep = monotonicity_check(sch, trials=50, rng_seed=0)
    assert rep["violations"] > 0


def test_default_tolerance_scales_with_h_and_coefficients():
    t1 = _scheme("neg_u_xx", 0.01).default_tolerance()
    t2 = _scheme("neg_u_xx", 0.005).default_tolerance()
    assert t1 == pytest.approx(2 * t2)
    assert _scheme("neg_two_x_drift", 0.01).default_tolerance() > t1


def test_dimension_mismatch_between_operator_and_grid():
    e = zoo.get("neg_laplace_2d")
    with pytest.raises(OperatorError):
        DiscreteScheme(e.spec, build_grid(interval(0, 1), 0.01))
