import numpy as np
import pytest

from eigenmp import kernels, zoo
from eigenmp.domains import Field, build_grid, field_from_function
from eigenmp.mp import mp_test, witness_check
from eigenmp.operators import OperatorError
from eigenmp.scheme import DiscreteScheme


def _scheme(name, h, dom=None, **kw):
    e = zoo.get(name)
    return DiscreteScheme(e.spec, build_grid(dom or e.domain_default, h), **kw)


def test_mp_holds_under_standard_sufficient_condition():
    # min F(x, 1, 0, 0) = 1 > 0
    v = mp_test(_scheme("neg_u_xx_plus_u", 1 / 100))
    assert v.holds and v.witness is None
    assert v.max_positive_part <= 10 * 1e-3


def test_mp_fails_with_parabola_dominating_witness():
    sch = _scheme("half_x_drift_minus_u", 1 / 400)
    v = mp_test(sch, cap=1.0)
    assert not v.holds
    w = v.witness.values
    xs = sch.grid.coords()[:, 0]
    scaled = np.where(sch.grid.d >= 0, xs * (1 - xs) / 0.25, 0.0)
    assert np.all(w >= 0.9 * scaled - 1e-9)
    assert witness_check(sch, v.witness, sch.default_tolerance())["ok"]


def test_mp_fails_with_indicator_witness_at_degenerate_endpoint():
    sch = _scheme("neg_two_x_drift", 1 / 400)
    v = mp_test(sch)
    assert not v.holds
    w = v.witness.values
    xs = sch.grid.coords()[:, 0]
    i0 = int(np.argmin(np.abs(xs)))
    assert w[i0] > 0.9
    assert float(np.delete(w, i0).max()) < 1e-9


def test_mp_holds_for_grushin():
    assert mp_test(_scheme("grushin", 1 / 20)).holds


def test_mp_descent_is_monotone_nonincreasing():
    sch = _scheme("neg_u_xx", 1 / 50)
    cp = sch.compiled()
    backend = kernels.backend()
    u = cp.state()
    u[cp.free] = 1.0
    prev = u[cp.free].copy()
    for _ in range(30):
        new = backend.descent_sweep(cp, u, 0.0)
        assert np.all(new <= prev + 1e-14)
        u[cp.free] = new
        prev = new


@pytest.mark.parametrize(
    "name,h",
    [
        ("neg_u_xx", 1 / 100),
        ("neg_u_xx_plus_u", 1 / 100),
        ("half_x_drift_minus_u", 1 / 200),
        ("neg_two_x_drift", 1 / 200),
        ("eikonal_coercive", 1 / 100),
        ("grushin", 1 / 16),
    ],
)
def test_mp_verdict_is_cap_invariant(name, h):
    sch = _scheme(name, h)
    assert mp_test(sch, cap=1.0).holds == mp_test(sch, cap=7.0).holds


def test_witness_check_examples():
    sch = _scheme("half_x_drift_minus_u", 1 / 200)
    u = field_from_function(
        sch.grid, lambda p: np.where(sch.grid.d >= 0, p[:, 0] * (1 - p[:, 0]), 0.0)
    )
    assert witness_check(sch, u, sch.default_tolerance())["ok"]
    # no positive part: not a violation witness even when it subsolves
    sch2 = _scheme("neg_u_xx", 1 / 100)
    neg = Field(sch2.grid, -np.ones(sch2.grid.size))
    rep = witness_check(sch2, neg, sch2.default_tolerance())
    assert not rep["ok"] and rep["is_subsolution"] and rep["max_value"] < 0


def test_mp_rejects_nonpositive_cap():
    with pytest.raises(OperatorError):
        mp_test(_scheme("neg_u_xx", 1 / 50), cap=0.0)


def test_witness_vanishes_at_barrier_verified_endpoint():
    # MP fails for -2xu' with the violation at x=0; at the felt endpoint
    # x=1 (where the log barrier verifies) every subsolution is <= 0
    sch = _scheme("neg_two_x_drift", 1 / 200)
    v = mp_test(sch)
    xs = sch.grid.coords()[:, 0]
    right = int(np.argmin(np.abs(xs - 1.0)))
    assert v.witness.values[right] <= 1e-9


def test_hessian_max_consistency_on_square_and_disk():
    # mp and the mu1 bracket must agree on both shapes (they do hold: the
    # subsolution class obeys the maximum principle on any domain here)
    from eigenmp.domains import disk, rectangle
    from eigenmp.eigen import mu1_estimate

    e = zoo.get("neg_pk_1")
    for dom in (rectangle(0, 1, 0, 1), disk(0, 0, 1)):
        v = mp_test(DiscreteScheme(e.spec, build_grid(dom, 1 / 24)), max_sweeps=50000)
        m = mu1_estimate(e.spec, dom, 1 / 24, [0.2, 0.1], lambda_cap=10.0, tol=0.1)
        assert v.holds and m.bracket[0] > 0, (dom.shape, v.holds, m.bracket)
