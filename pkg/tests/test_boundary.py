import numpy as np
import pytest

from eigenmp import zoo
from eigenmp.boundary import (
    boundary_samples,
    equivalence_advisory,
    fichera_classify,
    log_barrier_sweep,
    verify_log_barrier,
)
from eigenmp.config import build_operator
from eigenmp.domains import disk, interval, rectangle
from eigenmp.operators import OperatorError


def _statuses(name, dom=None):
    e = zoo.get(name)
    rep = fichera_classify(e.spec, dom or interval(0, 1))
    return {tuple(np.round(s["point"], 9)): s["status"] for s in rep.samples}, rep


def test_fichera_hand_table_for_drift_examples():
    got, rep = _statuses("neg_two_x_drift")
    assert got[(0.0,)] == "violated" and got[(1.0,)] == "satisfied"
    drift = {s["point"][0]: s["drift"] for s in rep.samples}
    assert drift[0.0] == pytest.approx(0.0) and drift[1.0] == pytest.approx(-2.0)
    got2, _ = _statuses("neg_x_drift")
    assert got2[(0.0,)] == "violated" and got2[(1.0,)] == "satisfied"


def test_fichera_uniformly_elliptic_satisfied_everywhere():
    got, rep = _statuses("neg_u_xx")
    assert set(got.values()) == {"satisfied"}
    assert all(s["dAd"] == pytest.approx(1.0) for s in rep.samples)
    assert [v for _, v in rep.components] == ["all-satisfied", "all-satisfied"]


def test_dad_is_never_negative_for_catalog_operators():
    for name in ("neg_u_xx", "grushin", "neg_x_u_xx", "neg_two_x_drift"):
        e = zoo.get(name)
        rep = fichera_classify(e.spec, e.domain_default if e.spec.dim == 2 else interval(0, 1))
        assert all(s["dAd"] >= -1e-10 for s in rep.samples)


def test_fichera_invariant_under_positive_scaling():
    base = {"operator": "linear", "domain": "interval 0 1", "b1": "x", "c": "0"}
    spec1, dom = build_operator(base)
    spec3, _ = build_operator({**base, "b1": "3*x"})
    r1 = fichera_classify(spec1, dom)
    r3 = fichera_classify(spec3, dom)
    assert [s["status"] for s in r1.samples] == [s["status"] for s in r3.samples]


def test_fichera_rejects_nonlinear_operators():
    with pytest.raises(OperatorError):
        fichera_classify(zoo.get("neg_pk_1").spec, disk(0, 0, 1))


def test_degenerate_edge_classification_on_square():
    # A = diag(1, y) on the unit square: the bottom edge has dAd = y = 0 and
    # zero drift (violated); the other edges see diffusion (satisfied)
    spec, dom = build_operator(
        {"operator": "linear", "domain": "rectangle 0 1 0 1", "a1": "1", "a2": "y"}
    )
    rep = fichera_classify(spec, dom)
    verdicts = dict(rep.components)
    assert verdicts[0] == "all-violated"  # bottom edge
    assert verdicts[1] == verdicts[2] == verdicts[3] == "all-satisfied"
    assert equivalence_advisory(rep) == "mu1-equals-lambda-bar"


def test_mixed_component_gives_inconclusive_advisory():
    # drift b2 = 0.5 - x changes sign along the degenerate bottom edge
    spec, dom = build_operator(
        {"operator": "linear", "domain": "rectangle 0 1 0 1", "a1": "1", "a2": "y",
         "b2": "0.5 - x"}
    )
    rep = fichera_classify(spec, dom)
    assert dict(rep.components)[0] == "mixed"
    assert equivalence_advisory(rep) == "inconclusive"


def test_disk_boundary_geometry():
    samples = boundary_samples(disk(0, 0, 2), 16)
    for s in samples:
        assert np.linalg.norm(s.point) == pytest.approx(2.0)
        assert s.dd @ s.point == pytest.approx(-2.0)  # inward normal
        # curvature Hessian: eigenvalues {0, -1/R}
        eig = np.sort(np.linalg.eigvalsh(s.d2d))
        assert eig[0] == pytest.approx(-0.5) and eig[1] == pytest.approx(0.0, abs=1e-12)


def test_log_barrier_closed_form_for_laplacian():
    e = zoo.get("neg_u_xx")
    delta, band = 0.1, 0.1
    rep = verify_log_barrier(e.spec, interval(0, 1), [0.0], delta, band)
    assert rep.verified
    # F[w] = 1/(delta + x)^2, minimized at the far side of the band
    assert rep.min_residual == pytest.approx(1.0 / (delta + band) ** 2, rel=1e-6)
    assert rep.rescale == pytest.approx((delta + band) ** 2, rel=1e-6)


def test_log_barrier_for_drift_at_felt_endpoint():
    e = zoo.get("neg_two_x_drift")
    rep = verify_log_barrier(e.spec, interval(0, 1), [1.0], 0.1, 0.1)
    assert rep.verified
    # F[w] = 2x/(delta + 1 - x) on the band
    assert rep.min_residual >= 2 * 0.9 / (0.1 + 0.1) - 1e-6


def test_log_barrier_precondition_fails_at_violated_endpoint():
    e = zoo.get("neg_two_x_drift")
    with pytest.raises(OperatorError):
        verify_log_barrier(e.spec, interval(0, 1), [0.0], 0.1, 0.1)


def test_log_barrier_sweep_returns_first_verified_delta():
    e = zoo.get("neg_u_xx")
    rep = log_barrier_sweep(e.spec, interval(0, 1), [1.0], band=0.1)
    assert rep.verified and rep.delta in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


def test_barrier_on_disk_boundary():
    spec, dom = build_operator(
        {"operator": "linear", "domain": "disk 0 0 1", "a1": "1", "a2": "1"}
    )
    rep = log_barrier_sweep(spec, dom, [1.0, 0.0], band=0.2)
    assert rep.verified


def test_equivalence_advisory_for_interval_components():
    _, rep = _statuses("neg_two_x_drift")
    assert equivalence_advisory(rep) == "mu1-equals-lambda-bar"
