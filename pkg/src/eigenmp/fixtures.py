"""Reproduction suite: every counterexample and certificate of the fixture
catalog, each reduced to a pass/fail row at a pinned tolerance.

Row verdicts: ``pass``/``fail`` for asserted claims, ``boundary case`` for
knife-edge eigenvalues whose bracket straddles zero (sign determination at 0
exceeds fixed-precision schemes), and ``recorded, not asserted`` for catalog
facts flagged unverified.
"""

from __future__ import annotations

import logging

import numpy as np

from . import certify, zoo
from .boundary import equivalence_advisory, fichera_classify, log_barrier_sweep
from .domains import Domain, Field, build_grid, interval
from .eigen import blowup_eigenvalue, lambda_star_estimate, mu1_estimate, viscous_eigenvalue
from .mp import mp_test, witness_check
from .operators import shift
from .scheme import DiscreteScheme

PI2 = float(np.pi**2)
log = logging.getLogger("eigenmp.fixtures")


def _row(name, claim, computed, verdict):
    return {"type": "fixture", "name": name, "claim": claim, "computed": computed,
            "verdict": verdict}


def _scheme(entry, h, domain=None, **kw):
    dom = domain or entry.domain_default
    return DiscreteScheme(entry.spec, build_grid(dom, h), **kw)


def _drift_absorption_rows(profile):
    e = zoo.get("half_x_drift_minus_u")
    rows = []
    for n in (4, 22):
        cert = certify.power(n, interval(0, 1))
        best = certify.best_lambda(cert, e.spec, interval(0, 1), 10000)
        ok = abs(best - (n / 2 - 1)) <= 1e-9
        rows.append(
            _row(
                "drift-absorption/certificate-x^%d" % n,
                "lambda1 is unbounded: x^n certifies lambda = n/2 - 1 exactly",
                "best lambda = %.12g (target %g)" % (best, n / 2 - 1),
                "pass" if ok else "fail",
            )
        )
    h = 1 / 400
    sch = _scheme(e, h)
    v = mp_test(sch)
    grid = sch.grid
    xs = grid.coords()[:, 0]
    wvals = np.where(grid.d >= 0, xs * (1 - xs), 0.0)
    wc = witness_check(sch, Field(grid, wvals), sch.default_tolerance())
    ok = (not v.holds) and v.max_positive_part > 0.1 * 1.0 and wc["ok"]
    rows.append(
        _row(
            "drift-absorption/mp",
            "maximum principle fails although lambda1 = +inf; x(1-x) is a positive subsolution",
            "mp holds=%s, witness max=%.3g, parabola witness ok=%s"
            % (v.holds, v.max_positive_part, wc["ok"]),
            "pass" if ok else "fail",
        )
    )
    m = mu1_estimate(e.spec, interval(0, 1), h, [0.2, 0.1, 0.05])
    rows.append(
        _row(
            "drift-absorption/mu1",
            "mu1 <= 0 (maximum principle fails)",
            "mu1 bracket (%.4g, %.4g)" % m.bracket,
            "pass" if m.bracket[1] <= 0 else "fail",
        )
    )
    sub = blowup_eigenvalue(
        DiscreteScheme(e.spec, build_grid(interval(0.1, 0.9), h)), lambda_cap=10.0, tol=0.02
    )
    rows.append(
        _row(
            "drift-absorption/restriction-instability",
            "on subdomains away from the degeneracy the grid eigenvalue exceeds any cap",
            "capped=%s at lambda_cap=10" % sub.diagnostics.get("capped"),
            "pass" if sub.diagnostics.get("capped") == "above" else "fail",
        )
    )
    return rows


def _expanding_drift_rows(profile):
    e = zoo.get("neg_two_x_drift")
    h = 1 / 400
    rows = []
    vs = []
    for eps in (0.2, 0.1, 0.05):
        est = viscous_eigenvalue(e.spec, interval(0, 1), h, eps)
        vs.append(est.value)
    ok = all(v >= 0.9 for v in vs)
    rows.append(
        _row(
            "expanding-drift/viscous",
            "the viscous eigenvalues stay >= 1 (10% discretization allowance)",
            "lambda^eps = %s" % ", ".join("%.4g" % v for v in vs),
            "pass" if ok else "fail",
        )
    )
    m = mu1_estimate(e.spec, interval(0, 1), h, [0.2, 0.1, 0.05])
    rows.append(
        _row(
            "expanding-drift/mu1",
            "mu1 <= 0 while the viscous limit is >= 1: the two notions split",
            "mu1 = %.4g, bracket (%.4g, %.4g)" % (m.value, *m.bracket),
            "pass" if m.value <= 0.05 else "fail",
        )
    )
    sch = _scheme(e, h)
    v = mp_test(sch)
    grid = sch.grid
    i0 = int(np.argmin(np.abs(grid.coords()[:, 0])))
    w = v.witness.values if v.witness is not None else np.zeros(grid.size)
    concentrated = w[i0] > 0.9 and float(np.delete(w, i0).max()) < 1e-6
    rows.append(
        _row(
            "expanding-drift/mp",
            "maximum principle fails; the witness is the indicator of the left endpoint",
            "mp holds=%s, witness(0)=%.3g, elsewhere max=%.2g"
            % (v.holds, w[i0], float(np.delete(w, i0).max())),
            "pass" if ((not v.holds) and concentrated) else "fail",
        )
    )
    return rows


def _sqrt_family_rows(profile):
    rows = []
    e = zoo.get("neg_sqrt_x_drift")
    cert = certify.two_minus_sqrt(interval(0, 1))
    rep = certify.verify(cert, e.spec, interval(0, 1), 0.25, 10000)
    best = certify.best_lambda(cert, e.spec, interval(0, 1), 10000)
    ok = rep.ok and rep.classification == "bounds-lambda-bar1" and abs(best - 0.25) <= 1e-6
    rows.append(
        _row(
            "sqrt-drift/certificate",
            "2 - sqrt(x) certifies lambda-bar-1 >= 1/4 (tight for this certificate)",
            "margin=%.3g, class=%s, best lambda=%.9f" % (rep.margin, rep.classification, best),
            "pass" if ok else "fail",
        )
    )
    e2 = zoo.get("neg_x_u_xx")
    cert2 = certify.one_plus_sqrt(interval(0, 1))
    rep2 = certify.verify(cert2, e2.spec, interval(0, 1), 0.125, 10000)
    rows.append(
        _row(
            "sqrt-diffusion/certificate",
            "1 + sqrt(x) certifies lambda-bar-1 >= 1/8 for the degenerate diffusion",
            "margin=%.3g, class=%s" % (rep2.margin, rep2.classification),
            "pass" if (rep2.ok and rep2.classification == "bounds-lambda-bar1") else "fail",
        )
    )
    return rows


def _intrinsic_bound_gap_rows(profile):
    # the lambda-bar-1 certificates stay positive, yet mu1 vanishes and the
    # maximum principle fails: the intrinsic bound does not decide MP here
    rows = []
    for name, bound in (("neg_sqrt_x_drift", 0.25), ("neg_x_u_xx", 0.125)):
        e = zoo.get(name)
        m = mu1_estimate(e.spec, interval(0, 1), 1 / 400, [0.2, 0.1, 0.05])
        v = mp_test(_scheme(e, 1 / 200))
        ok = (-0.05 <= m.value <= 0.05) and not v.holds
        rows.append(
            _row(
                "sqrt-family/%s-gap" % name,
                "lambda-bar-1 >= %g by certificate, yet mu1 = 0 and MP fails" % bound,
                "mu1 = %.4g, mp holds=%s" % (m.value, v.holds),
                "pass" if ok else "fail",
            )
        )
    return rows


def _knife_edge_rows(profile):
    rows = []
    cases = [
        ("knife-edge-drift", "neg_x_drift", interval(0, 1), "every eigenvalue notion vanishes"),
        ("no-eigenfunction-drift", "x_squared_drift", interval(-1, 1),
         "mu1 = 0 with no principal eigenfunction"),
        ("zero-order-absorption", "x_squared_absorption", interval(-1, 1),
         "all four eigenvalue notions vanish"),
    ]
    for name, op, dom, claim in cases:
        m = mu1_estimate(zoo.get(op).spec, dom, 1 / 400, [0.2, 0.1, 0.05])
        ok = -0.05 <= m.value <= 0.05
        rows.append(
            _row(name, claim, "mu1 = %.4g, bracket (%.4g, %.4g)" % (m.value, *m.bracket),
                 "pass" if ok else "fail")
        )
    return rows


def _calibration_rows(profile):
    rows = []
    e = zoo.get("neg_u_xx")
    est = blowup_eigenvalue(_scheme(e, 1 / 400))
    rows.append(
        _row(
            "calibration/interval",
            "grid eigenvalue of the 1D Laplacian matches pi^2 within 2%",
            "lambda = %.5g (pi^2 = %.5g)" % (est.value, PI2),
            "pass" if abs(est.value - PI2) <= 0.02 * PI2 else "fail",
        )
    )
    m = mu1_estimate(e.spec, interval(0, 1), 1 / 400, [0.2, 0.1, 0.05])
    per = m.diagnostics["per_eps"]
    oracle_ok = all(
        abs(p["value"] - PI2 / (1 + 2 * p["eps"]) ** 2) <= 0.02 * PI2 for p in per
    )
    ok = abs(m.value - PI2) <= 0.03 * PI2 and oracle_ok
    rows.append(
        _row(
            "calibration/inflation-extrapolation",
            "inflated eigenvalues follow pi^2/(1+2eps)^2 and extrapolate to pi^2 within 3%",
            "mu1 = %.5g; per-eps %s" % (m.value, ["%.4g" % p["value"] for p in per]),
            "pass" if ok else "fail",
        )
    )
    e2 = zoo.get("neg_laplace_2d")
    est2 = blowup_eigenvalue(_scheme(e2, 1 / 80), tol=0.1)
    rows.append(
        _row(
            "calibration/square",
            "grid eigenvalue of the 2D Laplacian matches 2*pi^2 within 3%",
            "lambda = %.5g (2*pi^2 = %.5g)" % (est2.value, 2 * PI2),
            "pass" if abs(est2.value - 2 * PI2) <= 0.03 * 2 * PI2 else "fail",
        )
    )
    ls = lambda_star_estimate(e.spec, interval(0, 1), 1 / 250, [0.1, 0.05, 0.02])
    rows.append(
        _row(
            "calibration/uniformly-elliptic-coincidence",
            "for the uniformly elliptic operator the viscous-limit proxy agrees with pi^2",
            "lambda_* proxy = %.5g" % ls.value,
            "pass" if abs(ls.value - PI2) <= 0.03 * PI2 else "fail",
        )
    )
    sh = shift(e.spec, 5.0)
    base = blowup_eigenvalue(_scheme(e, 1 / 400), tol=0.05)
    shifted = blowup_eigenvalue(
        DiscreteScheme(sh, build_grid(interval(0, 1), 1 / 400)), tol=0.05
    )
    gap = abs(shifted.value - base.value - 5.0)
    rows.append(
        _row(
            "calibration/shift-identity",
            "adding lambda0*u shifts the eigenvalue by exactly lambda0",
            "|shifted - base - 5| = %.3g" % gap,
            "pass" if gap <= 2 * 0.05 else "fail",
        )
    )
    return rows


CONSISTENCY_FIXTURES = (
    # (zoo name, h, eps list, mp sweeps cap)
    ("neg_u_xx", 1 / 100, (0.2, 0.1), 100_000),
    ("neg_u_xx_plus_u", 1 / 100, (0.2, 0.1), 100_000),
    ("half_x_drift_minus_u", 1 / 200, (0.2, 0.1), 100_000),
    ("neg_two_x_drift", 1 / 200, (0.2, 0.1), 100_000),
    ("neg_x_drift", 1 / 200, (0.2, 0.1), 100_000),
    ("x_squared_drift", 1 / 200, (0.2, 0.1), 100_000),
    ("grushin", 1 / 24, (0.2, 0.1), 100_000),
    ("neg_pk_1", 1 / 24, (0.2, 0.1), 100_000),
    ("eikonal_coercive", 1 / 200, (0.2, 0.1), 100_000),
)


def consistency_case(name, h, eps_list, max_sweeps=100_000, cap=1.0):
    """One (mp verdict, mu1 bracket) pair plus the agreement verdict."""
    e = zoo.get(name)
    v = mp_test(_scheme(e, h), cap=cap, max_sweeps=max_sweeps)
    m = mu1_estimate(e.spec, e.domain_default, h, list(eps_list), tol=0.05)
    lo, hi = m.bracket
    if lo <= 0.0 <= hi:
        verdict = "boundary case"
        agree = None
        log.warning(
            "%s: mu1 bracket (%.4g, %.4g) straddles 0; sign equivalence not decided",
            name, lo, hi,
        )
    else:
        agree = v.holds == (lo > 0.0)
        verdict = "pass" if agree else "fail"
    return {
        "operator": name,
        "mp_holds": v.holds,
        "mu1_bracket": (lo, hi),
        "agree": agree,
        "verdict": verdict,
    }


def _consistency_rows(profile):
    rows = []
    for name, h, eps_list, sweeps in CONSISTENCY_FIXTURES:
        case = consistency_case(name, h, eps_list, sweeps)
        rows.append(
            _row(
                "sign-equivalence/%s" % name,
                "the maximum principle holds exactly when mu1 > 0",
                "mp holds=%s, mu1 bracket (%.4g, %.4g)"
                % (case["mp_holds"], *case["mu1_bracket"]),
                case["verdict"],
            )
        )
    return rows


def _boundary_rows(profile):
    rows = []
    table = {
        "neg_two_x_drift": {0.0: "violated", 1.0: "satisfied"},
        "neg_x_drift": {0.0: "violated", 1.0: "satisfied"},
        "neg_u_xx": {0.0: "satisfied", 1.0: "satisfied"},
    }
    for op, expected in table.items():
        e = zoo.get(op)
        rep = fichera_classify(e.spec, interval(0, 1))
        got = {s["point"][0]: s["status"] for s in rep.samples}
        match = all(got[x] == st for x, st in expected.items())
        advisory = equivalence_advisory(rep)
        barriers_ok = True
        for x, st in expected.items():
            if st == "satisfied":
                bar = log_barrier_sweep(e.spec, interval(0, 1), [x], band=0.1)
                barriers_ok = barriers_ok and bar.verified
        ok = match and advisory == "mu1-equals-lambda-bar" and barriers_ok
        rows.append(
            _row(
                "boundary/%s" % op,
                "endpoint classification matches the hand table; log barriers exist at "
                "felt endpoints; no mixed component, so mu1 = lambda-bar-1",
                "statuses %s; advisory %s; barriers ok=%s"
                % ({k: v for k, v in sorted(got.items())}, advisory, barriers_ok),
                "pass" if ok else "fail",
            )
        )
    return rows


def _certificate_extra_rows(profile):
    rows = []
    g = zoo.get("grushin")
    declared = Domain("rectangle", (-1.3, 1.3, -0.3, 1.3))
    cert = certify.exp_tilt(0.1, 1.0, [1.0, 0.0], declared)
    best = certify.best_lambda(cert, g.spec, g.domain_default, 10000)
    rep = certify.verify(cert, g.spec, g.domain_default, min(best, 0.02), 10000)
    ok = best > 0.01 and rep.ok and rep.classification == "bounds-mu1"
    rows.append(
        _row(
            "subelliptic/exp-tilt-certificate",
            "nondegenerate-direction tilt 1 - eps*exp(sigma x) gives mu1 > 0",
            "best lambda=%.4g, class=%s" % (best, rep.classification),
            "pass" if ok else "fail",
        )
    )
    pk = zoo.get("neg_pk_2")
    cert2 = certify.paraboloid(2.0, Domain("disk", (0.0, 0.0, 1.2)))
    rep2 = certify.verify(cert2, pk.spec, Domain("disk", (0.0, 0.0, 1.0)), 0.5, 10000)
    ok2 = rep2.ok and rep2.margin >= 3.0 - 1e-9 and rep2.classification == "bounds-mu1"
    rows.append(
        _row(
            "hessian-sum/paraboloid-certificate",
            "k - |x|^2 certifies mu1 > 0 for the full Hessian-eigenvalue sum",
            "margin=%.4g, class=%s" % (rep2.margin, rep2.classification),
            "pass" if ok2 else "fail",
        )
    )
    return rows


def _pucci_row(profile):
    e = zoo.get("pucci_max_degenerate")
    fact = next(f for f in e.known_facts if not f.verified)
    m = mu1_estimate(e.spec, e.domain_default, 1 / 20, [0.2, 0.1], lambda_cap=10.0, tol=0.1)
    v = mp_test(_scheme(e, 1 / 20), max_sweeps=50_000)
    return [
        _row(
            "pucci-degenerate/sign-convention",
            "catalog claim 'mu1 > 0' is unverified (%s)" % fact.note.split(":")[0],
            "observed mu1 = %.3g, mp holds=%s (internally consistent)" % (m.value, v.holds),
            "recorded, not asserted",
        )
    ]


FIXTURE_GROUPS = (
    _drift_absorption_rows,
    _expanding_drift_rows,
    _sqrt_family_rows,
    _intrinsic_bound_gap_rows,
    _knife_edge_rows,
    _calibration_rows,
    _consistency_rows,
    _boundary_rows,
    _certificate_extra_rows,
    _pucci_row,
)


def run_paper_suite(profile="full", progress=None):
    """All fixture rows; ``progress`` is an optional callable(row)."""
    rows = []
    for group in FIXTURE_GROUPS:
        for row in group(profile):
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def format_table(rows):
    name_w = max(len(r["name"]) for r in rows)
    ver_w = max(len(r["verdict"]) for r in rows)
    lines = []
    for r in rows:
        lines.append(
            "%-*s  %-*s  %s" % (name_w, r["name"], ver_w, r["verdict"], r["computed"])
        )
        lines.append("%-*s  claim: %s" % (name_w, "", r["claim"]))
    counts = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    summary = ", ".join("%s=%d" % kv for kv in sorted(counts.items()))
    lines.append("fixtures: %d (%s)" % (len(rows), summary))
    return "\n".join(lines)
