"""Grid eigenvalue estimators built on a blowup/boundedness criterion.

The discrete principal eigenvalue of a monotone scheme is located by
bisection on lambda: a trial level is *feasible* when the monotone fixed
point iteration for  S_i(u) - lambda*u_i^alpha = 1  (u = 0 outside the
closure, free band nodes included) stays bounded, and *infeasible* when it
blows up.  Monotonicity makes feasibility monotone in lambda, so bisection
brackets the threshold.

For linear schemes the boundedness criterion has an exact algebraic
equivalent: the iteration is bounded iff the Z-matrix (L - lambda*I) of the
scheme maps some nonnegative vector to a positive one, i.e. iff
(L - lambda*I) u = 1 has a nonnegative solution.  That banded solve replaces
the sweep loop for linear operators; nonlinear families run the sweeps with
a growth-rate classifier that projects clearly geometric growth or decay
instead of waiting for the 1e8 threshold.

On top of the plain grid eigenvalue sit the domain-inflation estimator for
mu1, the viscous regularization lambda^eps, and the liminf proxy lambda_*.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .domains import build_grid, inflate
from .operators import OperatorError
from .scheme import DiscreteScheme


@dataclass
class SolverParams:
    max_sweeps: int = 100_000
    div_threshold: float = 1e8
    inc_tol: float = 1e-12
    window: int = 100
    settle_windows: int = 4
    settle_rel: float = 0.25
    min_signal: float = 1e-7
    method: str = "auto"  # auto | direct | iterate
    feasible_below_check: bool = True


@dataclass
class EigenEstimate:
    value: float
    bracket: tuple
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.bracket
        if not (lo <= self.value <= hi):
            raise OperatorError("estimate outside its own bracket")

    def to_record(self):
        rec = {
            "type": "eigen",
            "value": self.value,
            "lambda_lo": self.bracket[0],
            "lambda_hi": self.bracket[1],
            "method": self.method,
        }
        rec.update(
            {
                k: self.diagnostics[k]
                for k in ("h", "eps", "iterations", "diverged", "capped")
                if k in self.diagnostics
            }
        )
        return rec


def operator_matrix(cp):
    """Sparse matrix of a compiled *linear* scheme over its free nodes."""
    if cp.family != "linear":
        raise OperatorError("operator_matrix needs the linear family")
    n = cp.nfree
    col_of = np.full(cp.grid.size + 1, -1, dtype=np.int64)
    col_of[cp.free] = np.arange(n)
    rows = [np.arange(n)]
    cols = [np.arange(n)]
    vals = [cp.own]
    for k in range(cp.W.shape[0]):
        c = col_of[cp.nb[k]]
        m = c >= 0
        rows.append(np.flatnonzero(m))
        cols.append(c[m])
        vals.append(-cp.W[k][m])
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )


def _direct_feasible(cp, lam):
    """Exact boundedness test for linear schemes via inverse positivity."""
    A = operator_matrix(cp) - lam * sp.identity(cp.nfree, format="csr")
    try:
        lu = spla.splu(A.tocsc())
        u = lu.solve(np.ones(cp.nfree))
    except RuntimeError:
        return False, {"decided": "singular"}
    if not np.all(np.isfinite(u)):
        return False, {"decided": "direct"}
    tol = -1e-11 * max(1.0, float(np.max(np.abs(u))))
    return bool(np.min(u) >= tol), {"decided": "direct"}


def _iterate_feasible(cp, lam, prm):
    """Monotone Perron iteration with threshold / increment / rate rules."""
    from . import kernels

    backend = kernels.backend()
    u = cp.state()
    free = cp.free
    burn_in = 5 * max(cp.grid.npts) + 100
    ratios = []
    inc_at_window = None
    sup = 0.0
    for k in range(1, prm.max_sweeps + 1):
        new = backend.blowup_sweep(cp, u, lam, 1.0)
        inc = float(np.max(new - u[free]))
        if inc < -1e-9 * (1.0 + sup):
            raise OperatorError("non-monotone sweep detected (scheme bug)")
        u[free] = new
        sup = float(np.max(new))
        if sup >= prm.div_threshold:
            return False, {"decided": "threshold", "sweeps": k, "sup": sup}
        if inc <= prm.inc_tol * (1.0 + sup):
            return True, {"decided": "increment", "sweeps": k, "sup": sup}
        if k % prm.window == 0:
            if inc_at_window is not None and inc_at_window > 0.0:
                ratios.append((inc / inc_at_window) ** (1.0 / prm.window))
            inc_at_window = inc
            if k >= burn_in and len(ratios) >= prm.settle_windows:
                recent = ratios[-prm.settle_windows :]
                mean = float(np.mean(recent))
                spread = max(recent) - min(recent)
                signal = abs(mean - 1.0)
                if signal > prm.min_signal and spread <= prm.settle_rel * signal:
                    if mean > 1.0:
                        return False, {"decided": "rate", "sweeps": k, "sup": sup, "rate": mean}
                    rho = 0.5 * (1.0 + mean)  # safety margin on the projection
                    proj = sup + inc * rho / (1.0 - rho)
                    if proj < 0.5 * prm.div_threshold:
                        return True, {"decided": "rate", "sweeps": k, "sup": sup, "rate": mean}
    return sup < prm.div_threshold, {"decided": "cap", "sweeps": prm.max_sweeps, "sup": sup}


def _feasible(cp, lam, prm):
    if prm.method == "direct" or (
        prm.method == "auto" and cp.family == "linear" and not cp.band_strict
    ):
        return _direct_feasible(cp, lam)
    return _iterate_feasible(cp, lam, prm)


def blowup_eigenvalue(scheme, lambda_cap=30.0, tol=0.02, params=None):
    """Discrete principal eigenvalue of the scheme's grid problem.

    Bisects lambda in [-lambda_cap, lambda_cap] on the boundedness
    criterion.  Returns an EigenEstimate whose bracket has width <= tol,
    or is pinned at +/-lambda_cap (flagged ``capped``) when the carrier of
    feasibility leaves the search interval.
    """
    if lambda_cap <= 0 or tol <= 0:
        raise OperatorError("lambda_cap and tol must be positive")
    prm = params or SolverParams()
    cp = scheme.compiled()
    trials = []

    def probe(lam):
        ok, info = _feasible(cp, lam, prm)
        trials.append({"lambda": lam, "feasible": ok, **info})
        return ok

    diag = {
        "h": scheme.grid.h,
        "viscous_eps": scheme.viscous_eps,
        "grid_free_nodes": int(cp.nfree),
        "trials": trials,
    }
    lo, hi = -lambda_cap, lambda_cap
    if not probe(lo):
        diag.update(capped="below", iterations=len(trials), diverged=True)
        return EigenEstimate(lo, (lo, lo), "blowup", diag)
    if probe(hi):
        diag.update(capped="above", iterations=len(trials), diverged=False)
        return EigenEstimate(hi, (hi - tol, hi), "blowup", diag)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    if prm.feasible_below_check:
        spot = max(lo - 0.5, -lambda_cap)
        diag["feasible_below_check"] = bool(probe(spot))
    diag.update(iterations=len(trials), diverged=False, capped=None)
    return EigenEstimate(0.5 * (lo + hi), (lo, hi), "blowup", diag)


def _make_scheme(spec, domain, h, viscous_eps=0.0, boundary_clause="relaxed-min"):
    grid = build_grid(domain, h)
    return DiscreteScheme(spec, grid, viscous_eps=viscous_eps, boundary_clause=boundary_clause)


def mu1_estimate(spec, domain, h, eps_list, lambda_cap=30.0, tol=0.02, params=None,
                 boundary_clause="relaxed-min"):
    """mu1 via the inflated-domain limit of grid eigenvalues.

    Runs the blowup estimator on Omega + B_eps for each eps and extrapolates
    to eps = 0 through the last three values (quadratic in eps); the
    extrapolation error and per-eps bracket widths widen the bracket.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise OperatorError("eps_list must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise OperatorError("eps_list must be strictly decreasing")
    if eps_list[-1] < 2 * h:
        raise OperatorError("h does not resolve the smallest eps (need eps >= 2h)")
    per_eps = []
    for eps in eps_list:
        est = blowup_eigenvalue(
            _make_scheme(spec, inflate(domain, eps), h, boundary_clause=boundary_clause),
            lambda_cap,
            tol,
            params,
        )
        per_eps.append(
            {
                "eps": eps,
                "value": est.value,
                "lambda_lo": est.bracket[0],
                "lambda_hi": est.bracket[1],
                "capped": est.diagnostics.get("capped"),
            }
        )
    # antitone in the domain: larger eps (larger domain) cannot give a larger
    # eigenvalue, up to bracket widths
    monotone_ok = True
    for a, b in zip(per_eps, per_eps[1:]):  # a: larger eps
        wa = a["lambda_hi"] - a["lambda_lo"]
        wb = b["lambda_hi"] - b["lambda_lo"]
        if a["value"] > b["value"] + wa + wb + 1e-12:
            monotone_ok = False
    xs = np.array([p["eps"] for p in per_eps][-3:])
    ys = np.array([p["value"] for p in per_eps][-3:])
    widths = np.array([p["lambda_hi"] - p["lambda_lo"] for p in per_eps][-3:])
    if xs.size >= 3:
        wts = np.array(
            [
                np.prod([0.0 - xs[j] for j in range(3) if j != i])
                / np.prod([xs[i] - xs[j] for j in range(3) if j != i])
                for i in range(3)
            ]
        )
        value = float(wts @ ys)
        lin = np.polyfit(xs[-2:], ys[-2:], 1)
        fit_err = abs(value - float(np.polyval(lin, 0.0)))
        half = float(np.abs(wts) @ (widths / 2.0)) + fit_err
    elif xs.size == 2:
        lin = np.polyfit(xs, ys, 1)
        value = float(np.polyval(lin, 0.0))
        half = float(np.sum(widths / 2.0)) + abs(value - ys[-1])
    else:
        value = float(ys[-1])
        half = float(widths[-1] / 2.0) + eps_list[-1]
    diag = {
        "h": h,
        "eps": eps_list,
        "per_eps": per_eps,
        "monotone_in_eps": monotone_ok,
        "iterations": sum(1 for _ in per_eps),
        "capped": next((p["capped"] for p in per_eps if p["capped"]), None),
    }
    return EigenEstimate(value, (value - half, value + half), "inflated-blowup", diag)


def dense_principal_eigenvalue(cp):
    """Oracle: smallest real part of the dense scheme matrix spectrum."""
    A = operator_matrix(cp).toarray()
    lams = np.linalg.eigvals(A)
    return float(np.min(lams.real))


def viscous_eigenvalue(spec, domain, h, eps, lambda_cap=30.0, tol=0.02, params=None,
                       oracle_max_nodes=2500):
    """Principal eigenvalue of the regularized scheme -eps*Lap + F on Omega.

    For linear operators (on grids small enough for a dense solve) the
    result is cross-checked against the smallest real part of the scheme
    matrix spectrum; both values are reported.
    """
    if eps <= 0:
        raise OperatorError("viscous eps must be positive")
    scheme = _make_scheme(spec, domain, h, viscous_eps=eps)
    est = blowup_eigenvalue(scheme, lambda_cap, tol, params)
    est.method = "viscous"
    est.diagnostics["eps"] = eps
    cp = scheme.compiled()
    if spec.kind == "linear" and cp.nfree <= oracle_max_nodes:
        oracle = dense_principal_eigenvalue(cp)
        est.diagnostics["dense_oracle"] = oracle
        est.diagnostics["dense_oracle_gap"] = abs(oracle - est.value)
    return est


def lambda_star_estimate(spec, domain, h, eps_list, lambda_cap=30.0, tol=0.02, params=None):
    """liminf proxy for lambda_*: the minimum over the tail of the eps
    sequence of the viscous eigenvalues (full table in diagnostics)."""
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise OperatorError("eps_list must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise OperatorError("eps_list must be strictly decreasing")
    if h > eps_list[-1] / 5 + 1e-12:
        raise OperatorError("h must resolve the viscous boundary layer (h <= eps_min/5)")
    table = []
    for eps in eps_list:
        est = viscous_eigenvalue(spec, domain, h, eps, lambda_cap, tol, params)
        table.append(
            {
                "eps": eps,
                "value": est.value,
                "lambda_lo": est.bracket[0],
                "lambda_hi": est.bracket[1],
                "dense_oracle": est.diagnostics.get("dense_oracle"),
            }
        )
    tail = table[-min(3, len(table)) :]
    best = min(tail, key=lambda rec: rec["value"])
    diag = {"h": h, "eps": eps_list, "per_eps": table, "iterations": len(table)}
    return EigenEstimate(best["value"], (best["lambda_lo"], best["lambda_hi"]), "extrapolated", diag)
