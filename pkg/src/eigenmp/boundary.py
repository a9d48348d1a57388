"""Fichera classification of boundary points and log-distance barriers.

Everything here works with closed-form signed distance geometry (the
condition is sign-sensitive and second order in d, so numerical distance
Hessians are too noisy).  Rectangle corners are excluded: the
classification theory assumes a smooth boundary.

At a boundary point xi of a linear operator F = -Tr(A D^2 .) - b.D. - c.,
the Dirichlet condition is *felt* (satisfied Fichera condition) when

    Dd.A.Dd > 0, or Dd.A.Dd = 0 and Tr(A D^2 d) + b.Dd < 0,

and then w = log(delta + d) - log(delta) is a barrier there for small
delta; where the condition is violated, positive supersolutions extend to
the boundary and the two eigenvalue notions mu1 and lambda-bar-1 agree
component by component.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import OperatorError

TOL_POS = 1e-9
DELTA_SWEEP = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class BoundarySample:
    point: np.ndarray
    dd: np.ndarray  # gradient of the signed distance (inward normal)
    d2d: np.ndarray
    component: int


def boundary_samples(domain, n_samples, corner_exclusion=0.02):
    """Closed-form boundary geometry samples, one component id per connected
    boundary piece (intervals have two, rectangles and disks one)."""
    if domain.shape == "interval":
        a, b = domain.params
        a, b = a - domain.inflation, b + domain.inflation
        z = np.zeros((1, 1))
        return [
            BoundarySample(np.array([a]), np.array([1.0]), z[0], 0),
            BoundarySample(np.array([b]), np.array([-1.0]), z[0], 1),
        ]
    if domain.shape == "disk":
        cx, cy, r = domain.params
        r = r + domain.inflation
        out = []
        thetas = np.linspace(0.0, 2 * np.pi, max(n_samples, 8), endpoint=False)
        for t in thetas:
            nhat = np.array([np.cos(t), np.sin(t)])
            pt = np.array([cx, cy]) + r * nhat
            d2 = -(np.eye(2) - np.outer(nhat, nhat)) / r
            out.append(BoundarySample(pt, -nhat, d2, 0))
        return out
    if domain.inflation > 0:
        raise OperatorError("inflated rectangles have no closed-form boundary geometry")
    # Corners are excluded (the boundary is not smooth there), which splits
    # the classified set into four edge components.
    a, b, c, d = domain.params
    per_edge = max(n_samples // 4, 3)
    out = []
    z = np.zeros((2, 2))
    ex = corner_exclusion * min(b - a, d - c)
    for x in np.linspace(a + ex, b - ex, per_edge):
        out.append(BoundarySample(np.array([x, c]), np.array([0.0, 1.0]), z, 0))
        out.append(BoundarySample(np.array([x, d]), np.array([0.0, -1.0]), z, 1))
    for y in np.linspace(c + ex, d - ex, per_edge):
        out.append(BoundarySample(np.array([a, y]), np.array([1.0, 0.0]), z, 2))
        out.append(BoundarySample(np.array([b, y]), np.array([-1.0, 0.0]), z, 3))
    return out


def distance_geometry(domain, pts):
    """(d, Dd, D2d) at interior points, closed form per shape."""
    pts = np.atleast_2d(pts)
    n = pts.shape[0]
    d = domain.signed_distance(pts)
    if domain.shape == "interval":
        a, b = domain.params
        a, b = a - domain.inflation, b + domain.inflation
        left = (pts[:, 0] - a) < (b - pts[:, 0])
        dd = np.where(left, 1.0, -1.0).reshape(n, 1)
        return d, dd, np.zeros((n, 1, 1))
    if domain.shape == "disk":
        cx, cy, r0 = domain.params
        rel = pts - np.array([cx, cy])
        rho = np.linalg.norm(rel, axis=1)
        if np.any(rho < 1e-12):
            raise OperatorError("distance geometry undefined at the disk center")
        nhat = rel / rho[:, None]
        dd = -nhat
        d2 = -(np.eye(2)[None, :, :] - np.einsum("ni,nj->nij", nhat, nhat)) / rho[:, None, None]
        return d, dd, d2
    if domain.inflation > 0:
        raise OperatorError("inflated rectangles have no closed-form distance geometry")
    a, b, c, dtop = domain.params
    margins = np.column_stack([pts[:, 0] - a, b - pts[:, 0], pts[:, 1] - c, dtop - pts[:, 1]])
    nearest = np.argmin(margins, axis=1)
    normals = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    dd = normals[nearest]
    return d, dd, np.zeros((n, 2, 2))


@dataclass
class FicheraReport:
    samples: list
    components: list  # (component id, verdict)

    def to_record(self):
        return {
            "type": "fichera",
            "components": [{"component": c, "verdict": v} for c, v in self.components],
            "n_samples": len(self.samples),
        }


def _linear_coeffs(spec, pts):
    if spec.kind != "linear" or spec.linear_part is None:
        raise OperatorError("Fichera classification needs a linear operator")
    return spec.linear_part.matrices(pts)


def fichera_classify(spec, domain, n_samples=64, tol_pos=TOL_POS):
    """Classify boundary samples and aggregate per connected component."""
    samples = boundary_samples(domain, n_samples)
    pts = np.array([s.point for s in samples])
    a, b, _ = _linear_coeffs(spec, pts)
    recs = []
    for i, s in enumerate(samples):
        dad = float(np.sum(a[i] * s.dd**2))
        if dad < -1e-10:
            raise OperatorError("Dd.A.Dd negative: diffusion matrix not PSD")
        drift = float(np.sum(a[i] * np.diag(s.d2d)) + b[i] @ s.dd)
        if dad > tol_pos:
            status = "satisfied"
        elif drift < -tol_pos:
            status = "satisfied"
        else:
            status = "violated"
        recs.append(
            {"point": s.point.tolist(), "dAd": dad, "drift": drift, "status": status,
             "component": s.component}
        )
    comps = []
    for cid in sorted({r["component"] for r in recs}):
        stats = {r["status"] for r in recs if r["component"] == cid}
        verdict = "mixed" if len(stats) > 1 else ("all-satisfied" if "satisfied" in stats else "all-violated")
        comps.append((cid, verdict))
    return FicheraReport(recs, comps)


def classify_point(spec, domain, xi):
    """Fichera status at a single boundary point (nearest sample geometry)."""
    samples = boundary_samples(domain, 512)
    pts = np.array([s.point for s in samples])
    idx = int(np.argmin(np.linalg.norm(pts - np.asarray(xi, dtype=float), axis=1)))
    s = samples[idx]
    a, b, _ = _linear_coeffs(spec, s.point[None, :])
    dad = float(np.sum(a[0] * s.dd**2))
    drift = float(np.sum(a[0] * np.diag(s.d2d)) + b[0] @ s.dd)
    status = "satisfied" if (dad > TOL_POS or drift < -TOL_POS) else "violated"
    return status, s


@dataclass
class BarrierReport:
    xi: list
    delta: float
    band_width: float
    min_residual: float
    verified: bool
    rescale: float | None = None
    notes: list = field(default_factory=list)

    def to_record(self):
        return {
            "type": "barrier",
            "xi": self.xi,
            "delta": self.delta,
            "band_width": self.band_width,
            "min_residual": self.min_residual,
            "verified": self.verified,
        }


def _band_samples(domain, xi, band, n_samples):
    xi = np.asarray(xi, dtype=float)
    if domain.dim == 1:
        xs = np.linspace(xi[0] - band, xi[0] + band, max(n_samples, 16)).reshape(-1, 1)
    else:
        m = max(int(np.sqrt(n_samples)), 8)
        g = np.linspace(-band, band, m)
        X, Y = np.meshgrid(g, g, indexing="ij")
        xs = np.column_stack([X.ravel() + xi[0], Y.ravel() + xi[1]])
        xs = xs[np.linalg.norm(xs - xi, axis=1) <= band]
    d = domain.signed_distance(xs)
    return xs[d > 1e-12]


def verify_log_barrier(spec, domain, xi, delta, band, n_samples=400, tol=1e-9):
    """Check that w = log(delta + d) - log(delta) is a barrier at xi.

    Computes min F[w] over samples of Omega within ``band`` of xi.  F[w] is
    1-homogeneous (linear operator), so a positive minimum c0 verifies the
    barrier after the rescale w <- w/c0, which is reported.
    """
    status, _ = classify_point(spec, domain, xi)
    if status != "satisfied":
        raise OperatorError("log barrier requires the Fichera condition at xi")
    if delta <= 0:
        raise OperatorError("delta must be positive")
    if band > domain.inradius / 2 + 1e-12:
        raise OperatorError("band must not exceed half the inradius")
    pts = _band_samples(domain, xi, band, n_samples)
    if pts.shape[0] < 8:
        raise OperatorError("band too thin: not enough interior samples")
    d, dd, d2d = distance_geometry(domain, pts)
    w = np.log(delta + d) - np.log(delta)
    dw = dd / (delta + d)[:, None]
    d2w = d2d / (delta + d)[:, None, None] - np.einsum("ni,nj->nij", dd, dd) / (
        (delta + d) ** 2
    )[:, None, None]
    a, b, c = _linear_coeffs(spec, pts)
    hd = np.einsum("nii->ni", d2w)
    fvals = -np.sum(a * hd, axis=1) - np.sum(b * dw, axis=1) - c * w
    c0 = float(np.min(fvals))
    verified = bool(c0 > tol and np.min(w) >= -1e-14)
    return BarrierReport(
        xi=list(np.atleast_1d(np.asarray(xi, dtype=float))),
        delta=float(delta),
        band_width=float(band),
        min_residual=c0,
        verified=verified,
        rescale=(1.0 / c0) if verified else None,
    )


def log_barrier_sweep(spec, domain, xi, band, n_samples=400, deltas=DELTA_SWEEP):
    """Try the delta sweep; return the first verified barrier or the best
    failing report (verified=False) when the sweep is exhausted."""
    best = None
    for delta in deltas:
        rep = verify_log_barrier(spec, domain, xi, delta, band, n_samples)
        if rep.verified:
            return rep
        if best is None or rep.min_residual > best.min_residual:
            best = rep
    best.notes.append("delta sweep exhausted without verification")
    return best


def equivalence_advisory(report):
    """Theorem-level advisory: when no boundary component mixes satisfied
    and violated Fichera points, mu1 and lambda-bar-1 coincide."""
    if not report.components:
        return "inconclusive"
    if any(v == "mixed" for _, v in report.components):
        return "inconclusive"
    return "mu1-equals-lambda-bar"
