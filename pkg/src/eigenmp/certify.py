"""Closed-form supersolution certificates and their verification.

A certificate is a positive function phi with analytic derivatives; checking
F[phi] - lambda*phi^alpha >= 0 on a dense sample set of the region gives a
sample-resolution lower bound for one of the generalized eigenvalues.  Which
one is a matter of where phi lives:

* defined and positive on a strict neighborhood of the closed target
  domain: bounds mu1 (the witness region must be declared, not inferred);
* positive with positive infimum on the target: bounds lambda-bar-1;
* merely positive inside: bounds lambda1 only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import OperatorError, eval_jet, jet, signed_power

MARGIN_TOL = 1e-10
INWARD_SHIFT = 1e-13
INF_POSITIVITY = 1e-9


@dataclass(frozen=True)
class Certificate:
    name: str
    family: str
    dim: int
    value: object  # callable (n, dim) -> (n,)
    grad: object  # callable (n, dim) -> (n, dim)
    hess: object  # callable (n, dim) -> (n, dim, dim)
    declared_region: object  # Domain where phi is claimed to supersolve

    def scaled(self, t):
        if t <= 0:
            raise OperatorError("certificate scaling must be positive")
        return Certificate(
            "%g*%s" % (t, self.name),
            self.family,
            self.dim,
            lambda x: t * self.value(x),
            lambda x: t * self.grad(x),
            lambda x: t * self.hess(x),
            self.declared_region,
        )


def power(n, declared_region):
    def val(x):
        return x[:, 0] ** n

    def grad(x):
        g = np.zeros_like(x)
        g[:, 0] = n * x[:, 0] ** (n - 1)
        return g

    def hess(x):
        return (n * (n - 1) * x[:, 0] ** (n - 2)).reshape(-1, 1, 1)

    return Certificate("x^%g" % n, "power", 1, val, grad, hess, declared_region)


def two_minus_sqrt(declared_region):
    def val(x):
        return 2.0 - np.sqrt(x[:, 0])

    def grad(x):
        return (-0.5 / np.sqrt(x[:, 0])).reshape(-1, 1)

    def hess(x):
        return (0.25 * x[:, 0] ** -1.5).reshape(-1, 1, 1)

    return Certificate("2-sqrt(x)", "two_minus_sqrt", 1, val, grad, hess, declared_region)


def one_plus_sqrt(declared_region):
    def val(x):
        return 1.0 + np.sqrt(x[:, 0])

    def grad(x):
        return (0.5 / np.sqrt(x[:, 0])).reshape(-1, 1)

    def hess(x):
        return (-0.25 * x[:, 0] ** -1.5).reshape(-1, 1, 1)

    return Certificate("1+sqrt(x)", "one_plus_sqrt", 1, val, grad, hess, declared_region)


def paraboloid(k, declared_region):
    dim = declared_region.dim

    def val(x):
        return k - np.sum(x**2, axis=1)

    def grad(x):
        return -2.0 * x

    def hess(x):
        return np.broadcast_to(-2.0 * np.eye(dim), (x.shape[0], dim, dim)).copy()

    return Certificate("%g-|x|^2" % k, "paraboloid", dim, val, grad, hess, declared_region)


def exp_tilt(eps, sigma, xi, declared_region):
    xi = np.asarray(xi, dtype=float)
    xi = xi / np.linalg.norm(xi)
    dim = xi.size

    def val(x):
        return 1.0 - eps * np.exp(sigma * (x @ xi))

    def grad(x):
        return (-eps * sigma * np.exp(sigma * (x @ xi)))[:, None] * xi[None, :]

    def hess(x):
        e = -eps * sigma**2 * np.exp(sigma * (x @ xi))
        return e[:, None, None] * np.outer(xi, xi)[None, :, :]

    return Certificate(
        "1-%g*exp(%g xi.x)" % (eps, sigma), "exp_tilt", dim, val, grad, hess, declared_region
    )


def constant(c, declared_region):
    dim = declared_region.dim

    def val(x):
        return np.full(x.shape[0], float(c))

    def grad(x):
        return np.zeros((x.shape[0], dim))

    def hess(x):
        return np.zeros((x.shape[0], dim, dim))

    return Certificate("const %g" % c, "constant", dim, val, grad, hess, declared_region)


@dataclass
class CertReport:
    lam: float
    margin: float
    classification: str
    sample_count: int
    positivity: float
    ok: bool
    notes: list = field(default_factory=list)

    def to_record(self):
        return {
            "type": "certificate",
            "lambda": self.lam,
            "margin": self.margin,
            "classification": self.classification,
            "samples": self.sample_count,
            "positivity": self.positivity,
            "ok": self.ok,
        }


def region_samples(domain, samples):
    """Uniform samples of the closed region (1D line, 2D lattice)."""
    lo, hi = domain.bounding_box
    if domain.dim == 1:
        return np.linspace(lo[0], hi[0], samples).reshape(-1, 1)
    m = int(np.ceil(np.sqrt(samples)))
    xs = np.linspace(lo[0], hi[0], m)
    ys = np.linspace(lo[1], hi[1], m)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return pts[domain.signed_distance(pts) >= -1e-12]


def strictly_contains(outer, inner, n=256):
    """Whether ``outer`` contains a neighborhood of the closure of ``inner``."""
    from .boundary import boundary_samples

    pts = np.array([s.point for s in boundary_samples(inner, n)])
    return bool(np.min(outer.signed_distance(pts)) > 1e-12)


def _evaluate(cert, spec, region, pts, notes):
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = cert.value(pts)
        grad = cert.grad(pts)
        hess = cert.hess(pts)
    finite = (
        np.isfinite(phi)
        & np.all(np.isfinite(grad), axis=1)
        & np.all(np.isfinite(hess), axis=(1, 2))
    )
    # The positivity and supersolution quantifiers run over the open region:
    # samples that land on its boundary with a singular derivative or a
    # vanishing phi are nudged inward instead of rejected.
    on_boundary = np.abs(region.signed_distance(pts)) <= 1e-12
    bad = (~finite) | ((phi <= 0) & on_boundary)
    if np.any(bad):
        centroid = region.centroid
        direction = centroid[None, :] - pts[bad]
        norms = np.linalg.norm(direction, axis=1, keepdims=True)
        direction = np.divide(direction, norms, out=np.zeros_like(direction), where=norms > 0)
        pts = pts.copy()
        pts[bad] = pts[bad] + INWARD_SHIFT * direction
        notes.append("%d singular sample(s) shifted inward by %g" % (int(bad.sum()), INWARD_SHIFT))
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = cert.value(pts)
            grad = cert.grad(pts)
            hess = cert.hess(pts)
    if np.any(phi <= 0):
        raise OperatorError("certificate is not positive on the sample set")
    if spec.kind == "linear":
        a, b, c = spec.linear_part.matrices(pts)
        hd = np.einsum("nii->ni", hess)
        fvals = -np.sum(a * hd, axis=1) - np.sum(b * grad, axis=1) - c * phi
        fvals = fvals + spec.shift0 * signed_power(phi, spec.alpha)
    else:
        fvals = np.array(
            [eval_jet(spec, jet(pts[i], phi[i], grad[i], 0.5 * (hess[i] + hess[i].T)), "super")
             for i in range(pts.shape[0])]
        )
    return pts, phi, fvals


def verify(cert, spec, target, lam, samples, shift_note=True):
    """Check F[phi] - lam*phi^alpha >= 0 on a sample set of the region.

    The verdict is ``ok`` when the sampled margin clears -1e-10; the
    classification follows from where phi is declared and how small it gets.
    """
    if samples < 100:
        raise OperatorError("need at least 100 samples")
    if cert.dim != spec.dim:
        raise OperatorError("certificate/operator dimension mismatch")
    notes = []
    mu_region = strictly_contains(cert.declared_region, target)
    region = cert.declared_region if mu_region else target
    pts = region_samples(region, samples)
    pts, phi, fvals = _evaluate(cert, spec, region, pts, notes)
    gap = fvals - lam * signed_power(phi, spec.alpha)
    margin = float(np.min(gap))
    positivity = float(np.min(phi))
    if mu_region:
        classification = "bounds-mu1"
    elif positivity > INF_POSITIVITY:
        classification = "bounds-lambda-bar1"
    else:
        classification = "bounds-lambda1"
    return CertReport(
        lam=float(lam),
        margin=margin,
        classification=classification,
        sample_count=int(pts.shape[0]),
        positivity=positivity,
        ok=bool(margin >= -MARGIN_TOL),
        notes=notes if shift_note else [],
    )


def best_lambda(cert, spec, target, samples):
    """sup{lambda : the sampled margin is nonnegative}.

    The margin is affine and strictly decreasing in lambda (phi > 0), so the
    supremum is the minimum over samples of F[phi]/phi^alpha.
    """
    if samples < 100:
        raise OperatorError("need at least 100 samples")
    notes = []
    mu_region = strictly_contains(cert.declared_region, target)
    region = cert.declared_region if mu_region else target
    pts = region_samples(region, samples)
    pts, phi, fvals = _evaluate(cert, spec, region, pts, notes)
    return float(np.min(fvals / signed_power(phi, spec.alpha)))
