"""Pointwise operator abstraction F(x, r, p, X) plus structural validators.

An OperatorSpec wraps a jet evaluator together with the metadata the rest of
the code needs: spatial dimension, homogeneity degree alpha, a linear-part
description when the operator is linear, and a small payload telling the
finite-difference compiler which discretization family to use.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class OperatorError(ValueError):
    pass


class DimensionMismatch(OperatorError):
    pass


GRAD_SINGULAR_TOL = 1e-12  # |p| below this triggers the gradient-singularity rule


@dataclass(frozen=True)
class Jet:
    """Arguments of F: position x, value r, gradient p, Hessian X."""

    x: np.ndarray
    r: float
    p: np.ndarray
    X: np.ndarray

    @property
    def dim(self):
        return self.x.shape[0]


def jet(x, r, p, X):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = x.shape[0]
    if p.shape != (n,) or X.shape != (n, n):
        raise DimensionMismatch("jet components disagree: x %s p %s X %s" % (x.shape, p.shape, X.shape))
    if not np.array_equal(X, X.T):
        raise OperatorError("Hessian argument must be stored symmetrically")
    return Jet(x, float(r), p, X)


@dataclass(frozen=True)
class LinearPart:
    """Coefficients of F[u] = -Tr(A(x) D^2 u) - b(x).Du - c(x) u.

    ``a_diag``, ``b`` and ``c`` are callables of the position array; A is
    restricted to diagonal matrices (every operator in the catalog has
    diagonal, positive-semidefinite A).
    """

    a_diag: object
    b: object
    c: object

    def matrices(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return (
            np.asarray(self.a_diag(x), dtype=float),
            np.asarray(self.b(x), dtype=float),
            np.asarray(self.c(x), dtype=float),
        )


@dataclass(frozen=True)
class OperatorSpec:
    name: str
    dim: int
    alpha: float
    kind: str  # "linear" | "first-order" | "fully-nonlinear"
    evaluator: object  # callable(Jet, side) -> float
    scheme: dict  # discretization payload understood by the compiler
    linear_part: LinearPart | None = None
    sample_box: tuple = ((-1.0, 1.0),)  # per-axis box for randomized validators
    shift0: float = 0.0  # added zero-order term shift0 * sign(r)|r|^alpha

    def evaluate(self, jt, side="sub"):
        return eval_jet(self, jt, side)


def signed_power(r, alpha):
    return np.sign(r) * np.abs(r) ** alpha


def eval_jet(spec, jt, side="sub"):
    """Evaluate F at a jet; ``side`` selects the envelope at gradient
    singularities ('sub' or 'super', see the infinity-Laplacian rule)."""
    if jt.dim != spec.dim:
        raise DimensionMismatch(
            "operator %s has dim %d, jet has dim %d" % (spec.name, spec.dim, jt.dim)
        )
    val = spec.evaluator(jt, side)
    if spec.shift0 != 0.0:
        val += spec.shift0 * signed_power(jt.r, spec.alpha)
    return float(val)


def shift(spec, lambda0):
    """The operator F[u] + lambda0 * sign(u)|u|^alpha (odd signed power).

    For linear operators (alpha = 1) this folds into the zero-order
    coefficient, so the shifted operator stays linear.
    """
    new = replace(spec, name="%s+%.6g*u^a" % (spec.name, lambda0), shift0=spec.shift0 + lambda0)
    if spec.kind == "linear" and spec.linear_part is not None:
        old = spec.linear_part
        lam = float(lambda0)
        lp = LinearPart(old.a_diag, old.b, lambda x, _c=old.c, _l=lam: np.asarray(_c(x)) - _l)
        new = replace(new, linear_part=lp)
    return new


# ---------------------------------------------------------------------------
# Concrete evaluators


def linear_evaluator(lp):
    def ev(jt, side):
        a, b, c = lp.matrices(jt.x[None, :])
        return float(-np.dot(a[0], np.diag(jt.X)) - np.dot(b[0], jt.p) - c[0] * jt.r)

    return ev


def eikonal_evaluator(bfun, cfun):
    def ev(jt, side):
        x = jt.x[None, :]
        return float(-bfun(x)[0] * np.linalg.norm(jt.p) - cfun(x)[0] * jt.r)

    return ev


def p_laplacian_evaluator(p):
    # Expanded (non-divergence) form; the continuous extension 0 at Du = 0.
    def ev(jt, side):
        g = np.linalg.norm(jt.p)
        if g < GRAD_SINGULAR_TOL:
            return 0.0
        ph = jt.p / g
        return float(-(g ** (p - 2)) * (np.trace(jt.X) + (p - 2) * ph @ jt.X @ ph))

    return ev


def inf_laplacian_evaluator():
    # At a gradient singularity the upper/lower envelope of -p.Xp/|p|^2 is
    # -eta_min / -eta_max; subsolution tests use the lower envelope -eta_max.
    def ev(jt, side):
        g = np.linalg.norm(jt.p)
        if g < GRAD_SINGULAR_TOL:
            eta = np.linalg.eigvalsh(jt.X)
            return float(-eta[-1]) if side == "sub" else float(-eta[0])
        ph = jt.p / g
        return float(-(ph @ jt.X @ ph))

    return ev


def pk_evaluator(k):
    # -(sum of the k largest Hessian eigenvalues), eigenvalues sorted ascending.
    def ev(jt, side):
        eta = np.linalg.eigvalsh(jt.X)
        return float(-np.sum(eta[-k:]))

    return ev


def pucci_max_evaluator():
    # -(sum of positive parts of the Hessian eigenvalues)
    #   = -sup_{0 <= A <= I} Tr(A X).
    def ev(jt, side):
        eta = np.linalg.eigvalsh(jt.X)
        return float(-np.sum(np.maximum(eta, 0.0)))

    return ev


# ---------------------------------------------------------------------------
# Randomized structural validators


@dataclass
class EllipticityReport:
    samples: int
    violations: list = field(default_factory=list)
    max_violation: float = 0.0

    @property
    def ok(self):
        return not self.violations


@dataclass
class HomogeneityReport:
    samples: int
    max_relative_error: float = 0.0


def _random_jets(spec, n, rng):
    lo = np.array([b[0] for b in spec.sample_box])
    hi = np.array([b[1] for b in spec.sample_box])
    xs = rng.uniform(lo, hi, size=(n, spec.dim))
    rs = rng.normal(size=n)
    ps = rng.normal(size=(n, spec.dim))
    Ms = rng.normal(size=(n, spec.dim, spec.dim))
    Xs = Ms + np.transpose(Ms, (0, 2, 1))
    return xs, rs, ps, Xs


def check_degenerate_ellipticity(spec, samples, rng_seed=0, tol=1e-9):
    """Sample F(x,r,p,X+Y) <= F(x,r,p,X) + tol with random PSD increments Y."""
    if samples < 1:
        raise OperatorError("samples must be >= 1")
    rng = np.random.default_rng(rng_seed)
    xs, rs, ps, Xs = _random_jets(spec, samples, rng)
    report = EllipticityReport(samples=samples)
    for i in range(samples):
        M = rng.normal(size=(spec.dim, spec.dim))
        Y = M.T @ M
        j0 = jet(xs[i], rs[i], ps[i], Xs[i])
        j1 = jet(xs[i], rs[i], ps[i], Xs[i] + Y)
        f0 = eval_jet(spec, j0)
        f1 = eval_jet(spec, j1)
        gap = f1 - f0
        allowance = tol * (1.0 + abs(f0) + abs(f1))
        if gap > allowance:
            report.violations.append({"x": xs[i].tolist(), "gap": float(gap)})
            report.max_violation = max(report.max_violation, float(gap))
    return report


def check_homogeneity(spec, samples, rng_seed=0, tol=1e-10):
    """Worst relative error of F(tau*jet) = tau^alpha F(jet) over random jets."""
    if samples < 1:
        raise OperatorError("samples must be >= 1")
    rng = np.random.default_rng(rng_seed)
    xs, rs, ps, Xs = _random_jets(spec, samples, rng)
    taus = rng.uniform(1e-3, 10.0, size=samples)
    worst = 0.0
    for i in range(samples):
        t = taus[i]
        f = eval_jet(spec, jet(xs[i], rs[i], ps[i], Xs[i]))
        ft = eval_jet(spec, jet(xs[i], t * rs[i], t * ps[i], t * Xs[i]))
        scale = t ** spec.alpha
        err = abs(ft - scale * f) / (1.0 + scale * abs(f))
        worst = max(worst, float(err))
    return HomogeneityReport(samples=samples, max_relative_error=worst)
