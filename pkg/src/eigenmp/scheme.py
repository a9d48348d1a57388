"""Monotone finite-difference discretization of an operator on a grid.

Every operator family is discretized so that the per-node residual S_i(u) is
non-increasing in each neighbor value (the discrete counterpart of degenerate
ellipticity), which is what makes the Perron-style iterations in ``eigen``
and ``mp`` valid:

* linear, with diagonal A: unequal-arm second differences plus one-sided
  drift differences chosen per node by the sign of the drift coefficient;
* gradient norms (eikonal): per-axis max((u+ - r)/h, (u- - r)/h, 0) combined
  in Euclidean norm, entering with a nonpositive factor;
* p-Laplacian (1D): conservative flux differences of |s|^{p-2}s, monotone
  for every p > 1;
* sum of the k largest Hessian eigenvalues: k = N uses the exact trace;
  k = 1 uses the minimum of directional second differences over the four
  lattice directions (axes and diagonals);
* degenerate maximal Pucci: largest over the two lattice frames of the
  framewise sums of positive parts of directional second differences;
* infinity Laplacian: midrange scheme (max + min of extrapolated axis
  neighbors minus twice the center).

The directional schemes for the Hessian-eigenvalue operators trade angular
consistency for monotonicity; assembling a full discrete Hessian and taking
matrix eigenvalues is not monotone (off-diagonal perturbations are sign
indefinite), and every solver here relies on monotonicity.

Boundary handling: free unknowns live at interior nodes and band nodes with
nonnegative signed distance; all nodes strictly outside the closure are
pinned to zero.  A stencil arm that crosses the boundary is shortened to the
crossing point (fraction theta of the full arm, floored) with Dirichlet
value zero there, so an operator that degenerates at a boundary point keeps
that node free while a nondegenerate one is effectively pinned - the
discrete version of whether the boundary is felt.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import BAND, INTERIOR
from .operators import OperatorError, signed_power

THETA_FLOOR = 1e-6
RBIG = 1e9


@dataclass
class CompiledProblem:
    """Arrays consumed by the sweep kernels (both backends)."""

    family: str
    grid: object
    h: float
    dim: int
    alpha: float
    shift0: float
    band_strict: bool
    free: np.ndarray  # flat node indices carrying unknowns
    is_band: np.ndarray  # uint8 per free node
    nfree: int
    coef_scale: float
    # linear family
    own: np.ndarray | None = None
    W: np.ndarray | None = None  # (k, nfree) nonnegative neighbor weights
    nb: np.ndarray | None = None  # (k, nfree) indices into padded state
    # directional second differences: (ndir, nfree)
    d2_cP: np.ndarray | None = None
    d2_cM: np.ndarray | None = None
    d2_cO: np.ndarray | None = None
    d2_nbP: np.ndarray | None = None
    d2_nbM: np.ndarray | None = None
    ndir_axis: int = 0  # leading directions are the coordinate axes
    # viscous regularization folded over the axis directions
    visc: float = 0.0
    # eikonal
    bmag: np.ndarray | None = None
    czero: np.ndarray | None = None
    arm_hP: np.ndarray | None = None  # (dim, nfree) one-sided arm lengths
    arm_hM: np.ndarray | None = None
    arm_nbP: np.ndarray | None = None
    arm_nbM: np.ndarray | None = None
    # p-Laplacian
    pexp: float = 0.0
    # pk
    k_eigs: int = 0

    def state(self, values=None):
        """Padded value vector; the trailing sentinel entry is always 0."""
        u = np.zeros(self.grid.size + 1)
        if values is not None:
            u[:-1] = values
        return u


@dataclass
class DiscreteScheme:
    """An operator bound to a grid, with optional -eps*Laplacian term.

    ``side`` selects the sub/supersolution envelope for jet evaluation at
    gradient singularities; the compiled families are side-free.
    ``boundary_clause`` picks the reading of the relaxed Dirichlet condition
    for subsolutions at band nodes: ``relaxed-min`` (default) or the literal
    ``strict-max``.
    """

    spec: object
    grid: object
    viscous_eps: float = 0.0
    side: str = "sub"
    boundary_clause: str = "relaxed-min"
    _compiled: CompiledProblem | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.spec.dim != self.grid.dim:
            raise OperatorError(
                "operator dim %d does not match grid dim %d" % (self.spec.dim, self.grid.dim)
            )
        if self.viscous_eps < 0:
            raise OperatorError("viscous_eps must be >= 0")
        if self.boundary_clause not in ("relaxed-min", "strict-max"):
            raise OperatorError("boundary_clause must be relaxed-min or strict-max")

    def compiled(self):
        if self._compiled is None:
            self._compiled = compile_problem(self)
        return self._compiled

    def default_tolerance(self):
        """Interior residual tolerance: first-order consistency heuristic."""
        return 10.0 * self.grid.h * (1.0 + self.compiled().coef_scale)


# ---------------------------------------------------------------------------
# Compilation


def _axis_arms(grid, free, dvals):
    """Per axis and side: neighbor index into the padded state and arm
    fraction theta (boundary crossings point at the zero sentinel)."""
    dim = grid.dim
    npts = grid.npts
    strides = grid.axis_strides()
    sentinel = grid.size
    n = free.size
    nbP = np.empty((dim, n), dtype=np.int64)
    nbM = np.empty((dim, n), dtype=np.int64)
    thP = np.ones((dim, n))
    thM = np.ones((dim, n))
    multi = np.unravel_index(free, npts)
    for ax in range(dim):
        for sgn, nbA, thA in ((1, nbP, thP), (-1, nbM, thM)):
            idx_ok = (multi[ax] + sgn >= 0) & (multi[ax] + sgn < npts[ax])
            j = free + sgn * strides[ax]
            j = np.where(idx_ok, j, 0)
            dj = np.where(idx_ok, grid.d[j], -np.inf)
            di = dvals
            crossing = dj < 0
            theta = np.ones(n)
            denom = np.where(crossing, di - dj, 1.0)
            with np.errstate(invalid="ignore"):
                theta_raw = np.where(crossing, di / denom, 1.0)
            theta = np.where(crossing, np.maximum(theta_raw, THETA_FLOOR), 1.0)
            # infinite dj (off-lattice) -> theta_raw = 0 -> floored
            nbA[ax] = np.where(crossing, sentinel, j)
            thA[ax] = theta
    return nbP, nbM, thP, thM


def _diag_arms(grid, free, dvals):
    """Same as _axis_arms for the two diagonal lattice directions (2D)."""
    npts = grid.npts
    strides = grid.axis_strides()
    sentinel = grid.size
    n = free.size
    dirs = np.array([[1, 1], [1, -1]])
    nbP = np.empty((2, n), dtype=np.int64)
    nbM = np.empty((2, n), dtype=np.int64)
    thP = np.ones((2, n))
    thM = np.ones((2, n))
    multi = np.unravel_index(free, npts)
    for v, off in enumerate(dirs):
        for sgn, nbA, thA in ((1, nbP, thP), (-1, nbM, thM)):
            o = sgn * off
            ok = np.ones(n, dtype=bool)
            j = free.copy()
            for ax in range(2):
                ok &= (multi[ax] + o[ax] >= 0) & (multi[ax] + o[ax] < npts[ax])
                j = j + o[ax] * strides[ax]
            j = np.where(ok, j, 0)
            dj = np.where(ok, grid.d[j], -np.inf)
            crossing = dj < 0
            denom = np.where(crossing, dvals - dj, 1.0)
            with np.errstate(invalid="ignore"):
                theta_raw = np.where(crossing, dvals / denom, 1.0)
            theta = np.where(crossing, np.maximum(theta_raw, THETA_FLOOR), 1.0)
            nbA[v] = np.where(crossing, sentinel, j)
            thA[v] = theta
    return nbP, nbM, thP, thM


def _second_diff_coefs(thP, thM, base):
    """Unequal-arm second-difference weights, exact on quadratics."""
    cP = 2.0 / (base**2 * thP * (thP + thM))
    cM = 2.0 / (base**2 * thM * (thP + thM))
    cO = 2.0 / (base**2 * thP * thM)
    return cP, cM, cO


def compile_problem(scheme):
    grid = scheme.grid
    spec = scheme.spec
    h = grid.h
    dim = grid.dim
    free_mask = grid.free_mask()
    free = np.flatnonzero(free_mask).astype(np.int64)
    if free.size == 0:
        raise OperatorError("grid has no free nodes; refine h")
    is_band = (grid.node_class[free] == BAND).astype(np.uint8)
    dvals = grid.d[free]
    pts = grid.coords()[free]
    family = spec.scheme["family"]
    eps = float(scheme.viscous_eps)

    nbP, nbM, thP, thM = _axis_arms(grid, free, dvals)
    cp = CompiledProblem(
        family=family,
        grid=grid,
        h=h,
        dim=dim,
        alpha=float(spec.alpha),
        shift0=float(spec.shift0),
        band_strict=(scheme.boundary_clause == "strict-max"),
        free=free,
        is_band=is_band,
        nfree=free.size,
        coef_scale=1.0,
    )

    if family == "linear":
        a, b, c = spec.linear_part.matrices(pts)
        a = a.reshape(free.size, dim) + eps
        b = b.reshape(free.size, dim)
        c = np.asarray(c, dtype=float).reshape(free.size)
        if np.any(a < -1e-12):
            raise OperatorError("linear operator has negative diffusion coefficient")
        a = np.maximum(a, 0.0)
        own = np.zeros(free.size)
        W = np.zeros((2 * dim, free.size))
        nb = np.empty((2 * dim, free.size), dtype=np.int64)
        for ax in range(dim):
            cP, cM, cO = _second_diff_coefs(thP[ax], thM[ax], h)
            W[2 * ax] += a[:, ax] * cM
            W[2 * ax + 1] += a[:, ax] * cP
            own += a[:, ax] * cO
            # -b du: forward difference keeps the scheme monotone for b > 0,
            # backward for b < 0 (neighbor weight must be nonnegative).
            bp = np.maximum(b[:, ax], 0.0)
            bm = np.maximum(-b[:, ax], 0.0)
            W[2 * ax + 1] += bp / (thP[ax] * h)
            own += bp / (thP[ax] * h)
            W[2 * ax] += bm / (thM[ax] * h)
            own += bm / (thM[ax] * h)
            nb[2 * ax] = nbM[ax]
            nb[2 * ax + 1] = nbP[ax]
        own -= c
        # the zero-order shift of a linear operator is part of c already
        cp.own, cp.W, cp.nb = own, W, nb
        cp.coef_scale = float(np.max(np.sum(np.abs(a), axis=1) + np.sum(np.abs(b), axis=1) + np.abs(c)))
        return cp

    # shared axis arms for all nonlinear families
    cp.arm_nbP, cp.arm_nbM = nbP, nbM
    cp.arm_hP, cp.arm_hM = thP * h, thM * h
    cp.visc = eps

    if family == "eikonal":
        bvals = np.asarray(spec.scheme["b"](pts), dtype=float).reshape(free.size)
        cvals = np.asarray(spec.scheme["c"](pts), dtype=float).reshape(free.size)
        if np.any(bvals < -1e-12):
            raise OperatorError("eikonal coefficient b must be nonnegative")
        cp.bmag = np.maximum(bvals, 0.0)
        cp.czero = cvals
        cp.coef_scale = float(np.max(cp.bmag + np.abs(cvals)))
    elif family == "plap":
        if dim != 1:
            raise OperatorError("p-Laplacian scheme is 1D only")
        cp.pexp = float(spec.scheme["p"])
    elif family in ("pk", "pucci", "inflap"):
        cp.k_eigs = int(spec.scheme.get("k", 0))
        dirs = [(nbP, nbM, thP * h, thM * h, h)]
        if dim == 2 and not (family == "pk" and cp.k_eigs == dim):
            dnbP, dnbM, dthP, dthM = _diag_arms(grid, free, dvals)
            base = h * np.sqrt(2.0)
            dirs.append((dnbP, dnbM, dthP * base, dthM * base, base))
        allP, allM = [], []
        cPl, cMl, cOl = [], [], []
        for nP, nM, aP, aM, base in dirs:
            for v in range(nP.shape[0]):
                tp, tm = aP[v] / base, aM[v] / base
                cP, cM, cO = _second_diff_coefs(tp, tm, base)
                allP.append(nP[v])
                allM.append(nM[v])
                cPl.append(cP)
                cMl.append(cM)
                cOl.append(cO)
        cp.d2_nbP = np.array(allP)
        cp.d2_nbM = np.array(allM)
        cp.d2_cP = np.array(cPl)
        cp.d2_cM = np.array(cMl)
        cp.d2_cO = np.array(cOl)
        cp.ndir_axis = dim
    else:
        raise OperatorError("unknown scheme family %r" % family)
    return cp


# ---------------------------------------------------------------------------
# Public scheme operations


@dataclass
class Residual:
    """Per-node residual: the PDE value at free nodes, the pin value (u_i)
    at pinned nodes; ``dirichlet`` snapshots u for the boundary clauses."""

    scheme: DiscreteScheme
    pde: np.ndarray
    dirichlet: np.ndarray


def residual(scheme, u):
    """Residual field for a Field u (finite for finite input)."""
    from . import kernels

    cp = scheme.compiled()
    ufull = cp.state(u.values)
    s_free = kernels.backend().residual(cp, ufull)
    if not np.all(np.isfinite(s_free)):
        raise OperatorError("non-finite residual")
    pde = u.values.copy()  # pinned nodes report the pin value u_i
    pde[cp.free] = s_free
    return Residual(scheme, pde, u.values.copy())


@dataclass
class Verdict:
    ok: bool
    worst_node: int | None
    worst_value: float


def is_subsolution(scheme, u, tol):
    """Discrete subsolution test with the relaxed Dirichlet boundary clause.

    Interior: S_i(u) <= tol.  Band nodes inside the closure: combine
    (u_i, S_i) by min (relaxed) or max (strict, config switch).  Band nodes
    strictly outside the closure and exterior nodes: u_i <= tol.
    """
    if tol < 0:
        raise OperatorError("tol must be >= 0")
    cp = scheme.compiled()
    grid = scheme.grid
    res = residual(scheme, u)
    viol = np.zeros(grid.size)
    cls = grid.node_class
    free_m = np.zeros(grid.size, dtype=bool)
    free_m[cp.free] = True
    inter = free_m & (cls == INTERIOR)
    bandf = free_m & (cls == BAND)
    pinned = ~free_m
    viol[inter] = res.pde[inter]
    if scheme.boundary_clause == "relaxed-min":
        viol[bandf] = np.minimum(u.values[bandf], res.pde[bandf])
    else:
        viol[bandf] = np.maximum(u.values[bandf], res.pde[bandf])
    viol[pinned] = u.values[pinned]
    worst = int(np.argmax(viol))
    return Verdict(bool(viol[worst] <= tol), worst, float(viol[worst]))


def is_supersolution(scheme, phi, lam, tol):
    """Test S_i(phi) - lam*phi_i^alpha >= -tol at interior nodes only
    (the positive-supersolution class imposes nothing on the boundary)."""
    cp = scheme.compiled()
    grid = scheme.grid
    inter = grid.node_class == INTERIOR
    if np.any(phi.values[inter] <= 0):
        raise OperatorError("supersolution candidate must be positive at interior nodes")
    res = residual(scheme, phi)
    gap = res.pde - lam * signed_power(phi.values, cp.alpha)
    gap = np.where(inter, gap, np.inf)
    worst = int(np.argmin(gap))
    return Verdict(bool(gap[worst] >= -tol), worst, float(gap[worst]))


def monotonicity_check(scheme, trials=1000, rng_seed=0, delta_max=1.0, tol=1e-9):
    """Randomized degenerate-ellipticity test of the discrete scheme: bumping
    one node value never raises the residual elsewhere (up to tol)."""
    from . import kernels

    cp = scheme.compiled()
    rng = np.random.default_rng(rng_seed)
    backend = kernels.backend()
    violations = 0
    worst = 0.0
    for _ in range(trials):
        u = cp.state()
        u[:-1] = rng.normal(size=scheme.grid.size)
        j = cp.free[rng.integers(cp.nfree)]
        delta = rng.uniform(1e-3, delta_max)
        s0 = backend.residual(cp, u)
        u2 = u.copy()
        u2[j] += delta
        s1 = backend.residual(cp, u2)
        gap = s1 - s0
        scale = tol * (1.0 + np.abs(s0))
        mask = cp.free != j
        bad = gap[mask] > scale[mask]
        if np.any(bad):
            violations += 1
            worst = max(worst, float(np.max(gap[mask] - scale[mask])))
    return {"trials": trials, "violations": violations, "worst_excess": worst}
