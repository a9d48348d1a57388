"""Bounded domains, signed distances, uniform grids and node classification.

Shapes are restricted to intervals, axis-aligned rectangles and disks; their
signed distance functions are exact (positive inside), so inflating a domain
by ``eps`` is literally ``d(x) + eps``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Stencil: all lattice offsets within Chebyshev distance 1 of a node.
STENCIL_1D = np.array([[-1], [1]])
STENCIL_2D = np.array(
    [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]]
)


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """A bounded domain given by a base shape plus an inflation radius.

    shape: "interval" | "rectangle" | "disk"
    params: interval (a, b); rectangle (a, b, c, d); disk (cx, cy, radius)
    inflation: Minkowski-sum radius (>= 0); the signed distance of the
        inflated domain is the base signed distance plus ``inflation``.
    """

    shape: str
    params: tuple
    inflation: float = 0.0

    def __post_init__(self):
        if self.shape not in ("interval", "rectangle", "disk"):
            raise GridError("unknown shape %r" % (self.shape,))
        if self.inflation < 0:
            raise GridError("inflation must be nonnegative")
        if self.shape == "interval":
            a, b = self.params
            if not a < b:
                raise GridError("interval needs a < b")
        elif self.shape == "rectangle":
            a, b, c, d = self.params
            if not (a < b and c < d):
                raise GridError("rectangle needs a < b and c < d")
        else:
            if self.params[-1] <= 0:
                raise GridError("disk needs positive radius")

    @property
    def dim(self):
        return 1 if self.shape == "interval" else 2

    def signed_distance(self, pts):
        """Signed distance at points ``pts`` (shape (n, dim) or (dim,))."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.shape == "interval":
            (a, b) = self.params
            x = pts[:, 0]
            d = np.minimum(x - a, b - x)
        elif self.shape == "disk":
            cx, cy, r = self.params
            d = r - np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        else:
            a, b, c, dd = self.params
            # Exact box SDF: inside = min margin, outside = -distance to box.
            qx = np.maximum(a - pts[:, 0], pts[:, 0] - b)
            qy = np.maximum(c - pts[:, 1], pts[:, 1] - dd)
            outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
            inside = np.minimum(np.maximum(qx, qy), 0.0)
            d = -(outside + inside)
        return d + self.inflation

    @property
    def bounding_box(self):
        e = self.inflation
        if self.shape == "interval":
            a, b = self.params
            return np.array([a - e]), np.array([b + e])
        if self.shape == "disk":
            cx, cy, r = self.params
            lo = np.array([cx - r - e, cy - r - e])
            return lo, np.array([cx + r + e, cy + r + e])
        a, b, c, d = self.params
        return np.array([a - e, c - e]), np.array([b + e, d + e])

    @property
    def anchor(self):
        """Lattice reference point; grids are aligned so a node lands here.

        Inflation does not move the anchor: structural degeneracies of the
        catalog operators sit at base-shape reference points, and keeping
        those exactly on-lattice avoids float dust in the coefficients.
        """
        if self.shape == "interval":
            return np.array([self.params[0]])
        if self.shape == "disk":
            return np.array(self.params[:2], dtype=float)
        a, _, c, _ = self.params
        return np.array([a, c])

    @property
    def inradius(self):
        if self.shape == "interval":
            a, b = self.params
            r = 0.5 * (b - a)
        elif self.shape == "disk":
            r = self.params[-1]
        else:
            a, b, c, d = self.params
            r = 0.5 * min(b - a, d - c)
        return r + self.inflation

    @property
    def centroid(self):
        if self.shape == "interval":
            a, b = self.params
            return np.array([0.5 * (a + b)])
        if self.shape == "disk":
            return np.array(self.params[:2], dtype=float)
        a, b, c, d = self.params
        return np.array([0.5 * (a + b), 0.5 * (c + d)])


def interval(a, b):
    return Domain("interval", (float(a), float(b)))


def rectangle(a, b, c, d):
    return Domain("rectangle", (float(a), float(b), float(c), float(d)))


def disk(cx, cy, radius):
    return Domain("disk", (float(cx), float(cy), float(radius)))


def inflate(domain, eps):
    """The inflated domain Omega + B_eps (signed distance d + eps)."""
    if eps < 0:
        raise GridError("inflate needs eps >= 0")
    if eps == 0:
        return domain
    return Domain(domain.shape, domain.params, domain.inflation + eps)


# Node classes.
INTERIOR, BAND, EXTERIOR = 0, 1, 2


@dataclass
class Grid:
    """Uniform lattice over the domain's bounding box plus an exterior margin.

    Nodes are classified as interior (d >= h/2), boundary-band (|d| < h/2,
    or exterior stencil-neighbors of interior nodes) and exterior.  Solvers
    additionally split band nodes at d < 0 (strictly outside the closure):
    those are pinned to zero like exterior nodes.
    """

    domain: Domain
    h: float
    origin: np.ndarray
    npts: tuple
    d: np.ndarray = field(repr=False)
    node_class: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.domain.dim

    @property
    def size(self):
        return int(np.prod(self.npts))

    def coords(self):
        """Node coordinates, shape (size, dim), C-order flattening."""
        axes = [self.origin[k] + self.h * np.arange(self.npts[k]) for k in range(self.dim)]
        if self.dim == 1:
            return axes[0][:, None]
        X, Y = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def flat_index(self, multi):
        if self.dim == 1:
            return multi[..., 0]
        return multi[..., 0] * self.npts[1] + multi[..., 1]

    def stencil_offsets(self):
        return STENCIL_1D if self.dim == 1 else STENCIL_2D

    def axis_strides(self):
        return (1,) if self.dim == 1 else (self.npts[1], 1)

    def interior_mask(self):
        return self.node_class == INTERIOR

    def band_mask(self):
        return self.node_class == BAND

    def exterior_mask(self):
        return self.node_class == EXTERIOR

    def free_mask(self):
        """Nodes carrying degrees of freedom: interior plus band with d >= 0."""
        return (self.node_class == INTERIOR) | ((self.node_class == BAND) & (self.d >= 0))


def build_grid(domain, h):
    """Build the classified lattice for ``domain`` at mesh width ``h``.

    Raises GridError when ``h`` exceeds the domain's inradius: such a grid
    cannot resolve the smallest feature of the shape.
    """
    if h <= 0:
        raise GridError("h must be positive")
    if h > domain.inradius + 1e-12:
        raise GridError(
            "h=%g too coarse: the smallest resolvable feature (inradius) is %g"
            % (h, domain.inradius)
        )
    lo, hi = domain.bounding_box
    anchor = domain.anchor
    margin = 2  # cells of exterior margin beyond the bounding box
    origin = np.empty(domain.dim)
    npts = []
    for k in range(domain.dim):
        n_lo = int(np.ceil((anchor[k] - lo[k]) / h - 1e-9)) + margin
        n_hi = int(np.ceil((hi[k] - anchor[k]) / h - 1e-9)) + margin
        origin[k] = anchor[k] - n_lo * h
        npts.append(n_lo + n_hi + 1)
    npts = tuple(npts)

    grid = Grid(domain, float(h), origin, npts, None, None)
    pts = grid.coords()
    d = domain.signed_distance(pts)

    node_class = np.full(d.shape, EXTERIOR, dtype=np.int8)
    node_class[d >= h / 2] = INTERIOR
    node_class[np.abs(d) < h / 2] = BAND

    # Promote exterior stencil-neighbors of interior nodes into the band so
    # that no interior stencil reaches a plain exterior node.
    shape = npts
    cls_nd = node_class.reshape(shape)
    interior_nd = cls_nd == INTERIOR
    offs = grid.stencil_offsets()
    near_interior = np.zeros_like(interior_nd)
    for off in offs:
        shifted = interior_nd
        for k, o in enumerate(off):
            shifted = np.roll(shifted, o, axis=k)
            # roll wraps around; zero the wrapped slab
            if o != 0:
                sl = [slice(None)] * interior_nd.ndim
                sl[k] = slice(0, o) if o > 0 else slice(o, None)
                shifted = shifted.copy()
                shifted[tuple(sl)] = False
        near_interior |= shifted
    promote = (cls_nd == EXTERIOR) & near_interior
    cls_nd[promote] = BAND

    grid.d = d
    grid.node_class = cls_nd.ravel()
    return grid


@dataclass
class Field:
    """Grid function: one value per lattice node (flat, C-order)."""

    grid: Grid
    values: np.ndarray
    diverged: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise GridError("field shape does not match grid")
        if not self.diverged and not np.all(np.isfinite(self.values)):
            raise GridError("non-finite field values (flag diverged to allow)")

    def copy(self):
        return Field(self.grid, self.values.copy(), self.diverged)


def field_from_function(grid, fn):
    """Sample ``fn(points) -> values`` on every node of the grid."""
    vals = np.asarray(fn(grid.coords()), dtype=float)
    return Field(grid, vals)


def zero_field(grid):
    return Field(grid, np.zeros(grid.size))
