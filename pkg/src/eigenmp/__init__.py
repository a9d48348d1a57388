"""eigenmp: generalized principal eigenvalues and maximum-principle tests
for degenerate elliptic operators, on 1D/2D grids."""

__version__ = "0.1.0"

from . import boundary, certify, domains, eigen, kernels, mp, operators, scheme, zoo  # noqa: F401
