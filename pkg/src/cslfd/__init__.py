"""Conservative semi-Lagrangian finite difference schemes in flux-difference form."""

from cslfd.grid import Field, Grid1D, Grid2D, field_error_norms, periodic_index
from cslfd.quadrature import QuadratureRule, builtin_rule
from cslfd.weno import StencilSpec

__all__ = [
    "Field",
    "Grid1D",
    "Grid2D",
    "QuadratureRule",
    "StencilSpec",
    "builtin_rule",
    "field_error_norms",
    "periodic_index",
]

__version__ = "0.1.0"
