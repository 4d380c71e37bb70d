"""Numerical laboratory for finite-time blow-up of semilinear wave models
on de Sitter and anti-de Sitter backgrounds."""

from .params import (
    DampingRoots,
    ModelParams,
    RegimeUnsupportedError,
    RootKind,
    Spacetime,
    damping_roots,
)
from .regimes import (
    Branch,
    BoundFamily,
    Dissipation,
    Growth,
    LifespanBound,
    RegimeReport,
    classify,
    critical_rates,
    dimension_thresholds,
    invert_theta,
    lifespan_bound,
    rho_crit,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BoundFamily",
    "DampingRoots",
    "Dissipation",
    "Growth",
    "LifespanBound",
    "ModelParams",
    "RegimeReport",
    "RegimeUnsupportedError",
    "RootKind",
    "Spacetime",
    "classify",
    "critical_rates",
    "damping_roots",
    "dimension_thresholds",
    "invert_theta",
    "lifespan_bound",
    "rho_crit",
    "__version__",
]
