"""Hawking-type functionals on small spheres in model 3-manifolds."""

from ._core import (
    DegenerateProbeError,
    DomainError,
    FitError,
    GridMismatchError,
    HawkingError,
    ImmersionError,
    Lagrangian,
    ManifoldModel,
    NoConvergenceError,
    ParseError,
    SingularMetricError,
    StallError,
    StepSizeError,
    SurfaceShape,
    UnsupportedDegreeError,
    concentration_potential,
    evaluate,
    exact_moment,
    expansion_check,
    identity_suite,
    minimize,
    moment_suite,
)

__version__ = "0.3.0"

__all__ = [name for name in dir() if not name.startswith("_")]
