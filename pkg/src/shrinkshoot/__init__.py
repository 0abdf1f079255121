"""Profile curves, perimeters and Gaussian-density entropies of rotationally
symmetric self-shrinkers, computed by adaptive Runge-Kutta shooting."""

from .integrator import EventSpec, IntegratorConfig, OdeSystem, ShotResult, integrate
from .models import ProfilePath, ShrinkerFamily, log_entropy_density, rhs, shrinker_residual
from .shooting import (
    IntegrationFailure,
    NoSolutionError,
    SolveReport,
    solve_angenent,
    solve_cheng_wei,
    solve_mcgrath,
    solve_sphere,
)

__version__ = "0.1.0"

__all__ = [
    "EventSpec",
    "IntegratorConfig",
    "OdeSystem",
    "ShotResult",
    "integrate",
    "ProfilePath",
    "ShrinkerFamily",
    "log_entropy_density",
    "rhs",
    "shrinker_residual",
    "IntegrationFailure",
    "NoSolutionError",
    "SolveReport",
    "solve_angenent",
    "solve_cheng_wei",
    "solve_mcgrath",
    "solve_sphere",
    "__version__",
]
