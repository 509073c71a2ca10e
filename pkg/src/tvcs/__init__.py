"""Time-varying versus time-invariant control scheduling on linear networks."""

__version__ = "0.1.0"

from .communicability import (  # noqa: E402
    CommunicabilityProfile,
    DominanceReport,
    asymptotic_communicability,
    communicability_matrix,
    dominance,
    profile,
    scale_heterogeneity_test,
)
from .errors import (  # noqa: E402
    BudgetError,
    ControllabilityError,
    DegenerateBaselineError,
    DimensionError,
    ParseError,
    ScheduleError,
    TVCSError,
    UncontrollableError,
)
from .gramian import Metric, Schedule, gramian, metric, min_energy_control, reachability_ellipsoid, simulate  # noqa: E402
from .manipulation import ManifestProblem, ManipulationResult, find_min_manipulation, manipulation_sweep  # noqa: E402
from .netgen import GeneratorConfig, RawConnectivity, convert, generate, induction, transmission  # noqa: E402
from .scheduling import ChiReport, chi_report, chi_vs_horizon, exhaustive_schedule, greedy_schedule, tics_trace, tvcs_trace  # noqa: E402

__all__ = [
    "BudgetError",
    "ChiReport",
    "CommunicabilityProfile",
    "ControllabilityError",
    "DegenerateBaselineError",
    "DimensionError",
    "DominanceReport",
    "GeneratorConfig",
    "ManifestProblem",
    "ManipulationResult",
    "Metric",
    "ParseError",
    "RawConnectivity",
    "Schedule",
    "ScheduleError",
    "TVCSError",
    "UncontrollableError",
    "asymptotic_communicability",
    "chi_report",
    "chi_vs_horizon",
    "communicability_matrix",
    "convert",
    "dominance",
    "exhaustive_schedule",
    "find_min_manipulation",
    "generate",
    "gramian",
    "greedy_schedule",
    "induction",
    "manipulation_sweep",
    "metric",
    "min_energy_control",
    "profile",
    "reachability_ellipsoid",
    "scale_heterogeneity_test",
    "simulate",
    "tics_trace",
    "transmission",
    "tvcs_trace",
]
