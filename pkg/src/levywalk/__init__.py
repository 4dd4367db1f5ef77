"""Unit-speed random walks with heavy-tailed excursions and their limits.

The package simulates the walk itself, the coupled jump pair it converges
to, and the interpolated limit process; provides the transform-side
formulas (symbols, law transforms, density inversion, the directional
fractional derivative); and ships a Monte Carlo harness plus a CLI for the
standard experiments.

Hot sampling kernels run on a compiled core when available; set
LEVYWALK_KERNELS=python to force the pure NumPy fallback, =c to require the
compiled core. The active choice is exposed as levywalk.BACKEND.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .analytics import (
    DensityGrid,
    GoverningReport,
    Symbol,
    flt_law,
    gaver_stehfest,
    governing_equation_check,
    invert_flt_1d,
    material_derivative,
    psi,
    psi_space,
    second_moment_ballistic,
    talbot,
)
from .config import ExperimentConfig, dump_config, load_config
from .errors import (
    BranchError,
    ConfigError,
    DiagnosticError,
    HorizonError,
    LevyWalkError,
)
from .limit import (
    JumpSeries,
    LimitPathPair,
    Truncation,
    build_limit_pair,
    discarded_mass_bound,
    limit_marginal_samples,
    limit_path,
    limit_process_at,
    query_cap,
    sample_jump_series,
    stable_limit_marginal,
)
from .paths import PhiEvaluation, StepPath, inverse_at, phi_eval, phi_path, range_contains
from .stable import (
    DirectionLaw,
    MovingTimeLaw,
    normalizer_b,
    sample_direction,
    sample_moving_time,
    sample_one_sided_stable,
    sample_symmetric_stable,
    superdiffusive_scale,
    symmetric_stable_scale,
)
from .stats import (
    ConvergenceReport,
    ExponentFit,
    KSReport,
    MomentReport,
    convergence_suite,
    critical_value,
    estimate_moments,
    fit_variance_exponent,
    ks_two_sample,
    path_variation,
)
from .walk import (
    RescaleSpec,
    WalkSkeleton,
    rescaled_walk_at,
    simulate_skeleton,
    walk_at,
    walk_marginal_samples,
    walk_path,
)

__all__ = [
    "BACKEND",
    "BranchError",
    "ConfigError",
    "ConvergenceReport",
    "DensityGrid",
    "DiagnosticError",
    "DirectionLaw",
    "ExperimentConfig",
    "ExponentFit",
    "GoverningReport",
    "HorizonError",
    "JumpSeries",
    "KSReport",
    "LevyWalkError",
    "LimitPathPair",
    "MomentReport",
    "MovingTimeLaw",
    "PhiEvaluation",
    "RescaleSpec",
    "StepPath",
    "Symbol",
    "Truncation",
    "WalkSkeleton",
    "build_limit_pair",
    "convergence_suite",
    "critical_value",
    "discarded_mass_bound",
    "dump_config",
    "estimate_moments",
    "fit_variance_exponent",
    "flt_law",
    "gaver_stehfest",
    "governing_equation_check",
    "invert_flt_1d",
    "inverse_at",
    "ks_two_sample",
    "limit_marginal_samples",
    "limit_path",
    "limit_process_at",
    "load_config",
    "material_derivative",
    "normalizer_b",
    "path_variation",
    "phi_eval",
    "phi_path",
    "psi",
    "psi_space",
    "query_cap",
    "range_contains",
    "rescaled_walk_at",
    "sample_direction",
    "sample_jump_series",
    "sample_moving_time",
    "sample_one_sided_stable",
    "sample_symmetric_stable",
    "second_moment_ballistic",
    "simulate_skeleton",
    "stable_limit_marginal",
    "superdiffusive_scale",
    "symmetric_stable_scale",
    "talbot",
    "walk_at",
    "walk_marginal_samples",
    "walk_path",
    "__version__",
]
