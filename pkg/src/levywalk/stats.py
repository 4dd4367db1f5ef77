"""Monte Carlo harness: moments, scaling-exponent fits, KS comparisons.

Everything here is deterministic given (seed, config): replica i always owns
the stream keyed by its index, and reductions run in fixed replica order, so
reports are bit-for-bit reproducible at any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .errors import ConfigError, DiagnosticError
from .limit import limit_marginal_samples, stable_limit_marginal
from .walk import RescaleSpec, walk_marginal_samples

__all__ = [
    "ConvergenceReport",
    "ExponentFit",
    "KSReport",
    "MomentReport",
    "convergence_suite",
    "critical_value",
    "estimate_moments",
    "fit_variance_exponent",
    "ks_two_sample",
    "path_variation",
]


@dataclass(frozen=True, eq=False)
class MomentReport:
    """Sample moments of a process marginal on a time grid.

    mean has shape (nt, m); second_moment is E of the squared norm. variance
    is the unbiased total variance (summed over components).
    """

    t_grid: np.ndarray
    mean: np.ndarray
    second_moment: np.ndarray
    variance: np.ndarray
    se_mean: np.ndarray
    se_second_moment: np.ndarray
    replicas: int


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    intercept: float
    residual: float
    t_range: tuple[float, float]


@dataclass(frozen=True)
class KSReport:
    statistic: float
    n1: int
    n2: int
    p_value: float
    level: float
    rejected: bool


def moment_report_from_samples(t_grid, samples: np.ndarray) -> MomentReport:
    """Reduce marginal samples of shape (n, nt, m) into a MomentReport."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 2:
        x = x[:, :, None]
    n = x.shape[0]
    if n < 2:
        raise ConfigError("moment estimation needs at least two replicas")
    tg = np.asarray(t_grid, dtype=float)
    if x.shape[1] != len(tg):
        raise ConfigError("samples and t_grid disagree on the number of times")
    mean = np.mean(x, axis=0)
    sq_norm = np.sum(x * x, axis=2)
    second = np.mean(sq_norm, axis=0)
    var = np.sum(np.var(x, axis=0, ddof=1), axis=1)
    se_mean = np.std(x, axis=0, ddof=1) / math.sqrt(n)
    se_second = np.std(sq_norm, axis=0, ddof=1) / math.sqrt(n)
    return MomentReport(
        t_grid=tg,
        mean=mean,
        second_moment=second,
        variance=var,
        se_mean=se_mean,
        se_second_moment=se_second,
        replicas=n,
    )


def estimate_moments(config, t_grid=None, workers: int = 1) -> MomentReport:
    """Marginal moments of the configured process on a time grid.

    config is an ExperimentConfig; its process field picks the walk or the
    limit driver. Requires at least 100 replicas: below that the standard
    errors reported alongside the moments stop being meaningful.
    """
    from .config import ExperimentConfig

    if not isinstance(config, ExperimentConfig):
        raise ConfigError("estimate_moments expects an ExperimentConfig")
    tg = np.asarray(config.t_grid if t_grid is None else t_grid, dtype=float)
    if config.replicas < 100:
        raise ConfigError("moment estimation requires at least 100 replicas")
    samples = sample_marginals(config, tg, workers=workers)
    return moment_report_from_samples(tg, samples)


def sample_marginals(config, t_grid, workers: int = 1, replica_offset: int = 0) -> np.ndarray:
    """Marginal samples (n, nt, m) for the configured process."""
    tg = np.asarray(t_grid, dtype=float)
    if config.process == "walk":
        rescale = config.rescale_obj()
        return walk_marginal_samples(
            config.moving_time_law_obj(),
            config.direction_law_obj(),
            tg,
            config.replicas,
            config.seed,
            rescale=rescale,
            workers=workers,
            replica_offset=replica_offset,
        )
    if config.process == "limit":
        if config.horizon is None:
            raise ConfigError("limit sampling requires the series horizon field 'horizon'")
        return limit_marginal_samples(
            config.beta,
            config.direction_law_obj(),
            tg,
            config.replicas,
            config.seed,
            u=config.horizon,
            truncation=config.truncation_obj(),
            workers=workers,
            replica_offset=replica_offset,
        )
    raise ConfigError(f"unknown process {config.process!r}, expected 'walk' or 'limit'")


def fit_variance_exponent(report: MomentReport) -> ExponentFit:
    """Least-squares slope of log variance against log time.

    Needs at least five grid points spanning a decade. A nonpositive
    variance estimate anywhere on the grid makes the log fit meaningless
    and raises.
    """
    t = np.asarray(report.t_grid, dtype=float)
    v = np.asarray(report.variance, dtype=float)
    if len(t) < 5:
        raise ConfigError("exponent fit needs at least 5 grid points")
    if np.any(t <= 0.0):
        raise ConfigError("exponent fit needs strictly positive times")
    if np.max(t) < 10.0 * np.min(t):
        raise ConfigError("exponent fit needs the grid to span at least one decade")
    if np.any(v <= 0.0):
        raise DiagnosticError(
            "variance estimate is nonpositive somewhere on the grid; "
            "the log-log fit is degenerate"
        )
    lt = np.log(t)
    lv = np.log(v)
    design = np.column_stack([lt, np.ones_like(lt)])
    coef, *_ = np.linalg.lstsq(design, lv, rcond=None)
    fitted = design @ coef
    residual = float(np.sqrt(np.mean((lv - fitted) ** 2)))
    return ExponentFit(
        exponent=float(coef[0]),
        intercept=float(coef[1]),
        residual=residual,
        t_range=(float(np.min(t)), float(np.max(t))),
    )


def _ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    a = np.sort(a)
    b = np.sort(b)
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(cdf_a - cdf_b)))


def _kolmogorov_sf(x: float) -> float:
    if x <= 0.0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = 2.0 * (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * x * x)
        total += term
        if abs(term) < 1e-16:
            break
    return min(max(total, 0.0), 1.0)


def ks_two_sample(sample1, sample2, level: float = 0.01) -> KSReport:
    """Two-sample KS test with the asymptotic p-value.

    Uses the finite-sample effective size with the small-sample continuity
    adjustment; both samples must be 1D with at least 100 points apiece.
    """
    a = np.asarray(sample1, dtype=float).ravel()
    b = np.asarray(sample2, dtype=float).ravel()
    if len(a) < 100 or len(b) < 100:
        raise ConfigError("KS comparison needs at least 100 points per sample")
    if not 0.0 < level < 1.0:
        raise ConfigError(f"level must lie in (0, 1), got {level}")
    d = _ks_statistic(a, b)
    en = math.sqrt(len(a) * len(b) / (len(a) + len(b)))
    p = _kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
    return KSReport(
        statistic=d,
        n1=len(a),
        n2=len(b),
        p_value=p,
        level=level,
        rejected=p < level,
    )


def critical_value(n1: int, n2: int, level: float = 0.01) -> float:
    """Asymptotic same-distribution KS critical value at the given level."""
    if n1 < 1 or n2 < 1:
        raise ConfigError("sample sizes must be positive")
    if not 0.0 < level < 1.0:
        raise ConfigError(f"level must lie in (0, 1), got {level}")
    c = math.sqrt(-math.log(level / 2.0) / 2.0)
    return c * math.sqrt((n1 + n2) / (n1 * n2))


def path_variation(values, t_grid=None) -> float:
    """Total variation of a sampled path along its grid: sum of step norms.

    For the walk this recovers elapsed time exactly (unit speed); for the
    limit process it estimates the variation from the grid mesh, a lower
    bound that grows toward the true variation as the mesh refines.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        return 0.0
    steps = np.diff(x, axis=0)
    return float(np.sum(np.sqrt(np.sum(steps * steps, axis=1))))


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """KS ladder across rescaling levels.

    One median statistic per ladder rung (over the macro replicas), the full
    per-macro table, whether the medians decrease along the ladder, and
    whether the final rung clears the acceptance threshold (twice the
    same-distribution critical value at the configured level).
    """

    ladder: tuple
    medians: tuple
    statistics: np.ndarray
    threshold: float
    decreasing: bool
    final_ok: bool
    passed: bool
    mode: str


def convergence_suite(config, workers: int = 1) -> ConvergenceReport:
    """Marginal-convergence KS ladder at t = 1 for the configured walk.

    Tail index below one compares the ballistically rescaled walk against
    simulated limit-process marginals; index in (1, 2) compares the
    superdiffusively rescaled walk against the exact stable marginal. The
    same replica streams are reused across ladder rungs (common random
    numbers), which stabilizes the rung-to-rung comparison; macros use
    disjoint stream blocks. KS is one-dimensional, so laws with m > 1 are
    compared through their first-coordinate projection.

    `oracle_replicas` sets the reference sample size separately from the
    walk side (default: equal). Oracle draws are far cheaper than walks, so
    a deep reference pushes the two-sample noise floor down to the
    one-sided 0.83/sqrt(replicas) level; the threshold uses the asymmetric
    critical value accordingly.
    """
    from .config import ExperimentConfig

    if not isinstance(config, ExperimentConfig):
        raise ConfigError("convergence_suite expects an ExperimentConfig")
    time_law = config.moving_time_law_obj()
    dir_law = config.direction_law_obj()
    beta = config.beta
    if beta is None:
        raise ConfigError("convergence suite requires the field 'beta'")
    ladder = tuple(float(c) for c in config.scale_ladder)
    if len(ladder) < 2 or any(c <= 0 for c in ladder):
        raise ConfigError("scale ladder needs at least two positive levels")
    n = config.replicas
    n_ref = n if config.oracle_replicas is None else config.oracle_replicas
    macros = config.macro_replicas
    if n < 100 or n_ref < 100:
        raise ConfigError("convergence suite needs at least 100 replicas per side")
    if macros < 1:
        raise ConfigError("macro replica count must be positive")
    level = config.ks_level

    if 0.0 < beta < 1.0:
        mode = "ballistic"
        if config.horizon is None:
            raise ConfigError("ballistic suite requires 'horizon' (the series horizon)")
    elif 1.0 < beta < 2.0:
        mode = "superdiffusive"
    else:
        raise ConfigError(f"no convergence regime for tail index {beta}")

    t_eval = np.array([1.0])
    stats = np.empty((len(ladder), macros))
    for mi in range(macros):
        offset = mi * n
        if mode == "ballistic":
            reference = limit_marginal_samples(
                beta,
                dir_law,
                t_eval,
                n_ref,
                config.seed,
                u=config.horizon,
                truncation=config.truncation_obj(),
                workers=workers,
                replica_offset=mi * n_ref,
            )[:, 0, 0]
        else:
            gen = stream(config.seed, "oracle", mi)
            reference = stable_limit_marginal(beta, dir_law, 1.0, gen, size=n_ref)
        for ci, c in enumerate(ladder):
            spec = RescaleSpec(mode=mode, c=c)
            walk_side = walk_marginal_samples(
                time_law,
                dir_law,
                t_eval,
                n,
                config.seed,
                rescale=spec,
                workers=workers,
                replica_offset=offset,
            )[:, 0, 0]
            stats[ci, mi] = _ks_statistic(walk_side, np.asarray(reference))
    medians = tuple(float(np.median(stats[ci])) for ci in range(len(ladder)))
    decreasing = all(medians[i + 1] < medians[i] for i in range(len(medians) - 1))
    threshold = 2.0 * critical_value(n, n_ref, level)
    final_ok = medians[-1] < threshold
    return ConvergenceReport(
        ladder=ladder,
        medians=medians,
        statistics=stats,
        threshold=threshold,
        decreasing=decreasing,
        final_ok=final_ok,
        passed=decreasing and final_ok,
        mode=mode,
    )
