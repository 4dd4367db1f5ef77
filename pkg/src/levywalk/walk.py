"""Exact walk simulation and its space-time rescalings.

The walker moves at unit speed: it picks a duration J from the moving-time
law and a unit direction, travels J * direction, then renews. A skeleton
stores the per-step durations and directions plus the cumulative paths; the
walk value at any time inside the horizon interpolates the straddling step.

Rescalings come in three flavors keyed to the tail index of the moving
times: ballistic W(ct)/c for index below one, superdiffusive b(c) W(mu c t)
for index in (1, 2) with analytic mean mu, and diffusive W(ct)/sqrt(c) for
finite-variance moving times.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from ._rng import stream
from .errors import ConfigError, HorizonError
from .paths import StepPath
from .stable import DirectionLaw, MovingTimeLaw, superdiffusive_scale

__all__ = [
    "RescaleSpec",
    "WalkSkeleton",
    "rescaled_walk_at",
    "simulate_skeleton",
    "walk_at",
    "walk_marginal_samples",
    "walk_path",
]

_MODES = ("ballistic", "superdiffusive", "diffusive")


@dataclass(frozen=True, eq=False)
class WalkSkeleton:
    """Renewal data of one walk: durations, unit directions, covered horizon.

    moving_times has shape (n,), directions (n, m). The cumulative paths are
    built lazily; the final step straddles the horizon so evaluation is
    defined on all of [0, horizon].
    """

    moving_times: np.ndarray
    directions: np.ndarray
    horizon: float
    time_law: MovingTimeLaw | None = None
    direction_law: DirectionLaw | None = None

    def __post_init__(self):
        j = np.ascontiguousarray(np.asarray(self.moving_times, dtype=float))
        th = np.ascontiguousarray(np.atleast_2d(np.asarray(self.directions, dtype=float)))
        if th.shape[0] != j.shape[0]:
            raise ConfigError("need one direction per moving time")
        if j.ndim != 1 or len(j) == 0 or np.any(j <= 0.0):
            raise ConfigError("moving times must be a nonempty array of positive reals")
        object.__setattr__(self, "moving_times", j)
        object.__setattr__(self, "directions", th)
        t = np.cumsum(j)
        if not t[-1] >= self.horizon:
            raise ConfigError(
                f"steps cover only {t[-1]}, short of the claimed horizon {self.horizon}"
            )
        object.__setattr__(self, "_cum_times", t)
        object.__setattr__(self, "_cum_space", np.cumsum(j[:, None] * th, axis=0))

    @property
    def dimension(self) -> int:
        return self.directions.shape[1]

    @property
    def step_count(self) -> int:
        return len(self.moving_times)

    @property
    def time_path(self) -> StepPath:
        """Cumulative travel time after each completed step, indexed by step."""
        n = self.step_count
        return StepPath(np.arange(1.0, n + 1.0), self._cum_times)

    @property
    def space_path(self) -> StepPath:
        """Cumulative displacement after each completed step."""
        n = self.step_count
        return StepPath(np.arange(1.0, n + 1.0), self._cum_space)


def simulate_skeleton(
    time_law: MovingTimeLaw,
    direction_law: DirectionLaw,
    horizon: float,
    rng,
) -> WalkSkeleton:
    """Generate renewal steps until the cumulative time passes the horizon.

    The step that crosses the horizon is kept (one extra pair), so the walk
    is defined up to the horizon with no boundary truncation.
    """
    if not horizon > 0.0:
        raise ConfigError(f"horizon must be positive, got {horizon}")
    law_kind, la, lb = time_law.kernel_args()
    dir_kind, atoms, cumw = direction_law.kernel_args()
    j, th = kernels.walk_steps(
        rng, law_kind, la, lb, dir_kind, atoms, cumw, direction_law.m, float(horizon)
    )
    return WalkSkeleton(
        moving_times=j,
        directions=th,
        horizon=float(horizon),
        time_law=time_law,
        direction_law=direction_law,
    )


def walk_at(skeleton: WalkSkeleton, t: float) -> np.ndarray:
    """Walk position at time t: completed displacement plus the partial step."""
    t = float(t)
    if t < 0.0:
        raise ConfigError(f"walk time must be nonnegative, got {t}")
    if t > skeleton.horizon:
        raise HorizonError(f"t={t} exceeds the skeleton horizon {skeleton.horizon}")
    cum_t = skeleton._cum_times
    idx = int(np.searchsorted(cum_t, t, side="right"))
    if idx == 0:
        base = np.zeros(skeleton.dimension)
        g = 0.0
    else:
        base = skeleton._cum_space[idx - 1]
        g = cum_t[idx - 1]
    if t == g:
        return np.array(base, dtype=float, copy=True)
    return base + (t - g) * skeleton.directions[idx]


def walk_path(skeleton: WalkSkeleton, query_grid) -> np.ndarray:
    """Vectorized walk_at over a sorted grid; shape (len(grid), m)."""
    q = np.asarray(query_grid, dtype=float)
    if q.ndim != 1:
        raise ConfigError("query grid must be 1D")
    if len(q) == 0:
        return np.empty((0, skeleton.dimension))
    if np.any(np.diff(q) < 0.0) or q[0] < 0.0:
        raise ConfigError("query grid must be sorted and nonnegative")
    if q[-1] > skeleton.horizon:
        raise HorizonError(
            f"grid reaches {q[-1]}, beyond the skeleton horizon {skeleton.horizon}"
        )
    cum_t = skeleton._cum_times
    idx = np.searchsorted(cum_t, q, side="right")
    prev = np.maximum(idx - 1, 0)
    g = np.where(idx > 0, cum_t[prev], 0.0)
    base = np.where((idx > 0)[:, None], skeleton._cum_space[prev], 0.0)
    return base + (q - g)[:, None] * skeleton.directions[idx]


@dataclass(frozen=True)
class RescaleSpec:
    """Space-time scaling to apply on top of a walk.

    mode: ballistic (tail index < 1), superdiffusive (index in (1, 2)),
    or diffusive (finite-variance moving times). c is the scale factor.
    """

    mode: str
    c: float

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if not self.c > 0.0:
            raise ConfigError(f"scale factor c must be positive, got {self.c}")

    def factors(self, time_law: MovingTimeLaw) -> tuple[float, float]:
        """(time multiplier, space multiplier) after compatibility checks."""
        c = float(self.c)
        if self.mode == "ballistic":
            ok = time_law.kind == "exact_stable" or (
                time_law.kind == "pareto" and time_law.beta < 1.0
            )
            if not ok:
                raise ConfigError(
                    "ballistic scaling needs moving times with tail index below 1"
                )
            return c, 1.0 / c
        if self.mode == "superdiffusive":
            if time_law.kind != "pareto" or not 1.0 < time_law.beta < 2.0:
                raise ConfigError(
                    "superdiffusive scaling needs pareto moving times with index in (1, 2)"
                )
            mu = time_law.mean
            return mu * c, superdiffusive_scale(time_law.beta, time_law.x0, c)
        if time_law.kind != "exponential":
            raise ConfigError("diffusive scaling needs finite-variance moving times")
        return c, 1.0 / math.sqrt(c)


def rescaled_walk_at(skeleton: WalkSkeleton, spec: RescaleSpec, t: float) -> np.ndarray:
    """Evaluate the rescaled walk at t; the scaled time must fit the horizon."""
    if skeleton.time_law is None:
        raise ConfigError("skeleton carries no moving-time law; rescaling undefined")
    time_factor, space_factor = spec.factors(skeleton.time_law)
    return space_factor * walk_at(skeleton, time_factor * float(t))


def _marginal_block(args):
    (master_seed, replica_lo, count, law_args, dir_args, m, qtimes) = args
    law_kind, la, lb = law_args
    dir_kind, atoms, cumw = dir_args
    out = np.empty((count, len(qtimes), m))
    for i in range(count):
        gen = stream(master_seed, "walk", replica_lo + i)
        kernels.walk_marginals(gen, law_kind, la, lb, dir_kind, atoms, cumw, m, qtimes, out[i])
    return replica_lo, out


def walk_marginal_samples(
    time_law: MovingTimeLaw,
    direction_law: DirectionLaw,
    times,
    n: int,
    master_seed: int,
    rescale: RescaleSpec | None = None,
    workers: int = 1,
    replica_offset: int = 0,
) -> np.ndarray:
    """Independent walk (or rescaled walk) marginals; shape (n, len(times), m).

    Replica i always consumes the stream keyed by replica_offset + i, so the
    result is identical for any worker count. Times must be sorted.
    """
    q = np.ascontiguousarray(np.asarray(times, dtype=float))
    if q.ndim != 1 or len(q) == 0:
        raise ConfigError("times must be a nonempty 1D array")
    if np.any(np.diff(q) < 0.0) or q[0] < 0.0:
        raise ConfigError("times must be sorted and nonnegative")
    if n <= 0:
        raise ConfigError(f"replica count must be positive, got {n}")
    space_factor = 1.0
    if rescale is not None:
        time_factor, space_factor = rescale.factors(time_law)
        q = q * time_factor
    law_args = time_law.kernel_args()
    dir_args = direction_law.kernel_args()
    m = direction_law.m
    workers = max(1, int(workers))
    out = np.empty((n, len(q), m))
    if workers == 1:
        _, block = _marginal_block((master_seed, replica_offset, n, law_args, dir_args, m, q))
        out[:] = block
    else:
        block_size = max(1, -(-n // (workers * 4)))
        jobs = []
        lo = 0
        while lo < n:
            count = min(block_size, n - lo)
            jobs.append((master_seed, replica_offset + lo, count, law_args, dir_args, m, q))
            lo += count
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for replica_lo, block in pool.map(_marginal_block, jobs):
                rel = replica_lo - replica_offset
                out[rel : rel + len(block)] = block
    if space_factor != 1.0:
        out *= space_factor
    return out
