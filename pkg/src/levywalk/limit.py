"""Coupled stable limit pair via truncated jump series, and the limit process.

For tail index beta in (0, 1) the pair (A, D) is a driftless jump process
whose every jump couples a positive duration r to a displacement r * theta.
On a horizon [0, u] the jumps are a Poisson series: standard arrivals
Gamma_k give sizes r_k = (Gamma(1-beta) * Gamma_k / u)^(-1/beta), uniform
arrival times on [0, u], i.i.d. directions. Truncation keeps either the K
largest jumps or all jumps of size >= min_jump; the discarded mass has the
closed-form bound exposed below.

The limit process itself is the path functional applied to (A, D). For tail
index in (1, 2) the marginal limit is sampled exactly instead (no series):
see stable_limit_marginal.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _kernels as kernels
from ._rng import stream
from .errors import ConfigError, HorizonError
from .paths import StepPath, interpolate_grid, phi_eval
from .stable import (
    DirectionLaw,
    _require_subordinator_index,
    sample_one_sided_stable,
    sample_symmetric_stable,
    symmetric_stable_scale,
)

__all__ = [
    "JumpSeries",
    "LimitPathPair",
    "Truncation",
    "build_limit_pair",
    "discarded_mass_bound",
    "limit_marginal_samples",
    "limit_path",
    "limit_process_at",
    "query_cap",
    "sample_jump_series",
    "stable_limit_marginal",
]

_JUMP_GUARD = 2**31 - 1


@dataclass(frozen=True)
class Truncation:
    """Series truncation rule: exactly one of min_jump / max_jumps is set."""

    min_jump: float | None = None
    max_jumps: int | None = None

    def __post_init__(self):
        if (self.min_jump is None) == (self.max_jumps is None):
            raise ConfigError("set exactly one of min_jump or max_jumps")
        if self.min_jump is not None and not self.min_jump > 0.0:
            raise ConfigError(f"min_jump must be positive, got {self.min_jump}")
        if self.max_jumps is not None and self.max_jumps < 1:
            raise ConfigError(f"max_jumps must be a positive integer, got {self.max_jumps}")

    @classmethod
    def by_min_jump(cls, eps: float) -> "Truncation":
        return cls(min_jump=float(eps))

    @classmethod
    def by_max_jumps(cls, k: int) -> "Truncation":
        return cls(max_jumps=int(k))


def discarded_mass_bound(beta: float, u: float, eps: float) -> float:
    """Expected total duration mass below the cutoff on a horizon of length u.

    Integral of r against the jump intensity over (0, eps):
    u * beta * eps^(1-beta) / ((1-beta) * Gamma(1-beta)).
    """
    _require_subordinator_index(beta)
    if not (u > 0.0 and eps > 0.0):
        raise ConfigError("horizon and cutoff must be positive")
    return u * beta * eps ** (1.0 - beta) / ((1.0 - beta) * special.gamma(1.0 - beta))


@dataclass(frozen=True, eq=False)
class JumpSeries:
    """Arrival-ordered truncated jump series on [0, horizon].

    levels holds the Poisson arrivals Gamma_k matching each kept jump (same
    arrival order as sizes); sorted ascending they enumerate jumps largest
    first.
    """

    beta: float
    horizon: float
    direction_law: DirectionLaw
    truncation: Truncation
    arrival_times: np.ndarray
    sizes: np.ndarray
    directions: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        n = len(self.arrival_times)
        if not (len(self.sizes) == len(self.levels) == self.directions.shape[0] == n):
            raise ConfigError("series arrays must share their length")
        if n and (np.any(self.sizes <= 0.0) or np.any(self.arrival_times < 0.0)
                  or np.any(self.arrival_times > self.horizon)):
            raise ConfigError("series entries violate size/arrival invariants")

    @property
    def jump_count(self) -> int:
        return len(self.sizes)

    @property
    def discarded_mass(self) -> float:
        """Analytic bound on the dropped duration mass.

        Exact cutoff bound in min_jump mode; in max_jumps mode the smallest
        kept size caps the cutoff, giving a conservative bound.
        """
        if self.truncation.min_jump is not None:
            return discarded_mass_bound(self.beta, self.horizon, self.truncation.min_jump)
        if self.jump_count == 0:
            return float("inf")
        eps = float(np.min(self.sizes))
        return discarded_mass_bound(self.beta, self.horizon, eps)


def sample_jump_series(
    beta: float,
    direction_law: DirectionLaw,
    u: float,
    truncation: Truncation,
    rng,
) -> JumpSeries:
    """Draw the truncated series of coupled jumps on the horizon [0, u]."""
    _require_subordinator_index(beta)
    if not u > 0.0:
        raise ConfigError(f"horizon must be positive, got {u}")
    if truncation.min_jump is not None:
        level_max = u * truncation.min_jump ** (-beta) / special.gamma(1.0 - beta)
        max_jumps = _JUMP_GUARD
    else:
        level_max = np.inf
        max_jumps = truncation.max_jumps
    dir_kind, atoms, cumw = direction_law.kernel_args()
    gam, arr_u, th = kernels.series_raw(
        rng, dir_kind, atoms, cumw, direction_law.m, float(level_max), int(max_jumps)
    )
    sizes = (special.gamma(1.0 - beta) * gam / u) ** (-1.0 / beta)
    arrivals = u * arr_u
    order = np.argsort(arrivals, kind="stable")
    return JumpSeries(
        beta=float(beta),
        horizon=float(u),
        direction_law=direction_law,
        truncation=truncation,
        arrival_times=np.ascontiguousarray(arrivals[order]),
        sizes=np.ascontiguousarray(sizes[order]),
        directions=np.ascontiguousarray(th[order]),
        levels=np.ascontiguousarray(gam[order]),
    )


@dataclass(frozen=True, eq=False)
class LimitPathPair:
    """The coupled pair as step paths sharing jump times."""

    A: StepPath
    D: StepPath

    def __post_init__(self):
        if self.A.values.shape[0] != self.D.values.shape[0]:
            raise ConfigError("pair components must share jump times")


def build_limit_pair(series: JumpSeries) -> LimitPathPair:
    """Cumulate the arrival-ordered series into the coupled step paths."""
    if series.jump_count == 0:
        raise ConfigError("cannot build a path pair from an empty series")
    d_vals = np.cumsum(series.sizes)
    a_vals = np.cumsum(series.sizes[:, None] * series.directions, axis=0)
    times = series.arrival_times
    return LimitPathPair(A=StepPath(times, a_vals), D=StepPath(times, d_vals))


def limit_process_at(pair: LimitPathPair, t: float) -> np.ndarray:
    """Limit-process value at t, by bracketing interpolation of the pair."""
    return phi_eval(pair.A, pair.D, t).w


def limit_path(pair: LimitPathPair, query_grid) -> np.ndarray:
    """Vectorized limit_process_at over a sorted grid; shape (len(grid), m)."""
    from .paths import phi_path

    return phi_path(pair.A, pair.D, query_grid)


@functools.lru_cache(maxsize=32)
def _unit_subordinator_median(beta: float) -> float:
    """MC median of the standard one-sided stable variable, fixed seed."""
    gen = stream(0x5EED_CAFE, "oracle", 0)
    draws = sample_one_sided_stable(beta, gen, size=20001)
    return float(np.median(draws))


def query_cap(beta: float, u: float, safety: float = 0.9) -> float:
    """Largest recommended query time for a series horizon u.

    safety * median of the subordinator value at u; queries past this point
    increasingly condition on an atypically fast-growing path.
    """
    _require_subordinator_index(beta)
    return safety * u ** (1.0 / beta) * _unit_subordinator_median(beta)


def _limit_block(args):
    (master_seed, replica_lo, count, beta, dir_law, u, trunc, q, m) = args
    out = np.empty((count, len(q), m))
    for i in range(count):
        replica = replica_lo + i
        gen = stream(master_seed, "limit", replica)
        series = sample_jump_series(beta, dir_law, u, trunc, gen)
        d_vals = np.cumsum(series.sizes)
        if series.jump_count == 0 or not d_vals[-1] > q[-1]:
            reach = float(d_vals[-1]) if series.jump_count else 0.0
            raise HorizonError(
                f"replica {replica}: series reaches only {reach}, "
                f"grid needs more than {q[-1]}; raise the horizon u"
            )
        a_vals = np.cumsum(series.sizes[:, None] * series.directions, axis=0)
        out[i] = interpolate_grid(d_vals, a_vals, q)
    return replica_lo, out


def limit_marginal_samples(
    beta: float,
    direction_law: DirectionLaw,
    times,
    n: int,
    master_seed: int,
    u: float,
    truncation: Truncation | None = None,
    workers: int = 1,
    replica_offset: int = 0,
    enforce_cap: bool = True,
) -> np.ndarray:
    """Independent limit-process marginals; shape (n, len(times), m).

    Each replica samples its own series on [0, u] and evaluates the path
    functional on the grid. The grid must stay within query_cap(beta, u)
    unless enforce_cap is switched off; a replica whose subordinator still
    falls short raises HorizonError rather than extrapolating.
    """
    _require_subordinator_index(beta)
    q = np.ascontiguousarray(np.asarray(times, dtype=float))
    if q.ndim != 1 or len(q) == 0:
        raise ConfigError("times must be a nonempty 1D array")
    if np.any(np.diff(q) < 0.0) or q[0] < 0.0:
        raise ConfigError("times must be sorted and nonnegative")
    if n <= 0:
        raise ConfigError(f"replica count must be positive, got {n}")
    if truncation is None:
        truncation = Truncation.by_min_jump(1e-6)
    if enforce_cap:
        cap = query_cap(beta, u)
        if q[-1] > cap:
            raise ConfigError(
                f"grid reaches {q[-1]} but the horizon u={u} is only safe up to "
                f"{cap:.6g}; raise u or pass enforce_cap=False"
            )
    m = direction_law.m
    workers = max(1, int(workers))
    out = np.empty((n, len(q), m))
    if workers == 1:
        _, block = _limit_block(
            (master_seed, replica_offset, n, beta, direction_law, u, truncation, q, m)
        )
        out[:] = block
    else:
        block_size = max(1, -(-n // (workers * 4)))
        jobs = []
        lo = 0
        while lo < n:
            count = min(block_size, n - lo)
            jobs.append(
                (master_seed, replica_offset + lo, count, beta, direction_law, u, truncation, q, m)
            )
            lo += count
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for replica_lo, block in pool.map(_limit_block, jobs):
                rel = replica_lo - replica_offset
                out[rel : rel + len(block)] = block
    return out


def stable_limit_marginal(
    beta: float,
    direction_law: DirectionLaw,
    t: float,
    rng,
    size=None,
):
    """Exact draw(s) of the tail-index-(1,2) limit marginal at time t.

    Only the one-dimensional centered (hence symmetric) direction law has an
    exact sampler; the value is (t * sigma)^(1/beta) times a standard
    symmetric stable draw, sigma = |cos(pi beta / 2)|.
    """
    if not 1.0 < beta < 2.0:
        raise ConfigError(f"stable limit marginal needs tail index in (1, 2), got {beta}")
    if not direction_law.is_centered:
        raise ConfigError("limit marginal requires a centered direction law (mean zero)")
    if direction_law.m != 1:
        raise ConfigError("exact stable marginal is implemented for dimension 1 only")
    if not t > 0.0:
        raise ConfigError(f"time must be positive, got {t}")
    scale = (t * symmetric_stable_scale(beta)) ** (1.0 / beta)
    draw = sample_symmetric_stable(beta, rng, size=size)
    return scale * draw
