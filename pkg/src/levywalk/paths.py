"""Step-path algebra and the walk path functional.

A `StepPath` is a right-continuous piecewise-constant path stored as strictly
increasing jump times plus cumulative values, starting at the origin. The
path functional takes a space path `a` and a strictly increasing time path
`d` sharing jump times and produces the continuous interpolated walk value

    w(t) = x            when t is an attained time value,
    w(t) = x + ((t - g) / (h - g)) * (y - x)   otherwise,

where g, h are the attained time values bracketing t and x, y the matching
space values. Everything here is a binary search over the stored cumulative
arrays; nothing is stateful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, HorizonError

__all__ = [
    "PhiEvaluation",
    "StepPath",
    "interpolate_grid",
    "inverse_at",
    "phi_eval",
    "phi_path",
    "range_contains",
]


@dataclass(frozen=True, eq=False)
class StepPath:
    """Piecewise-constant cadlag path: value 0 before the first jump time.

    values may be 1D (scalar path) or 2D with one row per jump. For use as
    the time component of the functional the values must be strictly
    increasing; that property is checked once at construction and cached.
    """

    jump_times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.ascontiguousarray(np.asarray(self.jump_times, dtype=float))
        values = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if times.ndim != 1 or len(times) == 0:
            raise ConfigError("jump_times must be a nonempty 1D array")
        if values.shape[0] != times.shape[0]:
            raise ConfigError("values must have one entry per jump time")
        if values.ndim not in (1, 2):
            raise ConfigError("values must be 1D or 2D")
        if times[0] < 0.0 or np.any(np.diff(times) <= 0.0):
            raise ConfigError("jump_times must be nonnegative and strictly increasing")
        object.__setattr__(self, "jump_times", times)
        object.__setattr__(self, "values", values)
        monotone = values.ndim == 1 and bool(
            values[0] > 0.0 and np.all(np.diff(values) > 0.0)
        )
        object.__setattr__(self, "_monotone", monotone)

    @property
    def is_monotone(self) -> bool:
        """True when the values form a strictly increasing positive scalar path."""
        return self._monotone

    @property
    def dimension(self) -> int:
        return 1 if self.values.ndim == 1 else self.values.shape[1]

    @property
    def last_value(self):
        return self.values[-1]

    def value_at(self, s: float):
        """Right-continuous evaluation in the path's own parameter."""
        idx = int(np.searchsorted(self.jump_times, s, side="right"))
        if idx == 0:
            return 0.0 if self.values.ndim == 1 else np.zeros(self.values.shape[1])
        return self.values[idx - 1]


@dataclass(frozen=True)
class PhiEvaluation:
    """One evaluation of the path functional at time t.

    x/y are the bracketing space values and g/h the bracketing attained time
    values (g <= t <= h); in_range flags an exact hit of an attained value,
    in which case w == x.
    """

    t: float
    x: np.ndarray
    y: np.ndarray
    g: float
    h: float
    in_range: bool
    w: np.ndarray


def _require_time_path(d: StepPath):
    if not d.is_monotone:
        raise ConfigError("time path must have strictly increasing positive scalar values")


def inverse_at(d: StepPath, t: float) -> float:
    """First passage e(t) = inf{s : d(s) > t} of a monotone step path."""
    _require_time_path(d)
    if t >= d.values[-1]:
        raise HorizonError(f"t={t} is at or beyond the last represented value {d.values[-1]}")
    idx = int(np.searchsorted(d.values, t, side="right"))
    return float(d.jump_times[idx])


def range_contains(d: StepPath, t: float) -> bool:
    """Whether t is an attained value of the path (0 counts: d(0) = 0)."""
    _require_time_path(d)
    if t == 0.0:
        return True
    idx = int(np.searchsorted(d.values, t, side="right"))
    return idx > 0 and d.values[idx - 1] == t


def _broadcast_origin(a: StepPath):
    return 0.0 if a.values.ndim == 1 else np.zeros(a.values.shape[1])


def phi_eval(a: StepPath, d: StepPath, t: float) -> PhiEvaluation:
    """Evaluate the interpolation functional at a single time.

    Requires the two paths to share jump times (same skeleton). Queries at or
    beyond the last attained time value raise HorizonError: the bracketing
    step would lie outside the stored arrays.
    """
    _require_time_path(d)
    if a.values.shape[0] != d.values.shape[0]:
        raise ConfigError("space and time paths must share jump times")
    t = float(t)
    if t < 0.0:
        raise ConfigError(f"query time must be nonnegative, got {t}")
    j = int(np.searchsorted(d.values, t, side="right"))
    if j == len(d.values):
        raise HorizonError(f"t={t} has no bracketing step within the represented horizon")
    origin = _broadcast_origin(a)
    if j == 0:
        g, x = 0.0, origin
    else:
        g, x = float(d.values[j - 1]), a.values[j - 1]
    h = float(d.values[j])
    y = a.values[j]
    in_range = t == g
    if in_range:
        w = np.array(x, dtype=float, copy=True)
    else:
        # slope-first evaluation: when y - x equals h - g bitwise the slope
        # is exactly one and the query reproduces t to a single rounding
        slope = (np.asarray(y) - np.asarray(x)) / (h - g)
        w = x + (t - g) * slope
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    return PhiEvaluation(t=t, x=x, y=y, g=g, h=h, in_range=bool(in_range), w=w)


def phi_path(a: StepPath, d: StepPath, query_grid) -> np.ndarray:
    """Vectorized functional over a sorted grid; one row per query time.

    Matches phi_eval pointwise. The whole grid must lie strictly below the
    last attained time value.
    """
    _require_time_path(d)
    if a.values.shape[0] != d.values.shape[0]:
        raise ConfigError("space and time paths must share jump times")
    q = np.asarray(query_grid, dtype=float)
    if q.ndim != 1:
        raise ConfigError("query grid must be 1D")
    if len(q) and (np.any(np.diff(q) < 0.0) or q[0] < 0.0):
        raise ConfigError("query grid must be sorted and nonnegative")
    if len(q) == 0:
        vals = a.values if a.values.ndim == 2 else a.values[:, None]
        return np.empty((0, vals.shape[1]))
    if q[-1] >= d.values[-1]:
        raise HorizonError(
            f"grid reaches {q[-1]}, at or beyond the represented horizon {d.values[-1]}"
        )
    vals = a.values if a.values.ndim == 2 else a.values[:, None]
    return interpolate_grid(d.values, vals, q)


def interpolate_grid(time_values: np.ndarray, space_values: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Core of phi_path: bracketing interpolation, no validation.

    time_values (n,) strictly increasing, space_values (n, m), q sorted with
    q[-1] < time_values[-1]. Callers are responsible for those conditions.
    """
    idx = np.searchsorted(time_values, q, side="right")
    prev = np.maximum(idx - 1, 0)
    has_prev = idx > 0
    g = np.where(has_prev, time_values[prev], 0.0)
    x = np.where(has_prev[:, None], space_values[prev], 0.0)
    h = time_values[idx]
    y = space_values[idx]
    slope = (y - x) / (h - g)[:, None]
    delta = np.where(q == g, 0.0, q - g)
    return x + delta[:, None] * slope
