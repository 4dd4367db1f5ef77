"""Experiment configuration: one JSON document drives every CLI command.

The format is plain JSON (nested key/value). Unknown keys are rejected so a
typo cannot silently disable an option, and a parsed config serializes back
to the same document (module tests hold that round trip fixed). Law
subobjects mirror the constructors in `stable`:

    moving_time_law: {"kind": "pareto", "beta": 0.5, "x0": 1.0}
                     {"kind": "exact_stable", "beta": 0.5}
                     {"kind": "exponential", "rate": 1.0}
    direction_law:   {"kind": "atoms", "atoms": [[1.0], [-1.0]],
                      "weights": [0.5, 0.5]}
                     {"kind": "point_mass", "direction": [1.0]}
                     {"kind": "uniform_sphere", "m": 2}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .limit import Truncation
from .stable import DirectionLaw, MovingTimeLaw
from .walk import RescaleSpec

__all__ = ["ExperimentConfig", "load_config", "dump_config"]

_MAX_SEED = 2**64


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment needs, validated lazily per command."""

    process: str = "walk"
    seed: int = 0
    beta: float | None = None
    m: int | None = None
    replicas: int = 1000
    horizon: float | None = None
    t_grid: tuple = (1.0,)
    scale_ladder: tuple = (100.0, 1000.0, 10000.0)
    macro_replicas: int = 20
    oracle_replicas: int | None = None
    ks_level: float = 0.01
    moving_time_law: dict | None = None
    direction_law: dict | None = None
    truncation: dict | None = None
    rescale: dict | None = None
    density: dict | None = None
    k_grid: tuple = ()
    s_grid: tuple = ()
    out: str | None = None

    def __post_init__(self):
        if self.process not in ("walk", "limit"):
            raise ConfigError(f"process must be 'walk' or 'limit', got {self.process!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < _MAX_SEED:
            raise ConfigError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if self.replicas < 1:
            raise ConfigError(f"replicas must be positive, got {self.replicas}")
        if self.macro_replicas < 1:
            raise ConfigError(f"macro_replicas must be positive, got {self.macro_replicas}")
        if self.oracle_replicas is not None and (
            not isinstance(self.oracle_replicas, int) or self.oracle_replicas < 1
        ):
            raise ConfigError(
                f"oracle_replicas must be a positive integer or null, got {self.oracle_replicas!r}"
            )
        for name in ("t_grid", "scale_ladder", "k_grid", "s_grid"):
            raw = getattr(self, name)
            try:
                vals = tuple(float(v) for v in raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{name} must be a sequence of numbers") from exc
            object.__setattr__(self, name, vals)
        if self.beta is not None:
            object.__setattr__(self, "beta", float(self.beta))
        if self.horizon is not None:
            object.__setattr__(self, "horizon", float(self.horizon))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config document must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    def replace(self, **updates) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(updates)
        return ExperimentConfig.from_dict(data)

    # -- law builders -----------------------------------------------------

    def moving_time_law_obj(self) -> MovingTimeLaw:
        spec = self.moving_time_law
        if spec is None:
            raise ConfigError("missing required field 'moving_time_law'")
        kind = spec.get("kind")
        extra = sorted(set(spec) - {"kind", "beta", "x0", "rate"})
        if extra:
            raise ConfigError(f"unknown moving_time_law key(s): {', '.join(extra)}")
        if kind == "pareto":
            if "beta" not in spec:
                raise ConfigError("pareto moving_time_law requires 'beta'")
            return MovingTimeLaw.pareto(float(spec["beta"]), float(spec.get("x0", 1.0)))
        if kind == "exact_stable":
            if "beta" not in spec:
                raise ConfigError("exact_stable moving_time_law requires 'beta'")
            return MovingTimeLaw.exact_stable(float(spec["beta"]))
        if kind == "exponential":
            if "rate" not in spec:
                raise ConfigError("exponential moving_time_law requires 'rate'")
            return MovingTimeLaw.exponential(float(spec["rate"]))
        raise ConfigError(f"unknown moving_time_law kind {kind!r}")

    def direction_law_obj(self) -> DirectionLaw:
        spec = self.direction_law
        if spec is None:
            raise ConfigError("missing required field 'direction_law'")
        kind = spec.get("kind")
        extra = sorted(set(spec) - {"kind", "atoms", "weights", "direction", "m"})
        if extra:
            raise ConfigError(f"unknown direction_law key(s): {', '.join(extra)}")
        if kind == "atoms":
            if "atoms" not in spec or "weights" not in spec:
                raise ConfigError("atoms direction_law requires 'atoms' and 'weights'")
            law = DirectionLaw.from_atoms(spec["atoms"], spec["weights"])
        elif kind == "point_mass":
            if "direction" not in spec:
                raise ConfigError("point_mass direction_law requires 'direction'")
            law = DirectionLaw.point_mass(spec["direction"])
        elif kind == "uniform_sphere":
            m = spec.get("m", self.m)
            if m is None:
                raise ConfigError("uniform_sphere direction_law requires 'm'")
            law = DirectionLaw.uniform_sphere(int(m))
        else:
            raise ConfigError(f"unknown direction_law kind {kind!r}")
        if self.m is not None and law.m != self.m:
            raise ConfigError(
                f"config field m={self.m} contradicts the direction law dimension {law.m}"
            )
        return law

    def truncation_obj(self) -> Truncation | None:
        spec = self.truncation
        if spec is None:
            return None
        extra = sorted(set(spec) - {"min_jump", "max_jumps"})
        if extra:
            raise ConfigError(f"unknown truncation key(s): {', '.join(extra)}")
        return Truncation(
            min_jump=spec.get("min_jump"),
            max_jumps=spec.get("max_jumps"),
        )

    def rescale_obj(self) -> RescaleSpec | None:
        spec = self.rescale
        if spec is None:
            return None
        extra = sorted(set(spec) - {"mode", "c"})
        if extra:
            raise ConfigError(f"unknown rescale key(s): {', '.join(extra)}")
        if "mode" not in spec or "c" not in spec:
            raise ConfigError("rescale requires 'mode' and 'c'")
        return RescaleSpec(mode=spec["mode"], c=float(spec["c"]))

    def density_params(self) -> tuple[float, float, float, int]:
        spec = self.density
        if spec is None:
            raise ConfigError("missing required field 'density' for the density command")
        extra = sorted(set(spec) - {"t", "x_min", "x_max", "points"})
        if extra:
            raise ConfigError(f"unknown density key(s): {', '.join(extra)}")
        try:
            t = float(spec["t"])
            x_min = float(spec["x_min"])
            x_max = float(spec["x_max"])
            points = int(spec["points"])
        except KeyError as exc:
            raise ConfigError(f"density block misses required key {exc.args[0]!r}") from exc
        if points < 2 or not x_max > x_min:
            raise ConfigError("density block needs x_max > x_min and points >= 2")
        return t, x_min, x_max, points

    # -- per-command validation -------------------------------------------

    def validate_for(self, command: str) -> None:
        """Check that every field the command touches is present and sane.

        Raises ConfigError naming the first missing field.
        """
        need = _REQUIREMENTS.get(command)
        if need is None:
            raise ConfigError(f"unknown command {command!r}")
        for field_name in need:
            if getattr(self, field_name) is None:
                raise ConfigError(
                    f"missing required field {field_name!r} for command {command!r}"
                )
        if command in ("simulate-walk", "simulate-limit", "moments", "scaling-fit"):
            if len(self.t_grid) == 0:
                raise ConfigError(f"empty 't_grid' for command {command!r}")
        if command == "moments" and self.process == "limit" and self.horizon is None:
            raise ConfigError("missing required field 'horizon' for limit moments")
        if command == "moments" and self.process == "limit" and self.beta is None:
            raise ConfigError("missing required field 'beta' for limit moments")
        if command == "ks":
            if self.beta is not None and 0.0 < self.beta < 1.0 and self.horizon is None:
                raise ConfigError(
                    "missing required field 'horizon' for the ballistic KS ladder"
                )
        if command == "govcheck" and (len(self.k_grid) == 0 or len(self.s_grid) == 0):
            raise ConfigError("govcheck requires nonempty 'k_grid' and 's_grid'")
        # Constructing the law objects runs their own domain validation.
        if command in ("simulate-walk", "scaling-fit", "ks") or (
            command == "moments" and self.process == "walk"
        ):
            self.moving_time_law_obj()
        self.direction_law_obj()


_REQUIREMENTS = {
    "simulate-walk": ("moving_time_law", "direction_law", "horizon"),
    "simulate-limit": ("beta", "direction_law", "horizon"),
    "moments": ("direction_law",),
    "scaling-fit": ("moving_time_law", "direction_law"),
    "ks": ("beta", "moving_time_law", "direction_law"),
    "density": ("beta", "direction_law", "density"),
    "govcheck": ("beta", "direction_law"),
}


def load_config(path) -> ExperimentConfig:
    """Parse a JSON config file, rejecting malformed or unknown content."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {p}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def dump_config(config: ExperimentConfig) -> str:
    """Canonical serialization; parsing it back yields an equal config."""
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"
