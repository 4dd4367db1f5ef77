"""Samplers for the model's random inputs.

Three ingredients drive everything downstream: one-sided stable variables
(the operational-time subordinator and the exact-stable moving-time law),
heavy-tailed or light moving times, and directions on the unit sphere. All
samplers are pure functions of an explicit numpy Generator; see `_rng` for
the stream discipline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ._kernels import transforms as tr
from .errors import ConfigError

__all__ = [
    "DirectionLaw",
    "MovingTimeLaw",
    "normalizer_b",
    "sample_direction",
    "sample_moving_time",
    "sample_one_sided_stable",
    "sample_symmetric_stable",
    "superdiffusive_scale",
    "symmetric_stable_scale",
]

_ATOL = 1e-12


def _require_subordinator_index(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"stable index must lie in (0, 1) for subordinator use, got {beta}")
    return beta


@dataclass(frozen=True, eq=False)
class DirectionLaw:
    """Distribution of step directions on the unit sphere of R^m.

    Either a finite atom set with weights, or the uniform (surface) measure.
    Atoms must be unit vectors within 1e-12 and weights a probability vector
    within 1e-12. `spans_space` records whether the support spans R^m;
    degenerate laws (a single atom, say) are legal inputs for path
    construction — operations that mathematically need a full-dimensional law
    check the flag themselves.
    """

    kind: str
    m: int
    atoms: np.ndarray | None = None
    weights: np.ndarray | None = None
    _cumweights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("atoms", "uniform_sphere"):
            raise ConfigError(f"unknown direction law kind {self.kind!r}")
        if self.m < 1:
            raise ConfigError(f"dimension m must be >= 1, got {self.m}")
        if self.kind == "atoms":
            atoms = np.ascontiguousarray(np.atleast_2d(np.asarray(self.atoms, dtype=float)))
            weights = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
            if atoms.ndim != 2 or atoms.shape[1] != self.m:
                raise ConfigError(f"atoms must have shape (n, {self.m})")
            if weights.shape != (atoms.shape[0],):
                raise ConfigError("weights length must match the number of atoms")
            norms = np.sqrt(np.sum(atoms * atoms, axis=1))
            if np.any(np.abs(norms - 1.0) > _ATOL):
                raise ConfigError("every atom must be a unit vector (1e-12)")
            if np.any(weights <= 0.0):
                raise ConfigError("atom weights must be strictly positive")
            if abs(weights.sum() - 1.0) > _ATOL:
                raise ConfigError("atom weights must sum to 1 (1e-12)")
            object.__setattr__(self, "atoms", atoms)
            object.__setattr__(self, "weights", weights)
            cum = np.cumsum(weights)
            cum[-1] = max(cum[-1], 1.0)
            object.__setattr__(self, "_cumweights", cum)
        else:
            object.__setattr__(self, "atoms", None)
            object.__setattr__(self, "weights", None)
            object.__setattr__(self, "_cumweights", np.empty(0))

    @classmethod
    def from_atoms(cls, atoms, weights, m=None) -> "DirectionLaw":
        atoms = np.atleast_2d(np.asarray(atoms, dtype=float))
        return cls(kind="atoms", m=int(m if m is not None else atoms.shape[1]),
                   atoms=atoms, weights=np.asarray(weights, dtype=float))

    @classmethod
    def symmetric_1d(cls) -> "DirectionLaw":
        return cls.from_atoms([[1.0], [-1.0]], [0.5, 0.5])

    @classmethod
    def point_mass(cls, direction) -> "DirectionLaw":
        direction = np.atleast_1d(np.asarray(direction, dtype=float))
        return cls.from_atoms(direction[None, :], [1.0])

    @classmethod
    def uniform_sphere(cls, m: int) -> "DirectionLaw":
        return cls(kind="uniform_sphere", m=int(m))

    @property
    def spans_space(self) -> bool:
        if self.kind == "uniform_sphere":
            return True
        return np.linalg.matrix_rank(self.atoms) == self.m

    @property
    def mean_direction(self) -> np.ndarray:
        if self.kind == "uniform_sphere":
            return np.zeros(self.m)
        return self.weights @ self.atoms

    @property
    def is_centered(self) -> bool:
        return bool(np.all(np.abs(self.mean_direction) <= _ATOL))

    def kernel_args(self) -> tuple[int, np.ndarray, np.ndarray]:
        """(dir_kind, atoms, cumulative weights) in the kernels' encoding."""
        if self.kind == "atoms":
            return tr.DIR_ATOMS, self.atoms, self._cumweights
        return tr.DIR_SPHERE, np.empty((0, self.m)), np.empty(0)


@dataclass(frozen=True)
class MovingTimeLaw:
    """Law of the i.i.d. moving times: pareto, exact one-sided stable, or exponential."""

    kind: str
    beta: float | None = None
    x0: float | None = None
    rate: float | None = None

    def __post_init__(self):
        if self.kind == "pareto":
            if self.beta is None or not 0.0 < self.beta < 2.0:
                raise ConfigError(f"pareto tail index must lie in (0, 2), got {self.beta}")
            x0 = 1.0 if self.x0 is None else float(self.x0)
            if x0 <= 0.0:
                raise ConfigError(f"pareto scale x0 must be positive, got {x0}")
            object.__setattr__(self, "x0", x0)
        elif self.kind == "exact_stable":
            _require_subordinator_index(self.beta)
        elif self.kind == "exponential":
            if self.rate is None or self.rate <= 0.0:
                raise ConfigError(f"exponential rate must be positive, got {self.rate}")
        else:
            raise ConfigError(f"unknown moving-time law kind {self.kind!r}")

    @classmethod
    def pareto(cls, beta: float, x0: float = 1.0) -> "MovingTimeLaw":
        return cls(kind="pareto", beta=float(beta), x0=float(x0))

    @classmethod
    def exact_stable(cls, beta: float) -> "MovingTimeLaw":
        return cls(kind="exact_stable", beta=float(beta))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "MovingTimeLaw":
        return cls(kind="exponential", rate=float(rate))

    @property
    def mean(self) -> float:
        """E[J]; infinite for tail index <= 1 and for the stable law."""
        if self.kind == "pareto":
            return self.beta * self.x0 / (self.beta - 1.0) if self.beta > 1.0 else math.inf
        if self.kind == "exponential":
            return 1.0 / self.rate
        return math.inf

    def kernel_args(self) -> tuple[int, float, float]:
        """(law_kind, a, b) in the kernels' encoding."""
        if self.kind == "pareto":
            return tr.LAW_PARETO, self.beta, self.x0
        if self.kind == "exponential":
            return tr.LAW_EXPONENTIAL, self.rate, 0.0
        return tr.LAW_STABLE, self.beta, 0.0


def sample_one_sided_stable(beta, rng, size=None):
    """Draw the positive stable variable D with E[exp(-s D)] = exp(-s^beta).

    Kanter's representation: two uniforms per draw, exact for any beta in
    (0, 1). Returns a scalar when size is None.
    """
    beta = _require_subordinator_index(beta)
    n = 1 if size is None else int(size)
    u = rng.random((n, 2))
    d = tr.one_sided_stable_from_uniforms(u[:, 0], u[:, 1], beta)
    return float(d[0]) if size is None else d


def sample_symmetric_stable(beta, rng, size=None):
    """Draw the symmetric stable variable with characteristic function exp(-|k|^beta)."""
    beta = float(beta)
    if not 0.0 < beta <= 2.0:
        raise ConfigError(f"symmetric stable index must lie in (0, 2], got {beta}")
    n = 1 if size is None else int(size)
    u = rng.random((n, 2))
    if beta == 2.0:
        # Gaussian endpoint: CF exp(-k^2) means variance 2.
        radius = np.sqrt(-2.0 * np.log(np.maximum(u[:, 0], 2.0**-53)))
        x = math.sqrt(2.0) * radius * np.cos(2.0 * np.pi * u[:, 1])
    else:
        x = tr.symmetric_stable_from_uniforms(u[:, 0], u[:, 1], beta)
    return float(x[0]) if size is None else x


def sample_moving_time(law: MovingTimeLaw, rng, size=None):
    """I.i.d. draws from the configured moving-time law."""
    n = 1 if size is None else int(size)
    if law.kind == "exact_stable":
        out = sample_one_sided_stable(law.beta, rng, size=n)
    else:
        u = rng.random(n)
        if law.kind == "pareto":
            out = tr.pareto_from_uniform(u, law.beta, law.x0)
        else:
            out = tr.exponential_from_uniform(u, law.rate)
    return float(out[0]) if size is None else out


def sample_direction(law: DirectionLaw, rng, size=None):
    """I.i.d. unit vectors from the direction law; shape (m,) or (size, m)."""
    n = 1 if size is None else int(size)
    if law.kind == "atoms":
        u = rng.random(n)
        out = law.atoms[tr.atom_index_from_uniform(u, law._cumweights)]
    else:
        width = tr.dir_width(tr.DIR_SPHERE, law.m)
        u = rng.random((n, width))
        out = tr.sphere_from_uniforms(u, law.m)
    return out[0] if size is None else out


def normalizer_b(law: MovingTimeLaw, n: int) -> float:
    """Norming constant b_n with b_n * (J_1 + ... + J_n) converging to the stable law.

    exact_stable: n^(-1/beta) by strict stability. pareto with tail index
    beta < 1: (n * Gamma(1-beta))^(-1/beta) / x0, from matching the tail
    n * P(b_n J > s) -> s^(-beta) / Gamma(1-beta).
    """
    if n <= 0:
        raise ConfigError(f"n must be a positive integer, got {n}")
    if law.kind == "exact_stable":
        return float(n) ** (-1.0 / law.beta)
    if law.kind == "pareto" and law.beta < 1.0:
        return (n * special.gamma(1.0 - law.beta)) ** (-1.0 / law.beta) / law.x0
    raise ConfigError(f"no norming constant configured for law {law.kind!r} "
                      f"(needs exact_stable or pareto with tail index < 1)")


def superdiffusive_scale(beta: float, x0: float, c: float) -> float:
    """Space norming b(c) for the centered-sum regime with tail index in (1, 2).

    b(c) = (c * |Gamma(1-beta)|)^(-1/beta) / x0, the same tail-matching
    convention as `normalizer_b` continued through the Gamma reflection, so
    that b(c) * (centered partial sums at c terms) has the limit
    characteristic function exp(sum_j w_j (-i k.theta_j)^beta) — unit weight
    scale |cos(pi beta / 2)| per direction for symmetric laws.
    """
    beta = float(beta)
    if not 1.0 < beta < 2.0:
        raise ConfigError(f"superdiffusive norming needs tail index in (1, 2), got {beta}")
    if c <= 0.0:
        raise ConfigError(f"scale factor c must be positive, got {c}")
    return (c * abs(special.gamma(1.0 - beta))) ** (-1.0 / beta) / x0


def symmetric_stable_scale(beta: float) -> float:
    """sigma with E[exp(i k A(t))] = exp(-t sigma |k|^beta) for the symmetric 1D limit."""
    beta = float(beta)
    if not 1.0 < beta < 2.0:
        raise ConfigError(f"stable marginal scale defined for index in (1, 2), got {beta}")
    return abs(math.cos(math.pi * beta / 2.0))
