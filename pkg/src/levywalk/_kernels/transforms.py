"""Uniform-to-variate transforms shared by the samplers and the pure backend.

Every distribution used in the Monte Carlo core is expressed as a fixed-width
deterministic function of uniform doubles, and both kernel backends consume
uniforms in the same stream order. The compiled core re-states these formulas
in C over libm; numpy's SIMD float64 log/exp/log1p/pow can differ from libm
by an ulp, so the backends agree to roundoff (tests pin rtol ~1e-12), while
results for a fixed backend are bit-for-bit reproducible.

Width table (uniform doubles consumed per draw):
    pareto 1, exponential 1, one-sided stable 2, symmetric stable 2,
    atom direction 1, uniform sphere direction 2*ceil(m/2).

`_TINY` guards the measure-zero uniforms (u == 0.0) that would otherwise
produce log(0) or a zero moving time; the clamp is applied identically in
both backends.
"""

from __future__ import annotations

import numpy as np

_TINY = 2.0**-53

# Law / direction codes shared with the compiled core.
LAW_PARETO = 0
LAW_EXPONENTIAL = 1
LAW_STABLE = 2
DIR_ATOMS = 0
DIR_SPHERE = 1


def law_width(law_kind: int) -> int:
    return 2 if law_kind == LAW_STABLE else 1


def dir_width(dir_kind: int, m: int) -> int:
    return 1 if dir_kind == DIR_ATOMS else 2 * ((m + 1) // 2)


def pareto_from_uniform(u, beta, x0):
    """Pareto tail P(J > x) = (x/x0)^-beta for x >= x0, via inverse CDF."""
    return x0 * np.power(1.0 - np.asarray(u), -1.0 / beta)


def exponential_from_uniform(u, rate):
    return -np.log1p(-np.maximum(np.asarray(u), _TINY)) / rate


def one_sided_stable_from_uniforms(u_angle, u_exp, beta):
    """Kanter representation of the positive stable law with E[e^-sD] = e^(-s^beta).

    D = (A(V)/E)^((1-beta)/beta) with V uniform on (0, pi), E unit exponential,
    A(v) = (sin(beta v)^beta * sin((1-beta) v)^(1-beta) / sin v)^(1/(1-beta)).
    Computed in log space; exact for every beta in (0,1).
    """
    v = np.pi * np.maximum(np.asarray(u_angle), _TINY)
    e = -np.log1p(-np.maximum(np.asarray(u_exp), _TINY))
    log_a = (
        beta * np.log(np.sin(beta * v))
        + (1.0 - beta) * np.log(np.sin((1.0 - beta) * v))
        - np.log(np.sin(v))
    ) / (1.0 - beta)
    return np.exp(((1.0 - beta) / beta) * (log_a - np.log(e)))


def symmetric_stable_from_uniforms(u_angle, u_exp, beta):
    """Chambers-Mallows-Stuck draw with characteristic function e^(-|k|^beta)."""
    v = np.pi * (np.asarray(u_angle) - 0.5)
    w = -np.log1p(-np.maximum(np.asarray(u_exp), _TINY))
    if beta == 1.0:
        return np.tan(v)
    return (
        np.sin(beta * v)
        / np.power(np.cos(v), 1.0 / beta)
        * np.power(np.cos((1.0 - beta) * v) / w, (1.0 - beta) / beta)
    )


def atom_index_from_uniform(u, cumulative_weights):
    """Index of the atom whose cumulative-weight cell contains u."""
    idx = np.searchsorted(cumulative_weights, np.asarray(u), side="right")
    return np.minimum(idx, len(cumulative_weights) - 1)


def sphere_from_uniforms(u, m):
    """Unit vectors from Box-Muller pairs; u has shape (..., 2*ceil(m/2))."""
    u = np.asarray(u)
    npairs = (m + 1) // 2
    ua = np.maximum(u[..., 0 : 2 * npairs : 2], _TINY)
    ub = u[..., 1 : 2 * npairs : 2]
    radius = np.sqrt(-2.0 * np.log(ua))
    ang = 2.0 * np.pi * ub
    z = np.empty(u.shape[:-1] + (2 * npairs,))
    z[..., 0::2] = radius * np.cos(ang)
    z[..., 1::2] = radius * np.sin(ang)
    z = z[..., :m]
    norm = np.sqrt(np.sum(z * z, axis=-1, keepdims=True))
    # norm > 0 always holds after the _TINY clamp; keep a deterministic
    # escape hatch anyway so both backends agree if it ever fires.
    bad = norm == 0.0
    if np.any(bad):
        z = np.where(bad, 0.0, z)
        z[..., 0] = np.where(bad[..., 0], 1.0, z[..., 0])
        norm = np.where(bad, 1.0, norm)
    return z / norm
