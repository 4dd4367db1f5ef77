"""Pure-numpy kernel backend.

Draws uniforms in fixed-stride blocks and pushes them through the shared
transforms, consuming the bit stream in exactly the per-step order the
compiled core uses. A call may read past the last step it needs (whole chunks
are drawn at once); that is fine under the stream-ownership rule in `_rng`.
Chunk sizes grow adaptively, which cannot change any result: uniforms are
consumed in stream order with a fixed per-step stride, so the block
partitioning is invisible to the values.

Running sums are threaded through `numpy.cumsum` seeded with the previous
accumulator value, matching the compiled core's sequential accumulation
order. Outputs agree with the compiled core to floating-point roundoff (see
`transforms`); within this backend they are bit-for-bit reproducible.
"""

from __future__ import annotations

import numpy as np

from . import transforms as tr

_CHUNK0 = 128
_CHUNK_MAX = 4096


def _chunk_cumsum(seed, increments):
    """Sequential running sum starting from seed; returns len(increments) values."""
    acc = np.concatenate(([seed], increments))
    return np.cumsum(acc)[1:]


def _moving_times(u, law_kind, la, lb):
    if law_kind == tr.LAW_PARETO:
        return tr.pareto_from_uniform(u[:, 0], la, lb)
    if law_kind == tr.LAW_EXPONENTIAL:
        return tr.exponential_from_uniform(u[:, 0], la)
    if law_kind == tr.LAW_STABLE:
        return tr.one_sided_stable_from_uniforms(u[:, 0], u[:, 1], la)
    raise ValueError(f"unknown law kind {law_kind}")


def _directions(u, dir_kind, atoms, cumw, m):
    if dir_kind == tr.DIR_ATOMS:
        return atoms[tr.atom_index_from_uniform(u[:, 0], cumw)]
    if dir_kind == tr.DIR_SPHERE:
        return tr.sphere_from_uniforms(u, m)
    raise ValueError(f"unknown direction kind {dir_kind}")


def walk_marginals(gen, law_kind, la, lb, dir_kind, atoms, cumw, m, qtimes, out):
    """Evaluate one walk replica at the sorted query times `qtimes`.

    Writes the interpolated positions into out (nq, m). The return value is
    the number of steps this backend generated — a throughput diagnostic, not
    part of the cross-backend contract (chunked drawing overshoots).
    """
    nq = qtimes.shape[0]
    stride = tr.law_width(law_kind) + tr.dir_width(dir_kind, m)
    law_w = tr.law_width(law_kind)
    t_acc = 0.0
    x_acc = np.zeros(m)
    qi = 0
    nsteps = 0
    chunk = _CHUNK0
    while qi < nq:
        u = gen.random(chunk * stride).reshape(chunk, stride)
        j = _moving_times(u[:, :law_w], law_kind, la, lb)
        th = _directions(u[:, law_w:], dir_kind, atoms, cumw, m)
        t_new = _chunk_cumsum(t_acc, j)
        s_new = np.cumsum(np.concatenate((x_acc[None, :], j[:, None] * th)), axis=0)[1:]
        nsteps += chunk
        # Queries strictly below the chunk's last renewal time have their
        # straddling step inside this chunk.
        hi = qi + np.searchsorted(qtimes[qi:], t_new[-1], side="left")
        if hi > qi:
            q = qtimes[qi:hi]
            idx = np.searchsorted(t_new, q, side="right")
            prev = np.maximum(idx - 1, 0)
            has_prev = idx > 0
            g = np.where(has_prev, t_new[prev], t_acc)
            x = np.where(has_prev[:, None], s_new[prev], x_acc)
            h = t_new[idx]
            y = s_new[idx]
            slope = (y - x) / (h - g)[:, None]
            out[qi:hi] = x + (q - g)[:, None] * slope
            qi = hi
        t_acc = t_new[-1]
        x_acc = s_new[-1]
        chunk = min(2 * chunk, _CHUNK_MAX)
    return nsteps


def walk_steps(gen, law_kind, la, lb, dir_kind, atoms, cumw, m, horizon):
    """Generate (moving times, directions) until the renewal time passes horizon.

    The straddling step (first cumulative time strictly above horizon) is the
    last row kept, so path evaluation at t = horizon is always bracketed.
    """
    stride = tr.law_width(law_kind) + tr.dir_width(dir_kind, m)
    law_w = tr.law_width(law_kind)
    t_acc = 0.0
    js, ths = [], []
    chunk = _CHUNK0
    while True:
        u = gen.random(chunk * stride).reshape(chunk, stride)
        j = _moving_times(u[:, :law_w], law_kind, la, lb)
        th = _directions(u[:, law_w:], dir_kind, atoms, cumw, m)
        t_new = _chunk_cumsum(t_acc, j)
        if t_new[-1] > horizon:
            keep = np.searchsorted(t_new, horizon, side="right") + 1
            js.append(j[:keep])
            ths.append(th[:keep])
            break
        js.append(j)
        ths.append(th)
        t_acc = t_new[-1]
        chunk = min(2 * chunk, _CHUNK_MAX)
    return np.concatenate(js), np.concatenate(ths)


def series_raw(gen, dir_kind, atoms, cumw, m, level_max, max_jumps):
    """Poisson-arrival skeleton for a truncated jump series.

    Per jump, in stream order: one exponential epoch increment, one arrival
    uniform, one direction draw. Generation stops once the cumulative epoch
    exceeds level_max (checked after the epoch draw, before the rest of the
    jump is consumed) or after max_jumps jumps. Returns (epochs, arrival
    uniforms, directions); jump sizes are a deterministic transform of the
    epochs applied by the caller.
    """
    dir_w = tr.dir_width(dir_kind, m)
    stride = 1 + 1 + dir_w
    gam_acc = 0.0
    count = 0
    gams, arrs, ths = [], [], []
    chunk = _CHUNK0
    while count < max_jumps:
        u = gen.random(chunk * stride).reshape(chunk, stride)
        e = tr.exponential_from_uniform(u[:, 0], 1.0)
        gam = _chunk_cumsum(gam_acc, e)
        th = _directions(u[:, 2:], dir_kind, atoms, cumw, m)
        keep = int(np.searchsorted(gam, level_max, side="right"))
        keep = min(keep, chunk, max_jumps - count)
        stopped = keep < chunk
        if keep > 0:
            gams.append(gam[:keep])
            arrs.append(u[:keep, 1])
            ths.append(th[:keep])
            count += keep
        if stopped:
            break
        gam_acc = gam[-1]
        chunk = min(2 * chunk, _CHUNK_MAX)
    if count == 0:
        return np.empty(0), np.empty(0), np.empty((0, m))
    return np.concatenate(gams), np.concatenate(arrs), np.concatenate(ths)
