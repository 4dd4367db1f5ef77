# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

One-at-a-time restatement of the pure backend: identical uniform consumption
per step, identical transform formulas, identical sequential accumulation.
Transcendentals go through libm, whose last bit can differ from numpy's SIMD
kernels, so the backends agree to roundoff rather than bit for bit; a fixed
backend is bitwise reproducible. Uniforms come straight from the Generator's
BitGenerator through the C interface.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport cos, exp, log, log1p, pow, sin, sqrt
from numpy.random cimport bitgen_t

cnp.import_array()

cdef double TINY = 2.0 ** -53
cdef double PI = 3.141592653589793

cdef int LAW_PARETO = 0
cdef int LAW_EXPONENTIAL = 1
cdef int LAW_STABLE = 2
cdef int DIR_ATOMS = 0
cdef int DIR_SPHERE = 1


cdef inline bitgen_t *_bitgen(object gen) except NULL:
    capsule = gen.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double _clamped(double u) nogil:
    return u if u > TINY else TINY


cdef inline double _moving_time(bitgen_t *rng, int law_kind, double la, double lb) nogil:
    cdef double u, v, e, log_a
    u = rng.next_double(rng.state)
    if law_kind == LAW_PARETO:
        return lb * pow(1.0 - u, -1.0 / la)
    if law_kind == LAW_EXPONENTIAL:
        return -log1p(-_clamped(u)) / la
    # one-sided stable (Kanter); consumes a second uniform
    v = PI * _clamped(u)
    e = -log1p(-_clamped(rng.next_double(rng.state)))
    log_a = (
        la * log(sin(la * v))
        + (1.0 - la) * log(sin((1.0 - la) * v))
        - log(sin(v))
    ) / (1.0 - la)
    return exp(((1.0 - la) / la) * (log_a - log(e)))


cdef inline void _direction(bitgen_t *rng, int dir_kind,
                            const double[:, ::1] atoms, const double[::1] cumw,
                            int m, double *out) nogil:
    cdef double u, ua, ub, radius, ang, norm
    cdef Py_ssize_t lo, hi, mid, na, d, npairs, p
    if dir_kind == DIR_ATOMS:
        u = rng.next_double(rng.state)
        na = cumw.shape[0]
        lo = 0
        hi = na
        while lo < hi:
            mid = (lo + hi) >> 1
            if cumw[mid] <= u:
                lo = mid + 1
            else:
                hi = mid
        if lo > na - 1:
            lo = na - 1
        for d in range(m):
            out[d] = atoms[lo, d]
        return
    npairs = (m + 1) >> 1
    for p in range(npairs):
        ua = _clamped(rng.next_double(rng.state))
        ub = rng.next_double(rng.state)
        radius = sqrt(-2.0 * log(ua))
        ang = 2.0 * PI * ub
        out[2 * p] = radius * cos(ang)
        if 2 * p + 1 < m:
            out[2 * p + 1] = radius * sin(ang)
    norm = 0.0
    for d in range(m):
        norm += out[d] * out[d]
    norm = sqrt(norm)
    if norm == 0.0:
        out[0] = 1.0
        for d in range(1, m):
            out[d] = 0.0
        return
    for d in range(m):
        out[d] = out[d] / norm


def walk_marginals(object gen, int law_kind, double la, double lb,
                   int dir_kind, const double[:, ::1] atoms, const double[::1] cumw,
                   int m, const double[::1] qtimes, double[:, ::1] out):
    """Evaluate one walk replica at sorted query times; see the pure backend."""
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t nq = qtimes.shape[0]
    cdef Py_ssize_t qi = 0, d
    cdef long nsteps = 0
    cdef double t_acc = 0.0, t_new, j, q, delta
    cdef double[::1] x_acc = np.zeros(m)
    cdef double[::1] x_new = np.zeros(m)
    cdef double[::1] th = np.zeros(m)
    with nogil:
        while qi < nq:
            j = _moving_time(rng, law_kind, la, lb)
            _direction(rng, dir_kind, atoms, cumw, m, &th[0])
            nsteps += 1
            t_new = t_acc + j
            for d in range(m):
                x_new[d] = x_acc[d] + j * th[d]
            while qi < nq and qtimes[qi] < t_new:
                q = qtimes[qi]
                delta = q - t_acc
                for d in range(m):
                    out[qi, d] = x_acc[d] + delta * ((x_new[d] - x_acc[d]) / (t_new - t_acc))
                qi += 1
            t_acc = t_new
            for d in range(m):
                x_acc[d] = x_new[d]
    return nsteps


def walk_steps(object gen, int law_kind, double la, double lb,
               int dir_kind, const double[:, ::1] atoms, const double[::1] cumw,
               int m, double horizon):
    """Generate steps until the cumulative time strictly exceeds horizon."""
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t cap = 1024, n = 0, d
    cdef double t_acc = 0.0, j
    cdef double[::1] th = np.zeros(m)
    cdef cnp.ndarray j_arr = np.empty(cap)
    cdef cnp.ndarray th_arr = np.empty((cap, m))
    cdef double[::1] jv = j_arr
    cdef double[:, ::1] tv = th_arr
    while True:
        if n == cap:
            cap *= 2
            j_arr = np.resize(j_arr, cap)
            th_arr = np.resize(th_arr, (cap, m))
            jv = j_arr
            tv = th_arr
        j = _moving_time(rng, law_kind, la, lb)
        _direction(rng, dir_kind, atoms, cumw, m, &th[0])
        jv[n] = j
        for d in range(m):
            tv[n, d] = th[d]
        n += 1
        t_acc = t_acc + j
        if t_acc > horizon:
            break
    return j_arr[:n].copy(), th_arr[:n].copy()


def series_raw(object gen, int dir_kind, const double[:, ::1] atoms,
               const double[::1] cumw, int m, double level_max, long max_jumps):
    """Poisson-epoch skeleton for a truncated jump series; see the pure backend."""
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t cap = 1024, n = 0, d
    cdef double gam_acc = 0.0, e
    cdef double[::1] th = np.zeros(m)
    cdef cnp.ndarray gam_arr = np.empty(cap)
    cdef cnp.ndarray arr_arr = np.empty(cap)
    cdef cnp.ndarray th_arr = np.empty((cap, m))
    cdef double[::1] gv = gam_arr
    cdef double[::1] av = arr_arr
    cdef double[:, ::1] tv = th_arr
    while n < max_jumps:
        if n == cap:
            cap *= 2
            gam_arr = np.resize(gam_arr, cap)
            arr_arr = np.resize(arr_arr, cap)
            th_arr = np.resize(th_arr, (cap, m))
            gv = gam_arr
            av = arr_arr
            tv = th_arr
        e = -log1p(-_clamped(rng.next_double(rng.state)))
        gam_acc = gam_acc + e
        if gam_acc > level_max:
            break
        gv[n] = gam_acc
        av[n] = rng.next_double(rng.state)
        _direction(rng, dir_kind, atoms, cumw, m, &th[0])
        for d in range(m):
            tv[n, d] = th[d]
        n += 1
    return gam_arr[:n].copy(), arr_arr[:n].copy(), th_arr[:n].copy()
