# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot loops.

Bit-for-bit equivalent to `_kernels_py` (same counter-based stream, same
update order, compiled with contraction disabled so no FMA sneaks in).
Raises bare RuntimeError with "kind:payload" messages; the dispatcher in
`kernels` retypes them.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15u
cdef uint64_t _MIX1 = 0xBF58476D1CE4E5B9u
cdef uint64_t _MIX2 = 0x94D049BB133111EBu
cdef uint64_t _STREAM_CHAIN = 0x8BB84B93962EACC9u
cdef double _GUARD = 1e-9
cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    return z ^ (z >> 31)


cdef inline uint64_t _raw(uint64_t seed, uint64_t stream, uint64_t index) nogil:
    return _mix64((seed ^ stream) + (index + 1) * _GOLDEN)


def induced_stats(double beta, double a, double b, double domain_max,
                  int n_cap, cnp.ndarray[cnp.float64_t, ndim=1] x0,
                  int steps, object seed_obj):
    """Same contract as `_kernels_py.induced_stats`; point-major loop."""
    cdef uint64_t seed = <uint64_t>(int(seed_obj) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t count = x0.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = x0.copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist = np.zeros(
        n_cap + 2, dtype=np.int64)
    cdef int64_t tau1 = 0
    cdef Py_ssize_t j
    cdef int k, t, rounds
    cdef uint64_t z
    cdef double xv, bit
    for j in range(count):
        xv = x[j]
        for k in range(steps):
            z = _raw(seed, 0, (<uint64_t>j) * (<uint64_t>steps) + <uint64_t>k)
            bit = <double>(z >> 63)
            xv = beta * xv - bit
            t = 1
            rounds = 0
            while xv < a or xv > b:
                rounds += 1
                if rounds > n_cap:
                    raise RuntimeError(f"drift:{xv!r}")
                if xv > b:
                    xv = beta * xv - 1.0
                else:
                    xv = beta * xv
                if xv < -_GUARD or xv > domain_max + _GUARD:
                    raise RuntimeError(f"escape:{xv!r}")
                t += 1
            hist[t] += 1
            if t == 1:
                tau1 += 1
        x[j] = xv
    return hist, x, tau1


def chain_sample(cnp.ndarray[cnp.float64_t, ndim=2] cum_rows,
                 cnp.ndarray[cnp.float64_t, ndim=1] start_cum,
                 int steps, object seed_obj):
    """Same contract as `_kernels_py.chain_sample`."""
    cdef uint64_t seed = <uint64_t>(int(seed_obj) & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t m = cum_rows.shape[0]
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out = np.empty(steps, dtype=np.int8)
    cdef Py_ssize_t state, state_next, k
    cdef double u
    u = <double>(_raw(seed, _STREAM_CHAIN, 0) >> 11) * _INV_2_53
    state = 0
    while state < m - 1 and u >= start_cum[state]:
        state += 1
    out[0] = <signed char>state
    for k in range(1, steps):
        u = <double>(_raw(seed, _STREAM_CHAIN, <uint64_t>k) >> 11) * _INV_2_53
        state_next = 0
        while state_next < m - 1 and u >= cum_rows[state, state_next]:
            state_next += 1
        state = state_next
        out[k] = <signed char>state
    return out
