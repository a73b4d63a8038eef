# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Monte Carlo kernels.

Mirrors ``_pykernels`` (same random streams, same accumulation order).
Both functions release the GIL and write only to ``[start, stop)`` of the
output buffers, so disjoint path ranges can run on separate threads.
"""

from libc.math cimport log, cos, sqrt, exp, expm1, M_PI
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t JUMP_DOMAIN = (<uint64_t>1) << 40
cdef double TWO_M52 = 2.220446049250313e-16


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t path_key(uint64_t seed, uint64_t i) noexcept nogil:
    return mix64(mix64(seed) + (i + 1) * GOLDEN)


cdef inline double uniform(uint64_t key, uint64_t ctr) noexcept nogil:
    cdef uint64_t z = mix64(key + (ctr + 1) * GOLDEN)
    return (<double>(z >> 12) + 0.5) * TWO_M52


cdef inline double normal(uint64_t key, uint64_t j) noexcept nogil:
    cdef double u1 = uniform(key, 2 * j)
    cdef double u2 = uniform(key, 2 * j + 1)
    return sqrt(-2.0 * log(u1)) * cos(2.0 * M_PI * u2)


cdef inline Py_ssize_t pick_atom(const double[::1] cum_probs, double v) noexcept nogil:
    # first index with v < cum_probs[i]  (== searchsorted(side="right"))
    cdef Py_ssize_t lo = 0, hi = cum_probs.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if cum_probs[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    if lo > cum_probs.shape[0] - 1:
        lo = cum_probs.shape[0] - 1
    return lo


def increment_parts(uint64_t seed, Py_ssize_t start, Py_ssize_t stop, double dt,
                    double lam_total, const double[::1] cum_probs, const double[::1] y_sizes,
                    double[::1] out_gauss, double[::1] out_jumps):
    cdef Py_ssize_t i
    cdef uint64_t key, k
    cdef double t, jumps
    with nogil:
        for i in range(start, stop):
            key = path_key(seed, <uint64_t>i)
            out_gauss[i - start] = normal(key, 0)
            jumps = 0.0
            if lam_total > 0.0:
                t = 0.0
                k = 0
                while True:
                    t = t + (-log(uniform(key, JUMP_DOMAIN + 2 * k)) / lam_total)
                    if not (t < dt):
                        break
                    jumps = jumps + y_sizes[pick_atom(cum_probs, uniform(key, JUMP_DOMAIN + 2 * k + 1))]
                    k += 1
            out_jumps[i - start] = jumps


def coupled_terminals(uint64_t seed, Py_ssize_t start, Py_ssize_t stop, Py_ssize_t n_steps,
                      double horizon, double pi_d, double pi_c, double b, double c,
                      double comp_x, double lam_total, const double[::1] cum_probs,
                      const double[::1] x_sizes, const double[::1] y_sizes,
                      double[::1] out_exact, double[::1] out_euler, double[::1] out_product,
                      double[::1] out_stock, double[::1] out_stock_log):
    cdef Py_ssize_t i, j, a
    cdef uint64_t key, k
    cdef double dt = horizon / n_steps
    cdef double sqdt = sqrt(dt)
    cdef double sqc = sqrt(c)
    cdef double drift_l = (b - comp_x) * dt
    cdef double drift_lt = (b - 0.5 * c - comp_x) * dt
    cdef double t, w, dw, dl, dlt, euler, product, log_sum, jump_prod, stock_jump_prod
    cdef double *jx = <double *> malloc(n_steps * sizeof(double))
    cdef double *jy = <double *> malloc(n_steps * sizeof(double))
    if jx == NULL or jy == NULL:
        free(jx)
        free(jy)
        raise MemoryError()
    try:
        with nogil:
            for i in range(start, stop):
                key = path_key(seed, <uint64_t>i)
                for j in range(n_steps):
                    jx[j] = 0.0
                    jy[j] = 0.0
                jump_prod = 1.0
                stock_jump_prod = 1.0
                if lam_total > 0.0:
                    t = 0.0
                    k = 0
                    while True:
                        t = t + (-log(uniform(key, JUMP_DOMAIN + 2 * k)) / lam_total)
                        if not (t < horizon):
                            break
                        a = pick_atom(cum_probs, uniform(key, JUMP_DOMAIN + 2 * k + 1))
                        j = <Py_ssize_t>(t / dt)
                        if j > n_steps - 1:
                            j = n_steps - 1
                        jx[j] = jx[j] + x_sizes[a]
                        jy[j] = jy[j] + y_sizes[a]
                        jump_prod = jump_prod * (1.0 + pi_c * x_sizes[a])
                        stock_jump_prod = stock_jump_prod * (1.0 + x_sizes[a])
                        k += 1

                w = 0.0
                log_sum = 0.0
                euler = 1.0
                product = 1.0
                for j in range(n_steps):
                    dw = sqdt * normal(key, <uint64_t>j)
                    w = w + dw
                    dl = drift_l + sqc * dw + jx[j]
                    dlt = drift_lt + sqc * dw + jy[j]
                    euler = euler * (1.0 + pi_d * dl)
                    product = product * (1.0 + pi_d * expm1(dlt))
                    log_sum = log_sum + dlt

                out_exact[i - start] = exp(pi_c * (b - comp_x) * horizon + pi_c * sqc * w
                                           - 0.5 * pi_c * pi_c * c * horizon) * jump_prod
                out_euler[i - start] = euler
                out_product[i - start] = product
                out_stock[i - start] = exp((b - comp_x) * horizon + sqc * w - 0.5 * c * horizon) * stock_jump_prod
                out_stock_log[i - start] = exp(log_sum)
    finally:
        free(jx)
        free(jy)
