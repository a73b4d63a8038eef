"""Pure numpy versions of the Monte Carlo kernels.

Same signatures and random streams as the compiled ``_kernels`` module;
outputs agree with it up to last-ulp differences in ``log``/``cos``.
Each function fills the slice ``[start, stop)`` of caller-owned arrays.
"""

from __future__ import annotations

import numpy as np

from . import _rng

_CHUNK = 8192


def increment_parts(seed, start, stop, dt, lam_total, cum_probs, y_sizes, out_gauss, out_jumps):
    """Standard normal and raw jump sum over ``[0, dt)`` for each path."""
    cum_probs = np.asarray(cum_probs, dtype=np.float64)
    y_sizes = np.asarray(y_sizes, dtype=np.float64)
    for s in range(start, stop, _CHUNK):
        e = min(stop, s + _CHUNK)
        keys = _rng.path_keys(seed, s, e)
        out_gauss[s - start:e - start] = _rng.normals(keys, 0)
        jumps = np.zeros(e - s)
        if lam_total > 0.0:
            t = np.zeros(e - s)
            active = np.arange(e - s)
            k = 0
            while active.size:
                u = _rng.uniforms(keys[active], _rng.JUMP_DOMAIN + 2 * k)
                t[active] += -np.log(u) / lam_total
                hit = t[active] < dt
                active = active[hit]
                if active.size:
                    v = _rng.uniforms(keys[active], _rng.JUMP_DOMAIN + 2 * k + 1)
                    atom = np.minimum(np.searchsorted(cum_probs, v, side="right"), len(y_sizes) - 1)
                    jumps[active] += y_sizes[atom]
                k += 1
        out_jumps[s - start:e - start] = jumps


def coupled_terminals(seed, start, stop, n_steps, horizon, pi_d, pi_c, b, c,
                      comp_x, lam_total, cum_probs, x_sizes, y_sizes,
                      out_exact, out_euler, out_product, out_stock, out_stock_log):
    """Exact, Euler and product terminal wealth on shared randomness.

    ``comp_x`` is ``sum(lam_i * x_i)``, the jump compensator of ``L``.

    ``out_stock`` is the exact stock ratio from the jump record and Brownian
    path; ``out_stock_log`` is ``exp`` of the summed log-increments, the
    coupling consistency check.
    """
    cum_probs = np.asarray(cum_probs, dtype=np.float64)
    x_sizes = np.asarray(x_sizes, dtype=np.float64)
    y_sizes = np.asarray(y_sizes, dtype=np.float64)
    n = int(n_steps)
    dt = horizon / n
    sqdt = np.sqrt(dt)
    sqc = np.sqrt(c)
    drift_l = (b - comp_x) * dt
    drift_lt = (b - 0.5 * c - comp_x) * dt
    chunk = max(1, _CHUNK * 16 // max(n, 1))

    for s in range(start, stop, chunk):
        e = min(stop, s + chunk)
        m = e - s
        keys = _rng.path_keys(seed, s, e)
        jx = np.zeros((m, n))
        jy = np.zeros((m, n))
        jump_prod = np.ones(m)
        stock_jump_prod = np.ones(m)
        if lam_total > 0.0:
            t = np.zeros(m)
            active = np.arange(m)
            k = 0
            while active.size:
                u = _rng.uniforms(keys[active], _rng.JUMP_DOMAIN + 2 * k)
                t[active] += -np.log(u) / lam_total
                active = active[t[active] < horizon]
                if active.size:
                    v = _rng.uniforms(keys[active], _rng.JUMP_DOMAIN + 2 * k + 1)
                    atom = np.minimum(np.searchsorted(cum_probs, v, side="right"), len(x_sizes) - 1)
                    j = np.minimum((t[active] / dt).astype(np.int64), n - 1)
                    jx[active, j] += x_sizes[atom]
                    jy[active, j] += y_sizes[atom]
                    jump_prod[active] *= 1.0 + pi_c * x_sizes[atom]
                    stock_jump_prod[active] *= 1.0 + x_sizes[atom]
                k += 1

        w = np.zeros(m)
        log_sum = np.zeros(m)
        euler = np.ones(m)
        product = np.ones(m)
        for j in range(n):
            dw = sqdt * _rng.normals(keys, j)
            w += dw
            dl = drift_l + sqc * dw + jx[:, j]
            dlt = drift_lt + sqc * dw + jy[:, j]
            euler *= 1.0 + pi_d * dl
            product *= 1.0 + pi_d * np.expm1(dlt)
            log_sum += dlt

        sl = slice(s - start, e - start)
        out_exact[sl] = np.exp(pi_c * (b - comp_x) * horizon + pi_c * sqc * w
                               - 0.5 * pi_c * pi_c * c * horizon) * jump_prod
        out_euler[sl] = euler
        out_product[sl] = product
        out_stock[sl] = np.exp((b - comp_x) * horizon + sqc * w - 0.5 * c * horizon) * stock_jump_prod
        out_stock_log[sl] = np.exp(log_sum)
