"""Counter-based uniforms: a pure function of (seed, path, draw index).

Every path owns the splitmix64 sequence started at ``path_key(seed, i)``;
draw ``k`` of that sequence is one hash away, so any subset of paths can be
generated in any order (or on any thread) with identical results.  The
compiled kernels implement the same functions bit-for-bit.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S12 = (np.uint64(s) for s in (30, 27, 31, 12))
_TWO_M52 = 2.0 ** -52

# draw-index offsets keeping the per-path streams for separate purposes apart
NORMAL_DOMAIN = 0
JUMP_DOMAIN = 1 << 40


def mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finaliser on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def path_keys(seed: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.uint64)
    base = mix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
    with np.errstate(over="ignore"):
        return mix64(base + (idx + np.uint64(1)) * GOLDEN)


def uniforms(keys: np.ndarray, counter: int | np.ndarray) -> np.ndarray:
    """Open-interval uniforms ``(0, 1)``; one per key at the given draw index."""
    ctr = np.asarray(counter, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = mix64(keys + (ctr + np.uint64(1)) * GOLDEN)
    # 52 bits so that the +0.5 offset is exact and u never rounds to 1
    return ((z >> _S12).astype(np.float64) + 0.5) * _TWO_M52


def normals(keys: np.ndarray, j: int) -> np.ndarray:
    """Box-Muller standard normals (cosine branch) for draw ``j`` of each path."""
    u1 = uniforms(keys, NORMAL_DOMAIN + 2 * j)
    u2 = uniforms(keys, NORMAL_DOMAIN + 2 * j + 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
