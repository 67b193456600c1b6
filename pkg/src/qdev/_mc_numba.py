"""Numba JIT simulation kernels (default backend when numba is installed).

Same counter-based stream derivation as the numpy fallback: the uniform
bits are identical across backends; transformed draws can differ by at most
1 ulp because numpy's SIMD transcendentals round differently from the
scalar libm calls compiled here.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from .special import norm_quantile

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_R30 = np.uint64(30)
_R27 = np.uint64(27)
_R31 = np.uint64(31)
_R11 = np.uint64(11)
_ONE = np.uint64(1)
_U53 = 2.0 ** -53

_norm_quantile = njit(cache=True)(norm_quantile)


@njit(cache=True, inline="always")
def _u01(seed, index):
    z = seed + (index + _ONE) * _GOLD
    z = (z ^ (z >> _R30)) * _MIX1
    z = (z ^ (z >> _R27)) * _MIX2
    z = z ^ (z >> _R31)
    return (np.float64(z >> _R11) + 0.5) * _U53


@njit(cache=True, inline="always")
def _draw(seed, index, family, a, b):
    u = _u01(seed, index)
    if family == 0:
        return a + (b - a) * u
    elif family == 1:
        return -math.log1p(-u) / a
    elif family == 2:
        return a + b * _norm_quantile(u)
    elif family == 3:
        return a + b * math.log(u / (1.0 - u))
    else:
        return a + b * math.tan(math.pi * (u - 0.5))


@njit(cache=True, parallel=True)
def quantile_replicates(seed, n, replicates, family, a, b, k_index, x_p):
    qv = np.empty(replicates, dtype=np.float64)
    below = np.empty(replicates, dtype=np.int64)
    for r in prange(replicates):
        base = np.uint64(r) * np.uint64(n)
        buf = np.empty(n, dtype=np.float64)
        cnt = 0
        for d in range(n):
            x = _draw(seed, base + np.uint64(d), family, a, b)
            buf[d] = x
            if x <= x_p:
                cnt += 1
        qv[r] = np.partition(buf, k_index)[k_index]
        below[r] = cnt
    return qv, below
