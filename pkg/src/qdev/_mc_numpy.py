"""Pure-numpy simulation kernels (fallback backend).

Draw d of replicate r comes from a keyed integer mix of the global counter
r*n + d (a splitmix64-style finalizer), so streams are reproducible and
order-independent by construction.  Replicates are processed in blocks to
bound memory.
"""

from __future__ import annotations

import numpy as np

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_R30 = np.uint64(30)
_R27 = np.uint64(27)
_R31 = np.uint64(31)
_R11 = np.uint64(11)
_ONE = np.uint64(1)
_U53 = 2.0 ** -53

_BLOCK_DRAWS = 4_000_000

# AS 241 (PPND16) coefficient sets, highest order first, for the vectorized
# normal quantile.  Kept in exactly the evaluation order of the scalar
# implementation in special.py.
_C_CENTRAL_NUM = (
    2.5090809287301226727e3, 3.3430575583588128105e4, 6.7265770927008700853e4,
    4.5921953931549871457e4, 1.3731693765509461125e4, 1.9715909503065514427e3,
    1.3314166789178437745e2, 3.3871328727963666080e0,
)
_C_CENTRAL_DEN = (
    5.2264952788528545610e3, 2.8729085735721942674e4, 3.9307895800092710610e4,
    2.1213794301586595867e4, 5.3941960214247511077e3, 6.8718700749205790830e2,
    4.2313330701600911252e1, 1.0,
)
_C_MID_NUM = (
    7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
    1.27045825245236838258e0, 3.64784832476320460504e0, 5.76949722146069140550e0,
    4.63033784615654529590e0, 1.42343711074968357734e0,
)
_C_MID_DEN = (
    1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
    1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e0,
    2.05319162663775882187e0, 1.0,
)
_C_FAR_NUM = (
    2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
    2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e0,
    5.46378491116411436990e0, 6.65790464350110377720e0,
)
_C_FAR_DEN = (
    2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
    7.86869131145613259100e-4, 1.48753612908506148525e-2, 1.36929880922735805310e-1,
    5.99832206555887937690e-1, 1.0,
)


def _horner(x: np.ndarray, coeffs) -> np.ndarray:
    acc = np.full_like(x, coeffs[0])
    for c in coeffs[1:]:
        acc = acc * x + c
    return acc


def _u01(seed: np.uint64, index: np.ndarray) -> np.ndarray:
    z = seed + (index + _ONE) * _GOLD
    z = (z ^ (z >> _R30)) * _MIX1
    z = (z ^ (z >> _R27)) * _MIX2
    z = z ^ (z >> _R31)
    return ((z >> _R11).astype(np.float64) + 0.5) * _U53


def _norm_quantile(p: np.ndarray) -> np.ndarray:
    out = np.empty_like(p)
    q = p - 0.5
    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _horner(r, _C_CENTRAL_NUM) / _horner(r, _C_CENTRAL_DEN)
    tails = ~central
    if tails.any():
        qt = q[tails]
        r = np.sqrt(-np.log(np.where(qt < 0.0, p[tails], 1.0 - p[tails])))
        val = np.empty_like(r)
        near = r <= 5.0
        rn = r[near] - 1.6
        val[near] = _horner(rn, _C_MID_NUM) / _horner(rn, _C_MID_DEN)
        rf = r[~near] - 5.0
        val[~near] = _horner(rf, _C_FAR_NUM) / _horner(rf, _C_FAR_DEN)
        out[tails] = np.where(qt < 0.0, -val, val)
    return out


def _transform(u: np.ndarray, family: int, a: float, b: float) -> np.ndarray:
    if family == 0:
        return a + (b - a) * u
    if family == 1:
        return -np.log1p(-u) / a
    if family == 2:
        return a + b * _norm_quantile(u)
    if family == 3:
        return a + b * np.log(u / (1.0 - u))
    return a + b * np.tan(np.pi * (u - 0.5))


def quantile_replicates(seed, n, replicates, family, a, b, k_index, x_p):
    """Per replicate: the k_index-th smallest of n inverse-CDF draws, and the
    count of draws at or below x_p."""
    qv = np.empty(replicates, dtype=np.float64)
    below = np.empty(replicates, dtype=np.int64)
    seed = np.uint64(seed)
    cols = np.arange(n, dtype=np.uint64)
    block = max(1, _BLOCK_DRAWS // max(int(n), 1))
    for start in range(0, replicates, block):
        stop = min(start + block, replicates)
        rows = np.arange(start, stop, dtype=np.uint64)
        idx = rows[:, None] * np.uint64(n) + cols[None, :]
        x = _transform(_u01(seed, idx), family, a, b)
        below[start:stop] = np.count_nonzero(x <= x_p, axis=1)
        qv[start:stop] = np.partition(x, k_index, axis=1)[:, k_index]
    return qv, below
