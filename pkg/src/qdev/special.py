"""Scalar special functions: the complementary error function family and the
standard normal quantile.

Implemented from the classical rational-approximation schemes rather than
libm so accuracy does not depend on the platform:

* ``erfc`` / ``erfcx``: W. J. Cody's rational Chebyshev approximations
  (the SPECFUN ``calerf`` coefficients), good to a few ulp across the
  double range.  ``erfc`` uses the standard split of exp(-y*y) into an
  exactly representable part and a small remainder to keep relative
  accuracy in the far tail.
* ``norm_quantile``: Wichura's algorithm AS 241 (the PPND16 coefficient
  set), relative accuracy ~1e-15.

Everything is plain scalar arithmetic on Python floats; ``norm_quantile``
is deliberately numba-compilable so the simulation kernels can reuse it
verbatim.
"""

from __future__ import annotations

import math

from .errors import DomainError

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_INV_SQRT_PI = 5.6418958354775628695e-1  # 1/sqrt(pi)

# Cody's coefficients: erf on |x| <= 0.46875.
_ERF_A = (
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
)
_ERF_B = (
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
)
# erfcx on 0.46875 < x <= 4.
_ERF_C = (
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
)
_ERF_D = (
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
)
# erfcx on x > 4 (expansion in 1/x^2).
_ERF_P = (
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
)
_ERF_Q = (
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
)

_THRESH = 0.46875


def _erf_small(x: float) -> float:
    # erf(x) for |x| <= 0.46875
    y = abs(x)
    ysq = y * y if y > 1.11e-16 else 0.0
    xnum = _ERF_A[4] * ysq
    xden = ysq
    for i in range(3):
        xnum = (xnum + _ERF_A[i]) * ysq
        xden = (xden + _ERF_B[i]) * ysq
    return x * (xnum + _ERF_A[3]) / (xden + _ERF_B[3])


def _erfcx_mid(y: float) -> float:
    # erfcx(y) for 0.46875 < y <= 4
    xnum = _ERF_C[8] * y
    xden = y
    for i in range(7):
        xnum = (xnum + _ERF_C[i]) * y
        xden = (xden + _ERF_D[i]) * y
    return (xnum + _ERF_C[7]) / (xden + _ERF_D[7])


def _erfcx_far(y: float) -> float:
    # erfcx(y) for y > 4
    ysq = 1.0 / (y * y)
    xnum = _ERF_P[5] * ysq
    xden = ysq
    for i in range(4):
        xnum = (xnum + _ERF_P[i]) * ysq
        xden = (xden + _ERF_Q[i]) * ysq
    res = ysq * (xnum + _ERF_P[4]) / (xden + _ERF_Q[4])
    return (_INV_SQRT_PI - res) / y


def erfcx(x: float) -> float:
    """Scaled complementary error function exp(x^2) * erfc(x) for x >= 0."""
    if math.isnan(x) or x < 0.0:
        raise DomainError("erfcx requires a nonnegative argument")
    if x <= _THRESH:
        return math.exp(x * x) * (1.0 - _erf_small(x))
    if x <= 4.0:
        return _erfcx_mid(x)
    return _erfcx_far(x)


def erfc(x: float) -> float:
    """Complementary error function on the whole real line.

    Underflows to 0 for x beyond ~27.2 where the true value is below the
    smallest subnormal double.
    """
    if math.isnan(x):
        return math.nan
    y = abs(x)
    if y <= _THRESH:
        res = 1.0 - _erf_small(y)
    elif y > 27.5:
        # true value is below the smallest subnormal double
        res = 0.0
    else:
        scaled = _erfcx_mid(y) if y <= 4.0 else _erfcx_far(y)
        # exp(-y*y) with the argument split so the big part is exact
        ysq = math.floor(y * 16.0) / 16.0
        delta = (y - ysq) * (y + ysq)
        res = math.exp(-ysq * ysq) * math.exp(-delta) * scaled
    return 2.0 - res if x < 0.0 else res


def norm_cdf(z: float) -> float:
    """Standard normal distribution function Phi(z)."""
    return 0.5 * erfc(-z / SQRT2)


def norm_sf(z: float) -> float:
    """Standard normal tail 1 - Phi(z)."""
    return 0.5 * erfc(z / SQRT2)


def log_norm_sf(z: float) -> float:
    """log(1 - Phi(z)), accurate far into the tail (|z| up to ~38 keeps the
    relative error of the implied linear value below 1e-12)."""
    if math.isnan(z):
        return math.nan
    if z < 0.0:
        return math.log1p(-norm_sf(-z))
    if math.isinf(z):
        return -math.inf
    return math.log(0.5 * erfcx(z / SQRT2)) - 0.5 * z * z


def norm_pdf(z: float) -> float:
    """Standard normal density."""
    return math.exp(-0.5 * z * z) * INV_SQRT_2PI


def norm_quantile(p: float) -> float:
    """Inverse of the standard normal CDF (AS 241, PPND16 constants)."""
    if not 0.0 < p < 1.0:
        raise DomainError("norm_quantile requires 0 < p < 1")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r = r - 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    return -val if q < 0.0 else val
