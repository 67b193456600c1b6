"""Closed-form population models: CDF, density, density derivative, quantile.

Five strictly increasing continuous families are built in — uniform,
exponential, normal, logistic, Cauchy — so the quantile function is the true
inverse of the CDF.  The Cauchy family exercises the "density positive on all
of R with uniformly bounded derivative" regime; the uniform family exercises
bounded support and its non-differentiable endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import special
from .errors import DomainError, ParameterError

FAMILIES = ("uniform", "exponential", "normal", "logistic", "cauchy")

# integer ids used by the simulation kernels
FAMILY_IDS = {name: i for i, name in enumerate(FAMILIES)}

_PARAM_COUNTS = {"uniform": 2, "exponential": 1, "normal": 2, "logistic": 2, "cauchy": 2}


@dataclass(frozen=True)
class DistributionSpec:
    """A continuous population model: family name plus real parameters.

    Parameter layout: uniform(a, b) with a < b; exponential(rate);
    normal(mean, sd); logistic(location, scale); cauchy(location, scale).
    """

    family: str
    params: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        try:
            params = tuple(float(v) for v in self.params)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"non-numeric parameters {self.params!r}") from exc
        object.__setattr__(self, "params", params)
        if len(params) != _PARAM_COUNTS[self.family]:
            raise ParameterError(
                f"{self.family} takes {_PARAM_COUNTS[self.family]} parameters, got {len(params)}"
            )
        if not all(math.isfinite(v) for v in params):
            raise ParameterError(f"parameters must be finite, got {params}")
        if self.family == "uniform" and not params[0] < params[1]:
            raise ParameterError(f"uniform requires a < b, got a={params[0]}, b={params[1]}")
        if self.family == "exponential" and params[0] <= 0.0:
            raise ParameterError(f"exponential rate must be > 0, got {params[0]}")
        if self.family in ("normal", "logistic", "cauchy") and params[1] <= 0.0:
            raise ParameterError(f"{self.family} scale must be > 0, got {params[1]}")

    # Convenience method forms of the module-level operations.
    def cdf(self, x: float) -> float:
        return cdf(self, x)

    def pdf(self, x: float) -> float:
        return pdf(self, x)

    def pdf_prime(self, x: float) -> float:
        return pdf_prime(self, x)

    def quantile(self, p: float) -> float:
        return quantile(self, p)

    def __str__(self) -> str:
        return format_distribution(self)


def parse_distribution(text: str) -> DistributionSpec:
    """Parse the CLI syntax ``family:param1,param2`` (e.g. ``uniform:0,1``)."""
    head, sep, tail = text.partition(":")
    if not sep or not tail:
        raise ParameterError(f"expected 'family:p1[,p2]', got {text!r}")
    family = head.strip().lower()
    try:
        params = tuple(float(tok) for tok in tail.split(","))
    except ValueError as exc:
        raise ParameterError(f"non-numeric parameter in {text!r}") from exc
    return DistributionSpec(family, params)


def format_distribution(spec: DistributionSpec) -> str:
    return spec.family + ":" + ",".join(repr(v) for v in spec.params)


def cdf(spec: DistributionSpec, x: float) -> float:
    """Distribution function F(x), exact closed form per family."""
    if math.isnan(x):
        raise DomainError("cdf argument is NaN")
    f = spec.family
    if f == "uniform":
        a, b = spec.params
        if x <= a:
            return 0.0
        if x >= b:
            return 1.0
        return (x - a) / (b - a)
    if f == "exponential":
        rate = spec.params[0]
        return -math.expm1(-rate * x) if x > 0.0 else 0.0
    if f == "normal":
        mean, sd = spec.params
        return special.norm_cdf((x - mean) / sd)
    if f == "logistic":
        loc, s = spec.params
        z = (x - loc) / s
        if z >= 0.0:
            return 1.0 / (1.0 + math.exp(-z))
        e = math.exp(z)
        return e / (1.0 + e)
    # cauchy; split to avoid cancellation in the tails
    loc, s = spec.params
    z = (x - loc) / s
    if z == 0.0:
        return 0.5
    if z < 0.0:
        return math.atan(-1.0 / z) / math.pi
    return 1.0 - math.atan(1.0 / z) / math.pi


def pdf(spec: DistributionSpec, x: float) -> float:
    """Density f(x) >= 0; zero outside the support."""
    if math.isnan(x):
        raise DomainError("pdf argument is NaN")
    f = spec.family
    if f == "uniform":
        a, b = spec.params
        return 1.0 / (b - a) if a <= x <= b else 0.0
    if f == "exponential":
        rate = spec.params[0]
        return rate * math.exp(-rate * x) if x >= 0.0 else 0.0
    if f == "normal":
        mean, sd = spec.params
        return special.norm_pdf((x - mean) / sd) / sd
    if f == "logistic":
        loc, s = spec.params
        e = math.exp(-abs((x - loc) / s))
        return e / (s * (1.0 + e) ** 2)
    loc, s = spec.params
    z = (x - loc) / s
    return 1.0 / (math.pi * s * (1.0 + z * z))


def pdf_prime(spec: DistributionSpec, x: float) -> float:
    """Derivative f'(x) at an interior point of the support.

    Raises :class:`DomainError` where the density is not differentiable
    (uniform endpoints and outside, the exponential kink at 0 and below).
    """
    if math.isnan(x):
        raise DomainError("pdf_prime argument is NaN")
    lo, hi = differentiable_range(spec)
    if not lo < x < hi:
        raise DomainError(f"density of {spec.family} is not differentiable at x={x}")
    f = spec.family
    if f == "uniform":
        return 0.0
    if f == "exponential":
        rate = spec.params[0]
        return -rate * rate * math.exp(-rate * x)
    if f == "normal":
        mean, sd = spec.params
        z = (x - mean) / sd
        return -z * special.norm_pdf(z) / (sd * sd)
    if f == "logistic":
        loc, s = spec.params
        z = (x - loc) / s
        sig = 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))
        return sig * (1.0 - sig) * (1.0 - 2.0 * sig) / (s * s)
    loc, s = spec.params
    z = (x - loc) / s
    return -2.0 * z / (math.pi * s * s * (1.0 + z * z) ** 2)


def quantile(spec: DistributionSpec, p: float) -> float:
    """Inverse CDF; closed form for every family."""
    if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
        raise DomainError(f"quantile requires 0 < p < 1, got {p}")
    f = spec.family
    if f == "uniform":
        a, b = spec.params
        return a + p * (b - a)
    if f == "exponential":
        rate = spec.params[0]
        return -math.log1p(-p) / rate
    if f == "normal":
        mean, sd = spec.params
        return mean + sd * special.norm_quantile(p)
    if f == "logistic":
        loc, s = spec.params
        return loc + s * math.log(p / (1.0 - p))
    loc, s = spec.params
    return loc + s * math.tan(math.pi * (p - 0.5))


def support(spec: DistributionSpec) -> tuple[float, float]:
    """Closed support of the distribution."""
    if spec.family == "uniform":
        return spec.params[0], spec.params[1]
    if spec.family == "exponential":
        return 0.0, math.inf
    return -math.inf, math.inf


def differentiable_range(spec: DistributionSpec) -> tuple[float, float]:
    """Open interval on which the density is differentiable."""
    if spec.family == "uniform":
        return spec.params[0], spec.params[1]
    if spec.family == "exponential":
        return 0.0, math.inf
    return -math.inf, math.inf


@dataclass(frozen=True)
class RegularityReport:
    """Local regularity of the density around the target quantile.

    ``hypotheses_met`` is true iff f(x_p) > 0 and |f'| is defined and finite
    at every probe point of the window.
    """

    f_at_xp: float
    f_prime_bound: float
    hypotheses_met: bool


def validate_regularity(
    spec: DistributionSpec, p: float, radius: float, probes: int = 10_001
) -> RegularityReport:
    """Probe f(x_p) and sup |f'| on [x_p - radius, x_p + radius].

    The sup is taken over a dense grid (default 10001 points).  Probe points
    where the density is not differentiable (outside the support, or at a
    kink) mark the hypotheses as unmet but do not raise.
    """
    if not radius > 0.0:
        raise DomainError(f"radius must be > 0, got {radius}")
    x_p = quantile(spec, p)
    f_xp = pdf(spec, x_p)
    lo, hi = differentiable_range(spec)
    grid = np.linspace(x_p - radius, x_p + radius, probes)
    bound = 0.0
    all_valid = True
    for x in grid:
        if not lo < x < hi:
            all_valid = False
            continue
        d = abs(pdf_prime(spec, float(x)))
        if not math.isfinite(d):
            all_valid = False
            continue
        if d > bound:
            bound = d
    return RegularityReport(
        f_at_xp=f_xp,
        f_prime_bound=bound,
        hypotheses_met=bool(f_xp > 0.0 and all_valid),
    )
