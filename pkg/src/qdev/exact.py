"""Exact finite-sample tail probabilities for sample quantiles.

The sample p-quantile of n i.i.d. draws sits above a fixed threshold x
exactly when at most floor(np) draws fall at or below x, so every tail event
reduces to a binomial tail with success probability F(x):

    P(x_{n,p} >= x_p + t) = P(Bin(n, F(x_p + t)) <= floor(np))
    P(x_{n,p} <= x_p - t) = P(Bin(n, F(x_p - t)) >= ceil(np))

Both conventions keep the boundary term when np is an integer (the events
are non-strict); the ``boundary="strict"`` flag drops it, which differs by
exactly one pmf term.

All numerics run in log space — rates up to n*Lambda of several hundred
nats underflow doubles — and the linear value is materialised only on
output.  The binomial kernel always sums the smaller tail directly and
derives the other side through log1p(-exp(.)).
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .distributions import DistributionSpec, cdf, pdf, quantile
from .errors import DegenerateDensityError, DomainError, ParameterError

SIDES = ("upper", "lower")
BOUNDARY_MODES = ("inclusive", "strict")

# Largest n for which binomial coefficients are taken from exact integer
# arithmetic.  Beyond it the log-gamma route is used, whose absolute error
# in the log grows like |lgamma(n+1)| * eps (~1e-10 at n = 1e5).
_EXACT_COMB_MAX = 2000


@dataclass(frozen=True)
class LogProbability:
    """A probability carried in the log domain.

    ``value`` is the linear-domain shadow exp(log_value); it may underflow
    to 0 even though log_value is finite.
    """

    log_value: float

    def __post_init__(self) -> None:
        if math.isnan(self.log_value):
            raise DomainError("log-probability is NaN")
        if self.log_value > 0.0:
            raise DomainError(f"log-probability {self.log_value} exceeds 0")

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    @classmethod
    def from_linear(cls, p: float) -> "LogProbability":
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p} outside [0, 1]")
        return cls(math.log(p) if p > 0.0 else -math.inf)

    @classmethod
    def certain(cls) -> "LogProbability":
        return cls(0.0)

    @classmethod
    def impossible(cls) -> "LogProbability":
        return cls(-math.inf)


@dataclass(frozen=True)
class QuantileProblem:
    """One deviation question: distribution, quantile level p, sample size n,
    offset t >= 0 and tail side."""

    dist: DistributionSpec
    p: float
    n: int
    t: float
    side: str

    def __post_init__(self) -> None:
        if not (isinstance(self.p, numbers.Real) and 0.0 < self.p < 1.0):
            raise ParameterError(f"p must be in (0, 1), got {self.p}")
        if not (isinstance(self.n, numbers.Integral) and self.n >= 1):
            raise ParameterError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (isinstance(self.t, numbers.Real) and self.t >= 0.0 and math.isfinite(self.t)):
            raise ParameterError(f"t must be finite and >= 0, got {self.t}")
        if self.side not in SIDES:
            raise ParameterError(f"side must be one of {SIDES}, got {self.side!r}")

    @property
    def x_p(self) -> float:
        return quantile(self.dist, self.p)

    @property
    def q(self) -> float:
        """Success probability of the reduced binomial: F(x_p + t) or F(x_p - t)."""
        shift = self.t if self.side == "upper" else -self.t
        return cdf(self.dist, self.x_p + shift)


def quantile_rank(n: int, p: float) -> int:
    """1-based order-statistic rank ceil(n*p) of the sample p-quantile."""
    return int(math.ceil(n * p))


def sample_quantile_from_data(data, p: float) -> float:
    """Sample p-quantile of a data sequence: the ceil(np)-th order statistic.

    Selection runs in expected linear time via introselect.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must be in (0, 1), got {p}")
    arr = np.asarray(data, dtype=np.float64).ravel()
    if arr.size == 0:
        raise DomainError("data must be nonempty")
    k = quantile_rank(arr.size, p)
    return float(np.partition(arr, k - 1)[k - 1])


@lru_cache(maxsize=8)
def _log_binom_coeffs(n: int) -> np.ndarray:
    """log C(n, j) for j = 0..n.

    Exact integer binomials (log'd at the end, math.log handles ints beyond
    the float range) up to ``_EXACT_COMB_MAX``; log-gamma differences above.
    """
    out = np.empty(n + 1, dtype=np.float64)
    if n <= _EXACT_COMB_MAX:
        c = 1
        for j in range(n // 2 + 1):
            out[j] = math.log(c) if j else 0.0
            c = c * (n - j) // (j + 1)
        out[n // 2 + 1:] = out[(n - 1) // 2::-1]
    else:
        g = gammaln(np.arange(n + 2, dtype=np.float64))
        j = np.arange(n + 1)
        out = g[n + 1] - g[j + 1] - g[n + 1 - j]
    out.flags.writeable = False
    return out


def _log_tail_direct(n: int, q: float, j_lo: int, j_hi: int) -> float:
    """log sum of Bin(n, q) pmf over j_lo..j_hi, summed via log-sum-exp."""
    j = np.arange(j_lo, j_hi + 1, dtype=np.float64)
    ls = _log_binom_coeffs(n)[j_lo:j_hi + 1] + j * math.log(q) + (n - j) * math.log1p(-q)
    m = float(ls.max())
    return m + math.log(float(np.sum(np.exp(ls - m))))


def _validate_binomial_args(n, q, k, side):
    if not (isinstance(n, numbers.Integral) and n >= 1):
        raise ParameterError(f"n must be a positive integer, got {n}")
    if not (isinstance(q, numbers.Real) and 0.0 <= q <= 1.0):
        raise ParameterError(f"q must be in [0, 1], got {q}")
    if not isinstance(k, numbers.Integral):
        raise ParameterError(f"k must be an integer, got {k}")
    if side not in ("at_most", "at_least"):
        raise ParameterError(f"side must be 'at_most' or 'at_least', got {side!r}")
    return int(n), float(q), int(k)


def binomial_tail_log(n: int, q: float, k: int, side: str = "at_most") -> LogProbability:
    """log P(Bin(n, q) <= k) or log P(Bin(n, q) >= k).

    Out-of-range k follows the tail conventions (probability 0 or 1) rather
    than raising; q in {0, 1} short-circuits combinatorially.  The smaller
    tail is always summed directly; the larger one is its complement.
    """
    n, q, k = _validate_binomial_args(n, q, k, side)
    if side == "at_most":
        if k < 0:
            return LogProbability.impossible()
        if k >= n:
            return LogProbability.certain()
        if q == 0.0:
            return LogProbability.certain()
        if q == 1.0:
            return LogProbability.impossible()
        if k <= n * q:
            lv = _log_tail_direct(n, q, 0, k)
        else:
            lv = math.log1p(-math.exp(_log_tail_direct(n, q, k + 1, n)))
    else:
        if k <= 0:
            return LogProbability.certain()
        if k > n:
            return LogProbability.impossible()
        if q == 0.0:
            return LogProbability.impossible()
        if q == 1.0:
            return LogProbability.certain()
        if k >= n * q:
            lv = _log_tail_direct(n, q, k, n)
        else:
            lv = math.log1p(-math.exp(_log_tail_direct(n, q, 0, k - 1)))
    return LogProbability(min(lv, 0.0))


def _boundary_threshold(n: int, p: float, side: str, boundary: str) -> int:
    npf = n * p
    if side == "upper":
        k = math.floor(npf)
        if boundary == "strict" and float(npf).is_integer():
            k -= 1
    else:
        k = math.ceil(npf)
        if boundary == "strict" and float(npf).is_integer():
            k += 1
    return int(k)


def exact_tail(problem: QuantileProblem, boundary: str = "inclusive") -> LogProbability:
    """Exact tail probability of the sample quantile via the binomial identity.

    side="upper": P(x_{n,p} - x_p >= t); side="lower": P(x_{n,p} - x_p <= -t).
    ``boundary`` controls whether the Bin = np term is included when np is an
    integer (inclusive matches the non-strict events).
    """
    if boundary not in BOUNDARY_MODES:
        raise ParameterError(f"boundary must be one of {BOUNDARY_MODES}, got {boundary!r}")
    k = _boundary_threshold(problem.n, problem.p, problem.side, boundary)
    tail_side = "at_most" if problem.side == "upper" else "at_least"
    return binomial_tail_log(problem.n, problem.q, k, tail_side)


def normalized_offset(dist: DistributionSpec, p: float, n: int, t_r: float) -> float:
    """Map a threshold on the sqrt(n) f(x_p) (x_{n,p} - x_p) / sigma_p scale
    back to a raw offset t."""
    if not t_r >= 0.0:
        raise DomainError(f"t_r must be >= 0, got {t_r}")
    f_xp = pdf(dist, quantile(dist, p))
    if f_xp <= 0.0:
        raise DegenerateDensityError(
            f"density of {dist} vanishes at the {p}-quantile; the normalized scale is undefined"
        )
    return t_r * math.sqrt(p * (1.0 - p)) / (math.sqrt(n) * f_xp)


def exact_tail_normalized(
    dist: DistributionSpec,
    p: float,
    n: int,
    t_r: float,
    side: str,
    boundary: str = "inclusive",
) -> LogProbability:
    """Exact P(+-R_n >= t_r) where R_n is the normalized quantile deviation."""
    t = normalized_offset(dist, p, n, t_r)
    return exact_tail(QuantileProblem(dist, p, n, t, side), boundary)


def sample_quantile_cdf(dist: DistributionSpec, p: float, n: int, x: float) -> LogProbability:
    """P(x_{n,p} <= x) = P(Bin(n, F(x)) >= ceil(np))."""
    if not (isinstance(n, numbers.Integral) and n >= 1):
        raise ParameterError(f"n must be a positive integer, got {n}")
    if not 0.0 < p < 1.0:
        raise ParameterError(f"p must be in (0, 1), got {p}")
    return binomial_tail_log(int(n), cdf(dist, x), quantile_rank(int(n), p), "at_least")
