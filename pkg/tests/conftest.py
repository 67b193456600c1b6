"""Shared test oracles: extended-precision binomial enumeration and mpmath
references, all independent of the library code paths they check."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from qdev import DistributionSpec


def binom_pmf_exact(n: int, q: float) -> list[Fraction]:
    """Exact rational pmf of Bin(n, q) at the *binary* value of the float q."""
    qf = Fraction(q)
    one_m = 1 - qf
    return [math.comb(n, j) * qf ** j * one_m ** (n - j) for j in range(n + 1)]


def binom_tail_exact(n: int, q: float, k: int, side: str = "at_most") -> Fraction:
    """Exact rational binomial tail by exhaustive summation."""
    pmf = binom_pmf_exact(n, q)
    if side == "at_most":
        return sum(pmf[: max(0, min(k, n) + 1)], Fraction(0))
    return sum(pmf[max(k, 0):], Fraction(0))


def rel_err(got: float, ref: float) -> float:
    if ref == 0.0:
        return abs(got)
    return abs(got - ref) / abs(ref)


@pytest.fixture(scope="session")
def uniform01() -> DistributionSpec:
    return DistributionSpec("uniform", (0.0, 1.0))


@pytest.fixture(scope="session")
def all_families() -> tuple[DistributionSpec, ...]:
    return (
        DistributionSpec("uniform", (0.0, 1.0)),
        DistributionSpec("exponential", (1.0,)),
        DistributionSpec("normal", (0.0, 1.0)),
        DistributionSpec("logistic", (0.0, 1.0)),
        DistributionSpec("cauchy", (0.0, 1.0)),
    )
