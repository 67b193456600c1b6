"""Golden-section search on a closed interval.

Meant for smooth unimodal objectives (concave maximization / convex
minimization).  The interval endpoints are always evaluated and compared
against the interior estimate, so boundary optima come out exact.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import BracketError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 300,
) -> tuple[float, float]:
    """Maximize ``f`` on [lo, hi]; returns (argmax, max).

    The bracket shrinks until its width is below ``tol``.  NaN objective
    values abort with :class:`BracketError`.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise BracketError(f"invalid bracket [{lo}, {hi}]")
    if tol <= 0.0:
        raise BracketError("tolerance must be positive")

    def _eval(x: float) -> float:
        v = f(x)
        if math.isnan(v):
            raise BracketError(f"objective is NaN at {x}")
        return v

    a, b = lo, hi
    fa, fb = _eval(a), _eval(b)
    h = b - a
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = _eval(c), _eval(d)
    it = 0
    while h > tol and it < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = _INVPHI * h
            c = a + _INVPHI2 * h
            fc = _eval(c)
        else:
            a, c, fc = c, d, fd
            h = _INVPHI * h
            d = a + _INVPHI * h
            fd = _eval(d)
        it += 1

    best_x, best_f = c, fc
    for x, v in ((d, fd), (lo, fa), (hi, fb)):
        if v > best_f:
            best_x, best_f = x, v
    return best_x, best_f


def golden_section_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 300,
) -> tuple[float, float]:
    """Minimize ``f`` on [lo, hi]; returns (argmin, min)."""
    x, v = golden_section_max(lambda u: -f(u), lo, hi, tol=tol, max_iter=max_iter)
    return x, -v
