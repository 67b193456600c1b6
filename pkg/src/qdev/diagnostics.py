"""Deterministic convergence sweeps against the exact oracle.

Every cell of every table is produced by calling the named library
operation with the row's parameters, so tables are reproducible cell by
cell.  Monte Carlo never enters here — tolerances stay tight because there
is no sampling noise.  Tolerance constants quoted in outputs (budget caps,
boundedness factors) are desk-scale engineering numbers, not theory.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import special
from .deviations import bahadur_rao_log, cramer_log_ratio, mdp_rate
from .distributions import DistributionSpec, format_distribution, pdf, quantile
from .errors import ExpansionDomainError, InsufficientDataError, ParameterError
from .exact import QuantileProblem, exact_tail, exact_tail_normalized, sample_quantile_cdf

CONVERGENCE_COLUMNS = (
    "key", "exact_log", "br_paper_log", "br_lattice_log",
    "normal_log", "cramer_ratio", "ldp_exponent",
)


def parse_grid(text: str, integer: bool = False) -> list:
    """Parse the grid syntax ``start:end:geo|lin:count``.

    ``geo`` spaces points geometrically (start > 0 required), ``lin``
    linearly; endpoints included.  ``integer=True`` rounds to ints.
    """
    parts = text.split(":")
    if len(parts) != 4:
        raise ParameterError(f"grid must be 'start:end:geo|lin:count', got {text!r}")
    try:
        start, end = float(parts[0]), float(parts[1])
        count = int(parts[3])
    except ValueError as exc:
        raise ParameterError(f"bad grid numbers in {text!r}") from exc
    mode = parts[2].lower()
    if mode not in ("geo", "lin"):
        raise ParameterError(f"grid mode must be 'geo' or 'lin', got {mode!r}")
    if count < 1:
        raise ParameterError(f"grid count must be >= 1, got {count}")
    if start > end:
        raise ParameterError(f"grid start {start} exceeds end {end}")
    if count == 1:
        vals = np.array([start])
    elif mode == "geo":
        if start <= 0.0:
            raise ParameterError("geometric grid requires start > 0")
        vals = np.geomspace(start, end, count)
    else:
        vals = np.linspace(start, end, count)
    if integer:
        return [max(1, int(round(v))) for v in vals]
    return [float(v) for v in vals]


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _sanitize_float(v):
    if isinstance(v, float) and not math.isfinite(v):
        if math.isnan(v):
            return "nan"
        return "inf" if v > 0 else "-inf"
    return v


def _restore_float(v):
    if isinstance(v, str) and v in ("inf", "-inf", "nan"):
        return float(v)
    return v


@dataclass
class SweepTable:
    """Rows keyed by the sweep variable, with a fixed column order.

    ``meta`` records the problem description and grid spec; every numeric
    entry is reproducible from the named module operation with the row's
    parameters.
    """

    kind: str
    columns: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt_value(row[c]) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "columns": list(self.columns),
            "rows": [{c: _sanitize_float(row[c]) for c in self.columns} for row in self.rows],
            "meta": {k: _sanitize_float(v) for k, v in self.meta.items()},
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "SweepTable":
        payload = json.loads(text)
        return cls(
            kind=payload["kind"],
            columns=tuple(payload["columns"]),
            rows=[{k: _restore_float(v) for k, v in row.items()} for row in payload["rows"]],
            meta={k: _restore_float(v) for k, v in payload["meta"].items()},
        )


def normalized_scale(dist: DistributionSpec, p: float, n: int) -> float:
    """Factor mapping a raw offset t to the normalized scale: sqrt(n) f(x_p) / sigma_p."""
    f_xp = pdf(dist, quantile(dist, p))
    return math.sqrt(n) * f_xp / math.sqrt(p * (1.0 - p))


def convergence_sweep(
    dist: DistributionSpec,
    p: float,
    t: float,
    side: str,
    n_grid: Sequence[int],
    boundary: str = "inclusive",
) -> SweepTable:
    """Exact tail vs both sharp-LD prefactor modes vs the normal tail, per n.

    Columns: exact log-probability, both expansion logs, the normal-tail log
    at the equivalent normalized threshold, the log-ratio of exact to normal,
    and the finite-n LDP exponent -(1/n) ln(exact).  The per-row winner
    between prefactor modes (smaller |log difference| from exact) lands in
    ``meta['br_winner_by_key']``.
    """
    if not t > 0.0:
        raise ParameterError(f"convergence sweep requires t > 0, got {t}")
    n_grid = sorted(int(n) for n in n_grid)
    table = SweepTable(
        kind="convergence",
        columns=CONVERGENCE_COLUMNS,
        meta={
            "dist": format_distribution(dist), "p": p, "t": t, "side": side,
            "boundary": boundary, "key_name": "n",
        },
    )
    def br_log(problem: QuantileProblem, mode: str) -> float:
        # offsets beyond the support make the expansion degenerate: the
        # approximated probability is 0
        try:
            return bahadur_rao_log(problem, mode).log_approx
        except ExpansionDomainError:
            return -math.inf

    winners: dict[str, str] = {}
    for n in n_grid:
        problem = QuantileProblem(dist, p, n, t, side)
        exact_log = exact_tail(problem, boundary).log_value
        paper = br_log(problem, "paper")
        lattice = br_log(problem, "lattice")
        t_r = t * normalized_scale(dist, p, n)
        normal_log = special.log_norm_sf(t_r)
        ratio = cramer_log_ratio(dist, p, n, t_r, side)
        row = {
            "key": n,
            "exact_log": exact_log,
            "br_paper_log": paper,
            "br_lattice_log": lattice,
            "normal_log": normal_log,
            "cramer_ratio": ratio,
            "ldp_exponent": -exact_log / n,
        }
        table.rows.append(row)
        if math.isfinite(exact_log) and math.isfinite(paper) and math.isfinite(lattice):
            winners[str(n)] = (
                "lattice" if abs(exact_log - lattice) <= abs(exact_log - paper) else "paper"
            )
    table.meta["br_winner_by_key"] = winners
    return table


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float


def fit_exponent(table: SweepTable) -> ExponentFit:
    """Least-squares fit of the exact log-probability against n.

    The slope estimates -Lambda(t); requires >= 3 finite rows.
    """
    xs, ys = [], []
    for row in table.rows:
        y = row["exact_log"]
        if math.isfinite(y):
            xs.append(float(row["key"]))
            ys.append(y)
    if len(xs) < 3:
        raise InsufficientDataError(f"need >= 3 finite rows, got {len(xs)}")
    x = np.asarray(xs)
    y = np.asarray(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentFit(float(slope), float(intercept), r2)


@dataclass(frozen=True)
class CramerEnvelopeFit:
    """max over (n, t) of |ln(exact/normal)| * sqrt(n) / (1 + t^3)."""

    constant: float
    per_n: dict[int, float]
    table: SweepTable


def cramer_envelope_fit(
    dist: DistributionSpec,
    p: float,
    side: str,
    n_grid: Sequence[int],
    t_count: int = 21,
) -> CramerEnvelopeFit:
    """Fit the moderate-deviation envelope constant on t in [0, n^(1/6)].

    For each n the normalized thresholds run over a ``t_count``-point linear
    grid up to n^(1/6); the scaled column is |cramer_log_ratio| * sqrt(n) /
    (1 + t^3).
    """
    if t_count < 1:
        raise ParameterError(f"t_count must be >= 1, got {t_count}")
    n_grid = sorted(int(n) for n in n_grid)
    table = SweepTable(
        kind="cramer",
        columns=("key", "n", "t_r", "cramer_log_ratio", "scaled"),
        meta={"dist": format_distribution(dist), "p": p, "side": side, "t_count": t_count},
    )
    per_n: dict[int, float] = {}
    key = 0
    for n in n_grid:
        ts = np.linspace(0.0, n ** (1.0 / 6.0), t_count)
        worst = 0.0
        for t_r in ts:
            ratio = cramer_log_ratio(dist, p, n, float(t_r), side)
            scaled = abs(ratio) * math.sqrt(n) / (1.0 + float(t_r) ** 3)
            table.rows.append({
                "key": key, "n": n, "t_r": float(t_r),
                "cramer_log_ratio": ratio, "scaled": scaled,
            })
            key += 1
            if scaled > worst:
                worst = scaled
        per_n[n] = worst
    constant = max(per_n.values())
    table.meta["constant"] = constant
    return CramerEnvelopeFit(constant, per_n, table)


@dataclass(frozen=True)
class BerryEsseenReport:
    """Grid sup of |P(R_n <= t) - Phi(t)| with a refinement pass.

    The grid sup is a certified lower bound; ``grid_modulus`` bounds how much
    the true sup can exceed it (largest step-to-step change observed).
    """

    n: int
    sup_diff: float
    scaled: float
    argmax_t: float
    grid_step: float
    grid_modulus: float


def berry_esseen_sup(
    dist: DistributionSpec, p: float, n: int, grid_density: int = 4001
) -> BerryEsseenReport:
    """Sup-distance between the normalized sample-quantile CDF and Phi.

    Evaluates on a uniform grid over t in [-8, 8] plus one local refinement
    pass around the argmax at 10x resolution.
    """
    if grid_density < 3:
        raise ParameterError(f"grid_density must be >= 3, got {grid_density}")
    x_p = quantile(dist, p)
    inv_scale = 1.0 / normalized_scale(dist, p, n)

    def diffs(ts: np.ndarray) -> np.ndarray:
        out = np.empty(ts.size)
        for i, t in enumerate(ts):
            pr = sample_quantile_cdf(dist, p, n, x_p + float(t) * inv_scale).value
            out[i] = abs(pr - special.norm_cdf(float(t)))
        return out

    ts = np.linspace(-8.0, 8.0, grid_density)
    step = ts[1] - ts[0]
    d = diffs(ts)
    i = int(np.argmax(d))
    lo = max(-8.0, ts[i] - step)
    hi = min(8.0, ts[i] + step)
    ts2 = np.linspace(lo, hi, 21)
    d2 = diffs(ts2)
    j = int(np.argmax(d2))
    if d2[j] >= d[i]:
        sup, arg = float(d2[j]), float(ts2[j])
    else:
        sup, arg = float(d[i]), float(ts[i])
    modulus = float(max(np.max(np.abs(np.diff(d))), np.max(np.abs(np.diff(d2)))))
    return BerryEsseenReport(
        n=n, sup_diff=sup, scaled=sup * math.sqrt(n), argmax_t=arg,
        grid_step=float(step), grid_modulus=modulus,
    )


def berry_esseen_sweep(
    dist: DistributionSpec, p: float, n_grid: Sequence[int], grid_density: int = 4001
) -> SweepTable:
    """Berry-Esseen sup reports, one row per n."""
    table = SweepTable(
        kind="berry-esseen",
        columns=("key", "sup_diff", "scaled", "argmax_t", "grid_step", "grid_modulus"),
        meta={"dist": format_distribution(dist), "p": p, "grid_density": grid_density},
    )
    for n in sorted(int(n) for n in n_grid):
        rep = berry_esseen_sup(dist, p, n, grid_density)
        table.rows.append({
            "key": n, "sup_diff": rep.sup_diff, "scaled": rep.scaled,
            "argmax_t": rep.argmax_t, "grid_step": rep.grid_step,
            "grid_modulus": rep.grid_modulus,
        })
    return table


def mdp_sweep(
    dist: DistributionSpec,
    p: float,
    r: float,
    alpha: float,
    n_grid: Sequence[int],
    side: str = "upper",
) -> SweepTable:
    """Normalized log-probabilities (1/a_n^2) ln P(R_n >= a_n r), a_n = n^alpha.

    The target column is -r^2/2 on the normalized scale; its raw-scale
    translation -f(x_p)^2 r_raw^2 / (2 p (1-p)) with r_raw = r sigma_p/f(x_p)
    is the same number, both are reported.
    """
    if not 0.0 < alpha < 0.5:
        raise ParameterError(f"alpha must be in (0, 1/2), got {alpha}")
    if not r >= 0.0:
        raise ParameterError(f"r must be >= 0, got {r}")
    f_xp = pdf(dist, quantile(dist, p))
    sig = math.sqrt(p * (1.0 - p))
    r_raw = r * sig / f_xp
    table = SweepTable(
        kind="mdp",
        columns=("key", "a_n", "t_r", "normalized_log", "target_rn", "r_raw", "target_raw"),
        meta={"dist": format_distribution(dist), "p": p, "r": r, "alpha": alpha, "side": side},
    )
    for n in sorted(int(n) for n in n_grid):
        a_n = n ** alpha
        t_r = a_n * r
        lg = exact_tail_normalized(dist, p, n, t_r, side).log_value
        table.rows.append({
            "key": n, "a_n": a_n, "t_r": t_r,
            "normalized_log": lg / (a_n * a_n),
            "target_rn": -0.5 * r * r,
            "r_raw": r_raw,
            "target_raw": -mdp_rate(f_xp, p, r_raw).rate,
        })
    return table


@dataclass(frozen=True)
class PnEnvelopeFit:
    """Envelope constant for quantile levels p_n = p_base * n^(-beta)."""

    constant: float
    table: SweepTable


_PN_SAFE_FAMILIES = ("normal", "logistic", "cauchy")


def pn_sweep(
    dist: DistributionSpec,
    beta: float,
    n_grid: Sequence[int],
    t_count: int = 21,
    p_base: float = 1.0,
    side: str = "upper",
) -> PnEnvelopeFit:
    """Envelope fit with n-dependent quantile levels p_n = p_base * n^(-beta).

    Scaled column: |cramer_log_ratio| * sqrt(n p_n (1-p_n)) / (1 + t^3) on
    t in [0, (n p_n (1-p_n))^(1/6)].  Families without an everywhere-positive
    density and uniformly bounded derivative (uniform, exponential) get a
    hypothesis-violation warning recorded in the table metadata.
    """
    if not 0.0 <= beta < 1.0:
        raise ParameterError(f"beta must be in [0, 1), got {beta}")
    if not 0.0 < p_base <= 1.0:
        raise ParameterError(f"p_base must be in (0, 1], got {p_base}")
    table = SweepTable(
        kind="pn",
        columns=("key", "n", "p_n", "t_r", "cramer_log_ratio", "scaled"),
        meta={"dist": format_distribution(dist), "beta": beta, "p_base": p_base, "side": side},
    )
    if dist.family not in _PN_SAFE_FAMILIES:
        table.meta["hypothesis_warning"] = (
            f"{dist.family} violates the everywhere-positive-density / bounded-f' "
            "hypotheses of the varying-level regime"
        )
    worst = 0.0
    key = 0
    for n in sorted(int(n) for n in n_grid):
        p_n = p_base * n ** (-beta)
        if not 0.0 < p_n < 1.0:
            raise ParameterError(f"p_n = {p_n} outside (0, 1) at n = {n}; use n >= 2 or p_base < 1")
        scale = n * p_n * (1.0 - p_n)
        ts = np.linspace(0.0, scale ** (1.0 / 6.0), t_count)
        for t_r in ts:
            ratio = cramer_log_ratio(dist, p_n, n, float(t_r), side)
            scaled = abs(ratio) * math.sqrt(scale) / (1.0 + float(t_r) ** 3)
            table.rows.append({
                "key": key, "n": n, "p_n": p_n, "t_r": float(t_r),
                "cramer_log_ratio": ratio, "scaled": scaled,
            })
            key += 1
            if scaled > worst:
                worst = scaled
    table.meta["constant"] = worst
    return PnEnvelopeFit(worst, table)
