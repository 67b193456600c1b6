"""Command-line front end.

Data goes to stdout (JSON by default, CSV for sweeps on request);
diagnostics go to stderr.  Exit codes: 0 success, 1 verification failure,
2 usage or domain error.  Only ``mc`` consumes randomness, and that is a
pure function of its --seed; everything else is bit-reproducible across
runs.  Probabilities are serialized in both log and linear form — linear
underflow prints as 0 with the log retained — and non-finite floats are
serialized as the strings "inf", "-inf", "nan".
"""

from __future__ import annotations

import json
import math

import click

from . import deviations, diagnostics, montecarlo
from .distributions import parse_distribution
from .errors import QdevError
from .exact import QuantileProblem, exact_tail, normalized_offset
from .deviations import bahadur_rao_log, normal_tail, rate_lambda, sigma_p, tilt_tau


def _sanitize(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        if math.isnan(obj):
            return "nan"
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _emit_json(payload: dict) -> None:
    click.echo(json.dumps(_sanitize(payload)))


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except QdevError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(2)


@click.group(cls=_Group)
def main() -> None:
    """Exact, asymptotic and simulated tail probabilities for sample quantiles."""


_dist_option = click.option(
    "--dist", "dist_text", required=True, metavar="FAMILY:P1[,P2]",
    help="Population, e.g. uniform:0,1 normal:0,1 exponential:1.",
)
_side_option = click.option(
    "--side", type=click.Choice(["upper", "lower"]), default="upper", show_default=True,
)


@main.command()
@_dist_option
@click.option("--p", type=float, required=True)
@click.option("--t", type=float, required=True)
@_side_option
def rate(dist_text: str, p: float, t: float, side: str) -> None:
    """Large-deviation rate, tilt and sigma_p for one offset."""
    dist = parse_distribution(dist_text)
    problem = QuantileProblem(dist, p, 1, t, side)
    payload = {
        "lambda": rate_lambda(problem),
        "tau": tilt_tau(problem),
        "sigma_p": sigma_p(p),
    }
    if t == 0.0:
        payload["warning"] = "t = 0: zero tilt, unusable in the sharp expansion"
    _emit_json(payload)


@main.command()
@_dist_option
@click.option("--p", type=float, required=True)
@click.option("--n", type=int, required=True)
@click.option("--t", type=float, required=True)
@_side_option
@click.option("--boundary", type=click.Choice(["inclusive", "strict"]), default="inclusive",
              show_default=True, help="Keep or drop the Bin = np term at integer np.")
def exact(dist_text: str, p: float, n: int, t: float, side: str, boundary: str) -> None:
    """Exact tail probability of the sample quantile."""
    dist = parse_distribution(dist_text)
    lp = exact_tail(QuantileProblem(dist, p, n, t, side), boundary)
    _emit_json({"log_prob": lp.log_value, "prob": lp.value})


@main.command()
@_dist_option
@click.option("--p", type=float, required=True)
@click.option("--n", type=int, required=True)
@click.option("--t", type=float, default=None, help="Raw offset.")
@click.option("--t-r", type=float, default=None, help="Offset on the normalized R_n scale.")
@_side_option
@click.option("--mode", type=click.Choice(["br-paper", "br-lattice", "normal"]),
              default="br-paper", show_default=True)
def approx(dist_text: str, p: float, n: int, t, t_r, side: str, mode: str) -> None:
    """Asymptotic tail approximation (sharp large-deviation or normal)."""
    dist = parse_distribution(dist_text)
    if (t is None) == (t_r is None):
        raise click.UsageError("provide exactly one of --t / --t-r")
    if mode == "normal":
        if t_r is None:
            t_r = t * diagnostics.normalized_scale(dist, p, n)
        lp = normal_tail(t_r)
        _emit_json({"mode": mode, "log_approx": lp.log_value, "prob_approx": lp.value})
        return
    if t is None:
        t = normalized_offset(dist, p, n, t_r)
    exp_mode = "paper" if mode == "br-paper" else "lattice"
    expansion = bahadur_rao_log(QuantileProblem(dist, p, n, t, side), exp_mode)
    _emit_json({
        "mode": mode,
        "log_approx": expansion.log_approx,
        "prob_approx": math.exp(expansion.log_approx),
        "lambda": expansion.rate,
        "tau": expansion.tau,
        "sigma_p": expansion.sigma_p,
    })


@main.command()
@_dist_option
@click.option("--p", type=float, required=True)
@click.option("--n", type=int, required=True)
@click.option("--t", type=float, required=True)
@_side_option
@click.option("--replicates", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def mc(dist_text: str, p: float, n: int, t: float, side: str, replicates: int, seed: int) -> None:
    """Monte Carlo tail frequency with an exact 95% confidence interval."""
    dist = parse_distribution(dist_text)
    cfg = montecarlo.SimConfig(seed=seed, replicates=replicates, n=n, dist=dist, p=p)
    tail = montecarlo.empirical_tail(cfg, t, side)
    _emit_json({
        "estimate": tail.estimate,
        "ci_low": tail.ci_low,
        "ci_high": tail.ci_high,
        "hits": tail.hits,
        "replicates": tail.replicates,
    })


@main.command()
@click.option("--kind", type=click.Choice(["convergence", "cramer", "berry-esseen", "mdp", "pn"]),
              required=True)
@_dist_option
@click.option("--p", type=float, default=None)
@click.option("--t", type=float, default=None)
@click.option("--r", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--p-base", type=float, default=1.0, show_default=True)
@_side_option
@click.option("--n-grid", required=True, metavar="START:END:geo|lin:COUNT")
@click.option("--t-count", type=int, default=21, show_default=True)
@click.option("--grid-density", type=int, default=4001, show_default=True)
@click.option("--boundary", type=click.Choice(["inclusive", "strict"]), default="inclusive")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def sweep(kind, dist_text, p, t, r, alpha, beta, p_base, side, n_grid, t_count,
          grid_density, boundary, fmt) -> None:
    """Convergence and envelope sweeps against the exact oracle."""
    dist = parse_distribution(dist_text)
    ns = diagnostics.parse_grid(n_grid, integer=True)

    def need(name, value):
        if value is None:
            raise click.UsageError(f"--{name} is required for --kind {kind}")
        return value

    if kind == "convergence":
        table = diagnostics.convergence_sweep(
            dist, need("p", p), need("t", t), side, ns, boundary)
    elif kind == "cramer":
        table = diagnostics.cramer_envelope_fit(dist, need("p", p), side, ns, t_count).table
    elif kind == "berry-esseen":
        table = diagnostics.berry_esseen_sweep(dist, need("p", p), ns, grid_density)
    elif kind == "mdp":
        table = diagnostics.mdp_sweep(dist, need("p", p), need("r", r), need("alpha", alpha),
                                      ns, side)
    else:
        table = diagnostics.pn_sweep(dist, need("beta", beta), ns, t_count, p_base, side).table
    click.echo(table.to_csv() if fmt == "csv" else table.to_json(), nl=(fmt != "csv"))


@main.command()
@click.option("--corrupt-rate", type=float, default=0.0, hidden=True,
              help="Test hook: shift the closed-form rate to force failures.")
@click.pass_context
def verify(ctx, corrupt_rate: float) -> None:
    """Run the rate-identity and Legendre-duality batteries; exit 0 iff all pass."""
    results = deviations.verification_battery(corrupt_rate=corrupt_rate)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        if not res.passed:
            failures += 1
        click.echo(f"{status} {res.name}: {res.detail}")
    click.echo(f"{len(results) - failures}/{len(results)} checks passed")
    ctx.exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    main()
