#!/usr/bin/env python3
"""Benchmark the numba simulation kernels against the pure-numpy fallback.

Runs the same counter-based workloads through both backends, checks they
agree, and prints a throughput table.  Usage:

    python benchmarks/bench_backends.py [--replicates 20000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qdev import DistributionSpec, SimConfig, simulate_quantiles
from qdev.backend import numba_available, set_backend

WORKLOADS = (
    ("uniform:0,1  n=50", DistributionSpec("uniform", (0.0, 1.0)), 50),
    ("uniform:0,1  n=1000", DistributionSpec("uniform", (0.0, 1.0)), 1000),
    ("normal:0,1   n=200", DistributionSpec("normal", (0.0, 1.0)), 200),
    ("cauchy:0,1   n=200", DistributionSpec("cauchy", (0.0, 1.0)), 200),
    ("logistic:0,1 n=1000", DistributionSpec("logistic", (0.0, 1.0)), 1000),
)


def _time_backend(name: str, cfg: SimConfig, repeats: int) -> tuple[float, np.ndarray]:
    set_backend(name)
    out = simulate_quantiles(cfg)  # warm-up (JIT compile on numba)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = simulate_quantiles(cfg)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replicates", type=int, default=20_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if not numba_available():
        raise SystemExit("numba is not importable; nothing to compare")

    print(f"{'workload':<22} {'draws':>10} {'numpy':>10} {'numba':>10} {'speedup':>8}  agree")
    for label, dist, n in WORKLOADS:
        reps = max(1, args.replicates * 50 // n)
        cfg = SimConfig(seed=2024, replicates=reps, n=n, dist=dist, p=0.5)
        t_np, out_np = _time_backend("numpy", cfg, args.repeats)
        t_nb, out_nb = _time_backend("numba", cfg, args.repeats)
        agree = np.allclose(out_np, out_nb, rtol=5e-16, atol=0.0)
        print(f"{label:<22} {reps * n:>10} {t_np:>9.4f}s {t_nb:>9.4f}s "
              f"{t_np / t_nb:>7.2f}x  {'yes' if agree else 'NO'}")
    set_backend(None)


if __name__ == "__main__":
    main()
