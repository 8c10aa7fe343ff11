#!/usr/bin/env python3
"""Trace the excursion-probability ratio across the regime transition.

For a ladder of product exponents `a` straddling a0 and beta/2, runs a
moderate Monte Carlo on a shared lattice and prints p_hat(u) against the
regime prediction.  Useful for eyeballing how the four regimes hand over at
finite u; nothing here asserts, it just reports.
"""

import argparse
import math

from supfield.asymptotics import predict
from supfield.fieldsim import build_lattice, excursion_maxima
from supfield.model import ModelParams, classify_regime


def run(u: float, n_samples: int, n_per_axis: int, seed: int) -> None:
    a_values = [0.4, 0.55, 2.0 / 3.0, 0.8, 0.9, 1.0, 1.25, 1.6, 2.0]
    print(f"u={u}  samples={n_samples}  lattice {n_per_axis}^2")
    print(f"{'a':>6} {'regime':>16} {'p_hat':>10} {'prediction':>12} {'ratio':>8}")
    for a in a_values:
        params = ModelParams(alpha=1.0, beta=2.0, a=a)
        lat = build_lattice(params, n_per_axis=n_per_axis)
        maxima = excursion_maxima(lat, n_samples, seed=seed)
        p_hat = float((maxima > u).mean())
        pred = predict(params).evaluate(u)
        ratio = p_hat / pred if pred > 0 else math.nan
        print(
            f"{a:6.3f} {str(classify_regime(params)):>16} "
            f"{p_hat:10.5f} {pred:12.5f} {ratio:8.3f}"
        )


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--u", type=float, default=2.5)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--n", type=int, default=48, help="lattice points per axis")
    ap.add_argument("--seed", type=int, default=2024)
    ns = ap.parse_args()
    run(ns.u, ns.samples, ns.n, ns.seed)
