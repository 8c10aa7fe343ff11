"""Acceptance gate: one test per criterion, at the stated tolerances.

The asymptotic statements behind this library hold as u -> infinity and are
not exactly reproducible at desk scale, so the gate mixes exact-constant
reproduction (fast, tight tolerances) with oracle- and trend-based checks
(the honest finite-u substitutes).  Every Monte Carlo criterion runs at a
frozen seed, which makes each verdict deterministic.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  The heavy field criteria (9-11) dominate the runtime; the whole
gate fits in the per-criterion budgets on a single core.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

import supfield.quad as quad
from supfield.asymptotics import predict
from supfield.fieldsim import (
    BlockSpec,
    build_lattice,
    mc_block_exceedance,
    ratio_harness,
    side_emphasis_axis,
)
from supfield.model import ModelParams, Point2
from supfield.pickands import ExtrapolationProtocol, _PathSampler, pickands_constant
from supfield.quad import IntegralSpec, QuadratureConfig
from supfield.streams import batch_generator

from oracles import i_log_ratio_second_order, spectral_excursion_probability

CFG = QuadratureConfig()
SQRT_PI = math.sqrt(math.pi)


def _pass(num: int, msg: str) -> None:
    print(f"\nACCEPTANCE {num:2d}: PASS - {msg}")


def test_criterion_01_exact_constants():
    g2 = quad.g_beta(2.0, CFG)
    k2 = quad.k_beta(2.0, CFG)
    l0 = quad.trend_l(0.0, CFG)
    k00 = quad.trend_k(0.0, 0.0, CFG)
    assert abs(g2 - SQRT_PI / 2.0) <= 1e-9
    assert abs(k2 - math.pi / (3.0 * math.sqrt(3.0))) <= 1e-8
    assert abs(k00 - k2) <= 1e-10
    assert abs(l0 - SQRT_PI / 2.0) <= 1e-9
    _pass(1, f"G_2={g2:.12f}, K_2={k2:.12f}, L(0)={l0:.12f}, K(0,0)-K_2={k00 - k2:.1e}")


def test_criterion_02_prediction_table():
    expected = {
        0.5: (SQRT_PI, 1.0, 0),
        2.0 / 3.0: (0.75 * SQRT_PI, 1.0, 1),
        1.0: (math.pi / (3.0 * math.sqrt(3.0)), 2.0, 0),
        2.0: (math.pi / 4.0, 2.0, 0),
    }
    for a, (pref, power, logp) in expected.items():
        pred = predict(ModelParams(1.0, 2.0, a), h_alpha=1.0, cfg=CFG)
        assert abs(pred.prefactor - pref) <= 1e-10, a
        assert abs(pred.u_power - power) <= 1e-10, a
        assert pred.log_power == logp, a
    _pass(2, "prefactors {sqrt(pi), 3sqrt(pi)/4, pi/(3sqrt3), pi/4}, powers {1,1,2,2}, logs {0,1,0,0}")


def test_criterion_03_order_continuity_identity():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        alpha = rng.uniform(0.2, 2.0)
        beta = alpha + rng.uniform(0.05, 3.0)
        a0 = alpha * beta / (alpha + beta)
        lhs = 4.0 / alpha - 2.0 / a0
        rhs = 2.0 / alpha - 2.0 / beta
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    assert worst <= 1e-12
    _pass(3, f"4/alpha - 2/a0 == 2/alpha - 2/beta, worst relative gap {worst:.2e}")


def test_criterion_04_fast_branches():
    checks = []
    for a in (2.0, 1.0):
        for u, tol in ((30.0, 1e-2), (100.0, 1e-3)):
            spec = IntegralSpec(gamma=1.0, beta=2.0, a=a, delta=1.0, u=u)
            scaled = quad.i_gamma(spec, CFG) * u ** 2
            pref = quad.i_gamma_asymptote(spec, CFG).prefactor
            rel = abs(scaled - pref) / pref
            assert rel <= tol, (a, u, rel)
            checks.append(f"a={a:g},u={u:g}: {rel:.1e}")
    _pass(4, "u^2 * I matches the branch prefactor: " + "; ".join(checks))


def test_criterion_05_log_branch_ladder():
    gamma, beta, a = 1.0, 2.0, 0.8
    ratios = []
    for u in (1e3, 1e4, 1e5):
        spec = IntegralSpec(gamma=gamma, beta=beta, a=a, delta=1.0, u=u)
        ratio = quad.i_gamma(spec, CFG) / quad.i_gamma_asymptote(spec, CFG).evaluate(u)
        assert ratio > 0
        band = 8.0 / math.log(u)
        assert abs(ratio - 1.0) <= band
        # the frozen band constant was sized against this expansion
        oracle = i_log_ratio_second_order(u, gamma, beta, a)
        assert abs(ratio - oracle) <= 0.02
        ratios.append(ratio)
    gaps = [abs(r - 1.0) for r in ratios]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] <= 8.0 / math.log(1e5)
    _pass(5, f"ratios {ratios[0]:.4f} -> {ratios[1]:.4f} -> {ratios[2]:.4f} tighten monotonically")


def test_criterion_06_j_lambda_asymptotic():
    p, q, gamma = 1.0 / 3.0, 0.5, 1.0
    r4 = quad.j_lambda_ratio(1e4, p, q, gamma, CFG)
    r8 = quad.j_lambda_ratio(1e8, p, q, gamma, CFG)
    assert 0.80 <= r8 <= 1.05
    assert abs(r8 - 1.0) < abs(r4 - 1.0)
    _pass(6, f"J-ratio {r4:.4f} at 1e4 -> {r8:.4f} at 1e8, inside [0.80, 1.05]")


def test_criterion_07_inner_log_law():
    gaps = []
    for Z in (1e-2, 1e-4, 1e-6):
        gap = abs(quad.inner_a(Z, cfg=CFG) + math.log(Z))
        assert gap <= 5.0
        gaps.append(gap)
    _pass(7, "A(Z) + log Z stays bounded: gaps " + ", ".join(f"{g:.3f}" for g in gaps))


def test_criterion_08_pickands_constant_h1():
    est = pickands_constant(1.0, ExtrapolationProtocol(), seed=1801)
    assert 0.85 <= est.value <= 1.15, est

    # fBm covariance property checks at 4 SE
    reps = 50_000
    paths = _PathSampler(1.4, 2.0, 129, "davies-harte").sample(batch_generator(1802, 0), reps)
    v = paths[:, -1].var()
    assert abs(v - 2.0 ** 1.4) <= 4.0 * v * math.sqrt(2.0 / reps), "terminal variance"
    t = np.linspace(0.0, 2.0, 129)
    lag = 16
    target = (t[lag] - t[0]) ** 1.4
    for start in (0, 48, 100):
        dv = (paths[:, start + lag] - paths[:, start]).var()
        assert abs(dv - target) <= 4.0 * target * math.sqrt(2.0 / reps), "increment stationarity"
    half = _PathSampler(1.4, 1.0, 65, "cholesky").sample(batch_generator(1803, 0), reps)
    scaled_var = (paths[:, ::2][:, :65] / 2.0 ** 0.7)[:, 32].var()
    base_var = half[:, 32].var()
    joint = (scaled_var + base_var) * math.sqrt(2.0 / reps)
    assert abs(scaled_var - base_var) <= 4.0 * joint, "self-similarity"
    _pass(8, f"H_1 slope estimate {est.value:.4f} +- {est.std_err:.4f} in [0.85, 1.15]; "
             "fBm variance/stationarity/self-similarity at 4 SE")


def test_criterion_09_field_sanity_and_spectral_oracle():
    params = ModelParams(1.0, 2.0, 2.0)
    lat = build_lattice(params, n_per_axis=64)
    reps = 50_000
    origin = []
    done, b = 0, 0
    while done < reps:
        take = min(4096, reps - done)
        f = lat.sample_batch(batch_generator(901, b), take)
        origin.append(f[0, :, 0].copy())
        done, b = done + take, b + 1
    origin_var = float(np.concatenate(origin).var())
    assert abs(origin_var - 1.0) <= 4.0 * math.sqrt(2.0 / reps)

    from supfield.fieldsim import mc_excursion

    u, n = 2.5, 100_000
    main_est = mc_excursion(lat, u, (0.0, 0.0), n, seed=901)
    oracle_p, oracle_se = spectral_excursion_probability(params, 64, u, n, seed=902)
    joint = math.hypot(main_est.std_err, oracle_se)
    assert abs(main_est.p_hat - oracle_p) <= 3.0 * joint
    _pass(9, f"origin var {origin_var:.4f}; p_hat {main_est.p_hat:.5f} vs spectral oracle "
             f"{oracle_p:.5f} (|diff| <= 3 SE = {3 * joint:.5f})")


def test_criterion_10_regime_ratio_trends():
    u_ladder = [2.0, 2.5, 3.0]

    classical = ModelParams(1.0, 2.0, 2.0)
    lat = build_lattice(classical, n_per_axis=64)
    rows_c = ratio_harness(classical, u_ladder, lat, n_samples=1_000_000, seed=1001)
    assert all(r.ratio > 0 for r in rows_c)
    logs_c = [abs(math.log(r.ratio)) for r in rows_c]
    assert logs_c[2] <= logs_c[0]

    side = ModelParams(1.0, 2.0, 0.4)
    axis = side_emphasis_axis(side)
    strip = build_lattice(side, xs=axis, ys=axis.copy())
    rows_s = ratio_harness(side, u_ladder, strip, n_samples=400_000, seed=1002)
    assert all(r.ratio > 0 for r in rows_s)
    logs_s = [abs(math.log(r.ratio)) for r in rows_s]
    assert logs_s[2] <= logs_s[0]
    _pass(10, f"classical |log ratio| {logs_c[0]:.3f} -> {logs_c[2]:.3f}; "
              f"side-dominated {logs_s[0]:.3f} -> {logs_s[2]:.3f}")


def test_criterion_11_block_prediction():
    params = ModelParams(1.0, 2.0, 1.0)
    ratios = []
    for u, n in ((3.0, 1_000_000), (4.0, 3_000_000)):
        spec = BlockSpec(Point2(0.0, 0.0), 2.0, 2.0, u)
        res = mc_block_exceedance(params, spec, n, seed=1101, n_grid=32)
        ratio = res.estimate.p_hat / res.prediction
        assert 0.5 <= ratio <= 2.0, (u, ratio)
        ratios.append(ratio)
    assert abs(ratios[1] - 1.0) <= abs(ratios[0] - 1.0)
    _pass(11, f"corner-block MC/prediction {ratios[0]:.3f} at u=3 -> {ratios[1]:.3f} at u=4")


def test_criterion_12_deterministic_csv_bodies(tmp_path):
    """Pickands / mc / blocks reruns with different worker counts produce
    byte-identical CSV bodies (checked at reduced scale through the CLI;
    the full-scale runs above go through the same batch machinery)."""
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(
        "seed: 4242\n"
        "model: {alpha: 1.0, beta: 2.0, a: 2.0}\n"
        "u_ladder: [2.0, 2.5]\n"
        "n_samples: 6000\n"
        "grid: {n_per_axis: 16}\n"
        "pickands: {s_ladder: [1.0, 2.0], n_replicates: 6000}\n"
        "blocks: {u_values: [3.0], n_samples: [6000], n_grid: 12, h_replicates: 4000}\n"
    )
    produced = {}
    for kind, csv_name in (("pickands", "pickands.csv"), ("mc", "mc.csv"), ("blocks", "blocks.csv")):
        bodies = []
        for workers in (1, 3):
            out = tmp_path / f"{kind}_w{workers}"
            code = subprocess.run(
                [sys.executable, "-m", "supfield.cli", kind, "--config", str(cfg),
                 "--out", str(out), "--workers", str(workers)],
                capture_output=True,
                text=True,
            ).returncode
            assert code == 0
            bodies.append((out / csv_name).read_bytes())
        assert bodies[0] == bodies[1], f"{kind} CSV differs across worker counts"
        produced[kind] = len(bodies[0])
    _pass(12, "byte-identical CSV bodies across worker counts for " + ", ".join(produced))
