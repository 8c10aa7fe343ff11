"""Monte Carlo estimation of the Pickands functional and constant.

The finite-horizon functional is

    H_alpha(S) = E exp( sup_{t in [0,S]} ( sqrt(2) B_alpha(t) - t^alpha ) ),

where B_alpha is fractional Brownian motion normalized so that
Var(B_alpha(t) - B_alpha(s)) = |t - s|^alpha (Hurst index alpha/2).  The
Pickands constant is the per-unit-length limit H_alpha = lim H_alpha(S)/S.

H_alpha(S) grows like H_alpha * S + O(1), so the estimator of the constant
is the slope (H(S2) - H(S1))/(S2 - S1) across the top two rungs of an
S-ladder, which cancels the O(1) boundary term that makes the naive ratio
H(S)/S converge slowly.  All rungs are read off the same simulated paths
(prefix maxima), so rung estimates share paths and the slope is a paired
difference with far smaller variance than independent rungs would give.

Sampling of the paths is exact:

 * "cholesky":     dense factorization of the fBm covariance (reference path)
 * "brownian":     alpha = 1 only; independent Gaussian increments
 * "davies-harte": circulant embedding of the increments, O(n log n); exact
                   whenever the embedding eigenvalues are nonnegative, which
                   holds for fractional Gaussian noise with alpha < 2

A caveat worth knowing: exp(sup ...) has a heavy right tail whose variance
grows like exp(S^alpha), so pushing the ladder to large S buys bias
reduction at an exponentially growing replicate cost; by S = 8 (alpha = 1)
a few-hundred-thousand-replicate run is dominated by its single largest
path and the slope swings by several tenths between seeds.  The default
ladder therefore tops out at S = 4, where the slope estimator resolves the
constant to a couple of percent at a few * 10^5 replicates for alpha
around 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .factorization import chol_with_jitter
from .streams import DEFAULT_BATCH, batch_generator, run_batches

__all__ = [
    "FbmGrid",
    "PickandsEstimate",
    "ExtrapolationProtocol",
    "fbm_sample",
    "pickands_finite",
    "pickands_constant",
]


class FbmGrid:
    """Uniform-grid fBm covariance with its dense Cholesky factor.

    The grid is 0 = t_0 < t_1 < ... < t_{n-1} = S.  The factor covers the
    n-1 strictly positive times; B(0) = 0 holds exactly in every sample.
    """

    def __init__(self, alpha: float, horizon: float, n_points: int):
        if not (0.0 < alpha <= 2.0):
            raise ValueError(f"alpha must be in (0, 2], got {alpha}")
        if not (horizon > 0):
            raise ValueError(f"horizon must be positive, got {horizon}")
        if n_points < 2:
            raise ValueError(f"need at least 2 grid points, got {n_points}")
        self.alpha = float(alpha)
        self.horizon = float(horizon)
        self.n_points = int(n_points)
        self.times = np.linspace(0.0, self.horizon, self.n_points)
        t = self.times[1:]
        gram = 0.5 * (
            t[:, None] ** self.alpha
            + t[None, :] ** self.alpha
            - np.abs(t[:, None] - t[None, :]) ** self.alpha
        )
        self.factor, self.jitter = chol_with_jitter(gram, 1e-14, 1e-10)

    def describe(self) -> str:
        h = self.times[1] - self.times[0]
        return f"uniform[0,{self.horizon:g}] h={h:g} ({self.n_points} pts)"


def fbm_sample(grid: FbmGrid, rng: np.random.Generator) -> np.ndarray:
    """One exact fBm path on the grid (up to factorization jitter); B(0) = 0."""
    out = np.zeros(grid.n_points)
    out[1:] = grid.factor @ rng.standard_normal(grid.n_points - 1)
    return out


# ---------------------------------------------------------------------------
# Batch path samplers (each returns an (n_paths, n_points) array)
# ---------------------------------------------------------------------------


def _sample_cholesky(grid: FbmGrid, rng: np.random.Generator, n_paths: int) -> np.ndarray:
    out = np.zeros((n_paths, grid.n_points))
    out[:, 1:] = (grid.factor @ rng.standard_normal((grid.n_points - 1, n_paths))).T
    return out


def _sample_brownian(
    alpha: float, horizon: float, n_points: int, rng: np.random.Generator, n_paths: int
) -> np.ndarray:
    # alpha = 1 is Brownian motion: increments are iid N(0, h).
    h = horizon / (n_points - 1)
    out = np.empty((n_paths, n_points))
    out[:, 0] = 0.0
    np.cumsum(rng.standard_normal((n_paths, n_points - 1)) * math.sqrt(h), axis=1, out=out[:, 1:])
    return out


def _dh_eigenvalues(alpha: float, n_incr: int) -> np.ndarray:
    """Circulant-embedding eigenvalues for unit-spacing fGn."""
    hurst2 = alpha  # 2H
    k = np.arange(n_incr, dtype=float)
    rho = 0.5 * ((k + 1.0) ** hurst2 + np.abs(k - 1.0) ** hurst2) - k ** hurst2
    c = np.concatenate([rho, [0.0], rho[1:][::-1]])
    lam = np.fft.fft(c).real
    if lam.min() < -1e-8 * max(1.0, lam.max()):
        raise ValueError(
            f"circulant embedding not nonnegative definite for alpha={alpha} "
            f"(min eigenvalue {lam.min():.3e}); use the cholesky sampler"
        )
    return np.clip(lam, 0.0, None)


def _sample_davies_harte(
    alpha: float,
    horizon: float,
    n_points: int,
    lam: np.ndarray,
    rng: np.random.Generator,
    n_paths: int,
) -> np.ndarray:
    n_incr = n_points - 1
    m = 2 * n_incr
    h = horizon / n_incr
    raw = rng.standard_normal((n_paths, m))
    Z = np.empty((n_paths, m), dtype=complex)
    Z[:, 0] = raw[:, 0]
    Z[:, n_incr] = raw[:, 1]
    Z[:, 1:n_incr] = (raw[:, 2::2] + 1j * raw[:, 3::2]) / math.sqrt(2.0)
    Z[:, n_incr + 1 :] = np.conj(Z[:, 1:n_incr][:, ::-1])
    fgn = np.fft.ifft(np.sqrt(lam) * Z, axis=1).real[:, :n_incr] * math.sqrt(m)
    fgn *= h ** (alpha / 2.0)
    out = np.empty((n_paths, n_points))
    out[:, 0] = 0.0
    np.cumsum(fgn, axis=1, out=out[:, 1:])
    return out


def _resolve_sampler(sampler: str, alpha: float, n_points: int) -> str:
    if sampler != "auto":
        return sampler
    if alpha == 1.0:
        return "brownian"
    if alpha >= 2.0 or n_points <= 1025:
        return "cholesky"
    return "davies-harte"


class _PathSampler:
    """Bundles the per-batch path generator for one (alpha, S, n_points)."""

    def __init__(self, alpha: float, horizon: float, n_points: int, sampler: str = "auto"):
        self.alpha = alpha
        self.horizon = horizon
        self.n_points = n_points
        self.method = _resolve_sampler(sampler, alpha, n_points)
        if self.method == "brownian" and alpha != 1.0:
            raise ValueError("brownian sampler is exact only for alpha = 1")
        self._grid = FbmGrid(alpha, horizon, n_points) if self.method == "cholesky" else None
        self._lam = (
            _dh_eigenvalues(alpha, n_points - 1) if self.method == "davies-harte" else None
        )

    def sample(self, rng: np.random.Generator, n_paths: int) -> np.ndarray:
        if self.method == "cholesky":
            return _sample_cholesky(self._grid, rng, n_paths)
        if self.method == "brownian":
            return _sample_brownian(self.alpha, self.horizon, self.n_points, rng, n_paths)
        return _sample_davies_harte(
            self.alpha, self.horizon, self.n_points, self._lam, rng, n_paths
        )

    def describe(self) -> str:
        h = self.horizon / (self.n_points - 1)
        return (
            f"uniform[0,{self.horizon:g}] h={h:g} ({self.n_points} pts), "
            f"sampler={self.method}"
        )


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PickandsEstimate:
    """A Monte Carlo estimate with its standard error and provenance."""

    value: float
    std_err: float
    n_replicates: int
    grid: str
    seed: int
    naive: float | None = None
    naive_std_err: float | None = None
    rung_values: tuple[float, ...] = ()
    rung_std_errs: tuple[float, ...] = ()
    rungs: tuple[float, ...] = ()
    slope_naive_consistent: bool = True


@dataclass(frozen=True)
class ExtrapolationProtocol:
    """How pickands_constant discretizes and extrapolates.

    s_ladder       : increasing horizons; the slope uses the top two rungs
    spacing_factor : grid spacing h satisfies h^(alpha/2) <= spacing_factor
    n_replicates   : Monte Carlo paths (all rungs share each path)
    sampler        : "auto" | "cholesky" | "brownian" | "davies-harte"
    max_points     : refuse grids larger than this (pick a custom protocol)
    """

    s_ladder: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    spacing_factor: float = 0.05
    n_replicates: int = 400_000
    sampler: str = "auto"
    batch_size: int = DEFAULT_BATCH
    max_points: int = 200_000

    def __post_init__(self) -> None:
        if len(self.s_ladder) < 2 or any(
            b <= a for a, b in zip(self.s_ladder, self.s_ladder[1:])
        ):
            raise ValueError("s_ladder must be strictly increasing with >= 2 rungs")
        if self.s_ladder[0] <= 0:
            raise ValueError("s_ladder entries must be positive")
        if not (0 < self.spacing_factor < 1):
            raise ValueError("spacing_factor must be in (0, 1)")
        if self.n_replicates < 2:
            raise ValueError("need at least 2 replicates")

    def grid_for(self, alpha: float) -> tuple[int, list[int]]:
        """(n_points, rung indices) with every rung exactly on the grid."""
        s_max = self.s_ladder[-1]
        h_target = self.spacing_factor ** (2.0 / alpha)
        n_incr = max(int(math.ceil(s_max / h_target)), len(self.s_ladder))
        mult = 1
        for mult in range(1, 4097):
            if all(
                abs(s * mult / s_max - round(s * mult / s_max)) < 1e-9 for s in self.s_ladder
            ):
                break
        n_incr = mult * int(math.ceil(n_incr / mult))
        if n_incr + 1 > self.max_points:
            raise ValueError(
                f"protocol needs {n_incr + 1} grid points for alpha={alpha} "
                f"(> max_points={self.max_points}); supply a coarser protocol"
            )
        idx = [int(round(s * n_incr / s_max)) for s in self.s_ladder]
        return n_incr + 1, idx


DEFAULT_PROTOCOL = ExtrapolationProtocol()


def pickands_finite(
    alpha: float,
    S: float,
    n_points: int,
    n_replicates: int,
    seed: int,
    sampler: str = "auto",
    batch_size: int = DEFAULT_BATCH,
    workers: int = 1,
) -> PickandsEstimate:
    """Monte Carlo estimate of H_alpha(S) on an n_points uniform grid.

    The discrete maximum understates the continuous supremum, so the
    estimate carries a negative bias that shrinks as the grid refines.
    """
    if not (S > 0):
        raise ValueError(f"S must be positive, got {S}")
    ps = _PathSampler(alpha, S, n_points, sampler)
    drift = np.linspace(0.0, S, n_points) ** alpha

    def work(b: int, take: int) -> tuple[float, float]:
        rng = batch_generator(seed, b)
        paths = ps.sample(rng, take)
        vals = np.exp((math.sqrt(2.0) * paths - drift).max(axis=1))
        return float(vals.sum()), float((vals * vals).sum())

    parts = run_batches(work, n_replicates, batch_size, workers)
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / n_replicates
    var = max(s2 / n_replicates - mean * mean, 0.0)
    return PickandsEstimate(
        value=mean,
        std_err=math.sqrt(var / n_replicates),
        n_replicates=n_replicates,
        grid=ps.describe(),
        seed=seed,
    )


def pickands_constant(
    alpha: float,
    protocol: ExtrapolationProtocol = DEFAULT_PROTOCOL,
    seed: int = 0,
    workers: int = 1,
) -> PickandsEstimate:
    """Slope estimator of the Pickands constant H_alpha.

    Simulates paths on the top-rung grid once per replicate, reads every
    rung's functional from prefix maxima of the same path, and returns the
    paired-difference slope across the top two rungs.  The naive ratio
    H(S_max)/S_max is reported alongside; a warning is raised when slope and
    naive disagree by more than 3 joint standard errors (the usual sign that
    S_max is still far from the limit).
    """
    n_points, rung_idx = protocol.grid_for(alpha)
    s_ladder = protocol.s_ladder
    ps = _PathSampler(alpha, s_ladder[-1], n_points, protocol.sampler)
    drift = np.linspace(0.0, s_ladder[-1], n_points) ** alpha
    n_rungs = len(s_ladder)
    d_s = s_ladder[-1] - s_ladder[-2]
    s_max = s_ladder[-1]

    def work(b: int, take: int) -> np.ndarray:
        rng = batch_generator(seed, b)
        paths = ps.sample(rng, take)
        running = np.maximum.accumulate(math.sqrt(2.0) * paths - drift, axis=1)
        vals = np.exp(running[:, rung_idx])
        slope_i = (vals[:, -1] - vals[:, -2]) / d_s
        naive_i = vals[:, -1] / s_max
        cons_i = slope_i - naive_i
        acc = np.empty(2 * n_rungs + 6)
        acc[:n_rungs] = vals.sum(axis=0)
        acc[n_rungs : 2 * n_rungs] = (vals * vals).sum(axis=0)
        acc[-6:] = (
            slope_i.sum(),
            (slope_i * slope_i).sum(),
            naive_i.sum(),
            (naive_i * naive_i).sum(),
            cons_i.sum(),
            (cons_i * cons_i).sum(),
        )
        return acc

    n = protocol.n_replicates
    parts = run_batches(work, n, protocol.batch_size, workers)
    acc = np.zeros(2 * n_rungs + 6)
    for p in parts:
        acc += p

    def mean_se(s1: float, s2: float) -> tuple[float, float]:
        m = float(s1) / n
        v = max(float(s2) / n - m * m, 0.0)
        return m, math.sqrt(v / n)

    rung_means, rung_ses = zip(
        *(mean_se(acc[i], acc[n_rungs + i]) for i in range(n_rungs))
    )
    slope, slope_se = mean_se(acc[-6], acc[-5])
    naive, naive_se = mean_se(acc[-4], acc[-3])
    cons, cons_se = mean_se(acc[-2], acc[-1])
    consistent = bool(abs(cons) <= 3.0 * cons_se) if cons_se > 0 else True
    if not consistent:
        warnings.warn(
            f"pickands_constant(alpha={alpha}): slope {slope:.4f} and naive "
            f"{naive:.4f} differ by more than 3 joint standard errors; "
            f"H({s_max})/{s_max} has not converged, prefer the slope",
            stacklevel=2,
        )
    return PickandsEstimate(
        value=slope,
        std_err=slope_se,
        n_replicates=n,
        grid=ps.describe(),
        seed=seed,
        naive=naive,
        naive_std_err=naive_se,
        rung_values=tuple(rung_means),
        rung_std_errs=tuple(rung_ses),
        rungs=tuple(s_ladder),
        slope_naive_consistent=consistent,
    )
