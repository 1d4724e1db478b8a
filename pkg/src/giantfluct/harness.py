"""Monte Carlo campaigns over the graph process and their statistical verdicts."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from . import analytic
from .graphproc import fluctuation_path, sample_edge_stream, trajectory
from .stats import MCStats

MASK64 = 0xFFFFFFFFFFFFFFFF
MAX_EXPECTED_EVENTS = 5 * 10**7
KS_CRITICAL_1PCT = 1.63
MIN_VERIFY_COUNT = 100


class SizingError(RuntimeError):
    """Campaign would need more memory or time than a single desk run allows."""


class InsufficientSamples(ValueError):
    pass


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def replication_seed(master_seed: int, r: int) -> int:
    """64-bit seed of replication ``r``; independent of how replications are scheduled."""
    return splitmix64(splitmix64(master_seed & MASK64) ^ (r & MASK64))


def v_uniform_grid(t0: float, t1: float, points: int) -> list[float]:
    """``points`` times in ``[t0, t1]`` equally spaced on the v scale, endpoints exact."""
    if points == 1:
        return [float(t1)]
    v0, v1 = analytic.v(t0), analytic.v(t1)
    inner = [analytic.v_inverse(s) for s in np.linspace(v0, v1, points)[1:-1].tolist()]
    return [float(t0), *inner, float(t1)]


@dataclass
class CampaignConfig:
    n: int = 10_000
    t0: float = 1.5
    t1: float = 3.0
    grid_points: int = 8
    replications: int = 1000
    master_seed: int = 20240501
    workers: int = 1
    grid: list[float] | None = None
    keep_samples: bool = True
    ks_time: float = 2.0

    def __post_init__(self) -> None:
        if not 1.0 < self.t0 < self.t1 < self.n:
            raise ValueError(f"need 1 < t0 < t1 < n, got t0={self.t0}, t1={self.t1}, n={self.n}")
        if self.replications < 2:
            raise ValueError("at least two replications are needed for a variance")
        if self.grid_points < 1:
            raise ValueError("grid_points must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.grid is not None:
            g = [float(t) for t in self.grid]
            if any(b <= a for a, b in zip(g, g[1:])) or g[0] < self.t0 or g[-1] > self.t1:
                raise ValueError("explicit grid must be strictly increasing inside [t0, t1]")
            self.grid = g

    def time_grid(self) -> list[float]:
        if self.grid is not None:
            return list(self.grid)
        return v_uniform_grid(self.t0, self.t1, self.grid_points)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        return cls(**d)


def _replicate(args) -> tuple[np.ndarray, np.ndarray]:
    n, t1, grid, seed = args
    path = fluctuation_path(trajectory(sample_edge_stream(n, t1, seed), grid))
    return path.X, path.Z


def run_campaign(config: CampaignConfig) -> MCStats:
    """Run the replications and merge them in replication order.

    The statistics do not depend on ``workers``: every replication has its own
    seed and the coordinator accumulates results in index order.
    """
    expected = (config.n - 1) / 2 * config.t1
    if expected > MAX_EXPECTED_EVENTS:
        raise SizingError(
            f"n={config.n}, t1={config.t1} needs about {expected:.3g} edge events per replication "
            f"(limit {MAX_EXPECTED_EVENTS:.0e})"
        )
    grid = config.time_grid()
    stats = MCStats.for_grid(grid, keep_samples=config.keep_samples)
    jobs = [(config.n, config.t1, grid, replication_seed(config.master_seed, r)) for r in range(config.replications)]
    if config.workers == 1:
        results = map(_replicate, jobs)
        for X, Z in results:
            stats.add(X, Z)
    else:
        chunk = max(1, len(jobs) // (4 * config.workers))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for X, Z in pool.map(_replicate, jobs, chunksize=chunk):
                stats.add(X, Z)
    return stats


@dataclass(frozen=True)
class TolerancePolicy:
    """Pass when the error is within ``n_se`` standard errors or ``rel`` relative error."""

    n_se: float = 3.0
    rel: float = 0.10

    def allowed(self, theoretical: float, se: float) -> float:
        return max(self.n_se * se, self.rel * abs(theoretical))


def _entry(pair, empirical, theoretical, se, policy: TolerancePolicy) -> dict:
    err = empirical - theoretical
    return {
        "pair": [float(p) for p in pair],
        "empirical": float(empirical),
        "theoretical": float(theoretical),
        "se": float(se),
        "abs_error": float(abs(err)),
        "z": float(err / se) if se > 0 else (0.0 if err == 0 else math.copysign(math.inf, err)),
        "decision": "pass" if abs(err) <= policy.allowed(theoretical, se) else "fail",
    }


def _require(stats: MCStats) -> None:
    if stats.count < MIN_VERIFY_COUNT:
        raise InsufficientSamples(f"need at least {MIN_VERIFY_COUNT} replications, got {stats.count}")


def verify_covariance(stats: MCStats, policy: TolerancePolicy = TolerancePolicy()) -> dict:
    """Compare the empirical covariance of ``X_n`` with ``v(s ^ t) / (u(s) u(t))``."""
    _require(stats)
    grid = stats.grid.tolist()
    cov, se = stats.cov, stats.cov_se
    kernel = analytic.cov_matrix(grid)
    entries = []
    for a in range(len(grid)):
        for b in range(a, len(grid)):
            entries.append(_entry((grid[a], grid[b]), cov[a, b], kernel[a][b], se[a, b], policy))
    variances = [
        _entry((t, t), cov[a, a], analytic.sigma2(t), se[a, a], policy) for a, t in enumerate(grid)
    ]
    ok = all(e["decision"] == "pass" for e in entries + variances)
    return {"check": "covariance", "count": stats.count, "entries": entries, "variance": variances, "pass": ok}


def verify_brownian_increments(stats: MCStats, policy: TolerancePolicy = TolerancePolicy()) -> dict:
    """Compare Var(Z_n(v(t)) - Z_n(v(s))) with ``v(t) - v(s)`` for consecutive grid times."""
    _require(stats)
    grid = stats.grid.tolist()
    entries = []
    if len(grid) > 1:
        zvar, zse = stats.zvar, stats.zvar_se
        for k, (s, t) in enumerate(zip(grid, grid[1:])):
            gap = analytic.v(t) - analytic.v(s)
            entries.append(_entry((s, t), zvar[k], gap, zse[k], policy))
    return {
        "check": "brownian_increments",
        "count": stats.count,
        "entries": entries,
        "pass": all(e["decision"] == "pass" for e in entries),
    }


def ks_statistic(samples, cdf=ndtr) -> float:
    """Kolmogorov–Smirnov distance between the empirical law of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = cdf(x)
    k = np.arange(1, n + 1)
    return float(max(np.max(k / n - F), np.max(F - (k - 1) / n)))


def ks_normality(samples) -> dict:
    """Standardise by sample mean and sd, then test against the standard normal at the 1% level."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < MIN_VERIFY_COUNT:
        raise InsufficientSamples(f"need at least {MIN_VERIFY_COUNT} samples, got {x.size}")
    z = (x - x.mean()) / x.std(ddof=1)
    D = ks_statistic(z)
    critical = KS_CRITICAL_1PCT / math.sqrt(x.size)
    return {
        "check": "ks_normality",
        "statistic": D,
        "critical": critical,
        "sample_size": int(x.size),
        "decision": "reject" if D > critical else "accept",
        "pass": D <= critical,
    }


def report_json(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True)


def scaled(stats: MCStats, factor: float) -> MCStats:
    """Copy of ``stats`` as if every ``X_n`` (hence ``Z_n``) had been multiplied by ``factor``.

    Used for fault injection; needs retained samples.
    """
    if not stats.keep_samples:
        raise ValueError("fault injection needs retained samples")
    out = MCStats(stats.grid, stats.u_grid, keep_samples=True)
    for X in stats.samples:
        out.add(factor * X)
    return out
