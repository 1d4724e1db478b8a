"""Verification suites for the SDE, branching-process and appendix modules.

Each runner returns a JSON-ready report whose ``pass`` field is the conjunction
of its checks.  The CLI writes these reports; the acceptance tests assert them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic, appendixlab, bgw, sde
from .graphproc import make_rng
from .harness import TolerancePolicy, replication_seed, verify_covariance
from .stats import MCStats


def _check(name: str, ok: bool, **details) -> dict:
    return {"check": name, "pass": bool(ok), **details}


@dataclass
class SDEConfig:
    t0: float = 1.5
    t1: float = 3.0
    det_steps: int = 100_000
    det_tol: float = 1e-4
    closed_form_grid: list[float] = field(default_factory=lambda: [1.5, 2.0, 2.5, 3.0])
    closed_form_samples: int = 100_000
    em_t1: float = 2.0
    em_steps: list[int] = field(default_factory=lambda: [100, 1000, 10_000])
    em_paths: int = 10_000
    em_rel_tol: float = 0.05
    master_seed: int = 7


def run_sde_suite(cfg: SDEConfig = SDEConfig()) -> dict:
    checks = []

    target = analytic.u(cfg.t0) / analytic.u(cfg.t1)
    det = sde.euler_maruyama(cfg.t0, cfg.t1, 1.0, cfg.det_steps, sde.DETERMINISTIC, save_every=cfg.det_steps)
    err = float(det.final) - target
    checks.append(_check("deterministic_final", abs(err) <= cfg.det_tol, value=float(det.final), expected=target, error=err))

    errs = []
    for steps in (1000, 2000):
        path = sde.euler_maruyama(cfg.t0, cfg.t1, 1.0, steps, sde.DETERMINISTIC, save_every=steps)
        errs.append(float(path.final) - target)
    ratio = errs[1] / errs[0]
    checks.append(_check("euler_first_order", 0.4 <= ratio <= 0.6, errors=errs, ratio=ratio))

    rng = make_rng(replication_seed(cfg.master_seed, 0))
    draws = sde.closed_form_sample(cfg.closed_form_grid, rng, size=cfg.closed_form_samples)
    stats = MCStats.for_grid(cfg.closed_form_grid)
    stats.add_many(draws.values.T)
    cov_report = verify_covariance(stats, TolerancePolicy(n_se=3.0, rel=0.0))
    checks.append(_check("closed_form_kernel", cov_report["pass"], report=cov_report))

    rng = make_rng(replication_seed(cfg.master_seed, 1))
    finals = sde.euler_maruyama_nested(cfg.t0, cfg.em_t1, cfg.em_steps, rng, cfg.em_paths)
    s2 = analytic.sigma2(cfg.em_t1)
    rel = {int(k): float(np.var(v, ddof=1) / s2 - 1.0) for k, v in sorted(finals.items())}
    finest = max(rel)
    checks.append(_check("euler_variance", abs(rel[finest]) <= cfg.em_rel_tol, relative_error=rel, sigma2=s2))
    # Monte Carlo noise (about sqrt(2 / paths)) swamps the discretisation bias, so
    # the trend is read off the exact variance of the scheme and off the shared-noise
    # levels' distance to the finest one
    exact = {int(k): sde.euler_variance(cfg.t0, cfg.em_t1, k) / s2 - 1.0 for k in sorted(finals)}
    exact_trend = [abs(exact[k]) for k in sorted(exact)]
    var_fine = float(np.var(finals[finest], ddof=1))
    gaps = [abs(float(np.var(finals[k], ddof=1)) - var_fine) for k in sorted(finals) if k != finest]
    monotone = all(b < a for a, b in zip(exact_trend, exact_trend[1:])) and all(b < a for a, b in zip(gaps, gaps[1:]))
    checks.append(_check("euler_variance_trend", monotone, exact_relative_bias=exact, gap_to_finest=gaps))

    return {"suite": "sde", "checks": checks, "pass": all(c["pass"] for c in checks)}


@dataclass
class BGWConfig:
    pmf_cases: list[list[float]] = field(default_factory=lambda: [[50, 0.01], [100, 0.005], [10, 0.09], [1, 0.5]])
    moment_tol: float = 1e-6
    sampler_m: int = 100
    sampler_p: float = 0.005
    sampler_draws: int = 1_000_000
    domination_n: list[int] = field(default_factory=lambda: [2, 3, 4, 5, 6])
    domination_p: list[float] = field(default_factory=lambda: [round(0.1 * i, 1) for i in range(1, 10)])
    master_seed: int = 11


def pmf_moment_errors(params: bgw.BGWParams) -> dict:
    table = bgw.pmf_table(params)
    k = np.arange(1, table.size + 1, dtype=float)
    mass = math.fsum(table)
    mean = math.fsum(k * table)
    var = math.fsum(k * k * table) - mean**2
    m_ref, v_ref = bgw.total_progeny_moments(params)
    return {
        "m": params.m,
        "p": params.p,
        "terms": int(table.size),
        "mass_defect": 1.0 - mass,
        "mean_error": mean - m_ref,
        "var_error": var - v_ref,
    }


def run_bgw_suite(cfg: BGWConfig = BGWConfig()) -> dict:
    checks = []
    for m, p in cfg.pmf_cases:
        e = pmf_moment_errors(bgw.BGWParams(int(m), float(p)))
        ok = all(abs(e[key]) <= cfg.moment_tol for key in ("mass_defect", "mean_error", "var_error"))
        checks.append(_check("pmf_moments", ok, **e))

    params = bgw.BGWParams(cfg.sampler_m, cfg.sampler_p)
    draws = bgw.sample_total_progeny_batch(params, cfg.sampler_draws, make_rng(replication_seed(cfg.master_seed, 0)))
    N = draws.size
    rows = []
    for k in (1, 2, 3):
        q = bgw.total_progeny_pmf(params, k)
        freq = float(np.count_nonzero(draws == k)) / N
        se = math.sqrt(q * (1 - q) / N)
        rows.append({"k": k, "empirical": freq, "pmf": q, "se": se, "z": (freq - q) / se})
    mean_ref = bgw.total_progeny_moments(params)[0]
    mean_se = math.sqrt(bgw.total_progeny_moments(params)[1] / N)
    checks.append(_check("sampler_pmf", all(abs(r["z"]) <= 3 for r in rows), rows=rows))
    checks.append(
        _check("sampler_mean", abs(draws.mean() - mean_ref) <= 3 * mean_se, empirical=float(draws.mean()), expected=mean_ref, se=mean_se)
    )

    failures = []
    for n in cfg.domination_n:
        for p in cfg.domination_p:
            rep = bgw.check_domination(n, p)
            if not rep.holds:
                failures.append({"n": n, "p": p})
    checks.append(_check("domination", not failures, cases=len(cfg.domination_n) * len(cfg.domination_p), failures=failures))
    return {"suite": "bgw", "checks": checks, "pass": all(c["pass"] for c in checks)}


@dataclass
class AppendixConfig:
    enum_s: list[float] = field(default_factory=lambda: [0.05, 0.2, 0.7, 1.5, 3.0])
    enum_tol: float = 1e-12
    stepanov_y: float = 3.0
    stepanov_n: int = 300
    stepanov_tol: float = 0.05
    stepanov_trend: list[int] = field(default_factory=lambda: [150, 600])
    ld_x: list[float] = field(default_factory=lambda: [round(0.05 * i, 2) for i in range(1, 20)])
    ld_y: list[float] = field(default_factory=lambda: [1.5, 2.0, 3.0])
    ec_n: int = 200
    ec_y: float = 2.0
    ec_k: list[int] = field(default_factory=lambda: [1, 2, 3])
    ec_reps: int = 10_000
    master_seed: int = 13


def run_appendix_suite(cfg: AppendixConfig = AppendixConfig()) -> tuple[dict, list]:
    """Appendix checks plus the rows ``(n, k, y, E_nk, ratio)`` of a small sweep."""
    checks = []

    worst = 0.0
    for n in range(1, 7):
        for s in cfg.enum_s:
            worst = max(worst, abs(appendixlab.connectivity_prob(n, s) - appendixlab.connectivity_prob_enumerate(n, s)))
    checks.append(_check("connectivity_enumeration", worst <= cfg.enum_tol, max_abs_error=worst))

    y = cfg.stepanov_y
    r_mid = appendixlab.stepanov_ratio(cfg.stepanov_n, y)
    lo_n, hi_n = cfg.stepanov_trend
    r_lo, r_hi = appendixlab.stepanov_ratio(lo_n, y), appendixlab.stepanov_ratio(hi_n, y)
    checks.append(_check("stepanov_ratio", abs(r_mid - 1) <= cfg.stepanov_tol, n=cfg.stepanov_n, y=y, ratio=r_mid))
    checks.append(_check("stepanov_trend", abs(r_hi - 1) < abs(r_lo - 1), ratios={str(lo_n): r_lo, str(hi_n): r_hi}))

    zero_err = max(abs(appendixlab.ld_functions(analytic.rho(yy), yy).phi) for yy in cfg.ld_y)
    delta_err = max(abs(appendixlab.ld_functions(analytic.rho(yy), yy).delta) for yy in cfg.ld_y)
    bound_gap = -math.inf
    identity_err = 0.0
    for yy in cfg.ld_y:
        for x in cfg.ld_x:
            f = appendixlab.ld_functions(x, yy)
            bound_gap = max(bound_gap, f.psi + 2 * f.delta**2)
            identity_err = max(identity_err, abs(f.phi - f.psi))
    checks.append(_check("phi_zero_at_rho", zero_err <= 1e-10 and delta_err <= 1e-12, max_abs_phi=zero_err, max_abs_delta=delta_err))
    checks.append(_check("psi_quadratic_bound", bound_gap <= 1e-12, max_psi_plus_2delta2=bound_gap))
    checks.append(_check("phi_psi_identity", identity_err <= 1e-12, max_abs_error=identity_err))

    counts = appendixlab.simulate_component_counts(cfg.ec_n, cfg.ec_y, cfg.ec_k, cfg.ec_reps, cfg.master_seed)
    rows = []
    for c, k in enumerate(cfg.ec_k):
        expected = appendixlab.expected_components(cfg.ec_n, k, cfg.ec_y)
        mean = float(counts[:, c].mean())
        se = float(counts[:, c].std(ddof=1) / math.sqrt(counts.shape[0]))
        rows.append({"k": k, "empirical": mean, "expected": expected, "se": se, "z": (mean - expected) / se})
    checks.append(_check("expected_components", all(abs(r["z"]) <= 3 for r in rows), n=cfg.ec_n, y=cfg.ec_y, rows=rows))

    sweep = []
    for n, ratio in ((lo_n, r_lo), (cfg.stepanov_n, r_mid), (hi_n, r_hi)):
        for k in (1, 2, 3):
            sweep.append((n, k, y, appendixlab.expected_components(n, k, y), ratio))
    return {"suite": "appendix", "checks": checks, "pass": all(c["pass"] for c in checks)}, sweep
