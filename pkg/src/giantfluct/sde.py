"""The limiting diffusion, integrated by Euler–Maruyama or sampled in closed form.

The limit of the fluctuation process solves

    dX = a(t, X) dt + sqrt(b(t)) dC,

with linear drift, and is equal in law to ``B(v(t)) / u(t)``.  Both routes must
reproduce the same covariance kernel.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import DomainError, scaling, sde_coefficients
from .graphproc import GridError

STOCHASTIC = "stochastic"
DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class SDEPath:
    """Process values on a time grid.

    ``values`` has shape ``(len(grid),)`` for one path or ``(len(grid), n_paths)``.
    """

    grid: np.ndarray
    values: np.ndarray
    mode: str

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def to_csv(self, path) -> None:
        vals = self.values if self.values.ndim == 1 else self.values[:, 0]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for t, x in zip(self.grid, vals):
                w.writerow([f"{t:.17g}", f"{x:.17g}"])


def _coefficient_tables(t0: float, h: float, steps: int) -> tuple[np.ndarray, np.ndarray]:
    rates = np.empty(steps)
    diffs = np.empty(steps)
    for k in range(steps):
        rates[k], diffs[k] = sde_coefficients(t0 + k * h, 1.0)
    return rates, diffs


def _initial_state(t0: float, x0, n_paths: int, mode: str, rng: np.random.Generator) -> np.ndarray:
    if x0 is None:
        if mode == DETERMINISTIC:
            raise ValueError("deterministic runs need an explicit x0")
        return math.sqrt(scaling(t0).sigma2) * rng.standard_normal(n_paths)
    return np.broadcast_to(np.asarray(x0, dtype=float), (n_paths,)).copy()


def euler_maruyama(
    t0: float,
    t1: float,
    x0=None,
    steps: int = 1000,
    mode: str = STOCHASTIC,
    rng: np.random.Generator | None = None,
    n_paths: int = 1,
    save_every: int = 1,
) -> SDEPath:
    """Explicit Euler–Maruyama on a uniform grid of ``steps`` intervals.

    ``x <- x + a(t, x) h + sqrt(b(t) h) xi``, with ``xi = 0`` in deterministic mode.
    ``x0=None`` draws the start from Normal(0, sigma2(t0)), the limit law at ``t0``.
    Only every ``save_every``-th grid point (and the last) is kept.
    """
    if t0 <= 1.0:
        raise DomainError(f"t0 must exceed 1, got {t0}")
    if not t1 > t0:
        raise DomainError(f"need t1 > t0, got t0={t0}, t1={t1}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if mode not in (STOCHASTIC, DETERMINISTIC):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == STOCHASTIC and rng is None:
        raise ValueError("stochastic mode needs a random generator")
    h = (t1 - t0) / steps
    rates, diffs = _coefficient_tables(t0, h, steps)
    scale = np.sqrt(diffs * h)
    x = _initial_state(t0, x0, n_paths, mode, rng)
    kept_t = [t0]
    kept_x = [x.copy()]
    for k in range(steps):
        if mode == STOCHASTIC:
            x = x + rates[k] * x * h + scale[k] * rng.standard_normal(n_paths)
        else:
            x = x + rates[k] * x * h
        if (k + 1) % save_every == 0 or k + 1 == steps:
            kept_t.append(t0 + (k + 1) * h if k + 1 < steps else t1)
            kept_x.append(x.copy())
    values = np.array(kept_x)
    if n_paths == 1:
        values = values[:, 0]
    return SDEPath(np.array(kept_t), values, mode)


def euler_variance(t0: float, t1: float, steps: int, v0: float | None = None) -> float:
    """Exact variance of the Euler–Maruyama iterate at ``t1``.

    For linear drift the scheme is ``x <- (1 + a_k h) x + sqrt(b_k h) xi``, so the
    variance follows ``V <- (1 + a_k h)**2 V + b_k h``.  Starts from
    ``sigma2(t0)`` unless ``v0`` is given.
    """
    h = (t1 - t0) / steps
    rates, diffs = _coefficient_tables(t0, h, steps)
    V = scaling(t0).sigma2 if v0 is None else float(v0)
    for a, b in zip(rates.tolist(), diffs.tolist()):
        V = (1.0 + a * h) ** 2 * V + b * h
    return V


def euler_maruyama_nested(
    t0: float,
    t1: float,
    steps_list: Sequence[int],
    rng: np.random.Generator,
    n_paths: int,
) -> dict[int, np.ndarray]:
    """Final values of Euler–Maruyama at several step counts driven by one Brownian path.

    Every step count must divide the largest one; coarse increments are sums of
    fine ones, so Monte Carlo noise is shared across levels and differences
    between levels reflect discretisation alone.  Starts are drawn from the limit
    law at ``t0`` and shared as well.
    """
    fine = max(steps_list)
    if any(fine % s for s in steps_list):
        raise ValueError("every step count must divide the largest")
    hf = (t1 - t0) / fine
    x0 = _initial_state(t0, None, n_paths, STOCHASTIC, rng)
    levels = {}
    for s in steps_list:
        h = (t1 - t0) / s
        rates, diffs = _coefficient_tables(t0, h, s)
        levels[s] = dict(x=x0.copy(), dw=np.zeros(n_paths), ratio=fine // s, h=h, rates=rates, sd=np.sqrt(diffs), k=0)
    for k in range(fine):
        dw = math.sqrt(hf) * rng.standard_normal(n_paths)
        for lvl in levels.values():
            lvl["dw"] += dw
            if (k + 1) % lvl["ratio"] == 0:
                j = lvl["k"]
                lvl["x"] = lvl["x"] + lvl["rates"][j] * lvl["x"] * lvl["h"] + lvl["sd"][j] * lvl["dw"]
                lvl["dw"][:] = 0.0
                lvl["k"] = j + 1
    return {s: lvl["x"] for s, lvl in levels.items()}


def closed_form_sample(grid: Sequence[float], rng: np.random.Generator, size: int | None = None) -> SDEPath:
    """Exact draws of ``B(v(t)) / u(t)`` at the grid times.

    ``B`` is built from independent Gaussian increments over the v-gaps.  With
    ``size`` given, ``values`` has shape ``(len(grid), size)``.
    """
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise GridError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(g) <= 0):
        raise GridError("grid must be strictly increasing")
    if g[0] <= 1.0:
        raise DomainError("grid times must exceed 1")
    bundles = [scaling(t) for t in g.tolist()]
    vt = np.array([b.v for b in bundles])
    ut = np.array([b.u for b in bundles])
    gaps = np.diff(vt, prepend=0.0)
    n = 1 if size is None else size
    incr = np.sqrt(gaps)[:, None] * rng.standard_normal((g.size, n))
    values = np.cumsum(incr, axis=0) / ut[:, None]
    if size is None:
        values = values[:, 0]
    return SDEPath(g, values, STOCHASTIC)
