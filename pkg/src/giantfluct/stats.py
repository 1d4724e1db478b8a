"""Streaming, mergeable moment accumulators for Monte Carlo campaigns.

Power sums up to fourth order are kept with Neumaier-compensated addition.  They
give the sample mean and covariance and, without storing the samples, the exact
delete-one jackknife standard error of every covariance entry.
"""
from __future__ import annotations

import csv
from typing import Sequence

import numpy as np


class _CompSum:
    """Array-valued Neumaier sum."""

    __slots__ = ("total", "comp")

    def __init__(self, shape) -> None:
        self.total = np.zeros(shape)
        self.comp = np.zeros(shape)

    def add(self, value) -> None:
        t = self.total + value
        big = np.abs(self.total) >= np.abs(value)
        self.comp += np.where(big, (self.total - t) + value, (value - t) + self.total)
        self.total = t

    def merge(self, other: "_CompSum") -> None:
        self.add(other.total)
        self.add(other.comp)

    @property
    def value(self) -> np.ndarray:
        return self.total + self.comp

    def state(self) -> dict:
        return {"total": self.total.tolist(), "comp": self.comp.tolist()}

    @classmethod
    def from_state(cls, state: dict) -> "_CompSum":
        obj = cls.__new__(cls)
        obj.total = np.array(state["total"], dtype=float)
        obj.comp = np.array(state["comp"], dtype=float)
        return obj


class MomentBlock:
    """Moments of a random vector of fixed dimension ``dim``.

    Samples are shifted by ``shift`` before accumulation; choose it near the mean
    when the mean is large compared with the spread.
    """

    def __init__(self, dim: int, shift: Sequence[float] | None = None) -> None:
        self.dim = dim
        self.shift = np.zeros(dim) if shift is None else np.asarray(shift, dtype=float).copy()
        self.count = 0
        self._s1 = _CompSum(dim)
        self._s11 = _CompSum((dim, dim))
        self._s21 = _CompSum((dim, dim))
        self._s22 = _CompSum((dim, dim))

    def add(self, x) -> None:
        d = np.asarray(x, dtype=float) - self.shift
        if d.shape != (self.dim,):
            raise ValueError(f"expected shape ({self.dim},), got {d.shape}")
        d2 = d * d
        self.count += 1
        self._s1.add(d)
        self._s11.add(np.outer(d, d))
        self._s21.add(np.outer(d2, d))
        self._s22.add(np.outer(d2, d2))

    def add_many(self, rows) -> None:
        """Accumulate the rows of a 2-d array as one compensated batch."""
        d = np.asarray(rows, dtype=float) - self.shift
        if d.ndim != 2 or d.shape[1] != self.dim:
            raise ValueError(f"expected shape (k, {self.dim}), got {d.shape}")
        d2 = d * d
        self.count += d.shape[0]
        self._s1.add(d.sum(axis=0))
        self._s11.add(d.T @ d)
        self._s21.add(d2.T @ d)
        self._s22.add(d2.T @ d2)

    def merge(self, other: "MomentBlock") -> None:
        if other.dim != self.dim or not np.array_equal(other.shift, self.shift):
            raise ValueError("can only merge blocks with equal dimension and shift")
        self.count += other.count
        for mine, theirs in zip(self._sums(), other._sums()):
            mine.merge(theirs)

    def _sums(self):
        return (self._s1, self._s11, self._s21, self._s22)

    @property
    def mean(self) -> np.ndarray:
        return self._s1.value / self.count + self.shift

    def _centered(self):
        n = self.count
        s1 = self._s1.value
        m = s1 / n
        s11 = self._s11.value
        comoment = s11 - n * np.outer(m, m)
        return n, m, s1, s11, comoment

    @property
    def cov(self) -> np.ndarray:
        n, *_, comoment = self._centered()
        c = comoment / (n - 1)
        return 0.5 * (c + c.T)

    @property
    def jackknife_se(self) -> np.ndarray:
        """Delete-one jackknife standard error of each entry of ``cov``.

        Deleting sample k changes the co-moment by ``-n/(n-1) a_k b_k`` (a, b the
        centred coordinates), so the jackknife variance is
        ``(n-1)/n * (n/((n-1)(n-2)))**2 * sum_k (a_k b_k - C/n)**2``.
        """
        n, m, s1, s11, comoment = self._centered()
        if n < 3:
            raise ValueError("jackknife needs at least 3 samples")
        s21 = self._s21.value
        s22 = self._s22.value
        d = np.diag(s11)
        mi = m[:, None]
        mj = m[None, :]
        sum_ab2 = (
            s22
            - 2 * mj * s21
            - 2 * mi * s21.T
            + mj**2 * d[:, None]
            + mi**2 * d[None, :]
            + 4 * mi * mj * s11
            - 2 * mi * mj**2 * s1[:, None]
            - 2 * mi**2 * mj * s1[None, :]
            + n * mi**2 * mj**2
        )
        spread = np.maximum(sum_ab2 - comoment**2 / n, 0.0)
        var = (n - 1) / n * (n / ((n - 1) * (n - 2))) ** 2 * spread
        se = np.sqrt(var)
        return 0.5 * (se + se.T)

    def state(self) -> dict:
        return {
            "dim": self.dim,
            "shift": self.shift.tolist(),
            "count": self.count,
            "sums": [s.state() for s in self._sums()],
        }

    @classmethod
    def from_state(cls, state: dict) -> "MomentBlock":
        obj = cls(state["dim"], state["shift"])
        obj.count = state["count"]
        obj._s1, obj._s11, obj._s21, obj._s22 = (_CompSum.from_state(s) for s in state["sums"])
        return obj


class MCStats:
    """Replication statistics of ``X_n`` on a fixed grid and of the increments of ``Z_n``.

    ``keep_samples`` additionally retains the raw ``X_n`` rows (in insertion
    order) for distributional checks that need them.
    """

    def __init__(self, grid: Sequence[float], u_grid: Sequence[float], keep_samples: bool = False) -> None:
        self.grid = np.asarray(grid, dtype=float)
        self.u_grid = np.asarray(u_grid, dtype=float)
        g = self.grid.size
        self.x = MomentBlock(g)
        self.zinc = MomentBlock(max(g - 1, 0))
        self.max_abs_x = np.zeros(g)
        self.keep_samples = keep_samples
        self.samples: list[np.ndarray] = []

    @classmethod
    def for_grid(cls, grid: Sequence[float], keep_samples: bool = False) -> "MCStats":
        from .analytic import scaling

        return cls(grid, [scaling(t).u for t in grid], keep_samples)

    @property
    def count(self) -> int:
        return self.x.count

    @property
    def mean(self) -> np.ndarray:
        return self.x.mean

    @property
    def cov(self) -> np.ndarray:
        return self.x.cov

    @property
    def cov_se(self) -> np.ndarray:
        return self.x.jackknife_se

    @property
    def zvar(self) -> np.ndarray:
        return np.diag(self.zinc.cov).copy()

    @property
    def zvar_se(self) -> np.ndarray:
        return np.diag(self.zinc.jackknife_se).copy()

    def add(self, X, Z=None) -> None:
        X = np.asarray(X, dtype=float)
        Z = self.u_grid * X if Z is None else np.asarray(Z, dtype=float)
        self.x.add(X)
        self.zinc.add(np.diff(Z))
        self.max_abs_x = np.maximum(self.max_abs_x, np.abs(X))
        if self.keep_samples:
            self.samples.append(X.copy())

    def add_many(self, X) -> None:
        """Accumulate a batch of ``X_n`` rows; ``Z_n`` is taken as ``u X_n``."""
        X = np.asarray(X, dtype=float)
        self.x.add_many(X)
        self.zinc.add_many(np.diff(self.u_grid * X, axis=1))
        self.max_abs_x = np.maximum(self.max_abs_x, np.abs(X).max(axis=0))
        if self.keep_samples:
            self.samples.extend(X.copy())

    def add_path(self, path) -> None:
        self.add(path.X, path.Z)

    def merge(self, other: "MCStats") -> None:
        if not np.array_equal(self.grid, other.grid):
            raise ValueError("grids differ")
        self.x.merge(other.x)
        self.zinc.merge(other.zinc)
        self.max_abs_x = np.maximum(self.max_abs_x, other.max_abs_x)
        if self.keep_samples:
            self.samples.extend(other.samples)

    def sample_matrix(self) -> np.ndarray:
        return np.array(self.samples).reshape(-1, self.grid.size)

    def state(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "u_grid": self.u_grid.tolist(),
            "x": self.x.state(),
            "zinc": self.zinc.state(),
            "max_abs_x": self.max_abs_x.tolist(),
            "samples": [s.tolist() for s in self.samples] if self.keep_samples else None,
        }

    @classmethod
    def from_state(cls, state: dict) -> "MCStats":
        obj = cls(state["grid"], state["u_grid"], keep_samples=state.get("samples") is not None)
        obj.x = MomentBlock.from_state(state["x"])
        obj.zinc = MomentBlock.from_state(state["zinc"])
        obj.max_abs_x = np.array(state["max_abs_x"], dtype=float)
        if obj.keep_samples:
            obj.samples = [np.array(s, dtype=float) for s in state["samples"]]
        return obj

    def write_csv(self, directory) -> None:
        """``mean.csv``, ``cov.csv`` and ``zvar.csv`` with 17 significant digits."""
        from pathlib import Path

        d = Path(directory)
        _write_matrix(d / "mean.csv", ["t", "mean"], zip(self.grid, self.mean))
        header = ["t"] + [f"{t:.17g}" for t in self.grid]
        _write_matrix(d / "cov.csv", header, ([t, *row] for t, row in zip(self.grid, self.cov)))
        if self.grid.size > 1:
            rows = zip(self.grid[:-1], self.grid[1:], self.zvar)
            _write_matrix(d / "zvar.csv", ["s", "t", "zvar"], rows)


def _write_matrix(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{float(x):.17g}" for x in row])
