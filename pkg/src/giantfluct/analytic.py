"""Deterministic functions of the supercritical Erdős–Rényi giant component.

Everything here is a pure function of the mean degree ``t``:

* ``rho(t)``      survival probability, root of ``1 - x = exp(-t x)``
* ``lambda(t)``   dual parameter ``t (1 - rho)``, satisfies ``l e^{-l} = t e^{-t}``
* ``u(t)``        scale ``1/(1 - rho) - t``
* ``v(t)``        Brownian clock ``1/(1 - rho) - 1 = rho / (1 - rho)``
* ``sigma2(t)``   limiting variance ``v / u**2``

The fluctuation process ``X_n(t) = (L_n(t) - n rho(t)) / sqrt(n)`` converges to
``B(v(t)) / u(t)``, so its covariance kernel is ``v(s ^ t) / (u(s) u(t))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

RHO_TOL = 1e-13
_NEWTON_MAXITER = 100
_BELOW_ONE = math.nextafter(1.0, 0.0)


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"time must be finite and nonnegative, got {t!r}")
    return t


def _residual(x: float, t: float) -> float:
    return -x - math.expm1(-t * x)


def _rho_bisect(t: float) -> float:
    # for t > ~27 the root lies above 1 - 1e-12, so the upper end is the last double below 1
    lo, hi = 1e-12, _BELOW_ONE
    # residual is positive on (0, rho) and negative on (rho, 1)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        if _residual(mid, t) > 0:
            lo = mid
        else:
            hi = mid


def rho(t: float) -> float:
    """Survival probability of a Poisson(t) Galton–Watson tree.

    Returns 0 for ``t <= 1``.  For ``t > 1`` returns the unique root in (0, 1) of
    ``1 - x = exp(-t x)``; Newton from ``1 - 1/t`` with a bisection fallback.
    """
    t = _check_time(t)
    if t <= 1.0:
        return 0.0
    x = 1.0 - 1.0 / t
    for _ in range(_NEWTON_MAXITER):
        f = _residual(x, t)
        df = -1.0 + t * math.exp(-t * x)
        if df == 0.0:
            break
        step = f / df
        x_new = min(x - step, _BELOW_ONE)
        if x_new <= 0.0:
            break
        converged = abs(step) <= 4e-16 * x_new or x_new == x
        x = x_new
        if converged:
            if abs(_residual(x, t)) <= RHO_TOL:
                return x
            break
    return _rho_bisect(t)


@dataclass(frozen=True)
class ScalingBundle:
    """All deterministic scaling functions evaluated at one time ``t``."""

    t: float
    rho: float
    lambda_: float
    u: float
    v: float
    sigma2: float
    rho_prime: float


def scaling(t: float) -> ScalingBundle:
    t = _check_time(t)
    if t <= 1.0:
        raise DomainError(f"scaling functions are degenerate for t <= 1, got {t!r}")
    r = rho(t)
    lam = t * (1.0 - r)
    u = (1.0 - lam) / (1.0 - r)
    v = r / (1.0 - r)
    return ScalingBundle(
        t=t,
        rho=r,
        lambda_=lam,
        u=u,
        v=v,
        sigma2=r * (1.0 - r) / (1.0 - lam) ** 2,
        rho_prime=r * (1.0 - r) / (1.0 - lam),
    )


def lam(t: float) -> float:
    return scaling(t).lambda_


def u(t: float) -> float:
    return scaling(t).u


def v(t: float) -> float:
    return scaling(t).v


def sigma2(t: float) -> float:
    return scaling(t).sigma2


def v_inverse(s: float) -> float:
    """Time ``t > 1`` with ``v(t) = s``.

    ``v = rho / (1 - rho)`` gives ``rho = s / (1 + s)``, and the survival equation
    then gives ``t = -log(1 - rho) / rho = (1 + s) log(1 + s) / s``.
    """
    s = float(s)
    if not math.isfinite(s) or s <= 0:
        raise DomainError(f"v_inverse needs s > 0, got {s!r}")
    return (1.0 + s) * math.log1p(s) / s


def cov_kernel(s: float, t: float) -> float:
    """Covariance ``v(min(s, t)) / (u(s) u(t))`` of the limiting Gaussian process."""
    if s <= 1.0 or t <= 1.0:
        raise DomainError(f"kernel needs s, t > 1, got ({s!r}, {t!r})")
    bs, bt = scaling(s), scaling(t)
    return min(bs.v, bt.v) / (bs.u * bt.u)


def cov_matrix(grid) -> "list[list[float]]":
    bundles = [scaling(t) for t in grid]
    return [[min(a.v, b.v) / (a.u * b.u) for b in bundles] for a in bundles]


def sde_coefficients(t: float, x: float) -> tuple[float, float]:
    """Drift ``a(t, x)`` and diffusion ``b(t)`` of the limiting SDE.

    ``a(t, x) = [(1 - 2 rho)/(1 - lam) - rho (1 - rho) t / (1 - lam)**2] x`` and
    ``b(t) = rho (1 - rho) / (1 - lam)**3``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"state must be finite, got {x!r}")
    b = scaling(t)
    r, lm = b.rho, b.lambda_
    rate = (1.0 - 2.0 * r) / (1.0 - lm) - r * (1.0 - r) * b.t / (1.0 - lm) ** 2
    return rate * x, r * (1.0 - r) / (1.0 - lm) ** 3
