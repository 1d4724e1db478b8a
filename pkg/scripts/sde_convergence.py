"""Euler–Maruyama against the exact marginal variance, by step count.

    python scripts/sde_convergence.py --t1 2.0 --paths 20000
"""
import argparse

import numpy as np

from giantfluct import analytic, sde
from giantfluct.graphproc import make_rng


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t0", type=float, default=1.5)
    ap.add_argument("--t1", type=float, default=2.0)
    ap.add_argument("--paths", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    levels = [10, 100, 1000, 10_000]
    s2 = analytic.sigma2(args.t1)
    finals = sde.euler_maruyama_nested(args.t0, args.t1, levels, make_rng(args.seed), args.paths)
    target = analytic.u(args.t0) / analytic.u(args.t1)
    print(f"sigma2({args.t1:g}) = {s2:.6f}")
    print(f"{'steps':>6} {'MC var/s2-1':>12} {'exact/s2-1':>12} {'det error':>11}")
    for k in levels:
        mc = np.var(finals[k], ddof=1) / s2 - 1
        exact = sde.euler_variance(args.t0, args.t1, k) / s2 - 1
        det = sde.euler_maruyama(args.t0, args.t1, 1.0, k, sde.DETERMINISTIC, save_every=k).final - target
        print(f"{k:6d} {mc:12.4e} {exact:12.4e} {det:11.3e}")


if __name__ == "__main__":
    main()
