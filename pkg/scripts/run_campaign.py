"""Full-scale fluctuation campaign: n = 10^4, 1000 replications, four grid times.

    python scripts/run_campaign.py --out runs/main --workers 4
"""
import argparse
import json
import time
from pathlib import Path

from giantfluct import appendixlab, harness
from giantfluct.harness import CampaignConfig


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/campaign")
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--replications", type=int, default=1000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=20240501)
    args = ap.parse_args()

    cfg = CampaignConfig(
        n=args.n,
        replications=args.replications,
        workers=args.workers,
        master_seed=args.seed,
        grid=[1.5, 2.0, 2.5, 3.0],
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    stats = harness.run_campaign(cfg)
    print(f"{cfg.replications} replications in {time.perf_counter() - start:.1f}s")

    cov = harness.verify_covariance(stats)
    inc = harness.verify_brownian_increments(stats)
    ks = harness.ks_normality(stats.sample_matrix()[:, 1])
    tail = appendixlab.tail_check(stats.sample_matrix(), cfg.n, 0.2)

    print(f"{'t':>5} {'Var X':>9} {'sigma2':>9} {'z':>6}")
    for e in cov["variance"]:
        print(f"{e['pair'][0]:5g} {e['empirical']:9.4f} {e['theoretical']:9.4f} {e['z']:6.2f}")
    print(f"{'s':>5} {'t':>5} {'Var dZ':>9} {'v gap':>9} {'z':>6}")
    for e in inc["entries"]:
        s, t = e["pair"]
        print(f"{s:5g} {t:5g} {e['empirical']:9.4f} {e['theoretical']:9.4f} {e['z']:6.2f}")
    print(f"KS D = {ks['statistic']:.4f} (critical {ks['critical']:.4f})")
    print(f"tail exceedances: {tail['count']} of {tail['sample_size']}")

    stats.write_csv(out)
    (out / "config.json").write_text(cfg.to_json() + "\n")
    report = {"checks": [cov, inc, ks, {"check": "tail", **tail}]}
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")


if __name__ == "__main__":
    main()
