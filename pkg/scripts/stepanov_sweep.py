"""Connectivity probability against its large-n asymptotic, over n and y.

    python scripts/stepanov_sweep.py --out runs/stepanov.csv
"""
import argparse

from giantfluct import appendixlab


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="stepanov.csv")
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 150, 300, 600])
    ap.add_argument("--y", type=float, nargs="+", default=[1.5, 3.0, 5.0])
    args = ap.parse_args()

    rows = []
    print(f"{'n':>5} {'y':>5} {'P_n':>12} {'ratio':>9}")
    for y in args.y:
        for n in args.n:
            ratio = appendixlab.stepanov_ratio(n, y)
            p = appendixlab.connectivity_prob(n, y / n)
            print(f"{n:5d} {y:5g} {p:12.6g} {ratio:9.5f}")
            for k in (1, 2, 3):
                rows.append((n, k, y, appendixlab.expected_components(n, k, y), ratio))
    appendixlab.write_sweep_csv(args.out, rows)


if __name__ == "__main__":
    main()
