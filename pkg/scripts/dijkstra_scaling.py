"""Operation counts of SEG-Dijkstra over nested random graphs.

    python scripts/dijkstra_scaling.py --sizes 100 1000 10000 --out scaling.csv
"""
import argparse
import sys

from segtrust.bench import dijkstra_bench, to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 300, 1000, 3000, 10000])
    ap.add_argument("--mean-degree", type=float, default=4.0)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--out")
    args = ap.parse_args()

    rows = []
    for seed in range(args.seeds):
        for row in dijkstra_bench(args.sizes, seed=seed, mean_degree=args.mean_degree):
            rows.append({"seed": seed, **row})
    text = to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    ratios = [r["ratio"] for r in rows]
    print(f"# ratio spread max/min = {max(ratios) / min(ratios):.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
