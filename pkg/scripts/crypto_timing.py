"""Paillier timings per key size, with the modelled decryption cost of a query.

    python scripts/crypto_timing.py --key-bits 512 1024 2048 --trials 50
"""
import argparse
import sys

from segtrust.bench import crypto_bench, to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--key-bits", type=int, nargs="+", default=[512, 1024, 2048])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--routes", type=int, default=4, help="routes decrypted per query")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()

    rows = crypto_bench(args.key_bits, trials=args.trials, seed=args.seed)
    text = to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    for r in rows:
        if r["op"] == "exponentiation":
            print(f"# {r['key_bits']}-bit: {args.routes} route aggregates cost about "
                  f"{args.routes * r['mean_ms']:.2f} ms to decrypt", file=sys.stderr)


if __name__ == "__main__":
    main()
