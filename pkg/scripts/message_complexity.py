"""Messages per indirect-trust query against |V| + |E| on random sparse snapshots.

    python scripts/message_complexity.py --sizes 50 100 200 400 --queries 20
"""
import argparse
import random
import sys

from segtrust import paillier
from segtrust.bench import to_csv
from segtrust.generators import random_social_graph
from segtrust.seg import TrustWeights
from segtrust.trust import UnreachableTargetError, initiate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--queries", type=int, default=20, help="queries per size")
    ap.add_argument("--mean-degree", type=float, default=4.0)
    ap.add_argument("--key-bits", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()

    keys = paillier.generate_keypair(args.key_bits, args.seed)
    rows = []
    for n in args.sizes:
        rng = random.Random(f"{args.seed}:{n}")
        snap = random_social_graph(n, rng, mean_degree=args.mean_degree)
        links = len(snap.comm_edges)
        ids = sorted(snap.nodes)
        done = 0
        while done < args.queries:
            s, d = rng.sample(ids, 2)
            if snap.edge(s, d) is not None:
                continue
            try:
                res = initiate(s, d, snap, TrustWeights(), keys, psi_l=12, rng=rng,
                               query_id=f"q{done}")
            except UnreachableTargetError:
                continue
            done += 1
            rows.append({"vertices": n, "links": links, "s": s, "d": d,
                         "routes": len(res.op_f), "messages": res.messages_sent,
                         "ratio": round(res.messages_sent / (n + links), 6)})
    text = to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    print(f"# max messages/(|V|+|E|) = {max(r['ratio'] for r in rows):.4f}", file=sys.stderr)


if __name__ == "__main__":
    main()
