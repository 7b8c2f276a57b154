"""Command line entry point: ``segtrust run | trust-query | bench | export``.

Exit codes: 0 ok, 2 invalid configuration or arguments, 3 protocol failure,
4 no trusted route.  Results go to stdout, diagnostics to stderr; the log
level comes from ``SEGTRUST_LOG``.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import sys
from pathlib import Path

from . import bench as benchmarks
from . import config as config_mod
from .config import ConfigError
from .routing import DegenerateQueryError
from .seg import duration_to_json
from .sim import Simulation, VehicleAbsentError
from .simnet import SimulationAborted
from .trust import ProtocolError, UnreachableTargetError

EXIT_OK, EXIT_CONFIG, EXIT_PROTOCOL, EXIT_UNREACHABLE = 0, 2, 3, 4

log = logging.getLogger("segtrust")


def _load(args) -> config_mod.ScenarioConfig:
    path = args.config
    if not Path(path).exists() and config_mod.bundled(path).exists():
        path = config_mod.bundled(path)
    cfg = config_mod.load(path)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["sim"] = dataclasses.replace(cfg.sim, seed=args.seed)
    if getattr(args, "key_bits", None) is not None:
        if args.key_bits < 16:
            raise ConfigError("--key-bits", "must be at least 16")
        overrides["crypto"] = dataclasses.replace(cfg.crypto, key_bits=args.key_bits)
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def cmd_run(args) -> int:
    cfg = _load(args)
    sim = Simulation(cfg)
    sim.run()
    out = Path(args.out or f"out/{cfg.name}")
    sim.write_outputs(out)
    if args.format == "json":
        print(json.dumps([o.to_dict() for o in sim.outcomes], indent=2))
    else:
        sys.stdout.write(sim.metrics_csv())
    log.info("wrote %s", out)
    return EXIT_OK


def cmd_trust_query(args) -> int:
    cfg = _load(args)
    sim = Simulation(cfg)
    snap = sim.snapshot_at(args.at)
    try:
        result = sim.query(args.s, args.d, snap, "cli")
    except VehicleAbsentError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except UnreachableTargetError:
        print("no trusted route", file=sys.stderr)
        return EXIT_UNREACHABLE
    routes = [list(r) for r in result.routes_used.routes] if result.routes_used else []
    payload = {"s": args.s, "d": args.d, "t": snap.time, "tst_sd": result.tst_sd,
               "direct": result.direct, "routes": routes, "messages": result.messages_sent,
               "op_f": list(result.op_f), "c_d": result.c_d, "shp": result.shp}
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"TST_sd = {result.tst_sd:.4f}{' (direct)' if result.direct else ''}")
        for r in routes:
            print("route: " + " -> ".join(r))
        print(f"messages = {result.messages_sent}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.kind == "crypto":
        rows = benchmarks.crypto_bench(args.key_bits or [512, 1024, 2048], trials=args.trials,
                                       seed=args.seed or 0)
    else:
        rows = benchmarks.dijkstra_bench(args.sizes or [100, 1000, 10000], seed=args.seed or 0,
                                         mean_degree=args.mean_degree)
    text = benchmarks.to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_export(args) -> int:
    snaps = json.loads(Path(args.input).read_text())
    if isinstance(snaps, dict):
        snaps = [snaps]
    if args.format == "json":
        text = json.dumps(snaps, indent=1) + "\n"
    elif args.what == "nodes":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "id", "x", "y", "v", "profile"])
        for s in snaps:
            for n in s["nodes"]:
                w.writerow([s["time"], n["id"], n.get("x", ""), n.get("y", ""), n.get("v", ""),
                            "".join(map(str, n["profile"]))])
        text = buf.getvalue()
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "source", "target", "et", "shp", "tst", "established"])
        for s in snaps:
            for e in s["social_edges"]:
                w.writerow([e["t"], e["source"], e["target"], duration_to_json(e["et"]),
                            f"{e['shp']:.6f}", f"{e['tst']:.6f}", int(e["established"])])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="segtrust", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and write outputs")
    run.add_argument("--config", required=True, help="scenario file, or fig2 / fig3")
    run.add_argument("--out", help="output directory (default out/<name>)")
    run.add_argument("--seed", type=int)
    run.add_argument("--key-bits", type=int)
    run.add_argument("--format", choices=("json", "csv"), default="csv")
    run.set_defaults(func=cmd_run)

    q = sub.add_parser("trust-query", help="indirect trust of s in d at a given time")
    q.add_argument("s")
    q.add_argument("d")
    q.add_argument("--config", required=True)
    q.add_argument("--at", type=float, default=0.0)
    q.add_argument("--seed", type=int)
    q.add_argument("--key-bits", type=int)
    q.add_argument("--format", choices=("json", "csv"), default="csv")
    q.set_defaults(func=cmd_trust_query)

    b = sub.add_parser("bench", help="crypto timings or SEG-Dijkstra operation counts")
    b.add_argument("kind", choices=("crypto", "dijkstra"))
    b.add_argument("--key-bits", type=int, nargs="+")
    b.add_argument("--sizes", type=int, nargs="+")
    b.add_argument("--trials", type=int, default=50)
    b.add_argument("--mean-degree", type=float, default=4.0)
    b.add_argument("--seed", type=int)
    b.add_argument("--out")
    b.add_argument("--format", choices=("csv",), default="csv")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export", help="snapshot JSON to plot-ready CSV")
    e.add_argument("--input", required=True, help="snapshots.json written by run")
    e.add_argument("--out")
    e.add_argument("--what", choices=("edges", "nodes"), default="edges")
    e.add_argument("--format", choices=("json", "csv"), default="csv")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("SEGTRUST_LOG", "WARNING").upper(),
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateQueryError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (ProtocolError, SimulationAborted) as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
