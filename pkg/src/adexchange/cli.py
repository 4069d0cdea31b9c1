"""Command-line entry point: ``adexchange {gen,run,opt,certify,table}``."""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
import time
from pathlib import Path

from . import generators
from .algorithms import ALGORITHMS, run
from .auction import BidAuction
from .certify import DEFAULT_TOL
from .harness import TABLE_COLUMNS, benchmark_instance, certify_run, decompose, evaluate, table_row
from .io import dumps, instance_to_dict, load_bids, load_instance, save_bids, save_instance
from .model import ensure_valid


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    inst, bids_path = load_instance(args.instance)
    if getattr(args, "bids", None):
        bids_path = Path(args.bids)
    profile = load_bids(bids_path) if bids_path is not None else None
    return inst, profile


def _seed_info(inst, args):
    return {"seed": inst.meta.get("seed", getattr(args, "seed", None))}


def cmd_gen(args):
    fam = args.family
    bids_ref = None
    profile = None
    if fam == "example1":
        inst = generators.example1(args.n, args.eps)
    elif fam == "uniform":
        inst = generators.uniform(args.seed, args.advertisers, args.max_capacity, args.batches,
                                  args.slot_size, args.wmax)
    elif fam == "staircase":
        inst = generators.staircase(args.seed, args.advertisers, args.max_capacity, args.batches,
                                    args.slot_size)
    else:
        inst, profile = generators.bids(args.seed, args.advertisers, args.max_capacity, args.batches,
                                        args.wmax, args.max_bidders)
    ensure_valid(inst)
    if profile is not None:
        if not args.out:
            raise SystemExit("the bids family needs --out (the bid file is written next to it)")
        bids_out = Path(args.bids_out) if args.bids_out else Path(args.out).with_suffix(".bids.json")
        save_bids(profile, bids_out)
        same_dir = bids_out.resolve().parent == Path(args.out).resolve().parent
        bids_ref = bids_out.name if same_dir else str(bids_out.resolve())
    if args.out:
        save_instance(inst, args.out, bids_ref)
    else:
        sys.stdout.write(dumps(instance_to_dict(inst)))
    return 0


def cmd_run(args):
    inst, profile = _load(args)
    if args.algo == "reserve" and profile is None:
        raise SystemExit("reserve runs need a bid file (--bids or a 'bids' entry in the instance)")
    auction = BidAuction(profile, args.mechanism) if args.algo == "reserve" else None
    start = time.perf_counter()
    result = run(inst, args.algo, auction)
    elapsed = time.perf_counter() - start
    trace_path = args.trace_out
    if trace_path is None and args.out:
        trace_path = str(Path(args.out).with_suffix(".trace.json"))
    if trace_path:
        Path(trace_path).write_text(dumps(result.trace.to_dict()))
    report = {
        "algorithm": args.algo,
        "instance": str(args.instance),
        **_seed_info(inst, args),
        "revenue": result.report.to_dict(),
        "assignment": dict(result.assignment.target),
        "trace": trace_path,
    }
    if args.algo == "reserve":
        report["mechanism"] = args.mechanism
    if args.timing:
        report["wall_time"] = elapsed
    _emit(dumps(report), args.out)
    return 0


def cmd_opt(args):
    inst, profile = _load(args)
    bench = benchmark_instance(inst, profile)
    dec = decompose(bench)
    report = {"instance": str(args.instance), **_seed_info(inst, args), "opt": dec.to_dict(),
              "assignment": dict(dec.assignment.target)}
    _emit(dumps(report), args.out)
    return 0


def cmd_certify(args):
    inst, profile = _load(args)
    if args.algo == "reserve" and profile is None:
        raise SystemExit("reserve runs need a bid file (--bids or a 'bids' entry in the instance)")
    ev = evaluate(inst, args.algo, profile if args.algo == "reserve" else None, args.mechanism)
    cert = certify_run(ev.result, ev.benchmark, args.tolerance)
    report = {"instance": str(args.instance), **_seed_info(inst, args), **cert.to_dict()}
    _emit(dumps(report), args.out)
    return 0 if cert.passed else 1


def cmd_table(args):
    rows = []
    for path in args.instance:
        inst, profile = load_instance(path)
        profile = load_bids(profile) if profile is not None else None
        for algo in args.algo:
            if algo == "reserve" and profile is None:
                continue
            if algo != "reserve" and not inst.knows_exchange:
                continue
            if algo in ("alg1", "alg2", "alg3", "reserve") and not inst.is_single_slot:
                continue
            ev = evaluate(inst, algo, profile if algo == "reserve" else None, args.mechanism)
            rows.append(table_row(str(path), ev))
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    _emit(buf.getvalue(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adexchange", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", choices=generators.FAMILIES, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=4, help="example1: number of impressions")
    g.add_argument("--eps", type=float, default=0.1, help="example1: exchange weight is 1 - eps")
    g.add_argument("--advertisers", type=int, default=3)
    g.add_argument("--max-capacity", type=int, default=3)
    g.add_argument("--batches", type=int, default=10, help="number of batches (impressions for 'bids')")
    g.add_argument("--slot-size", type=int, default=1)
    g.add_argument("--wmax", type=int, default=10)
    g.add_argument("--max-bidders", type=int, default=3)
    g.add_argument("--out")
    g.add_argument("--bids-out")
    g.set_defaults(func=cmd_gen)

    def common(q, algo=True):
        q.add_argument("--instance", required=True)
        q.add_argument("--bids")
        q.add_argument("--mechanism", choices=("first_price", "second_price"), default="first_price")
        q.add_argument("--seed", type=int)
        q.add_argument("--out")
        if algo:
            q.add_argument("--algo", choices=ALGORITHMS, required=True)

    r = sub.add_parser("run", help="run one online algorithm")
    common(r)
    r.add_argument("--trace-out")
    r.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical reports)")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("opt", help="offline optimum and its decomposition")
    common(o, algo=False)
    o.set_defaults(func=cmd_opt)

    c = sub.add_parser("certify", help="check the competitive-ratio certificate of a run")
    common(c)
    c.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
    c.set_defaults(func=cmd_certify)

    t = sub.add_parser("table", help="CSV summary over instances x algorithms")
    t.add_argument("--instance", nargs="+", required=True)
    t.add_argument("--algo", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    t.add_argument("--mechanism", choices=("first_price", "second_price"), default="first_price")
    t.add_argument("--out")
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
