"""Random campaign: run algorithms over many generated instances and certify every run.

Prints per-algorithm worst ratio to OPT, worst slack against the proven guarantee, and the
number of failed certificates.

    python scripts/campaign.py --family staircase --seeds 200 --slot-size 3 --algo alg4
"""

import argparse
import time
from collections import defaultdict

from adexchange import generators
from adexchange.harness import certify_run, evaluate


def instances(args):
    for seed in range(args.seeds):
        if args.family == "bids":
            yield generators.bids(seed, args.advertisers, args.max_capacity, args.batches)
        else:
            gen = getattr(generators, args.family)
            yield gen(seed, args.advertisers, args.max_capacity, args.batches, args.slot_size), None


def slack(ev, cert):
    """How far the run clears its guarantee; alg1's is R_alpha + 2 R_A >= R(OPT)."""
    if ev.result.algorithm == "alg1":
        rep = ev.result.report
        return rep.exchange + 2 * rep.advertisers_total - ev.opt.total
    return cert.revenue - cert.bound


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--family", choices=("uniform", "staircase", "bids"), default="uniform")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--advertisers", type=int, default=3)
    p.add_argument("--max-capacity", type=int, default=3)
    p.add_argument("--batches", type=int, default=8)
    p.add_argument("--slot-size", type=int, default=1)
    p.add_argument("--algo", nargs="+", default=None)
    args = p.parse_args()
    if args.algo is None:
        if args.family == "bids":
            args.algo = ["reserve"]
        elif args.slot_size > 1:
            args.algo = ["alg4"]
        else:
            args.algo = ["alg1", "alg2", "alg3", "alg4"]

    worst_ratio = defaultdict(lambda: float("inf"))
    worst_slack = defaultdict(lambda: float("inf"))
    failures = defaultdict(int)
    start = time.perf_counter()
    for inst, profile in instances(args):
        for algo in args.algo:
            ev = evaluate(inst, algo, profile)
            cert = certify_run(ev.result, ev.benchmark)
            worst_ratio[algo] = min(worst_ratio[algo], ev.ratio)
            worst_slack[algo] = min(worst_slack[algo], slack(ev, cert))
            failures[algo] += not cert.passed
    print("algorithm,worst_ratio,worst_slack,failed_certificates")
    for algo in args.algo:
        print(f"{algo},{worst_ratio[algo]:.6f},{worst_slack[algo]:.6g},{failures[algo]}")
    print(f"# {args.seeds} seeds in {time.perf_counter() - start:.2f}s")


if __name__ == "__main__":
    main()
