"""Ratio of the online rules (alg1, alg2, alg3) to the offline optimum on the one-advertiser adversarial family.

    python scripts/example1_ratio.py --eps 0.001 --n 10 100 1000 10000
"""

import argparse

from adexchange.generators import example1
from adexchange.harness import evaluate


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--eps", type=float, default=0.001)
    p.add_argument("--n", type=int, nargs="+", default=[10, 100, 1000, 10000])
    args = p.parse_args()
    print("n,algorithm,R_total,R_OPT,ratio")
    for n in args.n:
        inst = example1(n, args.eps)
        for algo in ("alg1", "alg2", "alg3"):
            ev = evaluate(inst, algo)
            print(f"{n},{algo},{ev.result.report.total!r},{ev.opt.total!r},{ev.ratio:.9f}")


if __name__ == "__main__":
    main()
