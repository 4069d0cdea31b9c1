"""Glue between algorithms, offline optimum and certificates for one (instance, algorithm) cell."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional

from .algorithms import RunResult, run
from .auction import BidAuction, max_bid_weights
from .certify import DEFAULT_TOL, CertReport, certify
from .ledger import capacity_weight
from .model import Instance
from .offline import Decomposition, opt_decomposition, optimum


def benchmark_instance(inst: Instance, profile: Optional[Dict[str, List[float]]] = None) -> Instance:
    """Instance the offline optimum is measured on; reserve mode reveals the max bid as w_alpha."""
    if profile is not None and not inst.knows_exchange:
        return inst.with_exchange_weights(max_bid_weights(profile))
    return inst


def decompose(inst: Instance) -> Decomposition:
    asg, _ = optimum(inst)
    return opt_decomposition(inst, asg)


def weighted_bound(inst: Instance, dec: Decomposition) -> float:
    """sum over targets of c_a R_a(OPT), with c = 1 for the exchange."""
    caps = inst.capacities
    return math.fsum([dec.exchange, *(capacity_weight(caps[a]).c * dec.revenue[a] for a in caps)])


@dataclass
class Evaluation:
    result: RunResult
    benchmark: Instance
    opt: Decomposition
    bound: float

    @property
    def ratio(self) -> float:
        total = self.opt.total
        return 1.0 if total == 0 else self.result.report.total / total


def evaluate(inst: Instance, algorithm: str, profile=None, mechanism: str = "first_price") -> Evaluation:
    auction = BidAuction(profile, mechanism) if profile is not None else None
    result = run(inst, algorithm, auction)
    bench = benchmark_instance(inst, profile)
    dec = decompose(bench)
    return Evaluation(result, bench, dec, weighted_bound(bench, dec))


def certify_run(result: RunResult, benchmark: Instance, tol: float = DEFAULT_TOL) -> CertReport:
    """Certificate for a run; alg1/alg2 are checked on their unit-capacity copies."""
    if result.algorithm in ("alg1", "alg2"):
        inst = result.run_instance
    elif result.algorithm == "reserve":
        inst = benchmark
    else:
        inst = result.instance
    return certify(inst, result.algorithm, result.trace, decompose(inst), tol)


def table_row(name: str, ev: Evaluation) -> Dict[str, object]:
    rep = ev.result.report
    per = ";".join(f"{a}={v!r}" for a, v in rep.per_advertiser.items())
    return {
        "instance": name,
        "algorithm": ev.result.algorithm,
        "R_total": rep.total,
        "R_alpha": rep.exchange,
        "R_A": rep.advertisers_total,
        "R_a": per,
        "R_OPT": ev.opt.total,
        "bound": ev.bound,
        "ratio": ev.ratio,
    }


TABLE_COLUMNS = ("instance", "algorithm", "R_total", "R_alpha", "R_A", "R_a", "R_OPT", "bound", "ratio")
