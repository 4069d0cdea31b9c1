"""Online allocation algorithms and the reserve-price variant.

Every run consumes batches in order and returns the final ``Assignment`` together with a
``StepTrace`` that records, per batch, the beta snapshots and each impression's decision.
Algorithms 1 and 2 assume unit capacities; ``run`` expands advertisers into unit copies
before calling them and folds copies back afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from .ledger import Ledger, capacity_weight
from .matcher import best_valid_assignment, preferred_argmax
from .model import (
    EXCHANGE,
    Advertiser,
    Assignment,
    Impression,
    Instance,
    RevenueReport,
    ensure_valid,
    preference_order,
    revenue_of,
)

ALGORITHMS = ("alg1", "alg2", "alg3", "alg4", "reserve")


class PreconditionError(ValueError):
    pass


@dataclass
class Decision:
    impression: str
    target: str
    reduced: Dict[str, float]
    delta_revenue: float
    dropped: float = 0.0
    reserve: Optional[float] = None
    sold: Optional[bool] = None
    price: Optional[float] = None

    def to_dict(self) -> dict:
        d = {
            "impression": self.impression,
            "target": self.target,
            "reduced": self.reduced,
            "delta_revenue": self.delta_revenue,
            "dropped": self.dropped,
        }
        if self.reserve is not None:
            d.update(reserve=self.reserve, sold=self.sold, price=self.price)
        return d


@dataclass
class BatchStep:
    index: int
    beta_before: Dict[str, float]
    beta_after: Dict[str, float]
    decisions: List[Decision] = field(default_factory=list)

    @property
    def delta_revenue(self) -> float:
        return math.fsum(d.delta_revenue for d in self.decisions)

    def to_dict(self) -> dict:
        return {
            "batch": self.index,
            "beta_before": self.beta_before,
            "beta_after": self.beta_after,
            "decisions": [d.to_dict() for d in self.decisions],
        }


@dataclass
class StepTrace:
    algorithm: str
    steps: List[BatchStep] = field(default_factory=list)

    def decisions(self):
        for step in self.steps:
            yield from step.decisions

    def assignment(self) -> Assignment:
        return Assignment({d.impression: d.target for d in self.decisions()})

    def exchange_prices(self) -> Dict[str, float]:
        """Sale price of each impression the trace sent to the exchange."""
        return {d.impression: d.delta_revenue for d in self.decisions() if d.target == EXCHANGE}

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "steps": [s.to_dict() for s in self.steps]}


def replay(inst: Instance, trace: StepTrace) -> Tuple[Assignment, RevenueReport]:
    """Rebuild the assignment and revenue from a trace alone."""
    asg = trace.assignment()
    if trace.algorithm == "reserve":
        inst = inst.with_exchange_weights(trace.exchange_prices())
    return asg, revenue_of(inst, asg)


def _require_single_slot(inst: Instance):
    if not inst.is_single_slot:
        raise PreconditionError("multi-slot-input: algorithm needs batches of size one")


def _require_unit(inst: Instance):
    _require_single_slot(inst)
    if any(a.capacity != 1 for a in inst.advertisers):
        raise PreconditionError("unit capacities required; apply expand_to_unit_capacities first")


def _require_known(inst: Instance):
    if any(imp.exchange_weight is None for imp in inst.impressions()):
        raise PreconditionError("exchange weights must be known")


# --- unit-capacity expansion ------------------------------------------------


def copy_id(advertiser: str, p: int) -> str:
    return f"{advertiser}#{p}"


def expand_to_unit_capacities(inst: Instance) -> Tuple[Instance, Dict[str, str]]:
    """Replace every advertiser by ``n_a`` unit-capacity copies with identical weights.

    Returns the new instance and the copy -> original map. Advertisers that already have
    capacity one keep their id.
    """
    _require_single_slot(inst)
    origin: Dict[str, str] = {}
    copies: Dict[str, List[str]] = {}
    advertisers = []
    for a in inst.advertisers:
        ids = [a.id] if a.capacity == 1 else [copy_id(a.id, p) for p in range(1, a.capacity + 1)]
        copies[a.id] = ids
        for cid in ids:
            origin[cid] = a.id
            advertisers.append(Advertiser(cid, 1))
    batches = []
    for batch in inst.batches:
        new = []
        for imp in batch:
            weights = {cid: w for a, w in imp.weights.items() for cid in copies[a]}
            new.append(Impression(imp.id, weights, imp.exchange_weight))
        batches.append(tuple(new))
    return Instance(advertisers, batches, dict(inst.meta)), origin


def fold_assignment(asg: Assignment, origin: Mapping[str, str]) -> Assignment:
    return Assignment({i: origin.get(t, t) for i, t in asg.target.items()})


# --- the algorithms ---------------------------------------------------------


def _apply(ledger: Ledger, imp: Impression, target: str, reduced, **extra) -> Decision:
    if target == EXCHANGE:
        price = extra.pop("price", None)
        gain = imp.weight(EXCHANGE) if price is None else price
        return Decision(imp.id, EXCHANGE, reduced, gain, price=price, **extra)
    ins = ledger.assign_to(target, imp.weight(target))
    return Decision(imp.id, target, reduced, ins.delta_revenue, ins.dropped, **extra)


def _one_by_one(inst: Instance, name: str, decide) -> Tuple[Assignment, StepTrace]:
    ledger = Ledger(inst.capacities)
    trace = StepTrace(name)
    for k, batch in enumerate(inst.batches):
        step = BatchStep(k, ledger.snapshot(), {})
        for imp in batch:
            step.decisions.append(decide(ledger, imp))
        step.beta_after = ledger.snapshot()
        trace.steps.append(step)
    return trace.assignment(), trace


def run_alg1(inst: Instance) -> Tuple[Assignment, StepTrace]:
    """argmax of w - beta over advertisers and exchange; beta_j becomes w_{i,j} on assignment."""
    _require_unit(inst)
    _require_known(inst)
    order = preference_order(inst.capacities)

    def decide(ledger, imp):
        reduced = {t: imp.weight(t) - ledger.beta_for(t) for t in order}
        j = order[preferred_argmax([reduced[t] for t in order])]
        return _apply(ledger, imp, j, reduced)

    return _one_by_one(inst, "alg1", decide)


def run_alg2(inst: Instance) -> Tuple[Assignment, StepTrace]:
    """Best advertiser by w - beta, taken only if strictly more than twice the exchange weight."""
    _require_unit(inst)
    _require_known(inst)
    advertisers = preference_order(inst.capacities)[1:]

    def decide(ledger, imp):
        reduced = {a: imp.weight(a) - ledger.beta[a] for a in advertisers}
        w_alpha = imp.weight(EXCHANGE)
        reduced[EXCHANGE] = 2.0 * w_alpha
        if advertisers:
            j = advertisers[preferred_argmax([reduced[a] for a in advertisers])]
            if reduced[j] > 2.0 * w_alpha:
                return _apply(ledger, imp, j, reduced)
        return _apply(ledger, imp, EXCHANGE, reduced)

    return _one_by_one(inst, "alg2", decide)


def _weighted_values(ledger: Ledger, imp: Impression, advertisers) -> Dict[str, float]:
    return {a: ledger.c[a] * (imp.weight(a) - ledger.beta[a]) for a in advertisers}


def run_alg3(inst: Instance) -> Tuple[Assignment, StepTrace]:
    """argmax of c_a (w - beta_a) with c = 1, beta = 0 for the exchange."""
    _require_single_slot(inst)
    _require_known(inst)
    order = preference_order(inst.capacities)

    def decide(ledger, imp):
        reduced = {EXCHANGE: imp.weight(EXCHANGE), **_weighted_values(ledger, imp, order[1:])}
        x = order[preferred_argmax([reduced[t] for t in order])]
        return _apply(ledger, imp, x, reduced)

    return _one_by_one(inst, "alg3", decide)


def run_alg4(inst: Instance) -> Tuple[Assignment, StepTrace]:
    """Per batch, the valid assignment maximising the summed weighted reduced values."""
    _require_known(inst)
    ledger = Ledger(inst.capacities)
    trace = StepTrace("alg4")
    for k, batch in enumerate(inst.batches):
        step = BatchStep(k, ledger.snapshot(), {})
        match = best_valid_assignment(batch, ledger)
        # distinct advertisers per batch, so sequential ledger updates see the pre-batch state
        for imp in batch:
            step.decisions.append(_apply(ledger, imp, match.targets[imp.id], match.values[imp.id]))
        step.beta_after = ledger.snapshot()
        trace.steps.append(step)
    return trace.assignment(), trace


def reserve_price(imp: Impression, ledger: Ledger) -> float:
    """Smallest exchange revenue that beats every contracted advertiser, clamped at 0."""
    values = _weighted_values(ledger, imp, ledger.capacities)
    return max(0.0, max(values.values(), default=0.0))


def run_reserve(inst: Instance, auction: Callable[[str, float], "object"]) -> Tuple[Assignment, StepTrace]:
    """Reserve-price mode: offer every impression to the exchange first.

    ``auction(impression_id, reserve)`` returns an outcome with ``sold`` and ``revenue``.
    Unsold impressions go to the best contracted advertiser; if no advertiser has a
    positive weighted reduced value the impression is left with the exchange, unsold, at
    revenue 0 (the known-weight algorithm would also pick the exchange there).
    """
    _require_single_slot(inst)
    order = preference_order(inst.capacities)
    advertisers = order[1:]

    def decide(ledger, imp):
        reduced = _weighted_values(ledger, imp, advertisers)
        r = reserve_price(imp, ledger)
        outcome = auction(imp.id, r)
        if outcome.sold:
            return _apply(ledger, imp, EXCHANGE, reduced, reserve=r, sold=True, price=outcome.revenue)
        if advertisers:
            j = advertisers[preferred_argmax([reduced[a] for a in advertisers])]
            if reduced[j] > 0.0:
                return _apply(ledger, imp, j, reduced, reserve=r, sold=False)
        return _apply(ledger, imp, EXCHANGE, reduced, reserve=r, sold=False, price=0.0)

    return _one_by_one(inst, "reserve", decide)


# --- runner -----------------------------------------------------------------


@dataclass
class RunResult:
    """Outcome of one algorithm on one instance.

    ``run_instance`` is what the algorithm actually saw (unit copies for alg1/alg2, the
    realised exchange prices for reserve runs); ``assignment`` is folded back onto the
    original advertisers.
    """

    algorithm: str
    instance: Instance
    run_instance: Instance
    run_assignment: Assignment
    assignment: Assignment
    trace: StepTrace
    report: RevenueReport
    origin: Dict[str, str] = field(default_factory=dict)


def run(inst: Instance, algorithm: str, auction=None) -> RunResult:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; pick one of {ALGORITHMS}")
    ensure_valid(inst, unknown_exchange=(algorithm == "reserve") or None)
    origin: Dict[str, str] = {}
    run_inst = inst
    if algorithm in ("alg1", "alg2"):
        run_inst, origin = expand_to_unit_capacities(inst)
        asg, trace = (run_alg1 if algorithm == "alg1" else run_alg2)(run_inst)
    elif algorithm == "alg3":
        asg, trace = run_alg3(inst)
    elif algorithm == "alg4":
        asg, trace = run_alg4(inst)
    else:
        if auction is None:
            raise PreconditionError("reserve runs need an auction oracle")
        asg, trace = run_reserve(inst, auction)
        run_inst = inst.with_exchange_weights(trace.exchange_prices())
    folded = fold_assignment(asg, origin)
    report = revenue_of(run_inst if algorithm == "reserve" else inst, folded)
    return RunResult(algorithm, inst, run_inst, asg, folded, trace, report, origin)


def c_weights(capacities: Mapping[str, int]) -> Dict[str, float]:
    return {a: capacity_weight(n).c for a, n in capacities.items()}
