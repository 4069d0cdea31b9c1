"""Instances, assignments and free-disposal revenue accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

# Distinguished sink with unlimited capacity. Advertiser ids may not use it.
EXCHANGE = "__exchange__"


class InstanceError(ValueError):
    """Raised when an instance fails validation."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{e.code}: {e.message}" for e in self.errors))


class InvalidAssignment(ValueError):
    pass


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str


@dataclass(frozen=True)
class Advertiser:
    id: str
    capacity: int


@dataclass(frozen=True)
class Impression:
    id: str
    weights: Mapping[str, float] = field(default_factory=dict)
    exchange_weight: Optional[float] = None

    def weight(self, advertiser: str) -> float:
        """w_{i,a}; a missing entry counts as 0. ``EXCHANGE`` gives w_{i,alpha}."""
        if advertiser == EXCHANGE:
            if self.exchange_weight is None:
                raise KeyError(f"impression {self.id!r} has no exchange weight")
            return self.exchange_weight
        return self.weights.get(advertiser, 0.0)


@dataclass(frozen=True)
class Instance:
    advertisers: Tuple[Advertiser, ...] = ()
    batches: Tuple[Tuple[Impression, ...], ...] = ()
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "advertisers", tuple(self.advertisers))
        object.__setattr__(self, "batches", tuple(tuple(b) for b in self.batches))

    @property
    def capacities(self) -> Dict[str, int]:
        return {a.id: a.capacity for a in self.advertisers}

    @property
    def advertiser_ids(self) -> List[str]:
        return [a.id for a in self.advertisers]

    def impressions(self) -> Iterator[Impression]:
        for batch in self.batches:
            yield from batch

    def impression_map(self) -> Dict[str, Impression]:
        return {imp.id: imp for imp in self.impressions()}

    @property
    def n_impressions(self) -> int:
        return sum(len(b) for b in self.batches)

    @property
    def is_single_slot(self) -> bool:
        return all(len(b) <= 1 for b in self.batches)

    @property
    def knows_exchange(self) -> bool:
        """False when every impression lacks an exchange weight (reserve-price mode)."""
        imps = list(self.impressions())
        return not imps or any(i.exchange_weight is not None for i in imps)

    def with_exchange_weights(self, exchange: Mapping[str, float]) -> "Instance":
        """Copy of the instance with w_{i,alpha} replaced from ``exchange`` (missing -> 0)."""
        batches = [
            tuple(replace(imp, exchange_weight=float(exchange.get(imp.id, 0.0))) for imp in b)
            for b in self.batches
        ]
        return Instance(self.advertisers, batches, dict(self.meta))

    def without_exchange(self) -> "Instance":
        batches = [tuple(replace(imp, exchange_weight=None) for imp in b) for b in self.batches]
        return Instance(self.advertisers, batches, dict(self.meta))


def validate_instance(inst: Instance, unknown_exchange: Optional[bool] = None) -> List[ValidationIssue]:
    """Return the list of invariant violations; an empty list means the instance is valid.

    ``unknown_exchange`` defaults to whether the instance carries any exchange weight at all.
    In known mode every impression must have one.
    """
    issues: List[ValidationIssue] = []
    if unknown_exchange is None:
        unknown_exchange = not inst.knows_exchange

    seen = set()
    for adv in inst.advertisers:
        if adv.id in seen:
            issues.append(ValidationIssue("duplicate-id", f"advertiser {adv.id!r} appears twice"))
        seen.add(adv.id)
        if adv.id == EXCHANGE:
            issues.append(ValidationIssue("reserved-id", f"advertiser id {EXCHANGE!r} is reserved"))
        if not isinstance(adv.capacity, int) or adv.capacity < 1:
            issues.append(ValidationIssue("zero-capacity", f"advertiser {adv.id!r} has capacity {adv.capacity!r}"))

    imp_ids = set()
    for imp in inst.impressions():
        if imp.id in imp_ids:
            issues.append(ValidationIssue("duplicate-id", f"impression {imp.id!r} appears twice"))
        imp_ids.add(imp.id)
        for a, w in imp.weights.items():
            if a not in seen:
                issues.append(ValidationIssue("unknown-advertiser-reference", f"impression {imp.id!r} references {a!r}"))
            _check_weight(issues, imp.id, a, w)
        if imp.exchange_weight is None:
            if not unknown_exchange:
                issues.append(ValidationIssue("missing-exchange-weight", f"impression {imp.id!r}"))
        else:
            _check_weight(issues, imp.id, EXCHANGE, imp.exchange_weight)
    return issues


def _check_weight(issues, imp_id, target, w):
    if not isinstance(w, (int, float)) or not math.isfinite(w):
        issues.append(ValidationIssue("non-finite-weight", f"w[{imp_id!r},{target!r}] = {w!r}"))
    elif w < 0:
        issues.append(ValidationIssue("negative-weight", f"w[{imp_id!r},{target!r}] = {w!r}"))


def ensure_valid(inst: Instance, unknown_exchange: Optional[bool] = None) -> Instance:
    issues = validate_instance(inst, unknown_exchange)
    if issues:
        raise InstanceError(issues)
    return inst


@dataclass(frozen=True)
class Assignment:
    """Impression id -> advertiser id or ``EXCHANGE``."""

    target: Mapping[str, str] = field(default_factory=dict)

    def __getitem__(self, imp_id: str) -> str:
        return self.target[imp_id]

    def __len__(self):
        return len(self.target)

    def assigned_to(self, target: str) -> List[str]:
        return [i for i, t in self.target.items() if t == target]


def assignment_problems(inst: Instance, asg: Assignment) -> List[str]:
    problems = []
    known = set(inst.advertiser_ids)
    ids = set()
    for k, batch in enumerate(inst.batches):
        used = set()
        for imp in batch:
            ids.add(imp.id)
            t = asg.target.get(imp.id)
            if t is None:
                problems.append(f"impression {imp.id!r} is unassigned")
            elif t == EXCHANGE:
                continue
            elif t not in known:
                problems.append(f"impression {imp.id!r} assigned to unknown target {t!r}")
            elif t in used:
                problems.append(f"batch {k}: advertiser {t!r} receives two impressions")
            else:
                used.add(t)
    extra = set(asg.target) - ids
    if extra:
        problems.append(f"assignment mentions unknown impressions {sorted(extra)!r}")
    return problems


def is_valid_assignment(inst: Instance, asg: Assignment) -> bool:
    return not assignment_problems(inst, asg)


@dataclass(frozen=True)
class RevenueReport:
    total: float
    exchange: float
    per_advertiser: Mapping[str, float]

    @property
    def advertisers_total(self) -> float:
        """R_A: revenue from contracted advertisers."""
        return math.fsum(self.per_advertiser.values())

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "exchange": self.exchange,
            "advertisers": self.advertisers_total,
            "per_advertiser": dict(self.per_advertiser),
        }


def top_weights_sum(weights: Iterable[float], capacity: int) -> float:
    return math.fsum(sorted(weights, reverse=True)[:capacity])


def revenue_of(inst: Instance, asg: Assignment) -> RevenueReport:
    """Free-disposal revenue: each advertiser pays for its n_a most valuable impressions."""
    problems = assignment_problems(inst, asg)
    if problems:
        raise InvalidAssignment("; ".join(problems))
    received: Dict[str, List[float]] = {a.id: [] for a in inst.advertisers}
    exchange = []
    for imp in inst.impressions():
        t = asg.target[imp.id]
        if t == EXCHANGE:
            if imp.exchange_weight is None:
                raise InvalidAssignment(f"impression {imp.id!r} sent to the exchange without a known weight")
            exchange.append(imp.exchange_weight)
        else:
            received[t].append(imp.weight(t))
    caps = inst.capacities
    per_adv = {a: top_weights_sum(ws, caps[a]) for a, ws in received.items()}
    r_alpha = math.fsum(exchange)
    total = math.fsum([r_alpha, *per_adv.values()])
    return RevenueReport(total=total, exchange=r_alpha, per_advertiser=per_adv)


def preference_order(capacities: Mapping[str, int]) -> List[str]:
    """Tie-break order for every argmax: exchange, then larger capacity, then id."""
    return [EXCHANGE] + sorted(capacities, key=lambda a: (-capacities[a], a))
