"""Offline optimum and its per-advertiser revenue decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import EXCHANGE, Assignment, Instance, RevenueReport, revenue_of

BRUTEFORCE_LIMIT = 10**7


class SizeLimitError(ValueError):
    pass


class MultiSlotInput(ValueError):
    pass


def opt_single_slot(inst: Instance) -> Tuple[Assignment, RevenueReport]:
    """Optimal assignment when every batch holds a single impression.

    Every impression is worth ``w_{i,alpha}`` at the exchange, so the optimum is the
    exchange baseline plus a maximum-gain b-matching on ``max(0, w_{i,a} - w_{i,alpha})``
    where advertiser ``a`` offers ``n_a`` slots. Free disposal makes extra impressions on
    an advertiser worthless, so capacity-respecting matchings suffice.
    """
    if not inst.is_single_slot:
        raise MultiSlotInput("multi-slot-input: use opt_multi_slot_bruteforce")
    imps = list(inst.impressions())
    target = {imp.id: EXCHANGE for imp in imps}
    slots: List[str] = []
    for adv in inst.advertisers:
        slots.extend([adv.id] * min(adv.capacity, len(imps)))
    if imps and slots:
        gain = np.zeros((len(imps), len(slots)))
        for r, imp in enumerate(imps):
            base = imp.weight(EXCHANGE)
            for col, a in enumerate(slots):
                gain[r, col] = max(0.0, imp.weight(a) - base)
        rows, cols = linear_sum_assignment(gain, maximize=True)
        for r, col in zip(rows, cols):
            if gain[r, col] > 0.0:
                target[imps[r].id] = slots[col]
    asg = Assignment(target)
    return asg, revenue_of(inst, asg)


def _batch_options(batch, advertisers):
    """All valid assignments of one batch: (targets per impression, value, advertiser indices used)."""
    options = []
    n_adv = len(advertisers)

    def walk(r, used, picked, value):
        if r == len(batch):
            options.append((tuple(picked), value, used))
            return
        imp = batch[r]
        picked.append(-1)
        walk(r + 1, used, picked, value + imp.weight(EXCHANGE))
        picked.pop()
        for k in range(n_adv):
            if k in used:
                continue
            picked.append(k)
            walk(r + 1, used | {k}, picked, value + imp.weight(advertisers[k]))
            picked.pop()

    walk(0, frozenset(), [], 0.0)
    return options


def opt_multi_slot_bruteforce(inst: Instance) -> Tuple[Assignment, RevenueReport]:
    """Exact optimum over all per-batch valid assignments.

    Each batch's valid assignments are enumerated; a layered search over the remaining
    capacity of every advertiser merges equivalent partial assignments. Restricting to
    at most ``n_a`` impressions per advertiser loses nothing: surplus impressions can be
    moved to the exchange without lowering revenue or breaking validity.
    """
    advertisers = inst.advertiser_ids
    n_total = inst.n_impressions
    caps0 = tuple(min(a.capacity, n_total) for a in inst.advertisers)
    enumerated = sum((len(advertisers) + 1) ** len(b) for b in inst.batches)
    n_states = math.prod(c + 1 for c in caps0)
    if enumerated * n_states > BRUTEFORCE_LIMIT:
        raise SizeLimitError(f"size-limit: about {enumerated * n_states} steps exceeds {BRUTEFORCE_LIMIT}")

    # layer: remaining capacities -> (value, previous state, option index)
    layers = [{caps0: (0.0, None, None)}]
    options_per_batch = []
    for batch in inst.batches:
        options = _batch_options(batch, advertisers)
        options_per_batch.append(options)
        nxt: Dict[tuple, tuple] = {}
        for caps, (value, _, _) in layers[-1].items():
            for k, (_, gain, used) in enumerate(options):
                if any(caps[a] == 0 for a in used):
                    continue
                new = tuple(c - 1 if a in used else c for a, c in enumerate(caps))
                total = value + gain
                if new not in nxt or total > nxt[new][0]:
                    nxt[new] = (total, caps, k)
        layers.append(nxt)

    final = layers[-1]
    state = max(final, key=lambda s: final[s][0])
    target: Dict[str, str] = {}
    for b in range(len(inst.batches), 0, -1):
        _, prev, k = layers[b][state]
        picked, _, _ = options_per_batch[b - 1][k]
        for imp, t in zip(inst.batches[b - 1], picked):
            target[imp.id] = EXCHANGE if t < 0 else advertisers[t]
        state = prev
    asg = Assignment({imp.id: target[imp.id] for imp in inst.impressions()})
    return asg, revenue_of(inst, asg)


def optimum(inst: Instance) -> Tuple[Assignment, RevenueReport]:
    if inst.is_single_slot:
        return opt_single_slot(inst)
    return opt_multi_slot_bruteforce(inst)


@dataclass(frozen=True)
class Decomposition:
    """Impressions each target receives in OPT (``I^a``) and the revenue it earns (``R_a``).

    Keys are advertiser ids plus ``EXCHANGE``.
    """

    members: Dict[str, List[str]]
    revenue: Dict[str, float]
    assignment: Assignment

    @property
    def total(self) -> float:
        return math.fsum(self.revenue.values())

    @property
    def exchange(self) -> float:
        return self.revenue[EXCHANGE]

    @property
    def advertisers_total(self) -> float:
        return math.fsum(v for k, v in self.revenue.items() if k != EXCHANGE)

    def target_of(self) -> Dict[str, str]:
        return dict(self.assignment.target)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "exchange": self.exchange,
            "per_advertiser": {k: v for k, v in self.revenue.items() if k != EXCHANGE},
            "members": {("exchange" if k == EXCHANGE else k): v for k, v in self.members.items()},
        }


def opt_decomposition(inst: Instance, opt_asg: Assignment) -> Decomposition:
    """Partition impressions by their OPT target and sum each advertiser's top ``n_a``.

    If an advertiser was given more than ``n_a`` impressions, the surplus (smallest
    weights) is reassigned to the exchange. For a true optimum those impressions have
    exchange weight 0, so the revenue is unchanged and each ``I^a`` fits the capacity.
    """
    caps = inst.capacities
    imps = inst.impression_map()
    members: Dict[str, List[str]] = {a: [] for a in caps}
    members[EXCHANGE] = []
    for imp in inst.impressions():
        members[opt_asg[imp.id]].append(imp.id)
    target = dict(opt_asg.target)
    for a, n in caps.items():
        if len(members[a]) > n:
            ranked = sorted(members[a], key=lambda i: -imps[i].weight(a))
            for i in ranked[n:]:
                target[i] = EXCHANGE
            keep = set(ranked[:n])
            members[a] = [i for i in members[a] if i in keep]
    members[EXCHANGE] = [imp.id for imp in inst.impressions() if target[imp.id] == EXCHANGE]
    revenue = {a: math.fsum(imps[i].weight(a) for i in members[a]) for a in caps}
    revenue[EXCHANGE] = math.fsum(imps[i].weight(EXCHANGE) for i in members[EXCHANGE])
    return Decomposition(members, revenue, Assignment(target))
