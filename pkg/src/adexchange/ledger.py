"""Per-advertiser free-disposal ledger and the exponentially weighted potential beta."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Union

from .model import EXCHANGE


@lru_cache(maxsize=None)
def e_n(n: int) -> float:
    """(1 + 1/n)^n by repeated multiplication."""
    base = 1.0 + 1.0 / n
    acc = 1.0
    for _ in range(n):
        acc *= base
    return acc


@dataclass(frozen=True)
class CapacityWeight:
    e_n: float
    c: float


def capacity_weight(n: Union[int, str]) -> CapacityWeight:
    """c = 1 - 1/e_n for a contracted advertiser, 1 for the exchange."""
    if n == EXCHANGE or n == math.inf:
        return CapacityWeight(e_n=math.inf, c=1.0)
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"capacity must be a positive integer, got {n!r}")
    e = e_n(n)
    return CapacityWeight(e_n=e, c=1.0 - 1.0 / e)


def beta_of(weights: Sequence[float], n: int) -> float:
    """Weighted mean of the kept weights (descending, at most ``n`` of them).

    The j-th largest weight has coefficient (1 + 1/n)^(j-1); the normaliser is n (e_n - 1).
    Fewer than ``n`` weights sum over the prefix only.
    """
    if len(weights) > n:
        raise ValueError("more kept weights than capacity")
    base = 1.0 + 1.0 / n
    coef = 1.0
    acc = 0.0
    for w in weights:
        acc += w * coef
        coef *= base
    return acc / (n * (e_n(n) - 1.0))


def check_beta_update_bound(beta_old, beta_new, v, w, n, tol=1e-9) -> bool:
    """Growth bound on beta after one insertion: dropped value ``v``, inserted weight ``w``."""
    e = e_n(n)
    denom = n * (e - 1.0)
    rhs = beta_old / n + w / denom - v * e / denom
    return beta_new - beta_old <= rhs + tol


@dataclass(frozen=True)
class Insertion:
    delta_revenue: float
    dropped: float
    beta_old: float
    beta_new: float


class UnknownAdvertiser(KeyError):
    pass


class Ledger:
    """Kept weights and beta for each contracted advertiser of one run.

    Only the ``n_a`` most valuable weights are retained; anything smaller is disposed
    of immediately since it can never re-enter the top ``n_a``.
    """

    def __init__(self, capacities: Mapping[str, int]):
        self.capacities: Dict[str, int] = dict(capacities)
        self.kept: Dict[str, List[float]] = {a: [] for a in self.capacities}
        self.beta: Dict[str, float] = {a: 0.0 for a in self.capacities}
        self.c: Dict[str, float] = {a: capacity_weight(n).c for a, n in self.capacities.items()}

    def beta_for(self, target: str) -> float:
        return 0.0 if target == EXCHANGE else self.beta[target]

    def c_for(self, target: str) -> float:
        return 1.0 if target == EXCHANGE else self.c[target]

    def snapshot(self) -> Dict[str, float]:
        return dict(self.beta)

    def revenue(self, advertiser: str) -> float:
        return math.fsum(self.kept[advertiser])

    def assign_to(self, advertiser: str, w: float) -> Insertion:
        if advertiser not in self.capacities:
            raise UnknownAdvertiser(advertiser)
        if w < 0:
            raise ValueError(f"negative weight {w!r}")
        n = self.capacities[advertiser]
        kept = self.kept[advertiser]
        beta_old = self.beta[advertiser]
        if len(kept) == n and w <= kept[-1]:
            return Insertion(delta_revenue=0.0, dropped=w, beta_old=beta_old, beta_new=beta_old)
        dropped = kept.pop() if len(kept) == n else 0.0
        pos = 0
        while pos < len(kept) and kept[pos] >= w:
            pos += 1
        kept.insert(pos, w)
        beta_new = beta_of(kept, n)
        self.beta[advertiser] = beta_new
        return Insertion(delta_revenue=w - dropped, dropped=dropped, beta_old=beta_old, beta_new=beta_new)
