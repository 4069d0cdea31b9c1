"""Exchange auctions with a publisher-chosen reserve price."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Sequence

BidProfile = Dict[str, List[float]]


@dataclass(frozen=True)
class AuctionOutcome:
    sold: bool
    revenue: float = 0.0


UNSOLD = AuctionOutcome(False, 0.0)


def first_price(bids: Sequence[float], reserve: float) -> AuctionOutcome:
    """Highest bid wins and pays its bid; sells when that bid is at or above the reserve."""
    if not bids:
        return UNSOLD
    top = max(bids)
    return AuctionOutcome(True, float(top)) if top >= reserve else UNSOLD


def second_price(bids: Sequence[float], reserve: float) -> AuctionOutcome:
    """Winner pays max(second-highest bid, reserve). Revenue depends on the reserve."""
    if not bids:
        return UNSOLD
    ranked = sorted(bids, reverse=True)
    if ranked[0] < reserve:
        return UNSOLD
    runner_up = ranked[1] if len(ranked) > 1 else 0.0
    return AuctionOutcome(True, float(max(runner_up, reserve)))


MECHANISMS: Dict[str, Callable[[Sequence[float], float], AuctionOutcome]] = {
    "first_price": first_price,
    "second_price": second_price,
}


def satisfies_property_p(mechanism, bids: Sequence[float], reserves: Iterable[float], tol: float = 0.0) -> bool:
    """True iff every reserve in the grid at which the impression sells yields the same revenue."""
    revenues = [o.revenue for o in (mechanism(bids, r) for r in reserves) if o.sold]
    return all(abs(r - revenues[0]) <= tol for r in revenues)


def validate_bids(profile: Mapping[str, Sequence[float]]) -> None:
    for imp, bids in profile.items():
        for b in bids:
            if not isinstance(b, (int, float)) or not math.isfinite(b) or b < 0:
                raise ValueError(f"bad bid {b!r} for impression {imp!r}")


class BidAuction:
    """Auction oracle replaying a fixed bid profile: ``auction(impression_id, reserve)``."""

    def __init__(self, profile: Mapping[str, Sequence[float]], mechanism="first_price"):
        validate_bids(profile)
        self.profile = {k: list(v) for k, v in profile.items()}
        self.mechanism = MECHANISMS[mechanism] if isinstance(mechanism, str) else mechanism

    def __call__(self, impression_id: str, reserve: float) -> AuctionOutcome:
        return self.mechanism(self.profile.get(impression_id, []), reserve)


def max_bid_weights(profile: Mapping[str, Sequence[float]]) -> Dict[str, float]:
    """Exchange weight an omniscient benchmark would see: the first-price revenue at reserve 0."""
    return {imp: first_price(bids, 0.0).revenue for imp, bids in profile.items()}
