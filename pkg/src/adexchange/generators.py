"""Instance families for experiments and property campaigns.

All weights are integers (stored as floats) so that the arithmetic of revenue sums stays
exact; the only rounding comes from the capacity weights and beta.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

import numpy as np

from .model import Advertiser, Impression, Instance

FAMILIES = ("example1", "uniform", "staircase", "bids")


def example1(n: int, eps: float) -> Instance:
    """One unit-capacity advertiser; impression i is worth i to it and 1 - eps at the exchange."""
    batches = [(Impression(f"i{i}", {"a": float(i)}, 1.0 - eps),) for i in range(1, n + 1)]
    return Instance([Advertiser("a", 1)], batches, {"family": "example1", "n": n, "eps": eps})


def _advertisers(rng, n_advertisers, max_capacity):
    caps = rng.integers(1, max_capacity + 1, size=n_advertisers)
    return [Advertiser(f"a{k + 1}", int(c)) for k, c in enumerate(caps)]


def _sizes(rng, n_batches, slot_size):
    return [int(s) for s in rng.integers(1, slot_size + 1, size=n_batches)]


def uniform(seed: int, n_advertisers: int = 3, max_capacity: int = 3, n_batches: int = 10,
            slot_size: int = 1, wmax: int = 10) -> Instance:
    """Independent integer weights in [0, wmax]; batch sizes uniform in [1, slot_size]."""
    rng = np.random.default_rng(seed)
    advertisers = _advertisers(rng, n_advertisers, max_capacity)
    batches = []
    k = 0
    for size in _sizes(rng, n_batches, slot_size):
        batch = []
        for _ in range(size):
            k += 1
            w = rng.integers(0, wmax + 1, size=n_advertisers + 1)
            weights = {a.id: float(w[j]) for j, a in enumerate(advertisers)}
            batch.append(Impression(f"i{k}", weights, float(w[-1])))
        batches.append(tuple(batch))
    meta = dict(family="uniform", seed=seed, n_advertisers=n_advertisers, max_capacity=max_capacity,
                n_batches=n_batches, slot_size=slot_size, wmax=wmax)
    return Instance(advertisers, batches, meta)


def staircase(seed: int, n_advertisers: int = 3, max_capacity: int = 3, n_batches: int = 12,
              slot_size: int = 1, step: int = 2, run_length: int = 2) -> Instance:
    """Rising weight levels shared by random advertiser groups, exchange near half a level.

    A generalisation of the single-advertiser increasing sequence: every ``run_length``
    impressions the level rises by ``step``, the interested advertisers all value the
    impression at the current level, and the exchange weight sits at, or one unit around,
    half the level. This produces many exact ties in the online decision rules.
    """
    rng = np.random.default_rng(seed)
    advertisers = _advertisers(rng, n_advertisers, max_capacity)
    batches = []
    k = 0
    for size in _sizes(rng, n_batches, slot_size):
        batch = []
        for _ in range(size):
            level = step * (1 + k // run_length)
            k += 1
            mask = rng.random(n_advertisers) < 0.6
            if n_advertisers and not mask.any():
                mask[rng.integers(n_advertisers)] = True
            weights = {a.id: float(level) for a, m in zip(advertisers, mask) if m}
            ex = max(0, level // 2 + int(rng.integers(-1, 2)))
            if rng.random() < 0.15:
                ex = 0
            batch.append(Impression(f"i{k}", weights, float(ex)))
        batches.append(tuple(batch))
    meta = dict(family="staircase", seed=seed, n_advertisers=n_advertisers, max_capacity=max_capacity,
                n_batches=n_batches, slot_size=slot_size, step=step, run_length=run_length)
    return Instance(advertisers, batches, meta)


def bids(seed: int, n_advertisers: int = 3, max_capacity: int = 3, n_impressions: int = 10,
         wmax: int = 10, max_bidders: int = 3) -> Tuple[Instance, Dict[str, List[float]]]:
    """Single-slot instance without exchange weights plus a bid profile for each impression.

    Between 0 and ``max_bidders`` integer bids in [0, wmax] per impression; an impression
    with no bids can never sell.
    """
    rng = np.random.default_rng(seed)
    advertisers = _advertisers(rng, n_advertisers, max_capacity)
    batches = []
    profile: Dict[str, List[float]] = {}
    for k in range(1, n_impressions + 1):
        w = rng.integers(0, wmax + 1, size=n_advertisers)
        imp = Impression(f"i{k}", {a.id: float(w[j]) for j, a in enumerate(advertisers)}, None)
        batches.append((imp,))
        n_bids = int(rng.integers(0, max_bidders + 1))
        profile[imp.id] = [float(b) for b in rng.integers(0, wmax + 1, size=n_bids)]
    meta = dict(family="bids", seed=seed, n_advertisers=n_advertisers, max_capacity=max_capacity,
                n_impressions=n_impressions, wmax=wmax, max_bidders=max_bidders)
    return Instance(advertisers, batches, meta), profile
