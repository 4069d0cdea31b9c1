"""Acceptance criteria 1-9, one recorded pass/fail line each."""

import functools
import math
import time

import numpy as np

from adexchange.algorithms import run, run_alg3
from adexchange.auction import BidAuction, first_price, max_bid_weights, satisfies_property_p, second_price
from adexchange.certify import certify
from adexchange.generators import bids, example1, uniform
from adexchange.harness import weighted_bound
from adexchange.ledger import Ledger, capacity_weight, check_beta_update_bound
from adexchange.matcher import best_valid_assignment, exhaustive_valid_assignment
from adexchange.model import Impression
from adexchange.offline import opt_decomposition, opt_multi_slot_bruteforce, opt_single_slot

TOL = 1e-9
SEEDS = range(500)


def campaign_params(seed, max_batches, slot_size):
    rng = np.random.default_rng([seed, 0xACC])
    return dict(
        n_advertisers=int(rng.integers(1, 5)),
        max_capacity=3,
        n_batches=int(rng.integers(1, max_batches + 1)),
        slot_size=slot_size,
        wmax=10,
    )


@functools.lru_cache(maxsize=None)
def single_slot_campaign():
    return [uniform(s, **campaign_params(s, 12, 1)) for s in SEEDS]


@functools.lru_cache(maxsize=None)
def weighted_campaign():
    """Criterion 4 instances with their brute-force decompositions and runs."""
    cells = []
    for s in SEEDS:
        for algo, max_batches, slot in (("alg3", 8, 1), ("alg4", 6, 3)):
            inst = uniform(s, **campaign_params(s, max_batches, slot))
            asg, _ = opt_multi_slot_bruteforce(inst)
            cells.append((inst, algo, opt_decomposition(inst, asg), run(inst, algo)))
    return cells


def test_criterion_1_example1(record_criterion):
    start = time.perf_counter()
    inst = example1(10000, 0.001)
    res = run(inst, "alg1")
    _, opt = opt_single_slot(inst)
    elapsed = time.perf_counter() - start
    ratio = res.report.total / opt.total
    ok = (
        res.report.total == 10000.0
        and abs(opt.total - (10000 + 9999 * 0.999)) <= 1e-9
        and abs(ratio - 0.500275) <= 1e-6
        and elapsed < 1.0
    )
    record_criterion(1, ok, f"R(A1)={res.report.total!r} R(OPT)={opt.total!r} ratio={ratio:.9f} time={elapsed:.3f}s")
    assert ok


def test_criterion_2_greedy_guarantee(record_criterion):
    insts = single_slot_campaign()
    start = time.perf_counter()
    bad = 0
    for inst in insts:
        rep = run(inst, "alg1").report
        _, opt = opt_single_slot(inst)
        bad += not (opt.total <= rep.exchange + 2 * rep.advertisers_total + TOL)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 10.0
    record_criterion(2, ok, f"{len(insts)} instances, {bad} violations, time={elapsed:.2f}s")
    assert ok


def test_criterion_3_biased_guarantee(record_criterion):
    insts = single_slot_campaign()
    bad = 0
    for inst in insts:
        total = run(inst, "alg2").report.total
        asg, _ = opt_single_slot(inst)
        dec = opt_decomposition(inst, asg)
        bad += not (total >= dec.exchange + 0.5 * dec.advertisers_total - TOL)
    record_criterion(3, bad == 0, f"{len(insts)} instances, {bad} violations")
    assert bad == 0


def test_criterion_4_weighted_bound(record_criterion):
    weighted_campaign.cache_clear()
    start = time.perf_counter()
    cells = weighted_campaign()
    bad = sum(not (res.report.total >= weighted_bound(inst, dec) - TOL) for inst, _, dec, res in cells)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60.0
    record_criterion(4, ok, f"{len(cells)} runs (alg3 + alg4 on {len(SEEDS)} seeds), {bad} violations, time={elapsed:.2f}s")
    assert ok


def test_criterion_5_beta_update(record_criterion):
    rng = np.random.default_rng(5)
    ledgers = {n: Ledger({"a": n}) for n in range(1, 11)}
    inserts = 10**5
    ns = rng.integers(1, 11, size=inserts)
    ws = rng.uniform(0, 10, size=inserts)
    ws = np.where(rng.random(inserts) < 0.3, np.floor(ws), ws)
    bad = 0
    for n, w in zip(ns.tolist(), ws.tolist()):
        ins = ledgers[n].assign_to("a", w)
        bad += not check_beta_update_bound(ins.beta_old, ins.beta_new, ins.dropped, w, n)
    record_criterion(5, bad == 0, f"{inserts} insertions over n in 1..10, {bad} violations")
    assert bad == 0


def test_criterion_6_certificates(record_criterion):
    cells = weighted_campaign()
    per_step = feas = failed = 0
    for inst, algo, dec, res in cells:
        cert = certify(inst, algo, res.trace, dec, TOL)
        per_step += cert.n_violations("per_step")
        feas += cert.n_violations("dual_feasibility")
        failed += not cert.passed
    ok = per_step == 0 and feas == 0 and failed == 0
    record_criterion(6, ok, f"{len(cells)} certificates, per-step violations {per_step}, "
                            f"feasibility violations {feas}, failed certificates {failed}")
    assert ok


def test_criterion_7_reserve_equivalence(record_criterion):
    mismatched = revenue_off = p_first = 0
    p_second_counter = 0
    grid = [float(r) for r in np.linspace(0, 10, 81)]
    for s in range(200):
        inst, profile = bids(s, n_advertisers=1 + s % 4, n_impressions=4 + s % 9)
        res = run(inst, "reserve", BidAuction(profile))
        revealed = inst.with_exchange_weights(max_bid_weights(profile))
        asg, _ = run_alg3(revealed)
        mismatched += res.assignment.target != asg.target
        want = run(revealed, "alg3").report.total
        revenue_off += abs(res.report.total - want) > 1e-12
        reserves = grid + [d.reserve for d in res.trace.decisions()]
        for b in profile.values():
            p_first += not satisfies_property_p(first_price, b, reserves)
            p_second_counter += not satisfies_property_p(second_price, b, reserves)
    ok = mismatched == 0 and revenue_off == 0 and p_first == 0 and p_second_counter >= 1
    record_criterion(7, ok, f"200 instances: {mismatched} assignment mismatches, {revenue_off} revenue mismatches, "
                            f"first-price P failures {p_first}, second-price counterexamples {p_second_counter}")
    assert ok


def _random_ledger(rng, n_adv):
    caps = {f"a{k + 1}": int(rng.integers(1, 4)) for k in range(n_adv)}
    led = Ledger(caps)
    for a in caps:
        for _ in range(int(rng.integers(0, 5))):
            led.assign_to(a, float(rng.integers(0, 11)))
    return led


def test_criterion_8_matcher_oracle(record_criterion):
    rng = np.random.default_rng(8)
    obj_bad = tgt_bad = 0
    for k in range(1000):
        led = _random_ledger(rng, int(rng.integers(0, 7)))
        size = int(rng.integers(1, 7))
        integer = k % 2 == 0
        draw = (lambda: float(rng.integers(0, 11))) if integer else (lambda: float(rng.uniform(0, 10)))
        batch = [Impression(f"i{j}", {a: draw() for a in led.capacities}, draw()) for j in range(size)]
        fast = best_valid_assignment(batch, led)
        slow = exhaustive_valid_assignment(batch, led)
        obj_bad += abs(fast.objective - slow.objective) > 1e-9
        tgt_bad += fast.targets != slow.targets
    ok = obj_bad == 0 and tgt_bad == 0
    record_criterion(8, ok, f"1000 batches, {obj_bad} objective mismatches, {tgt_bad} target mismatches")
    assert ok


def test_criterion_9_capacity_limits(record_criterion):
    c1 = capacity_weight(1).c
    cbig = capacity_weight(10**6).c
    ok = c1 == 0.5 and abs(cbig - (1 - 1 / math.e)) <= 1e-6
    record_criterion(9, ok, f"c(1)={c1!r}, c(10^6)={cbig!r}, 1-1/e={1 - 1 / math.e!r}")
    assert ok
