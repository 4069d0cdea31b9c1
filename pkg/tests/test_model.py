import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adexchange.generators import example1
from adexchange.model import (
    EXCHANGE,
    Advertiser,
    Assignment,
    Impression,
    Instance,
    InvalidAssignment,
    is_valid_assignment,
    revenue_of,
    validate_instance,
)
from conftest import instances
from oracles import make_instance


def codes(inst, **kw):
    return {e.code for e in validate_instance(inst, **kw)}


def test_zero_capacity_rejected():
    inst = Instance([Advertiser("a", 0)], [])
    assert "zero-capacity" in codes(inst)


def test_empty_instance_is_valid():
    assert validate_instance(Instance([Advertiser("a", 1)], [])) == []
    assert validate_instance(Instance()) == []


def test_negative_weight_rejected():
    inst = make_instance({"a": 1}, [({"a": -1.0}, 0.0)])
    assert codes(inst) == {"negative-weight"}


@pytest.mark.parametrize("bad", [math.nan, math.inf])
def test_non_finite_weight_rejected(bad):
    inst = make_instance({"a": 1}, [({"a": bad}, 0.0)])
    assert codes(inst) == {"non-finite-weight"}


def test_duplicate_and_unknown_ids():
    inst = Instance(
        [Advertiser("a", 1), Advertiser("a", 2)],
        [(Impression("i", {"b": 1.0}, 0.0),), (Impression("i", {}, 0.0),)],
    )
    assert codes(inst) == {"duplicate-id", "unknown-advertiser-reference"}


def test_exchange_weight_required_in_known_mode():
    inst = Instance([Advertiser("a", 1)], [(Impression("i1", {"a": 1.0}, 0.5),), (Impression("i2", {"a": 1.0}),)])
    assert codes(inst) == {"missing-exchange-weight"}
    # all missing: unknown-exchange mode
    assert validate_instance(inst.without_exchange()) == []
    assert codes(inst.without_exchange(), unknown_exchange=False) == {"missing-exchange-weight"}


def test_reserved_id():
    assert "reserved-id" in codes(Instance([Advertiser(EXCHANGE, 1)], []))


def test_top_one_of_three():
    inst = make_instance({"a": 1}, [({"a": 1.0}, 0.0), ({"a": 2.0}, 0.0), ({"a": 3.0}, 0.0)])
    rep = revenue_of(inst, Assignment({"i1": "a", "i2": "a", "i3": "a"}))
    assert rep.per_advertiser["a"] == 3.0


def test_example1_all_to_advertiser():
    inst = example1(4, 0.1)
    rep = revenue_of(inst, Assignment({f"i{k}": "a" for k in range(1, 5)}))
    assert rep.total == 4.0


def test_report_decomposition():
    inst = make_instance({"a": 2}, [({"a": 4.0}, 0.0), ({"a": 2.0}, 0.0), ({"a": 0.0}, 0.9)])
    rep = revenue_of(inst, Assignment({"i1": "a", "i2": "a", "i3": EXCHANGE}))
    assert rep.per_advertiser == {"a": 6.0}
    assert rep.exchange == 0.9
    assert rep.total == pytest.approx(6.9, abs=1e-12)


def test_validity_rules():
    inst = make_instance({"a": 2}, [({"a": 1.0}, 1.0), ({"a": 1.0}, 1.0)], batch_sizes=[2])
    assert not is_valid_assignment(inst, Assignment({"i1": "a", "i2": "a"}))
    assert is_valid_assignment(inst, Assignment({"i1": EXCHANGE, "i2": EXCHANGE}))
    assert not is_valid_assignment(inst, Assignment({"i1": EXCHANGE}))
    with pytest.raises(InvalidAssignment):
        revenue_of(inst, Assignment({"i1": "a", "i2": "a"}))


def random_assignment(inst, rng):
    target = {}
    for batch in inst.batches:
        free = [a.id for a in inst.advertisers]
        for imp in batch:
            choice = rng.choice([EXCHANGE, *free])
            if choice != EXCHANGE:
                free.remove(choice)
            target[imp.id] = choice
    return Assignment(target)


@settings(max_examples=200, deadline=None)
@given(instances(max_slot=3, max_impressions=8), st.randoms(use_true_random=False))
def test_revenue_matches_sorting_recomputation(inst, rng):
    asg = random_assignment(inst, rng)
    rep = revenue_of(inst, asg)
    caps = inst.capacities
    imps = inst.impression_map()
    expected = sum(imps[i].exchange_weight for i in asg.assigned_to(EXCHANGE))
    for a in caps:
        expected += sum(sorted((imps[i].weight(a) for i in asg.assigned_to(a)), reverse=True)[: caps[a]])
    assert rep.total == pytest.approx(expected, abs=1e-9)
    assert rep.total == pytest.approx(rep.exchange + sum(rep.per_advertiser.values()), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(instances(max_impressions=8), st.randoms(use_true_random=False))
def test_revenue_monotone_under_extra_assignment(inst, rng):
    """Sending one more impression to an advertiser never lowers any R_a."""
    asg = random_assignment(inst, rng)
    if not inst.advertisers or not asg.target:
        return
    base = revenue_of(inst, asg)
    a = rng.choice(inst.advertiser_ids)
    # Append a fresh single-impression batch assigned to ``a``.
    extra = Impression("extra", {a: float(rng.randint(0, 10))}, 0.0)
    bigger = Instance(inst.advertisers, [*inst.batches, (extra,)])
    more = revenue_of(bigger, Assignment({**asg.target, "extra": a}))
    for adv in inst.advertiser_ids:
        assert more.per_advertiser[adv] >= base.per_advertiser[adv]


def test_revenue_invariant_under_permutation_of_equal_weights():
    rows = [({"a": 3.0}, 0.0), ({"a": 3.0}, 0.0), ({"a": 1.0}, 0.0)]
    inst = make_instance({"a": 2}, rows)
    perm = make_instance({"a": 2}, [rows[2], rows[0], rows[1]])
    asg = Assignment({"i1": "a", "i2": "a", "i3": "a"})
    assert revenue_of(inst, asg) == revenue_of(perm, asg)


def test_missing_weight_is_zero():
    inst = make_instance({"a": 1, "b": 1}, [({"a": 5.0}, 0.0)])
    rep = revenue_of(inst, Assignment({"i1": "b"}))
    assert rep.per_advertiser == {"a": 0.0, "b": 0.0}
