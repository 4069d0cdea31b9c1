import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adexchange.ledger import Ledger, beta_of, capacity_weight, check_beta_update_bound, e_n
from adexchange.model import EXCHANGE
from oracles import eq1_beta


def test_beta_empty():
    assert beta_of([], 1) == 0.0
    assert beta_of([], 7) == 0.0


@pytest.mark.parametrize("w", [0.0, 1.0, 3.5, 10.0])
def test_beta_single_unit(w):
    assert beta_of([w], 1) == w


def test_beta_two():
    assert beta_of([4.0, 2.0], 2) == pytest.approx(2.8, abs=1e-12)


def test_assign_with_room():
    led = Ledger({"a": 2})
    led.assign_to("a", 4.0)
    assert led.beta["a"] == pytest.approx(1.6, abs=1e-12)
    ins = led.assign_to("a", 2.0)
    assert ins.dropped == 0.0 and ins.delta_revenue == 2.0
    assert ins.beta_old == pytest.approx(1.6, abs=1e-12)
    assert ins.beta_new == pytest.approx(2.8, abs=1e-12)


def test_assign_replaces_minimum():
    led = Ledger({"a": 1})
    led.assign_to("a", 2.0)
    ins = led.assign_to("a", 4.0)
    assert (ins.dropped, ins.delta_revenue, ins.beta_old, ins.beta_new) == (2.0, 2.0, 2.0, 4.0)


def test_assign_disposes_smaller_new_weight():
    led = Ledger({"a": 1})
    led.assign_to("a", 4.0)
    ins = led.assign_to("a", 2.0)
    assert (ins.dropped, ins.delta_revenue, ins.beta_new) == (2.0, 0.0, 4.0)
    assert led.kept["a"] == [4.0]


def test_unknown_advertiser():
    with pytest.raises(KeyError):
        Ledger({"a": 1}).assign_to("b", 1.0)


def test_bound_examples():
    assert check_beta_update_bound(1.6, 2.8, 0.0, 2.0, 2)
    assert check_beta_update_bound(2.0, 4.0, 2.0, 4.0, 1)
    # no-op insertion at full capacity: needs beta_old >= w
    assert check_beta_update_bound(4.0, 4.0, 2.0, 2.0, 1)
    assert not check_beta_update_bound(0.0, 5.0, 0.0, 1.0, 1)


def test_capacity_weights():
    assert capacity_weight(1).c == 0.5
    assert capacity_weight(EXCHANGE).c == 1.0
    assert capacity_weight(2).c == pytest.approx(5 / 9, abs=1e-15)
    assert capacity_weight(10**6).c == pytest.approx(1 - 1 / math.e, abs=1e-6)


def test_capacity_weight_range_and_monotone():
    cs = [capacity_weight(n).c for n in range(1, 200)]
    assert all(0.5 <= c < 1 - 1 / math.e for c in cs)
    assert all(x < y for x, y in zip(cs, cs[1:]))


def test_e_n_against_pow():
    for n in (1, 2, 3, 10, 1000):
        assert e_n(n) == pytest.approx((1 + 1 / n) ** n, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10), st.lists(st.integers(0, 20).map(float), max_size=30))
def test_ledger_invariants(n, seq):
    led = Ledger({"a": n})
    history = []
    for w in seq:
        ins = led.assign_to("a", w)
        history.append(w)
        assert len(led.kept["a"]) <= n
        assert led.kept["a"] == sorted(history, reverse=True)[:n]
        assert led.beta["a"] == pytest.approx(eq1_beta(history, n), abs=1e-9)
        assert led.beta["a"] == pytest.approx(beta_of(led.kept["a"], n), abs=1e-9)
        assert ins.beta_new >= ins.beta_old
        assert check_beta_update_bound(ins.beta_old, ins.beta_new, ins.dropped, w, n)
        assert led.revenue("a") == sum(sorted(history, reverse=True)[:n])


def test_incremental_update_cross_check():
    """Full recomputation agrees with the incremental identity when nothing is dropped early."""
    n = 3
    led = Ledger({"a": n})
    for w in (9.0, 5.0, 4.0):
        led.assign_to("a", w)
    old = led.beta["a"]
    ins = led.assign_to("a", 10.0)
    # new weight enters on top: beta_new = w/(n(e-1)) + (1+1/n) beta_old - v e/(n(e-1))
    e = e_n(n)
    incremental = 10.0 / (n * (e - 1)) + (1 + 1 / n) * old - ins.dropped * e / (n * (e - 1))
    assert ins.beta_new == pytest.approx(incremental, abs=1e-9)
