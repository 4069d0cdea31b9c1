import pytest
from hypothesis import strategies as st

from oracles import make_instance

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


weights = st.integers(min_value=0, max_value=10).map(float)


@st.composite
def instances(draw, max_advertisers=3, max_capacity=3, max_impressions=6, max_slot=1):
    n_adv = draw(st.integers(0, max_advertisers))
    caps = {f"a{k + 1}": draw(st.integers(1, max_capacity)) for k in range(n_adv)}
    sizes = []
    for s in draw(st.lists(st.integers(1, max_slot), max_size=max_impressions)):
        if sum(sizes) + s > max_impressions:
            break
        sizes.append(s)
    total = sum(sizes)
    rows = []
    for _ in range(total):
        w = {a: draw(weights) for a in caps}
        rows.append((w, draw(weights)))
    return make_instance(caps, rows, sizes)
