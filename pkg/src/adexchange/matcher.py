"""Maximum-value valid assignment of one batch (the per-batch step of the multi-slot algorithm).

Rows are the batch's impressions. Columns are the contracted advertisers plus one
exchange copy per row, so the exchange can absorb the whole batch. An impression placed
on advertiser ``a`` is worth ``c_a (w_{i,a} - beta_a)``; on the exchange it is worth
``w_{i,alpha}``.

Ties between optimal assignments are broken lexicographically: impressions in batch
order, each preferring targets in ``preference_order``. For batches with more than one
impression objectives within ``TIE_TOL`` count as equal, since the matching solver and
the enumeration sum in different orders. A single impression has no summation error and
is compared exactly, which is the plain argmax used for one-slot pages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .model import EXCHANGE, Impression, preference_order

TIE_TOL = 1e-9
EXHAUSTIVE_LIMIT = 8


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class MatchResult:
    targets: Dict[str, str]
    objective: float
    values: Dict[str, Dict[str, float]]


def preferred_argmax(values: Sequence[float]) -> int:
    """Index of the first maximal entry (exact comparison)."""
    best = 0
    for k in range(1, len(values)):
        if values[k] > values[best]:
            best = k
    return best


def value_table(batch: Sequence[Impression], ledger) -> Tuple[List[str], List[List[float]]]:
    """Targets in preference order and the row-by-target value table."""
    targets = preference_order(ledger.capacities)
    table = []
    for imp in batch:
        row = [imp.weight(EXCHANGE)]
        for a in targets[1:]:
            row.append(ledger.c[a] * (imp.weight(a) - ledger.beta[a]))
        table.append(row)
    return targets, table


def hungarian(cost: Sequence[Sequence[float]]) -> List[int]:
    """Minimum-cost assignment of every row to a distinct column (rows <= columns).

    Shortest augmenting paths with vertex potentials; returns the column of each row.
    """
    n = len(cost)
    if n == 0:
        return []
    m = len(cost[0])
    if m < n:
        raise ValueError("need at least as many columns as rows")
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    owner = [0] * (m + 1)  # owner[j]: 1-based row matched to column j, 0 if free
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = owner[j0]
            delta = inf
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, m + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    col_of = [0] * n
    for j in range(1, m + 1):
        if owner[j]:
            col_of[owner[j] - 1] = j - 1
    return col_of


def _best_completion(table, rows, free_advertisers) -> Tuple[float, Dict[int, int]]:
    """Optimal placement of ``rows`` using ``free_advertisers`` (target indices) and the exchange."""
    if not rows:
        return 0.0, {}
    cols = list(free_advertisers) + [0] * len(rows)
    cost = [[-table[r][t] for t in cols] for r in rows]
    picked = hungarian(cost)
    choice = {r: cols[j] for r, j in zip(rows, picked)}
    return math.fsum(table[r][t] for r, t in choice.items()), choice


def _result(batch, targets, table, choice) -> MatchResult:
    return MatchResult(
        targets={imp.id: targets[choice[r]] for r, imp in enumerate(batch)},
        objective=math.fsum(table[r][choice[r]] for r in range(len(batch))),
        values={imp.id: dict(zip(targets, table[r])) for r, imp in enumerate(batch)},
    )


def best_valid_assignment(batch: Sequence[Impression], ledger, tol: float = TIE_TOL) -> MatchResult:
    batch = list(batch)
    targets, table = value_table(batch, ledger)
    if len(batch) <= 1:
        choice = {0: preferred_argmax(table[0])} if batch else {}
        return _result(batch, targets, table, choice)

    n_rows = len(batch)
    best, _ = _best_completion(table, list(range(n_rows)), range(1, len(targets)))
    fixed: Dict[int, int] = {}
    fixed_values: List[float] = []
    free = list(range(1, len(targets)))
    for r in range(n_rows):
        rest = list(range(r + 1, n_rows))
        for t in range(len(targets)):
            if t and t not in free:
                continue
            residual_free = [a for a in free if a != t]
            tail, _ = _best_completion(table, rest, residual_free)
            if math.fsum([*fixed_values, table[r][t], tail]) >= best - tol:
                fixed[r] = t
                fixed_values.append(table[r][t])
                if t:
                    free.remove(t)
                break
        else:  # pragma: no cover - the optimum's own prefix is always admissible
            raise RuntimeError("tie-break search lost the optimum")
    return _result(batch, targets, table, fixed)


def exhaustive_valid_assignment(batch: Sequence[Impression], ledger, tol: float = TIE_TOL) -> MatchResult:
    """Enumerate every valid assignment; same objective and tie-break as the matcher."""
    batch = list(batch)
    if len(batch) > EXHAUSTIVE_LIMIT or len(ledger.capacities) > EXHAUSTIVE_LIMIT:
        raise SizeLimitError(f"exhaustive search limited to {EXHAUSTIVE_LIMIT} impressions and advertisers")
    targets, table = value_table(batch, ledger)
    if not batch:
        return _result(batch, targets, table, {})
    if len(batch) == 1:
        tol = 0.0

    n_targets = len(targets)
    leaves: List[Tuple[float, Tuple[int, ...]]] = []

    def walk(r, used, picked):
        if r == len(batch):
            leaves.append((math.fsum(table[k][t] for k, t in enumerate(picked)), tuple(picked)))
            return
        for t in range(n_targets):
            if t and t in used:
                continue
            picked.append(t)
            walk(r + 1, used | {t} if t else used, picked)
            picked.pop()

    walk(0, frozenset(), [])
    best = max(obj for obj, _ in leaves)
    for obj, picked in leaves:
        if obj >= best - tol:
            return _result(batch, targets, table, dict(enumerate(picked)))
    raise AssertionError("unreachable")
