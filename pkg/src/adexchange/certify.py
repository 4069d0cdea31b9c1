"""Executable competitive-ratio certificates.

Alongside a finished run, rebuild the dual solutions the competitive analysis
constructs and check every inequality it relies on:

* dual feasibility against the final beta values,
* weak duality ``d_a >= R_a(OPT)``,
* the per-step inequality (per impression for alg2, per batch for alg3/alg4),
* the closing revenue bound.

alg1 gets the combined-LP certificate: ``z_i = max_t (w_{i,t} - beta_t)`` for
every impression, whose objective grows by at most twice the revenue gain each step.
Reserve-price traces are certified like alg3 on the instance whose exchange weights
are the highest bids. Under first price that instance agrees with the realised sale
prices; under second price it does not, and the certificate is expected to fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List

from .algorithms import StepTrace
from .ledger import capacity_weight
from .model import EXCHANGE, Instance, revenue_of
from .offline import Decomposition, opt_single_slot

DEFAULT_TOL = 1e-9
MAX_LISTED = 50


class TraceMismatch(ValueError):
    pass


@dataclass
class StepDelta:
    batch: int
    delta_revenue: float
    delta_d: Dict[str, float]
    delta_d_alpha: float


@dataclass
class CertReport:
    algorithm: str
    tolerance: float
    revenue: float = 0.0
    opt_revenue: float = 0.0
    bound: float = 0.0
    d: Dict[str, float] = field(default_factory=dict)
    opt_by_target: Dict[str, float] = field(default_factory=dict)
    checks: Dict[str, int] = field(default_factory=dict)
    violations: Dict[str, int] = field(default_factory=dict)
    examples: List[str] = field(default_factory=list)
    deltas: List[StepDelta] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = ""):
        self.checks[name] = self.checks.get(name, 0) + 1
        self.violations.setdefault(name, 0)
        if not ok:
            self.violations[name] += 1
            if len(self.examples) < MAX_LISTED:
                self.examples.append(f"{name}: {detail}")

    @property
    def passed(self) -> bool:
        return not any(self.violations.values())

    def n_violations(self, name: str) -> int:
        return self.violations.get(name, 0)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "revenue": self.revenue,
            "opt_revenue": self.opt_revenue,
            "bound": self.bound,
            "dual_objective": {("exchange" if k == EXCHANGE else k): v for k, v in self.d.items()},
            "opt_revenue_by_target": {("exchange" if k == EXCHANGE else k): v for k, v in self.opt_by_target.items()},
            "checks": {k: {"evaluated": n, "violations": self.violations[k]} for k, n in self.checks.items()},
            "violation_examples": self.examples,
        }


def _ge(lhs, rhs, tol):
    return lhs >= rhs - tol


def _check_trace(inst: Instance, trace: StepTrace):
    if len(trace.steps) != len(inst.batches):
        raise TraceMismatch("trace and instance disagree on the number of batches")
    for step, batch in zip(trace.steps, inst.batches):
        if [d.impression for d in step.decisions] != [imp.id for imp in batch]:
            raise TraceMismatch(f"batch {step.index}: impression order differs from the instance")


def _common_checks(rep: CertReport, inst: Instance, trace: StepTrace, tol: float):
    """beta monotonicity and the revenue identity sum of deltas == R(A)."""
    advertisers = inst.advertiser_ids
    for step in trace.steps:
        for a in advertisers:
            rep.check("beta_monotone", _ge(step.beta_after[a], step.beta_before[a], 0.0),
                      f"batch {step.index} advertiser {a}")
    final = revenue_of(inst, trace.assignment()).total
    summed = math.fsum(d.delta_revenue for d in trace.decisions())
    rep.check("revenue_identity", abs(final - summed) <= tol, f"sum of deltas {summed} vs revenue {final}")
    rep.revenue = final


def certify(inst: Instance, algorithm: str, trace: StepTrace, decomposition: Decomposition,
            tol: float = DEFAULT_TOL) -> CertReport:
    """Build the proof's dual solution for ``trace`` and evaluate all its inequalities.

    ``inst`` must be the instance the trace was produced on (unit copies for alg1/alg2,
    the max-bid instance for reserve runs) and ``decomposition`` an optimum on it.
    """
    _check_trace(inst, trace)
    if set(decomposition.assignment.target) != {imp.id for imp in inst.impressions()}:
        raise TraceMismatch("decomposition does not cover the instance's impressions")
    kind = "alg3" if algorithm == "reserve" else algorithm
    rep = CertReport(algorithm=algorithm, tolerance=tol)
    rep.opt_revenue = decomposition.total
    rep.opt_by_target = dict(decomposition.revenue)
    _common_checks(rep, inst, trace, tol)
    if kind == "alg1":
        _certify_alg1(rep, inst, trace, decomposition, tol)
    elif kind == "alg2":
        _certify_alg2(rep, inst, trace, decomposition, tol)
    elif kind in ("alg3", "alg4"):
        _certify_weighted(rep, inst, trace, decomposition, tol)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return rep


def _certify_alg1(rep, inst, trace, dec, tol):
    advertisers = inst.advertiser_ids
    dual = 0.0
    z: Dict[str, float] = {}
    r_alpha = r_adv = 0.0
    for step in trace.steps:
        for imp, dec_ in zip(inst.batches[step.index], step.decisions):
            z_i = max([imp.weight(EXCHANGE)] + [imp.weight(a) - step.beta_before[a] for a in advertisers])
            z[imp.id] = z_i
            d_dual = z_i + math.fsum(step.beta_after[a] - step.beta_before[a] for a in advertisers)
            if dec_.target == EXCHANGE:
                allowed = dec_.delta_revenue
                r_alpha += dec_.delta_revenue
            else:
                allowed = 2.0 * dec_.delta_revenue
                r_adv += dec_.delta_revenue
            rep.check("per_step", d_dual <= allowed + tol,
                      f"impression {imp.id}: dual grew {d_dual}, allowed {allowed}")
            rep.deltas.append(StepDelta(step.index, dec_.delta_revenue, {"dual": d_dual}, 0.0))
            dual += d_dual
    beta = trace.steps[-1].beta_after if trace.steps else {a: 0.0 for a in advertisers}
    for imp in inst.impressions():
        rep.check("dual_feasibility", _ge(z[imp.id], imp.weight(EXCHANGE), tol), f"z[{imp.id}] < w_alpha")
        rep.check("dual_feasibility", z[imp.id] >= -tol, f"z[{imp.id}] negative")
        for a in advertisers:
            rep.check("dual_feasibility", _ge(z[imp.id] + beta[a], imp.weight(a), tol), f"impression {imp.id} advertiser {a}")
    dual_obj = math.fsum(z.values()) + math.fsum(beta.values())
    rep.d = {"combined": dual_obj}
    rep.check("weak_duality", _ge(dual_obj, dec.total, tol), f"dual {dual_obj} < R(OPT) {dec.total}")
    rep.bound = dec.total
    rep.check("final_bound", check_prop1_values(dec.total, r_alpha, r_adv, tol),
              f"R(OPT) {dec.total} > R_alpha {r_alpha} + 2 R_A {r_adv}")


def _certify_alg2(rep, inst, trace, dec, tol):
    advertisers = inst.advertiser_ids
    if any(n != 1 for n in inst.capacities.values()):
        raise TraceMismatch("alg2 certificates need the unit-capacity instance")
    in_adv = {i for a in advertisers for i in dec.members[a]}
    in_alpha = set(dec.members[EXCHANGE])
    z: Dict[str, float] = {}
    d_adv_total = 0.0
    for step in trace.steps:
        for imp, d_ in zip(inst.batches[step.index], step.decisions):
            d_beta = math.fsum(step.beta_after[a] - step.beta_before[a] for a in advertisers)
            d_adv = d_beta
            if imp.id in in_adv:
                z[imp.id] = max(imp.weight(a) - step.beta_before[a] for a in advertisers)
                d_adv += z[imp.id]
            d_alpha = imp.weight(EXCHANGE) if imp.id in in_alpha else 0.0
            d_adv_total += d_adv
            rep.deltas.append(StepDelta(step.index, d_.delta_revenue, {"A": d_adv}, d_alpha))
            rep.check("per_step", _ge(d_.delta_revenue, d_alpha + 0.5 * d_adv, tol),
                      f"impression {imp.id}: dR {d_.delta_revenue} < {d_alpha} + {d_adv}/2")
    beta = trace.steps[-1].beta_after if trace.steps else {a: 0.0 for a in advertisers}
    imps = inst.impression_map()
    for i, z_i in z.items():
        for a in advertisers:
            rep.check("dual_feasibility", _ge(z_i + beta[a], imps[i].weight(a), tol), f"impression {i} advertiser {a}")
    d_A = math.fsum(z.values()) + math.fsum(beta.values())
    rep.d = {"A": d_A, EXCHANGE: dec.exchange}
    rep.check("delta_sum", abs(d_A - d_adv_total) <= tol, f"sum of deltas {d_adv_total} vs d_A {d_A}")
    rep.check("weak_duality", _ge(d_A, dec.advertisers_total, tol), f"d_A {d_A} < R_A(OPT) {dec.advertisers_total}")
    rep.bound = dec.exchange + 0.5 * dec.advertisers_total
    rep.check("final_bound", _ge(rep.revenue, rep.bound, tol), f"R(A) {rep.revenue} < {rep.bound}")


def _certify_weighted(rep, inst, trace, dec, tol):
    caps = inst.capacities
    c = {a: capacity_weight(n).c for a, n in caps.items()}
    opt_target = dec.assignment.target
    z: Dict[str, float] = {}
    d_sum = {a: 0.0 for a in caps}
    for step in trace.steps:
        batch = inst.batches[step.index]
        delta = {a: caps[a] * (step.beta_after[a] - step.beta_before[a]) for a in caps}
        d_alpha = 0.0
        for imp in batch:
            a = opt_target[imp.id]
            if a == EXCHANGE:
                d_alpha += imp.weight(EXCHANGE)
            else:
                z[imp.id] = imp.weight(a) - step.beta_before[a]
                delta[a] += z[imp.id]
        d_R = math.fsum(d.delta_revenue for d in step.decisions)
        weighted = math.fsum([d_alpha, *(c[a] * delta[a] for a in caps)])
        rep.check("per_step", _ge(d_R, weighted, tol), f"batch {step.index}: dR {d_R} < {weighted}")
        rep.deltas.append(StepDelta(step.index, d_R, delta, d_alpha))
        for a in caps:
            d_sum[a] += delta[a]
    beta = trace.steps[-1].beta_after if trace.steps else {a: 0.0 for a in caps}
    imps = inst.impression_map()
    for i, z_i in z.items():
        a = opt_target[i]
        rep.check("dual_feasibility", _ge(z_i + beta[a], imps[i].weight(a), tol), f"impression {i} advertiser {a}")
    d = {a: math.fsum(z[i] for i in dec.members[a]) + caps[a] * beta[a] for a in caps}
    for a in caps:
        rep.check("delta_sum", abs(d_sum[a] - d[a]) <= tol, f"advertiser {a}: {d_sum[a]} vs {d[a]}")
        rep.check("weak_duality", _ge(d[a], dec.revenue[a], tol), f"advertiser {a}: d_a {d[a]} < R_a(OPT) {dec.revenue[a]}")
    d[EXCHANGE] = dec.exchange
    rep.d = d
    rep.bound = math.fsum([dec.exchange, *(c[a] * dec.revenue[a] for a in caps)])
    rep.check("final_bound", _ge(rep.revenue, rep.bound, tol), f"R(A) {rep.revenue} < {rep.bound}")


def check_prop1_values(r_opt: float, r_alpha: float, r_adv: float, tol: float = DEFAULT_TOL) -> bool:
    return r_opt <= r_alpha + 2.0 * r_adv + tol


def check_prop1(inst: Instance, alg1_result, tol: float = DEFAULT_TOL) -> bool:
    """R(OPT) <= R_alpha(A) + 2 R_A(A) for an alg1 run.

    ``alg1_result`` is a ``RunResult`` or an ``(assignment, trace)`` pair on ``inst``.
    """
    if hasattr(alg1_result, "run_instance"):
        inst, asg = alg1_result.run_instance, alg1_result.run_assignment
    else:
        asg = alg1_result[0]
    rep = revenue_of(inst, asg)
    _, opt = opt_single_slot(inst)
    return check_prop1_values(opt.total, rep.exchange, rep.advertisers_total, tol)
