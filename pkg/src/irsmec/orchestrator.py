"""Inner alternation (detectors <-> phases) and the outer BCD loop.

The outer loop alternates the computing block (offload split + CPU shares)
with the communication block (detectors + phases); each communication step
itself alternates a bisection-optimal detector update with one of the two
reflect updates. Latency is tracked with two meanings, overall and edge-only,
recorded as separate trace columns so the descent argument stays checkable.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import compute_alloc, mud, reflect
from .channel import PhaseVector
from .config import edge_latency, overall_latency, rates_for

log = logging.getLogger(__name__)

SCHEMES = ("sdr", "sca", "none")
ABS_CHANGE_FLOOR_S = 1e-9


@dataclass
class RunTrace:
    """Per-iteration record of both latency meanings and iteration counters."""

    scheme: str
    rows: list = field(default_factory=list)

    def add(self, outer, t_step2, t_step3, eps, wall_ms, inner_iters, objective):
        self.rows.append({"l4": outer, "t_step2": t_step2, "t_step3": t_step3,
                          "eps4": eps, "scheme": self.scheme, "wall_ms": wall_ms,
                          "inner_iters": inner_iters, "objective": objective})

    @property
    def outer_iterations(self):
        return len(self.rows)

    def to_csv(self, path):
        fields = ["l4", "t_step2", "t_step3", "eps4", "scheme", "wall_ms", "inner_iters", "objective"]
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(self.rows)


@dataclass
class InnerResult:
    t: float
    detectors: mud.MudMatrix
    theta: PhaseVector
    t_sequence: list
    sca_steps: list  # (z_star, edge latency before, after) per accepted step


def inner_alternate(channels, plan, cfg, scheme, theta_init, rng=None):
    """Alternate the detector bisection with the chosen reflect update.

    The detector step runs first: it is feasible under any phase setting,
    the reverse is not guaranteed. Reflect failures degrade to keeping the
    current phases; the run continues.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    theta = theta_init
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    active = any(e > 0 for e in plan.ell)
    if not active:
        detectors = mud.MudMatrix.mrc(channels, theta)
        return InnerResult(0.0, detectors, theta, [0.0], [])

    reflect_enabled = scheme != "none" and channels.num_elements > 0
    t_seq, sca_steps = [], []
    t_prev = math.inf
    detectors = mud.MudMatrix.mrc(channels, theta)
    for _ in range(cfg.max_inner_iters):
        _, candidates = mud.optimize_mud(channels, theta, plan, cfg)
        t_w = edge_latency(channels, theta, candidates.detectors, plan, cfg)
        # bisection tolerance must not produce an uptick over the incumbent
        if t_w <= t_prev:
            detectors = candidates
        else:
            t_w = t_prev
        t_seq.append(t_w)
        if not reflect_enabled:
            t_prev = t_w
            break
        if scheme == "sdr":
            t_v, theta, _ = reflect.optimize_reflect_sdr(
                channels, detectors, plan, cfg, theta, rng)
        else:
            forms = reflect.build_forms(channels, detectors, cfg)
            before = reflect.edge_latency_forms(theta.coefficients, forms, plan, cfg)
            theta, z_star, accepted = reflect.sca_step(theta, forms, plan, cfg, t_w)
            t_v = reflect.edge_latency_forms(theta.coefficients, forms, plan, cfg)
            if accepted:
                sca_steps.append((z_star, before, t_v))
        t_seq.append(t_v)
        if math.isfinite(t_prev) and abs(t_prev - t_v) <= cfg.eps_reflect * max(t_v, 1e-12):
            t_prev = t_v
            break
        t_prev = t_v
    return InnerResult(t_prev, detectors, theta, t_seq, sca_steps)


@dataclass
class BcdResult:
    plan: compute_alloc.ComputePlan
    detectors: mud.MudMatrix
    theta: PhaseVector
    trace: RunTrace
    objective_s: float
    converged: bool


def run_bcd(channels, cfg, scheme="sca", theta_init=None, collect_inner=None,
            restarts=1):
    """Full block-coordinate descent; deterministic given (channels, cfg).

    Initialization: uniform random phases (the random-phase baseline point)
    and normalized MRC detectors, both feasible. Stops on relative objective
    change below the outer threshold or at the iteration cap. The phase
    landscape has many local optima, so ``restarts`` independent random
    initializations are run and the best result returned; an explicit
    ``theta_init`` forces a single run.
    """
    if restarts > 1 and theta_init is None:
        best = None
        for r in range(restarts):
            rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(99, r)))
            theta0 = PhaseVector.random(channels.num_elements, rng)
            result = run_bcd(channels, cfg, scheme, theta0, collect_inner)
            if best is None or result.objective_s < best.objective_s:
                best = result
        return best

    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(99,)))
    theta = theta_init if theta_init is not None else \
        PhaseVector.random(channels.num_elements, rng)
    detectors = mud.MudMatrix.mrc(channels, theta)
    trace = RunTrace(scheme)
    plan = None
    obj_prev = math.inf
    converged = False

    for outer in range(1, cfg.max_outer_iters + 1):
        start = time.perf_counter()
        rates = rates_for(channels, theta, detectors.detectors, cfg)
        plan = compute_alloc.allocate(rates, cfg)
        t_step2 = plan.objective_s

        inner = inner_alternate(channels, plan, cfg, scheme, theta, rng)
        detectors, theta = inner.detectors, inner.theta
        if collect_inner is not None:
            collect_inner.append(inner)
        t_step3 = inner.t

        obj = overall_latency(channels, theta, detectors.detectors, plan, cfg)
        if math.isfinite(obj_prev):
            change = abs(obj - obj_prev)
            eps = change / obj if obj > ABS_CHANGE_FLOOR_S else change
        else:
            eps = math.inf
        wall_ms = (time.perf_counter() - start) * 1e3
        trace.add(outer, t_step2, t_step3, eps, wall_ms, len(inner.t_sequence), obj)
        if eps <= cfg.eps_outer:
            converged = True
            obj_prev = obj
            break
        obj_prev = obj

    return BcdResult(plan, detectors, theta, trace, obj_prev, converged)


def check_solution(result, cfg):
    """Exact feasibility of the returned point (norm checks modulo feas_tol)."""
    plan = result.plan
    assert sum(plan.f_edge) <= cfg.edge_total_cpu * (1 + 1e-9)
    for k in range(cfg.num_wds):
        assert 0 <= plan.ell[k] <= cfg.data_size_bits[k]
        assert plan.ell[k] == int(plan.ell[k])
        assert np.linalg.norm(result.detectors[k]) <= 1 + 10 * cfg.feas_tol
    assert np.allclose(np.abs(result.theta.coefficients), 1.0)
    return True
