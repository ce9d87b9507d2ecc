"""Offload-size and CPU-share allocation against brute-force oracles."""

import math

import numpy as np
import pytest

from irsmec import ScenarioConfig, allocate, latency
from irsmec.compute_alloc import (balanced_offload, min_edge_cpu,
                                  min_edge_cpu_conic, optimal_offload)

from conftest import tiny_cfg


def brute_force_offload(rate_k, f_e_k, cfg, k):
    objs = [latency(e, f_e_k, rate_k, cfg, k)[2]
            for e in range(cfg.data_size_bits[k] + 1)]
    return int(np.argmin(objs))


class TestOptimalOffload:
    def test_large_edge_cpu_limit(self):
        # f^e -> inf: continuous optimum tends to L*cR/(f^l + cR) = 50
        cfg = tiny_cfg(data_size_bits=(100,), complexity=(1.0,),
                       local_cpu=(1.0,))
        cont = balanced_offload(1.0, 1e12, cfg, 0)
        assert cont == pytest.approx(50.0, rel=1e-9)

    def test_unit_instance(self):
        # L=100, c=1, R=1, f^l=1, f^e=1: continuous 100/3, brute force -> 33
        cfg = tiny_cfg(data_size_bits=(100,), complexity=(1.0,),
                       local_cpu=(1.0,))
        assert optimal_offload(1.0, 1.0, cfg, 0) == 33
        assert optimal_offload(1.0, 1.0, cfg, 0) == brute_force_offload(1.0, 1.0, cfg, 0)

    def test_zero_data(self):
        cfg = tiny_cfg(data_size_bits=(0,))
        assert optimal_offload(1e6, 1e9, cfg, 0) == 0

    def test_zero_rate_forces_local(self):
        cfg = tiny_cfg()
        assert optimal_offload(0.0, 1e9, cfg, 0) == 0
        assert optimal_offload(1e6, 0.0, cfg, 0) == 0

    def test_brute_force_agreement(self, rng):
        # 200 random small instances; zero mismatches allowed
        for _ in range(200):
            cfg = tiny_cfg(data_size_bits=(int(rng.integers(1, 501)),),
                           complexity=(float(rng.uniform(0.5, 5.0)),),
                           local_cpu=(float(rng.uniform(0.5, 20.0)),))
            rate_k = float(rng.uniform(0.1, 50.0))
            f_e = float(rng.uniform(0.1, 50.0))
            assert optimal_offload(rate_k, f_e, cfg, 0) == \
                brute_force_offload(rate_k, f_e, cfg, 0)


def bisect_min_edge_cpu(t, rate_k, cfg, k, iters=200):
    """1-D bisection oracle on the smallest feasible CPU share."""
    def feasible(f_e):
        ell = balanced_offload(rate_k, f_e, cfg, k)
        lo_e, hi_e = int(math.floor(ell)), int(math.ceil(ell))
        return any(latency(e, f_e, rate_k, cfg, k)[2] <= t * (1 + 1e-12)
                   for e in {max(lo_e, 0), min(hi_e, cfg.data_size_bits[k])})
    hi = 1e16
    if not feasible(hi):
        return None
    lo = 0.0
    if feasible(lo):
        return 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


class TestMinEdgeCpu:
    def test_all_local_boundary(self):
        cfg = tiny_cfg()
        t_local = 250_000 * 700 / 4e8
        assert min_edge_cpu(t_local, 1e6, cfg, 0) == 0.0

    def test_below_floor_infeasible(self):
        cfg = tiny_cfg()
        L, c, f_l, R = 250_000, 700.0, 4e8, 1e6
        floor_t = L * c / (f_l + c * R)
        assert min_edge_cpu(0.99 * floor_t, R, cfg, 0) is None

    def test_closed_form_matches_continuous_balance(self):
        # at the returned share, the continuous balance point hits t exactly
        cfg = tiny_cfg()
        R = 1e6
        t = 0.3
        f_e = min_edge_cpu(t, R, cfg, 0)
        ell = balanced_offload(R, f_e, cfg, 0)
        assert (cfg.data_size_bits[0] - ell) * cfg.complexity[0] / cfg.local_cpu[0] \
            == pytest.approx(t, rel=1e-9)

    def test_conic_cross_check(self):
        cfg = tiny_cfg()
        for t in (0.25, 0.3, 0.4):
            a = min_edge_cpu(t, 1e6, cfg, 0)
            b = min_edge_cpu_conic(t, 1e6, cfg, 0)
            assert b == pytest.approx(a, rel=1e-6)

    def test_bisection_oracle_agreement(self, rng):
        cfg = tiny_cfg()
        R = 1e6
        t_local = 250_000 * 700 / 4e8
        floor_t = 250_000 * 700 / (4e8 + 700 * R)
        for t in np.linspace(floor_t * 1.05, t_local * 0.95, 12):
            closed = min_edge_cpu(float(t), R, cfg, 0)
            oracle = bisect_min_edge_cpu(float(t), R, cfg, 0)
            assert oracle is not None
            # integer rounding in the oracle makes it slightly optimistic
            assert closed == pytest.approx(oracle, rel=1e-3)


def grid_search_objective(rates, cfg, points=10_000):
    """2-D oracle: exhaustive split of f_total between two WDs."""
    best = math.inf
    for frac in np.linspace(0.0, 1.0, points + 1):
        f1 = frac * cfg.edge_total_cpu
        f2 = cfg.edge_total_cpu - f1
        worst = 0.0
        for k, f_e in enumerate((f1, f2)):
            ell = optimal_offload(rates[k], f_e, cfg, k)
            worst = max(worst, latency(ell, f_e, rates[k], cfg, k)[2])
        best = min(best, worst)
    return best


class TestAllocate:
    def test_symmetric_wds_equal_split(self):
        cfg = ScenarioConfig(data_size_bits=(300_000, 300_000),
                             complexity=(750.0, 750.0), local_cpu=(5e8, 5e8))
        plan = allocate([1e6, 1e6], cfg)
        assert plan.f_edge[0] == pytest.approx(plan.f_edge[1], rel=1e-3)
        assert plan.ell[0] == pytest.approx(plan.ell[1], abs=1)

    def test_zero_rate_forced_local(self):
        cfg = ScenarioConfig()
        plan = allocate([0.0, 1e6], cfg)
        assert plan.ell[0] == 0 and plan.f_edge[0] == 0.0
        assert plan.ell[1] > 0

    def test_capacity_respected(self):
        cfg = ScenarioConfig()
        plan = allocate([5e5, 2e6], cfg)
        assert sum(plan.f_edge) <= cfg.edge_total_cpu * (1 + 1e-9)
        for k in range(2):
            assert 0 <= plan.ell[k] <= cfg.data_size_bits[k]

    def test_grid_oracle(self, rng):
        # 20 random-rate instances vs the 10^4-point f^e grid
        cfg = ScenarioConfig()
        for _ in range(20):
            rates = [float(rng.uniform(2e5, 5e6)) for _ in range(2)]
            plan = allocate(rates, cfg)
            oracle = grid_search_objective(rates, cfg)
            assert plan.objective_s <= oracle * (1 + 1e-3)

    def test_monotone_in_edge_cpu(self):
        rates = [8e5, 1.2e6]
        objs = [allocate(rates, ScenarioConfig(edge_total_cpu=f)).objective_s
                for f in (5e9, 10e9, 20e9, 40e9)]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(objs, objs[1:]))

    def test_monotone_in_rate(self):
        cfg = ScenarioConfig()
        objs = [allocate([r, r], cfg).objective_s
                for r in (2e5, 5e5, 1e6, 3e6)]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(objs, objs[1:]))

    def test_balance_at_returned_plan(self):
        # offloading WDs sit within one-bit granularity of the balance point
        cfg = ScenarioConfig()
        plan = allocate([1e6, 1.5e6], cfg)
        for k in range(2):
            if plan.ell[k] == 0:
                continue
            local, edge, _ = latency(plan.ell[k], plan.f_edge[k], 1e6 if k == 0 else 1.5e6, cfg, k)
            step = cfg.complexity[k] / cfg.local_cpu[k] + \
                1 / (1e6 if k == 0 else 1.5e6) + cfg.complexity[k] / plan.f_edge[k]
            assert abs(local - edge) <= step * (1 + 1e-9)
