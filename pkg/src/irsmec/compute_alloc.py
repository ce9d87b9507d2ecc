"""Joint offload-size and edge-CPU allocation under fixed rates.

The latency of one WD is piecewise monotone in the offload size: decreasing
until local and edge latencies balance, then increasing. The balance point has
a closed form, which reduces the joint problem to a 1-D bisection over the
latency target with a per-WD minimum-CPU formula inside each probe.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import conic
from .config import latency, latency_report

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComputePlan:
    """Offload sizes (bits, integer), edge CPU shares and achieved objective."""

    ell: tuple
    f_edge: tuple
    objective_s: float
    report: object = None

    def edge_compute_times(self, cfg):
        """t_c,k = ell_k * c_k / f_k^e, zero for WDs that stay local."""
        out = []
        for k in range(len(self.ell)):
            if self.ell[k] == 0:
                out.append(0.0)
            else:
                out.append(self.ell[k] * cfg.complexity[k] / self.f_edge[k])
        return tuple(out)


def balanced_offload(rate_k, f_e_k, cfg, k):
    """Continuous offload size at which local and edge latency are equal."""
    L, c, f_l = cfg.data_size_bits[k], cfg.complexity[k], cfg.local_cpu[k]
    return L * c * rate_k * f_e_k / (f_e_k * f_l + c * rate_k * (f_e_k + f_l))


def optimal_offload(rate_k, f_e_k, cfg, k):
    """Integer offload size minimizing WD k's latency for a fixed CPU share.

    Rounds the continuous balance point to whichever neighbour achieves the
    smaller latency (ties broken toward the floor). Zero rate or zero CPU
    forces the all-local choice.
    """
    if rate_k <= 0 or f_e_k <= 0:
        log.debug("WD %d forced all-local (rate=%g, f_e=%g)", k, rate_k, f_e_k)
        return 0
    L = cfg.data_size_bits[k]
    cont = balanced_offload(rate_k, f_e_k, cfg, k)
    lo = int(np.clip(np.floor(cont), 0, L))
    hi = int(np.clip(np.ceil(cont), 0, L))
    d_lo = latency(lo, f_e_k, rate_k, cfg, k)[2]
    d_hi = latency(hi, f_e_k, rate_k, cfg, k)[2]
    return lo if d_lo <= d_hi else hi


def min_edge_cpu(t, rate_k, cfg, k):
    """Smallest CPU share meeting latency target t at the balanced offload.

    Returns None when even unlimited edge CPU cannot reach t. The constraint
    is a single linear inequality in f^e, solved in closed form.
    """
    L, c, f_l = cfg.data_size_bits[k], cfg.complexity[k], cfg.local_cpu[k]
    if t <= 0:
        return None if L > 0 else 0.0
    floor_t = L * c / (f_l + c * rate_k)       # f^e -> inf limit
    if t <= floor_t and t < L * c / f_l:
        return None
    if t >= L * c / f_l:                       # all-local already meets t
        return 0.0
    a = L * c - t * (f_l + c * rate_k)
    b = t * c * rate_k * f_l - L * c * c * rate_k
    # here floor_t < t < all-local, hence a < 0 and b < 0
    return b / a


def min_edge_cpu_conic(t, rate_k, cfg, k, tol=1e-9):
    """Same quantity via the generic conic layer; cross-check path."""
    L, c, f_l = cfg.data_size_bits[k], cfg.complexity[k], cfg.local_cpu[k]
    a = L * c - t * (f_l + c * rate_k)
    b = t * c * rate_k * f_l - L * c * c * rate_k
    # solve in units of the local CPU rate to keep the LP well scaled
    unit = f_l
    scale = max(abs(a), 1.0)
    problem = conic.ConicProblem(1, objective=np.array([1.0]))
    problem.add(conic.LinearIneq(np.array([[a * unit / scale]]), np.array([b / scale])))
    problem.add(conic.LinearIneq(np.array([[-1.0]]), np.array([0.0])))
    out = conic.solve(problem, tol)
    if not out.feasible:
        return None
    return float(out.x[0]) * unit


def allocate(rates, cfg):
    """Algorithm: bisection over the latency target with per-WD CPU minima.

    WDs with zero rate are forced all-local and excluded from the edge pool;
    the all-local point is always feasible, so the search cannot fail.
    """
    K = cfg.num_wds
    rates = np.asarray(rates, dtype=float)
    active = [k for k in range(K) if rates[k] > 0 and cfg.data_size_bits[k] > 0]

    t_hi = max(cfg.data_size_bits[k] * cfg.complexity[k] / cfg.local_cpu[k]
               for k in range(K)) if K else 0.0
    if not active or t_hi == 0.0:
        return _finalize([0.0] * K, rates, cfg)

    t_lo = max(cfg.data_size_bits[k] * cfg.complexity[k]
               / (cfg.local_cpu[k] + cfg.complexity[k] * rates[k]) for k in active)
    t_lo = min(t_lo, t_hi)

    def demand(t):
        total = 0.0
        for k in active:
            need = min_edge_cpu(t, rates[k], cfg, k)
            if need is None:
                return None
            total += need
        return total

    for _ in range(cfg.max_bisect_iters):
        if t_hi - t_lo <= cfg.eps_alloc * t_hi:
            break
        mid = 0.5 * (t_lo + t_hi)
        need = demand(mid)
        if need is not None and need <= cfg.edge_total_cpu:
            t_hi = mid
        else:
            t_lo = mid

    shares = [0.0] * K
    for k in active:
        shares[k] = min_edge_cpu(t_hi, rates[k], cfg, k) or 0.0
    used = sum(shares)
    leftover = cfg.edge_total_cpu - used
    if leftover > 0 and active:
        if used > 0:
            for k in active:
                shares[k] += leftover * shares[k] / used
        else:
            for k in active:
                shares[k] += leftover / len(active)
    return _finalize(shares, rates, cfg)


def _finalize(shares, rates, cfg):
    ells = [optimal_offload(rates[k], shares[k], cfg, k) for k in range(cfg.num_wds)]
    shares = [shares[k] if ells[k] > 0 else 0.0 for k in range(cfg.num_wds)]
    report = latency_report(ells, shares, rates, cfg)
    return ComputePlan(tuple(ells), tuple(shares), report.objective_s, report)
