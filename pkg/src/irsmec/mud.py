"""Multi-user detector optimization for fixed phases and compute plan.

The minimal edge latency is found by bisection over the target t; each probe
is a feasibility question that decouples into one small second-order cone
program per WD (the k-th constraint only involves w_k). Detectors are phase
rotated so the useful term is real non-negative, which is lossless.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import conic
from .config import edge_latency
from .errors import SolverError

log = logging.getLogger(__name__)

BRACKET_OFFSET_S = 1e-9   # keeps the rate exponent finite at t = t_c,k
_EXP_CAP = 700.0          # expm1 overflow guard, exponent in nats


@dataclass(frozen=True)
class MudMatrix:
    """Per-WD detection vectors stacked as rows (K x MB)."""

    detectors: np.ndarray

    def __getitem__(self, k):
        return self.detectors[k]

    @classmethod
    def mrc(cls, channels, theta):
        """Normalized maximum-ratio combiners on the effective channels."""
        h = channels.effective_all(theta)
        norms = np.linalg.norm(h, axis=1, keepdims=True)
        safe = np.where(norms > 0, norms, 1.0)
        return cls(h / safe)


def rate_margin_coefficient(ell_k, t, t_c_k, cfg):
    """sqrt(1 + 1/(2^{ell/(W(t - t_c))} - 1)), or None when t <= t_c."""
    if t <= t_c_k:
        return None
    exponent = ell_k / (cfg.bandwidth_hz * (t - t_c_k)) * math.log(2.0)
    if exponent > _EXP_CAP:
        return 1.0
    return math.sqrt(1.0 + 1.0 / math.expm1(exponent))


def _detector_problem(coef, h_all, k, cfg):
    """Realified SOCP block for WD k; rows are scaled by the noise level."""
    mb = h_all.shape[1]
    sigma = math.sqrt(cfg.effective_noise_mw)
    re_rows = np.hstack([h_all.real, h_all.imag])          # Re(w^H h_j)
    im_rows = np.hstack([h_all.imag, -h_all.real])         # Im(w^H h_j)
    scale = 1.0 / max(np.linalg.norm(h_all[k]), sigma)

    problem = conic.ConicProblem(2 * mb)
    problem.add(conic.LinearEq(scale * im_rows[k], np.zeros(1)))
    problem.add(conic.LinearIneq(-scale * re_rows[k], np.zeros(1)))
    problem.add(conic.SecondOrderCone(np.eye(2 * mb), np.zeros(2 * mb),
                                      np.zeros(2 * mb), 1.0))
    amp = math.sqrt(cfg.transmit_power_mw) / sigma
    f = np.vstack([amp * re_rows, amp * im_rows, np.zeros(2 * mb)])
    g = np.zeros(f.shape[0])
    g[-1] = 1.0                                            # sigma / sigma
    problem.add(conic.SecondOrderCone(f, g, coef * amp * re_rows[k], 0.0))
    return problem


def socp_feasible(t, channels, theta, plan, cfg):
    """Detector matrix meeting edge-latency target t, or None if infeasible.

    WDs with nothing to offload are dropped from the constraints and keep
    their MRC detectors. Raises SolverError on backend breakdown.
    """
    h_all = channels.effective_all(theta)
    t_c = plan.edge_compute_times(cfg)
    detectors = MudMatrix.mrc(channels, theta).detectors.copy()
    mb = h_all.shape[1]
    for k in range(cfg.num_wds):
        if plan.ell[k] == 0:
            continue
        coef = rate_margin_coefficient(plan.ell[k], t, t_c[k], cfg)
        if coef is None:
            return None
        out = conic.solve(_detector_problem(coef, h_all, k, cfg), cfg.feas_tol)
        if out.status is conic.Status.FAILURE:
            raise SolverError(f"detector SOCP failed for WD {k} at t={t}")
        if not out.feasible:
            return None
        w = out.x[:mb] + 1j * out.x[mb:]
        # scaling up to the norm boundary only slackens the cone and makes
        # the sigma^2*||w||^2 SINR convention coincide with the SOCP's sigma^2
        norm = np.linalg.norm(w)
        detectors[k] = w / norm if norm > 1e-12 else detectors[k]
    return MudMatrix(detectors)


def optimize_mud(channels, theta, plan, cfg):
    """Bisection over t; returns (t*, MudMatrix) with t* within eps of optimal.

    The starting upper bracket is the latency achieved by MRC detectors,
    which is always feasible; it is doubled defensively if the solver
    disagrees at numerical corner cases.
    """
    active = [k for k in range(cfg.num_wds) if plan.ell[k] > 0]
    mrc = MudMatrix.mrc(channels, theta)
    if not active:
        return 0.0, mrc

    t_c = plan.edge_compute_times(cfg)
    t_init = edge_latency(channels, theta, mrc.detectors, plan, cfg)
    if not math.isfinite(t_init):
        log.warning("MRC latency infinite (zero channel?); detector step skipped")
        return t_init, mrc

    hi, best = t_init, mrc
    for _ in range(8):
        try:
            candidate = socp_feasible(hi, channels, theta, plan, cfg)
        except SolverError:
            candidate = None
        if candidate is not None:
            best = candidate
            break
        hi *= 2.0
    lo = max(t_c[k] for k in active) + BRACKET_OFFSET_S

    for _ in range(cfg.max_bisect_iters):
        if hi - lo <= cfg.eps_mud * hi:
            break
        mid = 0.5 * (lo + hi)
        try:
            candidate = socp_feasible(mid, channels, theta, plan, cfg)
        except SolverError:
            log.debug("detector SOCP numerical failure at t=%g; treated as infeasible", mid)
            candidate = None
        if candidate is not None:
            hi, best = mid, candidate
        else:
            lo = mid
    return hi, best
