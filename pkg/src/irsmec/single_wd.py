"""Closed-form pipeline for the single-WD scenario.

With one WD there is no interference and no CPU sharing, so the detector is
plain MRC, the phases align direct and reflected paths, and the offload split
follows the same balance rule as the multi-WD allocator. Used standalone and
as an oracle for the general pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import compute_alloc
from .channel import PhaseVector, effective_channel
from .config import latency, rate
from .errors import ConfigError


def single_offload(rate_s, cfg):
    """Integer offload split with the whole edge CPU dedicated to the WD."""
    return compute_alloc.optimal_offload(rate_s, cfg.edge_total_cpu, cfg, 0)


def mrc_detector(channels, theta):
    """Unit-norm maximum-ratio combiner on the effective channel."""
    h = effective_channel(channels, theta, 0)
    norm = np.linalg.norm(h)
    if norm == 0:
        raise ConfigError("effective channel is zero; MRC undefined")
    return h / norm


def aligned_phases(channels, w):
    """Phases that co-phase every reflected path with the direct path."""
    direct_phase = np.angle(np.vdot(w, channels.direct[0]))
    reflected = (w.conj() @ channels.cascade) * channels.reflect[0]
    return PhaseVector(direct_phase - np.angle(reflected))


def snr(channels, theta, w, cfg):
    h = effective_channel(channels, theta, 0)
    return (cfg.transmit_power_mw * abs(np.vdot(w, h)) ** 2
            / (cfg.effective_noise_mw * float(np.vdot(w, w).real)))


@dataclass(frozen=True)
class SingleWdSolution:
    ell: int
    detector: np.ndarray
    theta: PhaseVector
    latency_s: float
    snr: float


def solve_single(channels, cfg, tol=1e-9, max_iters=50):
    """Alternate MRC and phase alignment to a fixed point, then split the task.

    For a single receive antenna the alternation is exact after one round;
    in general the SNR sequence is non-decreasing and converges quickly.
    """
    if channels.num_wds != 1 or cfg.num_wds != 1:
        raise ConfigError("solve_single requires a K=1 scenario")
    theta = PhaseVector.zeros(channels.num_elements)
    w = mrc_detector(channels, theta)
    current = snr(channels, theta, w, cfg)
    for _ in range(max_iters):
        if channels.num_elements:
            theta = aligned_phases(channels, w)
        w = mrc_detector(channels, theta)
        updated = snr(channels, theta, w, cfg)
        if updated - current <= tol * max(current, 1.0):
            current = updated
            break
        current = updated
    r = rate(current, cfg)
    ell = single_offload(r, cfg)
    total = latency(ell, cfg.edge_total_cpu, r, cfg, 0)[2]
    return SingleWdSolution(ell, w, theta, total, current)
