"""Scenario parameters and the SINR / rate / latency formulas.

Every optimizer in the package evaluates its objective through the three
functions defined here, so unit conventions live in one place: powers in mW,
data in bits, CPU speeds in cycles/s, latencies in seconds, rates in bits/s.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DimensionError

INF_RICIAN = math.inf


def _default_bs_positions(num_bs):
    return tuple((40.0 * b, -200.0, 3.0) for b in range(num_bs))


def _default_irs_positions(num_irs):
    base = [(60.0, 10.0, 6.0), (100.0, 10.0, 6.0)]
    if num_irs <= 2:
        return tuple(base[:num_irs])
    # extra surfaces continue the 40 m grid at the same height
    extra = [(140.0 + 40.0 * i, 10.0, 6.0) for i in range(num_irs - 2)]
    return tuple(base + extra)


def wd_positions(distance, num_wds):
    """WD drop convention: all WDs at x = ``distance``, 1 m height, 5 m apart."""
    return tuple((float(distance), 5.0 * k, 1.0) for k in range(num_wds))


@dataclass(frozen=True)
class ScenarioConfig:
    """All physical, computing and algorithmic parameters of one scenario.

    Defaults reproduce the simulation setting of the system this package
    models: 2 WDs, 5 two-antenna BSs and 2 ten-element reflecting surfaces.
    """

    num_wds: int = 2
    num_irs: int = 2
    num_bs: int = 5
    elements_per_irs: int = 10
    antennas_per_bs: int = 2

    bandwidth_hz: float = 1e6
    transmit_power_mw: float = 1.0
    noise_power_mw: float = 3.98e-12
    ici_power_mw: float = 0.0

    data_size_bits: tuple = (250_000, 350_000)
    complexity: tuple = (700.0, 800.0)
    local_cpu: tuple = (4e8, 6e8)
    edge_total_cpu: float = 50e9

    bs_positions: tuple = None
    irs_positions: tuple = None
    wd_positions: tuple = None

    pathloss_ref_gain: float = 1e-3          # -30 dB at the reference distance
    pathloss_ref_distance_m: float = 1.0
    pathloss_exp_wd_bs: float = 4.6
    pathloss_exp_wd_irs: float = 2.2
    pathloss_exp_irs_bs: float = 2.8
    rician_wd_bs: float = 0.0
    rician_wd_irs: float = 0.0
    rician_irs_bs: float = INF_RICIAN

    eps_alloc: float = 1e-4       # relative, bisection over t in the allocation step
    eps_mud: float = 1e-4         # relative, bisection over t in the detector step
    eps_reflect: float = 1e-4     # relative, inner alternation stop
    eps_outer: float = 1e-3       # relative objective change, outer loop stop
    feas_tol: float = 1e-7
    max_bisect_iters: int = 60
    max_inner_iters: int = 20
    max_outer_iters: int = 30
    num_randomizations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.bs_positions is None:
            object.__setattr__(self, "bs_positions", _default_bs_positions(self.num_bs))
        if self.irs_positions is None:
            object.__setattr__(self, "irs_positions", _default_irs_positions(self.num_irs))
        if self.wd_positions is None:
            object.__setattr__(self, "wd_positions", wd_positions(60.0, self.num_wds))
        object.__setattr__(self, "data_size_bits",
                           tuple(int(v) for v in np.resize(self.data_size_bits, self.num_wds)))
        object.__setattr__(self, "complexity",
                           tuple(float(v) for v in np.resize(self.complexity, self.num_wds)))
        object.__setattr__(self, "local_cpu",
                           tuple(float(v) for v in np.resize(self.local_cpu, self.num_wds)))
        self._validate()

    def _validate(self):
        for name in ("num_wds", "num_bs", "elements_per_irs", "antennas_per_bs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.num_irs < 0:
            raise ConfigError("num_irs must be >= 0")
        for name in ("bandwidth_hz", "transmit_power_mw", "noise_power_mw",
                     "edge_total_cpu", "eps_alloc", "eps_mud", "eps_reflect",
                     "eps_outer", "feas_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if self.ici_power_mw < 0:
            raise ConfigError("ici_power_mw must be >= 0")
        for name in ("pathloss_exp_wd_bs", "pathloss_exp_wd_irs", "pathloss_exp_irs_bs",
                     "rician_wd_bs", "rician_wd_irs", "rician_irs_bs"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        for L in self.data_size_bits:
            if L < 0:
                raise ConfigError("data sizes must be non-negative integers")
        for f in self.local_cpu:
            if f <= 0:
                raise ConfigError("local CPU rates must be > 0")
        for c in self.complexity:
            if c <= 0:
                raise ConfigError("complexities must be > 0")
        if len(self.bs_positions) != self.num_bs:
            raise ConfigError("bs_positions must have num_bs entries")
        if len(self.irs_positions) != self.num_irs:
            raise ConfigError("irs_positions must have num_irs entries")
        if len(self.wd_positions) != self.num_wds:
            raise ConfigError("wd_positions must have num_wds entries")

    # -- derived sizes ----------------------------------------------------
    @property
    def total_antennas(self):
        """MB: antennas stacked across all BSs."""
        return self.antennas_per_bs * self.num_bs

    @property
    def total_elements(self):
        """IN: reflecting elements stacked across all surfaces."""
        return self.elements_per_irs * self.num_irs

    @property
    def effective_noise_mw(self):
        """Thermal noise plus the constant inter-cell interference power."""
        return self.noise_power_mw + self.ici_power_mw

    def all_local_latency(self):
        """max_k L_k c_k / f_k^l -- the objective when nothing is offloaded."""
        return max(L * c / f for L, c, f in
                   zip(self.data_size_bits, self.complexity, self.local_cpu))

    def with_wd_distance(self, distance):
        return replace(self, wd_positions=wd_positions(distance, self.num_wds))

    def replace(self, **kwargs):
        return replace(self, **kwargs)

    # -- serialization ----------------------------------------------------
    @classmethod
    def from_dict(cls, data):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        coerced = dict(data)
        for key in ("bs_positions", "irs_positions", "wd_positions"):
            if coerced.get(key) is not None:
                coerced[key] = tuple(tuple(p) for p in coerced[key])
        for key in ("rician_wd_bs", "rician_wd_irs", "rician_irs_bs"):
            if isinstance(coerced.get(key), str):
                coerced[key] = float(coerced[key])  # accepts "inf"
        return cls(**coerced)

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if isinstance(value, float) and math.isinf(value):
                value = "inf"
            out[name] = value
        return out


@dataclass(frozen=True)
class LatencyReport:
    """Per-WD local/edge/total latency and the min-max objective."""

    local_s: tuple
    edge_s: tuple
    total_s: tuple
    objective_s: float

    @classmethod
    def from_rows(cls, rows):
        local, edge, total = zip(*rows)
        return cls(tuple(local), tuple(edge), tuple(total), max(total))


def sinr(w_k, channels, theta, cfg, k):
    """SINR of WD ``k`` under detector ``w_k`` and phase configuration ``theta``.

    Denominator is P_t * interference + sigma^2 * ||w_k||^2 + sigma_ICI^2, so the
    value is invariant to scaling w_k by any nonzero complex factor when the
    interference and noise terms dominate identically (phase invariance always
    holds).
    """
    w_k = np.asarray(w_k, dtype=complex)
    mb = cfg.total_antennas
    if w_k.shape != (mb,):
        raise DimensionError("w_k", (mb,), w_k.shape)
    h_all = channels.effective_all(theta)  # (K, MB)
    if h_all.shape[0] != cfg.num_wds:
        raise DimensionError("channels", (cfg.num_wds, mb), h_all.shape)
    gains = np.abs(h_all @ w_k.conj()) ** 2
    signal = cfg.transmit_power_mw * gains[k]
    interference = cfg.transmit_power_mw * (gains.sum() - gains[k])
    noise = cfg.noise_power_mw * float(np.vdot(w_k, w_k).real) + cfg.ici_power_mw
    return float(signal / (interference + noise))


def rate(gamma, cfg):
    """Achievable rate in bits/s for a given SINR."""
    if gamma < 0:
        raise ConfigError("SINR must be non-negative")
    return cfg.bandwidth_hz * math.log2(1.0 + gamma)


def latency(ell_k, f_e_k, rate_k, cfg, k):
    """(local, edge, total) latency in seconds for WD ``k``.

    ell_k = 0 means the edge branch is skipped entirely (edge latency 0).
    Offloading with zero rate or zero edge CPU yields an infinite-latency
    sentinel rather than an exception.
    """
    L = cfg.data_size_bits[k]
    c = cfg.complexity[k]
    if not 0 <= ell_k <= L:
        raise ConfigError(f"ell_k={ell_k} outside [0, {L}]")
    local = (L - ell_k) * c / cfg.local_cpu[k]
    if ell_k == 0:
        edge = 0.0
    elif rate_k <= 0 or f_e_k <= 0:
        edge = math.inf
    else:
        edge = ell_k / rate_k + ell_k * c / f_e_k
    return local, edge, max(local, edge)


def latency_report(ells, f_edge, rates, cfg):
    rows = [latency(ells[k], f_edge[k], rates[k], cfg, k) for k in range(cfg.num_wds)]
    return LatencyReport.from_rows(rows)


def rates_for(channels, theta, detectors, cfg):
    """Per-WD achievable rates under a full detector matrix."""
    return [rate(sinr(detectors[k], channels, theta, cfg, k), cfg)
            for k in range(cfg.num_wds)]


def edge_latency(channels, theta, detectors, plan, cfg):
    """Largest per-WD edge latency (offload + edge compute) over active WDs.

    WDs that stay local contribute zero; returns 0.0 when nothing offloads.
    """
    rs = rates_for(channels, theta, detectors, cfg)
    worst = 0.0
    for k in range(cfg.num_wds):
        if plan.ell[k] > 0:
            worst = max(worst, latency(plan.ell[k], plan.f_edge[k], rs[k], cfg, k)[1])
    return worst


def overall_latency(channels, theta, detectors, plan, cfg):
    """min-max objective: max over WDs of max(local, edge) latency."""
    rs = rates_for(channels, theta, detectors, cfg)
    return latency_report(plan.ell, plan.f_edge, rs, cfg).objective_s
