"""Random channel synthesis from scenario geometry.

Large-scale gain follows a distance power law; small-scale fading is Rician.
Each (link type, index) pair draws from its own RNG substream, so adding a WD
or BS never perturbs the other blocks of the same seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError


@dataclass(frozen=True)
class PhaseVector:
    """Reflection phases of all IRS elements; amplitudes are fixed to one."""

    angles: np.ndarray  # (IN,) in [0, 2*pi)

    def __post_init__(self):
        object.__setattr__(self, "angles", np.mod(np.asarray(self.angles, dtype=float), 2 * np.pi))

    @property
    def coefficients(self):
        """v = exp(j * theta), unit modulus by construction."""
        return np.exp(1j * self.angles)

    @classmethod
    def zeros(cls, num_elements):
        return cls(np.zeros(num_elements))

    @classmethod
    def from_coefficients(cls, v):
        return cls(np.angle(np.asarray(v, dtype=complex)))

    @classmethod
    def random(cls, num_elements, rng):
        return cls(rng.uniform(0.0, 2 * np.pi, num_elements))

    def __len__(self):
        return self.angles.size


@dataclass(frozen=True)
class ChannelSet:
    """Stacked channel blocks for one scenario realization.

    direct: (K, MB) WD->BS channels, antennas stacked across BSs.
    reflect: (K, IN) WD->IRS channels, elements stacked across surfaces.
    cascade: (MB, IN) IRS->BS channels, one M x N block per (BS, IRS) pair.
    """

    direct: np.ndarray
    reflect: np.ndarray
    cascade: np.ndarray

    def __post_init__(self):
        for name in ("direct", "reflect", "cascade"):
            block = getattr(self, name)
            if not np.all(np.isfinite(block.view(float))):
                raise ConfigError(f"channel block {name} contains non-finite entries")
        k, mb = self.direct.shape
        if self.reflect.shape[0] != k:
            raise DimensionError("reflect", (k, self.reflect.shape[1]), self.reflect.shape)
        if self.cascade.shape != (mb, self.reflect.shape[1]):
            raise DimensionError("cascade", (mb, self.reflect.shape[1]), self.cascade.shape)

    @property
    def num_wds(self):
        return self.direct.shape[0]

    @property
    def num_antennas(self):
        return self.direct.shape[1]

    @property
    def num_elements(self):
        return self.reflect.shape[1]

    def effective(self, theta, k):
        """h_k = h_d,k + G diag(v) h_r,k."""
        return effective_channel(self, theta, k)

    def effective_all(self, theta):
        """All effective channels stacked as (K, MB)."""
        v = _check_theta(self, theta)
        return self.direct + (self.cascade @ (v[:, None] * self.reflect.T)).T

    def without_cascade(self):
        return ChannelSet(self.direct, self.reflect, np.zeros_like(self.cascade))

    def without_direct(self):
        return ChannelSet(np.zeros_like(self.direct), self.reflect, self.cascade)


def _check_theta(channels, theta):
    v = theta.coefficients
    if v.size != channels.num_elements:
        raise DimensionError("theta", (channels.num_elements,), v.shape)
    return v


def effective_channel(channels, theta, k):
    """Combined direct-plus-reflected channel of WD ``k``."""
    v = _check_theta(channels, theta)
    return channels.direct[k] + channels.cascade @ (v * channels.reflect[k])


def path_loss(d, c0, d0, kappa):
    """Linear power gain c0 * (d/d0)^-kappa at distance ``d``."""
    if d <= 0:
        raise ConfigError(f"distance must be > 0, got {d}")
    return c0 * (d / d0) ** (-kappa)


def rician_sample(los_component, beta, rng):
    """Rician mix of a deterministic LoS matrix and unit-variance CSCG fading.

    beta = 0 gives pure Rayleigh fading, beta = inf returns the LoS matrix
    exactly.
    """
    los = np.asarray(los_component, dtype=complex)
    if math.isinf(beta):
        return los.copy()
    nlos = (rng.standard_normal(los.shape) + 1j * rng.standard_normal(los.shape)) / math.sqrt(2)
    return math.sqrt(beta / (1 + beta)) * los + math.sqrt(1 / (1 + beta)) * nlos


def _distance(p, q):
    d = math.dist(p, q)
    if d == 0:
        raise ConfigError(f"coincident positions {p} and {q}")
    return d


def _substream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def synthesize(cfg, seed=None):
    """Draw a full ChannelSet for the scenario geometry.

    Deterministic given (cfg, seed); ``seed`` defaults to cfg.seed.
    """
    if seed is None:
        seed = cfg.seed
    m, n = cfg.antennas_per_bs, cfg.elements_per_irs
    mb, inn = cfg.total_antennas, cfg.total_elements
    c0, d0 = cfg.pathloss_ref_gain, cfg.pathloss_ref_distance_m

    direct = np.zeros((cfg.num_wds, mb), dtype=complex)
    for k, wd in enumerate(cfg.wd_positions):
        for b, bs in enumerate(cfg.bs_positions):
            gain = path_loss(_distance(wd, bs), c0, d0, cfg.pathloss_exp_wd_bs)
            rng = _substream(seed, 0, b, k)
            block = rician_sample(np.ones((m, 1)), cfg.rician_wd_bs, rng)
            direct[k, b * m:(b + 1) * m] = math.sqrt(gain) * block[:, 0]

    reflect = np.zeros((cfg.num_wds, inn), dtype=complex)
    for k, wd in enumerate(cfg.wd_positions):
        for i, irs in enumerate(cfg.irs_positions):
            gain = path_loss(_distance(wd, irs), c0, d0, cfg.pathloss_exp_wd_irs)
            rng = _substream(seed, 1, i, k)
            block = rician_sample(np.ones((n, 1)), cfg.rician_wd_irs, rng)
            reflect[k, i * n:(i + 1) * n] = math.sqrt(gain) * block[:, 0]

    cascade = np.zeros((mb, inn), dtype=complex)
    for b, bs in enumerate(cfg.bs_positions):
        for i, irs in enumerate(cfg.irs_positions):
            gain = path_loss(_distance(irs, bs), c0, d0, cfg.pathloss_exp_irs_bs)
            rng = _substream(seed, 2, b, i)
            block = rician_sample(np.ones((m, n)), cfg.rician_irs_bs, rng)
            cascade[b * m:(b + 1) * m, i * n:(i + 1) * n] = math.sqrt(gain) * block

    return ChannelSet(direct, reflect, cascade)


# -- regression-fixture serialization ------------------------------------

def _encode(block):
    return [[[float(z.real), float(z.imag)] for z in row] for row in block]


def _decode(data):
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def dump_channels(channels, path):
    payload = {
        "direct": _encode(channels.direct),
        "reflect": _encode(channels.reflect),
        "cascade": _encode(channels.cascade),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_channels(path):
    with open(path) as fh:
        payload = json.load(fh)
    return ChannelSet(_decode(payload["direct"]), _decode(payload["reflect"]),
                      _decode(payload["cascade"]))
