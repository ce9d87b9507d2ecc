"""Scenario parameters and the SINR / rate / latency formulas."""

import json
import math

import numpy as np
import pytest

from irsmec import ScenarioConfig, latency, rate, sinr
from irsmec.channel import PhaseVector
from irsmec.config import latency_report, overall_latency, rates_for
from irsmec.errors import ConfigError, DimensionError

from conftest import make_cfg, manual_channels, tiny_cfg


class TestScenarioConfig:
    def test_defaults_match_table(self):
        cfg = ScenarioConfig()
        assert cfg.num_wds == 2 and cfg.num_irs == 2 and cfg.num_bs == 5
        assert cfg.elements_per_irs == 10 and cfg.antennas_per_bs == 2
        assert cfg.bandwidth_hz == 1e6
        assert cfg.transmit_power_mw == 1.0
        assert cfg.noise_power_mw == 3.98e-12
        assert cfg.data_size_bits == (250_000, 350_000)
        assert cfg.complexity == (700.0, 800.0)
        assert cfg.local_cpu == (4e8, 6e8)
        assert cfg.edge_total_cpu == 50e9
        assert cfg.bs_positions[1] == (40.0, -200.0, 3.0)
        assert cfg.irs_positions == ((60.0, 10.0, 6.0), (100.0, 10.0, 6.0))

    def test_derived_sizes(self):
        cfg = ScenarioConfig()
        assert cfg.total_antennas == 10
        assert cfg.total_elements == 20
        assert cfg.effective_noise_mw == cfg.noise_power_mw

    def test_all_local_latency(self):
        # max(250000*700/4e8, 350000*800/6e8) = max(0.4375, 0.46667)
        assert ScenarioConfig().all_local_latency() == pytest.approx(1.4 / 3)

    @pytest.mark.parametrize("field,value", [
        ("num_wds", 0), ("bandwidth_hz", 0.0), ("noise_power_mw", -1.0),
        ("ici_power_mw", -0.1), ("pathloss_exp_wd_bs", -1.0),
        ("edge_total_cpu", 0.0), ("feas_tol", 0.0),
    ])
    def test_invalid_rejected(self, field, value):
        with pytest.raises(ConfigError):
            ScenarioConfig(**{field: value})

    def test_roundtrip_json(self, tmp_path):
        cfg = ScenarioConfig(seed=7, ici_power_mw=1e-12)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg.to_dict()))
        again = ScenarioConfig.from_file(path)
        assert again == cfg
        assert math.isinf(again.rician_irs_bs)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            ScenarioConfig.from_dict({"not_a_field": 1})

    def test_with_wd_distance(self):
        cfg = ScenarioConfig().with_wd_distance(80.0)
        assert cfg.wd_positions == ((80.0, 0.0, 1.0), (80.0, 5.0, 1.0))


class TestSinr:
    def test_single_wd_direct_evaluation(self):
        # P=1, M=B=1, w=[1], h=[2], sigma^2=1 -> gamma = 4
        cfg = tiny_cfg(noise_power_mw=1.0)
        ch = manual_channels([[2.0]], [[0.0]], [[0.0]])
        theta = PhaseVector.zeros(1)
        assert sinr(np.array([1.0]), ch, theta, cfg, 0) == pytest.approx(4.0)

    def test_orthogonal_interferer_matches_single(self):
        cfg = make_cfg(num_wds=2, num_bs=1, antennas_per_bs=2, num_irs=1,
                       elements_per_irs=1, noise_power_mw=1.0)
        ch = manual_channels([[2.0, 0.0], [0.0, 3.0]], [[0.0], [0.0]],
                             [[0.0], [0.0]])
        theta = PhaseVector.zeros(1)
        w = np.array([1.0, 0.0])
        assert sinr(w, ch, theta, cfg, 0) == pytest.approx(4.0)

    def test_phase_scale_invariance(self, rng):
        cfg = make_cfg()
        from irsmec import synthesize
        ch = synthesize(cfg, seed=3)
        theta = PhaseVector.random(ch.num_elements, rng)
        w = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        base = sinr(w, ch, theta, cfg, 0)
        assert sinr(np.exp(1.3j) * w, ch, theta, cfg, 0) == pytest.approx(base)
        # scaling also preserved: noise carries ||w||^2
        assert sinr(0.1 * w, ch, theta, cfg, 0) == pytest.approx(base)

    def test_zeroed_cascade_equals_direct_only(self, rng):
        cfg = make_cfg()
        from irsmec import synthesize
        ch = synthesize(cfg, seed=5)
        theta = PhaseVector.random(ch.num_elements, rng)
        w = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        no_irs = ch.without_cascade()
        assert sinr(w, no_irs, theta, cfg, 0) == pytest.approx(
            sinr(w, no_irs, PhaseVector.zeros(20), cfg, 0))

    def test_ici_adds_to_noise(self):
        cfg = tiny_cfg(noise_power_mw=1.0, ici_power_mw=3.0)
        ch = manual_channels([[2.0]], [[0.0]], [[0.0]])
        theta = PhaseVector.zeros(1)
        assert sinr(np.array([1.0]), ch, theta, cfg, 0) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        cfg = tiny_cfg()
        ch = manual_channels([[2.0]], [[0.0]], [[0.0]])
        with pytest.raises(DimensionError):
            sinr(np.array([1.0, 0.0]), ch, PhaseVector.zeros(1), cfg, 0)


class TestRate:
    def test_values(self):
        cfg = tiny_cfg(bandwidth_hz=1.0)
        assert rate(0.0, cfg) == 0.0
        assert rate(1.0, cfg) == pytest.approx(1.0)
        assert rate(3.0, tiny_cfg(bandwidth_hz=2.0)) == pytest.approx(4.0)

    def test_negative_rejected(self):
        with pytest.raises(ConfigError):
            rate(-0.1, tiny_cfg())

    def test_strictly_increasing(self):
        cfg = tiny_cfg()
        gammas = np.linspace(0, 10, 50)
        rs = [rate(g, cfg) for g in gammas]
        assert all(b > a for a, b in zip(rs, rs[1:]))


class TestLatency:
    def test_all_local(self):
        cfg = tiny_cfg()
        local, edge, total = latency(0, 0.0, 0.0, cfg, 0)
        assert edge == 0.0
        assert total == pytest.approx(250_000 * 700 / 4e8)

    def test_all_offload(self):
        cfg = tiny_cfg()
        L = cfg.data_size_bits[0]
        local, edge, total = latency(L, 1e9, 1e6, cfg, 0)
        assert local == 0.0
        assert edge == pytest.approx(L / 1e6 + L * 700 / 1e9)
        assert total == edge

    def test_balance_point_equalizes(self):
        # continuous ell* makes local and edge branches equal
        cfg = tiny_cfg()
        L, c, f_l = 250_000, 700.0, 4e8
        R, f_e = 1e6, 5e9
        ell = L * c * R * f_e / (f_e * f_l + c * R * (f_e + f_l))
        local = (L - ell) * c / f_l
        edge = ell / R + ell * c / f_e
        assert local == pytest.approx(edge, rel=1e-12)

    def test_offload_with_zero_rate_is_inf(self):
        cfg = tiny_cfg()
        assert math.isinf(latency(100, 1e9, 0.0, cfg, 0)[1])
        assert math.isinf(latency(100, 0.0, 1e6, cfg, 0)[1])

    def test_out_of_range_rejected(self):
        cfg = tiny_cfg()
        with pytest.raises(ConfigError):
            latency(-1, 1e9, 1e6, cfg, 0)
        with pytest.raises(ConfigError):
            latency(cfg.data_size_bits[0] + 1, 1e9, 1e6, cfg, 0)

    def test_piecewise_monotone_in_ell(self):
        cfg = tiny_cfg()
        R, f_e = 1e6, 5e9
        L, c, f_l = 250_000, 700.0, 4e8
        cont = L * c * R * f_e / (f_e * f_l + c * R * (f_e + f_l))
        below = [latency(e, f_e, R, cfg, 0)[2]
                 for e in np.linspace(0, int(cont), 20, dtype=int)]
        above = [latency(e, f_e, R, cfg, 0)[2]
                 for e in np.linspace(int(cont) + 1, L, 20, dtype=int)]
        assert all(b >= a for a, b in zip(below[1:], below[:-1]))
        assert all(b >= a for a, b in zip(above, above[1:]))

    def test_report_objective(self):
        cfg = make_cfg()
        rep = latency_report([0, 0], [0.0, 0.0], [0.0, 0.0], cfg)
        assert rep.objective_s == pytest.approx(cfg.all_local_latency())
        assert rep.total_s == tuple(max(l, e) for l, e in
                                    zip(rep.local_s, rep.edge_s))
