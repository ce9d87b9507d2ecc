"""Experiment harness: parameter sweeps with baselines, emitting CSV rows.

All dB/dBm conversions happen here; the core modules only ever see linear
units. Each (value, scheme, seed) point owns its RNG substream, so the CSV is
byte-identical across repeated invocations with the same master seed, and
rows come out in deterministic grid order regardless of worker scheduling.
"""

from __future__ import annotations

import concurrent.futures
import json
import time
from dataclasses import dataclass

import numpy as np

from . import channel, orchestrator
from .errors import ConfigError

SWEEP_PARAMS = ("wd_distance", "edge_cpu", "transmit_power", "ici_ratio", "iterations")
BASELINES = ("no_irs", "no_direct", "random_phase")
ALL_SCHEMES = ("sdr", "sca") + BASELINES

CSV_FIELDS = ("sweep_param", "value", "scheme", "seed", "t_ms",
              "per_wd_latency_ms", "ell_bits", "fe_cycles", "iters", "wall_ms")


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    schemes: tuple = ("sca", "no_irs", "random_phase")
    seeds: int = 1
    output: str = "sweep.csv"
    timing: bool = False
    restarts: int = 1

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ConfigError(f"unknown sweep parameter {self.param!r}")
        if not self.values:
            raise ConfigError("sweep value grid must be non-empty")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        for s in self.schemes:
            if s not in ALL_SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}")

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            data = json.load(fh)
        data["values"] = tuple(data["values"])
        if "schemes" in data:
            data["schemes"] = tuple(data["schemes"])
        return cls(**data)


def apply_sweep_value(cfg, param, value):
    """Scenario for one grid point; dBm/dB values converted to linear here."""
    if param == "wd_distance":
        return cfg.with_wd_distance(value)
    if param == "edge_cpu":
        return cfg.replace(edge_total_cpu=float(value))
    if param == "transmit_power":
        return cfg.replace(transmit_power_mw=10.0 ** (value / 10.0))
    if param == "ici_ratio":
        return cfg.replace(ici_power_mw=cfg.noise_power_mw * 10.0 ** (value / 10.0))
    return cfg  # iterations: scenario unchanged, the trace is the output


def _point_seed(master, value_idx, scheme_idx, seed_idx):
    ss = np.random.SeedSequence((master, value_idx, scheme_idx, seed_idx))
    return int(ss.generate_state(1)[0])


def run_baseline(name, channels_full, cfg, restarts=1):
    """One baseline solve on an existing channel realization.

    random_phase keeps a single random draw by definition; restarts apply
    only where phases are optimized.
    """
    if name == "no_irs":
        return orchestrator.run_bcd(channels_full.without_cascade(), cfg, scheme="none")
    if name == "no_direct":
        return orchestrator.run_bcd(channels_full.without_direct(), cfg,
                                    scheme="sca", restarts=restarts)
    if name == "random_phase":
        return orchestrator.run_bcd(channels_full, cfg, scheme="none")
    raise ConfigError(f"unknown baseline {name!r}")


def run_point(cfg, param, value, scheme, seed, restarts=1):
    """Solve one grid point; returns (rows, BcdResult)."""
    point_cfg = apply_sweep_value(cfg, param, value).replace(seed=seed)
    channels_full = channel.synthesize(point_cfg, seed=seed)
    start = time.perf_counter()
    if scheme in BASELINES:
        result = run_baseline(scheme, channels_full, point_cfg, restarts)
    else:
        result = orchestrator.run_bcd(channels_full, point_cfg, scheme=scheme,
                                      restarts=restarts)
    wall_ms = (time.perf_counter() - start) * 1e3

    def fmt_list(vals, spec="{:.9g}"):
        return "|".join(spec.format(v) for v in vals)

    rows = []
    if param == "iterations":
        for rec in result.trace.rows:
            rows.append({
                "sweep_param": param, "value": rec["l4"], "scheme": scheme,
                "seed": seed, "t_ms": f"{rec['objective'] * 1e3:.9g}",
                "per_wd_latency_ms": "", "ell_bits": "", "fe_cycles": "",
                "iters": rec["l4"], "wall_ms": 0.0,
            })
    else:
        report = result.plan.report
        rows.append({
            "sweep_param": param, "value": value, "scheme": scheme, "seed": seed,
            "t_ms": f"{result.objective_s * 1e3:.9g}",
            "per_wd_latency_ms": fmt_list(t * 1e3 for t in report.total_s),
            "ell_bits": fmt_list(result.plan.ell, "{:d}"),
            "fe_cycles": fmt_list(result.plan.f_edge, "{:.6g}"),
            "iters": result.trace.outer_iterations, "wall_ms": wall_ms,
        })
    return rows, result


def _worker(args):
    cfg, param, value, scheme, seed, timing, restarts = args
    rows, _ = run_point(cfg, param, value, scheme, seed, restarts)
    if not timing:
        for row in rows:
            row["wall_ms"] = 0.0
    return rows


def run_sweep(spec, cfg, workers=1):
    """All grid points in deterministic order; returns the list of CSV rows."""
    tasks = []
    for vi, value in enumerate(spec.values):
        for si, scheme in enumerate(spec.schemes):
            for seed_idx in range(spec.seeds):
                seed = _point_seed(cfg.seed, vi, si, seed_idx)
                tasks.append((cfg, spec.param, value, scheme, seed, spec.timing,
                              spec.restarts))
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            all_rows = list(pool.map(_worker, tasks))
    else:
        all_rows = [_worker(t) for t in tasks]
    return [row for rows in all_rows for row in rows]


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_FIELDS) + "\n")
        for row in rows:
            fh.write(",".join(str(row[f]) for f in CSV_FIELDS) + "\n")
