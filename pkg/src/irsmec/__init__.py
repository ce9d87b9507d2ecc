"""Min-max latency optimization for IRS-aided cell-free mobile edge computing."""

from .channel import ChannelSet, PhaseVector, synthesize
from .compute_alloc import ComputePlan, allocate
from .config import (LatencyReport, ScenarioConfig, latency, latency_report,
                     overall_latency, rate, rates_for, sinr)
from .errors import ConfigError, DimensionError, IrsMecError, SolverError
from .mud import MudMatrix, optimize_mud
from .orchestrator import BcdResult, check_solution, inner_alternate, run_bcd
from .reflect import build_forms, optimize_reflect_sdr, sca_step
from .single_wd import solve_single
from .sweep import SweepSpec, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BcdResult", "ChannelSet", "ComputePlan", "ConfigError", "DimensionError",
    "IrsMecError", "LatencyReport", "MudMatrix", "PhaseVector",
    "ScenarioConfig", "SolverError", "SweepSpec", "allocate", "build_forms",
    "check_solution", "inner_alternate", "latency", "latency_report",
    "optimize_mud", "optimize_reflect_sdr", "overall_latency", "rate",
    "rates_for", "run_bcd", "run_sweep", "sca_step", "sinr", "solve_single",
    "synthesize",
]
