"""Deterministic scenario runner, event log, metrics, oracle, and CLI."""

from .events import IntegrityError, LogRecord, parse_log_lines, read_log
from .metrics import Metrics, compute_metrics
from .oracle import oracle_assign
from .runner import ReplayResult, RunResult, Simulation, SimulationAborted, replay, run
from .scenario import (
    ParseError,
    Scenario,
    ScriptEvent,
    ValidationError,
    bundled_scenario_path,
    load_scenario,
    loads_scenario,
)

__all__ = [
    "IntegrityError",
    "LogRecord",
    "Metrics",
    "ParseError",
    "ReplayResult",
    "RunResult",
    "Scenario",
    "ScriptEvent",
    "Simulation",
    "SimulationAborted",
    "ValidationError",
    "bundled_scenario_path",
    "compute_metrics",
    "load_scenario",
    "loads_scenario",
    "oracle_assign",
    "parse_log_lines",
    "read_log",
    "replay",
    "run",
]
