"""Discrete-time simulator and optimization library for mobility-aware
computation offloading in a multi-server MEC network."""

from .config import ConfigError, NetworkConfig, load_config, validate_config
from .controller import Policy, decide_slot, p2_objective, parse_policy
from .harness import RunSummary, compare, run, sweep
from .model import Decision, SlotMetrics, SlotState

__all__ = [
    "ConfigError", "NetworkConfig", "load_config", "validate_config",
    "Policy", "decide_slot", "p2_objective", "parse_policy",
    "RunSummary", "compare", "run", "sweep",
    "Decision", "SlotMetrics", "SlotState",
]
