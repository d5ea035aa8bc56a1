"""
Network simulator service.

Deterministic round-synchronous p-port message passing with the
alpha-beta cost accounting used throughout the encoders.
"""

from .program import (
    LocalMap,
    Message,
    Parallel,
    Program,
    Permute,
    ScaleMap,
    Send,
    Sequential,
    SimulationError,
    parallel_profile,
    sequential_profile,
)
from .simulator import (
    NetParams,
    PortViolation,
    PortViolationError,
    RunReport,
    cost_from_counts,
    cost_of,
    run,
)

__all__ = [
    "LocalMap",
    "Message",
    "NetParams",
    "Parallel",
    "Permute",
    "PortViolation",
    "PortViolationError",
    "Program",
    "RunReport",
    "ScaleMap",
    "Send",
    "Sequential",
    "SimulationError",
    "cost_from_counts",
    "cost_of",
    "parallel_profile",
    "run",
    "sequential_profile",
]
