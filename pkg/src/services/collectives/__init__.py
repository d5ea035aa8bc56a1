"""
Collective communication service.

Binomial-tree one-to-all broadcast and all-to-one reduce.
"""

from .collectives import (
    BroadcastProgram,
    GroupSpec,
    ReduceProgram,
    binomial_tree,
    broadcast_program,
    cost_broadcast,
    cost_broadcast_pipelined_multi_port,
    cost_broadcast_pipelined_one_port,
    predicted_profile_broadcast,
    reduce_program,
)

__all__ = [
    "BroadcastProgram",
    "GroupSpec",
    "ReduceProgram",
    "binomial_tree",
    "broadcast_program",
    "cost_broadcast",
    "cost_broadcast_pipelined_multi_port",
    "cost_broadcast_pipelined_one_port",
    "predicted_profile_broadcast",
    "reduce_program",
]
