"""
Binomial-tree broadcast and reduce

One-to-all broadcast: the root's symbol reaches every group member.
All-to-one reduce: the root obtains the entrywise field sum of every
member's symbol. Reduce runs the broadcast tree backwards.

Tree shape: the member list (root first) is split into p+1 contiguous
parts whose sizes differ by at most one, largest first. The head of the
first part sends to the head of each other part, then every part recurses.
This finishes in ceil(log_{p+1} n) rounds with every processor using at
most p ports per round.

Features:
- GroupSpec value object with validation
- Broadcast and reduce as netsim Programs over global processor ids
- Closed-form cost and per-round profile predictors
- Cost formulas of the pipelined alternatives (evaluation only)
"""

import logging
import math
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.field import ceil_log
from src.services.netsim import NetParams, Program, Send

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class GroupSpec(BaseModel):
    """Processor group of a broadcast or reduce."""

    model_config = ConfigDict(frozen=True)

    members: Tuple[int, ...] = Field(..., min_length=1, description="Ordered processor ids")
    root: int = Field(..., description="Broadcaster or reduce sink")

    @model_validator(mode="after")
    def _check_members(self) -> "GroupSpec":
        if len(set(self.members)) != len(self.members):
            raise ValueError(f"duplicate members in {self.members}")
        if self.root not in self.members:
            raise ValueError(f"root {self.root} is not a member")
        return self

    @property
    def size(self) -> int:
        return len(self.members)

    def ordered(self) -> List[int]:
        """Root first, then the other members in group order"""
        return [self.root] + [m for m in self.members if m != self.root]


def _split_sizes(n: int, parts: int) -> List[int]:
    base, extra = divmod(n, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def binomial_tree(group: GroupSpec, p: int) -> List[List[Edge]]:
    """
    Broadcast edges per round.

    Returns:
        rounds[t] lists the (sender, receiver) pairs of round t+1
    """
    rounds: List[List[Edge]] = [[] for _ in range(ceil_log(group.size, p + 1))]

    def split(seq: List[int], depth: int) -> None:
        if len(seq) <= 1:
            return
        start = 0
        parts = []
        for size in _split_sizes(len(seq), p + 1):
            if size:
                parts.append(seq[start:start + size])
            start += size
        for part in parts[1:]:
            rounds[depth].append((seq[0], part[0]))
        for part in parts:
            split(part, depth + 1)

    split(group.ordered(), 0)
    return rounds


class _TreeProgram(Program):
    def __init__(self, group: GroupSpec, W: int, p: int, reverse: bool):
        tree = binomial_tree(group, p)
        super().__init__(group.members, rounds=len(tree))
        self.group = group
        self.W = W
        self.p = p
        # pid -> round -> receivers
        self._out: Dict[int, Dict[int, List[int]]] = defaultdict(lambda: defaultdict(list))
        for depth, edges in enumerate(tree):
            t = self.rounds - depth if reverse else depth + 1
            for src, dst in edges:
                if reverse:
                    src, dst = dst, src
                self._out[src][t].append(dst)

    def _check_width(self, symbol) -> None:
        if symbol.size != self.W:
            raise ValueError(f"expected a {self.W}-element symbol, got {symbol.size}")


class BroadcastProgram(_TreeProgram):
    """Root symbol copied to every member."""

    def __init__(self, group: GroupSpec, W: int, p: int):
        super().__init__(group, W, p, reverse=False)

    def init(self, pid, symbol):
        if pid == self.group.root:
            self._check_width(symbol)
            return symbol
        return None

    def step(self, t, pid, state, inbox):
        if inbox:
            state = inbox[0].payload
        receivers = self._out.get(pid, {}).get(t, [])
        return [Send(dst, state) for dst in receivers], state

    def finalize(self, pid, state, inbox):
        if inbox:
            state = inbox[0].payload
        return state


class ReduceProgram(_TreeProgram):
    """Entrywise sum of all member symbols at the root."""

    def __init__(self, group: GroupSpec, W: int, p: int):
        super().__init__(group, W, p, reverse=True)

    def init(self, pid, symbol):
        self._check_width(symbol)
        # (own input, running sum)
        return symbol, symbol.copy()

    def _absorb(self, state, inbox):
        own, acc = state
        for message in inbox:
            acc = acc + message.payload
        return own, acc

    def step(self, t, pid, state, inbox):
        state = self._absorb(state, inbox)
        receivers = self._out.get(pid, {}).get(t, [])
        return [Send(dst, state[1]) for dst in receivers], state

    def finalize(self, pid, state, inbox):
        own, acc = self._absorb(state, inbox)
        return acc if pid == self.group.root else own


def broadcast_program(group: GroupSpec, W: int, p: int) -> Program:
    """Binomial-tree broadcast of the root's W-element symbol."""
    return BroadcastProgram(group, W, p)


def reduce_program(group: GroupSpec, W: int, p: int) -> Program:
    """
    Binomial-tree reduce to the root.

    Non-root members output their own input unchanged.
    """
    return ReduceProgram(group, W, p)


def predicted_profile_broadcast(n: int, W: int, p: int) -> List[int]:
    """Per-round m_t of broadcast or reduce over n members."""
    return [W] * ceil_log(n, p + 1)


def cost_broadcast(n: int, W: int, params: NetParams) -> float:
    """(alpha + beta ceil(log2 q) W) * ceil(log_{p+1} n)"""
    return (params.alpha + params.beta * params.bits * W) * ceil_log(n, params.p + 1)


def cost_broadcast_pipelined_one_port(n: int, W: int, params: NetParams) -> float:
    """
    Cost of the optimal pipelined one-port broadcast.

    (sqrt((ceil(log2 n) - 1) alpha) + sqrt(beta ceil(log2 q) W))^2
    Formula only: no program implements it.
    """
    if n <= 1:
        return 0.0
    rounds = max(ceil_log(n, 2) - 1, 0)
    return (math.sqrt(rounds * params.alpha) + math.sqrt(params.beta * params.bits * W)) ** 2


def cost_broadcast_pipelined_multi_port(n: int, W: int, params: NetParams, segments: int) -> float:
    """
    Cost of the segmented multi-port broadcast with ``segments`` packets.

    (ceil(segments / p) + ceil(log_{p+1} n)) * (alpha + beta ceil(W ceil(log2 q) / segments))
    Formula only: no program implements it.
    """
    if segments < 1:
        raise ValueError(f"segments must be >= 1, got {segments}")
    if n <= 1:
        return 0.0
    per_packet = -(-(W * params.bits) // segments)
    rounds = -(-segments // params.p) + ceil_log(n, params.p + 1)
    return rounds * (params.alpha + params.beta * per_packet)
