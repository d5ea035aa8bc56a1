"""
Processor programs and their composition

A Program describes what every member processor does in each round of a
fixed-length schedule. The simulator calls ``init`` once per member, then
``step`` for rounds 1..rounds with the messages delivered at the end of the
previous round, and finally ``finalize`` with the messages of the last round.

Programs address processors by global id. Composition combinators let the
encoders build large schedules out of small ones:

- Sequential: stages run back to back, each stage's outputs feed the next
- Parallel: disjoint processor sets run side by side, rounds = max
- LocalMap: a zero-round local transformation of each member's symbol
- Permute: one round moving every symbol along a permutation of processors

Processors that are not members of a stage keep their symbol unchanged
through that stage.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Sequence, Tuple

import galois


class SimulationError(ValueError):
    """Base error for simulator runs"""


@dataclass(frozen=True)
class Send:
    """
    A message emitted by a program.

    Attributes:
        dst: Destination processor id
        payload: Field array; its size counts towards the round's m_t
        keys: Program bookkeeping travelling with the payload (not counted)
    """
    dst: int
    payload: galois.FieldArray
    keys: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Message:
    """A delivered message as seen by the receiver."""
    src: int
    dst: int
    payload: galois.FieldArray
    round: int
    keys: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.src == self.dst:
            raise SimulationError(f"processor {self.src} cannot message itself")
        if self.payload.size < 1:
            raise SimulationError(f"empty payload from {self.src} to {self.dst}")

    @property
    def size(self) -> int:
        """Number of field elements carried"""
        return int(self.payload.size)


class Program(ABC):
    """
    Deterministic per-processor behaviour over a fixed number of rounds.

    Attributes:
        members: Participating processor ids; the position of an id is its
            local index inside the program
        rounds: Number of communication rounds
    """

    def __init__(self, members: Sequence[int], rounds: int):
        members = tuple(int(m) for m in members)
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate members in {members}")
        if rounds < 0:
            raise ValueError(f"rounds must be non-negative, got {rounds}")
        self.members = members
        self.rounds = rounds
        self._local = {pid: i for i, pid in enumerate(members)}

    def local_index(self, pid: int) -> int:
        """Position of ``pid`` in ``members``"""
        return self._local[pid]

    @abstractmethod
    def init(self, pid: int, symbol: galois.FieldArray) -> Any:
        """Initial local state of ``pid`` holding ``symbol``."""

    @abstractmethod
    def step(
        self,
        t: int,
        pid: int,
        state: Any,
        inbox: List[Message],
    ) -> Tuple[List[Send], Any]:
        """Round t (1-based): consume last round's inbox and emit sends."""

    @abstractmethod
    def finalize(self, pid: int, state: Any, inbox: List[Message]) -> galois.FieldArray:
        """Output symbol after the last round's messages arrive."""


class LocalMap(Program):
    """Zero-round program applying ``fn(pid, symbol)`` at each member."""

    def __init__(self, members: Sequence[int], fn: Callable[[int, Any], Any]):
        super().__init__(members, rounds=0)
        self.fn = fn

    def init(self, pid, symbol):
        return self.fn(pid, symbol)

    def step(self, t, pid, state, inbox):
        return [], state

    def finalize(self, pid, state, inbox):
        return state


class ScaleMap(LocalMap):
    """Zero-round program multiplying each member's symbol by its own scalar."""

    def __init__(self, scales: Mapping[int, Any]):
        self.scales = dict(scales)
        super().__init__(list(self.scales), self._scale)

    def _scale(self, pid, symbol):
        return self.scales[pid] * symbol


class Permute(Program):
    """
    Symbol of processor s moves to routes[s] in a single round.

    ``routes`` must map its keys onto themselves; fixed points are dropped,
    and an identity permutation is a zero-round program.
    """

    def __init__(self, routes: Mapping[int, int]):
        moved = {int(src): int(dst) for src, dst in routes.items() if int(src) != int(dst)}
        if sorted(moved) != sorted(moved.values()):
            raise ValueError(f"routes {dict(routes)} are not a permutation")
        super().__init__(sorted(moved), rounds=1 if moved else 0)
        self.routes = moved

    def init(self, pid, symbol):
        return symbol

    def step(self, t, pid, state, inbox):
        return [Send(self.routes[pid], state)], state

    def finalize(self, pid, state, inbox):
        return inbox[0].payload if inbox else state


@dataclass
class _SeqState:
    stage: int
    inner: Any


class Sequential(Program):
    """
    Stages executed one after another.

    The output symbol of every processor after stage i is its input to
    stage i+1. Stage boundaries are derived from the stage round counts,
    and zero-round stages are applied at the boundary they sit on.
    """

    def __init__(self, stages: Sequence[Program]):
        stages = list(stages)
        members: Dict[int, None] = {}
        for stage in stages:
            for pid in stage.members:
                members.setdefault(pid, None)
        super().__init__(list(members), rounds=sum(s.rounds for s in stages))
        self.stages = stages

        self._start = []
        offset = 0
        for stage in stages:
            self._start.append(offset)
            offset += stage.rounds

    def _stage_of_round(self, t: int) -> int:
        for i, stage in enumerate(self.stages):
            if stage.rounds and self._start[i] < t <= self._start[i] + stage.rounds:
                return i
        raise IndexError(f"round {t} outside 1..{self.rounds}")

    def _enter(self, index: int, pid: int, symbol):
        stage = self.stages[index]
        if pid in stage._local:
            return stage.init(pid, symbol)
        return symbol

    def _leave(self, index: int, pid: int, inner, inbox):
        stage = self.stages[index]
        if pid in stage._local:
            return stage.finalize(pid, inner, inbox)
        return inner

    def _advance(self, pid: int, state: _SeqState, target: int, inbox):
        while state.stage < target:
            symbol = self._leave(state.stage, pid, state.inner, inbox)
            inbox = []
            state = _SeqState(state.stage + 1, None)
            if state.stage < len(self.stages):
                state.inner = self._enter(state.stage, pid, symbol)
            else:
                state.inner = symbol
        return state, inbox

    def init(self, pid, symbol):
        if not self.stages:
            return _SeqState(0, symbol)
        return _SeqState(0, self._enter(0, pid, symbol))

    def step(self, t, pid, state, inbox):
        target = self._stage_of_round(t)
        state, inbox = self._advance(pid, state, target, inbox)
        stage = self.stages[target]
        if pid not in stage._local:
            return [], state
        sends, inner = stage.step(t - self._start[target], pid, state.inner, inbox)
        return sends, _SeqState(target, inner)

    def finalize(self, pid, state, inbox):
        state, _ = self._advance(pid, state, len(self.stages), inbox)
        return state.inner


@dataclass
class _ParState:
    part: int
    inner: Any
    done: bool = False
    output: Any = None


class Parallel(Program):
    """Programs on disjoint processor sets running in lockstep."""

    def __init__(self, parts: Sequence[Program]):
        parts = list(parts)
        owner: Dict[int, int] = {}
        for i, part in enumerate(parts):
            for pid in part.members:
                if pid in owner:
                    raise ValueError(f"processor {pid} belongs to two parallel parts")
                owner[pid] = i
        super().__init__(list(owner), rounds=max((p.rounds for p in parts), default=0))
        self.parts = parts
        self._owner = owner

    def init(self, pid, symbol):
        index = self._owner[pid]
        return _ParState(index, self.parts[index].init(pid, symbol))

    def _close(self, pid, state: _ParState, inbox) -> _ParState:
        if state.done:
            return state
        output = self.parts[state.part].finalize(pid, state.inner, inbox)
        return _ParState(state.part, None, True, output)

    def step(self, t, pid, state, inbox):
        part = self.parts[state.part]
        if t > part.rounds:
            return [], self._close(pid, state, inbox)
        sends, inner = part.step(t, pid, state.inner, inbox)
        return sends, _ParState(state.part, inner)

    def finalize(self, pid, state, inbox):
        return self._close(pid, state, inbox).output


def parallel_profile(profiles: Sequence[Sequence[int]]) -> List[int]:
    """Per-round m_t of programs run in parallel (elementwise max)."""
    length = max((len(p) for p in profiles), default=0)
    out = [0] * length
    for p in profiles:
        for i, m in enumerate(p):
            out[i] = max(out[i], m)
    return out


def sequential_profile(profiles: Sequence[Sequence[int]]) -> List[int]:
    """Per-round m_t of programs run back to back (concatenation)."""
    out: List[int] = []
    for p in profiles:
        out.extend(p)
    return out
