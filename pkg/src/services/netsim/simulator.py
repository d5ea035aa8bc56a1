"""
Round-synchronous p-port network simulator

Executes a Program over N processors and accounts for its communication
cost. In every round each processor may send at most p messages and
receive at most p messages. Sends are computed from the state at the start
of the round and delivered at its end, sorted by sender.

Cost model:
    C1   = number of rounds
    m_t  = size (in field elements) of the largest message of round t
    C2   = sum of m_t
    cost = alpha * C1 + beta * ceil(log2 q) * C2

Usage:
    from src.services.netsim import NetParams, run

    report = run(program, NetParams(N=4, p=1, q=13), inputs)
    print(report.C1, report.C2, report.cost)
"""

import json
import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, TextIO, Union

import galois
from pydantic import BaseModel, ConfigDict, Field

from src.core.field import bits_per_element
from src.services.netsim.program import Message, Program, SimulationError

logger = logging.getLogger(__name__)


class PortViolationError(SimulationError):
    """A processor exceeded its p ports in one round"""

    def __init__(self, round: int, pid: int, count: int, direction: str):
        self.round = round
        self.pid = pid
        self.count = count
        self.direction = direction
        super().__init__(
            f"round {round}: processor {pid} {direction} {count} messages"
        )


class NetParams(BaseModel):
    """Parameters of the p-port communication model."""

    model_config = ConfigDict(frozen=True)

    N: int = Field(1, ge=1, description="Number of processors")
    p: int = Field(1, ge=1, description="Ports per processor")
    alpha: float = Field(0.0, ge=0, description="Start-up cost per round")
    beta: float = Field(1.0, ge=0, description="Transfer cost per bit")
    q: int = Field(2, ge=2, description="Field modulus")
    W: int = Field(1, ge=1, description="Field elements per data symbol")

    @property
    def bits(self) -> int:
        """ceil(log2 q)"""
        return bits_per_element(self.q)


@dataclass(frozen=True)
class PortViolation:
    """A recorded port violation (non-strict runs)."""
    round: int
    pid: int
    count: int
    direction: str


@dataclass
class RunReport:
    """
    Measured outcome of one simulator run.

    Attributes:
        C1: Rounds executed
        mt: Per-round maximum message size in field elements
        C2: Sum of mt
        cost: alpha * C1 + beta * ceil(log2 q) * C2
        outputs: Final symbol of every processor
        violations: Port violations recorded in non-strict mode
    """
    C1: int
    mt: List[int]
    C2: int
    cost: float
    outputs: Dict[int, galois.FieldArray]
    violations: List[PortViolation] = field(default_factory=list)
    messages: int = 0

    @property
    def profile(self) -> List[int]:
        """Alias of mt for comparison with predicted profiles"""
        return self.mt


def cost_of(report: RunReport, params: NetParams) -> float:
    """alpha * C1 + beta * ceil(log2 q) * C2"""
    return cost_from_counts(report.C1, report.C2, params)


def cost_from_counts(C1: int, C2: int, params: NetParams) -> float:
    """Cost of a schedule given its round count and C2."""
    return params.alpha * C1 + params.beta * params.bits * C2


def _normalize_inputs(inputs, N: int) -> Dict[int, galois.FieldArray]:
    if isinstance(inputs, Mapping):
        missing = [pid for pid in range(N) if pid not in inputs]
        if missing:
            raise SimulationError(f"no input for processors {missing[:5]}")
        return {pid: inputs[pid] for pid in range(N)}
    if len(inputs) != N:
        raise SimulationError(f"expected {N} inputs, got {len(inputs)}")
    return {pid: inputs[pid] for pid in range(N)}


def run(
    program: Program,
    params: NetParams,
    inputs: Union[Mapping[int, galois.FieldArray], galois.FieldArray],
    trace: Optional[TextIO] = None,
    strict: bool = True,
) -> RunReport:
    """
    Execute ``program`` for exactly ``program.rounds`` rounds.

    Args:
        program: Program whose members are processor ids in [0, N)
        params: Network parameters (N, p, alpha, beta, q, W)
        inputs: Symbol per processor, as a mapping or an (N, W) array
        trace: Optional text sink receiving one JSON line per message
        strict: Raise on port violations (True) or record them (False)

    Returns:
        RunReport; processors outside the program output their input

    Raises:
        PortViolationError: strict run where a processor sends or receives
            more than p messages in a round
    """
    started = time.perf_counter()
    N, p = params.N, params.p
    outside = [pid for pid in program.members if not 0 <= pid < N]
    if outside:
        raise SimulationError(f"program members {outside[:5]} outside [0, {N})")

    symbols = _normalize_inputs(inputs, N)
    states = {pid: program.init(pid, symbols[pid]) for pid in program.members}
    inboxes: Dict[int, List[Message]] = {pid: [] for pid in program.members}
    mt: List[int] = []
    violations: List[PortViolation] = []
    total_messages = 0

    for t in range(1, program.rounds + 1):
        outgoing: List[Message] = []
        for pid in sorted(program.members):
            sends, states[pid] = program.step(t, pid, states[pid], inboxes[pid])
            if len(sends) > p:
                _port_violation(violations, strict, t, pid, len(sends), "sent")
            for send in sends:
                outgoing.append(Message(pid, send.dst, send.payload, t, send.keys))

        received = defaultdict(list)
        for message in sorted(outgoing, key=lambda m: (m.src, m.dst)):
            if message.dst not in inboxes:
                raise SimulationError(
                    f"round {t}: message from {message.src} to non-member {message.dst}"
                )
            received[message.dst].append(message)
            if trace is not None:
                trace.write(json.dumps({
                    "round": t,
                    "src": message.src,
                    "dst": message.dst,
                    "size": message.size,
                }) + "\n")

        for pid, box in received.items():
            if len(box) > p:
                _port_violation(violations, strict, t, pid, len(box), "received")

        inboxes = {pid: received.get(pid, []) for pid in program.members}
        mt.append(max((m.size for m in outgoing), default=0))
        total_messages += len(outgoing)

    outputs = dict(symbols)
    for pid in program.members:
        outputs[pid] = program.finalize(pid, states[pid], inboxes[pid])

    C1 = program.rounds
    C2 = sum(mt)
    report = RunReport(
        C1=C1,
        mt=mt,
        C2=C2,
        cost=cost_from_counts(C1, C2, params),
        outputs=outputs,
        violations=violations,
        messages=total_messages,
    )
    logger.debug(
        "Run completed",
        extra={
            "event": "run_completed",
            "C1": C1,
            "C2": C2,
            "messages": total_messages,
            "duration_ms": round((time.perf_counter() - started) * 1000, 3),
        }
    )
    return report


def _port_violation(violations, strict, t, pid, count, direction):
    if strict:
        logger.warning(
            "Port violation",
            extra={"event": "port_violation", "round": t, "pid": pid, "count": count}
        )
        raise PortViolationError(t, pid, count, direction)
    violations.append(PortViolation(t, pid, count, direction))
