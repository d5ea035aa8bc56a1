"""
Network Simulator Test Suite

Tests the round-synchronous p-port simulator, cost accounting, tracing
and the program combinators.
"""

import io
import json

import numpy as np
import pytest

from src.services.netsim import (
    LocalMap,
    Message,
    NetParams,
    Parallel,
    Permute,
    PortViolationError,
    Program,
    ScaleMap,
    Send,
    Sequential,
    SimulationError,
    cost_from_counts,
    cost_of,
    parallel_profile,
    run,
    sequential_profile,
)


class ShiftProgram(Program):
    """Every member passes its symbol to the next member, ``rounds`` times."""

    def __init__(self, members, rounds=1):
        super().__init__(members, rounds)

    def init(self, pid, symbol):
        return symbol

    def step(self, t, pid, state, inbox):
        if inbox:
            state = inbox[0].payload
        nxt = self.members[(self.local_index(pid) + 1) % len(self.members)]
        return [Send(nxt, state)], state

    def finalize(self, pid, state, inbox):
        return inbox[0].payload if inbox else state


class FanOutProgram(Program):
    """Member 0 sends to every other member in one round."""

    def __init__(self, members):
        super().__init__(members, rounds=1)

    def init(self, pid, symbol):
        return symbol

    def step(self, t, pid, state, inbox):
        if self.local_index(pid) == 0:
            return [Send(dst, state) for dst in self.members[1:]], state
        return [], state

    def finalize(self, pid, state, inbox):
        return inbox[0].payload if inbox else state


# ============================================
# FIXTURES
# ============================================

@pytest.fixture
def params():
    return NetParams(N=4, p=1, alpha=1.0, beta=1.0, q=13, W=1)


@pytest.fixture
def inputs(gf13):
    return gf13.GF([[1], [2], [3], [4]])


# ============================================
# SIMULATOR TESTS
# ============================================

class TestRun:
    """Execution and cost accounting"""

    def test_shift_outputs(self, gf13, params, inputs):
        report = run(ShiftProgram([0, 1, 2, 3]), params, inputs)
        assert [int(report.outputs[pid][0]) for pid in range(4)] == [4, 1, 2, 3]

    def test_cost_accounting(self, params, inputs):
        report = run(ShiftProgram([0, 1, 2, 3], rounds=3), params, inputs)
        assert report.C1 == 3
        assert report.mt == [1, 1, 1]
        assert report.C2 == 3
        # alpha * 3 + beta * 4 bits * 3
        assert report.cost == pytest.approx(15.0)
        assert cost_of(report, params) == report.cost
        assert report.messages == 12

    def test_width_scales_c2(self, gf13):
        params = NetParams(N=4, p=1, q=13, W=3)
        X = gf13.GF.Random((4, 3), seed=1)
        report = run(ShiftProgram([0, 1, 2, 3], rounds=2), params, X)
        assert report.C1 == 2
        assert report.C2 == 6

    def test_non_members_pass_through(self, params, inputs):
        report = run(ShiftProgram([0, 1]), params, inputs)
        assert int(report.outputs[2][0]) == 3
        assert int(report.outputs[3][0]) == 4

    def test_mapping_inputs(self, gf13, params):
        inputs = {pid: gf13.GF([pid]) for pid in range(4)}
        report = run(ShiftProgram([0, 1, 2, 3]), params, inputs)
        assert int(report.outputs[0][0]) == 3

    def test_missing_input(self, gf13, params):
        with pytest.raises(SimulationError):
            run(ShiftProgram([0, 1]), params, {0: gf13.GF([1])})

    def test_member_outside_network(self, params, inputs):
        with pytest.raises(SimulationError):
            run(ShiftProgram([0, 7]), params, inputs)

    def test_zero_round_program(self, params, inputs):
        report = run(LocalMap([0, 1, 2, 3], lambda pid, x: x + x), params, inputs)
        assert report.C1 == 0
        assert report.C2 == 0
        assert report.cost == 0
        assert int(report.outputs[3][0]) == 8


class TestPorts:
    """Port constraint enforcement"""

    def test_strict_violation_raises(self, params, inputs):
        with pytest.raises(PortViolationError) as exc_info:
            run(FanOutProgram([0, 1, 2]), params, inputs)
        assert exc_info.value.round == 1
        assert exc_info.value.pid == 0
        assert exc_info.value.count == 2

    def test_lenient_run_records_violation(self, params, inputs):
        report = run(FanOutProgram([0, 1, 2]), params, inputs, strict=False)
        assert len(report.violations) == 1
        assert report.violations[0].direction == "sent"

    def test_more_ports_allowed(self, inputs):
        params = NetParams(N=4, p=3, q=13)
        report = run(FanOutProgram([0, 1, 2, 3]), params, inputs)
        assert [int(report.outputs[pid][0]) for pid in range(4)] == [1, 1, 1, 1]
        assert report.violations == []

    def test_self_message_rejected(self, gf13):
        with pytest.raises(SimulationError):
            Message(src=1, dst=1, payload=gf13.GF([1]), round=1)

    def test_empty_payload_rejected(self, gf13):
        with pytest.raises(SimulationError):
            Message(src=0, dst=1, payload=gf13.GF.Zeros(0), round=1)

    def test_program_messaging_itself(self, params, inputs):
        with pytest.raises(SimulationError):
            run(ShiftProgram([2]), params, inputs)


class TestTrace:
    """JSON-lines message dump"""

    def test_trace_lines(self, params, inputs):
        sink = io.StringIO()
        run(ShiftProgram([0, 1, 2, 3]), params, inputs, trace=sink)
        lines = [json.loads(line) for line in sink.getvalue().splitlines()]
        assert len(lines) == 4
        assert lines[0] == {"round": 1, "src": 0, "dst": 1, "size": 1}
        assert [line["src"] for line in lines] == [0, 1, 2, 3]


# ============================================
# COMBINATOR TESTS
# ============================================

class TestCombinators:
    """Sequential, Parallel, LocalMap and ScaleMap"""

    def test_sequential_chains_outputs(self, params, inputs):
        program = Sequential([
            ShiftProgram([0, 1, 2, 3]),
            LocalMap([0, 1, 2, 3], lambda pid, x: x * x),
            ShiftProgram([0, 1, 2, 3]),
        ])
        report = run(program, params, inputs)
        assert program.rounds == 2
        # squares of (4, 1, 2, 3) shifted once more
        assert [int(report.outputs[pid][0]) for pid in range(4)] == [9, 3, 1, 4]

    def test_sequential_with_leading_local_stage(self, gf13, params, inputs):
        program = Sequential([
            ScaleMap({pid: gf13.GF(2) for pid in range(4)}),
            ShiftProgram([0, 1, 2, 3]),
        ])
        report = run(program, params, inputs)
        assert [int(report.outputs[pid][0]) for pid in range(4)] == [8, 2, 4, 6]

    def test_parallel_parts_of_different_length(self, params, inputs):
        program = Parallel([ShiftProgram([0, 1], rounds=1), ShiftProgram([2, 3], rounds=2)])
        report = run(program, params, inputs)
        assert program.rounds == 2
        assert report.mt == [1, 1]
        assert [int(report.outputs[pid][0]) for pid in range(4)] == [2, 1, 3, 4]

    def test_parallel_rejects_overlap(self):
        with pytest.raises(ValueError):
            Parallel([ShiftProgram([0, 1]), ShiftProgram([1, 2])])

    def test_scale_map(self, gf13, params, inputs):
        program = ScaleMap({1: gf13.GF(5)})
        report = run(program, params, inputs)
        assert int(report.outputs[1][0]) == 10
        assert int(report.outputs[0][0]) == 1

    def test_permute_moves_symbols(self, params, inputs):
        program = Permute({0: 2, 2: 0, 1: 1})
        assert program.members == (0, 2)
        report = run(program, params, inputs)
        assert report.mt == [1]
        assert [int(report.outputs[pid][0]) for pid in range(4)] == [3, 2, 1, 4]

    def test_identity_permute_has_no_rounds(self, params, inputs):
        report = run(Permute({0: 0, 3: 3}), params, inputs)
        assert report.C1 == 0
        assert int(report.outputs[3][0]) == 4

    def test_permute_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            Permute({0: 1})

    def test_duplicate_members_rejected(self):
        with pytest.raises(ValueError):
            ShiftProgram([0, 0])


class TestProfiles:
    """Profile composition helpers"""

    def test_parallel_profile_is_elementwise_max(self):
        assert parallel_profile([[1, 3], [2, 1, 4]]) == [2, 3, 4]

    def test_sequential_profile_concatenates(self):
        assert sequential_profile([[1, 3], [], [2]]) == [1, 3, 2]

    def test_cost_from_counts(self):
        params = NetParams(N=2, p=1, alpha=2.0, beta=0.5, q=257)
        assert cost_from_counts(3, 4, params) == pytest.approx(2.0 * 3 + 0.5 * 9 * 4)

    def test_params_are_frozen(self, params):
        with pytest.raises(Exception):
            params.p = 2
