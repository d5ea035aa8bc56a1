"""
Universal all-to-all encode (prepare-and-shoot)

Every processor k of K holds x_k and must end with (x.C)_k for an arbitrary
K x K matrix C. The schedule is fixed; only the coding coefficients depend
on C.

Prepare phase (Tp rounds): windowed broadcasts. In round t processor k
sends everything it holds to k + rho * (p+1)^(Tp-t) for rho = 1..p, so after
Tp rounds it holds the m = (p+1)^Tp symbols x_{k-o}, o in [0, m).

Shoot phase (Ts rounds): processor k forms n = (p+1)^Ts partial sums, one
for each of k, k+m, ..., k+(n-1)m, and the partial sums are accumulated
along a (p+1)-ary tree towards their destinations.

The windows of the n senders cover n*m >= K consecutive indices, so the
delta = n*m - K lowest offsets are counted twice and are subtracted
locally. Each processor holds those symbols already, so the correction
needs no communication.

Features:
- Phase-length selection keeping (n-1)m < K and C1 = ceil(log_{p+1} K)
- Program over arbitrary global member ids (nested use by the other encoders)
- Exact per-round cost profile, closed-form cost and lower bounds
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import galois
import numpy as np

from src.core.field import ceil_log
from src.core.matrix import Mat, ShapeMismatchError, concat_rows
from src.services.netsim import Message, NetParams, Program, Send, cost_from_counts

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhasePlan:
    """
    Round split between the prepare and shoot phases.

    Attributes:
        K: Processor count
        p: Ports used
        Tp: Prepare rounds, m = (p+1)^Tp
        Ts: Shoot rounds, n = (p+1)^Ts
    """
    K: int
    p: int
    Tp: int
    Ts: int

    def __post_init__(self):
        if self.Tp < 0 or self.Ts < 0:
            raise ValueError(f"negative phase length in {self}")
        if not (self.n - 1) * self.m < self.K <= self.n * self.m:
            raise ValueError(
                f"plan Tp={self.Tp}, Ts={self.Ts} violates (n-1)m < K <= nm for K={self.K}"
            )
        if self.Tp + self.Ts != ceil_log(self.K, self.p + 1):
            raise ValueError(f"plan {self} does not use ceil(log_(p+1) K) rounds")

    @property
    def m(self) -> int:
        return (self.p + 1) ** self.Tp

    @property
    def n(self) -> int:
        return (self.p + 1) ** self.Ts

    @property
    def delta(self) -> int:
        """Number of doubly counted offsets"""
        return self.n * self.m - self.K


@dataclass(frozen=True)
class WindowSets:
    """Index windows of processor k (multisets, indices mod K)."""
    k: int
    R_minus: Tuple[int, ...]
    S_minus: Tuple[int, ...]


def choose_phase_lengths(K: int, p: int) -> PhasePlan:
    """
    Balanced split of ceil(log_{p+1} K) rounds, repaired when needed.

    L is the largest integer with (p+1)^L < K. Even L gives Tp = L/2 + 1,
    Ts = L/2; odd L gives Tp = Ts = (L+1)/2. While (n-1)m >= K one round
    moves from shoot to prepare.
    """
    if K < 2:
        raise ValueError(f"phase lengths need K >= 2, got {K}")
    base = p + 1
    L = 0
    while base ** (L + 1) < K:
        L += 1

    if L % 2 == 0:
        Tp, Ts = L // 2 + 1, L // 2
    else:
        Tp = Ts = (L + 1) // 2

    while (base ** Ts - 1) * base ** Tp >= K:
        Tp, Ts = Tp + 1, Ts - 1

    return PhasePlan(K=K, p=p, Tp=Tp, Ts=Ts)


def window_sets(k: int, plan: PhasePlan) -> WindowSets:
    """R-_k = {k - l : l < m} and S-_k = {k - l m : l < n}, mod K."""
    K = plan.K
    return WindowSets(
        k=k,
        R_minus=tuple((k - l) % K for l in range(plan.m)),
        S_minus=tuple((k - l * plan.m) % K for l in range(plan.n)),
    )


def effective_ports(K: int, p: int) -> int:
    """Ports worth using among K processors."""
    return max(1, min(p, K - 1))


@dataclass
class _State:
    offsets: Tuple[int, ...]
    data: galois.FieldArray
    w: Optional[galois.FieldArray] = None
    correction: Optional[galois.FieldArray] = None


class PrepareAndShoot(Program):
    """
    All-to-all encode of an arbitrary square matrix.

    Args:
        C: K x K matrix; member i ends with (x.C)_i
        p: Ports per processor
        members: Global ids of the K processors (default 0..K-1)
    """

    def __init__(self, C: Mat, p: int, members: Optional[Sequence[int]] = None):
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ShapeMismatchError(f"all-to-all encode needs a square matrix, got {C.shape}")
        K = C.shape[0]
        members = tuple(range(K)) if members is None else tuple(members)
        if len(members) != K:
            raise ShapeMismatchError(f"{len(members)} members for a {K}x{K} matrix")

        self.C = C
        self.K = K
        self.p = effective_ports(K, p)
        self.plan = choose_phase_lengths(K, self.p) if K > 1 else None
        super().__init__(members, rounds=0 if self.plan is None else self.plan.Tp + self.plan.Ts)

        if self.plan is not None:
            self._shoot_select = self._build_shoot_selection()

    def _build_shoot_selection(self) -> List[List[np.ndarray]]:
        base, n = self.p + 1, self.plan.n
        ell = np.arange(n)
        selection = []
        for t in range(1, self.plan.Ts + 1):
            low = base ** (t - 1)
            alive = ell % low == 0
            digit = (ell // low) % base
            selection.append([ell[alive & (digit == rho)] for rho in range(self.p + 1)])
        return selection

    def init(self, pid, symbol):
        if self.plan is None:
            return symbol
        return _State(offsets=(0,), data=symbol[np.newaxis, :])

    def _merge_prepare(self, state: _State, inbox: List[Message]) -> _State:
        if not inbox:
            return state
        offsets = list(state.offsets)
        parts = [state.data]
        for message in inbox:
            offsets.extend(message.keys)
            parts.append(message.payload)
        return _State(offsets=tuple(offsets), data=concat_rows(parts))

    def _start_shoot(self, k: int, state: _State) -> _State:
        plan, K = self.plan, self.K
        order = np.argsort(state.offsets, kind="stable")
        X = state.data[order]
        rows = (k - np.arange(plan.m)) % K
        cols = (k + np.arange(plan.n) * plan.m) % K
        w = self.C[np.ix_(rows, cols)].T @ X

        delta = plan.delta
        correction = self.C[rows[:delta], k] @ X[:delta] if delta else None
        return _State(offsets=state.offsets, data=X, w=w, correction=correction)

    def _merge_shoot(self, state: _State, inbox: List[Message]) -> _State:
        for message in inbox:
            state.w[np.asarray(message.keys)] += message.payload
        return state

    def step(self, t, pid, state, inbox):
        k = self.local_index(pid)
        plan, K, base = self.plan, self.K, self.p + 1

        if t <= plan.Tp:
            state = self._merge_prepare(state, inbox)
            stride = base ** (plan.Tp - t)
            sends, loopback = [], []
            for rho in range(1, self.p + 1):
                shift = rho * stride
                keys = tuple(o + shift for o in state.offsets)
                dst = (k + shift) % K
                if dst == k:
                    loopback.append(Message(-1, pid, state.data, t, keys))
                else:
                    sends.append(Send(self.members[dst], state.data, keys))
            return sends, self._merge_prepare(state, loopback)

        if state.w is None:
            state = self._start_shoot(k, self._merge_prepare(state, inbox))
        else:
            state = self._merge_shoot(state, inbox)

        t_shoot = t - plan.Tp
        low = base ** (t_shoot - 1)
        sends = []
        for rho in range(1, self.p + 1):
            ell = self._shoot_select[t_shoot - 1][rho]
            if ell.size == 0:
                continue
            dst = (k + rho * low * plan.m) % K
            keys = tuple(int(l) - rho * low for l in ell)
            sends.append(Send(self.members[dst], state.w[ell], keys))
        return sends, state

    def finalize(self, pid, state, inbox):
        if self.plan is None:
            return self.C[0, 0] * state

        k = self.local_index(pid)
        if state.w is None:
            state = self._start_shoot(k, self._merge_prepare(state, inbox))
        else:
            state = self._merge_shoot(state, inbox)

        if state.correction is None:
            return state.w[0]
        return state.w[0] - state.correction


def prepare_and_shoot(C: Mat, p: int, members: Optional[Sequence[int]] = None) -> Program:
    """Universal all-to-all encode of C among ``members``."""
    return PrepareAndShoot(C, p, members)


def predicted_profile_universal(K: int, p: int, W: int = 1) -> List[int]:
    """Per-round m_t of prepare-and-shoot on K processors."""
    if K <= 1:
        return []
    p = effective_ports(K, p)
    plan = choose_phase_lengths(K, p)
    base = p + 1
    prepare = [base ** (t - 1) * W for t in range(1, plan.Tp + 1)]
    shoot = [base ** (plan.Ts - t) * W for t in range(1, plan.Ts + 1)]
    return prepare + shoot


def predicted_cost_universal(K: int, p: int, params: NetParams) -> Tuple[int, int, float]:
    """
    (C1, C2, cost) of prepare-and-shoot.

    C2 = ((p+1)^Tp - 1)/p + ((p+1)^Ts - 1)/p for the chosen plan, times W.
    """
    profile = predicted_profile_universal(K, p, params.W)
    C1, C2 = len(profile), sum(profile)
    return C1, C2, cost_from_counts(C1, C2, params)


def balanced_cost_universal(K: int, p: int, params: NetParams) -> Tuple[int, int, float]:
    """
    Closed form for the balanced split.

    Odd L: C2 = 2((p+1)^((L+1)/2) - 1)/p
    Even L: C2 = ((p+1)^(L/2+1) + (p+1)^(L/2) - 2)/p
    Differs from predicted_cost_universal only where the balanced split had
    to be repaired.
    """
    if K <= 1:
        return 0, 0, 0.0
    base = p + 1
    L = 0
    while base ** (L + 1) < K:
        L += 1
    if L % 2:
        C2 = 2 * (base ** ((L + 1) // 2) - 1) // p
    else:
        C2 = (base ** (L // 2 + 1) + base ** (L // 2) - 2) // p
    C1 = L + 1
    C2 *= params.W
    return C1, C2, cost_from_counts(C1, C2, params)


def lower_bounds(K: int, p: int) -> Tuple[int, int]:
    """
    Lower bounds on (C1, C2) for any universal algorithm.

    c1 = ceil(log_{p+1} K)
    c2 = ceil(1/2 - 1/p + sqrt(1/4 - 1/p - 1/p^2 + 2K/p^2)), evaluated exactly

    Valid for matrices with a row of all nonzero entries.
    """
    if K < 2:
        return 0, 0
    c1 = ceil_log(K, p + 1)

    a = Fraction(1, 2) - Fraction(1, p)
    b = Fraction(1, 4) - Fraction(1, p) - Fraction(1, p * p) + Fraction(2 * K, p * p)
    c2 = math.floor(a)
    while c2 - a < 0 or (c2 - a) ** 2 < b:
        c2 += 1
    return c1, c2
