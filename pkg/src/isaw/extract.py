"""Thread extraction: the behaviour of a canonical instruction sequence as a thread automaton."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .pga import FwdJump, Halt, InstructionSequence, Plain, instruction_at, reply_offsets
from .threads import DEAD, STOP, DeadState, StopState, Switch, ThreadAutomaton, normalize


@dataclass(frozen=True)
class PrefixPos:
    p: int  # 1-based


@dataclass(frozen=True)
class PeriodPos:
    offset: int  # 0-based


PositionRef = Union[PrefixPos, PeriodPos]


def _to_index(s: InstructionSequence, pos) -> int:
    if isinstance(pos, PrefixPos):
        return pos.p
    return len(s.prefix) + pos.offset + 1


def _to_ref(s: InstructionSequence, index: int) -> PositionRef:
    if index <= len(s.prefix):
        return PrefixPos(index)
    return PeriodPos(index - len(s.prefix) - 1)


def _fold(s: InstructionSequence, index: int) -> int | None:
    """Map an absolute position of the unrolled sequence onto ``1..len(s)``."""
    if index <= len(s.prefix):
        return index
    if s.period is None:
        return None
    return len(s.prefix) + (index - len(s.prefix) - 1) % len(s.period) + 1


def _resolve_index(s: InstructionSequence, index: int, halt_is_stop: bool = True):
    seen = set()
    while True:
        folded = _fold(s, index)
        if folded is None:
            return DEAD
        u = instruction_at(s, folded)
        if isinstance(u, Halt) and halt_is_stop:
            return STOP
        if not isinstance(u, FwdJump):
            return folded
        if u.l == 0 or folded in seen:
            return DEAD  # #0, or an infinite jump chain
        seen.add(folded)
        index = folded + u.l


def resolve(s: InstructionSequence, pos: PositionRef) -> PositionRef | DeadState:
    """Chase forward jumps from ``pos`` to the first instruction that is not a jump.

    Returns DEAD for ``#0``, for jumps past the end of a finite sequence and
    for infinite jump chains.
    """
    r = _resolve_index(s, _to_index(s, pos), halt_is_stop=False)
    return r if isinstance(r, (StopState, DeadState)) else _to_ref(s, r)


def extract_thread(s: InstructionSequence) -> ThreadAutomaton:
    states: dict = {"S": STOP, "D": DEAD}

    def node(index):
        r = _resolve_index(s, index)
        if r == STOP:
            return "S"
        if r == DEAD:
            return "D"
        return r

    root = node(1)
    todo = [root]
    while todo:
        p = todo.pop()
        if p in states:
            continue
        u = instruction_at(s, p)
        if isinstance(u, Plain):
            nxt = node(p + 1)
            # a plain instruction is a test whose replies all continue the same way
            st = Switch(u.b, (nxt, nxt))
        else:
            offsets = reply_offsets(u)
            if _fold(s, p + 1) is None:
                st = Switch(u.b, ("D", "D"))
            else:
                st = Switch(u.b, tuple(node(p + k) for k in offsets))
        states[p] = st
        todo.extend(t for t in st.targets if t not in states)
    return normalize(ThreadAutomaton.build(states, root))
