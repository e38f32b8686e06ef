"""Regular threads with postconditional switching, as finite automata.

A thread automaton maps integer state ids to :data:`STOP`, :data:`DEAD` or a
:class:`Switch` whose targets are selected by replies ``1..k``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ParseError
from .pga import (
    IDENT_RE,
    Atom,
    Construct,
    Interaction,
    Reader,
    parse_basic,
)


@dataclass(frozen=True)
class TauAction:
    def __str__(self):
        return "tau"


TAU = TauAction()

BasicAction = Union[TauAction, Atom, Interaction, Construct]


@dataclass(frozen=True)
class StopState:
    def __str__(self):
        return "S"


@dataclass(frozen=True)
class DeadState:
    def __str__(self):
        return "D"


STOP = StopState()
DEAD = DeadState()


@dataclass(frozen=True)
class Switch:
    action: BasicAction
    targets: tuple

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ValueError("a switch needs at least one target")

    @property
    def arity(self) -> int:
        return len(self.targets)


ThreadState = Union[StopState, DeadState, Switch]


@dataclass(frozen=True)
class ThreadAutomaton:
    states: Mapping[int, ThreadState]
    root: int

    def __post_init__(self):
        if self.root not in self.states:
            raise ValueError(f"root {self.root} is not a state")
        for sid, st in self.states.items():
            if isinstance(st, Switch):
                for t in st.targets:
                    if t not in self.states:
                        raise ValueError(f"state {sid} targets unknown state {t}")

    @classmethod
    def build(cls, states: Mapping, root) -> "ThreadAutomaton":
        """Prune unreachable states and renumber in breadth-first order from the root.

        ``states`` may be keyed by any hashable ids; the result uses ``0..n-1``.
        """
        if root not in states:
            raise ValueError(f"root {root!r} is not a state")
        order = {root: 0}
        queue = deque([root])
        while queue:
            st = states[queue.popleft()]
            if isinstance(st, Switch):
                for t in st.targets:
                    if t not in states:
                        raise ValueError(f"unknown target state {t!r}")
                    if t not in order:
                        order[t] = len(order)
                        queue.append(t)
        renumbered = {}
        for old, new in order.items():
            st = states[old]
            if isinstance(st, Switch):
                st = Switch(st.action, tuple(order[t] for t in st.targets))
            renumbered[new] = st
        return cls(renumbered, 0)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, sid: int) -> ThreadState:
        return self.states[sid]

    def rooted_at(self, sid: int) -> "ThreadAutomaton":
        return ThreadAutomaton.build(self.states, sid)


def single(state: ThreadState) -> ThreadAutomaton:
    """The one-state automaton for STOP or DEAD."""
    return ThreadAutomaton({0: state}, 0)


def normalize(a: ThreadAutomaton) -> ThreadAutomaton:
    """Apply S2/S3 (construct arity), T1/T2 (tau is unary) to every switch."""
    states = dict(a.states)
    dead = next((sid for sid, st in states.items() if st == DEAD), None)
    for sid, st in a.states.items():
        if not isinstance(st, Switch):
            continue
        if st.action == TAU:
            states[sid] = Switch(TAU, st.targets[:1])
        elif isinstance(st.action, Construct):
            n = len(st.action.actions)
            if n < st.arity:
                states[sid] = Switch(st.action, st.targets[:n])
            elif n > st.arity:
                if dead is None:
                    dead = max(states) + 1
                    states[dead] = DEAD
                states[sid] = Switch(st.action, st.targets + (dead,) * (n - st.arity))
    return ThreadAutomaton.build(states, a.root)


# -- partition refinement ---------------------------------------------------


def refine(nodes, signature, initial) -> dict:
    """Coarsest stable partition: split blocks by ``signature(node, block_of)``.

    ``initial`` maps each node to a hashable initial class. Returns node -> block id.
    """
    keys = {}
    block = {}
    for n in nodes:
        block[n] = keys.setdefault(initial(n), len(keys))
    count = len(keys)
    while True:
        keys = {}
        new = {}
        for n in nodes:
            new[n] = keys.setdefault((block[n], signature(n, block)), len(keys))
        if len(keys) == count:
            return new
        block, count = new, len(keys)


def thread_equal(a: ThreadAutomaton, b: ThreadAutomaton) -> bool:
    """Strong bisimilarity of two thread automata."""
    nodes = [(0, s) for s in a.states] + [(1, s) for s in b.states]
    autos = (a, b)

    def kind(n):
        st = autos[n[0]][n[1]]
        if isinstance(st, Switch):
            return ("switch", st.action, st.arity)
        return (str(st),)

    def sig(n, block):
        st = autos[n[0]][n[1]]
        if isinstance(st, Switch):
            return tuple(block[(n[0], t)] for t in st.targets)
        return ()

    blocks = refine(nodes, sig, kind)
    return blocks[(0, a.root)] == blocks[(1, b.root)]


# -- projections --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Node:
    """A switch node of a finite thread. Interned per projection table; compare with ``is``."""

    action: BasicAction
    children: tuple

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Node):
            return NotImplemented
        return self.action == other.action and self.children == other.children

    def __hash__(self):
        return hash((self.action, len(self.children)))

    def __str__(self):
        if len(self.children) == 2 and self.children[0] is self.children[1]:
            return f"{self.action} o ({self.children[0]})"
        return f"{self.action}[{', '.join(map(str, self.children))}]"


FiniteThread = Union[StopState, DeadState, Node]


def project(a: ThreadAutomaton, n: int, table: dict | None = None) -> FiniteThread:
    """Cut ``a`` off after ``n`` actions, replacing what follows by DEAD.

    Finite threads are built bottom-up and hash-consed in ``table``; two
    projections built with the same table are equal iff they are identical.
    """
    if n < 0:
        raise ValueError("projection depth must be >= 0")
    if table is None:
        table = {}
    level = {s: DEAD for s in a.states}
    for _ in range(n):
        nxt = {}
        for s, st in a.states.items():
            if isinstance(st, Switch):
                children = tuple(level[t] for t in st.targets)
                key = (st.action, tuple(map(id, children)))
                node = table.get(key)
                if node is None:
                    node = table[key] = Node(st.action, children)
                nxt[s] = node
            else:
                nxt[s] = st
        level = nxt
    return level[a.root]


def projections_equal(a: ThreadAutomaton, b: ThreadAutomaton, n: int) -> bool:
    table: dict = {}
    return project(a, n, table) is project(b, n, table)


def aip_bound(a: ThreadAutomaton, b: ThreadAutomaton) -> int:
    return len(a) * len(b) + 1


def project_automaton(a: ThreadAutomaton, n: int) -> ThreadAutomaton:
    """The projection of ``a`` at depth ``n`` as an (acyclic) automaton."""
    states = {("d",): DEAD}
    def walk(s, depth):
        key = (s, depth)
        if key in states:
            return key
        st = a[s]
        if depth == 0:
            return ("d",)
        if isinstance(st, Switch):
            states[key] = Switch(st.action, tuple(walk(t, depth - 1) for t in st.targets))
        else:
            states[key] = st
        return key
    root = walk(a.root, n)
    return ThreadAutomaton.build(states, root)


# -- linear thread specifications --------------------------------------------


@dataclass(frozen=True)
class SwitchEq:
    action: BasicAction
    targets: tuple

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ValueError("a switch needs at least one target")


@dataclass(frozen=True)
class LinearThreadSpec:
    """Equations ``X = S | D | action[Y1,...,Yk]``, kept in declaration order."""

    equations: tuple  # of (variable, rhs)

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        names = [x for x, _ in self.equations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate equation for a variable")

    def as_dict(self) -> dict:
        return dict(self.equations)

    def __str__(self):
        lines = []
        for x, rhs in self.equations:
            if isinstance(rhs, SwitchEq):
                rhs_text = f"{rhs.action}[{','.join(rhs.targets)}]"
            else:
                rhs_text = str(rhs)
            lines.append(f"{x} = {rhs_text} ;")
        return "\n".join(lines)


def from_linear_spec(e: LinearThreadSpec, x: str) -> ThreadAutomaton:
    eqs = e.as_dict()
    if x not in eqs:
        raise KeyError(f"unbound variable {x}")
    states = {}
    for var, rhs in eqs.items():
        if isinstance(rhs, SwitchEq):
            for t in rhs.targets:
                if t not in eqs:
                    raise KeyError(f"unbound variable {t}")
            states[var] = Switch(rhs.action, rhs.targets)
        else:
            states[var] = rhs
    return ThreadAutomaton.build(states, x)


def to_linear_spec(a: ThreadAutomaton) -> LinearThreadSpec:
    a = ThreadAutomaton.build(a.states, a.root)
    eqs = []
    for sid in sorted(a.states):
        st = a[sid]
        if isinstance(st, Switch):
            st = SwitchEq(st.action, tuple(f"X{t}" for t in st.targets))
        eqs.append((f"X{sid}", st))
    return LinearThreadSpec(tuple(eqs))


def _keyword(r: Reader, word: str) -> bool:
    r.skip()
    m = re.compile(re.escape(word) + r"(?![A-Za-z0-9_.(:])").match(r.text, r.pos)
    if m:
        r.pos = m.end()
    return bool(m)


def parse_action(r: Reader) -> BasicAction:
    if _keyword(r, "tau"):
        return TAU
    return parse_basic(r)


def parse_linear_thread_spec(text: str) -> LinearThreadSpec:
    r = Reader(text)
    eqs = []
    while not r.at_end():
        var = r.match(IDENT_RE, "variable")
        r.expect("=")
        if _keyword(r, "S") and not r.peek("["):
            rhs = STOP
        elif _keyword(r, "D") and not r.peek("["):
            rhs = DEAD
        else:
            action = parse_action(r)
            r.expect("[")
            targets = [r.match(IDENT_RE, "variable")]
            while r.accept(","):
                targets.append(r.match(IDENT_RE, "variable"))
            r.expect("]")
            rhs = SwitchEq(action, tuple(targets))
        r.expect(";")
        eqs.append((var, rhs))
    if not eqs:
        raise ParseError("empty specification", 0)
    try:
        return LinearThreadSpec(tuple(eqs))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
