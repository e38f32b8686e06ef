"""Services, the Boolean register, bounded counters and stacks, and the thread-level use operator."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .errors import StateBoundExceeded
from .pga import Interaction
from .threads import DEAD, STOP, TAU, Switch, ThreadAutomaton, normalize


class Service:
    """A service is an immutable state: ``reply(m)`` answers, ``derive(m)`` moves on.

    Concrete services are frozen dataclasses, so equality is state identity.
    ``methods`` lists the declared methods explored when the state space is enumerated.
    """

    methods: tuple[str, ...] = ()

    def reply(self, m: str) -> int:
        raise NotImplementedError

    def derive(self, m: str) -> "Service":
        raise NotImplementedError


def reachable_services(h: Service, bound: int, methods=None) -> list[Service]:
    """Breadth-first enumeration of the services derivable from ``h``."""
    methods = h.methods if methods is None else methods
    seen = {h: None}
    queue = deque([h])
    while queue:
        cur = queue.popleft()
        for m in methods:
            nxt = cur.derive(m)
            if nxt not in seen:
                if len(seen) >= bound:
                    raise StateBoundExceeded(bound, "service state space")
                seen[nxt] = None
                queue.append(nxt)
    return list(seen)


class BR(enum.Enum):
    TRUE = "t"
    FALSE = "f"
    BLOCKED = "b"


BR_METHODS = ("set:T", "set:F", "get")
_BR_REPLY = {BR.TRUE: 1, BR.FALSE: 2, BR.BLOCKED: 0}


@dataclass(frozen=True)
class BooleanRegister(Service):
    state: BR = BR.FALSE
    methods = BR_METHODS

    def _effect(self, m: str) -> BR:
        if self.state is BR.BLOCKED or m not in BR_METHODS:
            return BR.BLOCKED
        if m == "set:T":
            return BR.TRUE
        if m == "set:F":
            return BR.FALSE
        return self.state

    def reply(self, m: str) -> int:
        # effect and yield coincide
        return _BR_REPLY[self._effect(m)]

    def derive(self, m: str) -> "BooleanRegister":
        return BooleanRegister(self._effect(m))

    def __str__(self):
        return f"br:{self.state.value}"


def boolean_register(init: BR | str | bool = BR.FALSE) -> BooleanRegister:
    if isinstance(init, bool):
        init = BR.TRUE if init else BR.FALSE
    return BooleanRegister(BR(init))


@dataclass(frozen=True)
class BoundedCounter(Service):
    """Counter in ``[0, max]``; incrementing past ``max`` blocks it.

    ``inc`` replies 1; ``dec`` replies 1, or 2 at zero (unchanged);
    ``iszero`` replies 1 or 2.
    """

    max: int
    value: int = 0
    blocked: bool = False
    methods = ("inc", "dec", "iszero")

    def __post_init__(self):
        if self.max < 0 or not 0 <= self.value <= self.max:
            raise ValueError("counter value out of range")

    def _step(self, m: str) -> tuple[int, "BoundedCounter"]:
        if self.blocked or m not in self.methods:
            return 0, BoundedCounter(self.max, 0, True)
        if m == "inc":
            if self.value == self.max:
                return 0, BoundedCounter(self.max, 0, True)
            return 1, BoundedCounter(self.max, self.value + 1)
        if m == "dec":
            if self.value == 0:
                return 2, self
            return 1, BoundedCounter(self.max, self.value - 1)
        return (1 if self.value == 0 else 2), self

    def reply(self, m: str) -> int:
        return self._step(m)[0]

    def derive(self, m: str) -> "BoundedCounter":
        return self._step(m)[1]

    def __str__(self):
        return f"counter:{self.max}"


@dataclass(frozen=True)
class BoundedStack(Service):
    """Stack over a finite alphabet with depth at most ``max``.

    ``push:x`` replies 1 (blocks when full); ``pop`` replies 1, or 2 when empty;
    ``top:x`` replies 1 iff the top symbol is ``x``.
    """

    max: int
    alphabet: tuple[str, ...]
    word: tuple[str, ...] = ()
    blocked: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if len(self.word) > self.max or any(x not in self.alphabet for x in self.word):
            raise ValueError("invalid stack contents")

    @property
    def methods(self) -> tuple[str, ...]:
        return (
            tuple(f"push:{x}" for x in self.alphabet)
            + ("pop",)
            + tuple(f"top:{x}" for x in self.alphabet)
        )

    def _blocked(self) -> "BoundedStack":
        return BoundedStack(self.max, self.alphabet, (), True)

    def _step(self, m: str) -> tuple[int, "BoundedStack"]:
        if self.blocked or m not in self.methods:
            return 0, self._blocked()
        if m.startswith("push:"):
            if len(self.word) == self.max:
                return 0, self._blocked()
            return 1, BoundedStack(self.max, self.alphabet, self.word + (m[5:],))
        if m == "pop":
            if not self.word:
                return 2, self
            return 1, BoundedStack(self.max, self.alphabet, self.word[:-1])
        return (1 if self.word and self.word[-1] == m[4:] else 2), self

    def reply(self, m: str) -> int:
        return self._step(m)[0]

    def derive(self, m: str) -> "BoundedStack":
        return self._step(m)[1]

    def __str__(self):
        return f"stack:{self.max}:{','.join(self.alphabet)}"


def parse_service(descriptor: str) -> Service:
    """Parse ``br:<t|f|b>``, ``counter:<max>`` or ``stack:<max>:<alphabet>``.

    The stack alphabet is comma-separated, or one symbol per character.
    """
    kind, _, rest = descriptor.partition(":")
    try:
        if kind == "br":
            return boolean_register(BR(rest))
        if kind == "counter":
            return BoundedCounter(int(rest))
        if kind == "stack":
            depth, _, alpha = rest.partition(":")
            symbols = alpha.split(",") if "," in alpha else list(alpha)
            if not symbols or not all(symbols):
                raise ValueError("empty stack alphabet")
            return BoundedStack(int(depth), tuple(symbols))
    except ValueError as exc:
        raise ValueError(f"bad service descriptor {descriptor!r}: {exc}") from None
    raise ValueError(f"unknown service descriptor {descriptor!r}")


def use_thread(a: ThreadAutomaton, f: str, h: Service, state_bound: int = 100_000) -> ThreadAutomaton:
    """``a /f h``: resolve every ``f.m`` action of ``a`` by asking ``h``."""
    states: dict = {"S": STOP, "D": DEAD}

    def key(sid, service):
        st = a[sid]
        if st == STOP:
            return "S"
        if st == DEAD:
            return "D"
        return (sid, service)

    root = key(a.root, h)
    todo = [root]
    while todo:
        k = todo.pop()
        if k in states:
            continue
        if len(states) - 2 >= state_bound:
            raise StateBoundExceeded(state_bound, "use product")
        sid, service = k
        st = a[sid]
        act = st.action
        if isinstance(act, Interaction) and act.focus == f:
            r = service.reply(act.method)
            if 1 <= r <= st.arity:
                states[k] = Switch(TAU, (key(st.targets[r - 1], service.derive(act.method)),))
            else:
                states[k] = DEAD
        else:
            states[k] = Switch(act, tuple(key(t, service) for t in st.targets))
        if isinstance(states[k], Switch):
            todo.extend(t for t in states[k].targets if t not in states)
    return normalize(ThreadAutomaton.build(states, root))
