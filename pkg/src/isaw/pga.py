"""Program algebra with multiple-reply tests: instructions, terms, canonical sequences.

A closed term denotes a finite or ultimately periodic instruction sequence.
:func:`canonical_form` maps every term to a unique ``prefix ; (period)*`` shape
so that sequence equality becomes structural equality.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import ParseError

IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")
# methods may carry a colon-separated argument, e.g. ``set:T`` or ``push:a``
METHOD_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*(?::[a-zA-Z0-9_]+)*")

RESERVED_ACTIONS = frozenset({"tau", "i", "stop", "stop_bar", "stop_star"})


def check_atomic_action(name: str) -> str:
    if not IDENT_RE.fullmatch(name):
        raise ValueError(f"invalid atomic action name {name!r}")
    if name in RESERVED_ACTIONS or name.startswith(("snd_", "rcv_")):
        raise ValueError(f"atomic action name {name!r} is reserved")
    return name


# -- basic instructions ---------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """An uninterpreted basic instruction, as in plain PGA."""

    name: str

    def __post_init__(self):
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError(f"invalid basic instruction {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Interaction:
    """``f.m``: ask the service named ``focus`` to process ``method``."""

    focus: str
    method: str

    def __post_init__(self):
        if not IDENT_RE.fullmatch(self.focus):
            raise ValueError(f"invalid focus {self.focus!r}")
        if not METHOD_RE.fullmatch(self.method):
            raise ValueError(f"invalid method {self.method!r}")

    def __str__(self):
        return f"{self.focus}.{self.method}"


@dataclass(frozen=True)
class Construct:
    """``ac(e1,...,en)``: perform one of the atomic actions; reply is its index."""

    actions: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.actions:
            raise ValueError("ac() needs at least one atomic action")
        for e in self.actions:
            check_atomic_action(e)

    def __str__(self):
        return f"ac({','.join(self.actions)})"


BasicInstruction = Union[Atom, Interaction, Construct]


# -- primitive instructions -----------------------------------------------


@dataclass(frozen=True)
class Plain:
    b: BasicInstruction

    def __str__(self):
        return str(self.b)


@dataclass(frozen=True)
class PosTest:
    b: BasicInstruction

    def __str__(self):
        return f"+{self.b}"


@dataclass(frozen=True)
class NegTest:
    b: BasicInstruction

    def __str__(self):
        return f"-{self.b}"


@dataclass(frozen=True)
class PosMultiTest:
    n: int
    b: BasicInstruction

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("multiple-reply test arity must be >= 1")

    def __str__(self):
        return f"+[{self.n}]{self.b}"


@dataclass(frozen=True)
class NegMultiTest:
    n: int
    b: BasicInstruction

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("multiple-reply test arity must be >= 1")

    def __str__(self):
        return f"-[{self.n}]{self.b}"


@dataclass(frozen=True)
class FwdJump:
    l: int

    def __post_init__(self):
        if self.l < 0:
            raise ValueError("jump distance must be >= 0")

    def __str__(self):
        return f"#{self.l}"


@dataclass(frozen=True)
class Halt:
    def __str__(self):
        return "!"


HALT = Halt()

PrimitiveInstruction = Union[Plain, PosTest, NegTest, PosMultiTest, NegMultiTest, FwdJump, Halt]


def reply_offsets(u) -> tuple[int, ...] | None:
    """Relative offsets selected by replies 1..n of a test, or None for non-tests."""
    if isinstance(u, PosTest):
        return (1, 2)
    if isinstance(u, NegTest):
        return (2, 1)
    if isinstance(u, PosMultiTest):
        return tuple(range(1, u.n + 1))
    if isinstance(u, NegMultiTest):
        return tuple(range(u.n, 0, -1))
    return None


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Instr:
    u: PrimitiveInstruction

    def __str__(self):
        return str(self.u)


@dataclass(frozen=True)
class Concat:
    left: "PgaTerm"
    right: "PgaTerm"

    def __str__(self):
        return f"{self.left} ; {self.right}"


@dataclass(frozen=True)
class Power:
    body: "PgaTerm"
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("power exponent must be >= 1")

    def __str__(self):
        return f"({self.body})^{self.n}"


@dataclass(frozen=True)
class Repeat:
    body: "PgaTerm"

    def __str__(self):
        return f"({self.body})*"


PgaTerm = Union[Instr, Concat, Power, Repeat]


# -- canonical instruction sequences --------------------------------------


def _normalize_instr(u):
    if isinstance(u, PosMultiTest) and u.n == 2:
        return PosTest(u.b)
    if isinstance(u, NegMultiTest) and u.n == 2:
        return NegTest(u.b)
    return u


def _primitive_root(word: tuple) -> tuple:
    n = len(word)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and word[i] != word[k]:
            k = fail[k - 1]
        if word[i] == word[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return word[:p] if n % p == 0 else word


@dataclass(frozen=True)
class InstructionSequence:
    """A canonical instruction sequence ``prefix ; (period)*``.

    Use :meth:`from_parts` to build one from arbitrary parts; the constructor
    only accepts data that is already canonical.
    """

    prefix: tuple
    period: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if self.period is not None:
            object.__setattr__(self, "period", tuple(self.period))
            if not self.period:
                raise ValueError("period must be nonempty")
            if _primitive_root(self.period) != self.period:
                raise ValueError("period is not primitive")
            if self.prefix and self.prefix[-1] == self.period[-1]:
                raise ValueError("prefix is not minimal")
        elif not self.prefix:
            raise ValueError("instruction sequences are nonempty")

    @classmethod
    def from_parts(cls, prefix, period=None) -> "InstructionSequence":
        prefix = [_normalize_instr(u) for u in prefix]
        if period is None:
            return cls(tuple(prefix), None)
        period = _primitive_root(tuple(_normalize_instr(u) for u in period))
        while prefix and prefix[-1] == period[-1]:
            prefix.pop()
            period = period[-1:] + period[:-1]
        return cls(tuple(prefix), period)

    @property
    def finite(self) -> bool:
        return self.period is None

    def __len__(self):
        """Number of distinct positions (prefix plus one period)."""
        return len(self.prefix) + len(self.period or ())

    def __str__(self):
        parts = [str(u) for u in self.prefix]
        if self.period is not None:
            parts.append("(" + " ; ".join(str(u) for u in self.period) + ")*")
        return " ; ".join(parts)


def canonical_form(t: PgaTerm) -> InstructionSequence:
    prefix, period = _flatten(t)
    return InstructionSequence.from_parts(prefix, period)


def _flatten(t) -> tuple[list, list | None]:
    if isinstance(t, Instr):
        return [t.u], None
    if isinstance(t, Concat):
        p, q = _flatten(t.left)
        if q is not None:
            return p, q  # X* ; Y = X*
        p2, q2 = _flatten(t.right)
        return p + p2, q2
    if isinstance(t, Power):
        p, q = _flatten(t.body)
        if q is not None:
            return p, q
        return p * t.n, None
    if isinstance(t, Repeat):
        p, q = _flatten(t.body)
        if q is not None:
            return p, q
        return [], p
    raise TypeError(f"not a PGA term: {t!r}")


def sequences_equal(s1: InstructionSequence, s2: InstructionSequence) -> bool:
    return s1 == s2


def instruction_at(s: InstructionSequence, pos: int):
    """The instruction at 1-based position ``pos``, or None past the end."""
    if pos < 1:
        raise ValueError("positions are 1-based")
    if pos <= len(s.prefix):
        return s.prefix[pos - 1]
    if s.period is None:
        return None
    return s.period[(pos - len(s.prefix) - 1) % len(s.period)]


# -- parsing ----------------------------------------------------------------


class Reader:
    """Character-level cursor shared by the program and spec parsers."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            self.fail(f"expected {s!r}")

    def fail(self, message: str):
        self.skip()
        found = self.text[self.pos:self.pos + 10] or "end of input"
        raise ParseError(f"{message}, found {found!r}", self.pos)

    def match(self, regex: re.Pattern, what: str) -> str:
        self.skip()
        m = regex.match(self.text, self.pos)
        if not m:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group()

    def nat(self) -> int:
        return int(self.match(_NAT_RE, "natural number"))


_NAT_RE = re.compile(r"[0-9]+")


def parse_basic(r: Reader) -> BasicInstruction:
    start = r.pos
    name = r.match(IDENT_RE, "basic instruction")
    if name == "ac" and r.peek("("):
        r.expect("(")
        actions = [r.match(IDENT_RE, "atomic action")]
        while r.accept(","):
            actions.append(r.match(IDENT_RE, "atomic action"))
        r.expect(")")
        try:
            return Construct(tuple(actions))
        except ValueError as exc:
            raise ParseError(str(exc), start) from None
    if r.text.startswith(".", r.pos):
        r.pos += 1
        return Interaction(name, r.match(METHOD_RE, "method"))
    return Atom(name)


def parse_test_or_plain(r: Reader):
    """Parse the instruction forms shared by PGAmr and PGLDmr."""
    start = r.pos
    for sign, single, multi in (("+", PosTest, PosMultiTest), ("-", NegTest, NegMultiTest)):
        if r.accept(sign + "["):
            n = r.nat()
            r.expect("]")
            if n < 1:
                raise ParseError("multiple-reply test arity must be >= 1", start)
            return multi(n, parse_basic(r))
        if r.accept(sign):
            return single(parse_basic(r))
    return Plain(parse_basic(r))


def _parse_instr(r: Reader):
    if r.accept("!"):
        return HALT
    if r.peek("##"):
        r.fail("absolute jumps are not PGAmr instructions")
    if r.accept("#"):
        return FwdJump(r.nat())
    return parse_test_or_plain(r)


def _parse_term(r: Reader) -> PgaTerm:
    t = _parse_factor(r)
    while r.accept(";"):
        if r.at_end() or r.peek(")"):
            break  # tolerate a trailing separator
        t = Concat(t, _parse_factor(r))
    return t


def _parse_factor(r: Reader) -> PgaTerm:
    if r.accept("("):
        body = _parse_term(r)
        r.expect(")")
        if r.accept("*"):
            return Repeat(body)
        if r.accept("^"):
            start = r.pos
            n = r.nat()
            if n < 1:
                raise ParseError("power exponent must be >= 1", start)
            return Power(body, n)
        return body
    return Instr(_parse_instr(r))


def parse_pga(text: str) -> PgaTerm:
    r = Reader(text)
    if r.at_end():
        raise ParseError("empty program", 0)
    t = _parse_term(r)
    if not r.at_end():
        r.fail("unexpected input")
    return t
