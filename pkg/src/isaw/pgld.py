"""PGLDmr: assembly-like programs with absolute jumps and implicit termination."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .pga import (
    HALT,
    FwdJump,
    InstructionSequence,
    Reader,
    parse_test_or_plain,
)


@dataclass(frozen=True)
class AbsJump:
    l: int

    def __post_init__(self):
        if self.l < 0:
            raise ValueError("jump target must be >= 0")

    def __str__(self):
        return f"##{self.l}"


@dataclass(frozen=True)
class PgldProgram:
    instructions: tuple

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if not self.instructions:
            raise ValueError("PGLDmr programs are nonempty")

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def __getitem__(self, pos: int):
        """1-based access, matching jump targets."""
        if not 1 <= pos <= len(self.instructions):
            raise IndexError(pos)
        return self.instructions[pos - 1]

    def __str__(self):
        return " ; ".join(str(u) for u in self.instructions)


def parse_pgld(text: str) -> PgldProgram:
    r = Reader(text)
    if r.at_end():
        raise ParseError("empty program", 0)
    instrs = [_parse_instr(r)]
    while r.accept(";"):
        if r.at_end():
            break
        instrs.append(_parse_instr(r))
    if not r.at_end():
        r.fail("unexpected input")
    return PgldProgram(tuple(instrs))


def _parse_instr(r: Reader):
    if r.accept("##"):
        return AbsJump(r.nat())
    if r.peek("#"):
        r.fail("relative jumps are not PGLDmr instructions")
    if r.peek("!"):
        r.fail("PGLDmr has no termination instruction")
    if r.peek("(") or r.peek(")") or r.peek("*"):
        r.fail("PGLDmr programs are flat instruction lists")
    return parse_test_or_plain(r)


def translate(u, j: int, k: int):
    """Map instruction ``u`` at position ``j`` of a length-``k`` program to PGAmr."""
    if not isinstance(u, AbsJump):
        return u
    l = u.l
    if l == 0 or l > k:
        return HALT
    if l >= j:
        return FwdJump(l - j)
    return FwdJump(k + 2 - (j - l))


def pgld_to_pga(p: PgldProgram) -> InstructionSequence:
    k = len(p)
    body = [translate(u, j, k) for j, u in enumerate(p, start=1)]
    return InstructionSequence.from_parts([], body + [HALT, HALT])
