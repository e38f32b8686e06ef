"""From linear process specifications to PGLDmr programs.

Three constructions:

* :func:`synth_multireply` emits one multiple-reply test per variable over
  ``ac(...)`` of all its summand actions.
* :func:`synth_binary` uses only binary tests on ``ac(e, tact)``; the ``tact``
  branch walks a cycle through the variable's summands.
* :func:`to_single_occurrence` rewrites a binary-block program so every
  construct instruction occurs once, using Boolean registers to remember
  which original site jumped into the shared copy.

Programs are laid out with symbolic labels and resolved in a second pass.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .lts import ATOM, DeltaSummand, LinearProcessSpec, Step, Terminate
from .pga import Construct, Interaction, Plain, PosMultiTest, PosTest, check_atomic_action
from .pgld import AbsJump, PgldProgram


class SynthesisError(ValueError):
    pass


class DeltaSummandError(SynthesisError):
    pass


class EmptyEquationError(SynthesisError):
    pass


class TactCollisionError(SynthesisError):
    pass


class NotBlockFormError(SynthesisError):
    pass


@dataclass(frozen=True)
class _Ref:
    target: object  # a label, or 0 for termination


class Assembler:
    """Collect instructions and symbolic jumps, then resolve labels to positions."""

    def __init__(self):
        self.items: list = []
        self.labels: dict = {}

    def label(self, name):
        if name in self.labels:
            raise ValueError(f"duplicate label {name!r}")
        self.labels[name] = len(self.items) + 1

    def emit(self, u):
        self.items.append(u)

    def jump(self, target):
        self.items.append(_Ref(target))

    def assemble(self) -> PgldProgram:
        out = []
        for item in self.items:
            if isinstance(item, _Ref):
                out.append(AbsJump(0 if item.target == 0 else self.labels[item.target]))
            else:
                out.append(item)
        return PgldProgram(tuple(out))


def _checked_equations(e: LinearProcessSpec, root: str | None):
    eqs = list(e.equations)
    root = e.root if root is None else root
    names = [x for x, _ in eqs]
    if root not in names:
        raise KeyError(f"unbound variable {root}")
    eqs.sort(key=lambda eq: eq[0] != root)  # stable: root first, rest in order
    result = []
    for x, summands in eqs:
        if not summands:
            raise EmptyEquationError(f"equation for {x} has no summands")
        steps, terms = [], []
        for s in summands:
            if isinstance(s, DeltaSummand):
                raise DeltaSummandError(f"equation for {x} has a delta summand")
            if s.action.kind != ATOM:
                raise SynthesisError(f"{s.action} is not a plain atomic action")
            if isinstance(s, Step):
                steps.append((s.action.name, s.target))
            elif isinstance(s, Terminate):
                terms.append(s.action.name)
        result.append((x, steps, terms))
    return result


def synth_multireply(e: LinearProcessSpec, root: str | None = None) -> PgldProgram:
    asm = Assembler()
    for x, steps, terms in _checked_equations(e, root):
        asm.label(x)
        actions = tuple(a for a, _ in steps) + tuple(terms)
        asm.emit(PosMultiTest(len(actions), Construct(actions)))
        for _, target in steps:
            asm.jump(target)
        for _ in terms:
            asm.jump(0)
    return asm.assemble()


def synth_binary(e: LinearProcessSpec, tact: str, root: str | None = None) -> PgldProgram:
    check_atomic_action(tact)
    eqs = _checked_equations(e, root)
    for x, steps, terms in eqs:
        if tact in terms or any(a == tact for a, _ in steps):
            raise TactCollisionError(f"{tact} occurs in the equation for {x}")
    asm = Assembler()
    for x, steps, terms in eqs:
        links = [(a, t) for a, t in steps] + [(a, 0) for a in terms]
        for j, (a, target) in enumerate(links):
            asm.label(x if j == 0 else (x, j))
            asm.emit(PosTest(Construct((a, tact))))
            asm.jump(target)
            asm.jump((x, j + 1) if j + 1 < len(links) else x)
    return asm.assemble()


def _blocks(p: PgldProgram):
    k = len(p)
    if k % 3:
        raise NotBlockFormError("program length is not a multiple of 3")
    blocks = []
    for b in range(k // 3):
        test, yes, no = p.instructions[3 * b:3 * b + 3]
        if not (isinstance(test, PosTest) and isinstance(test.b, Construct) and len(test.b.actions) == 2):
            raise NotBlockFormError(f"block {b + 1} does not start with a binary +ac(e,t) test")
        targets = []
        for j in (yes, no):
            if not isinstance(j, AbsJump):
                raise NotBlockFormError(f"block {b + 1} is not followed by two absolute jumps")
            if j.l == 0 or j.l > k:
                targets.append(None)
            elif j.l % 3 == 1:
                targets.append((j.l - 1) // 3)
            else:
                raise NotBlockFormError(f"jump ##{j.l} in block {b + 1} does not target a block head")
        blocks.append((test.b, targets[0], targets[1]))
    return blocks


def register_focus(j: int) -> str:
    return f"br{j}"


def to_single_occurrence(p: PgldProgram) -> tuple[PgldProgram, int]:
    """Share repeated construct instructions; returns the program and its register count.

    Registers are named ``br1..brR`` and must all start out false.
    """
    blocks = _blocks(p)
    sites = defaultdict(list)
    for b, (ac, _, _) in enumerate(blocks):
        sites[ac].append(b)
    shared = [ac for ac in sites if len(sites[ac]) > 1]
    if not shared:
        return p, 0

    register = {}
    for ac in shared:
        for b in sites[ac]:
            register[b] = len(register) + 1

    def entry(target):
        return 0 if target is None else ("entry", target)

    asm = Assembler()
    for b, (ac, yes, no) in enumerate(blocks):
        asm.label(("entry", b))
        if b in register:
            asm.emit(Plain(Interaction(register_focus(register[b]), "set:T")))
            asm.jump(("shared", ac))
        else:
            asm.emit(PosTest(ac))
            asm.jump(entry(yes))
            asm.jump(entry(no))
    for ac in shared:
        asm.label(("shared", ac))
        asm.emit(PosTest(ac))
        asm.jump(("true", ac, 0))
        asm.jump(("false", ac, 0))
        for branch in ("true", "false"):
            group = sites[ac]
            for idx, b in enumerate(group):
                asm.label((branch, ac, idx))
                asm.emit(PosTest(Interaction(register_focus(register[b]), "get")))
                asm.jump((branch, "reset", b))
                if idx + 1 < len(group):
                    asm.jump((branch, ac, idx + 1))
                else:
                    # unreachable while exactly one register is set: deadlock
                    asm.label((branch, ac, "none"))
                    asm.jump((branch, ac, "none"))
        for branch in ("true", "false"):
            for b in sites[ac]:
                asm.label((branch, "reset", b))
                asm.emit(Plain(Interaction(register_focus(register[b]), "set:F")))
                _, yes, no = blocks[b]
                asm.jump(entry(yes if branch == "true" else no))
    return asm.assemble(), len(register)


def construct_occurrences(p: PgldProgram) -> dict:
    """Count, per atomic action, the instructions whose ``ac(...)`` mentions it."""
    counts: dict = defaultdict(int)
    for u in p:
        b = getattr(u, "b", None)
        if isinstance(b, Construct):
            for e in set(b.actions):
                counts[e] += 1
    return dict(counts)
