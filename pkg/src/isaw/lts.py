"""Labelled transition systems with a termination predicate, and the ACP operators on them."""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from typing import Callable, Collection, Iterable, Union

from .errors import ParseError, StateBoundExceeded
from .pga import IDENT_RE, METHOD_RE, Reader, check_atomic_action

# label kinds
ATOM, SND, RCV, SND_S, RCV_S, STOP, STOP_BAR, STOP_STAR, I, TAU = (
    "atom", "snd", "rcv", "snd_s", "rcv_s", "stop", "stop_bar", "stop_star", "i", "tau",
)
_BARE = (STOP, STOP_BAR, STOP_STAR, I, TAU)


@dataclass(frozen=True)
class Label:
    """An action label. ``focus`` is set for snd/rcv; ``data`` is a method name or reply number."""

    kind: str
    name: str = ""
    focus: str = ""
    data: Union[str, int] = ""

    def __str__(self):
        if self.kind == ATOM:
            return self.name
        if self.kind in _BARE:
            return self.kind
        if self.kind in (SND, RCV):
            return f"{self.kind}_{self.focus}({self.data})"
        return f"{self.kind}({self.data})"


def atom(e: str) -> Label:
    return Label(ATOM, check_atomic_action(e))


def snd(f: str, d) -> Label:
    return Label(SND, focus=f, data=d)


def rcv(f: str, d) -> Label:
    return Label(RCV, focus=f, data=d)


def snd_s(r: int) -> Label:
    return Label(SND_S, data=r)


def rcv_s(m: str) -> Label:
    return Label(RCV_S, data=m)


TAU_L = Label(TAU)
I_L = Label(I)
STOP_L = Label(STOP)
STOP_BAR_L = Label(STOP_BAR)
STOP_STAR_L = Label(STOP_STAR)

_CHANNEL_RE = re.compile(r"(snd|rcv)_(s|[a-zA-Z_][a-zA-Z0-9_]*)\(([^()]*)\)")


def parse_label(text: str) -> Label:
    text = text.strip()
    if text in _BARE:
        return Label(text)
    m = _CHANNEL_RE.fullmatch(text)
    if m:
        kind, focus, data = m.groups()
        d: Union[str, int] = int(data) if data.isdigit() else data
        if not isinstance(d, int) and not METHOD_RE.fullmatch(d):
            raise ParseError(f"bad channel datum in label {text!r}")
        if focus == "s":
            if kind == "snd":
                if not isinstance(d, int):
                    raise ParseError(f"service replies are numbers: {text!r}")
                return snd_s(d)
            return rcv_s(d)
        return Label(kind, focus=focus, data=d)
    try:
        return atom(text)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def gamma(a: Label, b: Label) -> Label | None:
    """The communication function; None stands for deadlock."""
    for x, y in ((a, b), (b, a)):
        if x.kind == SND and y.kind == RCV and x.focus == y.focus and x.data == y.data:
            return I_L
        if x.kind == STOP and y.kind == STOP_BAR:
            return STOP_STAR_L
    return None


# -- the transition system ------------------------------------------------------


@dataclass(frozen=True)
class Lts:
    """States are ``0..num_states-1``; transitions are ``(src, Label, dst)`` triples."""

    num_states: int
    root: int
    transitions: tuple
    terminating: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(sorted(set(self.transitions), key=_edge_key)))
        object.__setattr__(self, "terminating", frozenset(self.terminating))
        if not 0 <= self.root < self.num_states:
            raise ValueError("root is not a state")
        for s, _, t in self.transitions:
            if not (0 <= s < self.num_states and 0 <= t < self.num_states):
                raise ValueError(f"transition endpoint out of range: {s}->{t}")
        if any(not 0 <= s < self.num_states for s in self.terminating):
            raise ValueError("terminating state out of range")

    def successors(self) -> list[list]:
        out: list[list] = [[] for _ in range(self.num_states)]
        for s, lab, t in self.transitions:
            out[s].append((lab, t))
        return out

    def labels(self) -> set:
        return {lab for _, lab, _ in self.transitions}

    def is_deadlock(self, s: int) -> bool:
        return s not in self.terminating and all(e[0] != s for e in self.transitions)


def _edge_key(e):
    return (e[0], str(e[1]), e[2])


def build_lts(root, edges: Iterable, terminating: Iterable = ()) -> Lts:
    """Build an LTS from arbitrary hashable state keys.

    Unreachable states are dropped and states are numbered in breadth-first
    order from the root, visiting successors sorted by label text.
    """
    succ: dict = {}
    for s, lab, t in edges:
        succ.setdefault(s, []).append((lab, t))
    order = {root: 0}
    queue = deque([root])
    while queue:
        s = queue.popleft()
        for lab, t in sorted(succ.get(s, ()), key=lambda e: (str(e[0]), order.get(e[1], len(order)))):
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    trans = [(order[s], lab, order[t]) for s in order for lab, t in succ.get(s, ())]
    term = {order[s] for s in terminating if s in order}
    return Lts(len(order), 0, tuple(trans), frozenset(term))


def canonical(p: Lts) -> Lts:
    return build_lts(p.root, p.transitions, p.terminating)


def from_edges(root, edges, terminating=()) -> Lts:
    """Alias of :func:`build_lts` for hand-written fixtures."""
    return build_lts(root, edges, terminating)


def explore(root, step: Callable, is_terminating: Callable, bound: int | None = None) -> Lts:
    """Build the reachable part of an implicitly given LTS.

    ``step(state)`` yields ``(label, next_state)`` pairs.
    """
    seen = {root}
    queue = deque([root])
    edges = []
    term = []
    while queue:
        s = queue.popleft()
        if is_terminating(s):
            term.append(s)
        for lab, t in step(s):
            edges.append((s, lab, t))
            if t not in seen:
                if bound is not None and len(seen) >= bound:
                    raise StateBoundExceeded(bound, "process state space")
                seen.add(t)
                queue.append(t)
    return build_lts(root, edges, term)


# -- ACP operators --------------------------------------------------------------


def par_merge(p: Lts, q: Lts, bound: int | None = None) -> Lts:
    """``p || q``: interleavings plus gamma-synchronisations; terminates when both do."""
    ps, qs = p.successors(), q.successors()

    def step(st):
        x, y = st
        for lab, x2 in ps[x]:
            yield lab, (x2, y)
        for lab, y2 in qs[y]:
            yield lab, (x, y2)
        for la, x2 in ps[x]:
            for lb, y2 in qs[y]:
                c = gamma(la, lb)
                if c is not None:
                    yield c, (x2, y2)

    return explore(
        (p.root, q.root), step,
        lambda st: st[0] in p.terminating and st[1] in q.terminating,
        bound,
    )


LabelSet = Union[Collection[Label], Callable[[Label], bool]]


def _member(h: LabelSet) -> Callable[[Label], bool]:
    if callable(h):
        return h
    hs = frozenset(h)
    return hs.__contains__


def encapsulate(p: Lts, h: LabelSet) -> Lts:
    """Block every action in ``h`` (a set of labels or a predicate)."""
    blocked = _member(h)
    if not callable(h) and TAU_L in h:
        raise ValueError("tau cannot be encapsulated")
    keep = [e for e in p.transitions if e[1] == TAU_L or not blocked(e[1])]
    return build_lts(p.root, keep, p.terminating)


def rename(p: Lts, r: Union[dict, Callable[[Label], Label]]) -> Lts:
    fn = r if callable(r) else (lambda lab: r.get(lab, lab))
    if fn(TAU_L) != TAU_L:
        raise ValueError("renaming must fix tau")
    edges = [(s, TAU_L if lab == TAU_L else fn(lab), t) for s, lab, t in p.transitions]
    return build_lts(p.root, edges, p.terminating)


def abstract(p: Lts, i: LabelSet) -> Lts:
    """Turn every action in ``i`` into tau."""
    hidden = _member(i)
    return rename(p, lambda lab: TAU_L if hidden(lab) else lab)


def tau_prefix(p: Lts) -> Lts:
    edges = [(("p", s), lab, ("p", t)) for s, lab, t in p.transitions]
    edges.append(("root", TAU_L, ("p", p.root)))
    return build_lts("root", edges, [("p", s) for s in p.terminating])


# -- linear process specifications ---------------------------------------------


@dataclass(frozen=True)
class Step:
    action: Label
    target: str

    def __str__(self):
        return f"{self.action} . {self.target}"


@dataclass(frozen=True)
class Terminate:
    action: Label

    def __str__(self):
        return str(self.action)


@dataclass(frozen=True)
class DeltaSummand:
    def __str__(self):
        return "delta"


DELTA = DeltaSummand()


@dataclass(frozen=True)
class LinearProcessSpec:
    """Equations in declaration order; the first variable is the default root."""

    equations: tuple  # of (variable, tuple of summands)

    def __post_init__(self):
        eqs = tuple((x, tuple(summands)) for x, summands in self.equations)
        object.__setattr__(self, "equations", eqs)
        if not eqs:
            raise ValueError("a specification needs at least one equation")
        names = [x for x, _ in eqs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate equation for a variable")
        bound = set(names)
        for x, summands in eqs:
            for s in summands:
                if isinstance(s, Step) and s.target not in bound:
                    raise KeyError(f"unbound variable {s.target} in equation for {x}")

    @property
    def root(self) -> str:
        return self.equations[0][0]

    def as_dict(self) -> dict:
        return dict(self.equations)

    def __str__(self):
        return "\n".join(
            f"{x} = {' + '.join(map(str, summands)) if summands else 'delta'} ;"
            for x, summands in self.equations
        )


def lts_from_linear_spec(e: LinearProcessSpec, x: str | None = None) -> Lts:
    x = e.root if x is None else x
    eqs = e.as_dict()
    if x not in eqs:
        raise KeyError(f"unbound variable {x}")
    edges = []
    for var, summands in eqs.items():
        for s in summands:
            if isinstance(s, Step):
                edges.append((var, s.action, s.target))
            elif isinstance(s, Terminate):
                edges.append((var, s.action, "$done"))
    return build_lts(x, edges, ["$done"])


def parse_linear_process_spec(text: str) -> LinearProcessSpec:
    r = Reader(text)
    eqs = []
    while not r.at_end():
        var = r.match(IDENT_RE, "variable")
        r.expect("=")
        summands = [_parse_summand(r)]
        while r.accept("+"):
            summands.append(_parse_summand(r))
        r.expect(";")
        eqs.append((var, summands))
    if not eqs:
        raise ParseError("empty specification", 0)
    try:
        return LinearProcessSpec(tuple(eqs))
    except (KeyError, ValueError) as exc:
        raise ParseError(str(exc.args[0])) from None


_LABEL_TOKEN = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*(\([^()]*\))?")


def _parse_summand(r: Reader):
    start = r.pos
    tok = r.match(_LABEL_TOKEN, "action or delta")
    if tok == "delta":
        return DELTA
    try:
        lab = parse_label(tok)
    except ParseError as exc:
        raise ParseError(str(exc), start) from None
    if r.accept("."):
        return Step(lab, r.match(IDENT_RE, "variable"))
    return Terminate(lab)


# -- serialisation ------------------------------------------------------------------


def to_json(p: Lts) -> str:
    p = canonical(p)
    doc = {
        "root": p.root,
        "states": p.num_states,
        "terminating": sorted(p.terminating),
        "transitions": [[s, str(lab), t] for s, lab, t in p.transitions],
    }
    return json.dumps(doc, indent=1)


def from_json(text: str) -> Lts:
    try:
        doc = json.loads(text)
        edges = tuple((int(s), parse_label(lab), int(t)) for s, lab, t in doc["transitions"])
        return Lts(int(doc["states"]), int(doc["root"]), edges, frozenset(doc.get("terminating", ())))
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad JSON LTS: {exc}") from None


TERM_LABEL = "term!"


def to_aut(p: Lts) -> str:
    """Aldebaran format; termination becomes a ``term!`` edge into an extra sink."""
    p = canonical(p)
    sink = p.num_states
    lines = [f"des ({p.root}, {len(p.transitions) + len(p.terminating)}, {p.num_states + 1})"]
    edges = [(s, str(lab), t) for s, lab, t in p.transitions]
    edges += [(s, TERM_LABEL, sink) for s in p.terminating]
    edges.sort(key=lambda e: (e[0], e[1], e[2]))
    lines += [f'({s},"{lab}",{t})' for s, lab, t in edges]
    return "\n".join(lines) + "\n"


_DES_RE = re.compile(r"\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*")
_AUT_EDGE_RE = re.compile(r'\s*\(\s*(\d+)\s*,\s*(?:"([^"]*)"|([^,]*?))\s*,\s*(\d+)\s*\)\s*')


def from_aut(text: str) -> Lts:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty .aut file")
    m = _DES_RE.fullmatch(lines[0])
    if not m:
        raise ParseError("missing des header")
    root, count, nstates = map(int, m.groups())
    if nstates < 2:
        raise ParseError("an encoded LTS has at least one state plus the termination sink")
    sink = nstates - 1
    edges, term = [], set()
    for lineno, ln in enumerate(lines[1:], start=2):
        em = _AUT_EDGE_RE.fullmatch(ln)
        if not em:
            raise ParseError(f"bad transition on line {lineno}")
        s, q, bare, t = em.groups()
        s, t = int(s), int(t)
        lab = q if q is not None else bare
        if lab == TERM_LABEL:
            if t != sink:
                raise ParseError(f"line {lineno}: termination edge must target the sink state {sink}")
            term.add(s)
        else:
            if sink in (s, t):
                raise ParseError(f"line {lineno}: only termination edges may touch the sink state")
            edges.append((s, parse_label(lab), t))
    if count != len(lines) - 1:
        raise ParseError(f"header announces {count} transitions, found {len(lines) - 1}")
    return Lts(nstates - 1, root, tuple(edges), frozenset(term))


def to_text(p: Lts) -> str:
    p = canonical(p)
    out = [f"root {p.root}", f"states {p.num_states}"]
    out += [f"{s} -{lab}-> {t}" for s, lab, t in p.transitions]
    out.append("terminating " + " ".join(map(str, sorted(p.terminating))))
    return "\n".join(out) + "\n"
