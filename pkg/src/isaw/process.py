"""Process extraction: from thread automata to LTSs, including threads that use services."""
from __future__ import annotations

from .lts import (
    I_L,
    RCV,
    RCV_S,
    SND,
    SND_S,
    STOP_BAR_L,
    STOP_L,
    STOP_STAR_L,
    Label,
    Lts,
    abstract,
    atom,
    build_lts,
    encapsulate,
    par_merge,
    rcv,
    rcv_s,
    rename,
    snd,
    snd_s,
)
from .pga import Atom, Construct, Interaction
from .services import Service, reachable_services
from .threads import DEAD, STOP, TAU, ThreadAutomaton

_DONE = "$done"
_DEADLOCK = "$deadlock"


def pextr_c(a: ThreadAutomaton) -> Lts:
    """The process of ``a`` with an explicit ``stop`` just before termination.

    Switches whose construct arity disagrees with their target count are
    extracted directly (surplus targets ignored, missing ones become ``i.delta``),
    so normalising first gives a strongly bisimilar result.
    """
    edges = []
    for sid, st in a.states.items():
        if st == STOP:
            edges.append((sid, STOP_L, _DONE))
        elif st == DEAD:
            edges.append((sid, I_L, _DEADLOCK))
        else:
            act = st.action
            if act == TAU:
                mid = ("tau", sid)
                edges.append((sid, I_L, mid))
                edges.append((mid, I_L, st.targets[0]))
            elif isinstance(act, Interaction):
                mid = ("reply", sid)
                edges.append((sid, snd(act.focus, act.method), mid))
                for j, t in enumerate(st.targets, start=1):
                    edges.append((mid, rcv(act.focus, j), t))
            elif isinstance(act, Construct):
                for j, e in enumerate(act.actions):
                    if j < st.arity:
                        edges.append((sid, atom(e), st.targets[j]))
                    else:
                        mid = ("missing", sid, j)
                        edges.append((sid, atom(e), mid))
                        edges.append((mid, I_L, _DEADLOCK))
            elif isinstance(act, Atom):
                raise ValueError(
                    f"basic action {act} is neither f.m nor ac(...); it has no process semantics"
                )
            else:
                raise TypeError(f"unknown basic action {act!r}")
    return build_lts(a.root, edges, [_DONE])


def pextr(a: ThreadAutomaton) -> Lts:
    return abstract(pextr_c(a), {STOP_L})


def service_lts(h: Service, bound: int = 100_000, extra_methods=()) -> Lts:
    """The service as a process: answer ``rcv_s(m)`` with ``snd_s(reply)``, or stop.

    ``extra_methods`` are accepted alongside the declared ones; an undeclared
    method is answered like any other (for the bundled services, with 0).
    """
    methods = tuple(h.methods) + tuple(sorted(set(extra_methods) - set(h.methods)))
    edges = []
    for cur in reachable_services(h, bound, methods):
        for m in methods:
            mid = ("answer", cur, m)
            edges.append((cur, rcv_s(m), mid))
            edges.append((mid, snd_s(cur.reply(m)), cur.derive(m)))
        edges.append((cur, STOP_BAR_L, _DONE))
    return build_lts(h, edges, [_DONE])


def channel_set(f: str):
    """Membership test for ``A_f``: every snd_f(d) and rcv_f(d)."""
    return lambda lab: lab.kind in (SND, RCV) and lab.focus == f


def focus_renaming(f: str):
    """``R_f``: service-side channel actions become actions on focus ``f``."""

    def r(lab: Label) -> Label:
        if lab.kind == SND_S:
            return snd(f, lab.data)
        if lab.kind == RCV_S:
            return rcv(f, lab.data)
        return lab

    return r


def use_on_process(p: Lts, f: str, h: Service, bound: int = 100_000) -> Lts:
    """Compose a stop-level process with service ``h`` on focus ``f``."""
    sent = {lab.data for lab in p.labels() if lab.kind == SND and lab.focus == f}
    served = rename(service_lts(h, bound, sent), focus_renaming(f))
    merged = par_merge(p, served, bound)
    merged = encapsulate(merged, channel_set(f))
    merged = encapsulate(merged, {STOP_L, STOP_BAR_L})
    return rename(merged, {STOP_STAR_L: STOP_L})


def use_process(a: ThreadAutomaton, f: str, h: Service, bound: int = 100_000) -> Lts:
    """The stop-level process of ``a /f h``; abstract ``{stop}`` for the final process."""
    return use_on_process(pextr_c(a), f, h, bound)


def use_chain(a: ThreadAutomaton, uses, bound: int = 100_000) -> Lts:
    """Apply ``(focus, service)`` pairs left to right at process level, then hide ``stop``."""
    p = pextr_c(a)
    for f, h in uses:
        p = use_on_process(p, f, h, bound)
    return abstract(p, {STOP_L})

