import random

import pytest
from hypothesis import given, settings, strategies as st

import gen
from isaw.bisim import strong_bisimilar
from isaw.lts import (
    I_L,
    RCV_S,
    SND_S,
    STOP_BAR,
    STOP_BAR_L,
    STOP_L,
    STOP_STAR,
    TAU_L,
    abstract,
    atom,
    build_lts,
    rcv,
    rcv_s,
    snd,
    snd_s,
)
from isaw.pga import Atom, Construct, Interaction
from isaw.process import (
    channel_set,
    focus_renaming,
    pextr,
    pextr_c,
    service_lts,
    use_chain,
    use_process,
)
from isaw.services import BR, boolean_register, use_thread
from isaw.threads import DEAD, STOP, TAU, Switch, ThreadAutomaton, normalize, single

FM = Interaction("f", "m")


def auto(states, root=0):
    return ThreadAutomaton.build(states, root)


def labels(p):
    return sorted(str(lab) for _, lab, _ in p.transitions)


def test_stop():
    p = pextr_c(single(STOP))
    assert p.transitions == ((0, STOP_L, 1),) and p.terminating == {1}


def test_dead():
    p = pextr_c(single(DEAD))
    assert p.transitions == ((0, I_L, 1),) and not p.terminating


def test_interaction_sends_then_receives():
    p = pextr_c(auto({0: Switch(FM, (1, 2)), 1: STOP, 2: DEAD}))
    assert (0, snd("f", "m"), 1) in p.transitions
    assert {lab for s, lab, _ in p.transitions if s == 1} == {rcv("f", 1), rcv("f", 2)}


def test_tau_gives_two_internal_steps():
    p = pextr_c(auto({0: Switch(TAU, (1,)), 1: STOP}))
    assert labels(p) == ["i", "i", "stop"]
    assert p.transitions[0] == (0, I_L, 1) and p.transitions[1] == (1, I_L, 2)


def test_construct_branches_on_actions():
    p = pextr_c(auto({0: Switch(Construct(("a", "b")), (1, 2)), 1: STOP, 2: DEAD}))
    assert labels(p) == ["a", "b", "i", "stop"]


def test_unnormalized_construct_matches_normalized():
    a = auto({0: Switch(Construct(("e1", "e2", "e3")), (1,)), 1: STOP})
    p = pextr_c(a)
    assert labels(p) == ["e1", "e2", "e3", "i", "i", "stop"]
    assert strong_bisimilar(p, pextr_c(normalize(a)))
    b = auto({0: Switch(Construct(("e1",)), (1, 2, 2)), 1: STOP, 2: DEAD})
    assert strong_bisimilar(pextr_c(b), pextr_c(normalize(b)))


def test_abstraction_of_stop():
    p = pextr(single(STOP))
    assert p.transitions == ((0, TAU_L, 1),) and p.terminating == {1}
    assert pextr(single(DEAD)).transitions == ((0, I_L, 1),)


def test_loop_with_exit():
    a = auto({0: Switch(Construct(("a", "b")), (0, 1)), 1: STOP})
    expected = build_lts("x", [("x", atom("a"), "x"), ("x", atom("b"), "y"), ("y", TAU_L, "z")], ["z"])
    assert strong_bisimilar(pextr(a), expected)


def test_plain_atoms_have_no_process_meaning():
    with pytest.raises(ValueError):
        pextr_c(auto({0: Switch(Atom("a"), (1, 1)), 1: STOP}))


def test_register_service_process():
    p = service_lts(boolean_register(BR.TRUE))
    assert p.num_states > 2
    roots = [s for s in range(p.num_states) if any(lab == STOP_BAR_L for x, lab, _ in p.transitions if x == s)]
    assert len(roots) == 2
    for s in roots:
        assert sum(1 for x, lab, _ in p.transitions if x == s and lab == STOP_BAR_L) == 1
    blocked = service_lts(boolean_register(BR.BLOCKED))
    assert {lab for _, lab, _ in blocked.transitions if lab.kind == SND_S} == {snd_s(0)}


def test_service_accepts_extra_methods():
    p = service_lts(boolean_register(BR.TRUE), extra_methods=["flip"])
    assert rcv_s("flip") in p.labels()
    assert snd_s(0) in p.labels()


def test_channel_set_and_renaming():
    member = channel_set("f")
    assert member(snd("f", "m")) and member(rcv("f", 2))
    assert not member(snd("g", "m")) and not member(atom("a"))
    r = focus_renaming("f")
    assert r(snd_s(1)) == snd("f", 1) and r(rcv_s("m")) == rcv("f", "m")
    assert r(TAU_L) == TAU_L and r(atom("a")) == atom("a")


def test_use_without_focus_actions_changes_nothing():
    a = auto({0: Switch(Construct(("a", "b")), (0, 1)), 1: STOP})
    got = abstract(use_process(a, "f", boolean_register(BR.TRUE)), {STOP_L})
    assert strong_bisimilar(got, pextr(a))


def test_use_reply_one_path():
    a = auto({0: Switch(FM, (1, 1)), 1: STOP})

    class One(type(boolean_register())):
        methods = ("m",)

        def reply(self, m):
            return 1

        def derive(self, m):
            return self

    p = use_process(a, "f", One())
    expected = build_lts(0, [(0, I_L, 1), (1, I_L, 2), (2, STOP_L, 3)], [3])
    assert strong_bisimilar(p, expected)


def test_use_chain_applies_services_in_order():
    a = auto({0: Switch(Interaction("r1", "set:T"), (1, 1)),
              1: Switch(Interaction("r2", "get"), (2, 3)), 2: STOP, 3: DEAD})
    p = use_chain(a, [("r1", boolean_register(BR.FALSE)), ("r2", boolean_register(BR.FALSE))])
    t = use_thread(use_thread(a, "r1", boolean_register(BR.FALSE)), "r2", boolean_register(BR.FALSE))
    assert strong_bisimilar(p, pextr(t))


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_process_and_thread_level_use_agree(rng):
    a = gen.automaton(rng, rng.randint(1, 8), foci=("br", "g"), methods=("get", "set:T", "set:F", "oops"))
    h = boolean_register(rng.choice(list(BR)))
    assert strong_bisimilar(abstract(use_process(a, "br", h), {STOP_L}), pextr(use_thread(a, "br", h)))


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_thread_axioms_are_preserved(rng):
    _, lhs, rhs = gen.thread_axiom_instance(rng)
    assert strong_bisimilar(pextr(lhs), pextr(rhs))


def test_negative_control_for_axiom_preservation():
    # T1 read the wrong way round must be caught at least sometimes
    rng = random.Random(4)
    caught = 0
    for _ in range(100):
        x, y = gen.automaton(rng, 3), gen.automaton(rng, 3)
        if not strong_bisimilar(pextr(gen.glue(TAU, [x, y])), pextr(gen.glue(TAU, [y, y]))):
            caught += 1
    assert caught > 30


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_extracted_processes_use_only_client_labels(rng):
    a = gen.automaton(rng, 6, foci=("br", "g"), methods=("get", "set:T"))
    for p in (pextr(a), use_chain(a, [("br", boolean_register(BR.FALSE))])):
        kinds = {lab.kind for lab in p.labels()}
        assert not kinds & {SND_S, RCV_S, STOP_BAR, STOP_STAR}
