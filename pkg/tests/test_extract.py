import pytest
from hypothesis import given, settings, strategies as st

import gen
from extraction_laws import LAW_NAMES, basic, ext, laws, switch
from isaw.extract import PeriodPos, PrefixPos, extract_thread, resolve
from isaw.pga import canonical_form, parse_pga
from isaw.threads import DEAD, STOP, single, thread_equal

ALL_LAWS = list(laws())


@pytest.mark.parametrize("law", LAW_NAMES + ("chain",))
def test_defining_equation(law):
    cases = [(lhs, rhs) for name, lhs, rhs in ALL_LAWS if name == law]
    assert cases
    for lhs, rhs in cases:
        assert thread_equal(lhs, rhs)


def test_halt_is_stop():
    assert thread_equal(ext("!"), single(STOP))


def test_plain_at_end_deadlocks_afterwards():
    a = ext("ac(a)")
    root = a[a.root]
    assert root.action == basic("ac(a)") and root.arity == 1
    assert a[root.targets[0]] == DEAD


def test_positive_test_then_halt_then_abort():
    a = ext("+a.m ; ! ; #0")
    assert thread_equal(a, switch(basic("a.m"), single(STOP), single(DEAD)))


def test_multi_reply_targets():
    a = ext("+[3]ac(e1,e2,e3) ; ! ; a.m ; b.m")
    b = switch(basic("ac(e1,e2,e3)"), single(STOP), ext("a.m ; b.m"), ext("b.m"))
    assert thread_equal(a, b)


def test_negative_multi_reply_targets_are_reversed():
    a = ext("-[3]ac(e1,e2,e3) ; ! ; a.m ; b.m")
    b = switch(basic("ac(e1,e2,e3)"), ext("b.m"), ext("a.m ; b.m"), single(STOP))
    assert thread_equal(a, b)


def test_resolve_examples():
    s = canonical_form(parse_pga("#0 ; !"))
    assert resolve(s, PrefixPos(1)) == DEAD
    s = canonical_form(parse_pga("(#2 ; #2)*"))
    assert resolve(s, PeriodPos(0)) == DEAD
    s = canonical_form(parse_pga("#1 ; !"))
    assert resolve(s, PrefixPos(1)) == PrefixPos(2)


def test_resolve_jump_past_finite_end():
    s = canonical_form(parse_pga("#5 ; a.m"))
    assert resolve(s, PrefixPos(1)) == DEAD


def test_resolve_into_the_period():
    s = canonical_form(parse_pga("#3 ; a.m ; (b.m ; c.m)*"))
    assert resolve(s, PrefixPos(1)) == PeriodPos(1)


def test_multi_reply_window_past_end_is_dead():
    a = ext("+[4]ac(a,b,c,d) ; !")
    b = switch(basic("ac(a,b,c,d)"), single(STOP), single(DEAD), single(DEAD), single(DEAD))
    assert thread_equal(a, b)


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_state_count_is_bounded_by_positions(rng):
    s = canonical_form(gen.term(rng, 8))
    assert len(extract_thread(s)) <= len(s) + 2


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_equal_sequences_give_equal_threads(rng):
    _, lhs, rhs = gen.axiom_pair(rng)
    assert thread_equal(extract_thread(canonical_form(lhs)), extract_thread(canonical_form(rhs)))


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_extraction_is_deterministic(rng):
    s = canonical_form(gen.term(rng, 6))
    assert extract_thread(s) == extract_thread(s)
