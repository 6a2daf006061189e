import pytest
from hypothesis import given, settings, strategies as st

from cannon.rewrite import (INCREMENTAL, NON_INCREMENTAL, RewriteError, RewritingSystem, Rule,
                            accepts, dehn_system, dumps, find_redex, format_word, free_group_system,
                            inverse_name, loads, naive_reduce_traced, parse_word, reduce,
                            reduce_traced, rule, surface_octagon_system, validate_system)

LETTERS = ["a", "b", "c"]


def test_parse_and_format():
    assert parse_word("a.bb.[x.y]") == ("a", "bb", "[x.y]")
    assert parse_word("") == () == parse_word("ε")
    assert format_word(("1", "-1")) == "1.-1"
    with pytest.raises(RewriteError):
        parse_word("a..b")


def test_inverse_names():
    assert [inverse_name(a) for a in ("a", "A", "1", "-1", "t", "t-")] == ["A", "a", "-1", "1", "T", "t"]


def test_free_cancellation():
    F = free_group_system(["a", "b"])
    assert reduce(F, parse_word("a.b.B.A.b")) == ("b",)
    assert accepts(F, parse_word("a.b.B.A"))
    assert not accepts(F, parse_word("a.b.A.B"))


def test_incremental_prefers_earliest_end_then_longest():
    S = RewritingSystem(INCREMENTAL, ("a", "b"), ("a", "b"),
                        (rule("a.b", "b"), rule("a.a.b", "a"), rule("b.b", "")))
    h = reduce_traced(S, parse_word("a.a.b.b"))
    # a.a.b and a.b both end at position 2; the longer wins
    assert h.steps[0].start == 0 and h.steps[0].rule.lhs == ("a", "a", "b")


def test_non_incremental_prefers_earliest_start():
    S = RewritingSystem(NON_INCREMENTAL, ("a", "b"), ("a", "b"),
                        (rule("a.b.b", "b"), rule("b.b", "")))
    h = reduce_traced(S, parse_word("a.b.b"))
    assert h.steps[0].start == 0


def test_anchors():
    S = RewritingSystem(NON_INCREMENTAL, ("a", "b"), ("a", "b"),
                        (rule("a", "", start=True), rule("b", "", end=True)))
    assert reduce(S, parse_word("b.a")) == ("b", "a")
    assert reduce(S, parse_word("a.a.b.b")) == ()


def test_validate_reports_non_reducing_rules():
    S = RewritingSystem(INCREMENTAL, ("a",), ("a",), (Rule(("a",), ("a",)),))
    assert validate_system(S)


def test_budget_stops_runaway():
    F = free_group_system(["a"])
    with pytest.raises(RewriteError):
        reduce(F, ("a", "A") * 50, budget=3)


@st.composite
def systems(draw):
    flavor = draw(st.sampled_from([INCREMENTAL, NON_INCREMENTAL]))
    rules = {}
    for _ in range(draw(st.integers(1, 6))):
        lhs = tuple(draw(st.lists(st.sampled_from(LETTERS), min_size=1, max_size=4)))
        rhs = tuple(draw(st.lists(st.sampled_from(LETTERS), max_size=len(lhs) - 1)))
        s = draw(st.booleans())
        e = draw(st.booleans()) and flavor == NON_INCREMENTAL
        rules[(lhs, s, e)] = Rule(lhs, rhs, s, e)
    return RewritingSystem(flavor, tuple(LETTERS), tuple(LETTERS), tuple(rules.values()))


words = st.lists(st.sampled_from(LETTERS), max_size=15).map(tuple)


@settings(max_examples=400, deadline=None)
@given(systems(), words)
def test_engine_matches_naive_rescan(S, w):
    h1, h2 = reduce_traced(S, w), naive_reduce_traced(S, w)
    assert h1.words == h2.words
    assert [s.start for s in h1.steps] == [s.start for s in h2.steps]


@settings(max_examples=200, deadline=None)
@given(systems(), words)
def test_find_redex_is_first_step(S, w):
    h = naive_reduce_traced(S, w)
    got = find_redex(S, w)
    if not h.steps:
        assert got is None
    else:
        assert got[2] == h.steps[0].start


@settings(max_examples=200, deadline=None)
@given(systems(), words)
def test_reduction_is_irreducible_and_shorter(S, w):
    r = reduce(S, w)
    assert len(r) <= len(w)
    assert find_redex(S, r) is None


@settings(max_examples=100, deadline=None)
@given(systems())
def test_json_round_trip(S):
    T = loads(dumps(S))
    assert T.flavor == S.flavor and T.rules == S.rules
    assert dumps(T) == dumps(S)


def test_surface_octagon():
    S = surface_octagon_system()
    assert not validate_system(S)
    rel = parse_word("a.b.A.B.c.d.C.D")
    assert accepts(S, rel) and accepts(S, rel[3:] + rel[:3])
    assert accepts(S, ("c",) + rel + ("C",))
    assert not accepts(S, parse_word("a.b.A.B"))


def test_dehn_rejects_conflicting_relators():
    with pytest.raises(RewriteError):
        dehn_system([parse_word("a.a.a"), parse_word("a.a.b")])
