import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cannon.acceptance import toy_system
from cannon.groups import f2xz_oracle
from cannon.history import (LEFT, RIGHT, DeletionConvention, HistoryError, build_diagram,
                            check_width_lemmas, class_count_bound, extract_splitting_path,
                            f2xz_test_sets, find_breaker, generation_bound_holds,
                            naive_f2xz_candidate, render_ascii, render_svg, splice, validate_path)
from cannon.rewrite import (INCREMENTAL, RewritingSystem, Rule, accepts, free_group_system,
                            parse_word, reduce_traced, rule)

F = free_group_system(["a", "b"])
TOY = toy_system()


@st.composite
def traced(draw):
    S = draw(st.sampled_from([F, TOY]))
    w = tuple(draw(st.lists(st.sampled_from(S.input_alphabet), max_size=30)))
    bnd = sorted(draw(st.lists(st.integers(0, len(w)), max_size=3)))
    return S, build_diagram(reduce_traced(S, w), bnd, W=S.window)


@settings(max_examples=300, deadline=None)
@given(traced())
def test_width_lemmas(sd):
    _, d = sd
    assert check_width_lemmas(d).ok
    assert generation_bound_holds(d)
    assert all(sum((c.width for c in row), Fraction(0)) == d.total for row in d.rows if row)


@settings(max_examples=300, deadline=None)
@given(traced(), st.sampled_from([LEFT, RIGHT]))
def test_paths_are_valid_and_short(sd, side):
    _, d = sd
    t = len(d.rows) - 1
    for j, c in enumerate(d.letters(t)):
        if c.border:
            continue
        pd = extract_splitting_path(d, j, side)
        assert validate_path(d, pd.path) == []
        assert pd.length <= 2 * pd.generation + 2


def test_border_target_rejected():
    w = parse_word("a.b.a.b")
    d = build_diagram(reduce_traced(F, w), [2], W=F.window)
    border = [j for j, c in enumerate(d.letters(0)) if c.border]
    assert border
    with pytest.raises(HistoryError):
        extract_splitting_path(d, border[0])


def test_self_splice_reproduces_history():
    rng = random.Random(1)
    for _ in range(100):
        w = tuple(rng.choice("ab") for _ in range(rng.randint(4, 20)))
        d = build_diagram(reduce_traced(TOY, w), W=TOY.window)
        for j, c in enumerate(d.letters(len(d.rows) - 1)):
            if not c.border:
                p = extract_splitting_path(d, j).path
                sp = splice(d, p, d, p)
                assert sp.start == w and sp.verify(TOY)
                break


def test_splice_requires_equal_details():
    d1 = build_diagram(reduce_traced(F, parse_word("a.a.a.a")), W=2)
    d2 = build_diagram(reduce_traced(F, parse_word("b.b.b.b")), W=2)
    p1 = extract_splitting_path(d1, 1).path
    p2 = extract_splitting_path(d2, 1).path
    with pytest.raises(HistoryError):
        splice(d1, p1, d2, p2)


def test_deletion_convention_checks():
    r = rule("a.b.c", "x")
    DeletionConvention({r: (1,)}).check(r)
    with pytest.raises(HistoryError):
        DeletionConvention({r: (3,)}).check(r)


def test_renderers():
    d = build_diagram(reduce_traced(F, parse_word("a.b.B.A.a")), [2], W=2)
    txt = render_ascii(d)
    assert len(txt.splitlines()) >= 3 and "a" in txt
    svg = render_svg(d)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_class_count_bound():
    assert class_count_bound(2, 2, 0) == 2 * 9 * 2 ** 5
    assert class_count_bound(2, 2, 1) == (2 * 9 * 2 ** 5) ** 2


def test_naive_candidate_is_sound():
    S = naive_f2xz_candidate(4)
    O = f2xz_oracle()
    rng = random.Random(2)
    for _ in range(500):
        w = tuple(rng.choice(O.gens) for _ in range(rng.randint(0, 20)))
        if accepts(S, w):
            assert O.is_identity(w)


def test_test_sets():
    T1, T2 = f2xz_test_sets(6, 12)
    assert len(T1) == 972 and len(T2) == 13
    assert all(len(v) == 12 for v in T2)


def test_breaker_found_for_pair_eraser():
    free = ["a", "A", "b", "B"]
    rules = [Rule((x, y), ()) for x in free for y in free] + [rule("z.Z"), rule("Z.z")]
    S = RewritingSystem(INCREMENTAL, tuple(free + ["z", "Z"]), tuple(free + ["z", "Z"]),
                        tuple(rules), name="pair-eraser")
    O = f2xz_oracle()
    T1, T2 = f2xz_test_sets(4, 12)
    rep = find_breaker(S, O, T1, T2)
    assert rep.verdict == "breaker"
    assert rep.collisions > 0 and rep.splices_verified > 0
    assert accepts(S, rep.witness) and not O.is_identity(rep.witness)


def test_exact_system_on_one_cyclic_factor_is_exhausted():
    S = free_group_system(["a", "b", "z"])
    O = f2xz_oracle()
    T1 = [("a",) * k for k in range(1, 6)]
    T2 = [("A",) * k for k in range(1, 6)]
    rep = find_breaker(S, O, T1, T2)
    assert rep.verdict == "exhausted" and rep.witness is None


def test_breaker_rejects_non_commuting_sets():
    with pytest.raises(HistoryError):
        find_breaker(F, f2xz_oracle(), [("a",)], [("b",)])
