import random

import pytest
from hypothesis import given, settings, strategies as st

from cannon.acceptance import dihedral_system, toy_system, zz_system
from cannon.constructions import (GeneratorTranslation, MergeConflict, block_letters,
                                  change_generators, chunk, compress, compress_strict, letter_name,
                                  merge_rule_sets, payload_of, rename_letters,
                                  restrict_to_subgroup, to_non_incremental, write_out)
from cannon.expanding import z_decimal_system
from cannon.groups import DihedralOracle, FreeGroupOracle
from cannon.rewrite import (INCREMENTAL, NON_INCREMENTAL, RewriteError, RewritingSystem, Rule,
                            accepts, dumps, free_group_system, loads, reduce, reduce_traced, rule,
                            validate_system)

F = free_group_system(["a", "b"])


def test_block_letters():
    assert letter_name(("a", "b")) == "[a.b]"
    assert payload_of("[a.b]") == ("a", "b") and payload_of("a") == ("a",)
    assert write_out(("[a.b]", "A")) == ("a", "b", "A")
    assert len(block_letters(("a", "b"), 2)) == 2 + 4
    assert chunk(("a", "b", "c"), 2) == ["[a.b]", "[c]"]


@pytest.mark.parametrize("S", [F, toy_system(), z_decimal_system(N=2)], ids=["free", "toy", "zdec"])
def test_to_non_incremental_step_identical(S):
    N = to_non_incremental(S)
    assert N.flavor == NON_INCREMENTAL and not validate_system(N)
    rng = random.Random(0)
    for _ in range(500):
        w = tuple(rng.choice(S.input_alphabet) for _ in range(rng.randint(0, 40)))
        h1, h2 = reduce_traced(S, w), reduce_traced(N, w)
        assert h1.words == h2.words
        assert [s.start for s in h1.steps] == [s.start for s in h2.steps]


def test_shadow_rule_for_anchored_rule_ending_later():
    # both left-hand sides end on the same letter; the longer anchored one wins
    S = RewritingSystem(INCREMENTAL, tuple("abc"), tuple("abc"),
                        (Rule(("a", "b", "c"), (), anchor_start=True), rule("b.c", "a")))
    N = to_non_incremental(S)
    for w in [tuple("abc"), tuple("aabc"), tuple("bc")]:
        assert reduce_traced(S, w).words == reduce_traced(N, w).words


@pytest.mark.parametrize("n", [1, 2, 3])
def test_basic_compression_writes_out_to_base(n):
    C = compress(F, n)
    rng = random.Random(n)
    for _ in range(300):
        w = tuple(rng.choice(C.input_alphabet) for _ in range(rng.randint(0, 10)))
        assert write_out(reduce(C, w)) == reduce(F, write_out(w))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from("abAB"), max_size=30), st.integers(2, 3), st.randoms())
def test_strict_compression_intermediate(x, n, rnd):
    C = _strict_free(n)
    blocks, i = [], 0
    while i < len(x):
        k = rnd.randint(1, n)
        blocks.append(letter_name(x[i:i + k]))
        i += k
    hist = reduce_traced(F, tuple(x))
    out = write_out(reduce(C, tuple(blocks)))
    assert out in hist.words
    assert (out == ()) == (hist.final == ())


_CACHE = {}


def _strict_free(n):
    if n not in _CACHE:
        _CACHE[n] = compress_strict(F, n)
    return _CACHE[n]


def test_strict_compression_is_strict_and_serializable():
    C = compress_strict(F, 2)
    assert C.strict
    C2 = loads(dumps(C))
    w = ("[a.b]", "[B.A]", "[a]")
    assert reduce(C2, w) == reduce(C, w)


def test_change_generators_decodes_names():
    Z = z_decimal_system()
    C = change_generators(Z, GeneratorTranslation({"two": ("1", "1"), "neg-two": ("-1", "-1")}))
    assert accepts(C, ("two", "two", "neg-two", "neg-two"))
    assert not accepts(C, ("two",))
    with pytest.raises(RewriteError):
        GeneratorTranslation({"x": ("1", "1", "1")}, n=2)


def test_restrict_to_subgroup():
    S = restrict_to_subgroup(F, ["a", "A"])
    assert set(S.input_alphabet) == {"a", "A"}
    assert accepts(S, ("a", "A"))


def test_merge_conflict():
    A = RewritingSystem(INCREMENTAL, ("a",), ("a",), (rule("a.a", ""),))
    B = RewritingSystem(INCREMENTAL, ("a",), ("a",), (rule("a.a", "a"),))
    with pytest.raises(MergeConflict):
        merge_rule_sets([A, B])


def test_rename_letters():
    Z = rename_letters(z_decimal_system(), {"1": "a", "-1": "A", "t": "s", "t-": "s-"})
    assert reduce(Z, ("a",) * 12) == ("s", "a", "s-", "a", "a")
    with pytest.raises(RewriteError):
        rename_letters(F, {"a": "x", "b": "x"})


def test_free_product_matches_free_group():
    P = zz_system()
    O = FreeGroupOracle(("a", "b"))
    rng = random.Random(5)
    for _ in range(500):
        u = tuple(rng.choice(O.gens) for _ in range(rng.randint(0, 20)))
        w = u + O.inverse_word(u) if rng.random() < 0.5 else u
        assert accepts(P, w) == O.is_identity(w)


def test_free_product_needs_disjoint_alphabets():
    from cannon.constructions import free_product
    with pytest.raises(RewriteError):
        free_product(F, F)


def test_dihedral_finite_index():
    G = dihedral_system()
    D = DihedralOracle()
    assert accepts(G, ("s", "s")) and accepts(G, ("r", "s", "r", "s"))
    assert not accepts(G, ("r",))
    rng = random.Random(6)
    for _ in range(500):
        w = tuple(rng.choice(D.gens) for _ in range(rng.randint(0, 30)))
        w = w + D.inverse_word(w[: rng.randint(0, len(w))])
        assert accepts(G, w) == D.is_identity(w)
