import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cannon.expanding import (ExpandingParams, NormalFormError, ParamsError, balanced_value,
                              check_height_bound, check_tight, estimate_params, heisenberg_system,
                              is_balanced, min_height_bound, normal_form_violations,
                              parse_normal_form, z_decimal_system, z_spec)
from cannon.groups import HeisenbergOracle
from cannon.rewrite import Rule, dumps, format_word, loads, reduce, validate_system


@pytest.fixture(scope="module")
def Z():
    return z_decimal_system()


@pytest.fixture(scope="module")
def H():
    return heisenberg_system()


def test_decimal_572(Z):
    out = reduce(Z, ("1",) * 572)
    assert format_word(out) == "t.t.1.1.1.1.1.t-.1.1.1.1.1.1.1.t-.1.1"
    assert balanced_value(z_spec(10), out) == 572


def test_small_values(Z):
    assert format_word(reduce(Z, ("1",) * 12)) == "t.1.t-.1.1"
    assert reduce(Z, ("1",) * 9) == ("1",) * 9
    assert reduce(Z, ("1",) * 30 + ("-1",) * 30) == ()


def test_system_is_valid(Z):
    assert not validate_system(Z)


@settings(max_examples=150, deadline=None)
@given(st.integers(-3000, 3000))
def test_outputs_are_normal_forms(Z, n):
    w = ("1",) * n if n >= 0 else ("-1",) * -n
    r = reduce(Z, w)
    assert is_balanced(r)
    assert balanced_value(z_spec(10), r) == n
    nf = parse_normal_form(r)
    fam = z_decimal_system(materialize=False).families[0]
    assert normal_form_violations(nf, fam.spec, fam.table, fam.K) == []


def test_implicit_and_materialized_agree(Z):
    I = z_decimal_system(materialize=False)
    rng = random.Random(1)
    for _ in range(300):
        w = tuple(rng.choice(("1", "-1", "1")) for _ in range(rng.randint(0, 120)))
        assert reduce(I, w) == reduce(Z, w)


def test_params_checks():
    with pytest.raises(ParamsError):
        ExpandingParams(Fraction(3), 5).check()
    with pytest.raises(ParamsError):
        ExpandingParams(Fraction(10), 5, N=1).check()
    assert min_height_bound(Fraction(10), 5) == 2


def test_estimate_params_for_z():
    p = estimate_params(z_spec(10), 30)
    assert p.M == 10 and p.K <= 5


def test_parse_normal_form_errors():
    with pytest.raises(NormalFormError):
        parse_normal_form(("t", "1"))
    with pytest.raises(NormalFormError):
        balanced_value(z_spec(10), ("t-",))


def test_height_bound(Z, H):
    rng = random.Random(2)
    zs = [("1",) * rng.randint(0, 5000) for _ in range(40)]
    assert check_height_bound(Z, z_spec(10), ExpandingParams(Fraction(10), 5), zs)["ok"]
    fam = H.families[0]
    hs = [tuple(rng.choice("xXyY") for _ in range(rng.randint(0, 40))) for _ in range(200)]
    rep = check_height_bound(H, fam.spec, fam.params, hs)
    assert rep["ok"] and rep["checked"] > 100


def test_tight_with_local_geodesic_rule():
    S = z_decimal_system(N=3, materialize=False)
    extra = [Rule(("1",) * 5 + ("-1",) * 6, ("-1",))]
    rng = random.Random(3)
    samples = [tuple(rng.choice(("1", "-1")) for _ in range(rng.randint(0, 30))) for _ in range(300)]
    rep = check_tight(S, extra, 3, samples)
    assert rep["ok"], rep


def test_heisenberg_sound_on_random_words(H):
    o = HeisenbergOracle()
    spec = H.families[0].spec
    rng = random.Random(4)
    for _ in range(300):
        w = tuple(rng.choice(o.gens) for _ in range(rng.randint(0, 30)))
        r = reduce(H, w)
        assert balanced_value(spec, r) == o.evaluate(w)
        assert (r == ()) == o.is_identity(w)


def test_heisenberg_json_keeps_family(H):
    text = dumps(H)
    assert '"families"' in text and len(text) < 2000
    H2 = loads(text)
    w = tuple("xyXYyxYX")
    assert reduce(H2, w) == reduce(H, w) == ()
