import pytest
from hypothesis import given, settings, strategies as st

from cannon.groups import (DihedralOracle, FreeGroupOracle, FreeProductOracle, HeisenbergOracle,
                           IntegerOracle, OracleError, UnitriangularOracle, ball, f2xz_oracle,
                           oracle_by_name)

ORACLES = [IntegerOracle(), FreeGroupOracle(("a", "b")), HeisenbergOracle(), UnitriangularOracle(4),
           DihedralOracle(), f2xz_oracle(),
           FreeProductOracle(IntegerOracle("x", "X"), IntegerOracle("y", "Y"))]


def word_for(o, max_size=12):
    return st.lists(st.sampled_from(o.gens), max_size=max_size).map(tuple)


@pytest.mark.parametrize("o", ORACLES, ids=lambda o: o.name)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_group_axioms(o, data):
    u, v, w = (data.draw(word_for(o)) for _ in range(3))
    assert o.is_identity(u + o.inverse_word(u))
    assert o.is_identity(o.inverse_word(u) + u)
    assert o.evaluate(u + v + w) == o.mul(o.mul(o.evaluate(u), o.evaluate(v)), o.evaluate(w))


def test_heisenberg_commutator_is_central():
    H = HeisenbergOracle()
    c = ("x", "y", "X", "Y")
    assert H.evaluate(c) == (0, 1, 0) or H.evaluate(c) == (0, -1, 0)
    assert H.equal(c + ("x",), ("x",) + c)
    assert not H.is_identity(c)


def test_dihedral_relations():
    D = DihedralOracle()
    assert D.is_identity(("s", "s"))
    assert D.is_identity(("s", "r", "s", "r"))
    assert not D.is_identity(("r", "r"))


def test_ball_sizes():
    assert len(ball(IntegerOracle(), 5)) == 11
    # free group on two generators: 1 + 4 + 12 + 36
    assert len(ball(FreeGroupOracle(("a", "b")), 3)) == 53
    t = ball(HeisenbergOracle(), 4)
    assert t.is_geodesic(HeisenbergOracle(), ("x", "y"))
    assert not t.is_geodesic(HeisenbergOracle(), ("x", "X", "y"))


def test_ball_budget():
    with pytest.raises(OracleError):
        ball(FreeGroupOracle(("a", "b")), 10, budget=100)


def test_oracle_by_name():
    assert oracle_by_name("dihedral-inf").name == DihedralOracle().name
    with pytest.raises(OracleError):
        oracle_by_name("nope")
