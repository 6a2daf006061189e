from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from cannon.machines import (END, DehnMachine, MachineError, erase_colors, example_machines,
                             free_group_rules, machine_accepts, mimic, mimic_accepts, pipeline,
                             run_machine)
from cannon.rewrite import NON_INCREMENTAL, free_group_system, reduce, validate_system

MACHINES = example_machines()


def test_single_state_machine_is_dehn():
    m = DehnMachine.single_state(free_group_rules(("a",)))
    assert machine_accepts(m, ("a", "A", "A", "a"))
    assert not machine_accepts(m, ("a",))


@pytest.mark.parametrize("name", sorted(MACHINES))
def test_mimic_agrees_on_short_words(name):
    m = MACHINES[name]
    M = mimic(m)
    assert not validate_system(M)
    assert M.potential == "colored"
    for L in range(7):
        for w in product(m.alphabet, repeat=L):
            run = run_machine(m, w)
            out = reduce(M, w)
            assert erase_colors(out) == run.word
            assert (out == ()) == (run.word == () and run.state == m.start)


@pytest.mark.parametrize("name", sorted(MACHINES))
@settings(max_examples=100, deadline=None)
@given(w=st.lists(st.sampled_from("ab"), min_size=9, max_size=16).map(tuple))
def test_mimic_agrees_on_longer_words(name, w):
    m = MACHINES[name]
    assert mimic_accepts(_mimic(name), w) == machine_accepts(m, w)


_M = {}


def _mimic(name):
    if name not in _M:
        _M[name] = mimic(MACHINES[name])
    return _M[name]


def test_run_records_configurations():
    m = MACHINES["two-state-non-incremental"]
    run = run_machine(m, ("a", "a"))
    assert run.configs[0] == ("q0", ("a", "a"), 0)
    assert run.word == () and run.substitutions == 1


def test_machine_json_round_trip():
    for m in MACHINES.values():
        m2 = DehnMachine.from_dict(m.to_dict())
        for L in range(6):
            for w in product("ab", repeat=L):
                assert machine_accepts(m2, w) == machine_accepts(m, w)


def test_unknown_letter():
    with pytest.raises(MachineError):
        run_machine(MACHINES["two-state-incremental"], ("c",))


def test_transition_keys_may_use_end_marker():
    m = MACHINES["two-state-non-incremental"]
    assert ("q1", ("b", END)) in m.transitions
    assert m.flavor == NON_INCREMENTAL


def test_pipeline_composes_and_checks_alphabets():
    F = free_group_system(["a"])
    P = pipeline([F, F])
    assert P.accepts(("a", "A"))
    with pytest.raises(MachineError):
        pipeline([free_group_system(["a", "b"]), F])
