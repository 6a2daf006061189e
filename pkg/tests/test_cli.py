import json

import pytest

from cannon.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("sys")
    paths = {}
    for name, argv in [("zdec", ["gen", "z-decimal", "--mu", 10, "--K", 5]),
                       ("free", ["gen", "free-group"]),
                       ("fa", ["gen", "free-group", "--gens", "a"]),
                       ("fb", ["gen", "free-group", "--gens", "b"]),
                       ("heis", ["gen", "heisenberg"]),
                       ("surface", ["gen", "surface-octagon"])]:
        p = d / f"{name}.json"
        assert main([str(a) for a in argv] + ["-o", str(p)]) == 0
        paths[name] = p
    paths["dir"] = d
    return paths


def test_decimal_572(capsys, files):
    code, out, _ = run(capsys, "reduce", files["zdec"], "--repeat", "1:572")
    assert code == 0 and out.strip() == "t.t.1.1.1.1.1.t-.1.1.1.1.1.1.1.t-.1.1"


def test_accepts_exit_codes(capsys, files):
    assert run(capsys, "accepts", files["free"], "a.A")[0] == 0
    assert run(capsys, "accepts", files["free"], "a")[0] == 1
    assert run(capsys, "accepts", files["heis"], "x.y.X.Y.y.x.Y.X")[0] == 0


def test_generated_systems_validate(capsys, files):
    for k in ("zdec", "free", "heis", "surface"):
        assert run(capsys, "validate", files[k])[0] == 0


def test_combine_and_validate(capsys, files):
    fp = files["dir"] / "fp.json"
    assert run(capsys, "combine", "free-product", files["fa"], files["fb"], "-o", fp)[0] == 0
    assert run(capsys, "validate", fp)[0] == 0
    h = files["dir"] / "h.json"
    d = files["dir"] / "d.json"
    assert run(capsys, "compress", files["zdec"], "--strict", "--n", 2, "--letter", "r=1",
               "--letter", "R=-1", "--letter", "r2=1.1", "--letter", "R2=-1.-1", "-o", h)[0] == 0
    assert run(capsys, "combine", "finite-index", h, "--group", "dihedral-inf", "-o", d)[0] == 0
    assert run(capsys, "validate", d)[0] == 0
    assert run(capsys, "accepts", d, "s.r.s.r")[0] == 0
    assert run(capsys, "accepts", d, "s.r")[0] == 1


def test_negative_letters_after_dashes(capsys, files):
    code, out, _ = run(capsys, "reduce", files["zdec"], "--", "1.1.-1", "-1.1")
    assert out.split() == ["1", "ε"]


def test_threads_do_not_change_output(capsys, files):
    words = ["1." * k + "1" for k in range(0, 200, 7)]
    a = run(capsys, "reduce", files["zdec"], *words)[1]
    b = run(capsys, "reduce", files["zdec"], "--threads", 4, *words)[1]
    assert a == b


def test_gen_is_byte_deterministic(capsys):
    a = run(capsys, "gen", "z-decimal", "--seed", 1)[1]
    b = run(capsys, "gen", "z-decimal", "--seed", 2)[1]
    assert a == b and json.loads(a)["flavor"] == "incremental"


def test_trace_and_convert(capsys, files):
    code, out, _ = run(capsys, "trace", files["free"], "a.b.B.A")
    assert code == 0 and out.splitlines()[-1] == "ε"
    n = files["dir"] / "n.json"
    assert run(capsys, "convert", "to-non-incremental", files["zdec"], "-o", n)[0] == 0
    assert run(capsys, "reduce", n, "--repeat", "1:572")[1].strip().startswith("t.t.1.1.1.1.1.t-")


def test_machine_commands(capsys, files):
    code, out, _ = run(capsys, "machine", "run", "example:two-state-incremental", "a.a", "--json")
    assert code == 0 and json.loads(out)["accepted"]
    m = files["dir"] / "mm.json"
    assert run(capsys, "machine", "mimic", "example:two-state-non-incremental", "-o", m)[0] == 0
    assert run(capsys, "validate", m)[0] == 0
    # the mimic is weakly decreasing, so word-problem commands refuse it
    assert run(capsys, "reduce", m, "a.a")[0] == 1


def test_diagram(capsys, files):
    code, out, _ = run(capsys, "diagram", files["free"], "a.b.B.A", "--svg")
    assert code == 0 and out.startswith("<svg")
    code, out, _ = run(capsys, "diagram", files["free"], "a.b.B.A", "--ascii", "--boundaries", "2")
    assert code == 0 and out.strip()


def test_breaker_small(capsys):
    code, out, _ = run(capsys, "breaker", "--group", "f2xz", "--candidate", "naive", "--n1", 4, "--n2", 6)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "rejected-commutator"
    assert rep["checks"] == {"oracle_trivial": True, "accepted": False}


def test_errors(capsys, files):
    code, out, _ = run(capsys, "reduce", files["dir"] / "missing.json", "a", "--json")
    assert code == 1 and json.loads(out)["error"] == "FileNotFoundError"
    code, _, err = run(capsys, "reduce", files["free"], "zz")
    assert code == 1 and "not in working alphabet" in err
    with pytest.raises(SystemExit) as e:
        main(["reduce"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["gen", "z-decimal", "--threads", "0"])
    assert e.value.code == 2


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "14", "--scale", 0.1)
    assert code == 0 and out.strip() == "PASS 14 machine mimicry"
