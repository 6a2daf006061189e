"""Acceptance checks, shared by the test suite and ``cannon selftest``.

Each ``criterion_N(seed, scale)`` returns a :class:`Result`.  ``scale``
multiplies the trial counts (1.0 is the full run); the verdict logic does not
depend on it.
"""
from __future__ import annotations

import random
import time
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product

from .constructions import (GeneratorTranslation, change_generators, compress, compress_strict,
                            finite_index_extension, free_product, letter_name, rename_letters,
                            to_non_incremental, write_out)
from .expanding import balanced_value, heisenberg_system, z_decimal_system, z_spec
from .groups import DihedralOracle, FreeGroupOracle, HeisenbergOracle, IntegerOracle, f2xz_oracle
from .history import (LEFT, RIGHT, build_diagram, check_width_lemmas, class_count_bound,
                      extract_splitting_path, f2xz_test_sets, find_breaker, generation_bound_holds,
                      naive_f2xz_candidate, splice, validate_path)
from .machines import erase_colors, example_machines, mimic, run_machine
from .rewrite import (INCREMENTAL, RewritingSystem, Rule, accepts, free_group_system, reduce,
                      reduce_traced, rule)


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.number:2d} {self.name}"


def _n(k: int, scale: float) -> int:
    return max(1, int(round(k * scale)))


# ---------------------------------------------------------------- fixed systems

def toy_system() -> RewritingSystem:
    """Small incremental system over {a, b} with overlapping left-hand sides."""
    return RewritingSystem(INCREMENTAL, ("a", "b"), ("a", "b"),
                           (rule("a.a.b", "b"), rule("b.b.a", "a"), rule("a.b.a", ""),
                            rule("b.a.b.b", "a.b")), name="toy")


def zz_system() -> RewritingSystem:
    """Z * Z from two decimal systems, letters a, A and b, B; the second
    factor carries anchored rule-5 rules."""
    za = rename_letters(z_decimal_system(), {"1": "a", "-1": "A", "t": "s", "t-": "s-"})
    zb = rename_letters(z_decimal_system(N=2), {"1": "b", "-1": "B", "t": "u", "t-": "u-"})
    return free_product(za, zb)


DIHEDRAL_H = {"r": (1, 1), "R": (1, -1), "r2": (1, 2), "R2": (1, -2)}


def dihedral_system() -> RewritingSystem:
    """D_inf = <r, s> from the decimal system for Z = <r> (index 2)."""
    Z = z_decimal_system()
    H = change_generators(Z, GeneratorTranslation(
        {"r": ("1",), "R": ("-1",), "r2": ("1", "1"), "R2": ("-1", "-1")}))
    D = DihedralOracle()
    return finite_index_extension(H, D, ["s"], D.gens, lambda e: e[0] == 1, DIHEDRAL_H)


def _cancel_word(rng, gens, inv, n):
    """Random word of length <= n that is trivial in the free group on gens."""
    w = []
    while len(w) + 2 <= n and rng.random() < 0.9:
        a = rng.choice(gens)
        i = rng.randint(0, len(w))
        w[i:i] = [a, inv[a]]
    return tuple(w)


def _random_word(rng, gens, n):
    return tuple(rng.choice(gens) for _ in range(rng.randint(0, n)))


def _heis_trivial(rng, H, n):
    """Trivial word in U3: relators xX, yY and [[x,y],x], [[x,y],y] inserted at random."""
    c = ("x", "y", "X", "Y")
    rels = [("x", "X"), ("X", "x"), ("y", "Y"), ("Y", "y"),
            c + ("x",) + H.inverse_word(c) + ("X",), c + ("y",) + H.inverse_word(c) + ("Y",)]
    w = []
    while True:
        r = rng.choice(rels)
        if len(w) + len(r) > n:
            break
        i = rng.randint(0, len(w))
        w[i:i] = r
    if rng.random() < 0.5 and w:
        # conjugate by a prefix kept within the length bound
        k = rng.randint(0, (n - len(w)) // 2)
        g = _random_word(rng, H.gens, k)
        w = list(g) + w + list(H.inverse_word(g))
    return tuple(w)


# ---------------------------------------------------------------- criteria

# target as written in the acceptance list; it evaluates to 172, not 572
DECIMAL_572_LITERAL = ("t", "t", "1", "t-") + ("1",) * 7 + ("t-", "1", "1")
DECIMAL_572_VALUE = ("t", "t") + ("1",) * 5 + ("t-",) + ("1",) * 7 + ("t-", "1", "1")


def criterion_1(seed=0, scale=1.0):
    Z = z_decimal_system()
    t = time.perf_counter()
    out = reduce(Z, ("1",) * 572)
    dt = time.perf_counter() - t
    ev = lambda w: balanced_value(z_spec(10), w)
    return Result(1, "decimal 572", out == DECIMAL_572_LITERAL and dt < 1.0,
                  {"output": ".".join(out), "expected": ".".join(DECIMAL_572_LITERAL),
                   "output_value": ev(out), "expected_value": ev(DECIMAL_572_LITERAL),
                   "seconds": round(dt, 4)})


def criterion_2(seed=0, scale=1.0):
    Z = z_decimal_system()
    w = ("1",) * 1000000 + ("-1",) * 999999
    want = ("t",) * 6 + ("1",) + ("t-",) + (("-1",) * 9 + ("t-",)) * 5 + ("-1",) * 9
    t = time.perf_counter()
    out = reduce(Z, w)
    dt = time.perf_counter() - t
    return Result(2, "count up / count down", out == want and dt < 60,
                  {"output": ".".join(out), "seconds": round(dt, 2)})


def criterion_3(seed=0, scale=1.0):
    S = heisenberg_system()
    spec = S.families[0].spec
    H = HeisenbergOracle()
    rng = random.Random(seed)
    bad, trivial, unsound = 0, 0, 0
    t = time.perf_counter()
    n = _n(10000, scale)
    for i in range(n):
        w = _heis_trivial(rng, H, 30) if i % 3 == 0 else _random_word(rng, H.gens, 30)
        r = reduce(S, w)
        triv = H.is_identity(w)
        trivial += triv
        bad += (r == ()) != triv
        unsound += balanced_value(spec, r) != H.evaluate(w)
    dt = time.perf_counter() - t
    return Result(3, "Heisenberg agreement", bad == 0 and unsound == 0 and dt < 300,
                  {"words": n, "trivial": trivial, "disagreements": bad,
                   "value_mismatches": unsound, "seconds": round(dt, 1)})


def criterion_4(seed=0, scale=1.0):
    F = free_group_system(["a", "b"])
    systems = [(F, 12), (toy_system(), 12), (z_decimal_system(), 60),
               (heisenberg_system(), 20), (dihedral_system(), 20)]
    rng = random.Random(seed)
    bad = 0
    n = _n(10000, scale)
    for i in range(n):
        S, L = systems[i % len(systems)]
        u, v = _random_word(rng, S.input_alphabet, L), _random_word(rng, S.input_alphabet, L)
        bad += reduce(S, u + v) != reduce(S, reduce(S, u) + v)
    return Result(4, "incremental property", bad == 0, {"triples": n, "violations": bad})


def criterion_5(seed=0, scale=1.0):
    rng = random.Random(seed)
    Z, H = z_decimal_system(), heisenberg_system()
    oz, oh = IntegerOracle(), HeisenbergOracle()
    bad = equal_red = 0
    n = _n(10000, scale)
    for i in range(n):
        if i % 2:
            S, o = Z, oz
            x = _random_word(rng, o.gens, 40)
            y = x + _cancel_word(rng, o.gens, o.inv, 20) if rng.random() < 0.5 else _random_word(rng, o.gens, 40)
        else:
            S, o = H, oh
            x = _random_word(rng, o.gens, 15)
            y = x + _heis_trivial(rng, o, 15) if rng.random() < 0.5 else _random_word(rng, o.gens, 15)
        if reduce(S, x) == reduce(S, y):
            equal_red += 1
            bad += not o.equal(x, y)
    return Result(5, "remembers the element", bad == 0 and equal_red > 0,
                  {"pairs": n, "equal_reductions": equal_red, "violations": bad})


def _random_small_system(rng):
    rules = {}
    for _ in range(rng.randint(1, 6)):
        L = rng.randint(1, 4)
        lhs = tuple(rng.choice("abc") for _ in range(L))
        rhs = tuple(rng.choice("abc") for _ in range(rng.randint(0, L - 1)))
        st = rng.random() < 0.3
        rules[(lhs, st)] = Rule(lhs, rhs, anchor_start=st)
    return RewritingSystem(INCREMENTAL, tuple("abc"), tuple("abc"), tuple(rules.values()), name="random")


def criterion_6(seed=0, scale=1.0):
    rng = random.Random(seed)
    systems = [(free_group_system(["a", "b"]), 30), (toy_system(), 30),
               (z_decimal_system(N=2), 80), (zz_system(), 40)]
    n = _n(10000, scale)
    bad, runs = 0, 0
    for S, L in systems:
        N = to_non_incremental(S)
        for _ in range(n):
            w = _random_word(rng, S.input_alphabet, L)
            h1, h2 = reduce_traced(S, w), reduce_traced(N, w)
            runs += 1
            bad += h1.words != h2.words or [s.start for s in h1.steps] != [s.start for s in h2.steps]
    # random systems with anchored rules, 50 words each
    for _ in range(_n(200, scale)):
        S = _random_small_system(rng)
        N = to_non_incremental(S)
        for _ in range(50):
            w = _random_word(rng, "abc", 15)
            h1, h2 = reduce_traced(S, w), reduce_traced(N, w)
            runs += 1
            bad += h1.words != h2.words or [s.start for s in h1.steps] != [s.start for s in h2.steps]
    return Result(6, "non-incremental conversion", bad == 0, {"runs": runs, "differences": bad})


def _syllables(w, factor_of):
    out = []
    for a in w:
        if out and factor_of[out[-1][-1]] == factor_of[a]:
            out[-1].append(a)
        else:
            out.append([a])
    return [tuple(s) for s in out]


def criterion_7(seed=0, scale=1.0):
    rng = random.Random(seed)
    P = zz_system()
    O = FreeGroupOracle(("a", "b"))
    n = _n(10000, scale)
    bad = 0
    for i in range(n):
        if i % 4 == 1:
            w = _random_word(rng, O.gens, 20)
            w = w + O.inverse_word(w)
        elif i % 4 == 3:
            w = _cancel_word(rng, O.gens, O.inv, 40)
        else:
            w = _random_word(rng, O.gens, 40)
        bad += accepts(P, w) != O.is_identity(w)
    # syllables: reduced output is a free-product normal form
    factor_of = {a: (0 if a in ("a", "A", "s", "s-") else 1) for a in P.working_alphabet}
    side = [rename_letters(z_decimal_system(), {"1": "a", "-1": "A", "t": "s", "t-": "s-"}),
            rename_letters(z_decimal_system(N=2), {"1": "b", "-1": "B", "t": "u", "t-": "u-"})]
    syl_bad = 0
    m = _n(1000, scale)
    for _ in range(m):
        w = []
        for k in range(rng.randint(1, 8)):
            f = ("a", "A") if k % 2 == 0 else ("b", "B")
            w += [rng.choice(f)] * rng.randint(1, 15)
        r = reduce(P, w)
        val = O.evaluate(write_out_zz(r))
        ok = val == O.evaluate(w)
        for s in _syllables(r, factor_of):
            S = side[factor_of[s[0]]]
            ok &= reduce(S, s) == s and s != ()
        syl_bad += not ok
    return Result(7, "free product", bad == 0 and syl_bad == 0,
                  {"words": n, "disagreements": bad, "alternating": m, "syllable_violations": syl_bad})


def write_out_zz(w):
    """Evaluate the place-value letters of the Z * Z system back to a, A, b, B."""
    spec = z_spec(10)
    out, run, fac = [], [], None
    back = {"a": "1", "A": "-1", "s": "t", "s-": "t-", "b": "1", "B": "-1", "u": "t", "u-": "t-"}
    for a in tuple(w) + (None,):
        f = None if a is None else (0 if a in ("a", "A", "s", "s-") else 1)
        if f != fac and run:
            k = balanced_value(spec, tuple(back[x] for x in run))
            g = ("a", "A") if fac == 0 else ("b", "B")
            out += [g[0]] * k if k >= 0 else [g[1]] * -k
            run = []
        fac = f
        if a is not None:
            run.append(a)
    return tuple(out)


def criterion_8(seed=0, scale=1.0):
    rng = random.Random(seed)
    G = dihedral_system()
    D = DihedralOracle()
    n = _n(10000, scale)
    bad = acc = 0
    for i in range(n):
        w = _random_word(rng, D.gens, 40)
        if i % 2:
            w = w[:20] + D.inverse_word(w[:20])
        a = accepts(G, w)
        acc += a
        bad += a != D.is_identity(w)
    return Result(8, "finite index (D_inf)", bad == 0, {"words": n, "accepted": acc, "disagreements": bad})


def _chunked(rng, x, n):
    out, i = [], 0
    while i < len(x):
        k = rng.randint(1, n)
        out.append(letter_name(x[i:i + k]))
        i += k
    return tuple(out)


def _walk(rng, L):
    x, s = [], 0
    for _ in range(L):
        up = 0.5 - 0.01 * s
        a = "1" if rng.random() < up else "-1"
        x.append(a)
        s += 1 if a == "1" else -1
    return x


def criterion_9(seed=0, scale=1.0):
    rng = random.Random(seed)
    F = free_group_system(["a", "b"])
    inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
    toy = toy_system()

    def fword():
        x = [rng.choice("abAB") for _ in range(rng.randint(0, 20))]
        return x + [inv[c] for c in reversed(x)] if rng.random() < 0.5 else x

    def tword():
        return [rng.choice("ab") for _ in range(rng.randint(0, 30))]

    def zword():
        return _walk(rng, rng.randint(0, 300))

    m = _n(1000, scale)
    basic_bad = strict_bad = 0
    for base, gen in ((F, fword), (toy, tword), (to_non_incremental(F), fword)):
        for n in (2, 3):
            C = compress(base, n)
            for _ in range(m):
                w = _chunked(rng, gen(), n)
                basic_bad += write_out(reduce(C, w)) != reduce(base, write_out(w))
    Z = z_decimal_system()
    for base, gen in ((F, fword), (toy, tword), (Z, zword)):
        for n in (2, 3):
            C = compress_strict(base, n)
            for _ in range(m):
                w = _chunked(rng, gen(), n)
                hist = reduce_traced(base, write_out(w))
                wo = write_out(reduce(C, w))
                strict_bad += wo not in hist.words or (wo == ()) != (hist.final == ())
    return Result(9, "compression", basic_bad == 0 and strict_bad == 0,
                  {"words_per_case": m, "basic_violations": basic_bad, "strict_violations": strict_bad})


def _diagram_trials(seed, scale):
    """Shared sampling for criteria 10 and 11."""
    rng = random.Random(seed)
    F, toy, Z = free_group_system(["a", "b"]), toy_system(), z_decimal_system()
    st = dict(diagrams=0, width_violations=0, generation_violations=0, anomalies=0,
              paths=0, invalid_paths=0, long_paths=0, endpoint_touches=0, max_generation=0, class_violations=0)
    classes = defaultdict(set)
    for i in range(_n(10000, scale)):
        S = (F, toy, Z)[i % 3]
        if S is Z:
            w = tuple(rng.choice(("1", "-1", "1")) for _ in range(rng.randint(0, 60)))
        else:
            w = _random_word(rng, S.input_alphabet, 40)
        bnd = sorted(rng.randint(0, len(w)) for _ in range(rng.randint(0, 3)))
        d = build_diagram(reduce_traced(S, w), bnd, W=S.window)
        st["diagrams"] += 1
        st["width_violations"] += len(check_width_lemmas(d).violations)
        st["generation_violations"] += not generation_bound_holds(d)
        st["anomalies"] += len(d.anomalies)
        bottom = [j for j, c in enumerate(d.letters(len(d.rows) - 1)) if not c.border]
        for j in rng.sample(bottom, min(2, len(bottom))):
            pd = extract_splitting_path(d, j, rng.choice((LEFT, RIGHT)))
            st["paths"] += 1
            st["invalid_paths"] += bool(validate_path(d, pd.path))
            st["long_paths"] += pd.length > 2 * pd.generation + 2
            st["endpoint_touches"] += pd.endpoint_touches > 0
            st["max_generation"] = max(st["max_generation"], pd.generation)
            classes[(S.name, S.window, len(S.working_alphabet), pd.length)].add(pd.details)
    by_len = defaultdict(int)
    for (name, W, A, L), c in sorted(classes.items()):
        by_len[(name, W, A, L)] = len(c)
    for (name, W, A, L) in by_len:
        total = sum(v for (n2, _, _, L2), v in by_len.items() if n2 == name and L2 <= L)
        st["class_violations"] += total > class_count_bound(A, W, L)
    st["classes"] = sum(by_len.values())
    return st


_CACHE = {}


def _diagrams(seed, scale):
    key = (seed, scale)
    if key not in _CACHE:
        _CACHE.clear()
        _CACHE[key] = _diagram_trials(seed, scale)
    return _CACHE[key]


def criterion_10(seed=0, scale=1.0):
    st = _diagrams(seed, scale)
    ok = st["width_violations"] == 0 and st["generation_violations"] == 0
    return Result(10, "width and generation", ok, dict(st))


def criterion_11(seed=0, scale=1.0):
    st = _diagrams(seed, scale)
    ok = st["paths"] > 0 and st["long_paths"] == 0 and st["invalid_paths"] == 0 and st["class_violations"] == 0
    return Result(11, "splitting path bound", ok, dict(st))


def criterion_12(seed=0, scale=1.0):
    rng = random.Random(seed)
    S = toy_system()
    buckets = defaultdict(list)
    for _ in range(3000):
        w = _random_word(rng, S.input_alphabet, 24)
        if len(w) < 4:
            continue
        d = build_diagram(reduce_traced(S, w), W=S.window)
        for j, c in enumerate(d.letters(len(d.rows) - 1)):
            if not c.border:
                pd = extract_splitting_path(d, j, LEFT)
                buckets[pd.details].append((w, d, pd.path))
                break
    pairs = ok = 0
    want = max(50, _n(400, scale))
    for items in buckets.values():
        for (w1, d1, p1), (w2, d2, p2) in product(items[:6], items[:6]):
            if w1 == w2 or pairs >= want:
                continue
            pairs += 1
            ok += splice(d1, p1, d2, p2).verify(S)
    return Result(12, "splicing", pairs >= 50 and ok == pairs,
                  {"pairs": pairs, "verified": ok, "classes": len(buckets)})


def criterion_13(seed=0, scale=1.0):
    S = naive_f2xz_candidate(4)
    O = f2xz_oracle()
    T1, T2 = f2xz_test_sets(6, 12)
    t = time.perf_counter()
    rep = find_breaker(S, O, T1, T2, budget=10 ** 5)
    dt = time.perf_counter() - t
    w = rep.witness
    if rep.verdict == "breaker":
        ok = accepts(S, w) and not O.is_identity(w)
    elif rep.verdict == "rejected-commutator":
        ok = O.is_identity(w) and not accepts(S, w)
    else:
        ok = False
    return Result(13, "breaker search", ok and dt < 600,
                  {"verdict": rep.verdict, "witness": ".".join(w) if w else None,
                   "pairs": rep.pairs, "collisions": rep.collisions,
                   "splices_verified": rep.splices_verified, "seconds": round(dt, 1)})


def criterion_14(seed=0, scale=1.0):
    bad = total = acc = 0
    for m in example_machines().values():
        M = mimic(m)
        for L in range(9):
            for w in product(m.alphabet, repeat=L):
                run = run_machine(m, w, record=False)
                a = run.word == () and run.state == m.start
                out = reduce(M, w)
                total += 1
                acc += a
                bad += (out == ()) != a or erase_colors(out) != run.word
    return Result(14, "machine mimicry", bad == 0, {"words": total, "accepted": acc, "disagreements": bad})


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 15)}


def run_all(seed=0, scale=1.0, only=None, out=print):
    results = []
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        t = time.perf_counter()
        r = fn(seed, scale)
        r.seconds = round(time.perf_counter() - t, 2)
        results.append(r)
        if out:
            out(r.line())
    return results
