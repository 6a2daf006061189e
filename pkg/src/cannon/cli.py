"""Command-line interface: ``python3 -m cannon <command> ...``.

Words are dot-separated letter names (``1.1.-1``, ``[a.b].A``); ``--repeat
a:572`` appends a power.  Usage errors exit 2, domain errors exit 1 (as a JSON
object on stdout with ``--json``).
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

from .rewrite import (INCREMENTAL, NON_INCREMENTAL, RewriteError, accepts, dumps, format_word,
                      free_group_system, load, parse_word, reduce, reduce_traced,
                      surface_octagon_system, validate_system)

EMPTY = "ε"


@dataclass
class RunConfig:
    command: str
    budget_rules: int = 10 ** 6
    budget_ball: int = 10 ** 7
    budget_pairs: int = 10 ** 5
    budget_steps: Optional[int] = None
    json: bool = False
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for k in ("budget_rules", "budget_ball", "budget_pairs", "threads"):
            if getattr(self, k) < 1:
                raise ValueError(f"{k} must be positive")
        if self.budget_steps is not None and self.budget_steps < 1:
            raise ValueError("budget_steps must be positive")


class CliError(Exception):
    pass


def _words(args) -> list:
    """Positional words; ``--repeat`` powers extend the first one."""
    ws = [parse_word(x) for x in args.words] or [()]
    for item in args.repeat or ():
        a, _, k = item.rpartition(":")
        if not a or not k.isdigit():
            raise CliError(f"--repeat expects LETTER:COUNT, got {item!r}")
        ws[0] += (a,) * int(k)
    return ws


def _word(args) -> tuple:
    ws = _words(args)
    if len(ws) > 1:
        raise CliError("expected a single word")
    return ws[0]


def _show(w) -> str:
    return format_word(w) or EMPTY


def _emit_system(s, args, materialize=False):
    text = dumps(s, materialize=materialize)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _report(args, d: dict):
    """Side report: stderr, so stdout stays a clean system document."""
    print(json.dumps(d, sort_keys=True, default=str), file=sys.stderr)


# ---------------------------------------------------------------- commands

def cmd_validate(args, cfg):
    s = load(args.system)
    v = validate_system(s)
    if cfg.json:
        print(json.dumps({"ok": not v, "violations": [str(x) for x in v],
                          "rules": len(s.rules), "families": [f.name for f in s.families],
                          "window": s.window, "flavor": s.flavor}, sort_keys=True))
    else:
        for x in v:
            print(x)
        print("ok" if not v else f"{len(v)} violation(s)")
    return 0 if not v else 1


def _strict(s):
    if not s.strict:
        raise CliError("word-problem commands need a strict (length-reducing) system")
    return s


def cmd_reduce(args, cfg):
    s = _strict(load(args.system))
    words = _words(args)
    with ThreadPoolExecutor(cfg.threads) as ex:
        outs = list(ex.map(lambda w: reduce(s, w, cfg.budget_steps), words))
    if cfg.json:
        print(json.dumps([{"input": format_word(w), "reduced": format_word(r)}
                          for w, r in zip(words, outs)], sort_keys=True))
    else:
        for r in outs:
            print(_show(r))
    return 0


def cmd_trace(args, cfg):
    s = _strict(load(args.system))
    h = reduce_traced(s, _word(args), cfg.budget_steps)
    if cfg.json:
        print(json.dumps({"words": [format_word(w) for w in h.words],
                          "steps": [{"start": st.start, "rule": str(st.rule)} for st in h.steps]},
                         sort_keys=True, ensure_ascii=False))
        return 0
    print(_show(h.words[0]))
    for st, w in zip(h.steps, h.words[1:]):
        print(f"  @{st.start} {st.rule}")
        print(_show(w))
    return 0


def cmd_accepts(args, cfg):
    s = _strict(load(args.system))
    ok = accepts(s, _word(args))
    if cfg.json:
        print(json.dumps({"accepted": ok}))
    else:
        print("accepted" if ok else "rejected")
    return 0 if ok else 1


def cmd_gen(args, cfg):
    from .expanding import heisenberg_system, z_decimal_system
    kind = args.kind
    if kind == "z-decimal":
        s = z_decimal_system(args.mu or 10, args.K or 5, args.N, materialize=not args.implicit,
                             ball_budget=cfg.budget_ball)
    elif kind == "heisenberg":
        M = Fraction(args.M) if args.M else None
        s = heisenberg_system(args.mu or 5, args.K or 10, M, args.N, ball_budget=cfg.budget_ball)
    elif kind == "free-group":
        s = free_group_system(args.gens.split(","), NON_INCREMENTAL if args.non_incremental else INCREMENTAL)
    else:
        s = surface_octagon_system(NON_INCREMENTAL if args.non_incremental else INCREMENTAL)
    rep = {"system": s.name, "flavor": s.flavor, "rules": len(s.rules),
           "families": [f.name for f in s.families], "window": s.window}
    rep.update({k: s.meta[k] for k in ("M", "K", "N", "M_verified") if k in s.meta})
    _report(args, rep)
    _emit_system(s, args)
    return 0


def cmd_combine(args, cfg):
    from .constructions import finite_index_extension, free_product
    if args.kind == "free-product":
        if len(args.systems) != 2:
            raise CliError("free-product takes two systems")
        s = free_product(load(args.systems[0]), load(args.systems[1]))
    else:
        if len(args.systems) != 1:
            raise CliError("finite-index takes one subgroup system")
        preset = FINITE_INDEX.get(args.group)
        if preset is None:
            raise CliError(f"no finite-index preset for group {args.group!r}; have {sorted(FINITE_INDEX)}")
        s = finite_index_extension(load(args.systems[0]), **preset())
    _emit_system(s, args)
    return 0


def _dihedral_preset():
    from .acceptance import DIHEDRAL_H
    from .groups import DihedralOracle
    D = DihedralOracle()
    return dict(oracle=D, transversal=["s"], gens=D.gens, in_subgroup=lambda e: e[0] == 1,
                h_letters=DIHEDRAL_H)


FINITE_INDEX = {"dihedral-inf": _dihedral_preset}


def cmd_compress(args, cfg):
    from .constructions import (GeneratorTranslation, block_letters, change_generators, compress,
                                compress_strict)
    s = load(args.system)
    if args.letter:
        if not args.strict:
            raise CliError("--letter needs --strict")
        words = {}
        for item in args.letter:
            a, eq, w = item.partition("=")
            if not eq:
                raise CliError(f"--letter expects NAME=WORD, got {item!r}")
            words[a] = parse_word(w)
        out = change_generators(s, GeneratorTranslation(words, args.n))
    elif args.strict:
        out = compress_strict(s, args.n)
    else:
        m = s.materialize()
        k = len(block_letters(m.working_alphabet, args.n))
        cand = sum(k ** L for L in range(1, m.window + 1))
        if cand > cfg.budget_rules:
            print(f"warning: {cand} candidate left-hand sides exceed the rule budget {cfg.budget_rules}",
                  file=sys.stderr)
        out = compress(s, args.n, cfg.budget_rules)
    _emit_system(out, args)
    return 0


def cmd_convert(args, cfg):
    from .constructions import to_non_incremental
    _emit_system(to_non_incremental(load(args.system)), args)
    return 0


def _machine(ref):
    from .machines import example_machines, load_machine
    if ref.startswith("example:"):
        ms = example_machines()
        name = ref.split(":", 1)[1]
        if name not in ms:
            raise CliError(f"unknown example machine {name!r}; have {sorted(ms)}")
        return ms[name]
    return load_machine(ref)


def cmd_machine(args, cfg):
    from .machines import mimic, run_machine
    m = _machine(args.machine)
    if args.action == "mimic":
        _emit_system(mimic(m), args)
        return 0
    if args.action == "dump":
        sys.stdout.write(m.dumps())
        return 0
    run = run_machine(m, _word(args))
    ok = run.word == () and run.state == m.start
    if cfg.json:
        print(json.dumps({"accepted": ok, "final_state": run.state, "final_word": format_word(run.word),
                          "configs": [[q, format_word(w), p] for q, w, p in run.configs]}, sort_keys=True))
    else:
        for q, w, p in run.configs:
            print(f"{q} {p} {_show(w)}")
        print("accepted" if ok else "rejected")
    return 0 if ok else 1


def cmd_diagram(args, cfg):
    from .history import build_diagram, render_ascii, render_svg
    s = _strict(load(args.system))
    h = reduce_traced(s, _word(args), cfg.budget_steps)
    bnd = [int(x) for x in args.boundaries.split(",")] if args.boundaries else []
    d = build_diagram(h, bnd, W=s.window)
    out = render_svg(d) if args.svg else render_ascii(d)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(out)
    else:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return 0


def cmd_breaker(args, cfg):
    from .groups import oracle_by_name
    from .history import f2xz_test_sets, find_breaker, naive_f2xz_candidate
    if args.group != "f2xz":
        raise CliError("breaker test sets are defined for --group f2xz")
    s = naive_f2xz_candidate(args.kmax) if args.candidate == "naive" else load(args.candidate)
    T1, T2 = f2xz_test_sets(args.n1, args.n2)
    rep = find_breaker(s, oracle_by_name("f2xz"), T1, T2, budget=cfg.budget_pairs)
    print(rep.to_json())
    return 0 if rep.verdict in ("breaker", "rejected-commutator") else 1


def cmd_selftest(args, cfg):
    from .acceptance import run_all
    only = {int(x) for x in args.only.split(",")} if args.only else None
    res = run_all(cfg.seed, args.scale, only, out=None if cfg.json else print)
    if cfg.json:
        print(json.dumps([asdict(r) for r in res], sort_keys=True, default=str))
    return 0 if all(r.passed for r in res) else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output and errors")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--budget-rules", type=int, default=10 ** 6)
    common.add_argument("--budget-ball", type=int, default=10 ** 7)
    common.add_argument("--budget-pairs", type=int, default=10 ** 5)
    common.add_argument("--budget-steps", type=int, default=None)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")

    def word_args(p):
        p.add_argument("words", nargs="*", metavar="word",
                       help="dot-separated word; put '--' first if it starts with '-'")
        p.add_argument("--repeat", action="append", metavar="LETTER:COUNT",
                       help="append LETTER^COUNT (repeatable)")

    p = argparse.ArgumentParser(prog="cannon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("validate", parents=[common], help="check a system document")
    q.add_argument("system")
    q.set_defaults(fn=cmd_validate)

    q = sub.add_parser("reduce", parents=[common], help="reduce one or more words")
    q.add_argument("system")
    word_args(q)
    q.set_defaults(fn=cmd_reduce)

    for name, fn, hlp in (("trace", cmd_trace, "print the reduction history"),
                          ("accepts", cmd_accepts, "exit 0 iff the word reduces to empty")):
        q = sub.add_parser(name, parents=[common], help=hlp)
        q.add_argument("system")
        word_args(q)
        q.set_defaults(fn=fn)

    q = sub.add_parser("gen", parents=[common], help="generate a system")
    q.add_argument("kind", choices=["z-decimal", "heisenberg", "free-group", "surface-octagon"])
    q.add_argument("--mu", type=int)
    q.add_argument("--K", type=int)
    q.add_argument("--N", type=int)
    q.add_argument("--M", help="expansion constant as a fraction, e.g. 19/5")
    q.add_argument("--gens", default="a,b")
    q.add_argument("--implicit", action="store_true", help="keep the rule family implicit")
    q.add_argument("--non-incremental", action="store_true")
    q.set_defaults(fn=cmd_gen)

    q = sub.add_parser("combine", parents=[common], help="free product or finite-index extension")
    q.add_argument("kind", choices=["free-product", "finite-index"])
    q.add_argument("systems", nargs="+")
    q.add_argument("--group", default="dihedral-inf")
    q.set_defaults(fn=cmd_combine)

    q = sub.add_parser("compress", parents=[common], help="block compression")
    q.add_argument("system")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--strict", action="store_true")
    q.add_argument("--letter", action="append", metavar="NAME=WORD",
                   help="new generator (with --strict): change generators")
    q.set_defaults(fn=cmd_compress)

    q = sub.add_parser("convert", parents=[common], help="flavor conversion")
    q.add_argument("kind", choices=["to-non-incremental"])
    q.add_argument("system")
    q.set_defaults(fn=cmd_convert)

    q = sub.add_parser("machine", parents=[common], help="Dehn machines")
    q.add_argument("action", choices=["run", "mimic", "dump"])
    q.add_argument("machine", help="machine JSON or example:NAME")
    word_args(q)
    q.set_defaults(fn=cmd_machine)

    q = sub.add_parser("diagram", parents=[common], help="render a history diagram")
    q.add_argument("system")
    word_args(q)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--ascii", action="store_true")
    g.add_argument("--svg", action="store_true")
    q.add_argument("--boundaries", help="comma-separated subword boundaries in the input")
    q.set_defaults(fn=cmd_diagram)

    q = sub.add_parser("breaker", parents=[common], help="commutator breaker search")
    q.add_argument("--group", default="f2xz")
    q.add_argument("--candidate", default="naive", help="system JSON or 'naive'")
    q.add_argument("--kmax", type=int, default=4, help="z power bound for the naive candidate")
    q.add_argument("--n1", type=int, default=6)
    q.add_argument("--n2", type=int, default=12)
    q.set_defaults(fn=cmd_breaker)

    q = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    q.add_argument("--scale", type=float, default=1.0, help="trial count multiplier")
    q.add_argument("--only", help="comma-separated criterion numbers")
    q.set_defaults(fn=cmd_selftest)
    return p


def _domain_errors():
    from .expanding import NormalFormError, ParamsError
    from .groups import OracleError
    return (RewriteError, OracleError, ParamsError, NormalFormError, CliError,
            OSError, ValueError, KeyError, json.JSONDecodeError)


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # everything after "--" is a word, even if it starts with "-"
    tail = []
    if "--" in argv:
        i = argv.index("--")
        argv, tail = argv[:i], argv[i + 1:]
    args, extra = parser.parse_known_args(argv)
    # words may also follow options, which argparse leaves unparsed
    bad = [x for x in extra if x.startswith("-")]
    if bad:
        parser.error(f"unrecognized arguments: {' '.join(bad)}")
    if extra or tail:
        if not hasattr(args, "words"):
            parser.error(f"{args.command} takes no words")
        args.words = list(args.words) + extra + tail
    try:
        cfg = RunConfig(args.command, json=args.json, seed=args.seed, threads=args.threads,
                        budget_rules=args.budget_rules, budget_ball=args.budget_ball,
                        budget_pairs=args.budget_pairs, budget_steps=args.budget_steps)
    except ValueError as e:
        parser.error(str(e))
    try:
        return args.fn(args, cfg)
    except _domain_errors() as e:
        msg = str(e) if not isinstance(e, KeyError) else f"missing key {e}"
        if cfg.json:
            print(json.dumps({"error": type(e).__name__, "message": msg}))
        else:
            print(f"cannon: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
