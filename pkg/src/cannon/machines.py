"""Finite-state Dehn machines, their executor, and rewriting mimics.

Semantics fixed here (the definition leaves window alignment open):

* non-incremental: the position ``p`` is the start of the window
  ``w[p:p+W]``; a lhs must start at ``p``.
* incremental: the window ends at the current letter, ``w[p-W+1:p+1]``; a
  lhs must end at ``p``.

Windows shorter than W are padded with ``END`` (resp. ``START``) before the
transition lookup.  In state ``q`` the machine takes the longest lhs of
``S_q`` at the position, switches to ``transition(q, window)``, and either
substitutes and moves to ``max(0, p - W)`` or steps one letter right.  It
stops when it runs off the end of the word.

>>> m = DehnMachine.single_state(free_group_rules(("a",)))
>>> run_machine(m, ("a", "a", "A", "A")).word
()
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

from .rewrite import (INCREMENTAL, NON_INCREMENTAL, Rule, RewriteError, RewritingSystem, reduce,
                      validate_system, inverse_name)

END = "$"
START = "^"
WHITE = "white"
BLANK = "_"


class MachineError(RewriteError):
    pass


def free_group_rules(gens: Sequence[str]) -> list:
    out = []
    for g in gens:
        G = inverse_name(g)
        out += [Rule((g, G), ()), Rule((G, g), ())]
    return out


@dataclass(frozen=True, eq=False)
class DehnMachine:
    states: tuple
    start: str
    rules: dict  # state -> tuple of Rule (unanchored, strict)
    transitions: dict = field(default_factory=dict)  # (state, window tuple) -> state
    defaults: dict = field(default_factory=dict)  # state -> state; missing means stay
    flavor: str = NON_INCREMENTAL
    alphabet: tuple = ()
    input_alphabet: tuple = ()

    def __post_init__(self):
        if self.start not in self.states:
            raise MachineError(f"start state {self.start!r} not among states")
        letters = set()
        for q in self.states:
            for r in self.rules.get(q, ()):
                if len(r.rhs) >= len(r.lhs) or not r.lhs:
                    raise MachineError(f"rule {r} in state {q!r} is not length decreasing")
                if r.anchored:
                    raise MachineError("machine rules are unanchored")
                letters |= set(r.lhs) | set(r.rhs)
        if not self.alphabet:
            object.__setattr__(self, "alphabet", tuple(sorted(letters)))
        elif not letters <= set(self.alphabet):
            raise MachineError(f"rule letters {sorted(letters - set(self.alphabet))} outside the alphabet")
        if not self.input_alphabet:
            object.__setattr__(self, "input_alphabet", self.alphabet)
        for (q, win), q2 in self.transitions.items():
            if q not in self.states or q2 not in self.states:
                raise MachineError(f"transition {q!r} -> {q2!r} uses an unknown state")
        for q in self.states:
            if q == WHITE or "|" in q or not q:
                raise MachineError(f"invalid state name {q!r}")
        object.__setattr__(self, "_lhs", {q: {r.lhs: r for r in self.rules.get(q, ())} for q in self.states})

    @classmethod
    def single_state(cls, rules, flavor=NON_INCREMENTAL, alphabet=()):
        return cls(("q0",), "q0", {"q0": tuple(rules)}, flavor=flavor, alphabet=tuple(alphabet))

    @property
    def window(self) -> int:
        return max((len(r.lhs) for rs in self.rules.values() for r in rs), default=1)

    def next_state(self, q, window: tuple) -> str:
        got = self.transitions.get((q, window))
        if got is not None:
            return got
        return self.defaults.get(q, q)

    def window_at(self, w, p) -> tuple:
        W = self.window
        if self.flavor == NON_INCREMENTAL:
            win = tuple(w[p:p + W])
            return win + (END,) if len(win) < W else win
        lo = p - W + 1
        win = tuple(w[max(lo, 0):p + 1])
        return ((START,) + win) if lo < 0 else win

    def match_at(self, q, w, p) -> Optional[Rule]:
        """Longest lhs of S_q starting (non-incremental) or ending
        (incremental) at position p."""
        table = self._lhs[q]
        for k in range(min(self.window, len(w)), 0, -1):
            if self.flavor == NON_INCREMENTAL:
                if p + k <= len(w):
                    r = table.get(tuple(w[p:p + k]))
                    if r:
                        return r
            elif p - k + 1 >= 0 and p < len(w):
                r = table.get(tuple(w[p - k + 1:p + 1]))
                if r:
                    return r
        return None

    # ---------------------------------------------------------------- files

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "states": list(self.states),
            "start": self.start,
            "alphabet": list(self.alphabet),
            "input_alphabet": list(self.input_alphabet),
            "rules": {q: [r.to_dict() for r in self.rules.get(q, ())] for q in self.states},
            "transitions": [[q, ".".join(win), q2] for (q, win), q2 in sorted(self.transitions.items())],
            "defaults": dict(sorted(self.defaults.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DehnMachine":
        try:
            trans = {(q, tuple(win.split(".")) if win else ()): q2 for q, win, q2 in d.get("transitions", [])}
            return cls(tuple(d["states"]), d["start"],
                       {q: tuple(Rule.from_dict(r) for r in rs) for q, rs in d["rules"].items()},
                       trans, dict(d.get("defaults", {})), d.get("flavor", NON_INCREMENTAL),
                       tuple(d.get("alphabet", ())), tuple(d.get("input_alphabet", ())))
        except (KeyError, TypeError, ValueError) as e:
            raise MachineError(f"malformed machine file: {e}") from e

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False)


def load_machine(path) -> DehnMachine:
    with open(path, encoding="utf-8") as f:
        return DehnMachine.from_dict(json.load(f))


@dataclass
class MachineRun:
    configs: list  # (state, word, position)

    @property
    def word(self):
        return self.configs[-1][1]

    @property
    def state(self):
        return self.configs[-1][0]

    @property
    def substitutions(self) -> int:
        return sum(1 for a, b in zip(self.configs, self.configs[1:]) if len(b[1]) < len(a[1]))


def run_machine(m: DehnMachine, w: Sequence[str], record: bool = True) -> MachineRun:
    w = tuple(w)
    for a in w:
        if a not in m.alphabet:
            raise MachineError(f"letter {a!r} not in the machine alphabet")
    q, p, W = m.start, 0, m.window
    configs = [(q, w, p)]
    while p < len(w):
        r = m.match_at(q, w, p)
        q2 = m.next_state(q, m.window_at(w, p))
        if r is not None:
            s = p if m.flavor == NON_INCREMENTAL else p - len(r.lhs) + 1
            w = w[:s] + r.rhs + w[s + len(r.lhs):]
            p = max(0, p - W)
        else:
            p += 1
        q = q2
        if record:
            configs.append((q, w, p))
    if not record:
        configs.append((q, w, p))
    return MachineRun(configs)


def machine_accepts(m: DehnMachine, w: Sequence[str]) -> bool:
    run = run_machine(m, w, record=False)
    return run.word == () and run.state == m.start


# ---------------------------------------------------------------- mimic

def white(a: str) -> str:
    return f"[{a}|{WHITE}]"


def colored(a: str, q: str, start: str) -> str:
    return a if q == start else f"[{a}|{q}]"


def blank(q: str) -> str:
    return f"[{BLANK}|{q}]"


def erase_colors(w: Sequence[str]) -> tuple:
    out = []
    for a in w:
        if a.startswith("[") and "|" in a and a.endswith("]"):
            base = a[1:a.rindex("|")]
            if base != BLANK:
                out.append(base)
        else:
            out.append(a)
    return tuple(out)


def mimic(m: DehnMachine) -> RewritingSystem:
    """Weakly decreasing rewriting system that carries the machine state on a
    coloured letter.

    Letters before the current position are white, the letter at the
    position carries the state colour (the start colour is the plain, indigo
    letter), the rest are plain.  A rule either performs the machine's
    substitution and recolours the letter W places back, or whitens the
    current letter and colours the next one.  When a substitution removes
    every letter that could carry a non-start colour, a coloured blank
    holds the state until it can pass it on.
    """
    A, W, q0 = m.alphabet, m.window, m.start
    others = [q for q in m.states if q != q0]
    rules = []
    for q in m.states:
        if m.flavor == NON_INCREMENTAL:
            rules += _mimic_non_incremental(m, q)
        else:
            rules += _mimic_incremental(m, q)
    for q in others:
        for y in A:
            rules.append(Rule((blank(q), y), (colored(y, q, q0),)))
    work = list(A) + [white(a) for a in A] + [colored(a, q, q0) for q in others for a in A] + [blank(q) for q in others]
    return RewritingSystem(m.flavor, tuple(m.input_alphabet), tuple(dict.fromkeys(work)), tuple(rules),
                           strict=False, potential="colored", name="mimic",
                           meta={"states": list(m.states), "start": q0})


def _recolor(before: tuple, rest: tuple, q2: str, q0: str, more_after: bool):
    """Rewrite ``before + rest`` (plain letters) with the new position at index 0."""
    word = before + rest
    if word:
        return (colored(word[0], q2, q0),) + word[1:]
    if q2 == q0:
        return ()
    return (blank(q2),)


def _mimic_non_incremental(m, q):
    A, W, q0 = m.alphabet, m.window, m.start
    out = []
    for L in range(1, W + 1):
        for win in product(A, repeat=L):
            at_end = L < W
            window = win + ((END,) if at_end else ())
            q2 = m.next_state(q, window)
            r = m.match_at(q, win, 0)
            cur = (colored(win[0], q, q0),) + win[1:]
            if r is None:
                if len(win) == 1:
                    continue  # at the end the machine stops
                rhs = (white(win[0]), colored(win[1], q2, q0)) + win[2:]
                out.append(Rule(cur, rhs, anchor_end=at_end))
                continue
            rest = r.rhs + win[len(r.lhs):]
            for k in range(0, W + 1):
                for before in product(A, repeat=k):
                    lhs = tuple(white(b) for b in before) + cur
                    if k == W:
                        rhs = (colored(before[0], q2, q0),) + before[1:] + rest
                    else:
                        rhs = _recolor(before, rest, q2, q0, not at_end)
                    out.append(Rule(lhs, rhs, anchor_start=k < W, anchor_end=at_end))
    return out


def _mimic_incremental(m, q):
    A, W, q0 = m.alphabet, m.window, m.start
    out = []
    for k in range(0, W + 1):
        for before in product(A, repeat=k):
            for x in A:
                whites = tuple(white(b) for b in before)
                cur = colored(x, q, q0)
                window_letters = before[max(0, k - W + 1):] + (x,)
                window = ((START,) + window_letters) if k < W - 1 else window_letters
                q2 = m.next_state(q, window)
                r = m.match_at(q, before + (x,), k)
                if r is not None:
                    s = k + 1 - len(r.lhs)
                    if k == W:
                        rhs = (colored(before[0], q2, q0),) + before[1:s] + r.rhs
                    else:
                        rhs = _recolor(before[:s], r.rhs, q2, q0, True)
                    out.append(Rule(whites + (cur,), rhs, anchor_start=k < W))
                elif k <= W - 1:
                    for y in A:
                        rhs = whites + (white(x), colored(y, q2, q0))
                        out.append(Rule(whites + (cur, y), rhs, anchor_start=k < W - 1))
    return out


def mimic_accepts(sys: RewritingSystem, w: Sequence[str]) -> bool:
    return reduce(sys, w) == ()


# ---------------------------------------------------------------- pipelines

@dataclass
class Pipeline:
    stages: list

    def __call__(self, w: Sequence[str]) -> tuple:
        for s in self.stages:
            w = _apply(s, w)
        return tuple(w)

    def accepts(self, w) -> bool:
        return self(w) == ()


def _apply(stage, w):
    if isinstance(stage, RewritingSystem):
        return reduce(stage, w)
    if isinstance(stage, DehnMachine):
        return run_machine(stage, w, record=False).word
    return stage(w)


def _alphabet(stage):
    if isinstance(stage, RewritingSystem):
        return set(stage.working_alphabet)
    if isinstance(stage, DehnMachine):
        return set(stage.alphabet)
    return None


def pipeline(stages: Sequence) -> Pipeline:
    """Sequential composition P_k o ... o P_1 of systems, machines or callables."""
    stages = list(stages)
    if not stages:
        raise MachineError("empty pipeline")
    for a, b in zip(stages, stages[1:]):
        out, inp = _alphabet(a), _alphabet(b)
        if out is not None and inp is not None and not out <= inp:
            raise MachineError(f"alphabet mismatch: {sorted(out - inp)[:5]} not accepted by the next stage")
    return Pipeline(stages)


def example_machines() -> dict:
    """Two fixed two-state machines over {a, b}, one of each flavor.

    State q0 cancels ``aa`` and rewrites ``bab``; state q1 cancels ``bb`` and
    rewrites ``ab``.  State changes are keyed on small windows, including the
    word ends.
    """
    R0 = (Rule(("a", "a"), ()), Rule(("b", "a", "b"), ("a",)))
    R1 = (Rule(("b", "b"), ()), Rule(("a", "b"), ("b",)))
    rules = {"q0": R0, "q1": R1}
    non_inc = DehnMachine(("q0", "q1"), "q0", rules,
                          {("q0", ("b", "a")): "q1", ("q1", ("a", "a")): "q0",
                           ("q1", ("b", END)): "q0"}, {}, NON_INCREMENTAL, ("a", "b"))
    inc = DehnMachine(("q0", "q1"), "q0", rules,
                      {("q0", ("b", "a")): "q1", ("q1", ("a", "a")): "q0",
                       ("q1", (START, "b")): "q0", ("q0", ("a", "b")): "q1"}, {},
                      INCREMENTAL, ("a", "b"))
    return {"two-state-non-incremental": non_inc, "two-state-incremental": inc}
