"""Deterministic length-reducing rewriting engine.

A word is a tuple of letter names (plain strings).  A system is a set of
rules ``u -> v`` together with an input alphabet, a working alphabet and a
flavor:

* ``incremental``: rewrite the occurrence of a left-hand side that *ends*
  earliest, preferring the longest one, then an anchored one.
* ``non-incremental``: rewrite the occurrence that *starts* earliest, with the
  same tie-breaks.  End-anchored rules are allowed here.

>>> free = free_group_system(["a", "b"])
>>> reduce(free, ("a", "A", "b"))
('b',)
>>> accepts(free, ("a", "b", "B", "A"))
True
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

INCREMENTAL = "incremental"
NON_INCREMENTAL = "non-incremental"
FLAVORS = (INCREMENTAL, NON_INCREMENTAL)

# potentials for weakly decreasing systems
POTENTIALS = ("length", "writeout", "colored")

FORBIDDEN = set("^,[].")

Word = tuple


class RewriteError(Exception):
    """Raised for domain errors: bad letters, budgets, malformed input."""


def parse_word(text: str) -> Word:
    """Parse a dot-separated word.  The empty string is the empty word."""
    text = text.strip()
    if text in ("", "ε"):
        return ()
    out, depth, cur = [], 0, []
    # brackets may contain dots (compressed letters)
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "." and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    if any(x == "" for x in out):
        raise RewriteError(f"empty letter in word {text!r}")
    return tuple(out)


def format_word(w: Sequence[str]) -> str:
    return ".".join(w)


def valid_letter_name(name: str) -> bool:
    """Base letter names: non-empty, no whitespace, none of ``^ , [ ] .``."""
    return bool(name) and not any(c.isspace() or c in FORBIDDEN for c in name)


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: Word
    anchor_start: bool = False
    anchor_end: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))

    @property
    def decorated(self):
        return (self.lhs, self.anchor_start, self.anchor_end)

    @property
    def anchored(self) -> bool:
        return self.anchor_start or self.anchor_end

    def __str__(self):
        lhs = ("^" if self.anchor_start else "") + format_word(self.lhs)
        lhs += "^" if self.anchor_end else ""
        return f"{lhs} -> {format_word(self.rhs) or 'ε'}"

    def to_dict(self) -> dict:
        return {"lhs": list(self.lhs), "rhs": list(self.rhs),
                "anchor_start": self.anchor_start, "anchor_end": self.anchor_end}

    @classmethod
    def from_dict(cls, d: dict) -> "Rule":
        return cls(tuple(d["lhs"]), tuple(d["rhs"]),
                   bool(d.get("anchor_start", False)), bool(d.get("anchor_end", False)))


def rule(lhs: str, rhs: str = "", start: bool = False, end: bool = False) -> Rule:
    """Shorthand: ``rule("a.A", "")``."""
    return Rule(parse_word(lhs), parse_word(rhs), start, end)


class RuleFamily:
    """An implicitly described (possibly huge) set of incremental rules.

    Subclasses answer ``match(left)``: the preferred rule whose left-hand
    side ends at the last letter of ``left``, given that ``left[:-1]``
    contains no redex.  ``rules()`` materializes the family.
    """

    name = "family"
    window = 0
    anchored_window = 0

    def match(self, left: list) -> Optional[tuple[int, Word, bool]]:
        raise NotImplementedError

    def rules(self) -> Iterator[Rule]:
        raise NotImplementedError

    def letters(self) -> set:
        return set()

    def to_spec(self) -> dict:
        """JSON recipe that rebuilds the family (see ``register_family``)."""
        raise RewriteError(f"rule family {self.name!r} cannot be serialized; materialize it")


FAMILY_LOADERS: dict = {}


def register_family(kind: str, loader) -> None:
    FAMILY_LOADERS[kind] = loader


def load_family(spec: dict) -> RuleFamily:
    if spec.get("kind") not in FAMILY_LOADERS:
        # loaders register on import
        from . import constructions, expanding  # noqa: F401
    loader = FAMILY_LOADERS.get(spec.get("kind"))
    if loader is None:
        raise RewriteError(f"unknown rule family kind {spec.get('kind')!r}")
    return loader(spec)


@dataclass(frozen=True)
class Step:
    start: int
    rule: Rule
    index: Optional[int]  # index into system.rules, None for family rules


@dataclass
class ReductionHistory:
    words: list
    steps: list

    @property
    def final(self) -> Word:
        return self.words[-1]

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Violation:
    rule_index: Optional[int]
    reason: str

    def __str__(self):
        where = "system" if self.rule_index is None else f"rule {self.rule_index}"
        return f"{where}: {self.reason}"


@dataclass(frozen=True, eq=False)
class RewritingSystem:
    flavor: str
    input_alphabet: tuple
    working_alphabet: tuple
    rules: tuple = ()
    families: tuple = ()
    strict: bool = True
    potential: Optional[str] = None
    anchor_first: bool = False  # experimental: anchor beats length in tie-breaks
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "working_alphabet", tuple(self.working_alphabet))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "families", tuple(self.families))

    @property
    def window(self) -> int:
        w = max((len(r.lhs) for r in self.rules), default=0)
        return max([w] + [f.window for f in self.families])

    @cached_property
    def letters(self) -> frozenset:
        return frozenset(self.working_alphabet)

    @cached_property
    def _index(self):
        if self.flavor == INCREMENTAL:
            return _IncrementalIndex(self.rules)
        return _ForwardIndex(self.rules)

    def with_rules(self, rules, **kw) -> "RewritingSystem":
        args = dict(flavor=self.flavor, input_alphabet=self.input_alphabet,
                    working_alphabet=self.working_alphabet, rules=tuple(rules),
                    families=self.families, strict=self.strict,
                    potential=self.potential, anchor_first=self.anchor_first,
                    name=self.name, meta=dict(self.meta))
        args.update(kw)
        return RewritingSystem(**args)

    def all_rules(self, budget: Optional[int] = None) -> list:
        """Explicit rules plus materialized families (bounded by ``budget``)."""
        out = list(self.rules)
        for fam in self.families:
            for r in fam.rules():
                out.append(r)
                if budget is not None and len(out) > budget:
                    raise RewriteError(f"rule budget {budget} exceeded while materializing {fam.name}")
        return out

    def materialize(self, budget: Optional[int] = None) -> "RewritingSystem":
        if not self.families:
            return self
        return self.with_rules(self.all_rules(budget), families=())


# ---------------------------------------------------------------- validation

def validate_system(sys: RewritingSystem) -> list:
    """Every invariant violation, with rule index and reason (empty = valid)."""
    out = []
    work = set(sys.working_alphabet)
    if sys.flavor not in FLAVORS:
        out.append(Violation(None, f"unknown flavor {sys.flavor!r}"))
    if len(work) != len(sys.working_alphabet):
        out.append(Violation(None, "duplicate letter in working alphabet"))
    if len(set(sys.input_alphabet)) != len(sys.input_alphabet):
        out.append(Violation(None, "duplicate letter in input alphabet"))
    for a in sys.input_alphabet:
        if a not in work:
            out.append(Violation(None, f"input letter {a!r} not in working alphabet"))
    for a in sys.working_alphabet:
        if not _valid_display(a):
            out.append(Violation(None, f"invalid letter name {a!r}"))
    if not sys.strict and sys.potential not in POTENTIALS:
        out.append(Violation(None, "weakly-decreasing system without a declared potential"))
    seen = {}
    for i, r in enumerate(sys.rules):
        if len(r.lhs) < 1:
            out.append(Violation(i, "empty left-hand side"))
        if sys.strict and len(r.rhs) >= len(r.lhs):
            out.append(Violation(i, "non-length-decreasing"))
        if not sys.strict and len(r.rhs) > len(r.lhs):
            out.append(Violation(i, "length-increasing"))
        if r.anchor_end and sys.flavor == INCREMENTAL:
            out.append(Violation(i, "end anchor in incremental system"))
        bad = [a for a in r.lhs + r.rhs if a not in work]
        if bad:
            out.append(Violation(i, f"letter {bad[0]!r} not in working alphabet"))
        if r.decorated in seen:
            out.append(Violation(i, f"duplicate left-hand side (first at rule {seen[r.decorated]})"))
        else:
            seen[r.decorated] = i
    if sys.families and sys.flavor != INCREMENTAL:
        out.append(Violation(None, "rule families are only supported for incremental systems"))
    return out


def _valid_display(name: str) -> bool:
    """Letter names may be bracketed composites like ``[a.b]`` or ``[a|q]``."""
    if not name or any(c.isspace() for c in name) or "^" in name or "," in name:
        return False
    if name.startswith("["):
        depth = 0
        for i, c in enumerate(name):
            depth += (c == "[") - (c == "]")
            if depth < 0 or (depth == 0 and i != len(name) - 1):
                return False
        return depth == 0
    return valid_letter_name(name)


# ---------------------------------------------------------------- indexes

class _IncrementalIndex:
    """Aho-Corasick automaton over unanchored left-hand sides.

    ``best[state]`` is the longest unanchored lhs that is a suffix of the text
    read so far, as ``(length, rule index)``.
    """

    def __init__(self, rules: Sequence[Rule]):
        self.goto = [{}]
        self.term = [None]
        self.anchored = {}
        self.max_anchored = 0
        for i, r in enumerate(rules):
            if r.anchor_start:
                self.anchored[r.lhs] = i
                self.max_anchored = max(self.max_anchored, len(r.lhs))
                continue
            s = 0
            for a in r.lhs:
                nxt = self.goto[s].get(a)
                if nxt is None:
                    nxt = len(self.goto)
                    self.goto[s][a] = nxt
                    self.goto.append({})
                    self.term.append(None)
                s = nxt
            self.term[s] = (len(r.lhs), i)
        self.fail = [0] * len(self.goto)
        self.best = list(self.term)
        order = deque(self.goto[0].values())
        while order:
            s = order.popleft()
            if self.best[s] is None:
                self.best[s] = self.best[self.fail[s]]
            for a, nxt in self.goto[s].items():
                f = self.fail[s]
                while f and a not in self.goto[f]:
                    f = self.fail[f]
                cand = self.goto[f].get(a, 0)
                self.fail[nxt] = cand if cand != nxt else 0
                order.append(nxt)
        self._delta = [dict() for _ in self.goto]

    def step(self, s: int, a: str) -> int:
        d = self._delta[s]
        if a in d:
            return d[a]
        t = s
        while True:
            nxt = self.goto[t].get(a)
            if nxt is not None:
                break
            if t == 0:
                nxt = 0
                break
            t = self.fail[t]
        d[a] = nxt
        return nxt


class _ForwardIndex:
    """Trie of left-hand sides read left to right, for start-position scans."""

    def __init__(self, rules: Sequence[Rule]):
        self.trie = [{}]
        self.terms = [[]]
        for i, r in enumerate(rules):
            s = 0
            for a in r.lhs:
                nxt = self.trie[s].get(a)
                if nxt is None:
                    nxt = len(self.trie)
                    self.trie[s][a] = nxt
                    self.trie.append({})
                    self.terms.append([])
                s = nxt
            self.terms[s].append(i)


def _anchor_rank(r: Rule) -> int:
    return int(r.anchor_start) + int(r.anchor_end)


def _prefer(sys: RewritingSystem, a, b):
    """Pick between candidates ``(length, anchor rank, ...)`` by the tie-break."""
    if a is None:
        return b
    if b is None:
        return a
    if sys.anchor_first:
        ka, kb = (a[1] > 0, a[0], a[1]), (b[1] > 0, b[0], b[1])
    else:
        ka, kb = (a[0], a[1]), (b[0], b[1])
    return a if ka >= kb else b


# ---------------------------------------------------------------- scanners

def _check_letters(sys: RewritingSystem, w: Sequence[str]):
    letters = sys.letters
    for a in w:
        if a not in letters:
            raise RewriteError(f"letter {a!r} not in working alphabet")


def _incremental_match(sys, idx, left, states):
    """Preferred redex ending at the top of ``left`` (or None)."""
    cand = None
    b = idx.best[states[-1]]
    if b is not None:
        cand = (b[0], 0, sys.rules[b[1]], b[1])
    if idx.anchored and len(left) <= idx.max_anchored:
        j = idx.anchored.get(tuple(left))
        if j is not None:
            cand = _prefer(sys, cand, (len(left), 1, sys.rules[j], j))
    for fam in sys.families:
        m = fam.match(left)
        if m is not None:
            length, rhs, anch = m
            lhs = tuple(left[len(left) - length:])
            cand = _prefer(sys, cand, (length, int(anch), Rule(lhs, rhs, anch), None))
    return cand


def _step_budget(sys: RewritingSystem, w: Sequence[str], budget: Optional[int]) -> int:
    if budget is not None:
        return budget
    n = len(w)
    if sys.strict or sys.potential in (None, "length"):
        return n
    if sys.potential == "writeout":
        from .constructions import write_out
        return len(write_out(w))
    # lexicographic (length, position) potential
    return (n + 1) * (n + 1)


def _run_incremental(sys, w, record, budget):
    idx = sys._index
    left, states = [], [0]
    right = list(reversed(w))
    steps, words = [], [tuple(w)] if record else None
    limit = _step_budget(sys, w, budget)
    while right:
        a = right.pop()
        left.append(a)
        states.append(idx.step(states[-1], a))
        m = _incremental_match(sys, idx, left, states)
        if m is None:
            continue
        length, _, r, i = m
        if len(steps) >= limit:
            raise RewriteError(f"step budget {limit} exceeded")
        start = len(left) - length
        del left[start:]
        del states[start + 1:]
        right.extend(reversed(r.rhs))
        steps.append(Step(start, r, i))
        if record:
            words.append(tuple(left) + tuple(reversed(right)))
    return tuple(left), steps, words


def _run_non_incremental(sys, w, record, budget):
    if sys.families:
        raise RewriteError("rule families require the incremental flavor")
    idx = sys._index
    rules = sys.rules
    W = sys.window
    backup = W if any(r.anchor_end for r in rules) else max(W - 1, 0)
    left, right = [], list(reversed(w))
    steps, words = [], [tuple(w)] if record else None
    limit = _step_budget(sys, w, budget)
    while right:
        pos = len(left)
        s, best = 0, None
        k = len(right) - 1
        while k >= 0:
            s = idx.trie[s].get(right[k])
            if s is None:
                break
            at_end = k == 0
            for j in idx.terms[s]:
                r = rules[j]
                if (r.anchor_start and pos != 0) or (r.anchor_end and not at_end):
                    continue
                best = _prefer(sys, best, (len(r.lhs), _anchor_rank(r), r, j))
            k -= 1
        if best is None:
            left.append(right.pop())
            continue
        length, _, r, j = best
        if len(steps) >= limit:
            raise RewriteError(f"step budget {limit} exceeded")
        del right[len(right) - length:]
        right.extend(reversed(r.rhs))
        back = min(backup, len(left))
        for _ in range(back):
            right.append(left.pop())
        steps.append(Step(pos, r, j))
        if record:
            words.append(tuple(left) + tuple(reversed(right)))
    return tuple(left), steps, words


def _run(sys, w, record=False, budget=None):
    w = tuple(w)
    _check_letters(sys, w)
    if sys.flavor == INCREMENTAL:
        return _run_incremental(sys, w, record, budget)
    return _run_non_incremental(sys, w, record, budget)


# ---------------------------------------------------------------- public API

def find_redex(sys: RewritingSystem, w: Sequence[str]) -> Optional[tuple]:
    """The redex the algorithm would rewrite next: ``(rule, rule index, start)``.

    The rule index is None for rules produced by a family.
    """
    w = tuple(w)
    _check_letters(sys, w)
    if sys.flavor == INCREMENTAL:
        idx = sys._index
        left, states = [], [0]
        for a in w:
            left.append(a)
            states.append(idx.step(states[-1], a))
            m = _incremental_match(sys, idx, left, states)
            if m is not None:
                return m[2], m[3], len(left) - m[0]
        return None
    # non-incremental: scan starts left to right
    return _naive_redex(sys, w)


def reduce(sys: RewritingSystem, w: Sequence[str], budget: Optional[int] = None) -> Word:
    """The reduction R(w)."""
    return _run(sys, w, False, budget)[0]


def reduce_traced(sys: RewritingSystem, w: Sequence[str], budget: Optional[int] = None) -> ReductionHistory:
    _, steps, words = _run(sys, w, True, budget)
    return ReductionHistory(words, steps)


def count_steps(sys: RewritingSystem, w: Sequence[str]) -> tuple[Word, list]:
    """Reduction plus step records, without storing intermediate words."""
    final, steps, _ = _run(sys, w, False, None)
    return final, steps


def accepts(sys: RewritingSystem, w: Sequence[str]) -> bool:
    """True iff ``w`` (over the input alphabet) reduces to the empty word."""
    inputs = set(sys.input_alphabet)
    for a in w:
        if a not in inputs:
            raise RewriteError(f"letter {a!r} not in input alphabet")
    return reduce(sys, w) == ()


def apply_step(w: Sequence[str], step: Step) -> Word:
    w = tuple(w)
    lhs = step.rule.lhs
    if w[step.start:step.start + len(lhs)] != lhs:
        raise RewriteError("step does not match word")
    return w[:step.start] + step.rule.rhs + w[step.start + len(lhs):]


# ---------------------------------------------------------------- naive reference

def _occurrences(sys: RewritingSystem, w: Word):
    """All (start, rule, index) occurrences, by brute force."""
    rules = sys.all_rules() if sys.families else list(sys.rules)
    n = len(w)
    for j, r in enumerate(rules):
        L = len(r.lhs)
        for s in range(n - L + 1):
            if r.anchor_start and s != 0:
                continue
            if r.anchor_end and s + L != n:
                continue
            if w[s:s + L] == r.lhs:
                yield s, r, (j if j < len(sys.rules) else None)


def _naive_redex(sys, w):
    best, best_key = None, None
    for s, r, j in _occurrences(sys, w):
        L = len(r.lhs)
        first = s + L if sys.flavor == INCREMENTAL else s
        rank = _anchor_rank(r)
        if sys.anchor_first:
            key = (first, -(rank > 0), -L, -rank, j if j is not None else 1 << 60)
        else:
            key = (first, -L, -rank, j if j is not None else 1 << 60)
        if best_key is None or key < best_key:
            best, best_key = (r, j, s), key
    return best


def naive_reduce_traced(sys: RewritingSystem, w: Sequence[str], budget: Optional[int] = None) -> ReductionHistory:
    """Reference implementation: rescan the whole word after every step."""
    w = tuple(w)
    _check_letters(sys, w)
    words, steps = [w], []
    limit = _step_budget(sys, w, budget)
    while True:
        m = _naive_redex(sys, w)
        if m is None:
            return ReductionHistory(words, steps)
        if len(steps) >= limit:
            raise RewriteError(f"step budget {limit} exceeded")
        r, j, s = m
        step = Step(s, r, j)
        w = apply_step(w, step)
        words.append(w)
        steps.append(step)


# ---------------------------------------------------------------- JSON

def system_to_dict(sys: RewritingSystem, budget: Optional[int] = None, materialize: bool = False) -> dict:
    """Canonical document.  Implicit rule families are written as recipes
    under ``"families"`` unless ``materialize`` is set."""
    rules = sys.all_rules(budget) if materialize else list(sys.rules)
    d = {"flavor": sys.flavor,
         "input_alphabet": list(sys.input_alphabet),
         "working_alphabet": list(sys.working_alphabet),
         "rules": [r.to_dict() for r in rules]}
    if sys.families and not materialize:
        d["families"] = [f.to_spec() for f in sys.families]
    if not sys.strict:
        d["strict"] = False
        d["potential"] = sys.potential
    return d


def system_from_dict(d: dict) -> RewritingSystem:
    try:
        return RewritingSystem(
            flavor=d["flavor"],
            input_alphabet=tuple(d["input_alphabet"]),
            working_alphabet=tuple(d["working_alphabet"]),
            rules=tuple(Rule.from_dict(r) for r in d["rules"]),
            families=tuple(load_family(f) for f in d.get("families", ())),
            strict=bool(d.get("strict", True)),
            potential=d.get("potential"))
    except (KeyError, TypeError) as e:
        raise RewriteError(f"malformed system document: {e}") from None


def dumps(sys: RewritingSystem, budget: Optional[int] = None, materialize: bool = False) -> str:
    return json.dumps(system_to_dict(sys, budget, materialize), indent=1, ensure_ascii=False) + "\n"


def loads(text: str) -> RewritingSystem:
    return system_from_dict(json.loads(text))


def save(sys: RewritingSystem, path, budget: Optional[int] = None, materialize: bool = False):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(sys, budget, materialize))


def load(path) -> RewritingSystem:
    with open(path, encoding="utf-8") as f:
        return loads(f.read())


# ---------------------------------------------------------------- small systems

def inverse_name(a: str) -> str:
    """Inverse convention for generator names: ``a <-> A``, ``1 <-> -1``, ``t <-> t-``."""
    if a.startswith("-"):
        return a[1:]
    if a.endswith("-"):
        return a[:-1]
    if a.isalpha() and len(a) == 1:
        return a.swapcase()
    if a[0].isalpha() and a[0].islower():
        return a[0].upper() + a[1:]
    if a[0].isalpha() and a[0].isupper():
        return a[0].lower() + a[1:]
    return "-" + a


def free_group_system(gens: Iterable[str], flavor: str = INCREMENTAL) -> RewritingSystem:
    """Free cancellation ``x X -> ε`` over the given generators and inverses."""
    alpha = []
    for g in gens:
        alpha += [g, inverse_name(g)]
    rules = [Rule((a, inverse_name(a)), ()) for a in alpha]
    return RewritingSystem(flavor, tuple(alpha), tuple(alpha), tuple(rules), name="free")


def dehn_system(relators: Iterable[Sequence[str]], flavor: str = INCREMENTAL,
                name: str = "dehn") -> RewritingSystem:
    """Dehn's algorithm: free cancellation plus ``u -> v^-1`` for every
    cyclic conjugate ``uv`` of a relator or its inverse with ``|u| > |uv|/2``.

    >>> s = dehn_system([parse_word("a.b.A.B")])
    >>> accepts(s, parse_word("b.a.B.A"))
    True
    """
    gens = []
    for r in relators:
        for a in r:
            g = a if a == a.lower() else inverse_name(a)
            if g not in gens:
                gens.append(g)
    base = free_group_system(gens, flavor)
    inv = lambda w: tuple(inverse_name(a) for a in reversed(w))
    rules = {r.lhs: r for r in base.rules}
    for rel in relators:
        rel = tuple(rel)
        for word in (rel, inv(rel)):
            n = len(word)
            for i in range(n):
                c = word[i:] + word[:i]
                for k in range(n // 2 + 1, n + 1):
                    r = Rule(c[:k], inv(c[k:]))
                    old = rules.setdefault(r.lhs, r)
                    if old.rhs != r.rhs:
                        raise RewriteError(f"relators give two right-hand sides for {format_word(r.lhs)}")
    return RewritingSystem(flavor, base.input_alphabet, base.working_alphabet,
                           tuple(rules.values()), name=name)


def surface_octagon_system(flavor: str = INCREMENTAL) -> RewritingSystem:
    """Genus-2 surface group, relator a b A B c d C D."""
    return dehn_system([parse_word("a.b.A.B.c.d.C.D")], flavor, name="surface-octagon")


def first_redex_in(sys: RewritingSystem, w: Sequence[str], at_start: bool = True,
                   at_end: bool = True) -> Optional[tuple]:
    """First redex ``(start, rule)`` of ``w`` viewed as a subword.

    ``at_start`` / ``at_end`` say whether ``w`` touches the start / end of
    the surrounding word, i.e. whether anchored rules may apply.
    """
    w = tuple(w)
    if sys.flavor == INCREMENTAL:
        idx = sys._index
        left, states = [], [0]
        for a in w:
            left.append(a)
            states.append(idx.step(states[-1], a))
            cand = None
            b = idx.best[states[-1]]
            if b is not None:
                cand = (b[0], 0, sys.rules[b[1]], b[1])
            if at_start and idx.anchored and len(left) <= idx.max_anchored:
                j = idx.anchored.get(tuple(left))
                if j is not None:
                    cand = _prefer(sys, cand, (len(left), 1, sys.rules[j], j))
            for fam in sys.families:
                m = fam.match(left)
                if m is not None and (at_start or not m[2]):
                    lhs = tuple(left[len(left) - m[0]:])
                    cand = _prefer(sys, cand, (m[0], int(m[2]), Rule(lhs, m[1], m[2]), None))
            if cand is not None:
                return len(left) - cand[0], cand[2]
        return None
    idx = sys._index
    n = len(w)
    for pos in range(n):
        s, best = 0, None
        for k in range(pos, min(n, pos + sys.window)):
            s = idx.trie[s].get(w[k])
            if s is None:
                break
            end = k == n - 1
            for j in idx.terms[s]:
                r = sys.rules[j]
                if (r.anchor_start and not (at_start and pos == 0)) or (r.anchor_end and not (at_end and end)):
                    continue
                best = _prefer(sys, best, (len(r.lhs), _anchor_rank(r), r, j))
        if best is not None:
            return pos, best[2]
    return None
