"""Combinators on rewriting systems.

* ``to_non_incremental``: the same substitutions under the other flavor.
* ``compress`` / ``compress_strict``: run a system over block letters
  ``[x1.x2...]`` that encode several base letters each.
* ``change_generators``, ``restrict_to_subgroup``, ``finite_index_extension``
  and ``free_product``: the group-theoretic constructions built on them.

>>> write_out(("[a.b]", "[c]"))
('a', 'b', 'c')
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

from .groups import GroupOracle
from .rewrite import (INCREMENTAL, NON_INCREMENTAL, Rule, RuleFamily, RewriteError, RewritingSystem,
                      first_redex_in, inverse_name, register_family, system_from_dict,
                      system_to_dict)


# ---------------------------------------------------------------- letters

def letter_name(payload: Sequence[str]) -> str:
    return "[" + ".".join(payload) + "]"


def payload_of(letter: str) -> tuple:
    """Payload of a block letter ``[x1.x2...]``; other letters are atomic."""
    if not (letter.startswith("[") and letter.endswith("]")):
        return (letter,)
    inner = letter[1:-1]
    out, depth, cur = [], 0, []
    for ch in inner:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == "|" and depth == 0:
            return (letter,)  # coloured letter, not a block
        if ch == "." and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return tuple(out)


def write_out(w: Sequence[str], decoder: Optional[dict] = None) -> tuple:
    """Concatenate payloads of block letters (one level)."""
    out = []
    for a in w:
        if decoder and a in decoder:
            out.extend(decoder[a])
        else:
            out.extend(payload_of(a))
    return tuple(out)


def block_letters(alphabet: Sequence[str], n: int) -> list:
    """All block letters with payload length 1..n, shortest first."""
    out = []
    for k in range(1, n + 1):
        out += [letter_name(p) for p in product(alphabet, repeat=k)]
    return out


def chunk(word: Sequence[str], n: int) -> list:
    """Greedy left-to-right blocks of size n."""
    return [letter_name(word[i:i + n]) for i in range(0, len(word), n)]


# ---------------------------------------------------------------- flavor change

def _contains_earlier(x: Rule, u: Rule) -> bool:
    """Does lhs ``u`` occur inside ``x`` ending before x's last letter, in a
    position where it applies whenever ``x`` does?"""
    L, k = len(x.lhs), len(u.lhs)
    if k >= L:
        return False
    starts = [0] if u.anchor_start else range(0, L - k)
    for s in starts:
        if u.anchor_start and not x.anchor_start:
            return False
        if s + k < L and x.lhs[s:s + k] == u.lhs:
            return True
    return False


def to_non_incremental(sys: RewritingSystem) -> RewritingSystem:
    """Discard every rule whose lhs contains another lhs ending before its last
    letter, then flip the flavor.

    One extra case keeps the histories step-identical: an unanchored lhs
    ``x`` with an anchored lhs ``^u`` as a proper prefix would win at index 0
    under the start-first order.  For such ``x`` a start-anchored rule ``^x``
    performing the ``^u`` substitution is added.
    """
    if sys.flavor != INCREMENTAL:
        raise RewriteError("input must be incremental")
    base = sys.materialize()
    rules = list(base.rules)
    by_len = {}
    for r in rules:
        by_len.setdefault(len(r.lhs), []).append(r)
    plain = {r.lhs for r in rules if not r.anchor_start}
    anchored = {r.lhs for r in rules if r.anchor_start}

    def dominated(x):
        L = len(x.lhs)
        for s in range(L):
            for e in range(s + 1, L):
                sub = x.lhs[s:e]
                if sub in plain:
                    return True
                if s == 0 and x.anchor_start and sub in anchored:
                    return True
        return False

    keep = [r for r in rules if not dominated(r)]
    kept_anchored = {r.lhs for r in keep if r.anchor_start}
    shadows = []
    for x in keep:
        if x.anchor_start or x.lhs in kept_anchored:
            continue
        if any(x.lhs[:k] in anchored for k in range(1, len(x.lhs))):
            s, r = first_redex_in(base, x.lhs, at_start=True)
            assert s == 0 and r.anchor_start
            shadows.append(Rule(x.lhs, r.rhs + x.lhs[len(r.lhs):], anchor_start=True))
    return base.with_rules(keep + shadows, flavor=NON_INCREMENTAL,
                           name=(base.name + "/non-incremental").lstrip("/"))


# ---------------------------------------------------------------- basic compression

def _rewrite_blocks(U: Sequence[str], start: int, rule: Rule, n: int) -> tuple:
    """Apply one base substitution at written-out position ``start`` and write
    back: untouched blocks stay, the affected ones are re-chunked."""
    ends, pos = [], 0
    for a in U:
        pos += len(payload_of(a))
        ends.append(pos)
    end = start + len(rule.lhs)
    first = next(i for i, e in enumerate(ends) if e > start)
    last = next(i for i, e in enumerate(ends) if e >= end)
    lo = ends[first - 1] if first else 0
    X = write_out(U)
    middle = X[lo:start] + rule.rhs + X[end:ends[last]]
    return tuple(U[:first]) + tuple(chunk(middle, n)) + tuple(U[last + 1:])


def compress(sys: RewritingSystem, n: int, rule_budget: int = 10 ** 6) -> RewritingSystem:
    """Weakly decreasing system over blocks of up to ``n`` letters whose
    reduction, written out, equals the base reduction of the written-out word.

    Left-hand sides: all block words of length <= W whose write-out holds a
    base lhs; anchors as in the construction (for the non-incremental flavor a
    trailing anchor is forced when the first base lhs starts within W letters
    of the end).
    """
    if n < 1:
        raise RewriteError("block size must be >= 1")
    base = sys.materialize()
    W = base.window
    letters = block_letters(base.working_alphabet, n)
    inputs = block_letters(base.input_alphabet, n)
    decorations = [(False, False), (True, False)]
    if base.flavor == NON_INCREMENTAL:
        decorations += [(False, True), (True, True)]
    rules = []
    for L in range(1, W + 1):
        for U in product(letters, repeat=L):
            X = write_out(U)
            for st, en in decorations:
                r = first_redex_in(base, X, at_start=st, at_end=en)
                if r is None:
                    continue
                s, rl = r
                if base.flavor == NON_INCREMENTAL and len(X) - s < W and not en:
                    continue
                rules.append(Rule(U, _rewrite_blocks(U, s, rl, n), st, en))
                if len(rules) > rule_budget:
                    raise RewriteError(f"compress: rule budget {rule_budget} exceeded")
    return RewritingSystem(base.flavor, inputs, letters, rules, strict=False,
                           potential="writeout", name=f"compress({base.name},{n})",
                           meta={"n": n, "base_window": W})


# ---------------------------------------------------------------- strict compression

@dataclass
class CompressionStats:
    fired: int = 0
    discarded_short_context: int = 0
    left_going: int = 0
    unwritable: int = 0


class StrictCompressionFamily(RuleFamily):
    """Strictly length-decreasing rules over blocks of up to 2n-1 letters.

    Blocks of payload <= n are B-letters, longer ones C-letters.  A lhs holds
    the first base lhs ``u`` with up to ``A + 2n - 2`` letters before it (at
    least ``A`` unless anchored) and up to ``B + n - 1`` after it; C-letters
    end before the right edge of ``u`` and at least ``(2n-1)(W-1)`` apart.  The
    rhs is the result of up to 2n-1 steps of subword reduction, written back
    with fewer blocks; a new C-letter may be written at the right end when
    subword reduction completes with at least ``B`` letters of right context.
    """

    name = "compress-strict"

    def __init__(self, base: RewritingSystem, n: int, decoder: Optional[dict] = None):
        if base.flavor != INCREMENTAL:
            raise RewriteError("strict compression is implemented for incremental systems")
        self.base, self.n = base, n
        self.W = W = base.window
        self.A = 2 * n * W + W
        self.B = 2 * n * W
        self.gap = (2 * n - 1) * (W - 1)
        self.decoder = dict(decoder or {})
        self.alphabet = block_letters(base.working_alphabet, 2 * n - 1)
        self._own = set(self.alphabet) | set(self.decoder)
        self.window = self.A + 2 * n - 2 + W + self.B + n - 1
        self.stats = CompressionStats()

    def letters(self):
        return set(self._own)

    def payload(self, a):
        p = self.decoder.get(a)
        return p if p is not None else payload_of(a)

    def match(self, left):
        own, n = self._own, self.n
        seg = []
        k = len(left) - 1
        while k >= 0 and len(seg) < self.window and left[k] in own:
            seg.append(left[k])
            k -= 1
        if not seg:
            return None
        seg.reverse()
        at_word_start = k < 0
        pays = [self.payload(a) for a in seg]
        starts = [0]
        for p in pays:
            starts.append(starts[-1] + len(p))
        for i in range(len(seg)):
            anchored = at_word_start and i == 0
            X = tuple(x for p in pays[i:] for x in p)
            r = first_redex_in(self.base, X, at_start=anchored)
            if r is None:
                if not anchored:
                    return None
                continue
            s, rl = r
            e = s + len(rl.lhs)
            if s > self.A + 2 * n - 2 or len(X) - e > self.B + n - 1:
                continue
            if not anchored and s < self.A:
                continue
            off = starts[i]
            cends = [starts[j + 1] - off for j in range(i, len(seg)) if len(pays[j]) > n]
            if any(c > e for c in cends) or any(b - a < self.gap for a, b in zip(cends, cends[1:])):
                continue
            rhs = self._rhs(seg[i:], pays[i:], X, anchored, len(X) - e)
            if rhs is None:
                continue
            self.stats.fired += 1
            return (len(seg) - i, rhs, anchored)
        return None

    def _subword_reduce(self, X, anchored):
        steps, p_min, p_last = 0, None, None
        while True:
            r = first_redex_in(self.base, X, at_start=anchored)
            if r is None:
                return X, steps, True, p_min, p_last, False
            if steps == 2 * self.n - 1:
                return X, steps, False, p_min, p_last, False
            s, rl = r
            if not anchored and (s + len(rl.lhs) < self.W or (p_min is not None and p_min < self.W - 1)):
                return X, steps, False, p_min, p_last, True
            X = X[:s] + rl.rhs + X[s + len(rl.lhs):]
            steps += 1
            p_min = s if p_min is None else min(p_min, s)
            p_last = s

    def _rhs(self, U, pays, X, anchored, after):
        n = self.n
        Xr, steps, complete, p_min, p_last, left_going = self._subword_reduce(X, anchored)
        if left_going:
            self.stats.left_going += 1
            return None
        if not Xr:
            return ()
        ends, pos = [], 0
        for p in pays:
            pos += len(p)
            ends.append(pos)
        q_idx = next(i for i, e in enumerate(ends) if e > p_min)
        q = ends[q_idx - 1] if q_idx else 0
        kept = list(U[:q_idx])
        lastC = None
        for j in range(q_idx):
            if len(pays[j]) > n:
                lastC = ends[j]
        old_C = sum(1 for p in pays[q_idx:] if len(p) > n)
        if complete:
            rpC = len(Xr)
            max_C = None if after >= self.B else old_C
        else:
            rpC = p_last + 1
            max_C = None
        R = Xr[q:]
        blocks = self._write(R, q, rpC, lastC, max_C)
        if blocks is None or len(kept) + len(blocks) >= len(U):
            if complete and after < self.B:
                self.stats.discarded_short_context += 1
            else:
                self.stats.unwritable += 1
            return None
        return tuple(kept) + tuple(blocks)

    def _write(self, R, q, rpC, lastC, max_C):
        """Fewest blocks for R (then fewest C-letters), by dynamic programming."""
        n, gap = self.n, self.gap
        INF = (1 << 30, 0)
        memo = {}

        def best(pos, lc, cused):
            if pos == len(R):
                return (0, 0), ()
            key = (pos, lc, cused)
            if key in memo:
                return memo[key]
            out = (INF, None)
            for size in range(min(2 * n - 1, len(R) - pos), 0, -1):
                end = pos + size
                isC = size > n
                if isC:
                    if q + end > rpC or (lc is not None and q + end - lc < gap):
                        continue
                    if max_C is not None and cused + 1 > max_C:
                        continue
                sub = best(end, q + end if isC else lc, cused + isC)
                if sub[1] is None:
                    continue
                cost = (sub[0][0] + 1, sub[0][1] + isC)
                if cost < out[0]:
                    out = (cost, (letter_name(R[pos:end]),) + sub[1])
            memo[key] = out
            return out

        cost, blocks = best(0, lastC, 0)
        return list(blocks) if blocks is not None else None

    def rules(self):
        raise RewriteError("strict compression rules are implicit; the set is too large to list")

    def to_spec(self):
        return {"kind": self.name, "n": self.n,
                "decoder": {a: list(w) for a, w in self.decoder.items()},
                "base": system_to_dict(self.base, materialize=True)}


def _load_strict(d: dict) -> RuleFamily:
    base = system_from_dict(d["base"])
    dec = {a: tuple(w) for a, w in d.get("decoder", {}).items()}
    return StrictCompressionFamily(base, int(d["n"]), dec)


register_family("compress-strict", _load_strict)


def compress_strict(sys: RewritingSystem, n: int, decoder: Optional[dict] = None,
                    input_letters: Optional[Sequence[str]] = None) -> RewritingSystem:
    """Strict system over blocks of up to 2n-1 letters (implicit rule family).

    Its reduction, written out, is an intermediate word of the base reduction
    and is empty exactly when the base reduction is.
    """
    if n < 1:
        raise RewriteError("block size must be >= 1")
    base = sys.materialize()
    if n == 1 and decoder is None:
        return base
    fam = StrictCompressionFamily(base, n, decoder)
    inputs = tuple(input_letters) if input_letters is not None else tuple(
        block_letters(base.input_alphabet, n))
    work = tuple(dict.fromkeys(list(inputs) + fam.alphabet))
    return RewritingSystem(INCREMENTAL, inputs, work, (), (fam,),
                           name=f"compress-strict({base.name},{n})",
                           meta={"n": n, "A": fam.A, "B": fam.B, "decoder": fam.decoder})


def decoder_of(sys: RewritingSystem) -> dict:
    for f in sys.families:
        if isinstance(f, StrictCompressionFamily):
            return f.decoder
    return {}


# ---------------------------------------------------------------- generators and subgroups

@dataclass
class GeneratorTranslation:
    words: dict  # new letter -> word over old generators
    n: Optional[int] = None

    def __post_init__(self):
        m = max((len(w) for w in self.words.values()), default=1)
        if self.n is None:
            self.n = max(m, 1)
        if m > self.n:
            raise RewriteError(f"translation of length {m} exceeds declared n = {self.n}")
        for a, w in self.words.items():
            if not w:
                raise RewriteError(f"empty translation for {a!r}")

    def translate(self, w: Sequence[str]) -> tuple:
        return tuple(x for a in w for x in self.words[a])


def change_generators(sys: RewritingSystem, trans: GeneratorTranslation) -> RewritingSystem:
    """Cannon's algorithm over the new generators, via strict compression.

    The new generator names become input letters decoding to their
    translations (blocks of at most n base letters).
    """
    for a, w in trans.words.items():
        bad = [x for x in w if x not in sys.input_alphabet]
        if bad:
            raise RewriteError(f"translation of {a!r} uses unknown generator {bad[0]!r}")
    decoder = {a: tuple(w) for a, w in trans.words.items()}
    out = compress_strict(sys, trans.n, decoder, input_letters=list(trans.words))
    if trans.n == 1 and out is sys.materialize():
        fam = StrictCompressionFamily(out, 1, decoder)
        work = tuple(dict.fromkeys(list(trans.words) + fam.alphabet))
        out = RewritingSystem(INCREMENTAL, tuple(trans.words), work, (), (fam,),
                              name=f"changegens({sys.name})")
    return out


def restrict_to_subgroup(sys: RewritingSystem, sub_generators: Sequence[str],
                         inverse: Optional[Callable] = None) -> RewritingSystem:
    inverse = inverse or inverse_name
    gens = set(sys.input_alphabet)
    for a in sub_generators:
        if a not in gens:
            raise RewriteError(f"{a!r} is not a generator of the system")
        if inverse(a) not in sub_generators:
            raise RewriteError(f"sub-generators not closed under inverses: {a!r}")
    return sys.with_rules(sys.rules, input_alphabet=tuple(sub_generators),
                          name=f"{sys.name}|{','.join(sub_generators)}")


# ---------------------------------------------------------------- merging

class MergeConflict(RewriteError):
    pass


def merge_rule_sets(systems: Sequence[RewritingSystem], input_alphabet: Optional[Sequence[str]] = None,
                    extra_letters: Sequence[str] = ()) -> RewritingSystem:
    """Union of rule sets; identical duplicates collapse, conflicting rhs fail."""
    if not systems:
        raise RewriteError("nothing to merge")
    flavor = systems[0].flavor
    seen, rules, fams, work = {}, [], [], []
    for s in systems:
        if s.flavor != flavor:
            raise MergeConflict("cannot merge systems of different flavors")
        for r in s.rules:
            old = seen.get(r.decorated)
            if old is None:
                seen[r.decorated] = r
                rules.append(r)
            elif old.rhs != r.rhs:
                raise MergeConflict(f"conflicting rules {old} and {r}")
        fams.extend(s.families)
        work.extend(s.working_alphabet)
    work.extend(extra_letters)
    inputs = input_alphabet if input_alphabet is not None else systems[0].input_alphabet
    strict = all(s.strict for s in systems)
    return RewritingSystem(flavor, tuple(inputs), tuple(dict.fromkeys(work)), tuple(rules),
                           tuple(fams), strict=strict,
                           potential=None if strict else systems[0].potential,
                           name="+".join(s.name for s in systems if s.name))


# ---------------------------------------------------------------- finite index

def subgroup_products(oracle: GroupOracle, gens: Sequence[str], in_subgroup: Callable,
                      transversal: Sequence[str]):
    """Rule data for pushing a coset representative along a word.

    Returns ``(pairs, triples)``: ``pairs[(g1, g2)] = h`` when g1 g2 lies in H,
    ``triples[(g1, g2, g3)] = (h, t)`` with g1 g2 g3 = h t, t in the
    transversal or None for the identity coset.  Only g1 outside H is used.
    """
    o = oracle
    tvals = {t: o.evaluate((t,)) for t in transversal}
    for t, v in tvals.items():
        if in_subgroup(v):
            raise RewriteError(f"transversal element {t!r} lies in H")
    ts = list(transversal)
    for i, a in enumerate(ts):
        for b in ts[i + 1:]:
            if in_subgroup(o.mul(tvals[a], o.evaluate(o.inverse_word((b,))))):
                raise RewriteError(f"transversal collision: {a!r} and {b!r} share a coset")

    def split(e):
        if in_subgroup(e):
            return e, None
        for t in ts:
            h = o.mul(e, o.evaluate(o.inverse_word((t,))))
            if in_subgroup(h):
                return h, t
        raise RewriteError("not a transversal: some product lies in no listed coset")

    pairs, triples = {}, {}
    outside = [g for g in gens if not in_subgroup(o.evaluate((g,)))]
    for g1 in outside:
        for g2 in gens:
            e2 = o.evaluate((g1, g2))
            if in_subgroup(e2):
                pairs[(g1, g2)] = e2
            for g3 in gens:
                triples[(g1, g2, g3)] = split(o.evaluate((g1, g2, g3)))
    return pairs, triples


def finite_index_extension(h_sys: RewritingSystem, oracle: GroupOracle, transversal: Sequence[str],
                           gens: Sequence[str], in_subgroup: Callable,
                           h_letters: dict) -> RewritingSystem:
    """Cannon's algorithm for G from one for a finite index subgroup H.

    ``h_letters`` maps each letter of the subgroup alphabet to its element of
    G; it must contain every generator of G lying in H and every non-identity
    element produced by the pair/triple products.  Rules: ``g1 g2 g3 -> [h][t]``
    and ``g1 g2 -> [h]`` for g1 outside H (brackets: omitted when trivial).
    """
    o = oracle
    for t in transversal:
        if t not in gens:
            raise RewriteError(f"transversal letter {t!r} is not a generator")
    name_of = {}
    for a, e in h_letters.items():
        name_of.setdefault(e, a)
    for g in gens:
        e = o.evaluate((g,))
        if in_subgroup(e) and g not in h_letters:
            raise RewriteError(f"generator {g!r} lies in H but is not a subgroup letter")
    missing = [a for a in h_letters if a not in h_sys.input_alphabet]
    if missing:
        raise RewriteError(f"subgroup letter {missing[0]!r} is not an input of the H system")

    def hword(e):
        if e == o.identity:
            return ()
        if e not in name_of:
            raise RewriteError(f"subgroup element {e!r} has no letter; extend the subgroup alphabet")
        return (name_of[e],)

    pairs, triples = subgroup_products(o, gens, in_subgroup, transversal)
    rules = []
    for (g1, g2), h in sorted(pairs.items()):
        rules.append(Rule((g1, g2), hword(h)))
    for (g1, g2, g3), (h, t) in sorted(triples.items(), key=lambda kv: kv[0]):
        rules.append(Rule((g1, g2, g3), hword(h) + ((t,) if t else ())))
    work = tuple(dict.fromkeys(list(gens) + list(h_letters) + list(h_sys.working_alphabet)))
    R = RewritingSystem(INCREMENTAL, tuple(gens), work, tuple(rules), name="cosets")
    out = merge_rule_sets([R, h_sys], input_alphabet=gens, extra_letters=work)
    return out.with_rules(out.rules, name=f"finite-index({h_sys.name})",
                          meta={"coset_rules": len(rules)})


def needed_subgroup_elements(oracle: GroupOracle, gens: Sequence[str], in_subgroup: Callable,
                             transversal: Sequence[str]) -> list:
    """Non-identity elements of H the pair/triple rules produce."""
    pairs, triples = subgroup_products(oracle, gens, in_subgroup, transversal)
    out = []
    for h in list(pairs.values()) + [h for h, _ in triples.values()]:
        if h != oracle.identity and h not in out:
            out.append(h)
    return out


# ---------------------------------------------------------------- free products

def free_product(sys0: RewritingSystem, sys1: RewritingSystem) -> RewritingSystem:
    """S0 + T0 + S1 + T1 with T0 = {a u -> a v : ^u -> v in S0, a in A1}."""
    for s in (sys0, sys1):
        if s.flavor != INCREMENTAL or not s.strict:
            raise RewriteError("free product needs incremental strict systems")
    s0, s1 = sys0.materialize(), sys1.materialize()
    overlap = set(s0.working_alphabet) & set(s1.working_alphabet)
    if overlap:
        raise RewriteError(f"alphabets overlap in {sorted(overlap)}")

    def T(s, other):
        return [Rule((a,) + r.lhs, (a,) + r.rhs) for r in s.rules if r.anchor_start
                for a in other.working_alphabet]

    rules = list(s0.rules) + T(s0, s1) + list(s1.rules) + T(s1, s0)
    return RewritingSystem(INCREMENTAL, s0.input_alphabet + s1.input_alphabet,
                           s0.working_alphabet + s1.working_alphabet, rules,
                           name=f"({s0.name})*({s1.name})")


def rename_letters(sys: RewritingSystem, mapping: dict) -> RewritingSystem:
    """Same system with letters renamed (letters not in ``mapping`` are kept)."""
    if len(set(mapping.values())) != len(mapping):
        raise RewriteError("renaming is not injective")
    s = sys.materialize()
    f = lambda w: tuple(mapping.get(a, a) for a in w)
    rules = [Rule(f(r.lhs), f(r.rhs), r.anchor_start, r.anchor_end) for r in s.rules]
    return RewritingSystem(s.flavor, f(s.input_alphabet), f(s.working_alphabet), tuple(rules),
                           (), s.strict, s.potential, s.anchor_first, s.name)
