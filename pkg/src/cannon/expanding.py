"""Cannon's algorithms from expanding endomorphisms (place-value rewriting).

The working alphabet is the group generators plus ``t`` and ``t-``
(for t^-1).  A balanced word ``t w t-`` stands for phi applied to ``w``, so
reduced words look like decimal numerals ``t^n g_n t- ... t- g_0``.

>>> sys = z_decimal_system(mu=10, K=5)
>>> format_word(reduce(sys, ("1",) * 12))
't.1.t-.1.1'
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Optional, Sequence

from .groups import (BallTable, GroupOracle, HeisenbergOracle, IntegerOracle, OracleError,
                     UnitriangularOracle, ball)
from .rewrite import (INCREMENTAL, Rule, RuleFamily, RewriteError, RewritingSystem, format_word,
                      reduce, reduce_traced, register_family)

T, TI = "t", "t-"


class ParamsError(Exception):
    pass


class NormalFormError(Exception):
    pass


@dataclass
class EndomorphismSpec:
    oracle: GroupOracle
    phi: dict                      # generator -> word
    phi_element: Callable          # element -> element
    in_image: Callable
    preimage: Callable
    coset_key: Callable            # right coset phi(G) * g -> hashable key
    index: int                     # [G : phi(G)]
    label: str = ""
    length: Optional[Callable] = None   # exact word metric, when known analytically
    exact_M: Optional[Fraction] = None
    power_of: Optional[Callable] = None  # k -> spec for phi^k

    def power(self, k: int) -> "EndomorphismSpec":
        if self.power_of is None:
            raise ParamsError("this endomorphism does not know its powers")
        return self.power_of(k)

    def check_homomorphism(self, words: Sequence[Sequence[str]]) -> bool:
        """phi(eval w) == eval(phi(w)) on the given words."""
        o = self.oracle
        for w in words:
            img = tuple(a for g in w for a in self.phi[g])
            if o.evaluate(img) != self.phi_element(o.evaluate(w)):
                return False
        return True


def z_spec(mu: int = 10) -> EndomorphismSpec:
    """n -> mu n on Z with generators 1 and -1."""
    Z = IntegerOracle()
    return EndomorphismSpec(
        Z, {"1": ("1",) * mu, "-1": ("-1",) * mu},
        phi_element=lambda n: mu * n,
        in_image=lambda n: n % mu == 0,
        preimage=lambda n: n // mu,
        coset_key=lambda n: n % mu,
        index=mu, label=f"n -> {mu}n",
        length=abs, exact_M=Fraction(mu),
        power_of=lambda k: z_spec(mu ** k))


def heisenberg_spec(mu: int = 5, with_z: bool = False) -> EndomorphismSpec:
    """f_mu on U_3(Z): entry (i, j) is multiplied by mu^(j-i).

    Elements are ``(a, c, b)`` with a = x12, c = x13, b = x23.  The image is
    not normal, so cosets are right cosets ``phi(G) g``; the key below is the
    unique coset element with a, b in [0, mu) and c in [0, mu^2).
    """
    H = HeisenbergOracle(with_z)
    phi = {"x": ("x",) * mu, "X": ("X",) * mu, "y": ("y",) * mu, "Y": ("Y",) * mu}
    if with_z:
        # z = [x, y] maps to z^(mu^2) = [x^mu, y^mu]
        phi["z"] = ("x",) * mu + ("y",) * mu + ("X",) * mu + ("Y",) * mu
        phi["Z"] = ("y",) * mu + ("x",) * mu + ("Y",) * mu + ("X",) * mu
    m2 = mu * mu

    def key(e):
        a, c, b = e
        return (a % mu, (c - mu * (a // mu) * b) % m2, b % mu)

    return EndomorphismSpec(
        H, phi,
        phi_element=lambda e: (mu * e[0], m2 * e[1], mu * e[2]),
        in_image=lambda e: e[0] % mu == 0 and e[2] % mu == 0 and e[1] % m2 == 0,
        preimage=lambda e: (e[0] // mu, e[1] // m2, e[2] // mu),
        coset_key=key, index=mu ** 4, label=f"f_{mu} on U3(Z)",
        power_of=lambda k: heisenberg_spec(mu ** k, with_z))


def unitriangular_spec(n: int, mu: int) -> EndomorphismSpec:
    """f_mu on U_n(Z) with superdiagonal generators (used for n = 4)."""
    U = UnitriangularOracle(n)
    scale = [mu ** (j - i) for (i, j) in U.pos]
    phi = {}
    for a in U.gens:
        phi[a] = (a,) * mu
    # coset key: reduce entries greedily from the superdiagonal outwards
    def key(e):
        # phi(G) g: left-multiply by phi(h); solve h diagonal by diagonal
        g = e
        h = [0] * len(U.pos)
        for d in range(1, n):
            for (i, j) in U.pos:
                if j - i != d:
                    continue
                k = U.index[(i, j)]
                h[k] = 0
                cur = U.mul(tuple(s * x for s, x in zip(scale, h)), g)
                h[k] = -(cur[k] // scale[k])
        rep = U.mul(tuple(s * x for s, x in zip(scale, h)), g)
        return rep

    return EndomorphismSpec(
        U, phi,
        phi_element=lambda e: tuple(s * x for s, x in zip(scale, e)),
        in_image=lambda e: all(x % s == 0 for s, x in zip(scale, e)),
        preimage=lambda e: tuple(x // s for s, x in zip(scale, e)),
        coset_key=key, index=math.prod(scale), label=f"f_{mu} on U{n}(Z)",
        power_of=lambda k: unitriangular_spec(n, mu ** k))


@dataclass(frozen=True)
class ExpandingParams:
    M: Fraction
    K: int
    N: Optional[int] = None
    M_verified: bool = False

    def check(self):
        if self.M <= 1:
            raise ParamsError(f"M = {self.M} is not expanding")
        if Fraction(3) / self.M + Fraction(2, self.K) >= 1:
            raise ParamsError(
                f"3/M + 2/K = {float(Fraction(3) / self.M + Fraction(2, self.K)):.3f} >= 1; "
                "replace phi by a suitable power and recompute K")
        if self.N is not None and Fraction(self.M / 3) ** self.N <= self.K:
            raise ParamsError(f"(M/3)^N <= K for N = {self.N}; choose a larger N")
        return self


def min_height_bound(M: Fraction, K: int) -> int:
    """Smallest N with (M/3)^N > K."""
    if M <= 3:
        raise ParamsError("rule 5 needs M > 3")
    n = 1
    while Fraction(M / 3) ** n <= K:
        n += 1
    return n


# ---------------------------------------------------------------- coset geometry

class CosetTable:
    """Nearest coset elements and decompositions g = phi(g') g''.

    ``g''`` is the shortest (then lex-least) word in the right coset
    ``phi(G) g``; it depends only on the coset.
    """

    def __init__(self, spec: EndomorphismSpec, table: BallTable):
        self.spec, self.table = spec, table
        o = spec.oracle
        self.rep = {}
        for k, sphere in enumerate(table.spheres):
            for h in sphere:
                key = spec.coset_key(h)
                if key not in self.rep:
                    w = table.geodesic[h]
                    self.rep[key] = (w, o.evaluate(o.inverse_word(w)))
            if len(self.rep) == spec.index:
                break
        self.complete = len(self.rep) == spec.index
        self.density = max((len(w) for w, _ in self.rep.values()), default=0)
        self._cache = {}

    def decompose(self, e) -> tuple:
        d = self._cache.get(e)
        if d is not None:
            return d
        key = self.spec.coset_key(e)
        if key not in self.rep:
            raise OracleError("coset representative outside the ball")
        g2, g2inv = self.rep[key]
        q = self.spec.oracle.mul(e, g2inv)
        if not self.spec.in_image(q):
            raise OracleError("coset key inconsistent with image membership")
        p = self.spec.preimage(q)
        if p not in self.table.geodesic:
            raise OracleError("preimage outside the ball")
        d = (self.table.geodesic[p], g2)
        self._cache[e] = d
        return d


def estimate_params(spec: EndomorphismSpec, radius: int, N: Optional[int] = None,
                    budget: int = 10 ** 7) -> ExpandingParams:
    """Measure M on ball(radius) and the density K from coset representatives.

    M is exact when the spec supplies an analytic value; otherwise it is the
    minimum of l(phi(g)) / l(g) over the ball (marked unverified).
    """
    o = spec.oracle
    tb = ball(o, radius, budget)
    ct = CosetTable(spec, tb)
    if not ct.complete:
        raise ParamsError(f"ball of radius {radius} misses some cosets; enlarge it")
    K = max(ct.density, 1)
    if spec.exact_M is not None:
        M, verified = spec.exact_M, True
    else:
        M, verified = empirical_M(spec, tb, budget), False
    return ExpandingParams(M, K, N, verified).check()


def empirical_M(spec: EndomorphismSpec, tb: BallTable, budget: int = 10 ** 7) -> Fraction:
    o = spec.oracle
    stretch = max(len(w) for w in spec.phi.values())
    length = spec.length
    if length is None:
        big = ball(o, stretch * tb.radius, budget)
        length = big.length.__getitem__
    best = None
    for k in range(1, tb.radius + 1):
        for e in tb.spheres[k]:
            r = Fraction(length(spec.phi_element(e)), k)
            if best is None or r < best:
                best = r
    return best


# ---------------------------------------------------------------- evaluation

def balanced_value(spec: EndomorphismSpec, w: Sequence[str]):
    """Element represented by a balanced word (``t u t-`` means phi(u))."""
    o = spec.oracle
    stack = [o.identity]
    for a in w:
        if a == T:
            stack.append(o.identity)
        elif a == TI:
            if len(stack) < 2:
                raise NormalFormError("unbalanced word: t- without matching t")
            x = stack.pop()
            stack[-1] = o.mul(stack[-1], spec.phi_element(x))
        else:
            stack[-1] = o.mul(stack[-1], o.gen(a))
    if len(stack) != 1:
        raise NormalFormError("unbalanced word: unmatched t")
    return stack[0]


def is_balanced(w: Sequence[str]) -> bool:
    depth = 0
    for a in w:
        depth += (a == T) - (a == TI)
        if depth < 0:
            return False
    return depth == 0


@dataclass(frozen=True)
class NormalForm:
    height: int
    digits: tuple  # g_n, ..., g_0

    def word(self) -> tuple:
        out = [T] * self.height
        for i, d in enumerate(self.digits):
            if i:
                out.append(TI)
            out.extend(d)
        return tuple(out)


def parse_normal_form(w: Sequence[str]) -> NormalForm:
    """Split ``t^n g_n t- ... t- g_0`` into its height and digits.

    >>> parse_normal_form(("t", "1", "t-", "1", "1")).digits
    (('1',), ('1', '1'))
    """
    w = tuple(w)
    n = 0
    while n < len(w) and w[n] == T:
        n += 1
    digits, cur = [], []
    for a in w[n:]:
        if a == T:
            raise NormalFormError(f"t after the leading block in {format_word(w)}")
        if a == TI:
            digits.append(tuple(cur))
            cur = []
        else:
            cur.append(a)
    digits.append(tuple(cur))
    if len(digits) != n + 1:
        raise NormalFormError(f"{len(digits) - 1} t- letters but height {n}")
    return NormalForm(n, tuple(digits))


def normal_form_violations(nf: NormalForm, spec: EndomorphismSpec, table: BallTable, K: int) -> list:
    """Check the three normal-form clauses; returns a list of messages."""
    out = []
    o = spec.oracle
    for i, d in enumerate(nf.digits):
        pos = nf.height - i
        if len(d) >= 2 * K:
            out.append(f"digit {pos} has length {len(d)} >= 2K")
            continue
        e = o.evaluate(d)
        if table.length.get(e) != len(d):
            out.append(f"digit {pos} is not geodesic")
        if pos < nf.height and d and spec.in_image(e):
            out.append(f"digit {pos} lies in phi(G)")
    if nf.height > 0 and not nf.digits[0]:
        out.append("leading digit empty")
    return out


# ---------------------------------------------------------------- the rules

class ExpandingFamily(RuleFamily):
    """Rules 1-4 (and optionally 5), matched implicitly from the ball table.

    Matching at the end of a redex-free prefix: only the maximal run of group
    letters (at most 2K long) can end a rule 1-3 left-hand side, and
    non-geodesicity of a suffix implies it for every longer suffix, so a
    single lookup decides each rule.
    """

    name = "expanding"

    def __init__(self, spec: EndomorphismSpec, params: ExpandingParams, budget: int = 10 ** 7):
        self.spec, self.params = spec, params
        self.K = params.K
        self.table = ball(spec.oracle, 2 * params.K, budget)
        self.cosets = CosetTable(spec, self.table)
        if not self.cosets.complete:
            raise ParamsError("K is smaller than the density radius of phi(G)")
        if self.cosets.density > self.K:
            raise ParamsError(f"density radius {self.cosets.density} exceeds K = {self.K}")
        self.gens = spec.oracle.gens
        self.N = params.N
        self.window = 2 * self.K + 1
        if self.N:
            self.anchored_window = self.N * 2 + (self.N + 1) * (2 * self.K - 1)
        self._check_rule2()

    recipe = None

    def letters(self):
        return set(self.gens) | {T, TI}

    def to_spec(self):
        if self.recipe is None:
            return super().to_spec()
        return dict(self.recipe)

    def _check_rule2(self):
        """Rule 2 must shrink words: l(g') + l(g'') + 2 < 2K on every instance."""
        for e in self.table.spheres[2 * self.K]:
            g1, g2 = self.cosets.decompose(e)
            if len(g1) + len(g2) + 2 >= 2 * self.K:
                raise ParamsError(
                    f"rule 2 not length decreasing for {format_word(self.table.geodesic[e])}: "
                    f"l(g')={len(g1)}, l(g'')={len(g2)}")

    # -- matching

    def _value_len(self, e):
        return self.table.length.get(e)

    def match(self, left):
        top = left[-1]
        if top == TI:
            if len(left) >= 2 and left[-2] == T:
                return (2, (), False)
            return None
        if top == T:
            return None
        o, K2 = self.spec.oracle, 2 * self.K
        n = len(left)
        r = 0
        e = o.identity
        # walk the run of group letters backwards (at most 2K)
        vals = []
        while r < min(n, K2) and left[n - 1 - r] not in (T, TI):
            vals.append(o.gen(left[n - 1 - r]))
            r += 1
        for v in reversed(vals):
            e = o.mul(e, v)
        L = self.table.length.get(e)
        geodesic = L == r
        before = left[n - r - 1] if n > r else None
        if not geodesic:
            return (r, self.table.geodesic[e], False)
        if r == K2:
            g1, g2 = self.cosets.decompose(e)
            if before == TI:
                return (r + 1, g1 + (TI,) + g2, False)
            return (r, (T,) + g1 + (TI,) + g2, False)
        if before == TI and self.spec.in_image(e):
            g1, _ = self.cosets.decompose(e)
            return (r + 1, g1 + (TI,), False)
        if self.N and n <= self.anchored_window:
            m = self._rule5(left)
            if m is not None:
                return m
        return None

    def _rule5(self, left):
        try:
            nf = parse_normal_form(left)
        except NormalFormError:
            return None
        if nf.height == 0 or nf.height > self.N:
            return None
        g0 = nf.digits[-1]
        # left is reduced w.r.t. rules 1-4 here, so only the value matters
        v = balanced_value(self.spec, left)
        L = self.table.length.get(v)
        if L is not None and 2 * L < len(g0):
            return (len(left), self.table.geodesic[v], True)
        return None

    # -- materialization

    def _geodesic_words(self, max_len):
        """All geodesic words of length <= max_len, shortest first then lex."""
        o = self.spec.oracle
        layer = [((), o.identity)]
        yield from layer
        for k in range(1, max_len + 1):
            nxt = []
            for w, e in layer:
                for a in self.gens:
                    f = o.mul(e, o.gen(a))
                    if self.table.length.get(f) == k:
                        nxt.append((w + (a,), f))
            yield from nxt
            layer = nxt

    def rules(self) -> Iterator[Rule]:
        o, K2 = self.spec.oracle, 2 * self.K
        # rule 1: every non-geodesic word of length <= 2K
        for k in range(1, K2 + 1):
            for w in product(self.gens, repeat=k):
                e = o.evaluate(w)
                if self.table.length[e] < k:
                    yield Rule(w, self.table.geodesic[e])
        # rules 2 and 3
        for w, e in self._geodesic_words(K2):
            if not w:
                continue
            if len(w) == K2:
                g1, g2 = self.cosets.decompose(e)
                yield Rule(w, (T,) + g1 + (TI,) + g2)
                yield Rule((TI,) + w, g1 + (TI,) + g2)
            elif self.spec.in_image(e):
                g1, _ = self.cosets.decompose(e)
                yield Rule((TI,) + w, g1 + (TI,))
        # rule 4
        yield Rule((T, TI), ())
        if self.N:
            yield from self._rule5_rules()

    def _digits(self):
        """Geodesic digits of length < 2K, none with a nonempty prefix in phi(G)."""
        out = []
        for w, e in self._geodesic_words(2 * self.K - 1):
            ok, f = True, self.spec.oracle.identity
            for a in w:
                f = self.spec.oracle.mul(f, self.spec.oracle.gen(a))
                if self.spec.in_image(f):
                    ok = False
                    break
            out.append((w, ok))
        return out

    def _rule5_rules(self):
        digits = self._digits()
        inner = [w for w, ok in digits if ok]          # may follow a t-
        lead = [w for w, _ in digits if w]              # g_n: nonempty
        tail = [w for w, ok in digits if ok and w]      # g_0: nonempty
        for n in range(1, self.N + 1):
            for combo in product(lead, *([inner] * (n - 1)), tail):
                nf = NormalForm(n, combo)
                w = nf.word()
                v = balanced_value(self.spec, w)
                L = self.table.length.get(v)
                if L is not None and 2 * L < len(combo[-1]):
                    yield Rule(w, self.table.geodesic[v], anchor_start=True)

    def rule_for(self, lhs: Sequence[str]) -> Optional[Rule]:
        """The unanchored family rule with this left-hand side, if any."""
        lhs = tuple(lhs)
        if not lhs or any(a not in self.letters() for a in lhs):
            return None
        if lhs == (T, TI):
            return Rule(lhs, ())
        body = lhs[1:] if lhs[0] == TI else lhs
        if any(a in (T, TI) for a in body) or not body or len(body) > 2 * self.K:
            return None
        o = self.spec.oracle
        e = o.evaluate(body)
        geo = self.table.length[e] == len(body)
        if body is lhs:
            if not geo:
                return Rule(lhs, self.table.geodesic[e])
            if len(lhs) == 2 * self.K:
                g1, g2 = self.cosets.decompose(e)
                return Rule(lhs, (T,) + g1 + (TI,) + g2)
            return None
        if not geo:
            return None
        if len(body) == 2 * self.K:
            g1, g2 = self.cosets.decompose(e)
            return Rule(lhs, g1 + (TI,) + g2)
        if self.spec.in_image(e):
            g1, _ = self.cosets.decompose(e)
            return Rule(lhs, g1 + (TI,))
        return None


def build_system(spec: EndomorphismSpec, params: ExpandingParams, materialize: bool = False,
                 rule_budget: int = 10 ** 6, ball_budget: int = 10 ** 7,
                 recipe: Optional[dict] = None) -> RewritingSystem:
    """Incremental strict system for rules 1-4 (plus rule 5 when ``params.N``).

    ``recipe`` is the JSON form written for the implicit family.
    """
    params.check()
    fam = ExpandingFamily(spec, params, ball_budget)
    fam.recipe = recipe
    gens = spec.oracle.gens
    sys = RewritingSystem(INCREMENTAL, gens, gens + (T, TI), (), (fam,),
                          name=f"expanding[{spec.label}]",
                          meta={"M": str(params.M), "K": params.K, "N": params.N,
                                "M_verified": params.M_verified})
    if materialize:
        sys = _dedupe(sys.materialize(rule_budget))
    return sys


def _dedupe(sys: RewritingSystem) -> RewritingSystem:
    seen = {}
    for r in sys.rules:
        old = seen.get(r.decorated)
        if old is not None and old.rhs != r.rhs:
            raise RewriteError(f"rule families disagree on {r}")
        seen.setdefault(r.decorated, r)
    return sys.with_rules(list(seen.values()))


def z_decimal_system(mu: int = 10, K: int = 5, N: Optional[int] = None,
                     materialize: bool = True, ball_budget: int = 10 ** 7) -> RewritingSystem:
    spec = z_spec(mu)
    return build_system(spec, ExpandingParams(Fraction(mu), K, N, True), materialize,
                        ball_budget=ball_budget,
                        recipe=dict(kind="expanding", group="z", mu=mu, K=K, N=N))


HEISENBERG_DEFAULTS = dict(mu=5, K=10, M=Fraction(19, 5))


def heisenberg_system(mu: int = 5, K: int = 10, M: Optional[Fraction] = None,
                      N: Optional[int] = None, ball_budget: int = 10 ** 7) -> RewritingSystem:
    """U_3(Z) with generators x, X, y, Y and f_mu.

    M defaults to the value measured on a finite ball (19/5 for mu = 5).
    """
    if M is None:
        if mu != 5:
            M = estimate_params(heisenberg_spec(mu), 4).M
        else:
            M = HEISENBERG_DEFAULTS["M"]
    return build_system(heisenberg_spec(mu), ExpandingParams(Fraction(M), K, N),
                        ball_budget=ball_budget, recipe=dict(kind="expanding", group="heisenberg", mu=mu, K=K, N=N,
                                    M=str(Fraction(M))))


def _load_expanding(d: dict) -> RuleFamily:
    if d.get("group") == "z":
        sys = z_decimal_system(d["mu"], d["K"], d.get("N"), materialize=False)
    elif d.get("group") == "heisenberg":
        M = d.get("M")
        sys = heisenberg_system(d["mu"], d["K"], Fraction(M) if M else None, d.get("N"))
    else:
        raise RewriteError(f"unknown expanding group {d.get('group')!r}")
    return sys.families[0]


register_family("expanding", _load_expanding)


def spec_for_system(sys: RewritingSystem) -> Optional[EndomorphismSpec]:
    for f in sys.families:
        if isinstance(f, ExpandingFamily):
            return f.spec
    return None


# ---------------------------------------------------------------- checks

def check_height_bound(sys: RewritingSystem, spec: EndomorphismSpec, params: ExpandingParams,
                       samples: Sequence[Sequence[str]]) -> dict:
    """Reduced non-identity outputs of height n must have l(value) >= (M/3)^n."""
    length = spec.length or (lambda e: _ball_length(sys, e))
    violations, checked = [], 0
    for w in samples:
        r = reduce(sys, w)
        nf = parse_normal_form(r)
        v = balanced_value(spec, r)
        if v == spec.oracle.identity:
            continue
        checked += 1
        L = length(v)
        if Fraction(L) < Fraction(params.M / 3) ** nf.height:
            violations.append({"input": format_word(w), "reduced": format_word(r),
                               "height": nf.height, "length": L})
    return {"checked": checked, "violations": violations, "ok": not violations}


def _ball_length(sys, e):
    for f in sys.families:
        if isinstance(f, ExpandingFamily):
            L = f.table.length.get(e)
            return L if L is not None else f.table.radius + 1  # lower bound
    raise ParamsError("no ball table available")


def check_tight(sys: RewritingSystem, extra_rules: Sequence[Rule], N: int,
                samples: Sequence[Sequence[str]]) -> dict:
    """Adjoin local geodesic rules and check the merged system is N-geodesic.

    Also records whether any extra rule ever fires.
    """
    fam = next((f for f in sys.families if isinstance(f, ExpandingFamily)), None)
    spec = fam.spec if fam else None
    explicit = {r.decorated for r in sys.rules}
    for r in extra_rules:
        if r.decorated in explicit or (fam and fam.rule_for(r.lhs) is not None):
            raise RewriteError(f"extra rule {r} overlaps a system left-hand side")
        if any(a in (T, TI) for a in r.lhs + r.rhs):
            raise RewriteError(f"extra rule {r} is not over group generators")
    merged = sys.with_rules(tuple(sys.rules) + tuple(extra_rules))
    o = spec.oracle
    length = spec.length or (lambda e: _ball_length(sys, e))
    base = len(sys.rules)
    bad, fired, checked = [], 0, 0
    for w in samples:
        v = o.evaluate(w)
        if length(v) >= N:
            continue
        checked += 1
        h = reduce_traced(merged, w)
        fired += sum(1 for s in h.steps if s.index is not None and s.index >= base)
        r = h.final
        if any(a in (T, TI) for a in r) or len(r) != length(v) or o.evaluate(r) != v:
            bad.append({"input": format_word(w), "reduced": format_word(r)})
    return {"checked": checked, "non_geodesic": bad, "extra_fired": fired,
            "ok": not bad and fired == 0}
