"""Ground-truth group oracles and word-metric utilities.

Every oracle evaluates words over its generator letters to canonical,
hashable elements, so equal group elements compare equal.

>>> Z = IntegerOracle()
>>> Z.evaluate(("1", "1", "-1"))
1
>>> H = HeisenbergOracle()
>>> H.evaluate(("x", "y", "X", "Y")) == H.evaluate(("z",))
True
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence


class OracleError(Exception):
    pass


class GroupOracle:
    """Behavioral interface.  Subclasses set ``gens`` and ``inv`` and
    implement ``identity``, ``gen`` and ``mul``."""

    name = "group"
    gens: tuple = ()
    inv: dict = {}

    identity = None

    def gen(self, a):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def inverse_word(self, w: Sequence[str]) -> tuple:
        return tuple(self.inv[a] for a in reversed(w))

    def evaluate(self, w: Sequence[str]):
        e = self.identity
        for a in w:
            if a not in self.inv:
                raise OracleError(f"unknown generator {a!r}")
            e = self.mul(e, self.gen(a))
        return e

    def is_identity(self, w: Sequence[str]) -> bool:
        return self.evaluate(w) == self.identity

    def equal(self, u: Sequence[str], v: Sequence[str]) -> bool:
        return self.evaluate(u) == self.evaluate(v)


class IntegerOracle(GroupOracle):
    name = "z"

    def __init__(self, one: str = "1", minus: str = "-1"):
        self.gens = (one, minus)
        self.inv = {one: minus, minus: one}
        self._val = {one: 1, minus: -1}
        self.identity = 0

    def gen(self, a):
        return self._val[a]

    def mul(self, x, y):
        return x + y


class FreeGroupOracle(GroupOracle):
    """Elements are freely reduced tuples of letters."""
    name = "free"

    def __init__(self, gens: Sequence[str] = ("a", "b")):
        letters = []
        self.inv = {}
        for g in gens:
            G = g.upper() if g != g.upper() else g.lower()
            letters += [g, G]
            self.inv[g], self.inv[G] = G, g
        self.gens = tuple(letters)
        self.identity = ()

    def gen(self, a):
        return (a,)

    def mul(self, x, y):
        x = list(x)
        i = 0
        while i < len(y) and x and x[-1] == self.inv[y[i]]:
            x.pop()
            i += 1
        return tuple(x) + tuple(y[i:])


class UnitriangularOracle(GroupOracle):
    """U_n(Z): upper unitriangular integer matrices, stored as the tuple of
    entries above the diagonal in row-major order.  Python ints never overflow.

    Generators are elementary matrices ``e{i}{j}`` (1-based) with inverses
    ``E{i}{j}``; by default only the superdiagonal ones.
    """
    name = "unitriangular"

    def __init__(self, n: int = 3, names: Optional[dict] = None, all_elementary: bool = False):
        self.n = n
        self.pos = [(i, j) for i in range(n) for j in range(i + 1, n)]
        self.index = {p: k for k, p in enumerate(self.pos)}
        if names is None:
            pairs = [(i, j) for (i, j) in self.pos if all_elementary or j == i + 1]
            names = {(i, j): (f"e{i + 1}{j + 1}", f"E{i + 1}{j + 1}") for (i, j) in pairs}
        self.names = names
        self.inv, self._val, letters = {}, {}, []
        for (i, j), (a, A) in names.items():
            letters += [a, A]
            self.inv[a], self.inv[A] = A, a
            v = [0] * len(self.pos)
            v[self.index[(i, j)]] = 1
            self._val[a] = tuple(v)
            v[self.index[(i, j)]] = -1
            self._val[A] = tuple(v)
        self.gens = tuple(letters)
        self.identity = (0,) * len(self.pos)
        # product terms: C_ik = A_ik + B_ik + sum_j A_ij B_jk
        self._terms = [[(self.index[(i, j)], self.index[(j, k)]) for j in range(i + 1, k)]
                       for (i, k) in self.pos]

    def gen(self, a):
        return self._val[a]

    def mul(self, x, y):
        return tuple(x[p] + y[p] + sum(x[a] * y[b] for a, b in terms)
                     for p, terms in enumerate(self._terms))

    def matrix(self, e) -> list:
        m = [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        for (i, j), k in self.index.items():
            m[i][j] = e[k]
        return m


class HeisenbergOracle(UnitriangularOracle):
    """U_3(Z) with x = E12, y = E23 and optionally the central z = E13.

    Elements are ``(a, c, b)`` = entries (1,2), (1,3), (2,3), so that
    ``[x, y] = x y X Y = z``.
    """
    name = "heisenberg"

    def __init__(self, with_z: bool = False):
        names = {(0, 1): ("x", "X"), (1, 2): ("y", "Y")}
        if with_z:
            names[(0, 2)] = ("z", "Z")
        super().__init__(3, names)
        if not with_z:
            # z is still evaluable for convenience, but not a generator
            self._val["z"], self._val["Z"] = (0, 1, 0), (0, -1, 0)
            self.inv = dict(self.inv, z="Z", Z="z")

    def mul(self, x, y):
        return (x[0] + y[0], x[1] + y[1] + x[0] * y[2], x[2] + y[2])


class DihedralOracle(GroupOracle):
    """Infinite dihedral group acting on Z: an element ``(s, k)`` is the map
    ``x -> s*x + k``; words act left to right as products of maps."""
    name = "dihedral-inf"

    def __init__(self):
        self.gens = ("r", "R", "s")
        self.inv = {"r": "R", "R": "r", "s": "s"}
        self._val = {"r": (1, 1), "R": (1, -1), "s": (-1, 0)}
        self.identity = (1, 0)

    def gen(self, a):
        return self._val[a]

    def mul(self, x, y):
        # as matrices [[s, k], [0, 1]]: (s1, k1)(s2, k2) = (s1 s2, s1 k2 + k1)
        return (x[0] * y[0], x[0] * y[1] + x[1])


class DirectProductOracle(GroupOracle):
    def __init__(self, *factors: GroupOracle):
        self.factors = factors
        self.inv, self._where = {}, {}
        letters = []
        for i, f in enumerate(factors):
            for a in f.gens:
                if a in self._where:
                    raise OracleError(f"generator {a!r} shared between factors")
                self._where[a] = i
                letters.append(a)
            self.inv.update({a: f.inv[a] for a in f.gens})
        self.gens = tuple(letters)
        self.identity = tuple(f.identity for f in factors)
        self.name = "x".join(f.name for f in factors)

    def gen(self, a):
        i = self._where[a]
        return tuple(f.gen(a) if k == i else f.identity for k, f in enumerate(self.factors))

    def mul(self, x, y):
        return tuple(f.mul(p, q) for f, p, q in zip(self.factors, x, y))


class FreeProductOracle(GroupOracle):
    """Free product via normal forms: tuples of ``(factor, element)`` syllables
    with alternating factors and nontrivial elements."""

    def __init__(self, *factors: GroupOracle):
        self.factors = factors
        self.inv, self._where = {}, {}
        letters = []
        for i, f in enumerate(factors):
            for a in f.gens:
                if a in self._where:
                    raise OracleError(f"generator {a!r} shared between factors")
                self._where[a] = i
                letters.append(a)
            self.inv.update({a: f.inv[a] for a in f.gens})
        self.gens = tuple(letters)
        self.identity = ()
        self.name = "*".join(f.name for f in factors)

    def gen(self, a):
        i = self._where[a]
        return ((i, self.factors[i].gen(a)),)

    def mul(self, x, y):
        out = list(x)
        for (i, e) in y:
            if out and out[-1][0] == i:
                p = self.factors[i].mul(out[-1][1], e)
                out.pop()
                if p != self.factors[i].identity:
                    out.append((i, p))
            else:
                out.append((i, e))
        return tuple(out)


def f2xz_oracle() -> DirectProductOracle:
    """F_2 x Z with generators a, A, b, B (free factor) and z, Z (centre)."""
    return DirectProductOracle(FreeGroupOracle(("a", "b")), IntegerOracle("z", "Z"))


def oracle_by_name(name: str, **params) -> GroupOracle:
    table = {
        "z": IntegerOracle,
        "free": lambda: FreeGroupOracle(params.get("gens", ("a", "b"))),
        "f2": lambda: FreeGroupOracle(("a", "b")),
        "heisenberg": lambda: HeisenbergOracle(params.get("with_z", False)),
        "u4": lambda: UnitriangularOracle(4),
        "dihedral-inf": DihedralOracle,
        "f2xz": f2xz_oracle,
    }
    if name not in table:
        raise OracleError(f"unknown group {name!r}; choose from {sorted(table)}")
    return table[name]()


# ---------------------------------------------------------------- word metric

@dataclass
class BallTable:
    """Exact BFS ball: geodesic length and lex-least geodesic per element."""
    radius: int
    length: dict
    geodesic: dict
    spheres: list  # spheres[k] = elements at distance k, sorted by geodesic

    def __contains__(self, e):
        return e in self.length

    def __len__(self):
        return len(self.length)

    def is_geodesic(self, oracle: GroupOracle, w: Sequence[str]) -> bool:
        e = oracle.evaluate(w)
        if e not in self.length:
            if len(w) <= self.radius:
                raise OracleError("ball inconsistent with oracle")
            raise OracleError(f"word longer than ball radius {self.radius}")
        return self.length[e] == len(w)


def ball(oracle: GroupOracle, r: int, budget: int = 10 ** 7) -> BallTable:
    """Breadth-first ball of radius ``r``.

    The canonical geodesic of an element is the lexicographically least
    shortest word, letters ordered as in ``oracle.gens``.  Processing each
    sphere in the order of its canonical words and trying generators in order
    assigns every new element its least word first.
    """
    gens = oracle.gens
    vals = [oracle.gen(a) for a in gens]
    e0 = oracle.identity
    length, geo = {e0: 0}, {e0: ()}
    spheres = [[e0]]
    for k in range(1, r + 1):
        nxt = []
        for e in spheres[-1]:
            w = geo[e]
            for a, v in zip(gens, vals):
                f = oracle.mul(e, v)
                if f not in length:
                    length[f] = k
                    geo[f] = w + (a,)
                    nxt.append(f)
        if len(length) > budget:
            raise OracleError(f"ball of radius {k} exceeds element budget {budget}")
        spheres.append(nxt)
    return BallTable(r, length, geo, spheres)


def coset_decompose(oracle: GroupOracle, elt, in_image: Callable, preimage: Callable,
                    table: BallTable, max_len: int) -> tuple:
    """Split ``elt = phi(g') g''`` with ``g''`` a shortest word such that
    ``elt * g''^-1`` lies in the image (nearest coset element, lex-least), and
    ``g'`` the canonical geodesic of the preimage.

    >>> Z = IntegerOracle(); t = ball(Z, 60)
    >>> coset_decompose(Z, 7, lambda n: n % 10 == 0, lambda n: n // 10, t, 5)
    (('1',), ('-1', '-1', '-1'))
    """
    inv_vals = {}
    for k in range(min(max_len, table.radius) + 1):
        for h in table.spheres[k]:
            hw = table.geodesic[h]
            hinv = inv_vals.get(h)
            if hinv is None:
                hinv = oracle.evaluate(oracle.inverse_word(hw))
            q = oracle.mul(elt, hinv)
            if in_image(q):
                p = preimage(q)
                if p not in table.geodesic:
                    raise OracleError("preimage outside the ball; enlarge the radius")
                return table.geodesic[p], hw
    raise OracleError(f"no decomposition within distance {max_len}; K too small")
