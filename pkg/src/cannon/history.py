"""Diagrams of reduction histories, splitting paths, splicing, and the
breaker search.

A diagram draws ``w_0`` as unit cells and each later word below the
previous one.  Cells under a substitution line share its span; an empty
rhs leaves a black cell (``letter is None``).  Subword boundaries are fixed
columns; letters within ``W - 1`` places of one are border letters and
carry no generation.

Splitting paths are handled combinatorially: in every row a segment sits
at a split index of that row's word.  Two segments meet either in a shared
row (joined end to end) or across the substitution line between their rows
(a link, recorded in the details).

>>> from cannon.rewrite import free_group_system, reduce_traced
>>> d = build_diagram(reduce_traced(free_group_system("a"), ("a", "A", "a")), W=2)
>>> [c.width for c in d.rows[1]]
[Fraction(2, 1), Fraction(1, 1)]
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .groups import GroupOracle, f2xz_oracle
from .rewrite import (INCREMENTAL, ReductionHistory, Rule, RewriteError, RewritingSystem, Step,
                      accepts, inverse_name, reduce_traced)

LEFT, RIGHT = "left", "right"


class HistoryError(RewriteError):
    pass


# ---------------------------------------------------------------- deletion conventions

@dataclass
class DeletionConvention:
    """Which lhs letter each rhs letter replaces.  Default: rhs position j
    maps to lhs position j, so the trailing lhs letters are deleted."""
    maps: dict = field(default_factory=dict)  # Rule -> tuple of lhs positions

    def __call__(self, r: Rule) -> tuple:
        m = self.maps.get(r)
        if m is None:
            return tuple(range(len(r.rhs)))
        return m

    def check(self, r: Rule) -> None:
        m = self(r)
        if len(m) != len(r.rhs):
            raise HistoryError(f"convention for {r} must map every rhs letter")
        if any(not 0 <= x < len(r.lhs) for x in m) or any(b <= a for a, b in zip(m, m[1:])):
            raise HistoryError(f"convention for {r} is not order-preserving and injective")


# ---------------------------------------------------------------- diagrams

@dataclass
class Cell:
    letter: Optional[str]
    left: Fraction
    right: Fraction
    subword: int
    generation: Optional[int] = None
    border: bool = False

    @property
    def width(self) -> Fraction:
        return self.right - self.left


@dataclass
class Line:
    row: int  # the line sits between rows row-1 and row
    left: Fraction
    right: Fraction
    step: Step


@dataclass
class Diagram:
    history: ReductionHistory
    W: int
    boundaries: tuple
    rows: list
    lines: list
    anomalies: list

    def letters(self, i) -> list:
        return [c for c in self.rows[i] if c.letter is not None]

    def word(self, i) -> tuple:
        return tuple(c.letter for c in self.letters(i))

    @property
    def total(self) -> int:
        return len(self.history.words[0])

    def subword(self, i, k) -> tuple:
        return tuple(c.letter for c in self.letters(i) if c.subword == k)

    def subword_start(self, i, k) -> int:
        return sum(1 for c in self.letters(i) if c.subword < k)


def _mark_border(cells, n_bounds, W):
    """Set border flags on a row of letter cells in place."""
    if W <= 1 or n_bounds == 0:
        for c in cells:
            c.border = False
        return
    pos = []
    for k in range(n_bounds):
        pos.append(sum(1 for c in cells if c.subword <= k))
    for j, c in enumerate(cells):
        c.border = any(p - (W - 1) <= j < p + (W - 1) for p in pos)


def _fill_even(letters, left, right, sub):
    if not letters:
        return [Cell(None, left, right, sub)]
    w = (right - left) / len(letters)
    return [Cell(a, left + i * w, left + (i + 1) * w, sub) for i, a in enumerate(letters)]


def build_diagram(history: ReductionHistory, boundaries: Sequence[int] = (), conv: Optional[DeletionConvention] = None,
                  W: Optional[int] = None, upto: Optional[int] = None) -> Diagram:
    """Diagram of ``history`` (rows 0..upto) with fixed subword boundaries."""
    conv = conv or DeletionConvention()
    steps = history.steps if upto is None else history.steps[:upto]
    words = history.words[:len(steps) + 1]
    if W is None:
        W = max((len(s.rule.lhs) for s in steps), default=1)
    n = len(words[0])
    bounds = tuple(sorted(boundaries))
    if any(not 0 <= b <= n for b in bounds):
        raise HistoryError(f"boundaries must lie in [0, {n}]")
    bcols = [Fraction(b) for b in bounds]
    row = [Cell(a, Fraction(j), Fraction(j + 1), sum(1 for b in bounds if b <= j)) for j, a in enumerate(words[0])]
    _mark_border(row, len(bounds), W)
    for c in row:
        c.generation = None if c.border else 0
    rows, lines, anomalies = [row], [], []
    for i, st in enumerate(steps, start=1):
        prev = rows[-1]
        lets = [k for k, c in enumerate(prev) if c.letter is not None]
        u, v = st.rule.lhs, st.rule.rhs
        s = st.start
        first, last = lets[s], lets[s + len(u) - 1]
        L, R = prev[first].left, prev[last].right
        lhs_cells = [prev[k] for k in lets[s:s + len(u)]]
        if tuple(c.letter for c in lhs_cells) != u:
            raise HistoryError(f"step {i} does not match the word")
        conv.check(st.rule)
        m = conv(st.rule)
        subs = [lhs_cells[x].subword for x in m]
        new_letters = [Cell(a, L, R, sb) for a, sb in zip(v, subs)]
        # border flags of the new row decide the width rule
        trial = [Cell(c.letter, c.left, c.right, c.subword) for c in prev[:first] if c.letter is not None]
        trial += new_letters
        trial += [Cell(c.letter, c.left, c.right, c.subword) for c in prev[last + 1:] if c.letter is not None]
        _mark_border(trial, len(bounds), W)
        before = sum(1 for c in prev[:first] if c.letter is not None)
        rhs_border = [trial[before + j].border for j in range(len(v))]
        cuts = [b for b in bcols if L < b < R]
        edges = [L] + cuts + [R]
        mid = []
        for a_, b_ in zip(edges, edges[1:]):
            if a_ == b_:
                continue
            sub = sum(1 for b in bcols if b <= a_)
            part = [j for j in range(len(v)) if subs[j] == sub]
            lpart = [c for c in lhs_cells if c.subword == sub]
            if cuts or not part or all(rhs_border[j] for j in part) or not any(rhs_border[j] for j in part):
                mid += [Cell(c.letter, c.left, c.right, sub) for c in _fill_even([v[j] for j in part], a_, b_, sub)]
                continue
            kL = _lead(rhs_border, part)
            kR = _lead(rhs_border, part[::-1])
            lL = _lead([c.border for c in lpart], range(len(lpart)))
            lR = _lead([c.border for c in lpart], range(len(lpart) - 1, -1, -1))
            if kL != lL or kR != lR or kL + kR >= len(part):
                anomalies.append((i, "border counts differ between lhs and rhs"))
                mid += _fill_even([v[j] for j in part], a_, b_, sub)
                continue
            x = a_
            cells = []
            for c in lpart[:kL]:
                cells.append(Cell(v[part[len(cells)]], x, x + c.width, sub))
                x += c.width
            y = b_
            tail = []
            for c in lpart[len(lpart) - kR:][::-1]:
                tail.append(Cell(v[part[len(part) - 1 - len(tail)]], y - c.width, y, sub))
                y -= c.width
            middle = [v[j] for j in part[kL:len(part) - kR]]
            mid += cells + _fill_even(middle, x, y, sub) + tail[::-1]
        newrow = [Cell(c.letter, c.left, c.right, c.subword, c.generation) for c in prev[:first]]
        newrow += mid
        newrow += [Cell(c.letter, c.left, c.right, c.subword, c.generation) for c in prev[last + 1:]]
        letter_cells = [c for c in newrow if c.letter is not None]
        _mark_border(letter_cells, len(bounds), W)
        gens = [c.generation for c in lhs_cells if not c.border and c.generation is not None]
        rhs_ids = {id(c) for c in mid}
        for c in letter_cells:
            if c.border:
                c.generation = None
            elif id(c) in rhs_ids:
                if not gens:
                    anomalies.append((i, "non-border rhs letter under an all-border lhs"))
                    c.generation = None
                else:
                    c.generation = 1 + min(gens)
        rows.append(newrow)
        lines.append(Line(i, L, R, st))
    return Diagram(ReductionHistory(list(words), list(steps)), W, bounds, rows, lines, anomalies)


def _lead(flags, order):
    k = 0
    for j in order:
        if not flags[j]:
            break
        k += 1
    return k


@dataclass
class WidthReport:
    violations: list
    max_generation: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_width_lemmas(d: Diagram) -> WidthReport:
    """Width conservation, the rhs expansion factor W/(W-1), and the
    generation lower bound (W/(W-1))**g, all in exact arithmetic."""
    bad, W, n = [], d.W, d.total
    gmax = 0
    for i, row in enumerate(d.rows):
        tot = sum((c.width for c in row), Fraction(0))
        if row and tot != n:
            bad.append((i, None, f"row width {tot} != {n}"))
        for j, c in enumerate(row):
            if c.width <= 0:
                bad.append((i, j, "non-positive width"))
            if c.letter is not None and not c.border and c.generation is not None:
                gmax = max(gmax, c.generation)
                if W > 1 and c.width < Fraction(W, W - 1) ** c.generation:
                    bad.append((i, j, f"generation {c.generation} letter has width {c.width}"))
    if W > 1:
        for ln in d.lines:
            prev, cur = d.rows[ln.row - 1], d.rows[ln.row]
            lhs = [c for c in prev if c.letter is not None and c.left >= ln.left and c.right <= ln.right]
            rhs = [c for c in cur if c.letter is not None and c.left >= ln.left and c.right <= ln.right]
            nb = [c.width for c in lhs if not c.border]
            for c in rhs:
                if not c.border and nb and c.width < Fraction(W, W - 1) * min(nb):
                    bad.append((ln.row, None, f"rhs letter {c.letter} width {c.width} below bound"))
    return WidthReport(bad, gmax)


def generation_bound_holds(d: Diagram) -> bool:
    """Every non-border letter has (W/(W-1))**g <= l(w_0)."""
    if d.W <= 1:
        return True
    q = Fraction(d.W, d.W - 1)
    return all(q ** c.generation <= d.total for row in d.rows for c in row
               if c.letter is not None and c.generation is not None)


# ---------------------------------------------------------------- splitting paths

@dataclass(frozen=True)
class Segment:
    first: int
    last: int
    splits: tuple  # split index in each row first..last
    side: str


@dataclass(frozen=True)
class SplittingPath:
    segments: tuple
    links: tuple  # per junction: None (shared row) or (lhs, lhs_split, rhs_split)

    def __len__(self):
        return len(self.segments)

    @property
    def start(self) -> int:
        return self.segments[0].splits[0]

    @property
    def end(self) -> int:
        return self.segments[-1].splits[-1]


def _step_span(d: Diagram, i: int):
    st = d.history.steps[i]
    return st.start, len(st.rule.lhs), len(st.rule.rhs)


def _line_side(d, i, k):
    """Side of the line between rows i and i+1 relative to split k of row i,
    or None if the split cuts it."""
    s, lu, _ = _step_span(d, i)
    if k >= s + lu:
        return LEFT
    if k <= s:
        return RIGHT
    return None


def _map_split(d, i, k):
    s, lu, lv = _step_span(d, i)
    return k if k <= s else k - lu + lv


def validate_path(d: Diagram, p: SplittingPath) -> list:
    errs = []
    segs = p.segments
    t = len(d.rows) - 1
    if not segs or segs[0].first != 0 or segs[-1].last != t:
        errs.append("path must run from the top row to the bottom row")
    for m, sg in enumerate(segs):
        if len(sg.splits) != sg.last - sg.first + 1:
            errs.append(f"segment {m}: wrong number of splits")
            continue
        for r, k in zip(range(sg.first, sg.last + 1), sg.splits):
            if not 0 <= k <= len(d.history.words[r]):
                errs.append(f"segment {m}: split {k} outside row {r}")
        sides = set()
        for r in range(sg.first, sg.last):
            k = sg.splits[r - sg.first]
            side = _line_side(d, r, k)
            if side is None:
                errs.append(f"segment {m} cuts the substitution line below row {r}")
                continue
            sides.add(side)
            if _map_split(d, r, k) != sg.splits[r - sg.first + 1]:
                errs.append(f"segment {m} is not vertical below row {r}")
        if len(sides) > 1:
            errs.append(f"segment {m} has substitution lines on both sides")
        elif sides and sg.side not in sides:
            errs.append(f"segment {m} declared {sg.side} but lines lie {sides.pop()}")
    for m, (a, b) in enumerate(zip(segs, segs[1:])):
        link = p.links[m]
        if link is None:
            if b.first != a.last or b.splits[0] != a.splits[-1]:
                errs.append(f"junction {m}: segments do not join end to end")
        else:
            if b.first != a.last + 1:
                errs.append(f"junction {m}: link must cross one substitution line")
                continue
            s, lu, lv = _step_span(d, a.last)
            ka, kb = a.splits[-1], b.splits[0]
            if not (s <= ka <= s + lu and s <= kb <= s + lv):
                errs.append(f"junction {m}: link does not meet the substitution line")
            elif link != (d.history.steps[a.last].rule.lhs, ka - s, kb - s):
                errs.append(f"junction {m}: recorded link differs")
    return errs


def path_details(d: Diagram, p: SplittingPath) -> tuple:
    """Per segment: (side, context) or (side, context, lhs, lhs split, rhs split)."""
    out = []
    W = d.W
    for m, sg in enumerate(p.segments):
        w = d.history.words[sg.first]
        k = sg.splits[0]
        ctx = tuple(w[k:k + W - 1]) if sg.side == LEFT else tuple(w[max(0, k - W + 1):k])
        item = (sg.side, ctx)
        if m < len(p.links) and p.links[m] is not None:
            item = item + p.links[m]
        out.append(item)
    return tuple(out)


def _sided_segments(d, first, splits):
    """Split one vertical run into segments with one-sided lines."""
    segs = []
    start, side = 0, None
    for r in range(first, first + len(splits) - 1):
        sd = _line_side(d, r, splits[r - first])
        if side is None:
            side = sd
        elif sd != side:
            cut = r - first
            segs.append(Segment(first + start, first + cut, tuple(splits[start:cut + 1]), side))
            start, side = cut, sd
    segs.append(Segment(first + start, first + len(splits) - 1, tuple(splits[start:]), side or LEFT))
    return segs


@dataclass
class PathDetails:
    path: SplittingPath
    details: tuple
    generation: int
    target: int
    side: str
    endpoint_touches: int = 0  # rows where the path meets a line endpoint without jumping

    @property
    def length(self) -> int:
        return len(self.path)


def extract_splitting_path(d: Diagram, target: int, end_side: str = LEFT) -> PathDetails:
    """Follow the target letter up the diagram, jumping at each substitution
    line to the least-generation non-border lhs letter (leftmost on ties),
    then split runs whose lines lie on both sides."""
    t = len(d.rows) - 1
    bottom = d.letters(t)
    if not 0 <= target < len(bottom):
        raise HistoryError("target letter out of range")
    cell = bottom[target]
    if cell.border or cell.generation is None:
        raise HistoryError("target must be a non-border letter")
    off = 0 if end_side == LEFT else 1
    g = cell.generation
    runs = []  # (first row, splits top-down) built bottom-up
    links = []
    cur, followed = [target + off], target
    touches = 0
    for i in range(t, 0, -1):
        s, lu, lv = _step_span(d, i - 1)
        if s <= followed < s + lv:
            above = d.letters(i - 1)
            cand = [j for j in range(s, s + lu) if not above[j].border and above[j].generation is not None]
            if not cand:
                raise HistoryError("no non-border letter above a non-border rhs letter")
            jn = min(cand, key=lambda j: (above[j].generation, j))
            runs.append((i, cur[::-1]))
            links.append((d.history.steps[i - 1].rule.lhs, jn + off - s, cur[-1] - s))
            followed = jn
            cur = [jn + off]
        else:
            touches += cur[-1] in (s, s + lv)
            followed = followed if followed < s else followed + lu - lv
            cur.append(followed + off)
    runs.append((0, cur[::-1]))
    runs.reverse()
    links.reverse()
    segs, joins = [], []
    for m, (first, splits) in enumerate(runs):
        parts = _sided_segments(d, first, splits)
        segs += parts
        joins += [None] * (len(parts) - 1)
        if m < len(links):
            joins.append(links[m])
    path = SplittingPath(tuple(segs), tuple(joins))
    return PathDetails(path, path_details(d, path), g, target, end_side, touches)


def class_count_bound(alphabet_size: int, W: int, n: int) -> int:
    """Bound on equivalence classes of splitting paths of length <= n."""
    if min(alphabet_size, W) < 1 or n < 0:
        raise HistoryError("arguments must be positive")
    return (2 * (W + 1) ** 2 * alphabet_size ** (2 * W + 1)) ** (n + 1)


# ---------------------------------------------------------------- splicing

@dataclass
class Splice:
    start: tuple
    predicted: tuple
    sequence: list  # words the spliced history must pass through, in order

    def verify(self, sys: RewritingSystem) -> bool:
        h = reduce_traced(sys, self.start)
        return h.words[:len(self.sequence)] == self.sequence


def splice(dv: Diagram, pv: SplittingPath, dw: Diagram, pw: SplittingPath) -> Splice:
    """Glue the part of ``dv`` left of ``pv`` to the part of ``dw`` right of
    ``pw``.  The result lists every word of the spliced history up to the
    predicted end ``v_r^- w_s^+``: left segments take their steps from
    ``dv``, right segments from ``dw``, links substitute on both sides."""
    if path_details(dv, pv) != path_details(dw, pw):
        raise HistoryError("splitting paths are not equivalent (details differ)")
    V, Wd = dv.history.words, dw.history.words

    def glue(rv, kv, rw, kw):
        return tuple(V[rv][:kv]) + tuple(Wd[rw][kw:])

    seq = []

    def push(x):
        if not seq or seq[-1] != x:
            seq.append(x)

    for m, (a, b) in enumerate(zip(pv.segments, pw.segments)):
        if a.side == LEFT:
            for r, k in zip(range(a.first, a.last + 1), a.splits):
                push(glue(r, k, b.first, b.splits[0]))
        else:
            for r, k in zip(range(b.first, b.last + 1), b.splits):
                push(glue(a.first, a.splits[0], r, k))
        if m < len(pv.links):
            if pv.links[m] is None:
                # end to end: the next segment starts from the current row of each side
                pass
            else:
                na, nb = pv.segments[m + 1], pw.segments[m + 1]
                push(glue(na.first, na.splits[0], nb.first, nb.splits[0]))
    a, b = pv.segments[-1], pw.segments[-1]
    predicted = glue(a.last, a.splits[-1], b.last, b.splits[-1])
    push(predicted)
    return Splice(seq[0], predicted, seq)


# ---------------------------------------------------------------- rendering

def render_ascii(d: Diagram, scale: int = 4) -> str:
    lines = []
    total = d.total * scale
    for i, row in enumerate(d.rows):
        if i:
            ln = d.lines[i - 1]
            a, b = round(ln.left * scale), round(ln.right * scale)
            lines.append(" " * a + "-" * max(1, b - a))
        out = []
        for c in row:
            a, b = round(c.left * scale), round(c.right * scale)
            w = max(1, b - a)
            txt = "#" * w if c.letter is None else c.letter[:w].center(w)
            out.append(txt)
        s = "".join(out)
        chars = list(s.ljust(total))
        for bcol in d.boundaries:
            x = bcol * scale
            if 0 < x < len(chars) and chars[x] == " ":
                chars[x] = "|"
        lines.append("".join(chars).rstrip())
    return "\n".join(lines)


def render_svg(d: Diagram, scale: int = 40, height: int = 28) -> str:
    W_px = d.total * scale
    H_px = len(d.rows) * height
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W_px}" height="{H_px}">']
    for i, row in enumerate(d.rows):
        y = i * height
        for c in row:
            x, w = float(c.left * scale), float(c.width * scale)
            fill = "black" if c.letter is None else ("#ddd" if c.border else "white")
            parts.append(f'<rect x="{x:.3f}" y="{y}" width="{w:.3f}" height="{height}" fill="{fill}" stroke="gray"/>')
            if c.letter is not None:
                lab = c.letter if c.generation is None else f"{c.letter}:{c.generation}"
                parts.append(f'<text x="{x + w / 2:.3f}" y="{y + height * 0.7:.1f}" font-size="12" '
                             f'text-anchor="middle">{_xml(lab)}</text>')
    for ln in d.lines:
        y = ln.row * height
        parts.append(f'<line x1="{float(ln.left * scale):.3f}" y1="{y}" x2="{float(ln.right * scale):.3f}" '
                     f'y2="{y}" stroke="red" stroke-width="2"/>')
    for b in d.boundaries:
        parts.append(f'<line x1="{b * scale}" y1="0" x2="{b * scale}" y2="{H_px}" stroke="blue"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def _xml(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# ---------------------------------------------------------------- breaker search

def naive_f2xz_candidate(kmax: int = 4) -> RewritingSystem:
    """A plausible but finite candidate for F_2 x Z: free cancellation in
    both factors plus ``x z^k X -> z^k`` for central powers up to ``kmax``.
    Every rule is a true relation, so the candidate can only fail by
    rejecting trivial words."""
    free = ["a", "A", "b", "B"]
    cen = ["z", "Z"]
    rules = [Rule((x, inverse_name(x)), ()) for x in free + cen]
    for x in free:
        for c in cen:
            for k in range(1, kmax + 1):
                rules.append(Rule((x,) + (c,) * k + (inverse_name(x),), (c,) * k))
    return RewritingSystem(INCREMENTAL, tuple(free + cen), tuple(free + cen), tuple(rules),
                           name=f"naive-f2xz(k<={kmax})")


def f2xz_test_sets(n1: int, n2: int) -> tuple:
    """T1: reduced words of length n1 in a, b (exponentially many).
    T2: words of length exactly n2 for z^j, padded with ``z Z``."""
    inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
    T1 = [()]
    for _ in range(n1):
        T1 = [w + (x,) for w in T1 for x in "aAbB" if not w or inv[w[-1]] != x]
    T2 = []
    for j in range(-n2, n2 + 1):
        if (n2 - abs(j)) % 2:
            continue
        c = "z" if j >= 0 else "Z"
        T2.append((c,) * abs(j) + ("z", "Z") * ((n2 - abs(j)) // 2))
    return T1, T2


@dataclass
class BreakerReport:
    verdict: str  # "breaker" | "rejected-commutator" | "exhausted" | "budget"
    witness: Optional[tuple] = None
    pairs: int = 0
    accepted_pairs: int = 0
    rejected_pairs: int = 0
    buckets: int = 0
    collisions: int = 0
    splices_verified: int = 0
    case_counts: dict = field(default_factory=dict)
    transcript: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = dict(self.__dict__)
        d["witness"] = ".".join(self.witness) if self.witness is not None else None
        return json.dumps(d, indent=1, sort_keys=True)


def _path_in_subword(d: Diagram, k: int):
    """Positioned splitting path ending beside the first non-border letter
    of subword k in the last row; None if there is none."""
    t = len(d.rows) - 1
    cells = d.letters(t)
    base = d.subword_start(t, k)
    for j, c in enumerate(cells):
        if c.subword == k and not c.border and c.generation is not None:
            pd = extract_splitting_path(d, j, LEFT)
            start0 = d.subword_start(0, k)
            return pd, pd.path.start - start0, pd.path.end - base
    return None


def find_breaker(sys: RewritingSystem, oracle: GroupOracle, T1: Sequence, T2: Sequence,
                 budget: int = 10 ** 5, conv: Optional[DeletionConvention] = None) -> BreakerReport:
    """Run the commutator argument against a candidate system.

    For each pair (u, v) the commutator ``u v u^-1 v^-1`` is reduced with
    subword boundaries between its four parts, stopped at the first time
    both middle parts are shorter than 3W, and a positioned splitting path
    is taken through the longer middle part.  Pairs with equal path class
    and equal remaining parts are spliced; a spliced word that is nontrivial
    yet accepted is a breaker.  Any returned witness is re-checked here.
    """
    T1, T2 = [tuple(u) for u in T1], [tuple(v) for v in T2]
    for u in T1:
        for v in T2:
            if not oracle.equal(u + v, v + u):
                raise HistoryError(f"{'.'.join(u)} and {'.'.join(v)} do not commute")
    W = sys.window
    rep = BreakerReport("exhausted")
    buckets = defaultdict(list)
    rejected = None
    for u in T1:
        for v in T2:
            if rep.pairs >= budget:
                rep.verdict = "budget"
                break
            rep.pairs += 1
            x, y = oracle.inverse_word(u), oracle.inverse_word(v)
            w = u + v + x + y
            h = reduce_traced(sys, w)
            if h.final != ():
                rep.rejected_pairs += 1
                if rejected is None:
                    rejected = w
                continue
            rep.accepted_pairs += 1
            bnd = (len(u), len(u) + len(v), len(u) + len(v) + len(x))
            d = build_diagram(h, bnd, conv, W=W)
            t = next(i for i in range(len(d.rows)) if max(len(d.subword(i, 1)), len(d.subword(i, 2))) < 3 * W)
            d = build_diagram(h, bnd, conv, W=W, upto=t)
            lv, lx = len(d.subword(t, 1)), len(d.subword(t, 2))
            case = "v" if lv >= lx else "x"
            rep.case_counts[case] = rep.case_counts.get(case, 0) + 1
            found = _path_in_subword(d, 1 if case == "v" else 2)
            if found is None:
                continue
            pd, s0, e0 = found
            if case == "v":
                rest = d.subword(t, 1) + d.subword(t, 2) + d.subword(t, 3)
                key = ("v", v, pd.details, s0, e0, rest)
                item = u
            else:
                rest = d.subword(t, 0) + d.subword(t, 1) + d.subword(t, 2)
                key = ("x", u, pd.details, s0, e0, rest)
                item = v
            buckets[key].append((item, d, pd.path))
        else:
            continue
        break
    rep.buckets = len(buckets)
    for key, items in buckets.items():
        if len(items) < 2:
            continue
        rep.collisions += 1
        (i1, d1, p1), (i2, d2, p2) = items[0], items[1]
        sp = splice(d1, p1, d2, p2)
        ok = sp.verify(sys)
        rep.splices_verified += ok
        rep.transcript.append({"case": key[0], "spliced": ".".join(sp.start), "predicted": ".".join(sp.predicted),
                               "verified": ok})
        if ok and not oracle.is_identity(sp.start) and accepts(sys, sp.start):
            rep.verdict, rep.witness = "breaker", sp.start
            break
    if rep.verdict != "breaker" and rejected is not None:
        rep.verdict, rep.witness = "rejected-commutator", rejected
    w = rep.witness
    if w is not None:
        rep.checks = {"oracle_trivial": oracle.is_identity(w), "accepted": accepts(sys, w)}
        if rep.verdict == "breaker":
            assert not rep.checks["oracle_trivial"] and rep.checks["accepted"]
        else:
            assert rep.checks["oracle_trivial"] and not rep.checks["accepted"]
    return rep
