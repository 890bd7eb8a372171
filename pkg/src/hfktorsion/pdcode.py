"""Oriented planar-diagram (PD) codes for knots.

Convention
----------
A crossing ``X a b c d`` lists the four edge labels meeting at the
crossing counter-clockwise, starting with the *incoming under-strand*.
The under-strand therefore always runs ``a -> c``.  The over-strand runs
either ``b -> d`` or ``d -> b``; which one is recovered by tracing the
knot and stored per crossing in :attr:`PDCode.over_forward`.  With this
layout ``d -> b`` is a positive crossing and ``b -> d`` a negative one.

Links are rejected: the edges must form a single closed cycle.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .polynomial import LaurentPoly

__all__ = [
    "PDError",
    "PDSyntaxError",
    "PDCode",
    "TwistSite",
    "parse_pd",
    "insert_full_twist",
    "twist_with_boundary",
    "alexander_polynomial",
    "alexander_matrix",
    "pd_from_tuples",
]


class PDError(ValueError):
    """Invalid planar-diagram code."""


class PDSyntaxError(PDError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class PDCode:
    crossings: tuple[tuple[int, int, int, int], ...]
    over_forward: tuple[bool, ...] = field(init=False)
    edge_order: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        crossings = tuple(tuple(int(v) for v in c) for c in self.crossings)
        object.__setattr__(self, "crossings", crossings)
        _check_labels(crossings)
        over_forward, order = _trace(crossings)
        object.__setattr__(self, "over_forward", over_forward)
        object.__setattr__(self, "edge_order", order)

    def __len__(self) -> int:
        return len(self.crossings)

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(sorted(self.edge_order))

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(-1 if fwd else 1 for fwd in self.over_forward)

    @property
    def writhe(self) -> int:
        return sum(self.signs)

    def slots(self) -> dict[int, list[tuple[int, int]]]:
        """Map each edge label to its two ``(crossing, slot)`` occurrences."""
        out: dict[int, list[tuple[int, int]]] = {}
        for ci, c in enumerate(self.crossings):
            for s, e in enumerate(c):
                out.setdefault(e, []).append((ci, s))
        return out

    def head_tail(self) -> tuple[dict[int, tuple[int, int]], dict[int, tuple[int, int]]]:
        """Return ``(head, tail)``: the slot each edge enters and the slot it leaves."""
        head: dict[int, tuple[int, int]] = {}
        tail: dict[int, tuple[int, int]] = {}
        for ci, (c, fwd) in enumerate(zip(self.crossings, self.over_forward)):
            for s, e in enumerate(c):
                (head if _is_incoming(s, fwd) else tail)[e] = (ci, s)
        return head, tail

    def canonical(self) -> PDCode:
        """Relabel edges ``1..2n`` along the orientation."""
        relabel = {e: i + 1 for i, e in enumerate(self.edge_order)}
        return PDCode(tuple(tuple(relabel[e] for e in c) for c in self.crossings))

    def relabel(self, mapping: dict[int, int]) -> PDCode:
        return PDCode(tuple(tuple(mapping[e] for e in c) for c in self.crossings))

    def mirror(self) -> PDCode:
        """Switch every crossing (the mirror image)."""
        out = []
        for c, fwd in zip(self.crossings, self.over_forward):
            a, b, cc, d = c
            # the old over-strand becomes the under-strand
            out.append((d, a, b, cc) if fwd else (b, cc, d, a))
        return PDCode(tuple(out))

    def to_text(self) -> str:
        lines = [f"X {a} {b} {c} {d}" for a, b, c, d in self.crossings]
        return "\n".join(lines) + "\n"


def _is_incoming(slot: int, over_forward: bool) -> bool:
    if slot == 0:
        return True
    if slot == 2:
        return False
    return (slot == 1) == over_forward


def _check_labels(crossings) -> None:
    counts: dict[int, int] = {}
    for ci, c in enumerate(crossings):
        if len(c) != 4:
            raise PDError(f"crossing {ci} has {len(c)} labels, expected 4")
        for e in c:
            if e <= 0:
                raise PDError(f"edge label {e} in crossing {ci} is not positive")
            counts[e] = counts.get(e, 0) + 1
    for e, n in sorted(counts.items()):
        if n > 2:
            raise PDError(f"duplicate label: edge {e} occurs {n} times")
        if n < 2:
            raise PDError(f"dangling label: edge {e} occurs once")


def _trace(crossings) -> tuple[tuple[bool, ...], tuple[int, ...]]:
    if not crossings:
        return (), ()
    where: dict[int, list[tuple[int, int]]] = {}
    for ci, c in enumerate(crossings):
        for s, e in enumerate(c):
            where.setdefault(e, []).append((ci, s))

    over_forward: list[bool | None] = [None] * len(crossings)
    order: list[int] = []
    start = (0, 0)
    ci, slot = start
    while True:
        if slot == 2:
            raise PDError(f"crossing {ci}: under-strand enters at slot c; expected a -> c")
        if slot in (1, 3):
            if over_forward[ci] is not None:
                raise PDError(f"crossing {ci}: over-strand traversed twice")
            over_forward[ci] = slot == 1
        order.append(crossings[ci][slot])
        out_slot = (slot + 2) % 4
        e = crossings[ci][out_slot]
        a, b = where[e]
        ci, slot = b if a == (ci, out_slot) else a
        if (ci, slot) == start:
            break
    if len(order) != 2 * len(crossings):
        raise PDError(
            f"diagram has more than one component ({len(order)} of "
            f"{2 * len(crossings)} edges on the first); links are not supported"
        )
    return tuple(bool(v) for v in over_forward), tuple(order)


_TOKEN = re.compile(r"\S+")


def parse_pd(text: str) -> PDCode:
    """Parse the ``.pd`` text format.

    One crossing per line as ``X a b c d``; ``#`` starts a comment.  An
    optional ``O e1 e2 ...`` line lists edges in the order they are met
    along the knot and is checked against the traced orientation.
    """
    crossings: list[tuple[int, int, int, int]] = []
    hints: list[tuple[int, int, list[int]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        head, col = tokens[0]
        values = []
        for tok, tcol in tokens[1:]:
            if not re.fullmatch(r"[0-9]+", tok):
                raise PDSyntaxError(f"expected a positive integer label, got {tok!r}", lineno, tcol)
            values.append(int(tok))
        if head == "X":
            if len(values) != 4:
                raise PDSyntaxError(f"crossing needs 4 labels, got {len(values)}", lineno, col)
            if 0 in values:
                zcol = next(tc for t, tc in tokens[1:] if int(t) == 0)
                raise PDSyntaxError("edge labels are 1-based", lineno, zcol)
            crossings.append(tuple(values))
        elif head == "O":
            hints.append((lineno, col, values))
        else:
            raise PDSyntaxError(f"unknown record {head!r}", lineno, col)
    pd = PDCode(tuple(crossings))
    for lineno, col, hint in hints:
        _check_hint(pd, hint, lineno, col)
    return pd


def _check_hint(pd: PDCode, hint: list[int], lineno: int, col: int) -> None:
    pos = {e: i for i, e in enumerate(pd.edge_order)}
    missing = [e for e in hint if e not in pos]
    if missing:
        raise PDSyntaxError(f"orientation hint names unknown edge {missing[0]}", lineno, col)
    m = len(pd.edge_order)
    idx = [pos[e] for e in hint]
    # hinted edges must appear in cyclic traversal order
    offsets = [(i - idx[0]) % m for i in idx]
    if offsets != sorted(offsets) or len(set(offsets)) != len(offsets):
        raise PDSyntaxError("orientation hint contradicts the traced orientation", lineno, col)


@dataclass(frozen=True)
class TwistSite:
    """Edges passing through a twisting disk, listed left to right.

    ``directions[i]`` is ``+1`` if edge ``i`` passes upward through the
    disk and ``-1`` if downward.  ``sign`` is the handedness of the twist:
    ``+1`` for a right-handed full twist.
    """

    edges: tuple[int, ...]
    directions: tuple[int, ...]
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(int(e) for e in self.edges))
        object.__setattr__(self, "directions", tuple(int(d) for d in self.directions))
        if len(self.edges) != len(self.directions):
            raise PDError("twist site needs one direction per edge")
        if len(self.edges) < 2 or len(self.edges) % 2:
            raise PDError("twist site needs a positive even number of edges")
        if len(set(self.edges)) != len(self.edges):
            raise PDError("twist site lists an edge twice")
        if any(d not in (1, -1) for d in self.directions):
            raise PDError("directions must be +1 (up) or -1 (down)")
        if sum(self.directions) != 0:
            ups = self.directions.count(1)
            raise PDError(
                f"orientation imbalance: {ups} up, {len(self.edges) - ups} down; "
                "the disk must meet the knot with algebraic intersection zero"
            )
        if self.sign not in (1, -1):
            raise PDError("twist sign must be +1 or -1")

    @property
    def strands(self) -> int:
        return len(self.edges)

    def reversed_sign(self) -> TwistSite:
        return TwistSite(self.edges, self.directions, -self.sign)


def twist_with_boundary(pd: PDCode, site: TwistSite) -> tuple[PDCode, TwistSite]:
    """Insert a full twist and also return the site just above the new box.

    The twist is the braid ``(s_1 s_2 ... s_{k-1})^k`` on ``k`` strands,
    each generator of handedness ``site.sign``.  The segment of each site
    edge below the box keeps its label, so twisting again at ``site``
    stacks a new box directly underneath.
    """
    known = set(pd.edge_order)
    for e in site.edges:
        if e not in known:
            raise PDError(f"unknown edge label {e}")
    head, tail = pd.head_tail()
    crossings = [list(c) for c in pd.crossings]
    k = site.strands
    fresh = max(known, default=0)

    def new_label() -> int:
        nonlocal fresh
        fresh += 1
        return fresh

    current = list(site.edges)
    strand = list(range(k))
    new = []
    for _ in range(k):
        for j in range(k - 1):
            bl, br = current[j], current[j + 1]
            tl, tr = new_label(), new_label()
            if site.sign > 0:
                under_up = site.directions[strand[j + 1]] > 0
                new.append((br, tr, tl, bl) if under_up else (tl, bl, br, tr))
            else:
                under_up = site.directions[strand[j]] > 0
                new.append((bl, br, tr, tl) if under_up else (tr, tl, bl, br))
            current[j], current[j + 1] = tl, tr
            strand[j], strand[j + 1] = strand[j + 1], strand[j]
    assert strand == list(range(k))
    # up edges leave the box at their head end, down edges at their tail end
    for e, d, top in zip(site.edges, site.directions, current):
        ci, s = head[e] if d > 0 else tail[e]
        crossings[ci][s] = top
    out = PDCode(tuple(tuple(c) for c in crossings) + tuple(new))
    return out, TwistSite(tuple(current), site.directions, site.sign)


def insert_full_twist(pd: PDCode, site: TwistSite) -> PDCode:
    """Insert a full twist on the ``2l`` strands of ``site``; adds ``2l(2l-1)`` crossings."""
    return twist_with_boundary(pd, site)[0]


def _bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[int]:
    """Exact Newton interpolation; returns integer coefficients, low degree first."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - xs[i] * p for s, p in zip(shifted, poly)]
        poly[0] += coef[i]
    if any(c.denominator != 1 for c in poly):
        raise ArithmeticError("interpolated determinant is not integral")
    return [int(c) for c in poly]


def alexander_matrix(pd: PDCode) -> list[list[tuple[int, int]]]:
    """Abelianised Fox-derivative rows of the Wirtinger presentation.

    Entry ``(c0, c1)`` stands for ``c0 + c1*t``; rows are crossings,
    columns are over-arcs.
    """
    n = len(pd)
    arc_of: dict[int, int] = {}
    arc = 0
    head, _ = pd.head_tail()
    for e in pd.edge_order:
        arc_of[e] = arc
        ci, s = head[e]
        if s == 0:
            arc = (arc + 1) % n
    rows = []
    for c, fwd in zip(pd.crossings, pd.over_forward):
        row = [(0, 0)] * n
        over, inc, out = arc_of[c[1]], arc_of[c[0]], arc_of[c[2]]
        positive = not fwd
        entries = [(over, (1, -1)), (inc, (0, 1) if positive else (-1, 0)), (out, (-1, 0) if positive else (0, 1))]
        for col, (c0, c1) in entries:
            r0, r1 = row[col]
            row[col] = (r0 + c0, r1 + c1)
        rows.append(row)
    return rows


def alexander_polynomial(pd: PDCode) -> LaurentPoly:
    """Normalised Alexander polynomial via the Wirtinger presentation.

    The first elementary ideal is generated by any ``(n-1)``-minor of the
    Fox matrix; its determinant is evaluated at ``n`` integer points with
    fraction-free elimination and interpolated exactly.
    """
    n = len(pd)
    if n <= 1:
        return LaurentPoly.constant(1)
    rows = alexander_matrix(pd)
    minor = [row[:-1] for row in rows[:-1]]
    xs = list(range(n))
    ys = [_bareiss_det([[c0 + c1 * x for c0, c1 in row] for row in minor]) for x in xs]
    return LaurentPoly.from_list(_interpolate(xs, ys)).normalized()


def pd_from_tuples(crossings: Iterable[Sequence[int]]) -> PDCode:
    return PDCode(tuple(tuple(c) for c in crossings))
