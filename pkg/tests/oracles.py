"""Independent reference implementations used only by the tests.

Nothing here shares code with the package beyond its data types:
the Alexander polynomial comes from the crossing-by-region matrix with a
symbolic determinant, and pairings are found by exhaustive recursion.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache

import sympy

from hfktorsion.pdcode import PDCode

TREFOIL = ((1, 5, 2, 4), (3, 1, 4, 6), (5, 3, 6, 2))
FIGURE_EIGHT = ((4, 2, 5, 1), (8, 6, 1, 5), (6, 3, 7, 4), (2, 7, 3, 8))
CINQUEFOIL = ((2, 8, 3, 7), (4, 10, 5, 9), (6, 2, 7, 1), (8, 4, 9, 3), (10, 6, 1, 5))
THREE_TWIST = ((1, 5, 2, 4), (3, 9, 4, 8), (5, 1, 6, 10), (7, 3, 8, 2), (9, 7, 10, 6))
CLASP = ((1, 1, 2, 3), (4, 4, 3, 2))

# ---------------------------------------------------------------- faces


def _occurrences(crossings):
    occ: dict[int, list[tuple[int, int]]] = {}
    for c, x in enumerate(crossings):
        for i, e in enumerate(x):
            occ.setdefault(e, []).append((c, i))
    return occ


def faces(crossings) -> list[list[tuple[int, int]]]:
    """Regions of the diagram as lists of corners ``(crossing, i)``.

    Corner ``i`` of a crossing lies between slots ``i`` and ``i + 1``
    (counter-clockwise).
    """
    occ = _occurrences(crossings)
    seen = set()
    out = []
    for c in range(len(crossings)):
        for i in range(4):
            if (c, i) in seen:
                continue
            face = []
            cur = (c, i)
            while cur not in seen:
                seen.add(cur)
                face.append(cur)
                cc, ii = cur
                slot = (cc, (ii + 1) % 4)
                a, b = occ[crossings[cc][(ii + 1) % 4]]
                cur = b if a == slot else a
            out.append(face)
    return out


def is_planar(pd: PDCode) -> bool:
    if not pd.crossings:
        return True
    return len(faces(pd.crossings)) == len(pd.crossings) + 2


def face_edges(pd: PDCode) -> list[list[tuple[int, bool]]]:
    """Per face, its boundary edges and whether each one's orientation
    agrees with the counter-clockwise boundary walk."""
    _, tail = pd.head_tail()
    out = []
    for face in faces(pd.crossings):
        row = []
        for cc, ii in face:
            slot = (cc, (ii + 1) % 4)
            e = pd.crossings[cc][slot[1]]
            row.append((e, tail[e] == slot))
        out.append(row)
    return out


def two_strand_sites(pd: PDCode) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Pairs of distinct edges on a common face that run antiparallel.

    Such a pair bounds a disk meeting the knot with algebraic
    intersection zero; the returned directions are the geometric ones.
    """
    sites = []
    for row in face_edges(pd):
        for (e1, a1), (e2, a2) in itertools.combinations(row, 2):
            if e1 != e2 and a1 == a2:
                site = ((e1, e2), (1, -1) if a1 else (-1, 1))
                if site not in sites:
                    sites.append(site)
    return sites


# ---------------------------------------------------------------- Alexander


_T = sympy.Symbol("t")


def alexander_by_regions(pd: PDCode) -> dict[int, int]:
    """Alexander polynomial from the crossing-by-region matrix.

    Looking along the under-strand, the corners on its left get ``t``
    (before the over-strand) and ``-t`` (after), the ones on its right
    ``-1`` and ``1``.  Two adjacent region columns are deleted and the
    determinant is normalised to a centred, positive-at-one polynomial.
    """
    n = len(pd.crossings)
    if n == 0:
        return {0: 1}
    regions = faces(pd.crossings)
    region_of = {corner: r for r, face in enumerate(regions) for corner in face}
    # corner i sits between slots i and i+1; slot 0 is the incoming under-strand
    weight = {3: _T, 2: -_T, 0: -1, 1: 1}
    m = sympy.zeros(n, len(regions))
    for c in range(n):
        for i in range(4):
            m[c, region_of[(c, i)]] += weight[i]
    drop = sorted({region_of[(0, 3)], region_of[(0, 0)]})
    keep = [j for j in range(len(regions)) if j not in drop]
    det = sympy.expand(m.extract(list(range(n)), keep).det(method="berkowitz"))
    poly = sympy.Poly(det, _T)
    coeffs = {int(k[0]): int(v) for k, v in poly.as_dict().items()}
    if not coeffs:
        raise ValueError("vanishing determinant")
    lo, hi = min(coeffs), max(coeffs)
    shift = -((lo + hi) // 2)
    out = {k + shift: v for k, v in coeffs.items()}
    if sum(out.values()) < 0:
        out = {k: -v for k, v in out.items()}
    return out


# ---------------------------------------------------------------- pairings


def _key(dims: dict) -> tuple:
    return tuple(sorted((c, d) for c, d in dims.items() if d > 0))


@lru_cache(maxsize=None)
def _best(state: tuple, n_max: int, want_max: bool):
    """Over perfect pairings of ``state`` using offsets ``<= n_max``, the
    smallest (or largest) achievable maximum offset; ``None`` if none."""
    if not state:
        return 0
    (cell, count), rest = state[0], dict(state[1:])
    # the smallest remaining cell can only be a lower end
    best = None
    for n in range(1, n_max + 1):
        partner = (cell[0] + 2 * n - 1, cell[1] + n)
        if rest.get(partner, 0) == 0:
            continue
        nxt = dict(rest)
        nxt[partner] -= 1
        if count > 1:
            nxt[cell] = count - 1
        sub = _best(_key(nxt), n_max, want_max)
        if sub is None:
            continue
        value = max(n, sub)
        if best is None or (value > best if want_max else value < best):
            best = value
    return best


def brute_feasible(dims: dict, n_max: int) -> bool:
    """Some generator can be left out so that the rest pair up."""
    key = _key(dims)
    if sum(d for _, d in key) % 2 == 0:
        return False
    for i, (cell, d) in enumerate(key):
        rest = dict(key)
        rest[cell] = d - 1
        if _best(_key(rest), n_max, False) is not None:
            return True
    return False


def brute_extreme(dims: dict, want_max: bool):
    """Min (or max) over all valid pairings of the largest offset."""
    key = _key(dims)
    mus = [c[0] for c, _ in key]
    n_max = (max(mus) - min(mus) + 1) // 2 + 1
    out = None
    for cell, d in key:
        rest = dict(key)
        rest[cell] = d - 1
        v = _best(_key(rest), n_max, want_max)
        if v is not None and (out is None or (v > out if want_max else v < out)):
            out = v
    return out


def random_table(rng: random.Random, max_total: int = 9, span: int = 4) -> dict:
    """Random sparse dims with odd total, biased towards pairable cells."""
    total = rng.choice([t for t in range(1, max_total + 1) if t % 2])
    dims: dict = {}
    cell = (0, 0)
    dims[cell] = 1
    while sum(dims.values()) < total:
        if rng.random() < 0.7 and sum(dims.values()) + 2 <= total:
            base = rng.choice(sorted(dims))
            n = rng.randint(1, 3)
            lower = (base[0] + rng.randint(-span, span), base[1] + rng.randint(-2, 2))
            upper = (lower[0] + 2 * n - 1, lower[1] + n)
            dims[lower] = dims.get(lower, 0) + 1
            dims[upper] = dims.get(upper, 0) + 1
        else:
            c = (rng.randint(-span, span), rng.randint(-3, 3))
            dims[c] = dims.get(c, 0) + 1
    return dims


# ---------------------------------------------------------------- grids


def _count_below_left(p_set, q_set) -> Fraction:
    return sum(1 for p in p_set for q in q_set if p[0] < q[0] and p[1] < q[1])


def _m(points, markers) -> Fraction:
    def j(a, b):
        return Fraction(_count_below_left(a, b) + _count_below_left(b, a), 2)

    return j(points, points) - 2 * j(points, markers) + j(markers, markers) + 1


def grid_gradings(g, perm) -> tuple[int, int]:
    """Maslov and Alexander gradings straight from the J-function formulas."""
    pts = [(Fraction(i), Fraction(perm[i])) for i in range(g.n)]
    os_ = [(Fraction(2 * c - 1, 2), Fraction(2 * r + 1, 2)) for r, c in enumerate(g.os)]
    xs_ = [(Fraction(2 * c - 1, 2), Fraction(2 * r + 1, 2)) for r, c in enumerate(g.xs)]
    mo, mx = _m(pts, os_), _m(pts, xs_)
    a = (mo - mx - (g.n - 1)) / 2
    assert mo.denominator == 1 and a.denominator == 1
    return int(mo), int(a)


def _inside(lo, hi, v, n) -> bool:
    """Cyclic open interval test on the circle of length n."""
    width = (hi - lo) % n
    return 0 < (v - lo) % n < width


def grid_rectangles(g, perm, blocked: bool = True) -> dict[tuple, int]:
    """Targets of empty rectangles from ``perm`` with their mod-2 counts."""
    n = g.n
    markers = [(c - 1 + 0.5, r + 0.5) for r, c in enumerate(g.os)]
    if blocked:
        markers += [(c - 1 + 0.5, r + 0.5) for r, c in enumerate(g.xs)]
    out: dict[tuple, int] = {}
    for i, j in itertools.combinations(range(n), 2):
        for left, right in ((i, j), (j, i)):
            bottom, top = perm[left], perm[right]
            if bottom == top:
                continue
            empty = True
            for mx, my in markers:
                if _inside(left, right, mx, n) and _inside(bottom, top, my, n):
                    empty = False
                    break
            if empty:
                for k in range(n):
                    if _inside(left, right, k, n) and _inside(bottom, top, perm[k], n):
                        empty = False
                        break
            if empty:
                y = list(perm)
                y[left], y[right] = perm[right], perm[left]
                y = tuple(y)
                out[y] = (out.get(y, 0) + 1) % 2
    return {y: c for y, c in out.items() if c}


def _rank_mod2(rows: list[int]) -> int:
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def grid_tilde_oracle(g) -> dict[tuple[int, int], int]:
    """Homology of the fully blocked complex by plain enumeration."""
    states = list(itertools.permutations(range(g.n)))
    grade = {s: grid_gradings(g, s) for s in states}
    by_grade: dict[tuple[int, int], list] = {}
    for s in states:
        by_grade.setdefault(grade[s], []).append(s)
    index = {s: i for cells in by_grade.values() for i, s in enumerate(cells)}
    rank: dict[tuple[int, int], int] = {}
    for (mu, a), cells in by_grade.items():
        rows = []
        for s in cells:
            bits = 0
            for y in grid_rectangles(g, s):
                assert grade[y] == (mu - 1, a)
                bits ^= 1 << index[y]
            rows.append(bits)
        rank[(mu, a)] = _rank_mod2(rows)
    out = {}
    for (mu, a), cells in by_grade.items():
        h = len(cells) - rank[(mu, a)] - rank.get((mu + 1, a), 0)
        if h:
            out[(mu, a)] = h
    return dict(sorted(out.items()))


def all_knot_grids(n: int):
    from hfktorsion.grid import GridDiagram, GridError

    for xs in itertools.permutations(range(1, n + 1)):
        for os_ in itertools.permutations(range(1, n + 1)):
            try:
                yield GridDiagram(n, xs, os_)
            except GridError:
                continue
