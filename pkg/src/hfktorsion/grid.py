"""Hat knot Floer homology from grid diagrams, over F_2.

Coordinates
-----------
Lattice lines are numbered ``0..n-1`` left to right and bottom to top; a
grid state puts one point on each vertical line, ``(i, perm[i])``.  The
square in column ``c`` and row ``r`` (both 1-based, as in ``.grd`` files)
has centre ``(c - 1/2, r - 1/2)``; markers sit at square centres.

The fully blocked complex counts empty rectangles that avoid every X and
O marker.  Its homology is HFK-hat tensored with ``n - 1`` copies of a
two-dimensional space supported in gradings ``(0, 0)`` and ``(-1, -1)``.
"""

from __future__ import annotations

import itertools
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .pdcode import PDCode
from .tables import HfkTable

__all__ = [
    "GridError",
    "GridSizeError",
    "NotDivisibleError",
    "GridDiagram",
    "GridState",
    "BigradedDims",
    "parse_grid",
    "gradings",
    "empty_rectangles",
    "tilde_complex",
    "tilde_homology",
    "tilde_to_hat",
    "hat_homology",
    "grid_to_pd",
    "DEFAULT_MAX_GRID",
]

DEFAULT_MAX_GRID = 10


class GridError(ValueError):
    """Invalid grid diagram."""


class GridSizeError(GridError):
    """Grid number above the configured limit."""


class NotDivisibleError(ArithmeticError):
    """Tilde dimensions are not a multiple of the blocked factor."""


@dataclass(frozen=True)
class GridDiagram:
    """Grid of size ``n``; ``xs[r]``/``os[r]`` are the 1-based columns of the
    X and O markers in row ``r + 1`` (rows numbered bottom to top)."""

    n: int
    xs: tuple[int, ...]
    os: tuple[int, ...]

    def __post_init__(self):
        xs = tuple(int(v) for v in self.xs)
        os = tuple(int(v) for v in self.os)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "os", os)
        full = set(range(1, self.n + 1))
        if self.n < 1:
            raise GridError("grid size must be positive")
        if len(xs) != self.n or set(xs) != full:
            raise GridError(f"X row {list(xs)} is not a permutation of 1..{self.n}")
        if len(os) != self.n or set(os) != full:
            raise GridError(f"O row {list(os)} is not a permutation of 1..{self.n}")
        if self.n >= 2:
            clash = [r + 1 for r in range(self.n) if xs[r] == os[r]]
            if clash:
                raise GridError(f"X and O share a square in row {clash[0]}")
        if self.components() != 1:
            raise GridError(f"grid has {self.components()} components; only knots are supported")

    def components(self) -> int:
        row_of_x = {c: r for r, c in enumerate(self.xs)}
        seen, count = set(), 0
        for start in range(self.n):
            if start in seen:
                continue
            count += 1
            r = start
            while r not in seen:
                seen.add(r)
                r = row_of_x[self.os[r]]
        return count

    def translated(self, rows: int = 0, cols: int = 0) -> GridDiagram:
        """Cyclic torus translation by ``rows`` up and ``cols`` right."""
        n = self.n
        xs = [0] * n
        os = [0] * n
        for r in range(n):
            xs[(r + rows) % n] = (self.xs[r] - 1 + cols) % n + 1
            os[(r + rows) % n] = (self.os[r] - 1 + cols) % n + 1
        return GridDiagram(n, tuple(xs), tuple(os))

    def to_text(self) -> str:
        return f"{self.n}\nX: {' '.join(map(str, self.xs))}\nO: {' '.join(map(str, self.os))}\n"


@dataclass(frozen=True)
class GridState:
    """Point ``(i, perm[i])`` on each vertical line ``i`` (0-based)."""

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(v) for v in self.perm)
        object.__setattr__(self, "perm", perm)
        if sorted(perm) != list(range(len(perm))):
            raise GridError(f"state {perm} is not a permutation of 0..{len(perm) - 1}")


@dataclass(frozen=True)
class BigradedDims:
    dims: dict[tuple[int, int], int] = field(default_factory=dict)
    n: int = 1

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def poincare(self) -> dict[tuple[int, int], int]:
        return dict(sorted(self.dims.items()))


def parse_grid(text: str) -> GridDiagram:
    """Parse a ``.grd`` file: ``n``, then ``X: c1 .. cn`` and ``O: c1 .. cn``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) != 3:
        raise GridError(f"expected 3 non-comment lines (n, X:, O:), got {len(lines)}")
    if not re.fullmatch(r"[0-9]+", lines[0]):
        raise GridError(f"grid size {lines[0]!r} is not a positive integer")
    n = int(lines[0])
    rows = {}
    for ln in lines[1:]:
        m = re.fullmatch(r"([XO])\s*:\s*(.*)", ln)
        if not m:
            raise GridError(f"malformed marker line {ln!r}")
        tokens = m.group(2).split()
        if not all(re.fullmatch(r"[0-9]+", t) for t in tokens):
            raise GridError(f"non-integer column in {ln!r}")
        rows[m.group(1)] = tuple(int(t) for t in tokens)
    if set(rows) != {"X", "O"}:
        raise GridError("need exactly one X: line and one O: line")
    return GridDiagram(n, rows["X"], rows["O"])


def _all_states(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int16).reshape(-1, n)


def _rank(states: np.ndarray) -> np.ndarray:
    """Lexicographic index of each permutation row."""
    n = states.shape[1]
    idx = np.zeros(states.shape[0], dtype=np.int64)
    for i in range(n):
        smaller_after = (states[:, i + 1 :] < states[:, i : i + 1]).sum(axis=1)
        idx += smaller_after * math.factorial(n - 1 - i)
    return idx


def _markers(cols: tuple[int, ...]) -> list[tuple[int, int]]:
    """Marker squares as 0-based ``(column, row)``."""
    return [(c - 1, r) for r, c in enumerate(cols)]


def _maslov(states: np.ndarray, markers: list[tuple[int, int]]) -> np.ndarray:
    n = states.shape[1]
    # I(x, x): pairs i < j with x_i < x_j
    ixx = np.zeros(states.shape[0], dtype=np.int64)
    for i in range(n):
        ixx += (states[:, i + 1 :] > states[:, i : i + 1]).sum(axis=1)
    cross = np.zeros(states.shape[0], dtype=np.int64)
    cols = np.arange(n)
    for q, r in markers:
        # lattice point (i, y) lies below-left of centre (q + 1/2, r + 1/2) iff i <= q and y <= r
        left = cols <= q
        cross += (states[:, left] <= r).sum(axis=1)
        cross += (states[:, ~left] > r).sum(axis=1)
    ioo = sum(1 for (q1, r1), (q2, r2) in itertools.combinations(markers, 2) if (q1 - q2) * (r1 - r2) > 0)
    return ixx - cross + ioo + 1


def _grading_arrays(g: GridDiagram, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m_o = _maslov(states, _markers(g.os))
    m_x = _maslov(states, _markers(g.xs))
    twice_a = m_o - m_x - (g.n - 1)
    if np.any(twice_a % 2):
        raise GridError("non-integral Alexander grading; grid is not a knot")
    return m_o, twice_a // 2


def gradings(g: GridDiagram, x: GridState) -> tuple[int, int]:
    """Maslov and Alexander gradings ``(mu, A)`` of a single state."""
    if len(x.perm) != g.n:
        raise GridError("state size does not match grid")
    mu, a = _grading_arrays(g, np.array([x.perm], dtype=np.int16))
    return int(mu[0]), int(a[0])


def _rectangle_edges(g: GridDiagram, states: np.ndarray, blocked: bool) -> tuple[np.ndarray, np.ndarray]:
    """All empty rectangles from each state, as (source, target) index arrays.

    For columns ``i < j`` the two rectangles from ``x`` to the state with
    ``x_i`` and ``x_j`` swapped span columns ``[i, j]`` and ``[j, i + n]``
    (wrapping), with x-points at lower-left and upper-right corners.
    With ``blocked`` every marker is forbidden; otherwise only X markers
    (the hat complex needs one O per row, handled by the caller).
    """
    n = g.n
    num = states.shape[0]
    src_all, dst_all = [], []
    forbidden = _markers(g.xs) + (_markers(g.os) if blocked else [])
    base = np.arange(num)
    for i in range(n):
        for j in range(i + 1, n):
            for wrap in (False, True):
                if not wrap:
                    lo, hi = states[:, i].astype(np.int64), states[:, j].astype(np.int64)
                    inner_cols = list(range(i + 1, j))
                    square_cols = set(range(i, j))
                else:
                    lo, hi = states[:, j].astype(np.int64), states[:, i].astype(np.int64)
                    inner_cols = list(range(j + 1, n)) + list(range(0, i))
                    square_cols = set(range(j, n)) | set(range(0, i))
                h = (hi - lo) % n
                ok = np.ones(num, dtype=bool)
                for k in inner_cols:
                    off = (states[:, k] - lo) % n
                    ok &= ~((off > 0) & (off < h))
                for q, r in forbidden:
                    if q in square_cols:
                        ok &= ~(((r - lo) % n) < h)
                if not ok.any():
                    continue
                src = base[ok]
                tgt = states[ok].copy()
                tgt[:, [i, j]] = tgt[:, [j, i]]
                src_all.append(src)
                dst_all.append(_rank(tgt))
    if not src_all:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    src = np.concatenate(src_all)
    dst = np.concatenate(dst_all)
    # two rectangles between the same pair cancel over F_2
    key = src * num + dst
    uniq, counts = np.unique(key, return_counts=True)
    uniq = uniq[counts % 2 == 1]
    return uniq // num, uniq % num


def empty_rectangles(g: GridDiagram, x: GridState) -> list[tuple[GridState, int]]:
    """Targets of marker-free empty rectangles out of ``x``, with F_2 coefficients.

    Pairs of rectangles reaching the same target cancel and are dropped.
    """
    states = _all_states(g.n)
    i = int(_rank(np.array([x.perm], dtype=np.int16))[0])
    src, dst = _rectangle_edges(g, states, blocked=True)
    out = [GridState(tuple(int(v) for v in states[d])) for s, d in zip(src, dst) if s == i]
    return [(y, 1) for y in sorted(out, key=lambda s: s.perm)]


@dataclass
class TildeComplex:
    n: int
    mu: np.ndarray
    alex: np.ndarray
    differential: sp.csr_matrix

    @property
    def size(self) -> int:
        return len(self.mu)


def tilde_complex(g: GridDiagram, max_grid: int = DEFAULT_MAX_GRID) -> TildeComplex:
    """Build the fully blocked complex and check its structural invariants."""
    if g.n > max_grid:
        raise GridSizeError(f"grid number {g.n} exceeds the limit {max_grid}")
    states = _all_states(g.n)
    mu, alex = _grading_arrays(g, states)
    src, dst = _rectangle_edges(g, states, blocked=True)
    if np.any(mu[dst] != mu[src] - 1) or np.any(alex[dst] != alex[src]):
        raise AssertionError("rectangle does not drop mu by 1 and preserve A")
    num = len(mu)
    d = sp.csr_matrix((np.ones(len(src), dtype=np.int64), (dst, src)), shape=(num, num))
    d2 = (d @ d).tocoo()
    if np.any(d2.data % 2):
        raise AssertionError("differential does not square to zero")
    return TildeComplex(g.n, mu, alex, d)


def rank_f2(columns: list[int]) -> int:
    """Rank over F_2 of bit-packed columns; sparsest columns are reduced first."""
    pivots: dict[int, int] = {}
    rank = 0
    for col in sorted(columns, key=lambda c: (bin(c).count("1"), c)):
        while col:
            low = col.bit_length() - 1
            p = pivots.get(low)
            if p is None:
                pivots[low] = col
                rank += 1
                break
            col ^= p
    return rank


def _block_dims(job: tuple[int, dict[int, int], dict[int, list[int]]]) -> dict[tuple[int, int], int]:
    alex, sizes, boundary_cols = job
    ranks = {m: rank_f2(cols) for m, cols in boundary_cols.items()}
    return {
        (m, alex): size - ranks.get(m, 0) - ranks.get(m + 1, 0)
        for m, size in sizes.items()
        if size - ranks.get(m, 0) - ranks.get(m + 1, 0) > 0
    }


def _block_jobs(cx: TildeComplex) -> list[tuple[int, dict[int, int], dict[int, list[int]]]]:
    d = cx.differential.tocsc()
    jobs = []
    for a in sorted(set(cx.alex.tolist())):
        in_block = np.flatnonzero(cx.alex == a)
        by_mu: dict[int, list[int]] = {}
        for s in in_block:
            by_mu.setdefault(int(cx.mu[s]), []).append(int(s))
        local = {}
        for m, members in by_mu.items():
            for pos, s in enumerate(members):
                local[s] = pos
        cols: dict[int, list[int]] = {}
        for m, members in by_mu.items():
            if m - 1 not in by_mu:
                continue
            packed = []
            for s in members:
                targets = d.indices[d.indptr[s] : d.indptr[s + 1]]
                vals = d.data[d.indptr[s] : d.indptr[s + 1]]
                bits = 0
                for t, v in zip(targets, vals):
                    if v % 2:
                        bits ^= 1 << local[int(t)]
                if bits:
                    packed.append(bits)
            cols[m] = packed
        jobs.append((a, {m: len(v) for m, v in by_mu.items()}, cols))
    return jobs


def tilde_homology(g: GridDiagram, max_grid: int = DEFAULT_MAX_GRID, workers: int = 1) -> BigradedDims:
    """Bigraded dimensions of the homology of the fully blocked complex.

    Each Alexander grading is an independent block; ``workers > 1`` farms
    blocks out to processes and merges the results in grading order.
    """
    cx = tilde_complex(g, max_grid)
    jobs = _block_jobs(cx)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_block_dims, jobs))
    else:
        parts = [_block_dims(job) for job in jobs]
    dims: dict[tuple[int, int], int] = {}
    for part in parts:
        dims.update(part)
    return BigradedDims(dict(sorted(dims.items())), g.n)


def tilde_to_hat(tilde: BigradedDims, name: str | None = None) -> HfkTable:
    """Divide the Poincare polynomial by ``(1 + q^-1 t^-1)^(n-1)`` exactly."""
    current = dict(tilde.dims)
    for _ in range(tilde.n - 1):
        quotient: dict[tuple[int, int], int] = {}
        # along each line mu - A = const, from the top: P(m) = Q(m) + Q(m + 1)
        lines: dict[int, list[tuple[int, int]]] = {}
        for m, a in current:
            lines.setdefault(m - a, []).append((m, a))
        for diag, cells in lines.items():
            top = max(m for m, _ in cells)
            bottom = min(m for m, _ in cells)
            carry = 0
            for m in range(top, bottom - 2, -1):
                a = m - diag
                q = current.get((m, a), 0) - carry
                if m == bottom - 1:
                    if q != 0:
                        raise NotDivisibleError(f"remainder {q} on diagonal mu - A = {diag}")
                    break
                if q < 0:
                    raise NotDivisibleError(f"negative quotient at {(m, a)}")
                if q:
                    quotient[(m, a)] = q
                carry = q
        current = quotient
    return HfkTable(dict(sorted(current.items())), name=name)


def hat_homology(g: GridDiagram, max_grid: int = DEFAULT_MAX_GRID, workers: int = 1, name: str | None = None) -> HfkTable:
    tilde = tilde_homology(g, max_grid=max_grid, workers=workers)
    hat = tilde_to_hat(tilde, name=name)
    if hat.total % 2 == 0:
        raise AssertionError("hat homology has even total dimension")
    return hat


def grid_to_pd(g: GridDiagram) -> PDCode:
    """Planar diagram of the grid knot: vertical segments cross over horizontal ones.

    Horizontal segments run from O to X, vertical ones from X to O.
    """
    n = g.n
    row_of_o = {c: r for r, c in enumerate(g.os)}
    segs = []  # (kind, fixed, start, end) in square-centre coordinates
    r = 0
    for _ in range(n):
        segs.append(("h", r, g.os[r] - 1, g.xs[r] - 1))
        c = g.xs[r]
        r2 = row_of_o[c]
        segs.append(("v", c - 1, r, r2))
        r = r2
    horizontals = [s for s in segs if s[0] == "h"]
    verticals = [s for s in segs if s[0] == "v"]

    def between(v, a, b):
        return min(a, b) < v < max(a, b)

    visits = []  # (crossing key, is_horizontal, direction)
    for kind, fixed, start, end in segs:
        step = 1 if end > start else -1
        hits = []
        others = verticals if kind == "h" else horizontals
        for _, ofixed, ostart, oend in others:
            if between(ofixed, start, end) and between(fixed, ostart, oend):
                key = (ofixed, fixed) if kind == "h" else (fixed, ofixed)
                hits.append((ofixed, key))
        hits.sort(key=lambda h: h[0] * step)
        for _, key in hits:
            visits.append((key, kind == "h", step))
    if not visits:
        return PDCode(())
    m = len(visits)
    info: dict[tuple[int, int], dict] = {}
    for k, (key, horiz, step) in enumerate(visits):
        incoming = k if k > 0 else m
        outgoing = k + 1
        info.setdefault(key, {})["h" if horiz else "v"] = (incoming, outgoing, step)
    crossings = []
    for key in sorted(info, key=lambda key: min(i for i, v in enumerate(visits) if v[0] == key)):
        h_in, h_out, h_step = info[key]["h"]
        v_in, v_out, v_step = info[key]["v"]
        south, north = (v_in, v_out) if v_step > 0 else (v_out, v_in)
        if h_step > 0:
            crossings.append((h_in, south, h_out, north))
        else:
            crossings.append((h_in, north, h_out, south))
    return PDCode(tuple(crossings))
