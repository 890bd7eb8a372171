"""Bounds on the maximal U-torsion order from a hat-flavour table.

Up to homotopy the associated graded minus complex splits into one free
rank-one summand plus summands ``F[U] --U^n--> F[U]``.  Setting ``U = 0``
turns each such summand into a pair of hat generators in gradings
``(i, j)`` and ``(i + 2n - 1, j + n)``.  So every table admits a pairing
of all but one of its generators with offsets of that shape, and the true
decomposition is one such pairing.  Optimising over pairings gives:

* ``minmax``: the least possible largest ``n``; a lower bound for t(K);
* ``maxmax``: the largest ``n`` any valid pairing can use; an upper bound.

Feasibility is a bipartite capacity problem between grading classes
(every offset ``2n - 1`` is odd, so pairs join opposite Maslov parities),
decided by max flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .flow import FlowNetwork
from .tables import Cell, HfkTable

__all__ = [
    "InfeasibleTableError",
    "EmptyIntervalError",
    "Pair",
    "Pairing",
    "LemmaReport",
    "TorsionInterval",
    "pair_offset",
    "PairingProblem",
    "lemma_report",
    "lemma_diagonal_check",
    "minmax_torsion_bound",
    "maxmax_torsion_bound",
    "minmax_certificate",
    "maxmax_certificate",
    "validate_pairing",
    "torsion_interval",
    "bound_report",
]


class InfeasibleTableError(ValueError):
    """No pairing of the required shape exists; the table cannot come from a knot."""


class EmptyIntervalError(ValueError):
    pass


def pair_offset(lower: Cell, upper: Cell) -> int | None:
    """The ``n`` with ``upper = lower + (2n - 1, n)``, or ``None``."""
    dm, da = upper[0] - lower[0], upper[1] - lower[1]
    if da >= 1 and dm == 2 * da - 1:
        return da
    return None


@dataclass(frozen=True, order=True)
class Pair:
    n: int
    lower: Cell
    upper: Cell
    count: int = 1


@dataclass(frozen=True)
class Pairing:
    pairs: tuple[Pair, ...]
    unpaired: Cell | None

    @property
    def max_n(self) -> int:
        return max((p.n for p in self.pairs), default=0)

    def to_dict(self) -> dict:
        return {
            "unpaired": list(self.unpaired) if self.unpaired is not None else None,
            "pairs": [
                {"n": p.n, "lower": list(p.lower), "upper": list(p.upper), "count": p.count}
                for p in self.pairs
            ],
        }


class PairingProblem:
    """Class-level bipartite network for pairings with offsets ``n <= n_max``."""

    def __init__(self, dims: dict[Cell, int], n_max: int):
        self.dims = dict(sorted((c, d) for c, d in dims.items() if d > 0))
        self.n_max = n_max
        self.cells = list(self.dims)
        index = {c: i for i, c in enumerate(self.cells)}
        k = len(self.cells)
        self.source, self.sink = k, k + 1
        self.net = FlowNetwork(k + 2)
        self.cap_edge: dict[Cell, int] = {}
        for c in self.cells:
            if c[0] % 2 == 0:
                self.cap_edge[c] = self.net.add_edge(self.source, index[c], self.dims[c])
            else:
                self.cap_edge[c] = self.net.add_edge(index[c], self.sink, self.dims[c])
        self.pair_edges: list[tuple[int, Cell, Cell, int]] = []
        big = sum(self.dims.values())
        # edges ordered by (n, lower cell) so that flows prefer short pairs
        for n in range(1, n_max + 1):
            for lower in self.cells:
                upper = (lower[0] + 2 * n - 1, lower[1] + n)
                if upper not in index:
                    continue
                even, odd = (lower, upper) if lower[0] % 2 == 0 else (upper, lower)
                eid = self.net.add_edge(index[even], index[odd], big)
                self.pair_edges.append((eid, lower, upper, n))

    def max_pairs(self, dims: dict[Cell, int] | None = None) -> int:
        dims = self.dims if dims is None else dims
        for c, eid in self.cap_edge.items():
            self.net.set_capacity(eid, dims.get(c, 0))
        return self.net.max_flow(self.source, self.sink)

    def feasible(self, dims: dict[Cell, int] | None = None) -> bool:
        """All generators but exactly one can be paired."""
        dims = self.dims if dims is None else dims
        total = sum(dims.values())
        if total % 2 == 0:
            return False
        return self.max_pairs(dims) == (total - 1) // 2

    def perfect(self, dims: dict[Cell, int]) -> Pairing | None:
        """A pairing covering every generator of ``dims``, if one exists."""
        total = sum(dims.values())
        if total % 2 or self.max_pairs(dims) != total // 2:
            return None
        pairs = []
        for eid, lower, upper, n in self.pair_edges:
            f = self.net.flow_on(eid)
            if f:
                pairs.append(Pair(n, lower, upper, f))
        return Pairing(tuple(sorted(pairs, key=lambda p: (p.n, p.lower))), None)


def _max_offset(tab: HfkTable) -> int:
    lo, hi = tab.mu_range
    return (hi - lo + 1) // 2


def _certificate(problem: PairingProblem, dims: dict[Cell, int]) -> Pairing | None:
    """Lexicographically first unpaired cell that leaves a perfect pairing."""
    for c in sorted(dims):
        if dims[c] == 0:
            continue
        rest = dict(dims)
        rest[c] -= 1
        found = problem.perfect(rest)
        if found is not None:
            return Pairing(found.pairs, c)
    return None


def minmax_certificate(tab: HfkTable) -> Pairing:
    """Optimal pairing minimising the largest offset ``n``."""
    tab.require_verified()
    if tab.total == 1:
        return Pairing((), next(iter(tab.dims)))
    top = _max_offset(tab)
    if top < 1 or not PairingProblem(tab.dims, top).feasible():
        raise InfeasibleTableError(f"table {tab.name}: no valid pairing at any offset")
    lo, hi = 1, top
    while lo < hi:
        mid = (lo + hi) // 2
        if PairingProblem(tab.dims, mid).feasible():
            hi = mid
        else:
            lo = mid + 1
    cert = _certificate(PairingProblem(tab.dims, lo), tab.dims)
    assert cert is not None and cert.max_n == lo
    return cert


def minmax_torsion_bound(tab: HfkTable) -> int:
    """Least ``max n`` over all valid pairings; a lower bound on t(K)."""
    return minmax_certificate(tab).max_n


def maxmax_certificate(tab: HfkTable) -> Pairing:
    """A valid pairing that uses the largest achievable offset."""
    tab.require_verified()
    if tab.total == 1:
        return Pairing((), next(iter(tab.dims)))
    top = _max_offset(tab)
    problem = PairingProblem(tab.dims, top)
    if top < 1 or not problem.feasible():
        raise InfeasibleTableError(f"table {tab.name}: no valid pairing at any offset")
    candidates = sorted(
        ((n, lower, upper) for _, lower, upper, n in problem.pair_edges),
        key=lambda t: (-t[0], t[1]),
    )
    for n, lower, upper in candidates:
        rest = dict(tab.dims)
        rest[lower] -= 1
        rest[upper] -= 1
        if not problem.feasible(rest):
            continue
        cert = _certificate(problem, rest)
        assert cert is not None
        merged: dict[tuple[int, Cell, Cell], int] = {(n, lower, upper): 1}
        for p in cert.pairs:
            merged[(p.n, p.lower, p.upper)] = merged.get((p.n, p.lower, p.upper), 0) + p.count
        pairs = tuple(Pair(k[0], k[1], k[2], v) for k, v in sorted(merged.items()))
        return Pairing(pairs, cert.unpaired)
    raise InfeasibleTableError(f"table {tab.name}: no valid pairing at any offset")


def maxmax_torsion_bound(tab: HfkTable) -> int:
    """Largest offset used by any valid pairing; an upper bound on t(K)."""
    return maxmax_certificate(tab).max_n


def validate_pairing(tab: HfkTable, pairing: Pairing) -> list[str]:
    """Independent re-check of a certificate; returns a list of problems."""
    problems = []
    used: dict[Cell, int] = {}
    for p in pairing.pairs:
        if p.count < 1:
            problems.append(f"non-positive multiplicity in {p}")
        if pair_offset(p.lower, p.upper) != p.n:
            problems.append(f"cells {p.lower} -> {p.upper} are not offset by (2n-1, n) with n={p.n}")
        used[p.lower] = used.get(p.lower, 0) + p.count
        used[p.upper] = used.get(p.upper, 0) + p.count
    if pairing.unpaired is None:
        problems.append("no unpaired generator")
    else:
        used[pairing.unpaired] = used.get(pairing.unpaired, 0) + 1
    for c in sorted(set(used) | set(tab.dims)):
        if used.get(c, 0) != tab[c]:
            problems.append(f"cell {c}: covered {used.get(c, 0)} times, dimension {tab[c]}")
    return problems


@dataclass(frozen=True)
class LemmaReport:
    value: int
    origin_dim: int
    empty_cells: tuple[Cell, ...]
    blocking_cell: Cell | None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "green": {"cell": [0, 0], "dim": self.origin_dim},
            "red": [list(c) for c in self.empty_cells],
            "blocking_cell": list(self.blocking_cell) if self.blocking_cell else None,
        }


def lemma_report(tab: HfkTable) -> LemmaReport:
    """Diagonal-emptiness argument at grading ``(0, 0)``.

    If ``d(0, 0) >= 2`` some generator there is paired.  Its partner sits
    at ``(2n - 1, n)`` or ``(1 - 2n, -n)``; if both are empty for every
    ``n < l`` the pairing needs ``n >= l``.  ``empty_cells`` lists the
    checked empty cells inside the table's grading range.
    """
    tab.require_verified()
    origin = tab[(0, 0)]
    if origin < 2:
        return LemmaReport(0, origin, (), None)
    limit = _max_offset(tab) + 1
    empty = []
    value = 1
    for n in range(1, limit + 1):
        up, down = (2 * n - 1, n), (1 - 2 * n, -n)
        if tab[up] or tab[down]:
            return LemmaReport(value, origin, tuple(sorted(empty)), up if tab[up] else down)
        empty.extend(c for c in (up, down) if tab.in_range(c))
        value = n + 1
    raise InfeasibleTableError(f"table {tab.name}: generators at (0, 0) have no possible partner")


def lemma_diagonal_check(tab: HfkTable) -> int:
    """Largest ``l`` certified by the diagonal-emptiness argument: t(K) >= l."""
    return lemma_report(tab).value


@dataclass(frozen=True)
class TorsionInterval:
    lower: int
    upper: int | None
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.lower < 0 or (self.upper is not None and self.upper < 0):
            raise EmptyIntervalError("torsion bounds are nonnegative")
        if self.upper is not None and self.lower > self.upper:
            raise EmptyIntervalError(f"empty interval [{self.lower}, {self.upper}]")

    def __str__(self) -> str:
        return f"[{self.lower}, {'inf' if self.upper is None else self.upper}]"


def torsion_interval(tab: HfkTable, external_upper: int | None = None) -> TorsionInterval:
    lemma = lemma_diagonal_check(tab)
    lo_cert = minmax_certificate(tab)
    hi_cert = maxmax_certificate(tab)
    lower = max(lo_cert.max_n, lemma)
    upper = hi_cert.max_n if external_upper is None else min(hi_cert.max_n, external_upper)
    if lower > upper:
        raise EmptyIntervalError(
            f"table {tab.name}: lower bound {lower} exceeds upper bound {upper}"
        )
    return TorsionInterval(
        lower,
        upper,
        {
            "lemma": lemma,
            "minmax": lo_cert.max_n,
            "maxmax": hi_cert.max_n,
            "external_upper": external_upper,
        },
    )


def bound_report(tab: HfkTable, external_upper: int | None = None) -> dict:
    """Everything the ``bounds`` command prints, as plain data."""
    lemma = lemma_report(tab)
    lo = minmax_certificate(tab)
    hi = maxmax_certificate(tab)
    interval = torsion_interval(tab, external_upper)
    for cert in (lo, hi):
        problems = validate_pairing(tab, cert)
        if problems:
            raise AssertionError(f"certificate failed re-validation: {problems[:3]}")
    return {
        "table": tab.name,
        "total_dim": tab.total,
        "lemma": lemma.to_dict(),
        "minmax": {"value": lo.max_n, "certificate": lo.to_dict()},
        "maxmax": {"value": hi.max_n, "certificate": hi.to_dict()},
        "interval": {"lower": interval.lower, "upper": interval.upper},
        "external_upper": external_upper,
    }
