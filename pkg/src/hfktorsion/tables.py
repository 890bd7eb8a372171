"""Bigraded HFK-hat dimension tables and their consistency checks."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

from .polynomial import LaurentPoly

__all__ = [
    "HfkTable",
    "TableFormatError",
    "UnverifiedTableError",
    "SymmetryReport",
    "VerificationReport",
    "euler_characteristic",
    "check_symmetry",
    "verify_table",
    "read_hfk",
    "write_hfk",
    "table_from_json",
    "table_to_json",
]

Cell = tuple[int, int]


class TableFormatError(ValueError):
    pass


class UnverifiedTableError(ValueError):
    """A bound was requested from a table that has not passed verify_table."""


@dataclass(frozen=True)
class HfkTable:
    """Sparse map ``(mu, A) -> dim``; absent cells have dimension zero."""

    dims: dict[Cell, int]
    name: str | None = None
    verified: bool = field(default=False, compare=False)

    def __post_init__(self):
        clean = {}
        for (mu, a), d in self.dims.items():
            d = int(d)
            if d < 0:
                raise TableFormatError(f"negative dimension {d} at (mu={mu}, A={a})")
            if d:
                clean[(int(mu), int(a))] = d
        object.__setattr__(self, "dims", dict(sorted(clean.items())))

    def __getitem__(self, cell: Cell) -> int:
        return self.dims.get(cell, 0)

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    @property
    def mu_range(self) -> tuple[int, int]:
        mus = [m for m, _ in self.dims]
        return (min(mus), max(mus)) if mus else (0, 0)

    @property
    def a_range(self) -> tuple[int, int]:
        alex = [a for _, a in self.dims]
        return (min(alex), max(alex)) if alex else (0, 0)

    def in_range(self, cell: Cell) -> bool:
        """Whether ``cell`` lies inside the table's displayed bounding box."""
        (m0, m1), (a0, a1) = self.mu_range, self.a_range
        return m0 <= cell[0] <= m1 and a0 <= cell[1] <= a1

    def require_verified(self) -> None:
        if not self.verified:
            raise UnverifiedTableError(f"table {self.name or '<unnamed>'} has not been verified")


def euler_characteristic(tab: HfkTable) -> LaurentPoly:
    """Graded Euler characteristic ``sum (-1)^mu dim t^A``."""
    out: dict[int, int] = {}
    for (mu, a), d in tab.dims.items():
        out[a] = out.get(a, 0) + (-d if mu % 2 else d)
    return LaurentPoly(out)


@dataclass(frozen=True)
class SymmetryReport:
    ok: bool
    offending: tuple[tuple[Cell, int, Cell, int], ...] = ()

    def describe(self) -> list[str]:
        return [f"d{c} = {d} but d{m} = {dm}" for c, d, m, dm in self.offending]


def check_symmetry(tab: HfkTable) -> SymmetryReport:
    """Check ``d(mu, A) = d(mu - 2A, -A)`` on every cell."""
    bad = []
    for (mu, a), d in tab.dims.items():
        mate = (mu - 2 * a, -a)
        if tab[mate] != d and (mate, tab[mate], (mu, a), d) not in bad:
            bad.append(((mu, a), d, mate, tab[mate]))
    return SymmetryReport(not bad, tuple(bad))


@dataclass(frozen=True)
class VerificationReport:
    name: str | None
    parity_ok: bool
    symmetry: SymmetryReport
    euler_at_one: int
    table: HfkTable

    @property
    def euler_ok(self) -> bool:
        return abs(self.euler_at_one) == 1

    @property
    def ok(self) -> bool:
        return self.parity_ok and self.symmetry.ok and self.euler_ok

    def failures(self) -> list[str]:
        out = []
        if not self.parity_ok:
            out.append(f"parity: total dimension {self.table.total} is even")
        if not self.symmetry.ok:
            out.extend("symmetry: " + s for s in self.symmetry.describe())
        if not self.euler_ok:
            out.append(f"euler: value at t=1 is {self.euler_at_one}, expected +-1")
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "total": self.table.total,
            "parity_ok": self.parity_ok,
            "symmetry_ok": self.symmetry.ok,
            "euler_at_one": self.euler_at_one,
            "euler_characteristic": str(euler_characteristic(self.table).normalized()),
            "verified": self.ok,
            "failures": self.failures(),
        }


def verify_table(tab: HfkTable) -> VerificationReport:
    """Run parity, symmetry and Euler checks; ``report.table`` carries the verified flag."""
    euler = euler_characteristic(tab)
    value = int(euler(1))
    parity = tab.total % 2 == 1
    sym = check_symmetry(tab)
    ok = parity and sym.ok and abs(value) == 1
    return VerificationReport(tab.name, parity, sym, value, replace(tab, verified=ok))


def read_hfk(text: str, name: str | None = None) -> HfkTable:
    """Parse the ``.hfk`` CSV format (header ``A,mu,dim``, ``#`` comments)."""
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise TableFormatError("empty table file")
    reader = csv.reader(rows)
    header = [h.strip() for h in next(reader)]
    if header != ["A", "mu", "dim"]:
        raise TableFormatError(f"expected header A,mu,dim, got {','.join(header)}")
    dims: dict[Cell, int] = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            a, mu, d = (int(v) for v in row)
        except ValueError:
            raise TableFormatError(f"row {lineno}: expected three integers, got {row}") from None
        if (mu, a) in dims:
            raise TableFormatError(f"row {lineno}: duplicate cell (mu={mu}, A={a})")
        dims[(mu, a)] = d
    return HfkTable(dims, name=name)


def write_hfk(tab: HfkTable, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    buf.write("A,mu,dim\n")
    for (mu, a), d in sorted(tab.dims.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        buf.write(f"{a},{mu},{d}\n")
    return buf.getvalue()


def table_to_json(tab: HfkTable) -> dict:
    return {
        "name": tab.name,
        "cells": [{"A": a, "mu": mu, "dim": d} for (mu, a), d in sorted(tab.dims.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
    }


def table_from_json(obj: dict | str) -> HfkTable:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return HfkTable({(int(c["mu"]), int(c["A"])): int(c["dim"]) for c in obj["cells"]}, name=obj.get("name"))
