"""Knot Floer homology torsion bounds and unknotting-number derivations."""

from __future__ import annotations

from .engine import Fact, FactStore, audit_trace
from .grid import GridDiagram, hat_homology, parse_grid, tilde_homology, tilde_to_hat
from .pdcode import PDCode, TwistSite, alexander_polynomial, insert_full_twist, parse_pd
from .polynomial import LaurentPoly
from .tables import HfkTable, euler_characteristic, read_hfk, verify_table
from .torsion import (
    lemma_diagonal_check,
    maxmax_torsion_bound,
    minmax_torsion_bound,
    torsion_interval,
)

__version__ = "0.1.0"

__all__ = [
    "Fact",
    "FactStore",
    "GridDiagram",
    "HfkTable",
    "LaurentPoly",
    "PDCode",
    "TwistSite",
    "alexander_polynomial",
    "audit_trace",
    "euler_characteristic",
    "hat_homology",
    "insert_full_twist",
    "lemma_diagonal_check",
    "maxmax_torsion_bound",
    "minmax_torsion_bound",
    "parse_grid",
    "parse_pd",
    "read_hfk",
    "tilde_homology",
    "tilde_to_hat",
    "torsion_interval",
    "verify_table",
]
