"""Integer Laurent polynomials in one variable ``t``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping


@dataclass(frozen=True)
class LaurentPoly:
    """Sparse integer Laurent polynomial, exponent -> coefficient.

    Zero coefficients are never stored, so equality is structural.
    """

    coeffs: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(e): int(c) for e, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def constant(cls, c: int) -> LaurentPoly:
        return cls({0: c})

    @classmethod
    def from_list(cls, coeffs: Iterable[int], low: int = 0) -> LaurentPoly:
        """Build from a dense coefficient list starting at exponent ``low``."""
        return cls({low + i: c for i, c in enumerate(coeffs)})

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __add__(self, other: LaurentPoly | int) -> LaurentPoly:
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: LaurentPoly | int) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly | int) -> LaurentPoly:
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self.coeffs.items()})
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by ``t**k``."""
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def __call__(self, t):
        if not self.coeffs:
            return 0
        if t == 0 and self.min_degree < 0:
            raise ZeroDivisionError("negative power of t evaluated at 0")
        return sum(c * (Fraction(t) ** e if e < 0 else t ** e) for e, c in self.coeffs.items())

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def min_degree(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    @property
    def max_degree(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def is_palindromic(self) -> bool:
        return all(self.coeffs.get(-e) == c for e, c in self.coeffs.items())

    def normalized(self) -> LaurentPoly:
        """Return ``±t**k * self`` with a centred exponent range and positive value at 1.

        An odd exponent span (never the case for a classical knot) is
        shifted by the floor of its midpoint.
        """
        if not self.coeffs:
            return self
        lo, hi = self.min_degree, self.max_degree
        p = self.shift(-((lo + hi) // 2))
        value = p(1)
        if value < 0 or (value == 0 and p.coeffs[p.max_degree] < 0):
            p = -p
        return p

    def to_dict(self) -> dict[str, int]:
        return {str(e): c for e, c in self.coeffs.items()}

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for e, c in self.coeffs.items():
            if e == 0:
                body = str(abs(c))
            else:
                var = "t" if e == 1 else f"t^{e}"
                body = var if abs(c) == 1 else f"{abs(c)}*{var}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r})"
