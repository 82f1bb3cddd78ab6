"""Double-curve geometry and points on it.

Rational curves carry labelled points; elliptic curves C/(Z + tau Z) carry
points as exact lattice coordinates (a, b), meaning a + b*tau mod the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .exact import GaussianRational, format_fraction, to_fraction


@dataclass(frozen=True)
class CurveGeometry:
    genus: int
    tau: Optional[GaussianRational] = None

    def __post_init__(self) -> None:
        if self.genus not in (0, 1):
            raise ValueError(f"genus must be 0 or 1, got {self.genus}")
        if self.genus == 1:
            if self.tau is None:
                raise ValueError("an elliptic curve needs a lattice parameter tau")
            tau = GaussianRational.coerce(self.tau)
            if tau.im == 0:
                raise ValueError("tau must have nonzero imaginary part")
            object.__setattr__(self, "tau", tau)
        elif self.tau is not None:
            raise ValueError("a rational curve has no lattice")

    @classmethod
    def rational(cls) -> "CurveGeometry":
        return cls(0)

    @classmethod
    def elliptic(cls, tau: object) -> "CurveGeometry":
        return cls(1, GaussianRational.coerce(tau))

    def to_lattice_coords(self, w: GaussianRational) -> tuple[Fraction, Fraction]:
        """Write w = alpha + beta*tau with rational alpha, beta."""
        assert self.tau is not None
        beta = w.im / self.tau.im
        alpha = w.re - beta * self.tau.re
        return alpha, beta


def _reduce(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, order=True)
class EllipticPoint:
    """a + b*tau in C/Lambda, stored reduced to [0, 1)^2."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _reduce(to_fraction(self.a)))
        object.__setattr__(self, "b", _reduce(to_fraction(self.b)))

    def __add__(self, other: "EllipticPoint") -> "EllipticPoint":
        return EllipticPoint(self.a + other.a, self.b + other.b)

    def __neg__(self) -> "EllipticPoint":
        return EllipticPoint(-self.a, -self.b)

    def __sub__(self, other: "EllipticPoint") -> "EllipticPoint":
        return self + (-other)

    def __mul__(self, n: int) -> "EllipticPoint":
        return EllipticPoint(self.a * n, self.b * n)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def halves(self) -> list["EllipticPoint"]:
        """All four solutions p of 2p = self."""
        base = EllipticPoint(self.a / 2, self.b / 2)
        h = Fraction(1, 2)
        return [base + EllipticPoint(s, t) for s in (0, h) for t in (0, h)]

    def to_pair(self) -> list[str]:
        return [format_fraction(self.a), format_fraction(self.b)]

    def __str__(self) -> str:
        return f"({format_fraction(self.a)}, {format_fraction(self.b)})"


ORIGIN = EllipticPoint()


@dataclass(frozen=True)
class RationalPoint:
    """A labelled point on a rational curve; identity is the label."""

    label: str
    coord: Optional[GaussianRational] = field(default=None, compare=False)

    def __str__(self) -> str:
        return self.label


CurvePoint = Union[EllipticPoint, RationalPoint]


def point_matches(geometry: CurveGeometry, p: object) -> bool:
    if geometry.genus == 1:
        return isinstance(p, EllipticPoint)
    return isinstance(p, RationalPoint)
