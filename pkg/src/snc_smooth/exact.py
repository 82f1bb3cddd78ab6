"""Exact arithmetic over the Gaussian rationals Q(i) and row reduction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


def to_fraction(value: object) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected so that inexact values never leak into exact code.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class GaussianRational:
    """An element re + im*i of Q(i)."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", to_fraction(self.re))
        object.__setattr__(self, "im", to_fraction(self.im))

    @classmethod
    def coerce(cls, value: object) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(to_fraction(value[0]), to_fraction(value[1]))
        return cls(to_fraction(value), Fraction(0))

    @classmethod
    def i_power(cls, k: int) -> "GaussianRational":
        return [cls(1, 0), cls(0, 1), cls(-1, 0), cls(0, -1)][k % 4]

    def __add__(self, other: object) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: object) -> "GaussianRational":
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other: object) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: object) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other: object) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * o.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other: object) -> "GaussianRational":
        return GaussianRational.coerce(other) / self

    def __eq__(self, other: object) -> bool:
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_pair(self) -> list[str]:
        return [format_fraction(self.re), format_fraction(self.im)]

    def __repr__(self) -> str:
        return f"GaussianRational({format_fraction(self.re)}, {format_fraction(self.im)})"


Q = GaussianRational
ZERO = Q(0, 0)
ONE = Q(1, 0)


def row_reduce(
    rows: Sequence[Sequence[GaussianRational]], ncols: int
) -> tuple[list[list[GaussianRational]], list[int]]:
    """Reduced row echelon form. Returns the nonzero rows and pivot columns."""
    m = [[Q.coerce(v) for v in row] for row in rows]
    for row in m:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = ONE / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[GaussianRational]], ncols: int) -> int:
    return len(row_reduce(rows, ncols)[1])


def kernel_basis(
    rows: Sequence[Sequence[GaussianRational]], ncols: int
) -> list[list[GaussianRational]]:
    """Basis of the right kernel, one vector per free column."""
    reduced, pivots = row_reduce(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def mat_vec(
    rows: Sequence[Sequence[GaussianRational]], vec: Iterable[GaussianRational]
) -> list[GaussianRational]:
    v = list(vec)
    out = []
    for row in rows:
        acc = ZERO
        for a, b in zip(row, v):
            acc = acc + a * b
        out.append(acc)
    return out
