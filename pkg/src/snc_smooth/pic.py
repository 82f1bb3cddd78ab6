"""Line bundle classes on double curves.

Pic(P^1) is Z. Pic of an elliptic curve is Z x C/Lambda through the
Abel-Jacobi map, so a class is a degree plus a point of the Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .curves import ORIGIN, CurveGeometry, CurvePoint, EllipticPoint, RationalPoint
from .exact import GaussianRational


class MixedGeometry(ValueError):
    pass


class NotAnAutomorphism(ValueError):
    pass


@dataclass(frozen=True)
class LineBundleClass:
    geometry: CurveGeometry
    degree: int
    jacobian_point: Optional[EllipticPoint] = None

    def __post_init__(self) -> None:
        if self.geometry.genus == 1:
            if self.jacobian_point is None:
                object.__setattr__(self, "jacobian_point", ORIGIN)
        elif self.jacobian_point is not None:
            raise ValueError("a class on a rational curve has no jacobian point")

    def __neg__(self) -> "LineBundleClass":
        jac = -self.jacobian_point if self.jacobian_point is not None else None
        return LineBundleClass(self.geometry, -self.degree, jac)

    def __str__(self) -> str:
        if self.jacobian_point is None:
            return f"O({self.degree})"
        return f"O({self.degree}; {self.jacobian_point})"


def trivial(geometry: CurveGeometry) -> LineBundleClass:
    return LineBundleClass(geometry, 0)


def tensor(*classes: LineBundleClass) -> LineBundleClass:
    if not classes:
        raise ValueError("tensor of no classes has no geometry")
    geometry = classes[0].geometry
    degree = 0
    jac = ORIGIN if geometry.genus == 1 else None
    for c in classes:
        if c.geometry != geometry:
            raise MixedGeometry(f"cannot tensor classes on {geometry} and {c.geometry}")
        degree += c.degree
        if jac is not None:
            jac = jac + c.jacobian_point
    return LineBundleClass(geometry, degree, jac)


def is_trivial(c: LineBundleClass) -> bool:
    if c.degree != 0:
        return False
    return c.jacobian_point is None or c.jacobian_point.is_zero()


def point_class(geometry: CurveGeometry, p: CurvePoint) -> LineBundleClass:
    """The class of the degree-one divisor [p]."""
    if geometry.genus == 1:
        if not isinstance(p, EllipticPoint):
            raise TypeError("elliptic curve points are lattice coordinates")
        return LineBundleClass(geometry, 1, p)
    if not isinstance(p, RationalPoint):
        raise TypeError("rational curve points are labels")
    return LineBundleClass(geometry, 1)


def divisor_class(geometry: CurveGeometry, points: Iterable[CurvePoint]) -> LineBundleClass:
    return tensor(trivial(geometry), *(point_class(geometry, p) for p in points))


def lattice_action(geometry: CurveGeometry, unit: GaussianRational) -> tuple[int, int, int, int]:
    """Integer matrix (p, q, r, s) of z -> unit*z: 1 -> p + q tau, tau -> r + s tau."""
    unit = GaussianRational.coerce(unit)
    image_one = geometry.to_lattice_coords(unit)
    image_tau = geometry.to_lattice_coords(unit * geometry.tau)
    entries = (*image_one, *image_tau)
    if any(e.denominator != 1 for e in entries):
        raise NotAnAutomorphism(f"z -> ({unit}) z does not preserve the lattice")
    p, q, r, s = (int(e) for e in entries)
    if p * s - q * r not in (1, -1):
        raise NotAnAutomorphism(f"z -> ({unit}) z is not invertible on the lattice")
    return p, q, r, s


def apply_twist(c: LineBundleClass, twist: object) -> LineBundleClass:
    """Push a class forward along z -> twist*z (a lattice automorphism)."""
    if c.geometry.genus == 0:
        return c
    p, q, r, s = lattice_action(c.geometry, GaussianRational.coerce(twist))
    a, b = c.jacobian_point.a, c.jacobian_point.b
    moved = EllipticPoint(a * p + b * r, a * q + b * s)
    return LineBundleClass(c.geometry, c.degree, moved)


def twist_point(geometry: CurveGeometry, p: CurvePoint, twist: object) -> CurvePoint:
    if geometry.genus == 0:
        return p
    return apply_twist(point_class(geometry, p), twist).jacobian_point

