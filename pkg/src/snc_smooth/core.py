"""Declarative model of a simple normal crossing surface.

Components are described by divisor-class data (basis, intersection form,
canonical class, Euler characteristic), not by equations. Every check in
the package consumes only this data.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .curves import CurveGeometry, CurvePoint, point_matches
from .exact import GaussianRational
from .pic import LineBundleClass


class UndefinedForm(ValueError):
    """Raised when a component carries no intersection form."""


class ComponentKind(str, enum.Enum):
    PLANE = "ProjectivePlane"
    QUADRIC = "Quadric"
    RULED = "RuledElliptic"
    DECLARED = "Declared"


_BASE_EULER = {ComponentKind.PLANE: 3, ComponentKind.QUADRIC: 4, ComponentKind.RULED: 0}
_BASE_BASIS = {
    ComponentKind.PLANE: ("H",),
    ComponentKind.QUADRIC: ("A", "B"),
    ComponentKind.RULED: ("D0", "Dinf"),
}
_BASE_CANONICAL = {
    ComponentKind.PLANE: (-3,),
    ComponentKind.QUADRIC: (-2, -2),
    ComponentKind.RULED: (-1, -1),
}


@dataclass(frozen=True)
class Component:
    """One irreducible component together with its divisor-class data.

    ``class_basis`` lists the base classes followed by one exceptional class
    per blow-up. For ``RuledElliptic`` the base classes are the zero and
    infinity sections, with ``ruled_degree`` the degree of the line bundle.
    """

    id: str
    kind: ComponentKind
    class_basis: tuple[str, ...]
    canonical_class: Optional[tuple[int, ...]]
    euler_char: int
    blowup_count: int = 0
    ruled_degree: Optional[int] = None
    base: Optional[CurveGeometry] = None
    declared_form: Optional[tuple[tuple[int, ...], ...]] = None

    @classmethod
    def plane(cls, id: str) -> "Component":
        k = ComponentKind.PLANE
        return cls(id, k, _BASE_BASIS[k], _BASE_CANONICAL[k], _BASE_EULER[k])

    @classmethod
    def quadric(cls, id: str) -> "Component":
        k = ComponentKind.QUADRIC
        return cls(id, k, _BASE_BASIS[k], _BASE_CANONICAL[k], _BASE_EULER[k])

    @classmethod
    def ruled(cls, id: str, degree: int, base: CurveGeometry) -> "Component":
        k = ComponentKind.RULED
        return cls(
            id, k, _BASE_BASIS[k], _BASE_CANONICAL[k], _BASE_EULER[k],
            ruled_degree=degree, base=base,
        )

    @classmethod
    def declared(
        cls,
        id: str,
        basis: Sequence[str],
        euler_char: int,
        form: Optional[Sequence[Sequence[int]]] = None,
        canonical: Optional[Sequence[int]] = None,
    ) -> "Component":
        return cls(
            id,
            ComponentKind.DECLARED,
            tuple(basis),
            tuple(canonical) if canonical is not None else None,
            euler_char,
            declared_form=tuple(tuple(r) for r in form) if form is not None else None,
        )

    @property
    def base_rank(self) -> int:
        return len(self.class_basis) - self.blowup_count

    def base_form(self) -> Optional[list[list[int]]]:
        if self.kind is ComponentKind.PLANE:
            return [[1]]
        if self.kind is ComponentKind.QUADRIC:
            return [[0, 1], [1, 0]]
        if self.kind is ComponentKind.RULED:
            d = self.ruled_degree or 0
            return [[d, 0], [0, -d]]
        if self.declared_form is None:
            return None
        return [list(r) for r in self.declared_form]

    def intersection_form(self) -> list[list[int]]:
        base = self.base_form()
        if base is None:
            raise UndefinedForm(f"component {self.id} declares no intersection form")
        n = len(self.class_basis)
        r = len(base)
        form = [[0] * n for _ in range(n)]
        for i in range(r):
            for j in range(r):
                form[i][j] = base[i][j]
        for i in range(r, n):
            form[i][i] = -1
        return form

    def has_class_data(self) -> bool:
        return self.canonical_class is not None


def self_intersection(component: Component, curve_class: Sequence[int]) -> int:
    return intersect(component, curve_class, curve_class)


def intersect(component: Component, a: Sequence[int], b: Sequence[int]) -> int:
    form = component.intersection_form()
    n = len(form)
    if len(a) != n or len(b) != n:
        raise ValueError(
            f"class vectors must have length {n} on component {component.id}"
        )
    return sum(a[i] * form[i][j] * b[j] for i in range(n) for j in range(n))


@dataclass(frozen=True)
class CurveSide:
    component: str
    curve_class: tuple[int, ...]
    normal_class: LineBundleClass


@dataclass(frozen=True)
class TripleMark:
    triple_point: str
    location: CurvePoint


@dataclass(frozen=True)
class DoubleCurve:
    """A double curve with its two sides.

    ``twist`` is the residue coefficient used in the rho matrix: the row of
    this curve is e(side 0) + twist * e(side 1). Sign conventions of the
    residues are folded into it when a scenario is built. ``gluing_map`` is
    the lattice unit u such that a side-1 point z sits at u*z in the
    reference coordinate of the curve (genus 1 only).
    """

    id: str
    geometry: CurveGeometry
    sides: tuple[CurveSide, ...]
    triple_marks: tuple[TripleMark, ...] = ()
    twist: Optional[GaussianRational] = None
    gluing_map: Optional[GaussianRational] = None

    def side_components(self) -> tuple[str, ...]:
        return tuple(s.component for s in self.sides)

    def mark_locations(self) -> tuple[CurvePoint, ...]:
        return tuple(m.location for m in self.triple_marks)

    def is_self_glued(self) -> bool:
        return len(self.sides) == 2 and self.sides[0].component == self.sides[1].component


@dataclass(frozen=True)
class TripleIncidence:
    component: str
    curves: tuple[str, str]


@dataclass(frozen=True)
class TriplePoint:
    id: str
    incident: tuple[TripleIncidence, ...]
    sigma: Mapping[tuple[str, str, str], int] = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.id, self.incident, tuple(sorted(self.sigma.items()))))

    def sigma_value(self, order: Sequence[str]) -> Optional[int]:
        """sigma for any ordering of the incident components, via alternation."""
        target = tuple(order)
        for key, value in self.sigma.items():
            if sorted(key) == sorted(target):
                return value * permutation_sign(key, target)
        return None


def permutation_sign(src: Sequence[str], dst: Sequence[str]) -> int:
    perm = [list(src).index(x) for x in dst]
    sign = 1
    for i, j in itertools.combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            sign = -sign
    return sign


@dataclass(frozen=True)
class SncSurface:
    components: tuple[Component, ...]
    double_curves: tuple[DoubleCurve, ...]
    triple_points: tuple[TriplePoint, ...] = ()

    def component(self, cid: str) -> Component:
        for c in self.components:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def curve(self, did: str) -> DoubleCurve:
        for d in self.double_curves:
            if d.id == did:
                return d
        raise KeyError(did)

    def component_index(self, cid: str) -> int:
        return [c.id for c in self.components].index(cid)

    def epsilon(self, ci: str, cj: str) -> int:
        """(j - i)/|j - i| for the positions of the two components."""
        i, j = self.component_index(ci), self.component_index(cj)
        if i == j:
            raise ValueError("epsilon is undefined on the diagonal")
        return 1 if j > i else -1

    def curves_on(self, cid: str) -> list[tuple[DoubleCurve, int]]:
        return [
            (d, k)
            for d in self.double_curves
            for k, s in enumerate(d.sides)
            if s.component == cid
        ]

    def with_component(self, comp: Component) -> "SncSurface":
        return replace(
            self,
            components=tuple(comp if c.id == comp.id else c for c in self.components),
        )

    def with_curve(self, curve: DoubleCurve) -> "SncSurface":
        return replace(
            self,
            double_curves=tuple(
                curve if d.id == curve.id else d for d in self.double_curves
            ),
        )


@dataclass(frozen=True, order=True)
class Diagnostic:
    code: str
    message: str
    ids: tuple[str, ...] = ()

    def __str__(self) -> str:
        return self.message


def validate_structure(surface: SncSurface) -> list[Diagnostic]:
    """Every violated structural invariant, sorted. Empty means well formed."""
    out: list[Diagnostic] = []
    out += _check_ids(surface)
    comps = {c.id: c for c in surface.components}
    for c in surface.components:
        out += _check_component(c)
    for d in surface.double_curves:
        out += _check_curve(d, comps)
    out += _check_triple_points(surface)
    return sorted(set(out))


def _check_ids(surface: SncSurface) -> list[Diagnostic]:
    out = []
    for label, items in (
        ("component", surface.components),
        ("double curve", surface.double_curves),
        ("triple point", surface.triple_points),
    ):
        for key, n in Counter(x.id for x in items).items():
            if n > 1:
                out.append(Diagnostic("duplicate-id", f"duplicate {label} id {key}", (key,)))
    return out


def _check_component(c: Component) -> list[Diagnostic]:
    out = []
    if c.kind in _BASE_EULER:
        if c.euler_char - c.blowup_count != _BASE_EULER[c.kind]:
            out.append(Diagnostic(
                "euler-char",
                f"component {c.id}: euler_char {c.euler_char} inconsistent with "
                f"{c.kind.value} blown up {c.blowup_count} times",
                (c.id,),
            ))
        base = _BASE_CANONICAL[c.kind]
        if c.canonical_class is None or tuple(c.canonical_class[: len(base)]) != base:
            out.append(Diagnostic(
                "canonical-class",
                f"component {c.id}: canonical class must start with {list(base)}",
                (c.id,),
            ))
        if c.kind is ComponentKind.RULED and (c.base is None or c.base.genus != 1):
            out.append(Diagnostic(
                "ruled-base", f"component {c.id}: ruled surface needs an elliptic base", (c.id,)
            ))
    if c.canonical_class is not None:
        if len(c.canonical_class) != len(c.class_basis):
            out.append(Diagnostic(
                "class-length",
                f"component {c.id}: canonical class has wrong length",
                (c.id,),
            ))
        elif any(c.canonical_class[i] != 1 for i in range(c.base_rank, len(c.class_basis))):
            out.append(Diagnostic(
                "canonical-class",
                f"component {c.id}: each exceptional class enters K with coefficient 1",
                (c.id,),
            ))
    form = c.base_form()
    if form is not None:
        r = c.base_rank
        if len(form) != r or any(len(row) != r for row in form):
            out.append(Diagnostic(
                "form-shape", f"component {c.id}: intersection form has wrong shape", (c.id,)
            ))
        elif any(form[i][j] != form[j][i] for i in range(r) for j in range(r)):
            out.append(Diagnostic(
                "form-symmetry", f"component {c.id}: intersection form is not symmetric", (c.id,)
            ))
    return out


def _check_curve(d: DoubleCurve, comps: Mapping[str, Component]) -> list[Diagnostic]:
    out = []
    if len(d.sides) != 2:
        out.append(Diagnostic(
            "arity", f"double curve {d.id} requires two sides, has {len(d.sides)}", (d.id,)
        ))
    for k, side in enumerate(d.sides):
        comp = comps.get(side.component)
        if comp is None:
            out.append(Diagnostic(
                "dangling",
                f"double curve {d.id} side {k} references unknown component {side.component}",
                (d.id, side.component),
            ))
            continue
        if side.normal_class.geometry != d.geometry:
            out.append(Diagnostic(
                "normal-geometry",
                f"double curve {d.id} side {k}: normal class lives on another curve",
                (d.id,),
            ))
        if len(side.curve_class) != len(comp.class_basis):
            out.append(Diagnostic(
                "class-length",
                f"double curve {d.id} side {k}: class vector length "
                f"{len(side.curve_class)} but {comp.id} has {len(comp.class_basis)} classes",
                (d.id, comp.id),
            ))
            continue
        if comp.base_form() is not None:
            expected = self_intersection(comp, side.curve_class)
            if expected != side.normal_class.degree:
                out.append(Diagnostic(
                    "normal-degree",
                    f"double curve {d.id} side {k}: normal degree {side.normal_class.degree} "
                    f"but self-intersection on {comp.id} is {expected}",
                    (d.id, comp.id),
                ))
    locations = d.mark_locations()
    for loc in locations:
        if not point_matches(d.geometry, loc):
            out.append(Diagnostic(
                "mark-type", f"double curve {d.id}: mark {loc} has the wrong point type", (d.id,)
            ))
    if len(set(locations)) != len(locations):
        out.append(Diagnostic(
            "mark-distinct", f"double curve {d.id}: triple mark locations repeat", (d.id,)
        ))
    return out


def _check_triple_points(surface: SncSurface) -> list[Diagnostic]:
    out = []
    curves = {d.id: d for d in surface.double_curves}
    comps = {c.id for c in surface.components}
    known = {t.id for t in surface.triple_points}
    referencing: dict[str, list[str]] = {t: [] for t in known}
    for d in surface.double_curves:
        for m in d.triple_marks:
            if m.triple_point not in known:
                out.append(Diagnostic(
                    "dangling",
                    f"double curve {d.id} marks unknown triple point {m.triple_point}",
                    (d.id, m.triple_point),
                ))
            else:
                referencing[m.triple_point].append(d.id)
    for t in surface.triple_points:
        inc_comps = [i.component for i in t.incident]
        if len(t.incident) != 3 or len(set(inc_comps)) != 3:
            out.append(Diagnostic(
                "triple-arity",
                f"triple point {t.id} needs three distinct incident components",
                (t.id,),
            ))
        for inc in t.incident:
            if inc.component not in comps:
                out.append(Diagnostic(
                    "dangling",
                    f"triple point {t.id} references unknown component {inc.component}",
                    (t.id, inc.component),
                ))
            for cid in inc.curves:
                d = curves.get(cid)
                if d is None:
                    out.append(Diagnostic(
                        "dangling",
                        f"triple point {t.id} references unknown double curve {cid}",
                        (t.id, cid),
                    ))
                    continue
                if inc.component not in d.side_components():
                    out.append(Diagnostic(
                        "triple-incidence",
                        f"triple point {t.id}: {cid} does not lie on {inc.component}",
                        (t.id, cid),
                    ))
                if t.id not in {m.triple_point for m in d.triple_marks}:
                    out.append(Diagnostic(
                        "triple-mark",
                        f"triple point {t.id}: double curve {cid} does not mark it",
                        (t.id, cid),
                    ))
        if len(set(referencing[t.id])) != 3:
            out.append(Diagnostic(
                "triple-closure",
                f"triple point {t.id} is marked by {len(set(referencing[t.id]))} double curves, "
                "expected 3",
                (t.id,),
            ))
        out += _check_sigma(t, set(inc_comps))
    return out


def _check_sigma(t: TriplePoint, incident: set[str]) -> list[Diagnostic]:
    out = []
    if not t.sigma:
        return [Diagnostic("sigma-missing", f"triple point {t.id} has no sigma", (t.id,))]
    items = list(t.sigma.items())
    for key, value in items:
        if value not in (1, -1) or set(key) != incident or len(set(key)) != 3:
            out.append(Diagnostic(
                "sigma-entry", f"triple point {t.id}: bad sigma entry {key}", (t.id,)
            ))
            return out
    ref_key, ref_val = items[0]
    for key, value in items[1:]:
        if value != ref_val * permutation_sign(ref_key, key):
            out.append(Diagnostic(
                "sigma-alternation",
                f"sigma not alternating at triple point {t.id}",
                (t.id,),
            ))
            break
    return out


def incident_curve_classes(surface: SncSurface, cid: str) -> list[tuple[int, ...]]:
    return [d.sides[k].curve_class for d, k in surface.curves_on(cid)]


def relabel(surface: SncSurface, mapping: Mapping[str, str]) -> SncSurface:
    """Rename components; used to test invariance under relabeling."""
    def m(x: str) -> str:
        return mapping.get(x, x)

    comps = tuple(replace(c, id=m(c.id)) for c in surface.components)
    curves = tuple(
        replace(d, sides=tuple(replace(s, component=m(s.component)) for s in d.sides))
        for d in surface.double_curves
    )
    tps = tuple(
        TriplePoint(
            t.id,
            tuple(TripleIncidence(m(i.component), i.curves) for i in t.incident),
            {tuple(m(x) for x in k): v for k, v in t.sigma.items()},
        )
        for t in surface.triple_points
    )
    return SncSurface(comps, curves, tps)

