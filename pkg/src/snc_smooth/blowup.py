"""Blow-ups at points of double curves, plans, mismatch detection and the
trivializing planner."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

from .canonical import collective_normal_class
from .core import Component, CurveSide, DoubleCurve, SncSurface
from .curves import CurvePoint, EllipticPoint, RationalPoint, point_matches
from .pic import LineBundleClass, is_trivial


class BlowupError(ValueError):
    pass


class CenterOnTriplePoint(BlowupError):
    pass


class CenterNotOnCurve(BlowupError):
    pass


class InvalidStep(BlowupError):
    pass


class PlanStepError(BlowupError):
    def __init__(self, step_index: int, cause: BlowupError):
        super().__init__(f"step {step_index}: {cause}")
        self.step_index = step_index
        self.cause = cause


class Infeasible(ValueError):
    def __init__(self, curve_id: str, reason: str):
        super().__init__(f"infeasible at {curve_id}: {reason}")
        self.curve_id = curve_id
        self.reason = reason


@dataclass(frozen=True)
class OneSide:
    """Blow up only the given component. ``side`` disambiguates self-glued curves."""

    component: str
    side: Optional[int] = None


@dataclass(frozen=True)
class BothSides:
    pass


Mode = Union[OneSide, BothSides]


@dataclass(frozen=True)
class BlowupStep:
    curve: str
    points: tuple[CurvePoint, ...]
    mode: Mode = field(default_factory=BothSides)


@dataclass(frozen=True)
class BlowupPlan:
    steps: tuple[BlowupStep, ...] = ()

    def incidences(self, surface: SncSurface) -> dict[str, int]:
        """Point-side incidences per curve (a two-sided point counts twice)."""
        out: dict[str, int] = defaultdict(int)
        for step in self.steps:
            curve = surface.curve(step.curve)
            out[step.curve] += len(step.points) * len(affected_sides(curve, step.mode))
        return dict(out)

    def point_count(self) -> int:
        return sum(len(s.points) for s in self.steps)


@dataclass(frozen=True)
class TransformLog:
    """Where each original marked point ended up, keyed by (curve, point)."""

    entries: tuple[tuple[str, CurvePoint, CurvePoint], ...]

    def image(self, curve_id: str, point: CurvePoint) -> CurvePoint:
        for cid, src, dst in self.entries:
            if cid == curve_id and src == point:
                return dst
        raise KeyError((curve_id, point))


@dataclass(frozen=True)
class MismatchDiagnostic:
    curve: str
    step: int
    message: str

    def __str__(self) -> str:
        return self.message


def affected_sides(curve: DoubleCurve, mode: Mode) -> list[int]:
    if isinstance(mode, BothSides):
        return list(range(len(curve.sides)))
    matches = [k for k, s in enumerate(curve.sides) if s.component == mode.component]
    if not matches:
        raise InvalidStep(f"{mode.component} is not a side of double curve {curve.id}")
    if mode.side is not None:
        if mode.side not in matches:
            raise InvalidStep(f"side {mode.side} of {curve.id} is not on {mode.component}")
        return [mode.side]
    return matches[:1]


def _check_step(surface: SncSurface, step: BlowupStep) -> DoubleCurve:
    try:
        curve = surface.curve(step.curve)
    except KeyError:
        raise InvalidStep(f"unknown double curve {step.curve}") from None
    for p in step.points:
        if not point_matches(curve.geometry, p):
            raise CenterNotOnCurve(f"{p!r} is not a point of {curve.id}")
    if len(set(step.points)) != len(step.points):
        raise InvalidStep(f"repeated blow-up center on {curve.id}")
    marks = set(curve.mark_locations())
    for p in step.points:
        if p in marks:
            raise CenterOnTriplePoint(f"center {p} on {curve.id} is a triple point")
    affected_sides(curve, step.mode)
    return curve


def _next_exceptional_name(comp: Component) -> str:
    n = comp.blowup_count + 1
    name = f"E{n}"
    while name in comp.class_basis:
        name += "'"
    return name


def _blow_up_point(surface: SncSurface, curve_id: str, side: int, p: CurvePoint) -> SncSurface:
    curve = surface.curve(curve_id)
    comp = surface.component(curve.sides[side].component)
    new_comp = replace(
        comp,
        class_basis=comp.class_basis + (_next_exceptional_name(comp),),
        canonical_class=(
            comp.canonical_class + (1,) if comp.canonical_class is not None else None
        ),
        euler_char=comp.euler_char + 1,
        blowup_count=comp.blowup_count + 1,
    )
    curves = []
    for d in surface.double_curves:
        sides = []
        for k, s in enumerate(d.sides):
            if s.component != comp.id:
                sides.append(s)
                continue
            if d.id == curve_id and k == side:
                normal = s.normal_class
                jac = normal.jacobian_point
                if jac is not None:
                    jac = jac - p
                sides.append(CurveSide(
                    s.component,
                    s.curve_class + (-1,),
                    LineBundleClass(normal.geometry, normal.degree - 1, jac),
                ))
            else:
                sides.append(replace(s, curve_class=s.curve_class + (0,)))
        curves.append(replace(d, sides=tuple(sides)))
    return replace(surface, double_curves=tuple(curves)).with_component(new_comp)


def blow_up(surface: SncSurface, step: BlowupStep) -> SncSurface:
    curve = _check_step(surface, step)
    for k in affected_sides(curve, step.mode):
        for p in step.points:
            surface = _blow_up_point(surface, curve.id, k, p)
    return surface


def run_plan(surface: SncSurface, plan: BlowupPlan) -> tuple[SncSurface, TransformLog]:
    original = surface
    for i, step in enumerate(plan.steps):
        try:
            surface = blow_up(surface, step)
        except BlowupError as exc:
            raise PlanStepError(i, exc) from exc
    # centers avoid every marked point, so proper transforms fix them
    entries = tuple(
        (d.id, loc, surface.curve(d.id).triple_marks[j].location)
        for d in original.double_curves
        for j, loc in enumerate(d.mark_locations())
    )
    return surface, TransformLog(entries)


def detect_mismatch(surface: SncSurface, plan: BlowupPlan) -> list[MismatchDiagnostic]:
    """Steps that would destroy the identification of the two sides of a curve.

    A center at a triple point also lies on the other double curves through
    that point inside the blown-up component, so those curves gain a record
    on one side only.
    """
    out: list[MismatchDiagnostic] = []
    records: dict[tuple[str, int], dict[str, int]] = defaultdict(dict)
    for idx, step in enumerate(plan.steps):
        try:
            curve = surface.curve(step.curve)
            sides = affected_sides(curve, step.mode)
        except (KeyError, InvalidStep):
            continue
        by_location = {m.location: m.triple_point for m in curve.triple_marks}
        hit = sorted({by_location[p] for p in step.points if p in by_location})
        if not hit:
            continue
        out.append(MismatchDiagnostic(
            curve.id, idx,
            f"step {idx} on {curve.id} has centers at triple point(s) {', '.join(hit)}",
        ))
        for k in sides:
            comp = curve.sides[k].component
            for other, j in surface.curves_on(comp):
                if other.id == curve.id:
                    continue
                marked = {m.triple_point for m in other.triple_marks}
                for tp in hit:
                    if tp in marked:
                        records[(other.id, j)].setdefault(tp, idx)
    for d in surface.double_curves:
        if len(d.sides) != 2:
            continue
        r0, r1 = records.get((d.id, 0), {}), records.get((d.id, 1), {})
        if set(r0) != set(r1):
            diff = sorted(set(r0) ^ set(r1))
            step = min({**r0, **r1}[tp] for tp in diff)
            only = ((0, set(r0) - set(r1)), (1, set(r1) - set(r0)))
            where = [d.sides[k].component for k, extra in only if extra]
            out.append(MismatchDiagnostic(
                d.id, step,
                f"sides of {d.id} carry different marked-point records: "
                f"{', '.join(diff)} blown up on {', '.join(where)} only",
            ))
    return out


def _best_counts(n: int) -> tuple[int, int, int]:
    """(two-sided, side-0, side-1) point counts removing degree n, fewest points first."""
    candidates = [
        (b, s0, s1)
        for b in range(n + 1)
        for s0 in range(n + 1)
        for s1 in range(n + 1)
        if 2 * b + s0 + s1 == n
    ]
    return min(candidates, key=lambda c: (c[0] + c[1] + c[2], -c[0], c[2]))


def _rational_points(curve: DoubleCurve, count: int, taken: set[str]) -> list[RationalPoint]:
    out = []
    for m in itertools.count(1):
        if len(out) == count:
            return out
        label = f"{curve.id}.q{m}"
        if label not in taken:
            out.append(RationalPoint(label))


def _elliptic_points(
    curve: DoubleCurve, mults: list[int], target: EllipticPoint
) -> list[EllipticPoint]:
    """Distinct points p_i off the marks with sum(mults[i] * p_i) == target."""
    forbidden = set(curve.mark_locations())
    for shift in itertools.count():
        free = [
            EllipticPoint(Fraction(m + 1 + shift, 97), Fraction((m + 1) * (m + 3 + shift), 89))
            for m in range(len(mults) - 1)
        ]
        rest = target
        for p, k in zip(free, mults):
            rest = rest - p * k
        last_options = [rest] if mults[-1] == 1 else rest.halves()
        for last in last_options:
            pts = free + [last]
            if len(set(pts)) == len(pts) and not forbidden & set(pts):
                return pts
    raise AssertionError("unreachable")


def plan_blowups_to_trivialize(surface: SncSurface) -> BlowupPlan:
    """A plan with the fewest points making every collective class trivial."""
    collective = collective_normal_class(surface)
    steps: list[BlowupStep] = []
    for curve in sorted(surface.double_curves, key=lambda d: d.id):
        c = collective[curve.id]
        if c.degree < 0:
            raise Infeasible(curve.id, f"collective class has degree {c.degree}")
        if c.degree == 0:
            if not is_trivial(c):
                raise Infeasible(curve.id, f"degree-0 class {c} is not trivial")
            continue
        b, s0, s1 = _best_counts(c.degree)
        mults = [2] * b + [1] * (s0 + s1)
        if curve.geometry.genus == 1:
            pts: list[CurvePoint] = list(_elliptic_points(curve, mults, c.jacobian_point))
        else:
            taken = {p.label for p in curve.mark_locations()}
            pts = list(_rational_points(curve, len(mults), taken))
        groups = [
            (pts[:b], BothSides()),
            (pts[b:b + s0], OneSide(curve.sides[0].component, 0 if curve.is_self_glued() else None)),
            (pts[b + s0:], OneSide(curve.sides[1].component, 1 if curve.is_self_glued() else None)),
        ]
        for group, mode in groups:
            if group:
                steps.append(BlowupStep(curve.id, tuple(group), mode))
    return BlowupPlan(tuple(steps))
