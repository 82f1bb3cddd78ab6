"""Scenario files: a versioned JSON encoding of a surface, a blow-up plan and
regression expectations.

Exact rationals are ints or "p/q" strings and Gaussian rationals are
two-element arrays. Genus-0 points are labels (optionally with a coordinate);
genus-1 points are lattice coordinates ["a", "b"] meaning a + b*tau.

Marks and blow-up centers are written in the reference coordinate of the
curve (side 0). A declared side-1 normal class is written in the side-1
coordinate and moved to the reference one through ``gluing_map``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Annotated, Literal, Optional, Union

from pydantic import AfterValidator, BaseModel, ConfigDict, ValidationError, model_validator

from .blowup import BlowupPlan, BlowupStep, BothSides, OneSide
from .core import (
    Component,
    ComponentKind,
    CurveSide,
    DoubleCurve,
    SncSurface,
    TripleIncidence,
    TripleMark,
    TriplePoint,
    UndefinedForm,
    self_intersection,
)
from .curves import CurveGeometry, CurvePoint, EllipticPoint, RationalPoint
from .exact import GaussianRational, format_fraction, to_fraction
from .pic import LineBundleClass, NotAnAutomorphism, twist_point

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ParseError(ScenarioError):
    """Text is not valid JSON."""


class SchemaError(ScenarioError):
    """Unknown, missing or ill-typed fields."""


class SemanticError(ScenarioError):
    """Well-typed but inconsistent, such as references to unknown ids."""


def _rational(value: Union[int, str]) -> Union[int, str]:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    try:
        to_fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {value!r}") from exc
    return value


Rat = Annotated[Union[int, str], AfterValidator(_rational)]
Pair = tuple[Rat, Rat]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ComponentSpec(_Model):
    id: str
    kind: ComponentKind
    degree: Optional[int] = None
    base_tau: Optional[Pair] = None
    basis: Optional[list[str]] = None
    euler_char: Optional[int] = None
    form: Optional[list[list[int]]] = None
    canonical: Optional[list[int]] = None

    @model_validator(mode="after")
    def _kind_fields(self) -> "ComponentSpec":
        ruled = {"degree": self.degree, "base_tau": self.base_tau}
        declared = {
            "basis": self.basis, "euler_char": self.euler_char,
            "form": self.form, "canonical": self.canonical,
        }
        if self.kind is ComponentKind.RULED:
            missing = [k for k, v in ruled.items() if v is None]
            extra = [k for k, v in declared.items() if v is not None]
        elif self.kind is ComponentKind.DECLARED:
            missing = [k for k in ("basis", "euler_char") if declared[k] is None]
            extra = [k for k, v in ruled.items() if v is not None]
        else:
            missing = []
            extra = [k for k, v in {**ruled, **declared}.items() if v is not None]
        if missing:
            raise ValueError(f"{self.kind.value} component needs {', '.join(missing)}")
        if extra:
            raise ValueError(f"{self.kind.value} component does not take {', '.join(extra)}")
        return self


class NormalSpec(_Model):
    degree: int
    jacobian: Optional[Pair] = None


class SideSpec(_Model):
    component: str
    curve_class: list[int]
    normal: Optional[NormalSpec] = None


class LabelledPoint(_Model):
    label: str
    coord: Optional[Pair] = None


PointSpec = Union[str, LabelledPoint, Pair]


class MarkSpec(_Model):
    triple_point: str
    location: PointSpec


class CurveSpec(_Model):
    id: str
    genus: Literal[0, 1]
    tau: Optional[Pair] = None
    sides: list[SideSpec]
    triple_marks: list[MarkSpec] = []
    twist: Optional[Pair] = None
    gluing_map: Optional[Pair] = None


class IncidenceSpec(_Model):
    component: str
    curves: tuple[str, str]


class SigmaSpec(_Model):
    order: tuple[str, str, str]
    value: Literal[-1, 1]


class TripleSpec(_Model):
    id: str
    incident: list[IncidenceSpec]
    sigma: list[SigmaSpec] = []


class StepSpec(_Model):
    curve: str
    points: list[PointSpec]
    mode: Literal["BothSides", "OneSide"] = "BothSides"
    component: Optional[str] = None
    side: Optional[int] = None

    @model_validator(mode="after")
    def _mode_fields(self) -> "StepSpec":
        if self.mode == "OneSide" and self.component is None:
            raise ValueError("OneSide step needs a component")
        if self.mode == "BothSides" and (self.component is not None or self.side is not None):
            raise ValueError("BothSides step takes no component or side")
        return self


class ExpectedSpec(_Model):
    structure_ok: Optional[bool] = None
    d_semistable: Optional[bool] = None
    residue_ok: Optional[bool] = None
    h0_dim: Optional[int] = None
    chi_fiber: Optional[int] = None
    classification: Optional[str] = None
    collective_degrees: Optional[dict[str, int]] = None
    component_euler: Optional[dict[str, int]] = None
    anticanonical: Optional[dict[str, Optional[bool]]] = None
    plan_incidences: Optional[dict[str, int]] = None
    mismatch_curves: Optional[list[str]] = None


class ScenarioFile(_Model):
    schema_version: Literal[1]
    name: str
    description: Optional[str] = None
    components: list[ComponentSpec]
    double_curves: list[CurveSpec]
    triple_points: list[TripleSpec] = []
    blowup_plan: list[StepSpec] = []
    declared_b1: Optional[int] = None
    expected: Optional[ExpectedSpec] = None
    notes: list[str] = []


def _error_path(loc: tuple) -> str:
    return ".".join(str(p) for p in loc)


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and validate scenario text; ids must resolve."""
    if not text.strip():
        raise ParseError("empty scenario file")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    try:
        scenario = ScenarioFile.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(first["msg"], _error_path(first["loc"])) from exc
    check_references(scenario)
    to_surface(scenario)
    to_plan(scenario)
    return scenario


def check_references(scenario: ScenarioFile) -> None:
    comps = {c.id for c in scenario.components}
    curves = {d.id: d for d in scenario.double_curves}
    triples = {t.id for t in scenario.triple_points}
    for i, d in enumerate(scenario.double_curves):
        for k, s in enumerate(d.sides):
            if s.component not in comps:
                raise SemanticError(
                    f"unknown component {s.component}", f"double_curves.{i}.sides.{k}.component"
                )
        for k, m in enumerate(d.triple_marks):
            if m.triple_point not in triples:
                raise SemanticError(
                    f"unknown triple point {m.triple_point}",
                    f"double_curves.{i}.triple_marks.{k}.triple_point",
                )
    for i, t in enumerate(scenario.triple_points):
        for k, inc in enumerate(t.incident):
            if inc.component not in comps:
                raise SemanticError(
                    f"unknown component {inc.component}", f"triple_points.{i}.incident.{k}"
                )
            for cid in inc.curves:
                if cid not in curves:
                    raise SemanticError(
                        f"unknown double curve {cid}", f"triple_points.{i}.incident.{k}"
                    )
    for i, step in enumerate(scenario.blowup_plan):
        if step.curve not in curves:
            raise SemanticError(f"unknown double curve {step.curve}", f"blowup_plan.{i}.curve")
        if step.component is not None and step.component not in comps:
            raise SemanticError(
                f"unknown component {step.component}", f"blowup_plan.{i}.component"
            )


def _gauss(pair: Optional[Pair]) -> Optional[GaussianRational]:
    return None if pair is None else GaussianRational.coerce(list(pair))


def _geometry(spec: CurveSpec, path: str) -> CurveGeometry:
    try:
        if spec.genus == 1:
            if spec.tau is None:
                raise ValueError("an elliptic double curve needs tau")
            return CurveGeometry.elliptic(_gauss(spec.tau))
        return CurveGeometry(0, _gauss(spec.tau))
    except ValueError as exc:
        raise SemanticError(str(exc), path) from exc


def _point(geometry: CurveGeometry, spec: PointSpec, path: str) -> CurvePoint:
    if geometry.genus == 1:
        if not isinstance(spec, tuple):
            raise SemanticError("points on an elliptic curve are [a, b] lattice coordinates", path)
        return EllipticPoint(to_fraction(spec[0]), to_fraction(spec[1]))
    if isinstance(spec, str):
        return RationalPoint(spec)
    if isinstance(spec, LabelledPoint):
        return RationalPoint(spec.label, _gauss(spec.coord))
    raise SemanticError("points on a rational curve are labels", path)


def _component(spec: ComponentSpec, path: str) -> Component:
    if spec.kind is ComponentKind.PLANE:
        return Component.plane(spec.id)
    if spec.kind is ComponentKind.QUADRIC:
        return Component.quadric(spec.id)
    if spec.kind is ComponentKind.RULED:
        try:
            base = CurveGeometry.elliptic(_gauss(spec.base_tau))
        except ValueError as exc:
            raise SemanticError(str(exc), path + ".base_tau") from exc
        return Component.ruled(spec.id, spec.degree, base)
    return Component.declared(spec.id, spec.basis, spec.euler_char, spec.form, spec.canonical)


def _side(
    spec: SideSpec, k: int, comp: Component, geometry: CurveGeometry,
    gluing: Optional[GaussianRational], path: str,
) -> CurveSide:
    if spec.normal is None:
        try:
            degree = self_intersection(comp, spec.curve_class)
        except (UndefinedForm, ValueError) as exc:
            raise SemanticError(f"normal class omitted and {exc}", path) from exc
        return CurveSide(comp.id, tuple(spec.curve_class), LineBundleClass(geometry, degree))
    jac = None
    if spec.normal.jacobian is not None:
        if geometry.genus == 0:
            raise SemanticError("a rational curve has no jacobian point", path + ".normal")
        jac = _point(geometry, spec.normal.jacobian, path + ".normal.jacobian")
        if k == 1 and gluing is not None:
            try:
                jac = twist_point(geometry, jac, gluing)
            except NotAnAutomorphism as exc:
                raise SemanticError(str(exc), path) from exc
    return CurveSide(
        comp.id, tuple(spec.curve_class), LineBundleClass(geometry, spec.normal.degree, jac)
    )


def to_surface(scenario: ScenarioFile) -> SncSurface:
    comps = {
        c.id: _component(c, f"components.{i}") for i, c in enumerate(scenario.components)
    }
    curves = []
    for i, d in enumerate(scenario.double_curves):
        path = f"double_curves.{i}"
        geometry = _geometry(d, path)
        gluing = _gauss(d.gluing_map)
        sides = tuple(
            _side(s, k, comps[s.component], geometry, gluing, f"{path}.sides.{k}")
            for k, s in enumerate(d.sides)
        )
        marks = tuple(
            TripleMark(m.triple_point, _point(geometry, m.location, f"{path}.triple_marks.{k}"))
            for k, m in enumerate(d.triple_marks)
        )
        curves.append(DoubleCurve(d.id, geometry, sides, marks, _gauss(d.twist), gluing))
    triples = tuple(
        TriplePoint(
            t.id,
            tuple(TripleIncidence(inc.component, tuple(inc.curves)) for inc in t.incident),
            {tuple(s.order): s.value for s in t.sigma},
        )
        for t in scenario.triple_points
    )
    return SncSurface(tuple(comps.values()), tuple(curves), triples)


def to_plan(scenario: ScenarioFile) -> BlowupPlan:
    geometries = {
        d.id: _geometry(d, f"double_curves.{i}") for i, d in enumerate(scenario.double_curves)
    }
    steps = []
    for i, s in enumerate(scenario.blowup_plan):
        geometry = geometries[s.curve]
        points = tuple(
            _point(geometry, p, f"blowup_plan.{i}.points.{j}") for j, p in enumerate(s.points)
        )
        mode = BothSides() if s.mode == "BothSides" else OneSide(s.component, s.side)
        steps.append(BlowupStep(s.curve, points, mode))
    return BlowupPlan(tuple(steps))


def _rat(x: Fraction) -> Union[int, str]:
    return int(x) if x.denominator == 1 else format_fraction(x)


def _pair(g: Optional[GaussianRational]) -> Optional[Pair]:
    return None if g is None else (_rat(g.re), _rat(g.im))


def _point_spec(p: CurvePoint) -> PointSpec:
    if isinstance(p, EllipticPoint):
        return (_rat(p.a), _rat(p.b))
    if p.coord is not None:
        return LabelledPoint(label=p.label, coord=_pair(p.coord))
    return p.label


def _component_spec(c: Component) -> ComponentSpec:
    if c.blowup_count:
        raise ValueError(f"component {c.id} is already blown up; write the plan instead")
    if c.kind is ComponentKind.RULED:
        return ComponentSpec(id=c.id, kind=c.kind, degree=c.ruled_degree, base_tau=_pair(c.base.tau))
    if c.kind is ComponentKind.DECLARED:
        return ComponentSpec(
            id=c.id, kind=c.kind, basis=list(c.class_basis), euler_char=c.euler_char,
            form=[list(r) for r in c.declared_form] if c.declared_form is not None else None,
            canonical=list(c.canonical_class) if c.canonical_class is not None else None,
        )
    return ComponentSpec(id=c.id, kind=c.kind)


def _side_spec(side: CurveSide, k: int, comp: Component, d: DoubleCurve) -> SideSpec:
    normal = side.normal_class
    jac = normal.jacobian_point
    if k == 1 and jac is not None and d.gluing_map is not None:
        jac = twist_point(d.geometry, jac, 1 / d.gluing_map)
    try:
        implied = self_intersection(comp, side.curve_class)
    except (UndefinedForm, ValueError):
        implied = None
    if implied == normal.degree and (jac is None or jac.is_zero()):
        return SideSpec(component=side.component, curve_class=list(side.curve_class))
    return SideSpec(
        component=side.component,
        curve_class=list(side.curve_class),
        normal=NormalSpec(
            degree=normal.degree, jacobian=None if jac is None else (_rat(jac.a), _rat(jac.b))
        ),
    )


def from_surface(
    name: str,
    surface: SncSurface,
    plan: BlowupPlan = BlowupPlan(),
    *,
    description: Optional[str] = None,
    declared_b1: Optional[int] = None,
    expected: Optional[ExpectedSpec] = None,
    notes: tuple[str, ...] = (),
) -> ScenarioFile:
    comps = {c.id: c for c in surface.components}
    curves = [
        CurveSpec(
            id=d.id,
            genus=d.geometry.genus,
            tau=_pair(d.geometry.tau),
            sides=[_side_spec(s, k, comps[s.component], d) for k, s in enumerate(d.sides)],
            triple_marks=[
                MarkSpec(triple_point=m.triple_point, location=_point_spec(m.location))
                for m in d.triple_marks
            ],
            twist=_pair(d.twist),
            gluing_map=_pair(d.gluing_map),
        )
        for d in surface.double_curves
    ]
    triples = [
        TripleSpec(
            id=t.id,
            incident=[IncidenceSpec(component=i.component, curves=i.curves) for i in t.incident],
            sigma=[SigmaSpec(order=k, value=v) for k, v in t.sigma.items()],
        )
        for t in surface.triple_points
    ]
    steps = []
    for s in plan.steps:
        if isinstance(s.mode, OneSide):
            extra = {"mode": "OneSide", "component": s.mode.component, "side": s.mode.side}
        else:
            extra = {}
        steps.append(StepSpec(curve=s.curve, points=[_point_spec(p) for p in s.points], **extra))
    return ScenarioFile(
        schema_version=SCHEMA_VERSION,
        name=name,
        description=description,
        components=[_component_spec(c) for c in surface.components],
        double_curves=curves,
        triple_points=triples,
        blowup_plan=steps,
        declared_b1=declared_b1,
        expected=expected,
        notes=list(notes),
    )


def _format(value: object, level: int = 0) -> str:
    """Indented JSON that keeps arrays of scalars on one line."""
    pad, inner = "  " * level, "  " * (level + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_format(v, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return json.dumps(value, ensure_ascii=False)
        items = [inner + _format(v, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(value, ensure_ascii=False)


def serialize(scenario: ScenarioFile) -> str:
    return _format(scenario.model_dump(mode="json", exclude_defaults=True)) + "\n"
