"""Builders for the named scenarios and loading of shipped scenario files.

Each family builder returns a ``ScenarioFile``; the JSON files under
``data/`` are generated from them by ``regenerate``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Sequence

from .blowup import BlowupPlan, BlowupStep, BothSides, OneSide, plan_blowups_to_trivialize
from .core import (
    Component,
    CurveSide,
    DoubleCurve,
    SncSurface,
    TripleIncidence,
    TripleMark,
    TriplePoint,
    permutation_sign,
)
from .curves import CurveGeometry, EllipticPoint, RationalPoint
from .exact import GaussianRational
from .pic import LineBundleClass
from .scenario import ExpectedSpec, ScenarioFile, from_surface, parse_scenario, serialize

DATA_PACKAGE = "snc_smooth.data"

MINUS_ONE = GaussianRational(-1)
# a generic cubic: no extra automorphisms are used
CUBIC_TAU = GaussianRational(Fraction(1, 5), Fraction(3, 2))
SQUARE_TAU = GaussianRational(0, 1)


class UnknownScenario(KeyError):
    pass


def _line(i: int, j: int) -> str:
    return f"L{i}{j}"


def _sigma_from_epsilon(triple: Sequence[int]) -> int:
    """sigma_{ijk} = epsilon_{ijkl} with l the missing index of {0, 1, 2, 3}."""
    (missing,) = set(range(4)) - set(triple)
    return permutation_sign((0, 1, 2, 3), (*triple, missing))


def plane_configuration(
    lines: Sequence[tuple[int, int]],
    triples: dict[str, tuple[int, int, int]],
    declared: bool = False,
) -> SncSurface:
    """Planes H0..H3 meeting along the given lines with the given triple points."""
    if declared:
        comps = tuple(
            Component.declared(f"H{i}", ["H"], 3, form=[[1]], canonical=[-3]) for i in range(4)
        )
    else:
        comps = tuple(Component.plane(f"H{i}") for i in range(4))
    p1 = CurveGeometry.rational()
    curves = []
    for i, j in lines:
        marks = tuple(
            TripleMark(tid, RationalPoint(tid))
            for tid, t in sorted(triples.items())
            if i in t and j in t
        )
        curves.append(DoubleCurve(
            _line(i, j),
            p1,
            (
                CurveSide(f"H{i}", (1,), LineBundleClass(p1, 1)),
                CurveSide(f"H{j}", (1,), LineBundleClass(p1, 1)),
            ),
            marks,
            twist=MINUS_ONE,
        ))
    tps = []
    for tid, t in sorted(triples.items()):
        incident = tuple(
            TripleIncidence(f"H{m}", tuple(_line(*sorted((m, o))) for o in t if o != m))
            for m in t
        )
        order = tuple(f"H{m}" for m in t)
        tps.append(TriplePoint(tid, incident, {order: _sigma_from_epsilon(t)}))
    return SncSurface(comps, tuple(curves), tuple(tps))


TETRA_LINES = tuple(itertools.combinations(range(4), 2))
TETRA_TRIPLES = {
    f"p{missing}": tuple(i for i in range(4) if i != missing) for missing in range(4)
}


def tetrahedron_surface() -> SncSurface:
    return plane_configuration(TETRA_LINES, TETRA_TRIPLES)


def tetra_blown_plan() -> BlowupPlan:
    return BlowupPlan(tuple(
        BlowupStep(
            _line(i, j),
            (RationalPoint(f"{_line(i, j)}.q1"), RationalPoint(f"{_line(i, j)}.q2")),
            BothSides(),
        )
        for i, j in TETRA_LINES
    ))


def build_tetrahedron() -> ScenarioFile:
    lines = [_line(i, j) for i, j in TETRA_LINES]
    return from_surface(
        "tetrahedron",
        tetrahedron_surface(),
        description="Four planes in general position: six lines, four triple points.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=False,
            residue_ok=True,
            h0_dim=1,
            chi_fiber=0,
            classification="Unknown",
            collective_degrees={l: 4 for l in lines},
            anticanonical={f"H{i}": True for i in range(4)},
            plan_incidences={l: 4 for l in lines},
        ),
    )


def build_tetra_blown() -> ScenarioFile:
    lines = [_line(i, j) for i, j in TETRA_LINES]
    return from_surface(
        "tetra-blown",
        tetrahedron_surface(),
        tetra_blown_plan(),
        description="The tetrahedron blown up at two points of every line on both sides.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=True,
            residue_ok=True,
            h0_dim=1,
            chi_fiber=24,
            classification="K3",
            collective_degrees={l: 0 for l in lines},
            component_euler={f"H{i}": 9 for i in range(4)},
            anticanonical={f"H{i}": True for i in range(4)},
            plan_incidences={},
        ),
    )


TWO_TRIPLE_LINES = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))
TWO_TRIPLES = {"p1": (0, 1, 2), "p2": (1, 2, 3)}
THREE_TRIPLE_LINES = TETRA_LINES
THREE_TRIPLES = {"p1": (0, 1, 3), "p2": (0, 2, 3), "p3": (1, 2, 3)}


def _marked_degrees(surface: SncSurface) -> dict[str, int]:
    # independent of the checker: 1 + 1 from the two planes plus one per mark
    return {d.id: 2 + len(d.triple_marks) for d in surface.double_curves}


def _euler_from_counts(n_planes: int, n_lines: int, n_triples: int, n_blowups: int) -> int:
    return 3 * n_planes + n_blowups - 2 * 2 * n_lines + 3 * n_triples


def _few_triples(
    name: str,
    lines: Sequence[tuple[int, int]],
    triples: dict[str, tuple[int, int, int]],
    repaired: bool,
    anticanonical: dict[str, bool],
) -> ScenarioFile:
    surface = plane_configuration(lines, triples, declared=True)
    degrees = _marked_degrees(surface)
    if not repaired:
        return from_surface(
            name,
            surface,
            description="Planes with fewer triple points, as declared.",
            expected=ExpectedSpec(
                structure_ok=True,
                d_semistable=False,
                collective_degrees=degrees,
                anticanonical=anticanonical,
                classification="Unknown",
            ),
            notes=(
                "collective degree is 3 on lines with one triple mark and 4 on lines with two",
            ),
        )
    plan = plan_blowups_to_trivialize(surface)
    # every unit of collective degree costs one point-side blow-up
    chi = _euler_from_counts(4, len(lines), len(triples), sum(degrees.values()))
    return from_surface(
        f"{name}-repaired",
        surface,
        plan,
        description="Planes with fewer triple points, completed by the planner.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=True,
            collective_degrees={l: 0 for l in degrees},
            anticanonical=anticanonical,
            chi_fiber=chi,
            classification="Unknown" if chi != 24 or not all(anticanonical.values()) else "K3",
        ),
        notes=(f"planner completion gives chi = {chi}, not 24",),
    )


def build_two_triple(repaired: bool = False) -> ScenarioFile:
    anti = {"H0": False, "H1": True, "H2": True, "H3": False}
    return _few_triples("two-triple", TWO_TRIPLE_LINES, TWO_TRIPLES, repaired, anti)


def build_three_triple(repaired: bool = False) -> ScenarioFile:
    anti = {f"H{i}": True for i in range(4)}
    return _few_triples("three-triple", THREE_TRIPLE_LINES, THREE_TRIPLES, repaired, anti)


def zero_sum_points(n: int, salt: int) -> list[EllipticPoint]:
    """n distinct points of C/Lambda whose sum is zero."""
    if n == 0:
        return []
    for shift in itertools.count():
        free = [
            EllipticPoint(Fraction(m + salt, 101), Fraction(m * m + shift + 1, 103))
            for m in range(1, n)
        ]
        last = -sum(free, EllipticPoint())
        pts = free + [last]
        if len(set(pts)) == n:
            return pts
    raise AssertionError("unreachable")


def _cubic_curve(did: str, left: CurveSide, right: CurveSide, tau: GaussianRational) -> DoubleCurve:
    return DoubleCurve(did, CurveGeometry.elliptic(tau), (left, right), twist=MINUS_ONE)


def _cubic_side(comp: str, geometry: CurveGeometry) -> CurveSide:
    return CurveSide(comp, (3,), LineBundleClass(geometry, 9))


def _ruled_side(comp: str, which: str, degree: int, geometry: CurveGeometry) -> CurveSide:
    if which == "D0":
        return CurveSide(comp, (1, 0), LineBundleClass(geometry, degree))
    return CurveSide(comp, (0, 1), LineBundleClass(geometry, -degree))


def _check_d(d: int) -> None:
    if d not in (0, 1, 2, 3):
        raise ValueError(f"d must be in 0..3, got {d}")


def type_ii_surface(n: int, d: int) -> tuple[SncSurface, BlowupPlan]:
    """Plane, n - 2 ruled elliptic surfaces, plane, glued along one cubic.

    The end planes are blown up at 9 + 3d and 9 - 3d points of the cubic
    summing to zero, so their normal degrees become -3d and 3d.
    """
    if n < 2:
        raise ValueError(f"a chain needs at least two components, got {n}")
    _check_d(d)
    geometry = CurveGeometry.elliptic(CUBIC_TAU)
    first, last = "X1", f"X{n}"
    middle = [f"Y{i}" for i in range(2, n)]
    comps = (
        [Component.plane(first)]
        + [Component.ruled(y, 3 * d, geometry) for y in middle]
        + [Component.plane(last)]
    )
    names = [first, *middle, last]
    curves = []
    for k in range(n - 1):
        a, b = names[k], names[k + 1]
        left = _cubic_side(a, geometry) if k == 0 else _ruled_side(a, "Dinf", 3 * d, geometry)
        right = _cubic_side(b, geometry) if k == n - 2 else _ruled_side(b, "D0", 3 * d, geometry)
        curves.append(_cubic_curve(f"D{k + 1}", left, right, CUBIC_TAU))
    steps = [BlowupStep("D1", tuple(zero_sum_points(9 + 3 * d, 1)), OneSide(first))]
    far = zero_sum_points(9 - 3 * d, 2)
    if far:
        steps.append(BlowupStep(f"D{n - 1}", tuple(far), OneSide(last)))
    return SncSurface(tuple(comps), tuple(curves)), BlowupPlan(tuple(steps))


def build_k3_double(d: int = 0) -> ScenarioFile:
    surface, plan = type_ii_surface(2, d)
    return from_surface(
        f"k3-double-d{d}",
        surface,
        plan,
        description=f"Two blown-up planes glued along a cubic, d = {d}.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=True,
            residue_ok=True,
            h0_dim=1,
            chi_fiber=24,
            classification="K3",
            component_euler={"X1": 12 + 3 * d, "X2": 12 - 3 * d},
            collective_degrees={"D1": 0},
        ),
    )


def build_type_ii_chain(n: int = 3, d: int = 1) -> ScenarioFile:
    surface, plan = type_ii_surface(n, d)
    euler = {c.id: 0 for c in surface.components}
    euler.update({"X1": 12 + 3 * d, f"X{n}": 12 - 3 * d})
    name = f"typeII-chain-N{n}" if d == 1 else f"typeII-chain-N{n}-d{d}"
    return from_surface(
        name,
        surface,
        plan,
        description=f"Chain of {n} components glued along a cubic, d = {d}.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=True,
            residue_ok=True,
            h0_dim=1,
            chi_fiber=24,
            classification="K3",
            component_euler=euler,
        ),
    )


def ruled_cycle(
    n: int, d: int, tau: GaussianRational, ks: Optional[Sequence[int]] = None
) -> SncSurface:
    """Cycle of n ruled elliptic surfaces; curve i glues Dinf of Y_i to D0 of Y_{i+1}.

    With ``ks`` the gluing of curve i is z -> i^k z and the residue twist
    is -i^k.
    """
    geometry = CurveGeometry.elliptic(tau)
    comps = tuple(Component.ruled(f"Y{i}", d, geometry) for i in range(1, n + 1))
    curves = []
    for i in range(1, n + 1):
        nxt = i % n + 1
        if ks is None:
            twist, gluing = MINUS_ONE, None
        else:
            unit = GaussianRational.i_power(ks[i - 1])
            twist, gluing = -unit, unit
        curves.append(DoubleCurve(
            f"D{i}",
            geometry,
            (_ruled_side(f"Y{i}", "Dinf", d, geometry), _ruled_side(f"Y{nxt}", "D0", d, geometry)),
            twist=twist,
            gluing_map=gluing,
        ))
    return SncSurface(comps, tuple(curves))


def build_torus_chain(n: int = 1, d: int = 0) -> ScenarioFile:
    if n < 1:
        raise ValueError(f"N must be positive, got {n}")
    b1 = 4 if d == 0 else 3
    return from_surface(
        f"torus-chain-N{n}-d{d}",
        ruled_cycle(n, d, CUBIC_TAU),
        description=f"Cycle of {n} ruled elliptic surfaces of degree {d}.",
        declared_b1=b1,
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=True,
            residue_ok=True,
            h0_dim=1,
            chi_fiber=0,
            classification="ComplexTorus" if d == 0 else "PrimaryKodaira",
        ),
        notes=(f"b1 = {b1} is declared, not computed",),
    )


def build_fujita_general(ks: Sequence[int] = (0, 1, 2, 1), d: int = 0, name: Optional[str] = None) -> ScenarioFile:
    ks = [k % 4 for k in ks]
    nontrivial = sum(ks) % 4 == 0
    return from_surface(
        name or "fujita-general",
        ruled_cycle(len(ks), d, SQUARE_TAU, ks),
        description=f"Cycle glued by multiplication by i^k, k = {ks}.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=True,
            residue_ok=all(k == 0 for k in ks),
            h0_dim=1 if nontrivial else 0,
            chi_fiber=0,
            classification="Unknown",
        ),
    )


def build_fujita(k: int = 0, d: int = 0) -> ScenarioFile:
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be in 0..3, got {k}")
    name = f"fujita-k{k}" if d == 0 else f"fujita-k{k}-d{d}"
    return build_fujita_general((0, k), d, name=name)


QUADRIC_TRIPLES = ("t1", "t2")


def quadric_surface() -> SncSurface:
    """Two planes H1, H2 and a quadric H3; C_k is the curve missing H_k."""
    p1 = CurveGeometry.rational()

    def side(comp: str, cls: tuple[int, ...], degree: int) -> CurveSide:
        return CurveSide(comp, cls, LineBundleClass(p1, degree))

    marks = tuple(TripleMark(t, RationalPoint(t)) for t in QUADRIC_TRIPLES)
    curves = (
        DoubleCurve("C_1", p1, (side("H2", (2,), 4), side("H3", (1, 1), 2)), marks, MINUS_ONE),
        DoubleCurve("C_2", p1, (side("H1", (2,), 4), side("H3", (1, 1), 2)), marks, MINUS_ONE),
        DoubleCurve("C_3", p1, (side("H1", (1,), 1), side("H2", (1,), 1)), marks, MINUS_ONE),
    )
    incident = (
        TripleIncidence("H1", ("C_2", "C_3")),
        TripleIncidence("H2", ("C_1", "C_3")),
        TripleIncidence("H3", ("C_1", "C_2")),
    )
    tps = tuple(
        TriplePoint(t, incident, {("H1", "H2", "H3"): s})
        for t, s in zip(QUADRIC_TRIPLES, (1, -1))
    )
    comps = (Component.plane("H1"), Component.plane("H2"), Component.quadric("H3"))
    return SncSurface(comps, curves, tps)


def _labels(curve: str, n: int, extra: Sequence[str] = ()) -> tuple[RationalPoint, ...]:
    return tuple(RationalPoint(x) for x in extra) + tuple(
        RationalPoint(f"{curve}.q{m}") for m in range(1, n - len(extra) + 1)
    )


def build_quadric_initial() -> ScenarioFile:
    return from_surface(
        "quadric-initial",
        quadric_surface(),
        description="Two planes and a quadric before any blow-up.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=False,
            collective_degrees={"C_1": 8, "C_2": 8, "C_3": 4},
            anticanonical={"H1": True, "H2": True, "H3": True},
            plan_incidences={"C_1": 8, "C_2": 8, "C_3": 4},
        ),
    )


def build_quadric_naive() -> ScenarioFile:
    plan = BlowupPlan((
        BlowupStep("C_3", _labels("C_3", 4, ["t2"]), OneSide("H1")),
        BlowupStep("C_1", _labels("C_1", 8, ["t1"]), OneSide("H2")),
        BlowupStep("C_2", _labels("C_2", 8, ["t2"]), OneSide("H3")),
    ))
    return from_surface(
        "quadric-naive",
        quadric_surface(),
        plan,
        description="Symmetric blow-ups whose centers meet the triple points.",
        expected=ExpectedSpec(mismatch_curves=["C_1", "C_2", "C_3"]),
    )


def build_quadric_pipeline() -> ScenarioFile:
    plan = BlowupPlan((
        BlowupStep("C_2", _labels("C_2", 8), OneSide("H1")),
        BlowupStep("C_1", _labels("C_1", 8), OneSide("H2")),
        BlowupStep("C_3", _labels("C_3", 4), OneSide("H1")),
    ))
    return from_surface(
        "quadric-pipeline",
        quadric_surface(),
        plan,
        description="Ordered one-sided blow-ups avoiding the triple points.",
        expected=ExpectedSpec(
            structure_ok=True,
            d_semistable=True,
            residue_ok=True,
            h0_dim=1,
            chi_fiber=24,
            classification="K3",
            collective_degrees={"C_1": 0, "C_2": 0, "C_3": 0},
            component_euler={"H1": 15, "H2": 11, "H3": 4},
            anticanonical={"H1": True, "H2": True, "H3": True},
        ),
    )


def _int_list(value: str) -> list[int]:
    return [int(x) for x in value.replace(" ", "").split(",") if x]


# family name -> (builder, {param: parser})
FAMILIES: dict[str, tuple[Callable[..., ScenarioFile], dict[str, Callable[[str], object]]]] = {
    "tetrahedron": (build_tetrahedron, {}),
    "tetra-blown": (build_tetra_blown, {}),
    "two-triple": (lambda: build_two_triple(False), {}),
    "two-triple-repaired": (lambda: build_two_triple(True), {}),
    "three-triple": (lambda: build_three_triple(False), {}),
    "three-triple-repaired": (lambda: build_three_triple(True), {}),
    "k3-double": (build_k3_double, {"d": int}),
    "torus-chain": (build_torus_chain, {"N": int, "d": int}),
    "typeII-chain": (build_type_ii_chain, {"N": int, "d": int}),
    "fujita": (build_fujita, {"k": int, "d": int}),
    "fujita-general": (build_fujita_general, {"ks": _int_list, "d": int}),
    "quadric-initial": (build_quadric_initial, {}),
    "quadric-naive": (build_quadric_naive, {}),
    "quadric-pipeline": (build_quadric_pipeline, {}),
}

_KWARG = {"N": "n"}


def build_family(name: str, params: Optional[dict[str, str]] = None) -> ScenarioFile:
    if name not in FAMILIES:
        raise UnknownScenario(name)
    builder, parsers = FAMILIES[name]
    kwargs = {}
    for key, raw in (params or {}).items():
        if key not in parsers:
            raise ValueError(f"family {name} takes no parameter {key}")
        kwargs[_KWARG.get(key, key)] = parsers[key](raw)
    return builder(**kwargs)


def shipped_builders() -> dict[str, Callable[[], ScenarioFile]]:
    out: dict[str, Callable[[], ScenarioFile]] = {
        "tetrahedron": build_tetrahedron,
        "tetra-blown": build_tetra_blown,
        "two-triple": lambda: build_two_triple(False),
        "two-triple-repaired": lambda: build_two_triple(True),
        "three-triple": lambda: build_three_triple(False),
        "three-triple-repaired": lambda: build_three_triple(True),
    }
    for d in range(4):
        out[f"k3-double-d{d}"] = lambda d=d: build_k3_double(d)
    for n in range(1, 4):
        for d in range(4):
            out[f"torus-chain-N{n}-d{d}"] = lambda n=n, d=d: build_torus_chain(n, d)
    for n in range(2, 6):
        out[f"typeII-chain-N{n}"] = lambda n=n: build_type_ii_chain(n, 1)
    for k in range(4):
        out[f"fujita-k{k}"] = lambda k=k: build_fujita(k)
    out["fujita-general"] = build_fujita_general
    out["quadric-naive"] = build_quadric_naive
    out["quadric-pipeline"] = build_quadric_pipeline
    out["quadric-initial"] = build_quadric_initial
    return out


def shipped_names() -> list[str]:
    return sorted(
        p.name[: -len(".json")]
        for p in resources.files(DATA_PACKAGE).iterdir()
        if p.name.endswith(".json")
    )


def shipped_text(name: str) -> str:
    path = resources.files(DATA_PACKAGE) / f"{name}.json"
    if not path.is_file():
        raise UnknownScenario(name)
    return path.read_text(encoding="utf-8")


def load(name_or_path: str, params: Optional[dict[str, str]] = None) -> ScenarioFile:
    """A scenario from a file path, a shipped name, or a family with parameters."""
    path = Path(name_or_path)
    if path.suffix == ".json" and path.exists():
        if params:
            raise ValueError("parameters apply to scenario families, not files")
        return parse_scenario(path.read_text(encoding="utf-8"))
    if params:
        return build_family(name_or_path, params)
    try:
        return parse_scenario(shipped_text(name_or_path))
    except UnknownScenario:
        return build_family(name_or_path)


def regenerate(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, builder in shipped_builders().items():
        target = directory / f"{name}.json"
        target.write_text(serialize(builder()), encoding="utf-8")
        written.append(target)
    return written
