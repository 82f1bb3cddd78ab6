import itertools
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import euler_from_counts, fujita_h0_float, post_plan_degrees

from snc_smooth.blowup import run_plan
from snc_smooth.canonical import (
    MissingTwist,
    build_rho_matrix,
    canonical_kernel,
    check_anticanonical,
    check_residue_matching,
    collective_normal_class,
    float_rank,
    h0_canonical_dimension,
    is_d_semistable,
)
from snc_smooth.core import (
    Component,
    TriplePoint,
    intersect,
    relabel,
    validate_structure,
)
from snc_smooth.exact import GaussianRational as Q
from snc_smooth.registry import (
    build_fujita,
    build_fujita_general,
    load,
    ruled_cycle,
    shipped_names,
    tetrahedron_surface,
)
from snc_smooth.report import Classification, classify_fiber, euler_fiber, full_report
from snc_smooth.scenario import to_plan, to_surface


def _with_triple(surface, tid, **changes):
    tps = tuple(replace(t, **changes) if t.id == tid else t for t in surface.triple_points)
    return replace(surface, triple_points=tps)


def test_tetrahedron_is_well_formed():
    assert validate_structure(tetrahedron_surface()) == []


def test_tetrahedron_sigma_is_epsilon():
    s = tetrahedron_surface()
    p3 = next(t for t in s.triple_points if t.id == "p3")
    assert p3.sigma_value(("H0", "H1", "H2")) == 1
    assert p3.sigma_value(("H1", "H0", "H2")) == -1
    p0 = next(t for t in s.triple_points if t.id == "p0")
    assert p0.sigma_value(("H1", "H2", "H3")) == -1


def test_non_alternating_sigma_is_reported():
    s = tetrahedron_surface()
    s = _with_triple(s, "p3", sigma={("H0", "H1", "H2"): 1, ("H0", "H2", "H1"): 1})
    messages = [d.message for d in validate_structure(s)]
    assert messages == ["sigma not alternating at triple point p3"]


def test_dangling_component_and_wrong_arity():
    s = tetrahedron_surface()
    curve = s.curve("L01")
    bad = s.with_curve(replace(curve, sides=(replace(curve.sides[0], component="X9"),)))
    codes = {d.code for d in validate_structure(bad)}
    assert {"dangling", "arity"} <= codes


def test_normal_degree_must_match_self_intersection():
    s = tetrahedron_surface()
    curve = s.curve("L01")
    side = curve.sides[0]
    wrong = replace(side, normal_class=replace(side.normal_class, degree=2))
    bad = s.with_curve(replace(curve, sides=(wrong, curve.sides[1])))
    assert [d.code for d in validate_structure(bad)] == ["normal-degree"]


def test_triple_point_must_be_marked_by_three_curves():
    s = tetrahedron_surface()
    curve = s.curve("L01")
    bad = s.with_curve(replace(curve, triple_marks=curve.triple_marks[:1]))
    codes = {d.code for d in validate_structure(bad)}
    assert {"triple-mark", "triple-closure"} <= codes


@given(st.integers(-5, 5), st.lists(st.integers(-4, 4), min_size=2, max_size=2),
       st.lists(st.integers(-4, 4), min_size=2, max_size=2))
def test_intersection_forms_are_symmetric(d, a, b):
    from snc_smooth.curves import CurveGeometry

    for comp in (Component.quadric("Q"), Component.ruled("Y", d, CurveGeometry.elliptic(Q(0, 1)))):
        assert intersect(comp, a, b) == intersect(comp, b, a)


def test_tetrahedron_collective_classes():
    s = tetrahedron_surface()
    assert {c.degree for c in collective_normal_class(s).values()} == {4}
    ok, witnesses = is_d_semistable(s)
    assert not ok and len(witnesses) == 6
    assert all(check_anticanonical(s).values())
    assert check_residue_matching(s) and h0_canonical_dimension(s) == 1


@given(st.permutations(["H0", "H1", "H2", "H3"]))
def test_checks_are_invariant_under_relabeling(perm):
    s = tetrahedron_surface()
    mapping = dict(zip(["H0", "H1", "H2", "H3"], perm))
    r = relabel(s, mapping)
    assert validate_structure(r) == []
    assert collective_normal_class(r) == collective_normal_class(s)
    anti = check_anticanonical(s)
    assert check_anticanonical(r) == {mapping[k]: v for k, v in anti.items()}
    assert h0_canonical_dimension(r) == h0_canonical_dimension(s)


def test_fujita_rho_rows():
    rho = build_rho_matrix(to_surface(build_fujita(1)))
    assert rho.rows[0] == (Q(1), Q(-1))
    assert rho.rows[1] == (Q(0, -1), Q(1))
    assert h0_canonical_dimension(rho) == 0 and not check_residue_matching(rho)


def test_fujita_k0_kernel_is_the_diagonal():
    basis = canonical_kernel(to_surface(build_fujita(0)))
    assert len(basis) == 1 and basis[0][0] == basis[0][1]


def test_generalized_fujita_against_float_oracle():
    for ks in itertools.product(range(4), repeat=3):
        surface = to_surface(build_fujita_general(ks))
        assert h0_canonical_dimension(surface) == fujita_h0_float(list(ks))
        assert float_rank(build_rho_matrix(surface)) == 3 - fujita_h0_float(list(ks))


def test_self_glued_curve_gives_a_zero_row():
    s = ruled_cycle(1, 2, Q(0, 1))
    rho = build_rho_matrix(s)
    assert rho.rows == ((Q(0),),) and h0_canonical_dimension(rho) == 1


def test_missing_twist_is_reported_not_guessed():
    s = tetrahedron_surface()
    s = s.with_curve(replace(s.curve("L01"), twist=None))
    with pytest.raises(MissingTwist):
        build_rho_matrix(s)
    report = full_report(s)
    assert not report.residue_ok and any("no gluing twist" in n for n in report.notes)


@pytest.mark.parametrize(
    "chi,b1,want",
    [
        (24, None, Classification.K3),
        (0, 4, Classification.TORUS),
        (0, 3, Classification.KODAIRA),
        (0, None, Classification.UNKNOWN),
        (14, None, Classification.UNKNOWN),
    ],
)
def test_classify_fiber(chi, b1, want):
    assert classify_fiber(chi, b1) is want


def test_undeclared_b1_is_noted():
    report = full_report(to_surface(build_fujita(0)))
    assert report.classification is Classification.UNKNOWN
    assert "chi = 0 but b1 is not declared" in report.notes


def test_invalid_structure_short_circuits():
    s = tetrahedron_surface()
    s = _with_triple(s, "p3", sigma={})
    report = full_report(s)
    assert not report.structure_ok and report.diagnostics == ["triple point p3 has no sigma"]


@pytest.mark.parametrize("name", shipped_names())
def test_euler_and_degrees_agree_with_raw_oracle(name):
    scenario = load(name)
    if scenario.expected and scenario.expected.mismatch_curves:
        pytest.skip("plan is rejected before it runs")
    surface, _ = run_plan(to_surface(scenario), to_plan(scenario))
    assert euler_fiber(surface) == euler_from_counts(scenario)
    degrees = {k: v.degree for k, v in collective_normal_class(surface).items()}
    assert degrees == post_plan_degrees(scenario)


def test_triple_point_hash_ignores_sigma_key_order():
    a = TriplePoint("t", (), {("A", "B", "C"): 1, ("B", "A", "C"): -1})
    b = TriplePoint("t", (), {("B", "A", "C"): -1, ("A", "B", "C"): 1})
    assert hash(a) == hash(b) and a == b
