from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snc_smooth.blowup import (
    BlowupPlan,
    BlowupStep,
    BothSides,
    CenterNotOnCurve,
    CenterOnTriplePoint,
    Infeasible,
    InvalidStep,
    OneSide,
    PlanStepError,
    blow_up,
    detect_mismatch,
    plan_blowups_to_trivialize,
    run_plan,
)
from snc_smooth.canonical import check_anticanonical, collective_normal_class
from snc_smooth.curves import EllipticPoint, RationalPoint
from snc_smooth.pic import is_trivial
from snc_smooth.registry import load, shipped_names, tetrahedron_surface
from snc_smooth.report import euler_fiber
from snc_smooth.scenario import to_plan, to_surface

LINES = ["L01", "L02", "L03", "L12", "L13", "L23"]


def _degrees(surface):
    return {k: v.degree for k, v in collective_normal_class(surface).items()}


def test_one_point_on_both_sides_bookkeeping():
    s = tetrahedron_surface()
    t = blow_up(s, BlowupStep("L01", (RationalPoint("a"),)))
    for cid in ("H0", "H1"):
        before, after = s.component(cid), t.component(cid)
        assert after.euler_char == before.euler_char + 1
        assert after.class_basis == before.class_basis + ("E1",)
        assert after.canonical_class == before.canonical_class + (1,)
    side = t.curve("L01").sides[0]
    assert side.curve_class == (1, -1) and side.normal_class.degree == 0
    assert t.curve("L02").sides[0].curve_class == (1, 0)
    assert _degrees(t)["L01"] == 2 and euler_fiber(t) == euler_fiber(s) + 2


def test_one_sided_step_touches_one_component():
    s = tetrahedron_surface()
    t = blow_up(s, BlowupStep("L01", (RationalPoint("a"),), OneSide("H1")))
    assert t.component("H0") == s.component("H0")
    assert t.component("H1").blowup_count == 1 and _degrees(t)["L01"] == 3


def test_elliptic_center_shifts_the_jacobian():
    s = to_surface(load("k3-double-d1"))
    p = EllipticPoint("1/7", "2/9")
    t = blow_up(s, BlowupStep("D1", (p,), OneSide("X1")))
    before = s.curve("D1").sides[0].normal_class
    after = t.curve("D1").sides[0].normal_class
    assert after.degree == before.degree - 1 and after.jacobian_point == before.jacobian_point - p


@given(st.sampled_from(LINES), st.sampled_from(LINES))
def test_disjoint_centers_commute(c1, c2):
    s = tetrahedron_surface()
    a = BlowupStep(c1, (RationalPoint("a"),))
    b = BlowupStep(c2, (RationalPoint("b"),))
    ab = run_plan(s, BlowupPlan((a, b)))[0]
    ba = run_plan(s, BlowupPlan((b, a)))[0]
    assert collective_normal_class(ab) == collective_normal_class(ba)
    assert euler_fiber(ab) == euler_fiber(ba)
    for comp in s.components:
        assert ab.component(comp.id).euler_char == ba.component(comp.id).euler_char


@pytest.mark.parametrize("name", shipped_names())
def test_plans_preserve_anticanonical_curves(name):
    scenario = load(name)
    if scenario.expected and scenario.expected.mismatch_curves:
        pytest.skip("plan is rejected before it runs")
    surface = to_surface(scenario)
    before = check_anticanonical(surface)
    after = check_anticanonical(run_plan(surface, to_plan(scenario))[0])
    assert after == before


def test_center_on_a_triple_point_is_refused():
    s = tetrahedron_surface()
    mark = s.curve("L01").triple_marks[0].location
    with pytest.raises(CenterOnTriplePoint):
        blow_up(s, BlowupStep("L01", (mark,)))
    with pytest.raises(PlanStepError) as info:
        run_plan(s, BlowupPlan((BlowupStep("L02", (RationalPoint("a"),)), BlowupStep("L01", (mark,)))))
    assert info.value.step_index == 1


def test_bad_steps_are_refused():
    s = tetrahedron_surface()
    with pytest.raises(CenterNotOnCurve):
        blow_up(s, BlowupStep("L01", (EllipticPoint(0, 0),)))
    with pytest.raises(InvalidStep):
        blow_up(s, BlowupStep("L01", (RationalPoint("a"), RationalPoint("a"))))
    with pytest.raises(InvalidStep):
        blow_up(s, BlowupStep("L01", (RationalPoint("a"),), OneSide("H3")))
    with pytest.raises(InvalidStep):
        blow_up(s, BlowupStep("L99", (RationalPoint("a"),)))


def test_transform_log_fixes_marked_points():
    scenario = load("tetra-blown")
    s = to_surface(scenario)
    _, log = run_plan(s, to_plan(scenario))
    for d in s.double_curves:
        for loc in d.mark_locations():
            assert log.image(d.id, loc) == loc
    with pytest.raises(KeyError):
        log.image("L01", RationalPoint("nowhere"))


def test_naive_quadric_plan_is_flagged():
    scenario = load("quadric-naive")
    diags = detect_mismatch(to_surface(scenario), to_plan(scenario))
    assert {d.curve for d in diags} >= {"C_3"}
    assert any("different marked-point records" in str(d) for d in diags)


def test_pipeline_and_unmarked_curves_have_no_mismatch():
    for name in ("quadric-pipeline", "torus-chain-N2-d0", "tetra-blown"):
        scenario = load(name)
        assert detect_mismatch(to_surface(scenario), to_plan(scenario)) == []


@pytest.mark.parametrize("name", ["tetrahedron", "quadric-initial", "k3-double-d2", "typeII-chain-N4"])
def test_planner_clears_every_class(name):
    s = to_surface(load(name))
    plan = plan_blowups_to_trivialize(s)
    t, _ = run_plan(s, plan)
    assert all(is_trivial(c) for c in collective_normal_class(t).values())
    assert detect_mismatch(s, plan) == []


def test_planner_prefers_two_sided_points():
    plan = plan_blowups_to_trivialize(tetrahedron_surface())
    assert plan.point_count() == 12
    assert all(isinstance(step.mode, BothSides) for step in plan.steps)
    assert set(plan.incidences(tetrahedron_surface()).values()) == {4}


def test_negative_degree_is_infeasible():
    scenario = load("tetra-blown")
    s = run_plan(to_surface(scenario), to_plan(scenario))[0]
    s = blow_up(s, BlowupStep("L01", (RationalPoint("extra"),)))
    with pytest.raises(Infeasible) as info:
        plan_blowups_to_trivialize(s)
    assert info.value.curve_id == "L01"


def test_nontrivial_degree_zero_class_is_infeasible():
    s = to_surface(load("torus-chain-N1-d0"))
    curve = s.curve("D1")
    side = curve.sides[0]
    shifted = replace(side, normal_class=replace(
        side.normal_class, jacobian_point=side.normal_class.jacobian_point + EllipticPoint("1/3", 0)
    ))
    s = s.with_curve(replace(curve, sides=(shifted, curve.sides[1])))
    with pytest.raises(Infeasible, match="not trivial"):
        plan_blowups_to_trivialize(s)
