"""Command-line front end: ``snc-smooth list | describe | check | plan | charts``.

Exit codes: 0 success, 2 unreadable or unknown scenario, 3 blow-up plan
rejected for mismatch, 4 expected assertion failed, 5 chart identity failed,
6 no trivializing plan exists.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from .blowup import (
    BlowupPlan,
    BothSides,
    Infeasible,
    MismatchDiagnostic,
    PlanStepError,
    detect_mismatch,
    plan_blowups_to_trivialize,
    run_plan,
)
from .registry import FAMILIES, UnknownScenario, load, shipped_names, shipped_text
from .report import SmoothingReport, full_report
from .scenario import ExpectedSpec, ScenarioError, ScenarioFile, parse_scenario, to_plan, to_surface
from .verify import DEFAULT_SEED, IdentityResult, run_identity_suite

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_MISMATCH = 3
EXIT_ASSERTION = 4
EXIT_CHARTS = 5
EXIT_INFEASIBLE = 6

SEED_ENV = "SNC_SMOOTH_SEED"


@dataclass
class CheckResult:
    name: str
    exit_code: int
    report: Optional[SmoothingReport] = None
    mismatches: list[MismatchDiagnostic] = field(default_factory=list)
    plan_incidences: Optional[dict[str, int]] = None
    failures: list[str] = field(default_factory=list)
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "exit_code": self.exit_code,
            "error": self.error,
            "mismatches": [
                {"curve": m.curve, "step": m.step, "message": m.message} for m in self.mismatches
            ],
            "report": self.report.to_dict() if self.report is not None else None,
            "plan_incidences": self.plan_incidences,
            "failures": self.failures,
        }


def _compare(expected: ExpectedSpec, actual: dict) -> list[str]:
    failures = []
    for key, want in expected.model_dump(exclude_none=True).items():
        got = actual.get(key)
        if key == "mismatch_curves":
            want, got = sorted(want), sorted(got or [])
        if got != want:
            failures.append(f"{key}: expected {want!r}, got {got!r}")
    return failures


def run_check(scenario: ScenarioFile) -> CheckResult:
    """Run the scenario's blow-up plan, then every check, then its assertions."""
    surface, plan = to_surface(scenario), to_plan(scenario)
    expected = scenario.expected or ExpectedSpec()
    mismatches = detect_mismatch(surface, plan)
    if mismatches:
        curves = sorted({m.curve for m in mismatches})
        return CheckResult(
            scenario.name,
            EXIT_MISMATCH,
            mismatches=mismatches,
            failures=_compare(
                ExpectedSpec(mismatch_curves=expected.mismatch_curves), {"mismatch_curves": curves}
            ),
        )
    try:
        blown, _ = run_plan(surface, plan)
    except PlanStepError as exc:
        return CheckResult(scenario.name, EXIT_PARSE, error=str(exc))
    report = full_report(blown, scenario.declared_b1)
    actual = report.to_dict()
    actual["anticanonical"] = actual.pop("anticanonical_ok")
    actual["mismatch_curves"] = []
    incidences = None
    if expected.plan_incidences is not None:
        try:
            incidences = plan_blowups_to_trivialize(blown).incidences(blown)
        except Infeasible as exc:
            incidences = {"infeasible": 0}
            report.notes.append(str(exc))
        actual["plan_incidences"] = incidences
    failures = _compare(expected, actual)
    code = EXIT_ASSERTION if failures else EXIT_OK
    return CheckResult(scenario.name, code, report, [], incidences, failures)


def _yes(flag: Optional[bool]) -> str:
    return {True: "yes", False: "no", None: "unknown"}[flag]


def format_check_text(result: CheckResult) -> str:
    lines = [f"scenario {result.name}"]
    if result.error:
        lines.append(f"  error            {result.error}")
    if result.mismatches:
        lines.append("  blow-up plan rejected:")
        lines += [f"    {m.curve}: {m.message}" for m in result.mismatches]
    r = result.report
    if r is not None:
        lines.append(f"  structure        {'ok' if r.structure_ok else 'invalid'}")
        lines += [f"    {d}" for d in r.diagnostics]
        witnesses = f" ({', '.join(r.witnesses)})" if r.witnesses else ""
        lines.append(f"  d-semistable     {_yes(r.d_semistable)}{witnesses}")
        anti = ", ".join(f"{k} {_yes(v)}" for k, v in r.anticanonical_ok.items())
        lines.append(f"  anticanonical    {anti}")
        lines.append(f"  residues match   {_yes(r.residue_ok)} (h0 = {r.h0_dim})")
        lines.append(f"  chi(fiber)       {r.chi_fiber}")
        lines.append(f"  classification   {r.classification.value}")
        collective = ", ".join(f"{k} {v}" for k, v in r.collective.items())
        lines.append(f"  collective       {collective}")
        lines += [f"  note             {n}" for n in r.notes]
    if result.plan_incidences is not None:
        inc = ", ".join(f"{k} {v}" for k, v in result.plan_incidences.items()) or "none"
        lines.append(f"  planner          {inc}")
    if result.failures:
        lines.append("  expected assertions FAILED:")
        lines += [f"    {f}" for f in result.failures]
    lines.append(f"  exit             {result.exit_code}")
    return "\n".join(lines)


def format_plan(plan: BlowupPlan) -> str:
    if not plan.steps:
        return "empty plan"
    lines = []
    for s in plan.steps:
        mode = "BothSides" if isinstance(s.mode, BothSides) else f"OneSide {s.mode.component}"
        pts = ", ".join(str(p) for p in s.points)
        lines.append(f"{s.curve}: {len(s.points)} point(s) {mode}: {pts}")
    lines.append(f"total {plan.point_count()} point(s)")
    return "\n".join(lines)


def run_plan_cmd(scenario: ScenarioFile, out: TextIO) -> int:
    """Print the fewest-point plan trivializing the scenario after its own plan."""
    surface, plan = to_surface(scenario), to_plan(scenario)
    mismatches = detect_mismatch(surface, plan)
    if mismatches:
        for m in mismatches:
            print(f"{m.curve}: {m.message}", file=out)
        return EXIT_MISMATCH
    try:
        blown, _ = run_plan(surface, plan)
        planned = plan_blowups_to_trivialize(blown)
    except PlanStepError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_PARSE
    except Infeasible as exc:
        print(f"infeasible: {exc.curve_id}: {exc.reason}", file=out)
        return EXIT_INFEASIBLE
    print(format_plan(planned), file=out)
    inc = planned.incidences(blown)
    if inc:
        print("incidences " + ", ".join(f"{k} {v}" for k, v in sorted(inc.items())), file=out)
    return EXIT_OK


def resolve_seed(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    return int(env) if env else DEFAULT_SEED


def run_charts(
    samples: int, tolerance: Optional[float], seed: int, out: TextIO, err: TextIO
) -> tuple[int, list[IdentityResult]]:
    if samples == 0:
        print("warning: --samples 0 checks nothing; every identity passes vacuously", file=err)
    results = run_identity_suite(samples, tolerance, seed)
    print(f"seed {seed}, {samples} sample(s) per identity", file=out)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(
            f"{status}  {r.name:<38} max residual {r.max_residual:.3e}  tol {r.tolerance:.0e}",
            file=out,
        )
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} identities pass", file=out)
    return (EXIT_CHARTS if failed else EXIT_OK), results


def _parse_params(items: Sequence[str]) -> dict[str, str]:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"--param expects key=value, got {item!r}")
        params[key] = value
    return params


def _describe(scenario: ScenarioFile) -> str:
    lines = [scenario.name]
    if scenario.description:
        lines.append(f"  {scenario.description}")
    lines.append("  components: " + ", ".join(f"{c.id} ({c.kind.value})" for c in scenario.components))
    for d in scenario.double_curves:
        sides = " | ".join(s.component for s in d.sides)
        marks = ", ".join(m.triple_point for m in d.triple_marks) or "none"
        lines.append(f"  curve {d.id}: genus {d.genus}, sides {sides}, triple marks {marks}")
    for t in scenario.triple_points:
        lines.append(f"  triple point {t.id}: " + ", ".join(i.component for i in t.incident))
    lines.append(f"  blow-up plan: {len(scenario.blowup_plan)} step(s), "
                 f"{sum(len(s.points) for s in scenario.blowup_plan)} point(s)")
    if scenario.declared_b1 is not None:
        lines.append(f"  declared b1: {scenario.declared_b1}")
    lines += [f"  note: {n}" for n in scenario.notes]
    return "\n".join(lines)


def _list(out: TextIO) -> None:
    print("shipped scenarios:", file=out)
    for name in shipped_names():
        desc = parse_scenario(shipped_text(name)).description or ""
        print(f"  {name:<24} {desc}", file=out)
    print("families (use --param):", file=out)
    for name, (_, params) in FAMILIES.items():
        if params:
            print(f"  {name:<24} {', '.join(params)}", file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snc-smooth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list shipped scenarios and families")
    p = sub.add_parser("describe", help="summarize a scenario")
    p.add_argument("scenario")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p = sub.add_parser("check", help="run the checks and the expected assertions")
    p.add_argument("scenarios", nargs="+", metavar="scenario")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--jobs", type=int, default=4, help="worker threads for several scenarios")
    p = sub.add_parser("plan", help="print the fewest-point trivializing plan")
    p.add_argument("scenario")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p = sub.add_parser("charts", help="run the chart identity suite")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    return parser


def _load(name: str, params: dict[str, str], err: TextIO) -> Optional[ScenarioFile]:
    try:
        return load(name, params)
    except UnknownScenario:
        print(f"error: unknown scenario {name}", file=err)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {name}: {exc}", file=err)
    return None


def main(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        _list(out)
        return EXIT_OK
    if args.command == "charts":
        if args.samples < 0:
            print("error: --samples must be non-negative", file=err)
            return EXIT_PARSE
        try:
            seed = resolve_seed(args.seed)
        except ValueError:
            print(f"error: {SEED_ENV} must be an integer", file=err)
            return EXIT_PARSE
        code, _ = run_charts(args.samples, args.tolerance, seed, out, err)
        return code
    try:
        params = _parse_params(args.param)
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    if args.command in ("describe", "plan"):
        scenario = _load(args.scenario, params, err)
        if scenario is None:
            return EXIT_PARSE
        if args.command == "describe":
            print(_describe(scenario), file=out)
            return EXIT_OK
        return run_plan_cmd(scenario, out)
    scenarios = [_load(name, params, err) for name in args.scenarios]
    if any(s is None for s in scenarios):
        return EXIT_PARSE
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(run_check, scenarios))
    if args.format == "json":
        payload = [r.to_dict() for r in results]
        body = payload[0] if len(payload) == 1 else payload
        print(json.dumps(body, indent=2, sort_keys=True), file=out)
    else:
        print("\n\n".join(format_check_text(r) for r in results), file=out)
    return next((r.exit_code for r in results if r.exit_code), EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
