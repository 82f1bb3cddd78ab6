import io
import json
import subprocess
import sys

import pytest

from snc_smooth.cli import main, resolve_seed
from snc_smooth.registry import shipped_names, shipped_text
from snc_smooth.verify import DEFAULT_SEED


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize(
    "argv,want",
    [
        (["check", "tetra-blown"], 0),
        (["check", "quadric-naive"], 3),
        (["check", "no-such-scenario"], 2),
        (["check", "fujita", "--param", "k=2"], 0),
        (["check", "fujita", "--param", "k"], 2),
        (["plan", "tetrahedron"], 0),
        (["plan", "fujita-k1"], 0),
        (["describe", "k3-double-d0"], 0),
        (["list"], 0),
    ],
)
def test_exit_codes(argv, want):
    assert run(*argv)[0] == want


def test_failed_assertion_exits_4(tmp_path):
    data = json.loads(shipped_text("tetrahedron"))
    data["expected"]["chi_fiber"] = 23
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(data))
    code, out, _ = run("check", str(path))
    assert code == 4 and "chi_fiber" in out


def test_over_blown_plan_is_infeasible(tmp_path):
    data = json.loads(shipped_text("tetra-blown"))
    data["blowup_plan"].append({"curve": "L01", "points": ["extra"], "mode": "BothSides"})
    path = tmp_path / "over.json"
    path.write_text(json.dumps(data))
    code, out, _ = run("plan", str(path))
    assert code == 6 and out.startswith("infeasible: L01")


def test_schema_error_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"schema_version": 1, "name": "x", "extra": 1}')
    code, _, err = run("check", str(path))
    assert code == 2 and err.startswith("error:")


def test_json_output_is_deterministic():
    a = run("check", "tetrahedron", "--format", "json")[1]
    b = run("check", "tetrahedron", "--format", "json")[1]
    assert a == b
    body = json.loads(a)
    assert body["name"] == "tetrahedron" and body["exit_code"] == 0
    assert set(body["report"]["collective_degrees"].values()) == {4}


def test_several_scenarios_keep_input_order_and_first_failure():
    code, out, _ = run("check", "fujita-k0", "quadric-naive", "tetrahedron", "--format", "json", "--jobs", "3")
    names = [r["name"] for r in json.loads(out)]
    assert names == ["fujita-k0", "quadric-naive", "tetrahedron"] and code == 3


def test_every_shipped_scenario_meets_its_expectations():
    for name in shipped_names():
        want = 3 if name == "quadric-naive" else 0
        assert run("check", name)[0] == want, name


def test_plan_output_lists_both_sided_points():
    code, out, _ = run("plan", "quadric-initial")
    assert code == 0 and "BothSides" in out


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv("SNC_SMOOTH_SEED", raising=False)
    assert resolve_seed(None) == DEFAULT_SEED
    monkeypatch.setenv("SNC_SMOOTH_SEED", "11")
    assert resolve_seed(None) == 11 and resolve_seed(5) == 5
    assert run("charts", "--samples", "1")[1].startswith("seed 11,")
    monkeypatch.setenv("SNC_SMOOTH_SEED", "eleven")
    assert run("charts", "--samples", "1")[0] == 2


def test_charts_exit_codes():
    code, out, _ = run("charts", "--samples", "5")
    assert code == 0 and "19/19 identities pass" in out
    assert run("charts", "--samples", "5", "--tolerance", "1e-30")[0] == 5
    code, _, err = run("charts", "--samples", "0")
    assert code == 0 and "warning" in err
    assert run("charts", "--samples", "-1")[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "snc_smooth.cli", "check", "fujita-k0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "fujita-k0" in proc.stdout
