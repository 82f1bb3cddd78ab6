import json

import pytest

from snc_smooth.core import validate_structure
from snc_smooth.registry import (
    UnknownScenario,
    build_family,
    load,
    shipped_builders,
    shipped_names,
    shipped_text,
    tetrahedron_surface,
)
from snc_smooth.scenario import (
    ParseError,
    SchemaError,
    SemanticError,
    from_surface,
    parse_scenario,
    serialize,
    to_plan,
    to_surface,
)


def _tetra_json():
    return json.loads(shipped_text("tetrahedron"))


def test_every_shipped_file_parses_to_a_valid_surface():
    assert len(shipped_names()) == 34
    for name in shipped_names():
        scenario = parse_scenario(shipped_text(name))
        assert scenario.name == name
        assert validate_structure(to_surface(scenario)) == []


def test_tetrahedron_shape():
    s = to_surface(load("tetrahedron"))
    assert (len(s.components), len(s.double_curves), len(s.triple_points)) == (4, 6, 4)


def test_tetrahedron_file_matches_the_builder_surface():
    assert to_surface(load("tetrahedron")) == tetrahedron_surface()


@pytest.mark.parametrize("name", shipped_names())
def test_serialize_round_trip(name):
    scenario = load(name)
    again = parse_scenario(serialize(scenario))
    assert again == scenario
    assert to_surface(again) == to_surface(scenario)
    assert to_plan(again) == to_plan(scenario)


@pytest.mark.parametrize("name", shipped_names())
def test_shipped_files_match_their_builders(name):
    assert serialize(shipped_builders()[name]()) == shipped_text(name)


@pytest.mark.parametrize("name", ["tetrahedron", "k3-double-d2", "fujita-k3", "quadric-initial"])
def test_from_surface_inverts_to_surface(name):
    scenario = load(name)
    surface = to_surface(scenario)
    rebuilt = from_surface(name, surface, to_plan(scenario))
    assert to_surface(rebuilt) == surface and to_plan(rebuilt) == to_plan(scenario)


@pytest.mark.parametrize("text", ["", "   ", "{", "[1, 2"])
def test_malformed_text_is_a_parse_error(text):
    with pytest.raises(ParseError):
        parse_scenario(text)


def test_unknown_field_is_a_schema_error():
    data = _tetra_json()
    data["components"][0]["colour"] = "red"
    with pytest.raises(SchemaError) as info:
        parse_scenario(json.dumps(data))
    assert "components.0" in str(info.value)


def test_bad_rational_is_a_schema_error():
    data = json.loads(shipped_text("k3-double-d1"))
    data["double_curves"][0]["tau"] = ["1/0", 1]
    with pytest.raises(SchemaError):
        parse_scenario(json.dumps(data))
    data["double_curves"][0]["tau"] = [0.5, 1]
    with pytest.raises(SchemaError):
        parse_scenario(json.dumps(data))


def test_wrong_schema_version_is_a_schema_error():
    data = _tetra_json()
    data["schema_version"] = 2
    with pytest.raises(SchemaError):
        parse_scenario(json.dumps(data))


def test_dangling_component_is_a_semantic_error():
    data = _tetra_json()
    data["double_curves"][0]["sides"][0]["component"] = "X9"
    with pytest.raises(SemanticError, match="X9"):
        parse_scenario(json.dumps(data))


def test_dangling_triple_point_is_a_semantic_error():
    data = _tetra_json()
    data["double_curves"][0]["triple_marks"][0]["triple_point"] = "p9"
    with pytest.raises(SemanticError, match="p9"):
        parse_scenario(json.dumps(data))


def test_unknown_names_and_families():
    with pytest.raises(UnknownScenario):
        load("no-such-scenario")
    with pytest.raises(UnknownScenario):
        build_family("no-such-family")


def test_family_parameters():
    assert build_family("fujita", {"k": "2"}).name == load("fujita-k2").name
    assert to_surface(build_family("fujita", {"k": "2"})) == to_surface(load("fujita-k2"))
    with pytest.raises(ValueError):
        build_family("fujita", {"k": "two"})


def test_load_reads_a_path(tmp_path):
    path = tmp_path / "mine.json"
    path.write_text(shipped_text("fujita-k0"))
    assert load(str(path)) == load("fujita-k0")
