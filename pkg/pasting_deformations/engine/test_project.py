import pytest

from pasting_deformations.config.engine_settings import get_window_config
from pasting_deformations.engine.errors import ParseError
from pasting_deformations.engine.lincat import validate_category
from pasting_deformations.engine.obstruction import extend_order
from pasting_deformations.engine.project import (
    deformation_blocks,
    emit_project,
    format_lincomb,
    parse_project_text,
    parse_statements,
)
from pasting_deformations.engine.validators import InputValidator

SMALL = """\
field q

category C {
    object o
    hom o -> o : e n-1
    identity o = e
    product n-1 n-1 = 0
}
"""


def test_bundled_dual_project(load):
    project = load("dual")
    assert project.field.kind == "q"
    assert sorted(project.categories) == ["DUAL", "K1"]
    assert sorted(project.functors) == ["I", "unit"]
    assert list(project.nats) == ["times_x"]
    assert sorted(project.deformations) == ["dual-def", "dual-def2", "unit-def"]
    assert project.subject("unit")[0] == "functor"


def test_field_override(load):
    project = load("dual", "fp:5")
    assert project.field.p == 5
    assert project.settings["field"]["spec"] == "fp:5"


def test_statements_carry_lines():
    statements = parse_statements(SMALL)
    assert [(st.kind, st.line, st.section) for st in statements] == [
        ("field", 1, "field"),
        ("category", 3, "category C"),
    ]


def test_hyphenated_ids():
    project = parse_project_text(SMALL)
    C = project.categories["C"]
    assert C.basis("o", "o") == ["e", "n-1"]
    assert validate_category(C) == []
    value = C.vector("o", "o", {"e": 2, "n-1": -1})
    assert format_lincomb(C, "o", "o", value) == "2*e - n-1"


def test_syntax_error_names_the_statement():
    text = SMALL + "\ncategory D {\n    object o\n    hom o -> : e\n}\n"
    with pytest.raises(ParseError) as info:
        parse_project_text(text)
    assert info.value.section == "category D"
    assert info.value.exit_code == 2


def test_unknown_reference_is_reported_with_line():
    text = SMALL + "\nfunctor F : C -> X {\n    object o -> o\n}\n"
    with pytest.raises(ParseError) as info:
        parse_project_text(text)
    assert info.value.message == "Unknown category 'X'"
    assert info.value.line == 10
    assert info.value.section == "functor F"


def test_duplicate_ids_are_refused():
    text = SMALL + "\ncategory C {\n    object p\n    hom p -> p : u\n    identity p = u\n}\n"
    with pytest.raises(ParseError) as info:
        parse_project_text(text)
    assert "already defined" in info.value.message


def test_coefficient_order_is_checked():
    text = SMALL + "\ndeformation d : category C order 1 {\n    mu 2 n-1 n-1 = e\n}\n"
    with pytest.raises(ParseError) as info:
        parse_project_text(text)
    assert info.value.message == "Coefficient order 2 lies outside 1..1"


def test_settings_block():
    text = "settings {\n    max_degree 5\n    window category 0:2\n}\n" + SMALL
    project = parse_project_text(text)
    config = project.config()
    assert config["complex"]["max_degree"] == 5
    assert get_window_config("category", config) == (0, 2)
    with pytest.raises(ParseError):
        parse_project_text("settings {\n    window nat 2:1\n}\n" + SMALL)


def test_emitted_category_deformation_parses_back(load):
    project = load("dual")
    extended, _ = extend_order(project.deformation("dual-def"), 2)
    blocks = deformation_blocks(project, extended, "dual-def-2")
    text = emit_project(project, blocks, "extend", {"obstruction": "zero"})
    assert text.rstrip().endswith("}")
    reparsed = parse_project_text(text)
    copy = reparsed.deformation("dual-def-2")
    assert copy.order == 2
    assert deformation_blocks(reparsed, copy, "dual-def-2") == blocks


def test_emitted_diagram_deformation_parses_back(load):
    project = load("square")
    blocks = deformation_blocks(project, project.deformation("square-def"), "copy")
    reparsed = parse_project_text(emit_project(project, blocks, "validate", {}))
    copy = reparsed.deformation("copy")
    assert sorted(copy.vertices) == ["a", "b", "c", "d"]
    assert deformation_blocks(reparsed, copy, "copy") == blocks


def test_identity_declarations_resolve_by_name():
    text = SMALL + "\nfunctor I = identity C\nnat one = identity I\n"
    functor_statement = parse_statements(text)[2]
    assert isinstance(functor_statement.tokens["identity_of"], str)
    assert functor_statement.tokens["identity_of"] == "C"
    project = parse_project_text(text)
    C = project.categories["C"]
    assert project.functors["I"].source is C
    assert project.nats["one"].source is project.functors["I"]
    assert project.nats["one"].name == "one"


@pytest.mark.parametrize("name", ["a2", "dual", "interchange", "k1", "square"])
def test_bundled_identity_functors_load(load, name):
    project = load(name)
    I = project.functors["I"]
    assert I.source is I.target
    assert I.source in project.categories.values()



def test_logging_settings():
    project = parse_project_text("settings {\n    log_errors false\n    log_builds true\n}\n" + SMALL)
    config = project.config()
    assert config["logging"]["log_errors"] is False
    assert config["logging"]["log_builds"] is True
    assert config["logging"]["log_commands"] is True


def test_identifier_validation():
    assert InputValidator.validate_identifier("dual-def_order3") == (True, None)
    assert InputValidator.validate_identifier("σ'") == (True, None)
    for bad in ("3x", "I,I", "a-", "-a", ""):
        is_valid, error = InputValidator.validate_identifier(bad)
        assert not is_valid
        assert bad in error
