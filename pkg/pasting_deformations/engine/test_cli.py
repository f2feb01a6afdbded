import json
import logging

from click.testing import CliRunner

from pasting_deformations.engine.cli import main, run
from pasting_deformations.engine.project import load_project


def test_validate_clean_project(projects_dir):
    report, code = run("validate", projects_dir / "dual.pdef")
    assert code == 0
    assert report.message == "All structures are valid"
    assert report.results["deformations"] == 3


def test_validate_reports_broken_three_cell(projects_dir):
    report, code = run("validate", projects_dir / "square.pdef")
    assert code == 1
    assert report.status == "invalid"
    assert report.findings == ["broken-def: 3-cell Th composites differ at order 1 on o"]


def test_compose(projects_dir):
    report, code = run("compose", projects_dir / "interchange.pdef", ["S"])
    assert code == 0
    assert report.results["source"] == "(f h)"
    assert report.results["target"] == "(g k)"
    assert report.emitted[-1].startswith("nat S_composite : ")


def test_cohomology(projects_dir):
    report, code = run("cohomology", projects_dir / "dual.pdef", ["DUAL", "category", "0:2"])
    assert code == 0
    assert report.results["H^0"] == 2
    assert report.results["H^2"] == 1


def test_cohomology_of_a_pair(projects_dir):
    report, code = run("cohomology", projects_dir / "dual.pdef", ["I,I", "pair", "0:1"])
    assert code == 0
    assert set(report.results) == {"H^0", "H^1"}


def test_classify(projects_dir):
    report, code = run("classify", projects_dir / "dual.pdef", ["DUAL"])
    assert code == 0
    assert report.results["dimension"] == 1
    assert report.emitted[0].startswith("deformation DUAL_class1 : category DUAL order 1 {")


def test_obstruct(projects_dir):
    report, code = run("obstruct", projects_dir / "dual.pdef", ["dual-def", "2"])
    assert code == 0
    assert report.results["zero"] is True
    assert report.results["nonzero_summands"] == []
    assert all(c == "0" for c in report.results["class"])


def test_extend_and_emit(projects_dir, tmp_path):
    out = tmp_path / "extended.pdef"
    report, code = run("extend", projects_dir / "dual.pdef", ["dual-def", "3"], {"emit": str(out)})
    assert code == 0
    assert report.results["order"] == 3
    project = load_project(out)
    assert project.deformation("dual-def_order3").order == 3
    assert "results {" in out.read_text()


def test_extend_refuses_invalid_input(projects_dir):
    report, code = run("extend", projects_dir / "square.pdef", ["broken-def", "2"])
    assert code == 1
    assert "broken-def is not valid through order 1" in report.message


def test_extend_needs_a_higher_order(projects_dir):
    _, code = run("extend", projects_dir / "dual.pdef", ["dual-def", "1"])
    assert code == 1


def test_equiv(projects_dir):
    report, _ = run("equiv", projects_dir / "dual.pdef", ["dual-def", "dual-def2"])
    assert report.results["equivalent"] is False
    report, _ = run("equiv", projects_dir / "dual.pdef", ["unit-def", "unit-def"])
    assert report.results["equivalent"] is True


def test_normalize_units(projects_dir):
    report, code = run("normalize-units", projects_dir / "dual.pdef", ["unit-def"])
    assert code == 0
    assert report.emitted[0].startswith("deformation unit-def_normalized : category DUAL order 1 {")


def test_parse_and_configuration_errors_exit_2(projects_dir, tmp_path):
    _, code = run("validate", tmp_path / "missing.pdef")
    assert code == 2
    broken = tmp_path / "broken.pdef"
    broken.write_text("category C {\n    object\n}\n")
    report, code = run("validate", broken)
    assert code == 2
    assert report.errors["section"] == "category C"
    _, code = run("cohomology", projects_dir / "dual.pdef", ["DUAL", "category", "0:1"], {"window": "3:1"})
    assert code == 2


def test_window_flag_limits_the_complex(projects_dir):
    report, code = run("cohomology", projects_dir / "dual.pdef", ["DUAL", "category", "0:2"], {"window": "0:1"})
    assert code == 1
    assert report.errors["error_type"] == "window_error"


def test_unknown_command(projects_dir):
    _, code = run("frobnicate", projects_dir / "dual.pdef")
    assert code == 1


def test_click_entry_point(projects_dir):
    runner = CliRunner()
    result = runner.invoke(main, ["validate", str(projects_dir / "dual.pdef")])
    assert result.exit_code == 0
    assert "status: ok" in result.output

    result = runner.invoke(main, ["cohomology", str(projects_dir / "dual.pdef"), "DUAL", "category", "2", "--format", "json"])
    assert result.exit_code == 0
    assert json.loads(result.output)["results"] == {"H^2": 1}

    result = runner.invoke(main, ["validate", str(projects_dir / "square.pdef")])
    assert result.exit_code == 1


def test_project_switches_off_error_logging(projects_dir, tmp_path, caplog):
    source = (projects_dir / "dual.pdef").read_text()
    quiet = tmp_path / "quiet.pdef"
    quiet.write_text("settings {\n    log_errors false\n}\n" + source)

    with caplog.at_level(logging.ERROR, logger="pasting_deformations.engine.errors"):
        _, code = run("obstruct", projects_dir / "dual.pdef", ["missing", "2"])
    assert code == 2
    assert any("Unknown deformation" in record.getMessage() for record in caplog.records)

    caplog.clear()
    with caplog.at_level(logging.ERROR, logger="pasting_deformations.engine.errors"):
        _, code = run("obstruct", quiet, ["missing", "2"])
    assert code == 2
    assert [record for record in caplog.records if record.name == "pasting_deformations.engine.errors"] == []
