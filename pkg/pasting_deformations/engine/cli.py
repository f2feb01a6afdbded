"""
Command-line front end

Every command loads a project file, runs one computation and renders a
Report. Exit codes: 0 success, 1 validation failure or refused extension,
2 parse or configuration error.
"""

import logging
import sys
from pathlib import Path as FilePath

import click

from pasting_deformations.engine.computad import compose_2_diagram, validate_computad3, validate_labelling, validate_pasting_scheme2
from pasting_deformations.engine.defcomplex import build_complex, cohomology_dim
from pasting_deformations.engine.deform import deformation_kind, validate_deformation
from pasting_deformations.engine.errors import ConfigurationError, ValidationError, handle_engine_error
from pasting_deformations.engine.lincat import validate_category, validate_functor, validate_naturality
from pasting_deformations.engine.obstruction import (
    check_equivalence_first_order,
    classify_first_order,
    extend_order,
    obstruction,
    same_first_order_class,
)
from pasting_deformations.engine.project import composite_blocks, deformation_blocks, emit_project, load_project
from pasting_deformations.engine.units import normalize_units
from pasting_deformations.engine.utils import create_report, log_engine_call
from pasting_deformations.engine.validators import COMPLEX_KINDS, InputValidator

logger = logging.getLogger(__name__)

COEFFICIENT_HEADERS = ("part", "order", "objects", "arrows", "target", "value")


def coefficient_rows(d, prefix=""):
    """Nonzero coefficients of a deformation, one row per target basis entry."""
    kind = deformation_kind(d)
    rows = []

    def add(part, per_order):
        for n in sorted(per_order):
            for objs, ids, target, value in per_order[n].entries():
                rows.append((prefix + part, n, " ".join(objs), " ".join(ids), target, value))

    if kind == "category":
        add("mu", d.mu)
        add("iota", d.iota)
    elif kind == "functor":
        add("map", d.maps)
    elif kind == "nat":
        add("component", d.components)
    else:
        for v, vd in d.vertices.items():
            rows.extend(coefficient_rows(vd, f"{prefix}vertex:{v}/"))
        for e, fd in d.edges.items():
            rows.extend(coefficient_rows(fd, f"{prefix}edge:{e}/"))
        for f, per_order in d.faces.items():
            add(f"face:{f}", per_order)
    return rows


def _fresh_name(project, base):
    is_valid, error = InputValidator.validate_identifier(base)
    if not is_valid:
        raise ConfigurationError(f"{error}; emitted ids must parse again")
    taken = set(project.deformations) | set(project.categories) | set(project.functors) | set(project.nats)
    if base not in taken:
        return base
    k = 2
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def _require_args(name, args, count):
    if len(args) not in count:
        expected = " or ".join(str(c) for c in count)
        raise ValidationError(f"{name} takes {expected} argument(s), got {len(args)}")


def _order_argument(text, config):
    try:
        value = int(text)
    except (TypeError, ValueError):
        raise ValidationError(f"Order must be an integer, got '{text}'")
    is_valid, value, error = InputValidator.validate_order(value, config["deformation"]["max_order"])
    if not is_valid:
        raise ValidationError(error)
    return value


# Commands


def _validate(project, args, config, report):
    _require_args("validate", args, (0,))
    findings = []
    checks = (
        (project.categories, validate_category),
        (project.functors, validate_functor),
        (project.nats, validate_naturality),
        (project.computads, validate_computad3),
        (project.labels, validate_labelling),
    )
    for table, check in checks:
        for item in table.values():
            findings.extend(check(item))
    for _, scheme in project.schemes.values():
        findings.extend(validate_pasting_scheme2(scheme))
    for d in project.deformations.values():
        findings.extend(validate_deformation(d))

    report.results.update({
        "categories": len(project.categories),
        "functors": len(project.functors),
        "nats": len(project.nats),
        "computads": len(project.computads),
        "labels": len(project.labels),
        "schemes": len(project.schemes),
        "deformations": len(project.deformations),
    })
    if findings:
        raise ValidationError(f"{len(findings)} problem(s) found", findings)
    report.message = "All structures are valid"
    return report


def _compose(project, args, config, report):
    _require_args("compose", args, (1,))
    label, scheme = project.scheme(args[0])
    findings = validate_pasting_scheme2(scheme)
    if findings:
        raise ValidationError(f"{scheme.name} is not a composable pasting scheme", findings)
    nat = compose_2_diagram(label, scheme)
    F, G = nat.source, nat.target
    B = F.target
    rows = [(x, f"{F(x)} -> {G(x)}", B.format_vector(F(x), G(x), nat.component(x))) for x in F.source.objects]
    report.add_table(f"composite of {scheme.name}", ("object", "hom", "component"), rows)
    report.results["source"] = str(scheme.source)
    report.results["target"] = str(scheme.target)
    report.emitted.extend(composite_blocks(project, label, scheme, nat, _fresh_name(project, f"{scheme.name}_composite")))
    return report


def _subject_for(project, name, kind):
    if kind == "pair":
        parts = name.split(",")
        if len(parts) != 2:
            raise ValidationError("A pair subject is written F,G")
        return tuple(project.subject(part)[1] for part in parts)
    found_kind, subject = project.subject(name)
    expected = {"identity3": "nat"}.get(kind, kind)
    if found_kind != expected:
        raise ValidationError(f"'{name}' is a {found_kind}, not a {expected}")
    return subject


def _cohomology(project, args, config, report):
    _require_args("cohomology", args, (3,))
    name, kind, degrees_text = args
    is_valid, error = InputValidator.validate_complex_kind(kind)
    if not is_valid:
        raise ValidationError(error)
    is_valid, degrees, error = InputValidator.validate_degrees(degrees_text)
    if not is_valid:
        raise ValidationError(error)
    X = build_complex(kind, _subject_for(project, name, kind), config=config)
    for n in degrees:
        report.results[f"H^{n}"] = cohomology_dim(X, n)
    X.report_into(report, config["report"]["include_matrices"])
    return report


def _classify(project, args, config, report):
    _require_args("classify", args, (1, 2))
    name = args[0]
    kind, subject = project.subject(name)
    if len(args) == 2 and args[1] != kind:
        subject = _subject_for(project, name, args[1])
        kind = args[1]
    result = classify_first_order(subject, kind, config)
    report.results["degree"] = result.degree
    report.results["dimension"] = result.dimension
    rows = []
    for d in result.deformations:
        d.name = _fresh_name(project, d.name)
        rows.extend(coefficient_rows(d, f"{d.name}:"))
        report.emitted.extend(deformation_blocks(project, d, d.name))
    if rows:
        report.add_table("representatives", COEFFICIENT_HEADERS, rows)
    return report


def _obstruct(project, args, config, report):
    _require_args("obstruct", args, (2,))
    d = project.deformation(args[0])
    n = _order_argument(args[1], config)
    omega = obstruction(d, n, config)
    report.results["degree"] = omega.degree
    report.results["zero"] = omega.is_zero()
    report.results["nonzero_summands"] = omega.nonzero_summands()
    report.results["class"] = [omega.complex.field.format(c) for c in omega.class_coordinates() or ()]
    rows = omega.table()
    if rows:
        report.add_table(f"obstruction of {d.name} at order {n}", ("summand", "objects", "arrows", "target", "value"), rows)
    return report


def _extend(project, args, config, report):
    _require_args("extend", args, (2,))
    d = project.deformation(args[0])
    target = _order_argument(args[1], config)
    if target <= d.order:
        raise ValidationError(f"{d.name} already has order {d.order}")
    extended = d
    for n in range(d.order + 1, target + 1):
        result, omega = extend_order(extended, n, config)
        if result is None:
            coordinates = [omega.complex.field.format(c) for c in omega.class_coordinates() or ()]
            report.results["obstructed_at"] = n
            report.results["class"] = coordinates
            report.add_table(
                f"obstruction of {d.name} at order {n}",
                ("summand", "objects", "arrows", "target", "value"),
                omega.table(),
            )
            return report.fail(f"{d.name} does not extend to order {n}: the obstruction class is nonzero")
        extended = result
    name = _fresh_name(project, f"{d.name}_order{target}")
    extended.name = name
    rows = [row for row in coefficient_rows(extended) if row[1] > d.order]
    report.add_table(f"new coefficients of {name}", COEFFICIENT_HEADERS, rows)
    report.results["order"] = target
    report.emitted.extend(deformation_blocks(project, extended, name))
    return report


def _equiv(project, args, config, report):
    _require_args("equiv", args, (2,))
    d1, d2 = project.deformation(args[0]), project.deformation(args[1])
    if deformation_kind(d1) == "diagram":
        report.results["equivalent"] = same_first_order_class(d1, d2, config)
        return report
    witness = check_equivalence_first_order(d1, d2, config)
    report.results["equivalent"] = witness is not None
    if witness is not None:
        rows = []
        for part in witness:
            rows.extend(coefficient_rows(part, f"{part.name}:"))
        report.add_table("witness", COEFFICIENT_HEADERS, rows)
    return report


def _normalize_units(project, args, config, report):
    _require_args("normalize-units", args, (1,))
    d = project.deformation(args[0])
    normalized, witness = normalize_units(d)
    name = _fresh_name(project, f"{d.name}_normalized")
    normalized.name = name
    report.add_table(f"coefficients of {name}", COEFFICIENT_HEADERS, coefficient_rows(normalized))
    rows = []
    for part in witness:
        rows.extend(coefficient_rows(part, f"{part.name}:"))
    if rows:
        report.add_table("equivalence", COEFFICIENT_HEADERS, rows)
    report.emitted.extend(deformation_blocks(project, normalized, name))
    return report


COMMANDS = {
    "validate": _validate,
    "compose": _compose,
    "cohomology": _cohomology,
    "classify": _classify,
    "obstruct": _obstruct,
    "extend": _extend,
    "equiv": _equiv,
    "normalize-units": _normalize_units,
}


def _overrides(flags):
    overrides = {}
    if flags.get("max_degree") is not None:
        overrides.setdefault("complex", {})["max_degree"] = flags["max_degree"]
    if flags.get("matrices"):
        overrides.setdefault("report", {})["include_matrices"] = True
    if flags.get("field"):
        overrides.setdefault("field", {})["spec"] = flags["field"]
    return overrides


def _window(flags):
    if not flags.get("window"):
        return None
    is_valid, window, error = InputValidator.validate_window(flags["window"])
    if not is_valid:
        raise ConfigurationError(error)
    return window


@handle_engine_error
def run_command(command, name, project_path, args, flags):
    if name not in COMMANDS:
        raise ValidationError(f"Unknown command '{name}'; expected one of {', '.join(COMMANDS)}")
    project = load_project(project_path, flags.get("field"))
    config = project.config(_overrides(flags))
    try:
        return _execute(command, name, project, project_path, args, flags, config)
    except Exception as e:
        e.engine_config = config
        raise


def _execute(command, name, project, project_path, args, flags, config):
    log_engine_call(name, {"project": str(project_path), "args": list(args), "flags": flags}, config)

    window = _window(flags)
    if window is not None:
        config["complex"]["windows"].update({kind: window for kind in COMPLEX_KINDS})

    report = create_report(command)
    COMMANDS[name](project, list(args), config, report)

    if flags.get("emit"):
        results = {key: report.results[key] for key in sorted(report.results)}
        text = emit_project(project, report.emitted, " ".join([name, *args]), results)
        FilePath(flags["emit"]).write_text(text, encoding="utf-8")
        report.results["emitted"] = str(flags["emit"])
    return report


def run(name, project_path, args=(), flags=None):
    """
    Run one command against a project file

    Args:
        name (str): Command name, e.g. "extend"
        project_path (str): Project file
        args (list): Positional command arguments
        flags (dict): field, max_degree, window, emit, matrices

    Returns:
        tuple: (Report, exit code)
    """
    flags = {key: value for key, value in (flags or {}).items() if value not in (None, False)}
    command = " ".join(["pdef", name, str(project_path), *map(str, args)])
    report = run_command(command, name, project_path, list(args), flags)
    return report, report.exit_code


# Click surface


def common_options(func):
    options = (
        click.option("--field", default=None, help="Ground field: q or fp:<p>"),
        click.option("--max-degree", type=int, default=None, help="Largest Hochschild degree used as a source"),
        click.option("--window", default=None, help="Degree window lo:hi for every assembled complex"),
        click.option("--emit", type=click.Path(dir_okay=False, writable=True), default=None, help="Write the project with results"),
        click.option("--matrices", is_flag=True, help="Include differential dumps"),
        click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text"),
        click.option("-v", "--verbose", is_flag=True, help="Log engine calls"),
    )
    for option in reversed(options):
        func = option(func)
    return func


def _invoke(name, project_path, args, field, max_degree, window, emit, matrices, output_format, verbose):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    flags = {"field": field, "max_degree": max_degree, "window": window, "emit": emit, "matrices": matrices}
    report, exit_code = run(name, project_path, args, flags)
    click.echo(report.to_json() if output_format == "json" else report.to_text(), nl=False)
    sys.exit(exit_code)


@click.group(name="pdef")
def main():
    """Deformations of linear categories, functors, natural transformations and pasting diagrams."""


@main.command(name="validate")
@click.argument("project", type=click.Path(dir_okay=False))
@common_options
def validate_command(project, **flags):
    """Check every structure and deformation in a project."""
    _invoke("validate", project, [], **flags)


@main.command(name="compose")
@click.argument("project", type=click.Path(dir_okay=False))
@click.argument("scheme")
@common_options
def compose_command(project, scheme, **flags):
    """Compose a labelled pasting scheme."""
    _invoke("compose", project, [scheme], **flags)


@main.command(name="cohomology")
@click.argument("project", type=click.Path(dir_okay=False))
@click.argument("subject")
@click.argument("kind")
@click.argument("degrees")
@common_options
def cohomology_command(project, subject, kind, degrees, **flags):
    """Cohomology dimensions of a deformation complex in the given degrees."""
    _invoke("cohomology", project, [subject, kind, degrees], **flags)


@main.command(name="classify")
@click.argument("project", type=click.Path(dir_okay=False))
@click.argument("subject")
@click.argument("kind", required=False)
@common_options
def classify_command(project, subject, kind, **flags):
    """First-order deformations up to equivalence."""
    _invoke("classify", project, [subject, *([kind] if kind else [])], **flags)


@main.command(name="obstruct")
@click.argument("project", type=click.Path(dir_okay=False))
@click.argument("deformation")
@click.argument("order")
@common_options
def obstruct_command(project, deformation, order, **flags):
    """The obstruction to adding the given order."""
    _invoke("obstruct", project, [deformation, order], **flags)


@main.command(name="extend")
@click.argument("project", type=click.Path(dir_okay=False))
@click.argument("deformation")
@click.argument("order")
@common_options
def extend_command(project, deformation, order, **flags):
    """Extend a deformation order by order."""
    _invoke("extend", project, [deformation, order], **flags)


@main.command(name="equiv")
@click.argument("project", type=click.Path(dir_okay=False))
@click.argument("first")
@click.argument("second")
@common_options
def equiv_command(project, first, second, **flags):
    """Look for a first-order equivalence."""
    _invoke("equiv", project, [first, second], **flags)


@main.command(name="normalize-units")
@click.argument("project", type=click.Path(dir_okay=False))
@click.argument("deformation")
@common_options
def normalize_units_command(project, deformation, **flags):
    """Replace deformed identities by undeformed ones."""
    _invoke("normalize-units", project, [deformation], **flags)
