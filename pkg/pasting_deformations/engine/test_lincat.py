import pytest

from pasting_deformations.engine.errors import CompositionError, ValidationError
from pasting_deformations.engine.lincat import (
    LinCategory,
    LinFunctor,
    NatTransf,
    compose_functors,
    functors_equal,
    identity_functor,
    identity_nat,
    validate_category,
    validate_functor,
    validate_naturality,
    vertical_compose_nats,
    whisker_left,
    whisker_right,
)


def test_bundled_categories_are_valid(load):
    for name in ("k1", "dual", "a2", "semisimple"):
        project = load(name)
        for category in project.categories.values():
            assert validate_category(category) == []


def test_missing_products_are_zero(dual, qq):
    assert dual.compose_vectors("o", "o", "o", (qq(0), qq(1)), (qq(0), qq(1))) == (qq(0), qq(0))
    assert dual.compose_vectors("o", "o", "o", (qq(2), qq(1)), (qq(3), qq(0))) == (qq(6), qq(3))


def test_non_associative_table_is_reported(qq):
    C = LinCategory(
        "BAD",
        qq,
        ["o"],
        {("o", "o"): ["e", "x", "y"]},
        {"o": "e"},
        {("x", "x"): {"y": 1}, ("x", "y"): {"x": 1}},
    )
    findings = validate_category(C)
    assert any("associativity fails at (x, x, x)" in f for f in findings)


def test_unit_law_failure_without_filled_identities(qq):
    C = LinCategory("NOUNIT", qq, ["o"], {("o", "o"): ["e", "x"]}, {"o": "e"}, {("e", "e"): {"e": 1}}, fill_identities=False)
    findings = validate_category(C)
    assert "NOUNIT: left unit law fails at x" in findings
    assert "NOUNIT: right unit law fails at x" in findings


def test_category_construction_errors(qq):
    with pytest.raises(ValidationError):
        LinCategory("C", qq, ["o", "o"], {}, {"o": "e"})
    with pytest.raises(ValidationError):
        LinCategory("C", qq, ["o"], {("o", "o"): ["e"]}, {"o": "f"})
    with pytest.raises(ValidationError):
        LinCategory("C", qq, ["o"], {("o", "o"): ["e", "e"]}, {"o": "e"})


def test_unit_inclusion_is_a_functor(load):
    project = load("dual")
    assert validate_functor(project.functors["unit"]) == []
    assert validate_functor(project.functors["I"]) == []


def test_functor_failures(dual):
    collapse = LinFunctor("collapse", dual, dual, {"o": "o"}, {"e": {"e": 1}, "x": {"e": 1}})
    assert validate_functor(collapse) == ["collapse: not multiplicative at (x, x)"]
    shift = LinFunctor("shift", dual, dual, {"o": "o"}, {"e": {"x": 1}, "x": {"x": 1}})
    assert "shift: identity of o is not preserved" in validate_functor(shift)


def test_functor_composition(load, qq):
    project = load("loop")
    S = project.functors["S"]
    SS = compose_functors(S, S)
    assert SS.apply("o", "o", (qq(0), qq(1))) == (qq(0), qq(4))
    assert validate_functor(SS) == []
    I = identity_functor(S.source)
    assert compose_functors(I, S) is S
    assert compose_functors(S, I) is S
    assert functors_equal(compose_functors(I, I), I)


def test_scalar_components_are_natural(load):
    project = load("a2")
    assert validate_naturality(project.nats["twice"]) == []
    assert validate_naturality(identity_nat(project.functors["I"])) == []


def test_unequal_components_fail_naturality(load, qq):
    project = load("a2")
    I = project.functors["I"]
    sigma = NatTransf("bad", I, I, {"a": {"ea": 1}, "b": (qq(0),)})
    assert validate_naturality(sigma) == ["bad: naturality fails at f"]


def test_missing_component_is_rejected(load):
    project = load("a2")
    I = project.functors["I"]
    with pytest.raises(ValidationError):
        validate_naturality(NatTransf("partial", I, I, {"a": {"ea": 1}}))


def test_whiskering_and_vertical_composition(load, qq):
    project = load("dual")
    times_x = project.nats["times_x"]
    squared = vertical_compose_nats(times_x, times_x)
    assert squared.component("o") == (qq(0), qq(0))

    loop = load("loop")
    S = loop.functors["S"]
    sigma = NatTransf("x", identity_functor(S.source), identity_functor(S.source), {"o": {"x": 1}})
    right = whisker_right(sigma, S)
    assert right.component("o") == (qq(0), qq(2))
    assert validate_naturality(right) == []
    left = whisker_left(S, sigma)
    assert left.component("o") == (qq(0), qq(1))


def test_whiskering_across_categories_is_refused(load):
    dual = load("dual")
    a2 = load("a2")
    with pytest.raises(CompositionError):
        whisker_right(dual.nats["times_x"], a2.functors["I"])
