import pytest

from pasting_deformations.engine.computad import (
    Computad3,
    DiagramLabel,
    PastingScheme2,
    Path,
    all_sequentializations,
    compose_2_diagram,
    compose_path,
    sequentialize,
    validate_computad3,
    validate_labelling,
    validate_pasting_scheme2,
)
from pasting_deformations.engine.errors import CompositionError
from pasting_deformations.engine.lincat import NatTransf, functors_equal, nats_equal


@pytest.fixture
def interchange(load):
    return load("interchange")


def test_bundled_computads_are_well_formed(load):
    for name in ("interchange", "square", "loop"):
        project = load(name)
        for computad in project.computads.values():
            assert validate_computad3(computad) == []
        for label in project.labels.values():
            assert validate_labelling(label) == []


def test_interchange_scheme_is_valid(interchange):
    _, scheme = interchange.scheme("S")
    assert validate_pasting_scheme2(scheme) == []
    assert str(scheme.source) == "(f h)"
    assert str(scheme.target) == "(g k)"


def test_interchange_firing_orders_compose_equally(interchange):
    label, scheme = interchange.scheme("S")
    orders = all_sequentializations(scheme)
    assert sorted(tuple(seq.order) for seq in orders) == [("al", "be"), ("be", "al")]
    composites = [compose_2_diagram(label, scheme, seq) for seq in orders]
    assert nats_equal(composites[0], composites[1])


def test_interchange_composite_value(interchange):
    label, scheme = interchange.scheme("S")
    field = label.categories["a"].field
    nat = compose_2_diagram(label, scheme)
    # x (1 + x) = x
    assert nat.component("o") == (field.zero, field.one)
    assert sequentialize(scheme).order == ["al", "be"]


def test_empty_scheme_composes_to_identity(interchange):
    label = interchange.labels["L"]
    scheme = label.computad.scheme("bare", Path("a", ["f", "h"]), [])
    nat = compose_2_diagram(label, scheme)
    assert functors_equal(nat.source, compose_path(label, Path("a", ["f", "h"])))
    assert nats_equal(nat, NatTransf("1", nat.source, nat.source, {"o": {"e": 1}}))


def test_unreachable_vertex_is_reported():
    K = Computad3("K", ["a", "b", "z"], {"f": ("a", "b")})
    scheme = PastingScheme2("G", K, Path("a", ["f"]), [], vertices=["z"])
    findings = validate_pasting_scheme2(scheme)
    assert "G: vertex z lies on no path from a to b" in findings


def test_euler_count_is_checked():
    K = Computad3("K", ["a", "b"], {"f": ("a", "b")}, {"loop": (Path("a", ["f"]), Path("a", ["f"]))})
    scheme = K.scheme("G", Path("a", ["f"]), ["loop"])
    findings = validate_pasting_scheme2(scheme)
    assert "G: Euler count V - E + F = 2 - 1 + 2 is not 2" in findings


def test_unfireable_face_is_reported():
    K = Computad3(
        "K",
        ["a", "b", "c"],
        {"f": ("a", "b"), "g": ("b", "c"), "h": ("a", "c")},
        {"al": (Path("a", ["h"]), Path("a", ["f", "g"]))},
    )
    scheme = K.scheme("G", Path("a", ["f", "g"]), ["al"])
    findings = validate_pasting_scheme2(scheme)
    assert any("not composable" in f for f in findings)
    with pytest.raises(CompositionError):
        sequentialize(scheme)


def test_malformed_computad_is_reported():
    K = Computad3(
        "K",
        ["a", "b"],
        {"f": ("a", "b"), "g": ("a", "q")},
    )
    assert validate_computad3(K) == ["K: edge g refers to unknown vertex q"]

    K = Computad3(
        "K",
        ["a", "b", "c"],
        {"f": ("a", "b"), "g": ("a", "c")},
        {"al": (Path("a", ["f"]), Path("a", ["g"]))},
    )
    findings = validate_computad3(K)
    assert len(findings) == 1 and findings[0].startswith("2-cell al: domain (f) runs a->b")


def test_three_cell_with_different_composites_is_reported(load):
    project = load("square")
    label = project.labels["L"]
    I = project.functors["I"]
    times_x = NatTransf("times_x", I, I, {"o": {"x": 1}})
    nats = dict(label.nats, ga=times_x)
    broken = DiagramLabel("L2", label.computad, label.categories, label.functors, nats)
    assert validate_labelling(broken) == ["L2: 3-cell Th asserts equal composites, but they differ"]


def test_unlabelled_edge_is_reported(load):
    project = load("loop")
    label = project.labels["LL"]
    bare = DiagramLabel("bare", label.computad, label.categories, {}, {})
    assert validate_labelling(bare) == ["bare: edge F is not labelled"]
