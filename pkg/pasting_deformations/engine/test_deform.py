import pytest

from pasting_deformations.engine.computad import all_sequentializations
from pasting_deformations.engine.deform import (
    CategoryDeformation,
    DiagramDeformation,
    FunctorDeformation,
    NatDeformation,
    category_deformations_equal,
    check_category_equivalence,
    compose_functor_deformations,
    deformation_kind,
    functor_deformations_equal,
    identity_functor_deformation,
    induce_2_diagram,
    induce_composite,
    mc_residual,
    nat_deformations_equal,
    padded,
    realize,
    trivial_deformation,
    truncate,
    validate_deformation,
)
from pasting_deformations.engine.errors import ContextMismatchError, DeformationError
from pasting_deformations.engine.hochschild import Cochain
from pasting_deformations.engine.lincat import identity_functor, validate_category
from pasting_deformations.engine.obstruction import extend_order


@pytest.fixture
def dual_project(load):
    return load("dual")


def face_deformation(label, al, be, order=1):
    """Trivial vertices and edges with the given order-1 face vectors."""
    base = trivial_deformation("diagram", label, order, "dd")
    faces = {}
    for f, value in (("al", al), ("be", be)):
        nat = label.nats[f]
        faces[f] = {1: Cochain(nat.source, nat.target, 0, {(("o",), ()): value})}
    return DiagramDeformation("dd", label, order, base.vertices, base.edges, faces)


def test_bundled_deformations_are_valid(load):
    for name in ("dual", "loop", "square"):
        project = load(name)
        for def_name, d in project.deformations.items():
            if def_name == "broken-def":
                continue
            assert validate_deformation(d) == [], def_name


def test_kinds(dual_project, load):
    assert deformation_kind(dual_project.deformation("dual-def")) == "category"
    assert deformation_kind(load("loop").deformation("loop-def")) == "diagram"
    with pytest.raises(DeformationError):
        deformation_kind(dual_project.categories["DUAL"])


def test_dual_numbers_extend_to_order_three(dual_project):
    d = dual_project.deformation("dual-def")
    for n in (2, 3):
        d, omega = extend_order(d, n)
        assert d is not None
        assert omega.is_zero()
    assert d.order == 3
    assert validate_deformation(d) == []


def test_mc_residual_vanishes_on_valid_deformation(dual_project):
    d = dual_project.deformation("dual-def")
    assert all(r.is_zero() for r in mc_residual(d).values())


def test_broken_unit_law_is_reported(dual):
    I = identity_functor(dual)
    field = dual.field
    mu = Cochain(I, I, 2, {(("o", "o", "o"), (1, 0)): (field.zero, field.one)})
    d = CategoryDeformation("bad", dual, 1, {1: mu})
    findings = validate_deformation(d)
    assert "bad: right unit law fails at order 1 on (x)" in findings
    assert "bad: left unit law fails at order 1 on (x)" not in findings


def test_coefficient_context_is_checked(dual, load):
    other = load("a2").categories["A2"]
    I = identity_functor(other)
    with pytest.raises(ContextMismatchError):
        CategoryDeformation("bad", dual, 1, {1: Cochain(I, I, 2)})


def test_realize_builds_valid_category(dual_project):
    d = dual_project.deformation("dual-def")
    R = realize(d)
    assert R.name == "DUAL[eps^2]"
    assert R.basis("o", "o") == ["e.e0", "x.e0", "e.e1", "x.e1"]
    assert validate_category(R) == []
    field = R.field
    x0 = R.arrow("x.e0").coeffs
    assert R.compose_vectors("o", "o", "o", x0, x0) == (field.zero, field.zero, field.one, field.zero)


def test_realize_refuses_deformed_identities(dual_project):
    with pytest.raises(DeformationError):
        realize(dual_project.deformation("unit-def"))


def test_truncate_and_pad(dual_project):
    d, _ = extend_order(dual_project.deformation("dual-def"), 2)
    assert truncate(d, 1).order == 1
    assert padded(d, 4).order == 4
    assert validate_deformation(padded(truncate(d, 1), 2)) == []
    with pytest.raises(DeformationError):
        truncate(d, 3)
    with pytest.raises(DeformationError):
        padded(d, 1)


def test_identity_deformation_is_an_equivalence(dual_project):
    d = dual_project.deformation("dual-def")
    witness = identity_functor_deformation(d)
    assert check_category_equivalence(d, d, witness) == []
    other = dual_project.deformation("dual-def2")
    assert check_category_equivalence(d, other, identity_functor_deformation(d)) != []


def test_identity_composition_is_neutral(dual_project):
    d = dual_project.deformation("dual-def")
    identity = identity_functor_deformation(d)
    assert compose_functor_deformations(identity, identity) is identity
    assert category_deformations_equal(d, d.with_order(1))


def test_composite_functor_deformation(load):
    project = load("loop")
    S = project.functors["S"]
    DUAL = S.source
    field = DUAL.field
    A = CategoryDeformation("A", DUAL, 1)
    F1 = Cochain(S, S, 1, {(("o", "o"), (1,)): (field.zero, field.one)})
    fd = FunctorDeformation("Sd", S, A, A, 1, {1: F1})
    assert validate_deformation(fd) == []
    twice = compose_functor_deformations(fd, fd)
    # S(F1 x) + F1(S x) = 2x + 2x
    assert twice.map_at(1).value((("o", "o"), (1,))) == (field.zero, field(4))
    assert validate_deformation(twice) == []
    assert functor_deformations_equal(induce_composite("functors", fd, fd), twice)


def test_trivial_deformations_are_valid(load):
    project = load("dual")
    nd = trivial_deformation("nat", project.nats["times_x"], 2)
    assert isinstance(nd, NatDeformation)
    assert validate_deformation(nd) == []
    fd = trivial_deformation("functor", project.functors["unit"], 1)
    assert validate_deformation(fd) == []
    with pytest.raises(DeformationError):
        trivial_deformation("pair", project.functors["unit"])


def test_induced_composite_is_independent_of_firing_order(load):
    project = load("interchange")
    label, scheme = project.scheme("S")
    field = label.categories["a"].field
    one, zero = field.one, field.zero
    dd = face_deformation(label, (one, zero), (zero, one))
    assert validate_deformation(dd) == []

    composites = [induce_2_diagram(dd, scheme, seq) for seq in all_sequentializations(scheme)]
    assert len(composites) == 2
    assert nat_deformations_equal(composites[0], composites[1])
    # (x + ε)(1 + x + εx) = x + ε(1 + x)
    assert composites[0].component("o") == ((zero, one), (one, one))


def test_square_three_cell_checks(load):
    project = load("square")
    assert validate_deformation(project.deformation("square-def")) == []
    assert validate_deformation(project.deformation("broken-def")) == [
        "broken-def: 3-cell Th composites differ at order 1 on o"
    ]


def test_diagram_truncation_keeps_faces(load):
    dd = load("square").deformation("square-def")
    assert dd.with_order(0).faces == {"al": {}, "ga": {}}
    assert dd.with_order(2).face("al").component("o")[1] == dd.face("al").component("o")[1]
