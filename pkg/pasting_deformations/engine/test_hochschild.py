import pytest

from pasting_deformations.engine.conftest import dual_numbers, random_category, random_cochain
from pasting_deformations.engine.errors import ContextMismatchError, DegreeCapError
from pasting_deformations.engine.exactlinalg import Field, matrix_times_vector
from pasting_deformations.engine.hochschild import (
    Cochain,
    CochainSpace,
    brace,
    coboundary,
    cochain_from_nat,
    composition_cochain,
    cup,
    delta_matrix,
    enumerate_chains,
    functor_cochain,
    nat_pre_post,
    normalize_retraction,
    postcompose_matrix,
    precompose_matrix,
    pullback,
    pullback_matrix,
    pushforward,
    pushforward_matrix,
    retraction_homotopy,
)
from pasting_deformations.engine.lincat import LinFunctor, identity_functor


def x_to_e(C):
    """ψ in C^1(Id, Id) with ψ(x) = e and ψ(e) = 0."""
    I = identity_functor(C)
    field = C.field
    return Cochain(I, I, 1, {(("o", "o"), (1,)): (field.one, field.zero)})


def test_chain_enumeration(dual):
    assert len(enumerate_chains(dual, 3)) == 8
    assert enumerate_chains(dual, 3, normalized=True) == ((("o", "o", "o", "o"), (1, 1, 1)),)
    assert enumerate_chains(dual, 0) == ((("o",), ()),)


def test_coboundary_hand_value(dual, qq):
    dpsi = coboundary(x_to_e(dual))
    # x e + e x
    assert dpsi.value((("o", "o", "o"), (1, 1))) == (qq(0), qq(2))
    assert dpsi.value((("o", "o", "o"), (0, 1))) == (qq(0), qq(0))


def test_entries_are_sorted_strings(dual):
    assert x_to_e(dual).entries() == [(("o", "o"), ("x",), "e", "1")]


@pytest.mark.parametrize("spec", ["q", "fp:5"])
def test_coboundary_squares_to_zero(rng, spec):
    field = Field.from_spec(spec)
    for trial in range(6):
        C = random_category(rng, field, f"R{trial}")
        I = identity_functor(C)
        for n in (0, 1, 2):
            psi = random_cochain(rng, I, I, n)
            assert coboundary(coboundary(psi)).is_zero()


def test_coboundary_matches_matrix(rng, dual):
    I = identity_functor(dual)
    for n in (1, 2):
        psi = random_cochain(rng, I, I, n)
        source = CochainSpace(I, I, n)
        target = CochainSpace(I, I, n + 1)
        D = delta_matrix(I, I, n)
        assert matrix_times_vector(D, source.to_vector(psi)) == target.to_vector(coboundary(psi))


def test_delta_matrix_respects_degree_cap(dual):
    I = identity_functor(dual)
    with pytest.raises(DegreeCapError):
        delta_matrix(I, I, 5, max_degree=4)


def test_composition_brace_is_associator(dual):
    mu = composition_cochain(dual)
    assert brace(mu, [mu]).is_zero()


def test_brace_with_derivation(dual, qq):
    mu = composition_cochain(dual)
    braced = brace(mu, [x_to_e(dual)])
    # ψ(x) x + x ψ(x)
    assert braced.degree == 2
    assert braced.value((("o", "o", "o"), (1, 1))) == (qq(0), qq(2))


def test_brace_with_too_many_arguments_is_zero(dual):
    psi = x_to_e(dual)
    assert brace(psi, [psi, psi]).is_zero()


def test_cup_sign(dual, qq):
    psi = x_to_e(dual)
    product = cup(psi, psi)
    assert product.value((("o", "o", "o"), (1, 1))) == (qq(-1), qq(0))


def test_cup_needs_matching_functors(load):
    project = load("loop")
    S = project.functors["S"]
    I = identity_functor(S.source)
    phi = Cochain(I, I, 0)
    psi = Cochain(S, S, 0)
    with pytest.raises(ContextMismatchError):
        cup(phi, psi)


def test_natural_transformation_is_zero_cocycle(load):
    project = load("a2")
    assert coboundary(cochain_from_nat(project.nats["twice"])).is_zero()


def test_pushforward_and_pullback_match_matrices(rng, load):
    project = load("loop")
    S = project.functors["S"]
    I = identity_functor(S.source)
    phi = random_cochain(rng, I, I, 2)

    pushed = pushforward(S, phi)
    source = CochainSpace(I, I, 2)
    target = CochainSpace(pushed.source, pushed.target, 2)
    M = pushforward_matrix(S, source, target)
    assert matrix_times_vector(M, source.to_vector(phi)) == target.to_vector(pushed)

    pulled = pullback(S, phi)
    target = CochainSpace(pulled.source, pulled.target, 2)
    M = pullback_matrix(S, source, target)
    assert matrix_times_vector(M, source.to_vector(phi)) == target.to_vector(pulled)


def test_pullback_commutes_with_coboundary(rng, load):
    project = load("loop")
    S = project.functors["S"]
    I = identity_functor(S.source)
    phi = random_cochain(rng, I, I, 1)
    assert pullback(S, coboundary(phi)) == coboundary(pullback(S, phi))


def test_pushforward_along_unit_inclusion_fails_on_wrong_category(load):
    project = load("dual")
    unit = project.functors["unit"]
    psi = x_to_e(project.categories["DUAL"])
    with pytest.raises(ContextMismatchError):
        pushforward(unit, psi)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_normalization_retraction_homotopy(rng, dual, n):
    I = identity_functor(dual)
    for _ in range(3):
        psi = random_cochain(rng, I, I, n)
        normalized, homotopy = normalize_retraction(psi)
        assert normalized.is_normalized()
        assert normalized - psi == coboundary(homotopy) + retraction_homotopy(coboundary(psi))


def test_retraction_fixes_normalized_cocycles(rng):
    field = Field("q")
    C = dual_numbers(field)
    I = identity_functor(C)
    psi = random_cochain(rng, I, I, 1, normalized=True)
    cocycle = coboundary(psi)
    assert cocycle.is_normalized()
    assert normalize_retraction(cocycle)[0] == cocycle


def test_functor_between_different_objects(qq):
    C = dual_numbers(qq, "C")
    D = dual_numbers(qq, "D")
    F = LinFunctor("F", C, D, {"o": "o"}, {"e": {"e": 1}, "x": {"x": 3}})
    phi = Cochain(identity_functor(D), identity_functor(D), 1, {(("o", "o"), (1,)): (qq(1), qq(0))})
    pulled = pullback(F, phi)
    assert pulled.value((("o", "o"), (1,))) == (qq(3), qq(0))


@pytest.mark.parametrize("degrees", [(2, 1, 1), (2, 2, 1), (3, 1, 2), (3, 2, 2)])
def test_brace_gerstenhaber_voronov_identity(rng, dual, degrees):
    I = identity_functor(dual)
    for _ in range(3):
        phi, psi, chi = (random_cochain(rng, I, I, n) for n in degrees)
        swapped = brace(phi, [chi, psi])
        if (psi.degree - 1) * (chi.degree - 1) % 2:
            swapped = -swapped
        expected = brace(phi, [psi, chi]) + brace(phi, [brace(psi, [chi])]) + swapped
        assert brace(brace(phi, [psi]), [chi]) == expected


def test_pushforward_and_pullback_as_braces(rng, load):
    S = load("loop").functors["S"]
    I = identity_functor(S.source)
    hom_action = functor_cochain(S)
    for n in (1, 2, 3):
        phi = random_cochain(rng, I, I, n)
        assert brace(hom_action, [phi]) == pushforward(S, phi)
        assert brace(phi, [hom_action] * n) == pullback(S, phi)


def test_pushforward_commutes_with_coboundary(rng, load):
    S = load("loop").functors["S"]
    I = identity_functor(S.source)
    for n in (0, 1, 2):
        phi = random_cochain(rng, I, I, n)
        assert pushforward(S, coboundary(phi)) == coboundary(pushforward(S, phi))


@pytest.mark.parametrize("side", ["pre", "post"])
def test_composing_with_a_natural_transformation(rng, load, side):
    twice = load("a2").nats["twice"]
    I = twice.source
    as_matrix = precompose_matrix if side == "pre" else postcompose_matrix
    for n in (0, 1, 2):
        phi = random_cochain(rng, I, I, n)
        composed = nat_pre_post(twice, phi, side)
        assert composed == phi.scale(2)
        space = CochainSpace(I, I, n)
        assert matrix_times_vector(as_matrix(twice, space, space), space.to_vector(phi)) == space.to_vector(composed)
        assert coboundary(composed) == nat_pre_post(twice, coboundary(phi), side)


def test_composing_with_a_non_central_transformation(rng, load):
    times_x = load("dual").nats["times_x"]
    I = times_x.source
    for side in ("pre", "post"):
        phi = random_cochain(rng, I, I, 1)
        assert coboundary(nat_pre_post(times_x, phi, side)) == nat_pre_post(times_x, coboundary(phi), side)
    with pytest.raises(ValueError):
        nat_pre_post(times_x, phi, "left")


@pytest.mark.parametrize("spec", ["q", "fp:5"])
def test_retraction_is_a_chain_map_fixing_normalized_cochains(rng, spec):
    field = Field.from_spec(spec)
    non_cocycles = 0
    for trial in range(50):
        C = random_category(rng, field, f"R{trial}")
        I = identity_functor(C)
        n = 1 + trial % 2

        psi = random_cochain(rng, I, I, n)
        retracted, _ = normalize_retraction(psi)
        assert normalize_retraction(coboundary(psi))[0] == coboundary(retracted)

        fixed = random_cochain(rng, I, I, n, normalized=True)
        if not coboundary(fixed).is_zero():
            non_cocycles += 1
        assert normalize_retraction(fixed)[0] == fixed
    assert non_cocycles > 0
