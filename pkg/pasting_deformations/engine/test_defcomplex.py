from itertools import product

import pytest
from sympy import Matrix

from pasting_deformations.config.engine_settings import get_engine_config
from pasting_deformations.engine.computad import Path, all_sequentializations
from pasting_deformations.engine.conftest import random_category, random_cochain
from pasting_deformations.engine.defcomplex import (
    HochschildComplex,
    build_complex,
    cohomology_dim,
    cohomology_representatives,
    pair_complex,
    path_whisker_matrix,
    sigma_dagger_map,
    verify_d_squared,
    whisker_cochain_1,
    whisker_cochain_2,
)
from pasting_deformations.engine.errors import DegreeCapError, ValidationError, WindowError
from pasting_deformations.engine.exactlinalg import Field, matrix_times_vector
from pasting_deformations.engine.hochschild import CochainSpace, coboundary, cochain_from_nat, sigma_dagger
from pasting_deformations.engine.lincat import NatTransf, identity_functor
from pasting_deformations.engine.utils import create_report


def total_algebra(C):
    """Structure constants of ⊕ hom(x, y) with non-composable products zero."""
    basis = [(x, y, i) for (x, y), ids in C.hom_basis.items() for i in range(len(ids))]
    index = {b: k for k, b in enumerate(basis)}
    to_sympy = C.field.domain.to_sympy
    d = len(basis)
    table = [[[0] * d for _ in range(d)] for _ in range(d)]
    for (x, y, i), (y2, z, j) in product(basis, repeat=2):
        if y != y2:
            continue
        for k, c in enumerate(C.product(x, y, z, i, j)):
            table[index[(x, y, i)]][index[(y2, z, j)]][index[(x, z, k)]] = to_sympy(c)
    return d, table


def bar_differential(d, m, n):
    """δ: Hom(A^{⊗n}, A) -> Hom(A^{⊗n+1}, A) on the unnormalized bar complex."""
    cols = {key: k for k, key in enumerate(product(product(range(d), repeat=n), range(d)))}
    rows = {key: k for k, key in enumerate(product(product(range(d), repeat=n + 1), range(d)))}
    M = [[0] * len(cols) for _ in range(len(rows))]
    for args in product(range(d), repeat=n + 1):
        for s in range(d):
            r = rows[(args, s)]
            for t in range(d):
                M[r][cols[(args[1:], t)]] += m[args[0]][t][s]
            for i in range(1, n + 1):
                for k in range(d):
                    c = m[args[i - 1]][args[i]][k]
                    if c:
                        merged = args[:i - 1] + (k,) + args[i + 1:]
                        M[r][cols[(merged, s)]] += (-1) ** i * c
            for t in range(d):
                M[r][cols[(args[:-1], t)]] += (-1) ** (n + 1) * m[t][args[-1]][s]
    return Matrix(M) if M and cols else None


def bar_cohomology(C, n):
    d, m = total_algebra(C)
    outgoing = bar_differential(d, m, n)
    incoming = bar_differential(d, m, n - 1) if n > 0 else None
    rank_out = outgoing.rank() if outgoing is not None else 0
    rank_in = incoming.rank() if incoming is not None else 0
    return d ** (n + 1) - rank_out - rank_in


@pytest.mark.parametrize(
    "project,name,degrees",
    [
        ("k1", "K1", (0, 1, 2, 3)),
        ("dual", "DUAL", (0, 1, 2, 3)),
        ("semisimple", "KK", (0, 1, 2, 3)),
        ("a2", "A2", (0, 1, 2)),
    ],
)
def test_category_cohomology_matches_bar_complex(load, project, name, degrees):
    C = load(project).categories[name]
    X = build_complex("category", C)
    for n in degrees:
        assert cohomology_dim(X, n) == bar_cohomology(C, n)


def test_known_cohomology_dimensions(load):
    K1 = load("k1").categories["K1"]
    X = build_complex("category", K1)
    assert [cohomology_dim(X, n) for n in range(4)] == [1, 0, 0, 0]

    DUAL = load("dual").categories["DUAL"]
    X = build_complex("category", DUAL)
    assert cohomology_dim(X, 0) == 2
    assert cohomology_dim(X, 2) == 1

    KK = load("semisimple").categories["KK"]
    X = build_complex("category", KK)
    assert cohomology_dim(X, 0) == 2
    assert all(cohomology_dim(X, n) == 0 for n in range(1, 5))


def test_normalized_and_unnormalized_cohomology_agree(load):
    DUAL = load("dual").categories["DUAL"]
    normalized = build_complex("category", DUAL, window=(0, 3))
    full = build_complex("category", DUAL, window=(0, 3), normalized=False)
    for n in range(4):
        assert cohomology_dim(normalized, n) == cohomology_dim(full, n)


@pytest.mark.parametrize("spec", ["q", "fp:3"])
def test_random_complexes_square_to_zero(rng, spec):
    field = Field.from_spec(spec)
    for trial in range(25):
        C = random_category(rng, field, f"R{trial}")
        X = build_complex("category", C, window=(0, 2))
        assert verify_d_squared(X) == []
        Y = build_complex("functor", identity_functor(C), window=(-1, 1))
        assert verify_d_squared(Y) == []


def test_identity_functor_complex_is_category_complex_shifted(load):
    DUAL = load("dual").categories["DUAL"]
    category = build_complex("category", DUAL)
    functor = build_complex("functor", identity_functor(DUAL))
    for n in range(0, 3):
        assert cohomology_dim(functor, n) == cohomology_dim(category, n + 1)
    assert cohomology_dim(functor, -1) == cohomology_dim(category, 0)


def test_identity3_is_shifted_nat_complex(load):
    times_x = load("dual").nats["times_x"]
    nat = build_complex("nat", times_x)
    doubled = build_complex("identity3", times_x)
    for n in range(-2, 2):
        assert cohomology_dim(doubled, n) == cohomology_dim(nat, n + 1)


def natural_by_hand(sigma):
    """F(f)σ_y = σ_x G(f) on every basis arrow f: x -> y."""
    F, G = sigma.source, sigma.target
    A, B = F.source, F.target
    return all(
        B.compose_vectors(F(x), F(y), G(y), F.apply_basis(x, y, i), sigma.component(y))
        == B.compose_vectors(F(x), G(x), G(y), sigma.component(x), G.apply_basis(x, y, i))
        for (x, y), ids in A.hom_basis.items()
        for i in range(len(ids))
    )


def test_naturality_is_the_zero_cocycle_condition(rng, load):
    functors = [load("a2").functors["I"], load("dual").functors["unit"], load("loop").functors["S"]]
    outcomes = set()
    for trial in range(100):
        F = functors[trial % len(functors)]
        B = F.target
        components = {
            x: tuple(B.field(rng.randint(-1, 1)) for _ in range(B.dim(F(x), F(x)))) for x in F.source.objects
        }
        sigma = NatTransf("s", F, F, components)
        natural = natural_by_hand(sigma)
        assert coboundary(cochain_from_nat(sigma)).is_zero() == natural
        outcomes.add(natural)
    assert outcomes == {True, False}



def test_summand_layout(load):
    project = load("dual")
    X = build_complex("nat", project.nats["times_x"])
    assert [s.key for s in X.groups[0]] == ["A", "B", "F", "G", "σ"]
    assert [s.degree for s in X.groups[0]] == [2, 2, 1, 1, 0]

    label = load("square").labels["L"]
    Y = build_complex("diagram", label)
    keys = [s.key for s in Y.groups[-1]]
    assert "vertex:a" in keys and "edge:f" in keys and "face:al" in keys and "cell:Th" in keys


def test_decode_splits_by_summand(load):
    project = load("dual")
    X = build_complex("functor", project.functors["unit"])
    v = tuple(X.field.one for _ in range(X.dim(1)))
    parts = X.decode(1, v)
    assert set(parts) == {"A", "B", "F"}
    assert X.encode(1, parts) == v
    with pytest.raises(ValidationError):
        X.decode(1, v[:-1])


def test_diagram_complexes_square_to_zero(load):
    for name, label in (("interchange", "L"), ("square", "L"), ("loop", "LL")):
        X = build_complex("diagram", load(name).labels[label])
        assert verify_d_squared(X) == []
        assert X.metadata["normalized"] is True


def test_window_errors(load):
    DUAL = load("dual").categories["DUAL"]
    X = build_complex("category", DUAL, window=(0, 2))
    with pytest.raises(WindowError):
        cohomology_dim(X, 3)
    with pytest.raises(WindowError):
        X.differential(5)
    Y = build_complex("category", DUAL, window=(1, 2))
    with pytest.raises(WindowError):
        cohomology_dim(Y, 1)


def test_degree_cap(load):
    DUAL = load("dual").categories["DUAL"]
    config = get_engine_config(overrides={"complex": {"max_degree": 3}})
    with pytest.raises(DegreeCapError):
        build_complex("category", DUAL, window=(0, 4), config=config)


def test_representatives_span_cohomology(load):
    DUAL = load("dual").categories["DUAL"]
    X = build_complex("category", DUAL)
    reps, boundaries = cohomology_representatives(X, 2)
    assert len(reps) == 1
    assert X.field.vector_is_zero(matrix_times_vector(X.differential(2), reps[0]))


def test_report_into_adds_summand_table(load):
    DUAL = load("dual").categories["DUAL"]
    X = build_complex("category", DUAL, window=(0, 1))
    report = X.report_into(create_report("pdef cohomology"), include_matrices=True)
    assert report.tables[0]["title"] == "category complex of DUAL"
    assert set(report.matrices) == {"d^0", "d^1"}
    assert report.metadata["normalized"] is True


@pytest.mark.parametrize("project,name", [("dual", "times_x"), ("a2", "twice")])
def test_sigma_dagger_matches_its_matrix(rng, load, project, name):
    sigma = load(project).nats[name]
    F, G = sigma.source, sigma.target
    IA, IB = identity_functor(F.source), identity_functor(F.target)
    field = F.target.field
    P = pair_complex(F, G, normalized=False)
    Z = HochschildComplex("σ", F, G, 0, normalized=False)
    dagger = sigma_dagger_map(sigma, P, "σ", Z)
    for n in range(3):
        parts = {
            "A": random_cochain(rng, IA, IA, n + 1),
            "B": random_cochain(rng, IB, IB, n + 1),
            "F": random_cochain(rng, F, F, n),
            "G": random_cochain(rng, G, G, n),
        }
        spaces = {s.key: s.space for s in P.summands(n)}
        image = field.zero_vector(Z.space(n).dim)
        for (_, key), M in dagger.blocks(n).items():
            image = field.add(image, matrix_times_vector(M, spaces[key].to_vector(parts[key])))
        expected = sigma_dagger(sigma, (parts["A"], parts["B"], parts["F"], parts["G"]))
        assert image == Z.space(n).to_vector(expected)


def test_path_whiskering_matches_its_matrix(rng, load):
    interchange = load("interchange")
    loop = load("loop")
    cases = [
        (interchange.labels["L"], interchange.scheme("S")[1].source),
        (loop.labels["LL"], Path("a", ("F",))),
    ]
    for label, path in cases:
        for j, edge in enumerate(path.edges):
            F = label.functors[edge]
            for n in (0, 1, 2):
                phi = random_cochain(rng, F, F, n)
                whiskered = whisker_cochain_1(label, path, j, phi)
                source = CochainSpace(F, F, n)
                target = CochainSpace(whiskered.source, whiskered.target, n)
                M = path_whisker_matrix(label, path, j, n, normalized=False)
                assert matrix_times_vector(M, source.to_vector(phi)) == target.to_vector(whiskered)


def test_face_whiskering_ignores_the_firing_order(rng, load):
    project = load("interchange")
    label, scheme = project.scheme("S")
    orders = all_sequentializations(scheme)
    assert len(orders) == 2
    for face in ("al", "be"):
        sigma = label.nats[face]
        for n in (0, 1, 2):
            phi = random_cochain(rng, sigma.source, sigma.target, n)
            first, second = (whisker_cochain_2(label, scheme, face, phi, seq) for seq in orders)
            assert first == second
            assert first == whisker_cochain_2(label, scheme, face, phi)
