import pytest

from pasting_deformations.engine.errors import ConfigurationError, DimensionMismatchError
from pasting_deformations.engine.exactlinalg import (
    Field,
    class_coordinates,
    complement_basis,
    kernel_basis,
    matrix_times_vector,
    rank,
    solve_linear,
)


def test_field_specs():
    assert Field.from_spec("q").spec == "q"
    assert Field.from_spec("fp:7").spec == "fp:7"
    with pytest.raises(ConfigurationError):
        Field.from_spec("fp:6")
    with pytest.raises(ConfigurationError):
        Field.from_spec("reals")


def test_parse_and_format_rationals(qq):
    assert qq.format(qq.parse("6/4")) == "3/2"
    assert qq.format(qq.parse("-2")) == "-2"
    assert qq.format(qq("1/3") + qq("2/3")) == "1"
    with pytest.raises(ValueError):
        qq.parse("1/0")


def test_parse_and_format_prime_field():
    F5 = Field("fp", 5)
    assert F5.format(F5.parse("-1")) == "4"
    assert F5.format(F5.parse("1/2")) == "3"
    assert F5.format(F5(7)) == "2"
    with pytest.raises(ValueError):
        F5.parse("1/5")


def test_solve_consistent_system(qq):
    M = qq.matrix({(0, 0): qq(1), (0, 1): qq(1), (1, 1): qq(2)}, 2, 2)
    x = solve_linear(M, (qq(3), qq(4)))
    assert x == (qq(1), qq(2))


def test_solve_inconsistent_system_returns_none(qq):
    M = qq.matrix({(0, 0): qq(1), (1, 0): qq(1)}, 2, 1)
    assert solve_linear(M, (qq(1), qq(2))) is None


def test_solve_sets_free_variables_to_zero(qq):
    M = qq.matrix({(0, 0): qq(1), (0, 1): qq(1)}, 1, 2)
    assert solve_linear(M, (qq(5),)) == (qq(5), qq(0))


def test_solve_degenerate_shapes(qq):
    assert solve_linear(qq.zero_matrix(2, 0), (qq(0), qq(0))) == ()
    assert solve_linear(qq.zero_matrix(2, 0), (qq(1), qq(0))) is None
    assert solve_linear(qq.zero_matrix(0, 3), ()) == (qq(0),) * 3
    with pytest.raises(DimensionMismatchError):
        solve_linear(qq.zero_matrix(2, 2), (qq(1),))


def test_kernel_and_rank_over_prime_field():
    F5 = Field("fp", 5)
    # rows (1, 2, 3) and (2, 4, 2): rank 2 mod 5
    M = F5.matrix({0: {0: F5(1), 1: F5(2), 2: F5(3)}, 1: {0: F5(2), 1: F5(4), 2: F5(2)}}, 2, 3)
    assert rank(M) == 2
    basis = kernel_basis(M)
    assert len(basis) == 1
    assert F5.vector_is_zero(matrix_times_vector(M, basis[0]))


def test_rank_depends_on_characteristic(qq):
    F3 = Field("fp", 3)
    entries = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 4}
    assert rank(qq.matrix({k: qq(v) for k, v in entries.items()}, 2, 2)) == 2
    assert rank(F3.matrix({k: F3(v) for k, v in entries.items()}, 2, 2)) == 1


def test_kernel_of_empty_shapes(qq):
    assert kernel_basis(qq.zero_matrix(3, 0)) == []
    assert kernel_basis(qq.zero_matrix(0, 2)) == [(qq(1), qq(0)), (qq(0), qq(1))]


def test_complement_and_class_coordinates(qq):
    zero, one = qq(0), qq(1)
    boundaries = [(one, one, zero)]
    cocycles = [(one, one, zero), (one, zero, zero), (zero, one, zero)]
    chosen = complement_basis(boundaries, cocycles, 3, qq.domain)
    assert len(chosen) == 1
    rep = cocycles[chosen[0]]
    coords = class_coordinates((qq(3), qq(1), zero), boundaries, [rep], qq.domain)
    assert coords is not None and len(coords) == 1 and coords[0] != zero
    assert class_coordinates((zero, zero, one), boundaries, [rep], qq.domain) is None


@pytest.mark.parametrize("spec", ["q", "fp:5"])
def test_rank_under_row_permutations_and_nullity(rng, spec):
    field = Field.from_spec(spec)
    for _ in range(30):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        entries = {
            (i, j): field(rng.randint(-2, 2)) for i in range(rows) for j in range(cols) if rng.random() < 0.6
        }
        M = field.matrix(entries, rows, cols)
        order = list(range(rows))
        rng.shuffle(order)
        permuted = field.matrix({(order.index(i), j): v for (i, j), v in entries.items()}, rows, cols)
        assert rank(permuted) == rank(M)

        basis = kernel_basis(M)
        assert rank(M) + len(basis) == cols
        for v in basis:
            assert field.vector_is_zero(matrix_times_vector(M, v))
