"""
Exact field arithmetic and linear algebra

Scalars are elements of a sympy polynomial domain (QQ or GF(p)); vectors are
tuples of such elements; matrices are sympy DomainMatrix objects in sparse
format. No floating point is ever involved.
"""

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from pasting_deformations.engine.errors import ConfigurationError, DimensionMismatchError


class Field:
    """
    The ground field k: the rationals or a prime field
    """

    def __init__(self, kind="q", p=None):
        if kind == "q":
            self.domain = QQ
            self.p = None
        elif kind == "fp":
            if p is None or not isprime(p):
                raise ConfigurationError(f"Prime field needs a prime characteristic, got {p}")
            self.domain = GF(p, symmetric=False)
            self.p = p
        else:
            raise ConfigurationError(f"Unknown field kind '{kind}'")
        self.kind = kind

    @classmethod
    def from_spec(cls, spec):
        from pasting_deformations.engine.validators import InputValidator

        is_valid, value, error = InputValidator.validate_field_spec(spec)
        if not is_valid:
            raise ConfigurationError(error)
        return cls(*value)

    @property
    def spec(self):
        return "q" if self.kind == "q" else f"fp:{self.p}"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def __eq__(self, other):
        return isinstance(other, Field) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"Field({self.spec})"

    def __call__(self, value):
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, int):
            return self.domain(value)
        if self.domain.of_type(value):
            return value
        return self.domain.convert(value)

    def parse(self, text):
        """Parse "a", "-a" or "a/b" into a field element."""
        text = text.strip()
        if "/" in text:
            numerator, denominator = (int(part) for part in text.split("/", 1))
        else:
            numerator, denominator = int(text), 1
        if self.kind == "q":
            if denominator == 0:
                raise ValueError(f"Zero denominator in '{text}'")
            return QQ(numerator, denominator)
        if denominator % self.p == 0:
            raise ValueError(f"Denominator of '{text}' vanishes mod {self.p}")
        return self.domain.quo(self.domain(numerator), self.domain(denominator))

    def format(self, value):
        """Serialize as "a/b" (b > 1, lowest terms) or a decimal residue."""
        if self.kind == "q":
            numerator = int(self.domain.numer(value))
            denominator = int(self.domain.denom(value))
            if denominator == 1:
                return str(numerator)
            return f"{numerator}/{denominator}"
        return str(int(self.domain.to_int(value)) % self.p)

    def is_zero(self, value):
        return value == self.domain.zero

    # Vectors

    def zero_vector(self, n):
        return (self.domain.zero,) * n

    def unit_vector(self, n, i):
        v = [self.domain.zero] * n
        v[i] = self.domain.one
        return tuple(v)

    def add(self, u, v):
        return tuple(a + b for a, b in zip(u, v))

    def sub(self, u, v):
        return tuple(a - b for a, b in zip(u, v))

    def scale(self, c, v):
        return tuple(c * a for a in v)

    def neg(self, v):
        return tuple(-a for a in v)

    def vector_is_zero(self, v):
        zero = self.domain.zero
        return all(a == zero for a in v)

    def format_vector(self, v):
        return "(" + ", ".join(self.format(a) for a in v) + ")"

    # Matrices

    def matrix(self, entries, rows, cols):
        """
        Build a sparse DomainMatrix

        Args:
            entries (dict): {(i, j): value} or {i: {j: value}}
            rows (int): Row count
            cols (int): Column count
        """
        zero = self.domain.zero
        sdm = {}
        for key, value in entries.items():
            if isinstance(key, tuple):
                i, j = key
                if value != zero:
                    sdm.setdefault(i, {})[j] = value
            else:
                row = {j: v for j, v in value.items() if v != zero}
                if row:
                    sdm[key] = row
        return DomainMatrix(sdm, (rows, cols), self.domain)

    def zero_matrix(self, rows, cols):
        return DomainMatrix({}, (rows, cols), self.domain)

    def identity_matrix(self, n):
        return self.matrix({(i, i): self.domain.one for i in range(n)}, n, n)


def matrix_entries(M):
    """Nonzero entries as a dict of dicts {row: {col: value}}."""
    rep = M.to_sparse().rep
    zero = M.domain.zero
    entries = {}
    for i, row in rep.items():
        kept = {j: v for j, v in row.items() if v != zero}
        if kept:
            entries[i] = kept
    return entries


def dense_rows(M):
    rows, cols = M.shape
    zero = M.domain.zero
    entries = matrix_entries(M)
    return [[entries.get(i, {}).get(j, zero) for j in range(cols)] for i in range(rows)]


def rank(M):
    """Rank over the field by exact Gaussian elimination."""
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return 0
    return M.to_sparse().rank()


def _rref(M):
    reduced, pivots = M.to_sparse().rref()
    return matrix_entries(reduced), tuple(pivots)


def solve_linear(M, b):
    """
    Solve M x = b exactly

    Free variables are set to zero and pivots are taken in first-nonzero
    column order, so the returned solution is deterministic.

    Args:
        M (DomainMatrix): Coefficient matrix
        b (sequence): Right-hand side, one entry per row of M

    Returns:
        tuple or None: A solution vector, or None when the system is inconsistent
    """
    rows, cols = M.shape
    domain = M.domain
    zero = domain.zero
    if len(b) != rows:
        raise DimensionMismatchError("Right-hand side length differs from row count", rows, len(b))

    if cols == 0:
        return () if all(v == zero for v in b) else None
    if rows == 0:
        return (zero,) * cols

    entries = matrix_entries(M)
    for i, value in enumerate(b):
        if value != zero:
            entries.setdefault(i, {})[cols] = value
    augmented = DomainMatrix(entries, (rows, cols + 1), domain)

    reduced, pivots = _rref(augmented)
    if cols in pivots:
        return None

    x = [zero] * cols
    for r, c in enumerate(pivots):
        row = reduced.get(r, {})
        x[c] = domain.quo(row.get(cols, zero), row[c])
    return tuple(x)


def kernel_basis(M):
    """Exact basis of the null space, one vector per free column."""
    rows, cols = M.shape
    domain = M.domain
    zero, one = domain.zero, domain.one
    if cols == 0:
        return []
    if rows == 0:
        return [tuple(one if j == i else zero for j in range(cols)) for i in range(cols)]

    reduced, pivots = _rref(M)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = [zero] * cols
        v[free] = one
        for r, c in enumerate(pivots):
            row = reduced.get(r, {})
            v[c] = -domain.quo(row.get(free, zero), row[c])
        basis.append(tuple(v))
    return basis


def matrix_times_vector(M, v):
    rows, cols = M.shape
    if len(v) != cols:
        raise DimensionMismatchError("Vector length differs from column count", cols, len(v))
    zero = M.domain.zero
    out = [zero] * rows
    for i, row in matrix_entries(M).items():
        acc = zero
        for j, value in row.items():
            acc += value * v[j]
        out[i] = acc
    return tuple(out)


def matrix_product(A, B):
    """A·B, tolerating zero-sized factors."""
    if A.shape[1] != B.shape[0]:
        raise DimensionMismatchError("Inner dimensions differ", A.shape[1], B.shape[0])
    if 0 in A.shape or 0 in B.shape:
        return DomainMatrix({}, (A.shape[0], B.shape[1]), A.domain)
    return A.to_sparse().matmul(B.to_sparse())


def is_zero_matrix(M):
    return not matrix_entries(M)


def columns_matrix(vectors, dim, domain):
    """Matrix whose columns are the given vectors."""
    zero = domain.zero
    entries = {}
    for j, v in enumerate(vectors):
        for i, value in enumerate(v):
            if value != zero:
                entries.setdefault(i, {})[j] = value
    return DomainMatrix(entries, (dim, len(vectors)), domain)


def complement_basis(subspace, candidates, dim, domain):
    """
    Indices of candidates extending a basis of span(subspace)

    Used to pick cohomology representatives: subspace spans the coboundaries,
    candidates the cocycles.
    """
    if dim == 0 or not candidates:
        return []
    columns = list(subspace) + list(candidates)
    _, pivots = _rref(columns_matrix(columns, dim, domain))
    offset = len(subspace)
    return [c - offset for c in pivots if c >= offset]


def class_coordinates(vector, subspace, representatives, domain):
    """
    Coordinates of a vector's class against chosen representatives

    Returns None when the vector is not in span(subspace + representatives).
    """
    dim = len(vector)
    columns = list(subspace) + list(representatives)
    if not columns:
        return () if all(v == domain.zero for v in vector) else None
    x = solve_linear(columns_matrix(columns, dim, domain), vector)
    if x is None:
        return None
    return tuple(x[len(subspace):])
