"""
Hochschild cochains of parallel functor pairs

A cochain of degree n in C^n(F, G), for F, G: A -> B, assigns to every chain
of composable basis arrows x0 -> x1 -> ... -> xn of A a vector of
hom_B(F(x0), G(xn)). Chains are keyed as (objects tuple, basis index tuple);
missing entries are zero.

Every operation exists twice: once on cochains, evaluated directly from its
defining formula, and once as a sparse matrix between cochain spaces. The
matrix form is what the deformation complexes are assembled from; the
cochain form is the cross-check.
"""

from functools import lru_cache
from itertools import product

from pasting_deformations.engine.errors import ContextMismatchError, DegreeCapError
from pasting_deformations.engine.lincat import (
    NatTransf,
    compose_functors,
    functors_equal,
    identity_functor,
    is_identity_functor,
    same_category,
)

# Sign row of σ‡ on (ψ_A, ψ_B, υ_F, ω_G); reported as metadata
SIGMA_DAGGER_SIGNS = ("0", "+(-){σ}", "-σ_*", "+σ^*")


@lru_cache(maxsize=None)
def enumerate_chains(category, n, normalized=False):
    """
    All chains of n composable basis arrows, in a fixed order

    Args:
        category (LinCategory): Source category
        n (int): Chain length
        normalized (bool): Skip chains containing an identity basis arrow

    Returns:
        tuple: ((x0, ..., xn), (i1, ..., in)) pairs
    """
    chains = [((x,), ()) for x in category.objects]
    for _ in range(n):
        extended = []
        for objs, idx in chains:
            x = objs[-1]
            for y, i in category.out_arrows(x):
                if normalized and category.is_identity(x, y, i):
                    continue
                extended.append((objs + (y,), idx + (i,)))
        chains = extended
    return tuple(chains)


def has_identity_argument(category, chain):
    objs, idx = chain
    return any(category.is_identity(objs[k], objs[k + 1], i) for k, i in enumerate(idx))


def compose_context(F, G):
    """F;G, keeping contexts free of redundant identity factors."""
    if is_identity_functor(G):
        return F
    if is_identity_functor(F):
        return G
    return compose_functors(F, G)


class Cochain:
    """
    An element of C^n(F, G)

    Args:
        source (LinFunctor): F
        target (LinFunctor): G, parallel to F
        degree (int): n >= 0
        data (dict): {chain: vector}
    """

    def __init__(self, source, target, degree, data=None):
        self.source = source
        self.target = target
        self.degree = degree
        zero = self.field.zero
        self.data = {}
        for chain, value in (data or {}).items():
            value = tuple(value)
            if any(c != zero for c in value):
                self.data[chain] = value

    @classmethod
    def zero(cls, source, target, degree):
        return cls(source, target, degree)

    @classmethod
    def from_function(cls, source, target, degree, fn, normalized=False):
        """Tabulate fn(objs, idx) -> vector over all chains of the given degree."""
        data = {}
        for chain in enumerate_chains(source.source, degree, normalized):
            data[chain] = fn(*chain)
        return cls(source, target, degree, data)

    @property
    def field(self):
        return self.source.target.field

    @property
    def category(self):
        """The category whose arrows are the arguments."""
        return self.source.source

    @property
    def codomain(self):
        """The category the values live in."""
        return self.source.target

    def hom_dim(self, objs):
        return self.codomain.dim(self.source(objs[0]), self.target(objs[-1]))

    def value(self, chain):
        found = self.data.get(chain)
        if found is not None:
            return found
        return self.field.zero_vector(self.hom_dim(chain[0]))

    def same_context(self, other):
        return (
            self.degree == other.degree
            and functors_equal(self.source, other.source)
            and functors_equal(self.target, other.target)
        )

    def _check(self, other):
        if not self.same_context(other):
            raise ContextMismatchError(
                f"Cannot combine C^{self.degree}({self.source.name}, {self.target.name}) "
                f"with C^{other.degree}({other.source.name}, {other.target.name})"
            )

    def __add__(self, other):
        self._check(other)
        data = dict(self.data)
        for chain, value in other.data.items():
            data[chain] = self.field.add(data[chain], value) if chain in data else value
        return Cochain(self.source, self.target, self.degree, data)

    def __neg__(self):
        return Cochain(self.source, self.target, self.degree, {c: self.field.neg(v) for c, v in self.data.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.field(c)
        return Cochain(self.source, self.target, self.degree, {k: self.field.scale(c, v) for k, v in self.data.items()})

    def is_zero(self):
        return not self.data

    def __eq__(self, other):
        return isinstance(other, Cochain) and self.same_context(other) and self.data == other.data

    def __hash__(self):
        return hash((self.degree, frozenset(self.data.items())))

    def __repr__(self):
        return f"Cochain(C^{self.degree}({self.source.name}, {self.target.name}), {len(self.data)} entries)"

    def with_context(self, source, target):
        """Relabel the functor pair; the functors must act identically."""
        if not (functors_equal(source, self.source) and functors_equal(target, self.target)):
            raise ContextMismatchError(f"Cannot move {self!r} to ({source.name}, {target.name})")
        return Cochain(source, target, self.degree, self.data)

    def is_normalized(self):
        A = self.category
        return all(not has_identity_argument(A, chain) for chain in self.data)

    def entries(self):
        """
        Sparse serialization

        Returns:
            list: (object tuple, basis id tuple, target basis id, scalar string), sorted
        """
        A, B = self.category, self.codomain
        rows = []
        for (objs, idx), value in self.data.items():
            ids = tuple(A.basis(objs[k], objs[k + 1])[i] for k, i in enumerate(idx))
            target_basis = B.basis(self.source(objs[0]), self.target(objs[-1]))
            for t, c in enumerate(value):
                if not self.field.is_zero(c):
                    rows.append((objs, ids, target_basis[t], self.field.format(c)))
        return sorted(rows)


def zero_cochain(source, target, degree):
    return Cochain(source, target, degree)


def cochain_from_nat(nat):
    return Cochain(nat.source, nat.target, 0, {((x,), ()): nat.component(x) for x in nat.source.source.objects})


def nat_from_cochain(cochain, name="σ"):
    if cochain.degree != 0:
        raise ContextMismatchError(f"Only 0-cochains are natural transformation candidates, got degree {cochain.degree}")
    components = {x: cochain.value(((x,), ())) for x in cochain.category.objects}
    return NatTransf(name, cochain.source, cochain.target, components)


def unit_cochain(F):
    """The 0-cochain of identity components of F."""
    B = F.target
    return Cochain(F, F, 0, {((x,), ()): B.identity_vector(F(x)) for x in F.source.objects})


def functor_cochain(F):
    """The 1-cochain in C^1(F, F) recording the hom action of F."""
    data = {}
    for (objs, idx) in enumerate_chains(F.source, 1):
        data[(objs, idx)] = F.apply_basis(objs[0], objs[1], idx[0])
    return Cochain(F, F, 1, data)


def composition_cochain(category):
    """The 2-cochain (f, g) -> fg of C^2(Id, Id)."""
    I = identity_functor(category)
    data = {}
    for (objs, idx) in enumerate_chains(category, 2):
        data[(objs, idx)] = category.product(objs[0], objs[1], objs[2], idx[0], idx[1])
    return Cochain(I, I, 2, data)


def evaluate(phi, objs, vectors):
    """
    Evaluate φ multilinearly on a chain of vectors

    Args:
        phi (Cochain): Cochain of degree len(vectors)
        objs (tuple): Objects x0..xn of phi's argument category
        vectors (list): vectors[k] in hom(x_k, x_{k+1})

    Returns:
        tuple: Vector of hom(F(x0), G(xn))
    """
    field = phi.field
    zero = field.zero
    objs = tuple(objs)
    acc = list(field.zero_vector(phi.hom_dim(objs)))
    nonzero = [[(i, c) for i, c in enumerate(v) if c != zero] for v in vectors]
    for combo in product(*nonzero):
        value = phi.data.get((objs, tuple(i for i, _ in combo)))
        if value is None:
            continue
        coef = field.one
        for _, c in combo:
            coef *= c
        for t, w in enumerate(value):
            if w != zero:
                acc[t] += coef * w
    return tuple(acc)


def coboundary(psi):
    """
    δψ(f1..f_{n+1}) = F(f1)ψ(f2..) + Σ (-1)^i ψ(.., f_i f_{i+1}, ..) + (-1)^{n+1} ψ(..f_n)G(f_{n+1})
    """
    F, G, n = psi.source, psi.target, psi.degree
    A, B = F.source, F.target
    field = psi.field
    data = {}
    for objs, idx in enumerate_chains(A, n + 1):
        x0, xl = objs[0], objs[-1]
        acc = B.compose_vectors(
            F(x0), F(objs[1]), G(xl), F.apply_basis(x0, objs[1], idx[0]), psi.value((objs[1:], idx[1:]))
        )
        for i in range(1, n + 1):
            merged_objs = objs[:i] + objs[i + 1:]
            composite = A.product(objs[i - 1], objs[i], objs[i + 1], idx[i - 1], idx[i])
            vectors = [field.unit_vector(A.dim(objs[k], objs[k + 1]), idx[k]) for k in range(i - 1)]
            vectors.append(composite)
            vectors += [field.unit_vector(A.dim(objs[k], objs[k + 1]), idx[k]) for k in range(i + 1, n + 1)]
            term = evaluate(psi, merged_objs, vectors)
            acc = field.add(acc, term) if i % 2 == 0 else field.sub(acc, term)
        last = B.compose_vectors(
            F(x0), G(objs[-2]), G(xl), psi.value((objs[:-1], idx[:-1])), G.apply_basis(objs[-2], xl, idx[-1])
        )
        acc = field.add(acc, last) if (n + 1) % 2 == 0 else field.sub(acc, last)
        data[(objs, idx)] = acc
    return Cochain(F, G, n + 1, data)


def cup(phi, psi):
    """
    (φ ∪ ψ)(f1..f_{n+m}) = (-1)^{nm} φ(f1..fn) ψ(f_{n+1}..f_{n+m})

    Args:
        phi (Cochain): In C^n(F, G)
        psi (Cochain): In C^m(G, H)

    Returns:
        Cochain: In C^{n+m}(F, H)
    """
    if not functors_equal(phi.target, psi.source):
        raise ContextMismatchError(f"Cup needs matching middle functors, got {phi.target.name} and {psi.source.name}")
    F, G, H = phi.source, phi.target, psi.target
    n, m = phi.degree, psi.degree
    B = F.target
    field = phi.field
    negative = (n * m) % 2 == 1
    data = {}
    for (objs, idx), left in phi.data.items():
        for (objs2, idx2), right in psi.data.items():
            if objs2[0] != objs[-1]:
                continue
            value = B.compose_vectors(F(objs[0]), G(objs[-1]), H(objs2[-1]), left, right)
            if negative:
                value = field.neg(value)
            key = (objs + objs2[1:], idx + idx2)
            data[key] = field.add(data[key], value) if key in data else value
    return Cochain(F, H, n + m, data)


def nat_pre_post(tau, phi, side):
    """
    Pre- or post-composition by a natural transformation

    side "pre": τ^*(φ) = τ ∪ φ; side "post": τ_*(φ) = φ ∪ τ.
    """
    t = cochain_from_nat(tau) if isinstance(tau, NatTransf) else tau
    if side == "pre":
        return cup(t, phi)
    if side == "post":
        return cup(phi, t)
    raise ValueError(f"Unknown side '{side}'")


def pushforward(H, phi):
    """H_*(φ) = H ∘ φ, in C^n(F;H, G;H)."""
    if not same_category(H.source, phi.codomain):
        raise ContextMismatchError(f"Cannot push {phi!r} forward along {H.name}")
    F, G = phi.source, phi.target
    data = {}
    for (objs, idx), value in phi.data.items():
        data[(objs, idx)] = H.apply(F(objs[0]), G(objs[-1]), value)
    return Cochain(compose_context(F, H), compose_context(G, H), phi.degree, data)


def pullback(F, phi):
    """F^*(φ)(f1..fn) = φ(F(f1), .., F(fn)), in C^n(F;G, F;H)."""
    if not same_category(F.target, phi.category):
        raise ContextMismatchError(f"Cannot pull {phi!r} back along {F.name}")
    A = F.source
    data = {}
    for objs, idx in enumerate_chains(A, phi.degree):
        vectors = [F.apply_basis(objs[k], objs[k + 1], i) for k, i in enumerate(idx)]
        data[(objs, idx)] = evaluate(phi, tuple(F(x) for x in objs), vectors)
    return Cochain(compose_context(F, phi.source), compose_context(F, phi.target), phi.degree, data)


def _placements(total, degrees, arity):
    """
    Order-preserving insertions of blocks of the given degrees among outer arguments

    Yields:
        tuple: (steps, sign exponent); a step is ("arg", p, pos) or ("block", p, pos)
    """
    m = len(degrees)

    def extend(pos, p, used, steps, eps):
        if used > arity:
            return
        if pos == total and p == m:
            if used == arity:
                yield tuple(steps), eps
            return
        if p < m and pos + degrees[p] <= total:
            yield from extend(
                pos + degrees[p], p + 1, used + 1, [*steps, ("block", p, pos)], eps + (degrees[p] - 1) * pos
            )
        if pos < total:
            yield from extend(pos + 1, p, used + 1, [*steps, ("arg", p, pos)], eps)

    yield from extend(0, 0, 0, [], 0)


def _brace_functors(phi, psis):
    functors = [psis[0].source]
    for p, psi in enumerate(psis):
        if not functors_equal(psi.source, functors[-1]):
            raise ContextMismatchError(f"Brace argument {p + 1} starts at {psi.source.name}, expected {functors[-1].name}")
        if not same_category(psi.codomain, phi.category):
            raise ContextMismatchError(f"Brace argument {p + 1} does not land in the arguments of {phi!r}")
        functors.append(psi.target)
    return functors


def brace(phi, psis, source=None, target=None):
    """
    φ{ψ1, .., ψm}

    φ in C^K(G, H) over B, ψ_p in C^{k_p}(F_{p-1}, F_p) over A with F_p: A -> B.
    Outer arguments after p blocks are mapped by F_p. The sign of an insertion
    is (-1)^{Σ (k_p - 1) l_p}, l_p counting the result arguments before ψ_p.

    Returns:
        Cochain: In C^{K - m + Σ k_p}(F_0;G, F_m;H); zero when m > K
    """
    if not psis:
        return phi
    functors = _brace_functors(phi, psis)
    degrees = [psi.degree for psi in psis]
    K, m = phi.degree, len(psis)
    total = K - m + sum(degrees)
    source = source or compose_context(functors[0], phi.source)
    target = target or compose_context(functors[-1], phi.target)
    if m > K:
        return Cochain(source, target, max(total, 0))

    A = functors[0].source
    field = phi.field
    placements = list(_placements(total, degrees, K))
    data = {}
    for objs, idx in enumerate_chains(A, total):
        acc = field.zero_vector(phi.codomain.dim(phi.source(functors[0](objs[0])), phi.target(functors[-1](objs[-1]))))
        for steps, eps in placements:
            bobjs = [functors[0](objs[0])]
            vectors = []
            for kind, p, pos in steps:
                if kind == "arg":
                    Fp = functors[p]
                    vectors.append(Fp.apply_basis(objs[pos], objs[pos + 1], idx[pos]))
                    bobjs.append(Fp(objs[pos + 1]))
                else:
                    k = degrees[p]
                    vectors.append(psis[p].value((objs[pos:pos + k + 1], idx[pos:pos + k])))
                    bobjs.append(functors[p + 1](objs[pos + k]))
            term = evaluate(phi, bobjs, vectors)
            acc = field.sub(acc, term) if eps % 2 else field.add(acc, term)
        data[(objs, idx)] = acc
    return Cochain(source, target, total, data)


def sigma_dagger(sigma, parts):
    """
    σ‡(ψ_A, ψ_B, υ_F, ω_G) = ψ_B{σ} - σ_*(υ_F) + σ^*(ω_G)

    Args:
        sigma (NatTransf): σ: F => G
        parts (tuple): (ψ_A in C^{n+1}(A), ψ_B in C^{n+1}(B), υ_F in C^n(F), ω_G in C^n(G))

    Returns:
        Cochain: In C^n(F, G)
    """
    _, psi_b, upsilon, omega = parts
    s = cochain_from_nat(sigma)
    F, G = sigma.source, sigma.target
    braced = brace(psi_b, [s], source=F, target=G)
    return braced - cup(upsilon, s) + cup(s, omega)


# Normalization retraction


def insert_identity(psi, j):
    """
    S_j: (S_j ψ)(f1..f_{n-1}) = ψ(f1..f_{j-1}, 1, f_j..); zero when j > n
    """
    n = psi.degree
    F, G = psi.source, psi.target
    if n == 0:
        raise ValueError("Cannot insert an identity into a 0-cochain")
    if j > n:
        return Cochain(F, G, n - 1)
    A = psi.category
    data = {}
    for objs, idx in enumerate_chains(A, n - 1):
        x = objs[j - 1]
        chain = (objs[:j] + (x,) + objs[j:], idx[:j - 1] + (A.identity_index(x),) + idx[j - 1:])
        if chain in psi.data:
            data[(objs, idx)] = psi.data[chain]
    return Cochain(F, G, n - 1, data)


def retraction_step(psi, j):
    """h_j = id - (-1)^{j-1}(δS_j + S_jδ): kills identities in argument j."""
    correction = insert_identity(coboundary(psi), j)
    if psi.degree >= j:
        correction = correction + coboundary(insert_identity(psi, j))
    return psi + correction if j % 2 == 0 else psi - correction


def normalize_retraction(psi):
    """
    Project onto normalized cochains

    Returns:
        tuple: (h̄ψ, Hψ) with h̄ψ normalized and h̄ψ - ψ = δ(Hψ) + H(δψ);
            Hψ is None in degree 0
    """
    n = psi.degree
    current = psi
    homotopy = Cochain(psi.source, psi.target, n - 1) if n > 0 else None
    for j in range(1, n + 2):
        if j <= n:
            step = insert_identity(current, j)
            homotopy = homotopy - step if j % 2 == 1 else homotopy + step
        current = retraction_step(current, j)
    return current, homotopy


def retraction_homotopy(psi):
    return normalize_retraction(psi)[1]


# Cochain spaces and matrices


class CochainSpace:
    """
    Coordinates on C^n(F, G): one block per chain, one coordinate per target basis arrow

    Args:
        source (LinFunctor): F
        target (LinFunctor): G
        degree (int): n
        normalized (bool): Restrict to chains without identity arguments
    """

    def __init__(self, source, target, degree, normalized=False):
        self.source = source
        self.target = target
        self.degree = degree
        self.normalized = normalized
        self.field = source.target.field
        B = source.target
        self.chains = []
        self.offsets = {}
        self.dims = {}
        offset = 0
        if degree >= 0:
            for chain in enumerate_chains(source.source, degree, normalized):
                d = B.dim(source(chain[0][0]), target(chain[0][-1]))
                if d == 0:
                    continue
                self.chains.append(chain)
                self.offsets[chain] = offset
                self.dims[chain] = d
                offset += d
        self.dim = offset

    def __repr__(self):
        flag = "N" if self.normalized else ""
        return f"CochainSpace(C{flag}^{self.degree}({self.source.name}, {self.target.name}), dim {self.dim})"

    def to_vector(self, cochain):
        v = [self.field.zero] * self.dim
        for chain, offset in self.offsets.items():
            value = cochain.data.get(chain)
            if value is not None:
                v[offset:offset + self.dims[chain]] = value
        return tuple(v)

    def from_vector(self, vector):
        data = {}
        for chain, offset in self.offsets.items():
            data[chain] = tuple(vector[offset:offset + self.dims[chain]])
        return Cochain(self.source, self.target, self.degree, data)

    def basis_cochain(self, k):
        return self.from_vector(self.field.unit_vector(self.dim, k))


def assemble_matrix(source_space, target_space, row_terms):
    """
    Assemble a sparse matrix row block by row block

    Args:
        source_space (CochainSpace): Domain
        target_space (CochainSpace): Codomain
        row_terms (callable): chain -> iterable of (coef, source chain, action), where
            action is None (identity on hom coordinates) or a list of column vectors
    """
    field = target_space.field
    zero = field.zero
    entries = {}
    for chain in target_space.chains:
        row0 = target_space.offsets[chain]
        for coef, source_chain, action in row_terms(chain):
            if coef == zero:
                continue
            col0 = source_space.offsets.get(source_chain)
            if col0 is None:
                continue
            if action is None:
                for t in range(target_space.dims[chain]):
                    row = entries.setdefault(row0 + t, {})
                    row[col0 + t] = row.get(col0 + t, zero) + coef
                continue
            for s, column in enumerate(action):
                for t, value in enumerate(column):
                    if value != zero:
                        row = entries.setdefault(row0 + t, {})
                        row[col0 + s] = row.get(col0 + s, zero) + coef * value
    return field.matrix(entries, target_space.dim, source_space.dim)


def _left_action(B, w, x, y, u):
    """Columns of v -> u v, hom(x, y) -> hom(w, y)."""
    field = B.field
    return [B.compose_vectors(w, x, y, u, field.unit_vector(B.dim(x, y), s)) for s in range(B.dim(x, y))]


def _right_action(B, x, y, z, v):
    """Columns of u -> u v, hom(x, y) -> hom(x, z)."""
    field = B.field
    return [B.compose_vectors(x, y, z, field.unit_vector(B.dim(x, y), s), v) for s in range(B.dim(x, y))]


def _expand(field, vectors):
    """Multilinear expansion: (coefficient, index tuple) over nonzero coordinates."""
    zero = field.zero
    nonzero = [[(i, c) for i, c in enumerate(v) if c != zero] for v in vectors]
    for combo in product(*nonzero):
        coef = field.one
        for _, c in combo:
            coef *= c
        yield coef, tuple(i for i, _ in combo)


def _check_degree(n, max_degree):
    if max_degree is not None and n > max_degree:
        raise DegreeCapError(n, max_degree)


def delta_matrix(source, target, n, normalized=False, max_degree=None):
    """
    δ: C^n(F, G) -> C^{n+1}(F, G) as a sparse matrix

    Raises:
        DegreeCapError: n exceeds max_degree
    """
    _check_degree(n, max_degree)
    F, G = source, target
    A, B = F.source, F.target
    field = B.field
    one = field.one
    cache = {}

    def row_terms(chain):
        objs, idx = chain
        nn = len(idx) - 1
        x0, x1, xl, xp = objs[0], objs[1], objs[-1], objs[-2]
        key = ("L", x0, x1, xl, idx[0])
        if key not in cache:
            cache[key] = _left_action(B, F(x0), F(x1), G(xl), F.apply_basis(x0, x1, idx[0]))
        yield one, (objs[1:], idx[1:]), cache[key]
        for i in range(1, nn + 1):
            sign = one if i % 2 == 0 else -one
            composite = A.product(objs[i - 1], objs[i], objs[i + 1], idx[i - 1], idx[i])
            merged_objs = objs[:i] + objs[i + 1:]
            for k, c in enumerate(composite):
                if c != field.zero:
                    yield sign * c, (merged_objs, idx[:i - 1] + (k,) + idx[i + 1:]), None
        key = ("R", x0, xp, xl, idx[-1])
        if key not in cache:
            cache[key] = _right_action(B, F(x0), G(xp), G(xl), G.apply_basis(xp, xl, idx[-1]))
        yield (one if (nn + 1) % 2 == 0 else -one), (objs[:-1], idx[:-1]), cache[key]

    return assemble_matrix(
        CochainSpace(F, G, n, normalized), CochainSpace(F, G, n + 1, normalized), row_terms
    )


def pushforward_matrix(H, source_space, target_space=None):
    """H_*: C^n(F, G) -> C^n(F;H, G;H)."""
    F, G = source_space.source, source_space.target
    if target_space is None:
        target_space = CochainSpace(
            compose_context(F, H), compose_context(G, H), source_space.degree, source_space.normalized
        )

    def row_terms(chain):
        objs, _ = chain
        yield F.target.field.one, chain, H.images[(F(objs[0]), G(objs[-1]))]

    return assemble_matrix(source_space, target_space, row_terms)


def pullback_matrix(K, source_space, target_space=None):
    """K^*: C^n(G, H) over B -> C^n(K;G, K;H) over A, for K: A -> B."""
    G, H = source_space.source, source_space.target
    if target_space is None:
        target_space = CochainSpace(
            compose_context(K, G), compose_context(K, H), source_space.degree, source_space.normalized
        )
    field = K.target.field

    def row_terms(chain):
        objs, idx = chain
        kobjs = tuple(K(x) for x in objs)
        vectors = [K.apply_basis(objs[k], objs[k + 1], i) for k, i in enumerate(idx)]
        for coef, kidx in _expand(field, vectors):
            yield coef, (kobjs, kidx), None

    return assemble_matrix(source_space, target_space, row_terms)


def precompose_matrix(tau, source_space, target_space=None):
    """τ^*: C^n(G, H) -> C^n(F, H), φ -> τ ∪ φ, for τ: F => G."""
    F, G, H = tau.source, source_space.source, source_space.target
    if target_space is None:
        target_space = CochainSpace(F, H, source_space.degree, source_space.normalized)
    B = F.target

    def row_terms(chain):
        objs, _ = chain
        x0, xl = objs[0], objs[-1]
        yield B.field.one, chain, _left_action(B, F(x0), G(x0), H(xl), tau.component(x0))

    return assemble_matrix(source_space, target_space, row_terms)


def postcompose_matrix(tau, source_space, target_space=None):
    """τ_*: C^n(F, G) -> C^n(F, H), φ -> φ ∪ τ, for τ: G => H."""
    F, G, H = source_space.source, tau.source, tau.target
    if target_space is None:
        target_space = CochainSpace(F, H, source_space.degree, source_space.normalized)
    B = F.target

    def row_terms(chain):
        objs, _ = chain
        x0, xl = objs[0], objs[-1]
        yield B.field.one, chain, _right_action(B, F(x0), G(xl), H(xl), tau.component(xl))

    return assemble_matrix(source_space, target_space, row_terms)


def brace_fixed_matrix(nats, source_space, target_space=None):
    """
    φ -> φ{σ_1, .., σ_m} for fixed natural transformations σ_p: F_{p-1} => F_p

    The variable φ ranges over source_space = C^K(G, H) of the category the
    σ_p land in; the result lives in C^{K-m}(F_0;G, F_m;H).
    """
    G, H = source_space.source, source_space.target
    functors = [nats[0].source] + [nat.target for nat in nats]
    for p in range(1, len(nats)):
        if not functors_equal(nats[p].source, functors[p]):
            raise ContextMismatchError(f"{nats[p].name} does not start where {nats[p - 1].name} ends")
    K, m = source_space.degree, len(nats)
    total = K - m
    if target_space is None:
        target_space = CochainSpace(
            compose_context(functors[0], G), compose_context(functors[-1], H), total, source_space.normalized
        )
    if total < 0:
        return target_space.field.zero_matrix(target_space.dim, source_space.dim)
    field = source_space.field
    placements = list(_placements(total, [0] * m, K))

    def row_terms(chain):
        objs, idx = chain
        for steps, eps in placements:
            sign = -field.one if eps % 2 else field.one
            bobjs = [functors[0](objs[0])]
            vectors = []
            for kind, p, pos in steps:
                if kind == "arg":
                    vectors.append(functors[p].apply_basis(objs[pos], objs[pos + 1], idx[pos]))
                    bobjs.append(functors[p](objs[pos + 1]))
                else:
                    vectors.append(nats[p].component(objs[pos]))
                    bobjs.append(functors[p + 1](objs[pos]))
            bobjs = tuple(bobjs)
            for coef, bidx in _expand(field, vectors):
                yield sign * coef, (bobjs, bidx), None

    return assemble_matrix(source_space, target_space, row_terms)
