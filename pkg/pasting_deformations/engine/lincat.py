"""
Finite k-linear categories, k-linear functors and natural transformations

Composition is written in diagrammatic order: compose(f, g) follows f with g.
"""

from itertools import product

from pasting_deformations.engine.errors import CompositionError, ValidationError


class LinCategory:
    """
    A finite k-linear category given by hom bases and structure constants

    Args:
        name (str): Category id
        field (Field): Ground field
        objects (list): Object ids
        hom_basis (dict): {(x, y): [basis ids]}; missing pairs are zero homs
        identities (dict): {x: basis id of 1_x}
        products (dict): {(f, g): vector or {basis id: scalar}} for composable
            basis arrows; missing products are zero
        fill_identities (bool): supply 1_x f = f and f 1_y = f when not given
    """

    def __init__(self, name, field, objects, hom_basis, identities, products=None, fill_identities=True):
        self.name = name
        self.field = field
        self.objects = list(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValidationError(f"Category {name}: duplicate object ids")

        object_set = set(self.objects)
        self.hom_basis = {}
        self.arrows = {}
        for (x, y), ids in hom_basis.items():
            if x not in object_set or y not in object_set:
                raise ValidationError(f"Category {name}: hom({x}, {y}) refers to an unknown object")
            self.hom_basis[(x, y)] = list(ids)
        for x in self.objects:
            for y in self.objects:
                self.hom_basis.setdefault((x, y), [])
                for i, arrow_id in enumerate(self.hom_basis[(x, y)]):
                    if arrow_id in self.arrows:
                        raise ValidationError(f"Category {name}: basis id {arrow_id} is used twice")
                    self.arrows[arrow_id] = (x, y, i)

        self._identity_index = {}
        for x in self.objects:
            if x not in identities:
                raise ValidationError(f"Category {name}: object {x} has no identity")
            arrow_id = identities[x]
            if arrow_id not in self.arrows or self.arrows[arrow_id][:2] != (x, x):
                raise ValidationError(
                    f"Category {name}: identity {arrow_id} of {x} must be a basis element of hom({x}, {x})"
                )
            self._identity_index[x] = self.arrows[arrow_id][2]

        zero = field.zero
        self._table = {}
        for x, y, z in product(self.objects, repeat=3):
            n = self.dim(x, z)
            self._table[(x, y, z)] = [
                [(zero,) * n for _ in range(self.dim(y, z))] for _ in range(self.dim(x, y))
            ]

        given = set()
        for (f, g), value in (products or {}).items():
            if f not in self.arrows or g not in self.arrows:
                raise ValidationError(f"Category {name}: product {f} * {g} uses an unknown basis arrow")
            x, y, i = self.arrows[f]
            y2, z, j = self.arrows[g]
            if y != y2:
                raise ValidationError(f"Category {name}: product {f} * {g} is not composable")
            self._table[(x, y, z)][i][j] = self.vector(x, z, value)
            given.add((f, g))

        if fill_identities:
            for arrow_id, (x, y, i) in self.arrows.items():
                left = (self.identity_id(x), arrow_id)
                right = (arrow_id, self.identity_id(y))
                unit = field.unit_vector(self.dim(x, y), i)
                if left not in given:
                    self._table[(x, x, y)][self._identity_index[x]][i] = unit
                if right not in given:
                    self._table[(x, y, y)][i][self._identity_index[y]] = unit

        self._out = {x: [] for x in self.objects}
        for x in self.objects:
            for y in self.objects:
                for i in range(self.dim(x, y)):
                    self._out[x].append((y, i))

    def __repr__(self):
        return f"LinCategory({self.name})"

    def dim(self, x, y):
        return len(self.hom_basis[(x, y)])

    def basis(self, x, y):
        return self.hom_basis[(x, y)]

    def identity_id(self, x):
        return self.hom_basis[(x, x)][self._identity_index[x]]

    def identity_index(self, x):
        return self._identity_index[x]

    def identity_vector(self, x):
        return self.field.unit_vector(self.dim(x, x), self._identity_index[x])

    def is_identity(self, x, y, i):
        return x == y and self._identity_index[x] == i

    def out_arrows(self, x):
        """Basis arrows leaving x as (target, index), in a fixed order."""
        return self._out[x]

    def arrow(self, arrow_id):
        x, y, i = self.arrows[arrow_id]
        return Arrow(x, y, self.field.unit_vector(self.dim(x, y), i))

    def product(self, x, y, z, i, j):
        return self._table[(x, y, z)][i][j]

    def vector(self, x, y, value):
        """Coerce a tuple or a {basis id: scalar} dict into a hom(x, y) vector."""
        n = self.dim(x, y)
        if isinstance(value, dict):
            v = [self.field.zero] * n
            for arrow_id, c in value.items():
                if arrow_id not in self.arrows or self.arrows[arrow_id][:2] != (x, y):
                    raise ValidationError(f"Category {self.name}: {arrow_id} is not a basis arrow of hom({x}, {y})")
                v[self.arrows[arrow_id][2]] += self.field(c)
            return tuple(v)
        value = tuple(self.field(c) for c in value)
        if len(value) != n:
            raise ValidationError(
                f"Category {self.name}: vector of length {len(value)} in hom({x}, {y}) of dimension {n}"
            )
        return value

    def compose_vectors(self, x, y, z, u, v):
        """Bilinear composite of u in hom(x, y) followed by v in hom(y, z)."""
        zero = self.field.zero
        acc = [zero] * self.dim(x, z)
        table = self._table[(x, y, z)]
        for i, a in enumerate(u):
            if a == zero:
                continue
            row = table[i]
            for j, b in enumerate(v):
                if b == zero:
                    continue
                c = a * b
                for k, w in enumerate(row[j]):
                    if w != zero:
                        acc[k] += c * w
        return tuple(acc)

    def format_vector(self, x, y, v):
        terms = []
        for arrow_id, c in zip(self.basis(x, y), v):
            if not self.field.is_zero(c):
                terms.append(f"{self.field.format(c)} {arrow_id}")
        return " + ".join(terms) if terms else "0"


class Arrow:
    """An arrow src -> tgt given by coefficients over hom_basis(src, tgt)."""

    def __init__(self, src, tgt, coeffs):
        self.src = src
        self.tgt = tgt
        self.coeffs = tuple(coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Arrow)
            and (self.src, self.tgt, self.coeffs) == (other.src, other.tgt, other.coeffs)
        )

    def __hash__(self):
        return hash((self.src, self.tgt, self.coeffs))

    def __repr__(self):
        return f"Arrow({self.src}->{self.tgt}, {self.coeffs})"


def same_category(a, b):
    if a is b:
        return True
    return (
        a.name == b.name
        and a.field == b.field
        and a.objects == b.objects
        and a.hom_basis == b.hom_basis
        and a._table == b._table
    )


def compose_arrows(category, f, g):
    """Composite fg: follow f with g."""
    if f.tgt != g.src:
        raise CompositionError(f"Cannot compose {f.src}->{f.tgt} with {g.src}->{g.tgt}")
    return Arrow(f.src, g.tgt, category.compose_vectors(f.src, f.tgt, g.tgt, f.coeffs, g.coeffs))


def validate_category(category):
    """
    Check the unit and associativity axioms on all basis arrows

    Returns:
        list: Findings, empty iff the category is valid
    """
    C = category
    findings = []
    for arrow_id, (x, y, i) in C.arrows.items():
        unit = C.field.unit_vector(C.dim(x, y), i)
        if C.compose_vectors(x, x, y, C.identity_vector(x), unit) != unit:
            findings.append(f"{C.name}: left unit law fails at {arrow_id}")
        if C.compose_vectors(x, y, y, unit, C.identity_vector(y)) != unit:
            findings.append(f"{C.name}: right unit law fails at {arrow_id}")

    for w, x, y, z in product(C.objects, repeat=4):
        for i, j, k in product(range(C.dim(w, x)), range(C.dim(x, y)), range(C.dim(y, z))):
            ab = C.product(w, x, y, i, j)
            bc = C.product(x, y, z, j, k)
            c = C.field.unit_vector(C.dim(y, z), k)
            a = C.field.unit_vector(C.dim(w, x), i)
            if C.compose_vectors(w, y, z, ab, c) != C.compose_vectors(w, x, z, a, bc):
                findings.append(
                    f"{C.name}: associativity fails at "
                    f"({C.basis(w, x)[i]}, {C.basis(x, y)[j]}, {C.basis(y, z)[k]})"
                )
    return findings


class LinFunctor:
    """
    A k-linear functor: object map plus one matrix per hom space

    Args:
        name (str): Functor id
        source (LinCategory): Source category
        target (LinCategory): Target category
        obj_map (dict): {object: object}
        images (dict): {basis id: vector or {basis id: scalar}} images of source basis arrows;
            missing images are zero
    """

    def __init__(self, name, source, target, obj_map, images):
        self.name = name
        self.source = source
        self.target = target
        for x in source.objects:
            if x not in obj_map:
                raise ValidationError(f"Functor {name}: object {x} is not mapped")
            if obj_map[x] not in target.objects:
                raise ValidationError(f"Functor {name}: {x} maps to unknown object {obj_map[x]}")
        self.obj_map = {x: obj_map[x] for x in source.objects}

        for arrow_id in images:
            if arrow_id not in source.arrows:
                raise ValidationError(f"Functor {name}: {arrow_id} is not a basis arrow of {source.name}")

        self.images = {}
        for (x, y), ids in source.hom_basis.items():
            fx, fy = self.obj_map[x], self.obj_map[y]
            column = []
            for arrow_id in ids:
                if arrow_id in images:
                    column.append(target.vector(fx, fy, images[arrow_id]))
                else:
                    column.append(target.field.zero_vector(target.dim(fx, fy)))
            self.images[(x, y)] = column

    def __repr__(self):
        return f"LinFunctor({self.name}: {self.source.name} -> {self.target.name})"

    def __call__(self, x):
        return self.obj_map[x]

    def apply_basis(self, x, y, i):
        return self.images[(x, y)][i]

    def apply(self, x, y, v):
        """Image of a vector of hom(x, y)."""
        B = self.target
        zero = B.field.zero
        fx, fy = self.obj_map[x], self.obj_map[y]
        acc = [zero] * B.dim(fx, fy)
        for i, c in enumerate(v):
            if c == zero:
                continue
            for k, w in enumerate(self.images[(x, y)][i]):
                if w != zero:
                    acc[k] += c * w
        return tuple(acc)


def validate_functor(functor):
    """
    Check F(1_x) = 1_{F(x)} and F(fg) = F(f)F(g) on basis arrows

    Returns:
        list: Findings, empty iff the functor axioms hold exactly
    """
    F = functor
    A, B = F.source, F.target
    findings = []
    for x in A.objects:
        if F.apply(x, x, A.identity_vector(x)) != B.identity_vector(F(x)):
            findings.append(f"{F.name}: identity of {x} is not preserved")

    for x, y, z in product(A.objects, repeat=3):
        for i, j in product(range(A.dim(x, y)), range(A.dim(y, z))):
            lhs = F.apply(x, z, A.product(x, y, z, i, j))
            rhs = B.compose_vectors(F(x), F(y), F(z), F.apply_basis(x, y, i), F.apply_basis(y, z, j))
            if lhs != rhs:
                findings.append(f"{F.name}: not multiplicative at ({A.basis(x, y)[i]}, {A.basis(y, z)[j]})")
    return findings


def identity_functor(category):
    cached = getattr(category, "_identity_functor", None)
    if cached is not None:
        return cached
    images = {arrow_id: category.arrow(arrow_id).coeffs for arrow_id in category.arrows}
    functor = LinFunctor(f"id_{category.name}", category, category, {x: x for x in category.objects}, images)
    category._identity_functor = functor
    return functor


def is_identity_functor(F):
    return F is getattr(F.source, "_identity_functor", None) or functors_equal(F, identity_functor(F.source))


def compose_functors(F, G):
    """Composite F;G: apply F, then G."""
    if not same_category(F.target, G.source):
        raise CompositionError(f"Cannot compose {F.name} with {G.name}: {F.target.name} != {G.source.name}")
    if is_identity_functor(G):
        return F
    if is_identity_functor(F):
        return G
    images = {}
    for arrow_id, (x, y, i) in F.source.arrows.items():
        images[arrow_id] = G.apply(F(x), F(y), F.apply_basis(x, y, i))
    obj_map = {x: G(F(x)) for x in F.source.objects}
    return LinFunctor(f"{F.name};{G.name}", F.source, G.target, obj_map, images)


def functors_equal(F, G):
    if F is G:
        return True
    return (
        same_category(F.source, G.source)
        and same_category(F.target, G.target)
        and F.obj_map == G.obj_map
        and F.images == G.images
    )


class NatTransf:
    """
    A natural transformation F => G given by its components

    Args:
        name (str): Id
        source (LinFunctor): F
        target (LinFunctor): G, parallel to F
        components (dict): {x: vector or {basis id: scalar}} arrows F(x) -> G(x)
    """

    def __init__(self, name, source, target, components):
        if not (same_category(source.source, target.source) and same_category(source.target, target.target)):
            raise CompositionError(f"Natural transformation {name}: {source.name} and {target.name} are not parallel")
        self.name = name
        self.source = source
        self.target = target
        B = source.target
        self.components = {}
        for x, value in components.items():
            if x not in source.source.objects:
                raise ValidationError(f"Natural transformation {name}: unknown object {x}")
            self.components[x] = B.vector(source(x), target(x), value)

    def __repr__(self):
        return f"NatTransf({self.name}: {self.source.name} => {self.target.name})"

    def component(self, x):
        if x not in self.components:
            raise ValidationError(f"Natural transformation {self.name}: component at {x} is missing")
        return self.components[x]


def validate_naturality(nat):
    """
    Check F(f)σ_y = σ_x G(f), literally as the 0-cocycle condition δσ = 0

    Returns:
        list: Findings, empty iff σ is natural
    """
    from pasting_deformations.engine.hochschild import coboundary, cochain_from_nat

    for x in nat.source.source.objects:
        nat.component(x)

    A = nat.source.source
    delta = coboundary(cochain_from_nat(nat))
    findings = []
    for (objs, idx), value in sorted(delta.data.items()):
        if not nat.source.target.field.vector_is_zero(value):
            findings.append(f"{nat.name}: naturality fails at {A.basis(objs[0], objs[1])[idx[0]]}")
    return findings


def identity_nat(F):
    B = F.target
    return NatTransf(f"1_{F.name}", F, F, {x: B.identity_vector(F(x)) for x in F.source.objects})


def vertical_compose_nats(sigma, tau):
    """(σ·τ)_x = σ_x τ_x."""
    if not functors_equal(sigma.target, tau.source):
        raise CompositionError(f"Cannot compose {sigma.name} with {tau.name}: boundaries differ")
    F, G, H = sigma.source, sigma.target, tau.target
    B = F.target
    components = {
        x: B.compose_vectors(F(x), G(x), H(x), sigma.component(x), tau.component(x))
        for x in F.source.objects
    }
    return NatTransf(f"{sigma.name}.{tau.name}", F, H, components)


def whisker_left(K, sigma):
    """Precompose σ: G => H with K: (σ_K)_x = σ_{K(x)}."""
    if not same_category(K.target, sigma.source.source):
        raise CompositionError(f"Cannot whisker {sigma.name} by {K.name}")
    components = {x: sigma.component(K(x)) for x in K.source.objects}
    return NatTransf(
        f"{K.name}*{sigma.name}",
        compose_functors(K, sigma.source),
        compose_functors(K, sigma.target),
        components,
    )


def whisker_right(sigma, H):
    """Postcompose σ: F => G with H: (H(σ))_x = H(σ_x)."""
    if not same_category(sigma.source.target, H.source):
        raise CompositionError(f"Cannot whisker {sigma.name} by {H.name}")
    F, G = sigma.source, sigma.target
    components = {x: H.apply(F(x), G(x), sigma.component(x)) for x in F.source.objects}
    return NatTransf(
        f"{sigma.name}*{H.name}",
        compose_functors(F, H),
        compose_functors(G, H),
        components,
    )


def whisker(side, first, second):
    """whisker("left", K, σ) = σ_K; whisker("right", σ, H) = H(σ)."""
    if side == "left":
        return whisker_left(first, second)
    if side == "right":
        return whisker_right(first, second)
    raise ValueError(f"Unknown whisker side '{side}'")


def nats_equal(sigma, tau):
    return (
        functors_equal(sigma.source, tau.source)
        and functors_equal(sigma.target, tau.target)
        and all(sigma.component(x) == tau.component(x) for x in sigma.source.source.objects)
    )
