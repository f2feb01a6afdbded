"""
Truncated one-parameter deformations

A deformation of order N lives over k[ε]/(ε^{N+1}). Its coefficients are
Hochschild cochains indexed by order i = 1..N; order 0 is the undeformed
structure. Arrows of a deformed category are truncated arrows: tuples of
N+1 coefficient vectors.
"""

from itertools import product

from pasting_deformations.engine.computad import sequentialize
from pasting_deformations.engine.errors import CompositionError, ContextMismatchError, DeformationError
from pasting_deformations.engine.hochschild import (
    Cochain,
    brace,
    cochain_from_nat,
    coboundary,
    composition_cochain,
    enumerate_chains,
    evaluate,
    functor_cochain,
    unit_cochain,
)
from pasting_deformations.engine.lincat import (
    LinCategory,
    compose_functors,
    functors_equal,
    identity_functor,
    identity_nat,
    is_identity_functor,
    same_category,
    validate_category,
    validate_functor,
    validate_naturality,
    vertical_compose_nats,
    whisker_left,
    whisker_right,
)


def _coefficients(values, order, check):
    coefficients = {}
    for i, cochain in (values or {}).items():
        if not 1 <= i <= order:
            raise DeformationError(f"Coefficient order {i} lies outside 1..{order}")
        check(cochain)
        if not cochain.is_zero():
            coefficients[i] = cochain
    return coefficients


class CategoryDeformation:
    """
    Args:
        name (str): Deformation id
        base (LinCategory): Undeformed category
        order (int): N
        mu (dict): {i: Cochain in C^2(Id, Id)}, composition coefficients
        iota (dict): {i: Cochain in C^0(Id, Id)}, identity coefficients
    """

    def __init__(self, name, base, order, mu=None, iota=None):
        self.name = name
        self.base = base
        self.order = order
        self.identity = identity_functor(base)

        def check(degree):
            def inner(cochain):
                if cochain.degree != degree or not same_category(cochain.category, base):
                    raise ContextMismatchError(f"{name}: coefficient {cochain!r} is not a {degree}-cochain of {base.name}")
            return inner

        self.mu = _coefficients(mu, order, check(2))
        self.iota = _coefficients(iota, order, check(0))

    def __repr__(self):
        return f"CategoryDeformation({self.name} of {self.base.name}, order {self.order})"

    @property
    def field(self):
        return self.base.field

    def mu_at(self, i):
        if i == 0:
            return composition_cochain(self.base)
        return self.mu.get(i) or Cochain(self.identity, self.identity, 2)

    def iota_at(self, i):
        if i == 0:
            return unit_cochain(self.identity)
        return self.iota.get(i) or Cochain(self.identity, self.identity, 0)

    def is_unit_trivial(self):
        return not self.iota

    def identity_arrow(self, x):
        return tuple(self.iota_at(i).value(((x,), ())) for i in range(self.order + 1))

    def compose(self, x, y, z, a, b):
        """Truncated composite μ̃(a, b) of a in hom(x, y) and b in hom(y, z)."""
        return deformed_compose(self, x, y, z, a, b)

    def with_order(self, order):
        """Truncate or zero-pad to the given order."""
        return CategoryDeformation(
            self.name,
            self.base,
            order,
            {i: c for i, c in self.mu.items() if i <= order},
            {i: c for i, c in self.iota.items() if i <= order},
        )

    def with_terms(self, n, mu=None, iota=None):
        new_mu, new_iota = dict(self.mu), dict(self.iota)
        if mu is not None:
            new_mu[n] = mu
        if iota is not None:
            new_iota[n] = iota
        return CategoryDeformation(self.name, self.base, max(self.order, n), new_mu, new_iota)


class FunctorDeformation:
    """
    Args:
        name (str): Id
        functor (LinFunctor): Undeformed functor F: A -> B
        source (CategoryDeformation): Deformation of A
        target (CategoryDeformation): Deformation of B
        order (int): N
        maps (dict): {i: Cochain in C^1(F, F)}
    """

    def __init__(self, name, functor, source, target, order, maps=None):
        if not (same_category(functor.source, source.base) and same_category(functor.target, target.base)):
            raise ContextMismatchError(f"{name}: {functor.name} does not run between the deformed categories")
        self.name = name
        self.functor = functor
        self.source = source
        self.target = target
        self.order = order

        def check(cochain):
            if cochain.degree != 1 or not functors_equal(cochain.source, functor) or not functors_equal(cochain.target, functor):
                raise ContextMismatchError(f"{name}: coefficient {cochain!r} is not in C^1({functor.name}, {functor.name})")

        self.maps = _coefficients(maps, order, check)

    def __repr__(self):
        return f"FunctorDeformation({self.name} of {self.functor.name}, order {self.order})"

    @property
    def field(self):
        return self.functor.target.field

    def map_at(self, i):
        if i == 0:
            return functor_cochain(self.functor)
        return self.maps.get(i) or Cochain(self.functor, self.functor, 1)

    def apply(self, x, y, a):
        return deformed_apply(self, x, y, a)

    def with_order(self, order, source=None, target=None):
        return FunctorDeformation(
            self.name,
            self.functor,
            source or self.source.with_order(order),
            target or self.target.with_order(order),
            order,
            {i: c for i, c in self.maps.items() if i <= order},
        )

    def with_terms(self, n, map_=None, source=None, target=None):
        maps = dict(self.maps)
        if map_ is not None:
            maps[n] = map_
        return FunctorDeformation(
            self.name, self.functor, source or self.source, target or self.target, max(self.order, n), maps
        )


class NatDeformation:
    """
    Args:
        name (str): Id
        nat (NatTransf): Undeformed σ: F => G
        source (FunctorDeformation): Deformation of F
        target (FunctorDeformation): Deformation of G, over the same category deformations
        order (int): N
        components (dict): {i: Cochain in C^0(F, G)}
    """

    def __init__(self, name, nat, source, target, order, components=None):
        if not (functors_equal(nat.source, source.functor) and functors_equal(nat.target, target.functor)):
            raise ContextMismatchError(f"{name}: {nat.name} does not run between the deformed functors")
        self.name = name
        self.nat = nat
        self.source = source
        self.target = target
        self.order = order

        def check(cochain):
            if cochain.degree != 0 or not functors_equal(cochain.source, nat.source) or not functors_equal(cochain.target, nat.target):
                raise ContextMismatchError(f"{name}: coefficient {cochain!r} is not in C^0({nat.source.name}, {nat.target.name})")

        self.components = _coefficients(components, order, check)

    def __repr__(self):
        return f"NatDeformation({self.name} of {self.nat.name}, order {self.order})"

    @property
    def field(self):
        return self.nat.source.target.field

    @property
    def codomain(self):
        return self.source.target

    def component_at(self, i):
        if i == 0:
            return cochain_from_nat(self.nat)
        return self.components.get(i) or Cochain(self.nat.source, self.nat.target, 0)

    def component(self, x):
        return tuple(self.component_at(i).value(((x,), ())) for i in range(self.order + 1))

    def with_order(self, order, source=None, target=None):
        return NatDeformation(
            self.name,
            self.nat,
            source or self.source.with_order(order),
            target or self.target.with_order(order),
            order,
            {i: c for i, c in self.components.items() if i <= order},
        )

    def with_terms(self, n, component=None, source=None, target=None):
        components = dict(self.components)
        if component is not None:
            components[n] = component
        return NatDeformation(
            self.name, self.nat, source or self.source, target or self.target, max(self.order, n), components
        )


class DiagramDeformation:
    """
    Deformations of every part of a labelled diagram

    Args:
        name (str): Id
        label (DiagramLabel): The labelled diagram
        order (int): N
        vertices (dict): {vertex: CategoryDeformation}
        edges (dict): {edge: FunctorDeformation}
        faces (dict): {2-cell: {i: Cochain in C^0(P, Q)}}; the boundary functor
            deformations are induced from the edges
    """

    def __init__(self, name, label, order, vertices, edges, faces=None):
        self.name = name
        self.label = label
        self.order = order
        K = label.computad
        for v in K.vertices:
            if v not in vertices:
                raise DeformationError(f"{name}: vertex {v} has no deformation")
        for e in K.edges:
            if e not in edges:
                raise DeformationError(f"{name}: edge {e} has no deformation")
        self.vertices = dict(vertices)
        self.edges = dict(edges)
        self.faces = {f: dict((faces or {}).get(f, {})) for f in K.cells2}

    def __repr__(self):
        return f"DiagramDeformation({self.name} of {self.label.name}, order {self.order})"

    @property
    def field(self):
        return next(iter(self.vertices.values())).field

    def face(self, f):
        K = self.label.computad
        dom, cod = K.cells2[f]
        nat = self.label.nats[f]
        return NatDeformation(
            f"{self.name}.{f}",
            nat,
            induce_path(self, dom),
            induce_path(self, cod),
            self.order,
            self.faces[f],
        )

    def with_order(self, order):
        vertices = {v: d.with_order(order) for v, d in self.vertices.items()}
        edges = {}
        for e, d in self.edges.items():
            dom, cod = self.label.computad.edges[e]
            edges[e] = d.with_order(order, vertices[dom], vertices[cod])
        faces = {f: {i: c for i, c in comps.items() if i <= order} for f, comps in self.faces.items()}
        return DiagramDeformation(self.name, self.label, order, vertices, edges, faces)


def deformation_kind(d):
    if isinstance(d, CategoryDeformation):
        return "category"
    if isinstance(d, FunctorDeformation):
        return "functor"
    if isinstance(d, NatDeformation):
        return "nat"
    if isinstance(d, DiagramDeformation):
        return "diagram"
    raise DeformationError(f"Not a deformation: {d!r}")


# Truncated arithmetic


def _add_into(acc, v):
    for t, c in enumerate(v):
        acc[t] += c


def deformed_compose(d, x, y, z, a, b):
    """c_n = Σ_{i+j+k=n} μ^{(i)}(a_j, b_k)."""
    field = d.field
    N = d.order
    out = []
    for n in range(N + 1):
        acc = list(field.zero_vector(d.base.dim(x, z)))
        for i in range(n + 1):
            mu = d.mu_at(i)
            if mu.is_zero():
                continue
            for j in range(n - i + 1):
                k = n - i - j
                if field.vector_is_zero(a[j]) or field.vector_is_zero(b[k]):
                    continue
                _add_into(acc, evaluate(mu, (x, y, z), [a[j], b[k]]))
        out.append(tuple(acc))
    return tuple(out)


def deformed_apply(fd, x, y, a):
    """c_n = Σ_{i+j=n} F^{(i)}(a_j)."""
    F = fd.functor
    field = fd.field
    out = []
    for n in range(fd.order + 1):
        acc = list(field.zero_vector(F.target.dim(F(x), F(y))))
        for i in range(n + 1):
            if field.vector_is_zero(a[n - i]):
                continue
            _add_into(acc, evaluate(fd.map_at(i), (x, y), [a[n - i]]))
        out.append(tuple(acc))
    return tuple(out)


def constant_arrow(field, vector, order):
    return (tuple(vector),) + tuple(field.zero_vector(len(vector)) for _ in range(order))


def _arrow_diff(field, a, b):
    return tuple(field.sub(u, v) for u, v in zip(a, b))


# Defect cochains: left-hand side minus right-hand side of each equation, per order


def category_defects(d):
    """
    Returns:
        dict: {n: (associativity C^3, left unit C^1, right unit C^1)}
    """
    C, field, N = d.base, d.field, d.order
    I = d.identity
    assoc = {n: {} for n in range(N + 1)}
    for (w, x, y, z), (i, j, k) in enumerate_chains(C, 3):
        a = constant_arrow(field, field.unit_vector(C.dim(w, x), i), N)
        b = constant_arrow(field, field.unit_vector(C.dim(x, y), j), N)
        c = constant_arrow(field, field.unit_vector(C.dim(y, z), k), N)
        lhs = d.compose(w, y, z, d.compose(w, x, y, a, b), c)
        rhs = d.compose(w, x, z, a, d.compose(x, y, z, b, c))
        for n, v in enumerate(_arrow_diff(field, lhs, rhs)):
            assoc[n][((w, x, y, z), (i, j, k))] = v

    left = {n: {} for n in range(N + 1)}
    right = {n: {} for n in range(N + 1)}
    for (x, y), (i,) in enumerate_chains(C, 1):
        f = constant_arrow(field, field.unit_vector(C.dim(x, y), i), N)
        for n, v in enumerate(_arrow_diff(field, d.compose(x, x, y, d.identity_arrow(x), f), f)):
            left[n][((x, y), (i,))] = v
        for n, v in enumerate(_arrow_diff(field, d.compose(x, y, y, f, d.identity_arrow(y)), f)):
            right[n][((x, y), (i,))] = v

    return {
        n: (Cochain(I, I, 3, assoc[n]), Cochain(I, I, 1, left[n]), Cochain(I, I, 1, right[n]))
        for n in range(N + 1)
    }


def functor_defects(fd):
    """
    Returns:
        dict: {n: (multiplicativity C^2(F, F), units C^0(F, F))}
    """
    F, A, field, N = fd.functor, fd.functor.source, fd.field, fd.order
    mult = {n: {} for n in range(N + 1)}
    for (x, y, z), (i, j) in enumerate_chains(A, 2):
        f = constant_arrow(field, field.unit_vector(A.dim(x, y), i), N)
        g = constant_arrow(field, field.unit_vector(A.dim(y, z), j), N)
        lhs = fd.apply(x, z, fd.source.compose(x, y, z, f, g))
        rhs = fd.target.compose(F(x), F(y), F(z), fd.apply(x, y, f), fd.apply(y, z, g))
        for n, v in enumerate(_arrow_diff(field, lhs, rhs)):
            mult[n][((x, y, z), (i, j))] = v

    units = {n: {} for n in range(N + 1)}
    for x in A.objects:
        lhs = fd.apply(x, x, fd.source.identity_arrow(x))
        rhs = fd.target.identity_arrow(F(x))
        for n, v in enumerate(_arrow_diff(field, lhs, rhs)):
            units[n][((x,), ())] = v
    return {n: (Cochain(F, F, 2, mult[n]), Cochain(F, F, 0, units[n])) for n in range(N + 1)}


def nat_defects(nd):
    """
    Returns:
        dict: {n: naturality C^1(F, G)}, ν̃(F̃f, σ̃_y) - ν̃(σ̃_x, G̃f)
    """
    F, G = nd.source.functor, nd.target.functor
    A, field, N = F.source, nd.field, nd.order
    B = nd.codomain
    out = {n: {} for n in range(N + 1)}
    for (x, y), (i,) in enumerate_chains(A, 1):
        f = constant_arrow(field, field.unit_vector(A.dim(x, y), i), N)
        lhs = B.compose(F(x), F(y), G(y), nd.source.apply(x, y, f), nd.component(y))
        rhs = B.compose(F(x), G(x), G(y), nd.component(x), nd.target.apply(x, y, f))
        for n, v in enumerate(_arrow_diff(field, lhs, rhs)):
            out[n][((x, y), (i,))] = v
    return {n: Cochain(F, G, 1, out[n]) for n in range(N + 1)}


# Maurer-Cartan residuals in brace form


def mc_residual(d):
    """
    Per-order residuals, zero iff the deformation equations hold at that order

    category: δμ^{(n)} - Σ_{i,j>=1} μ^{(i)}{μ^{(j)}}
    functor:  Σ F^{(i)}{μ^{(j)}} - Σ ν^{(k)}{F^{(l)}, F^{(m)}}
    nat:      Σ ν^{(i)}{F^{(j)}, σ^{(k)}} + ν^{(i)}{σ^{(j)}, G^{(k)}}

    Returns:
        dict: {n: Cochain} for 1 <= n <= N
    """
    kind = deformation_kind(d)
    residuals = {}
    for n in range(1, d.order + 1):
        if kind == "category":
            r = coboundary(d.mu_at(n))
            for i in range(1, n):
                r = r - brace(d.mu_at(i), [d.mu_at(n - i)], d.identity, d.identity)
        elif kind == "functor":
            F = d.functor
            r = Cochain(F, F, 2)
            for i in range(n + 1):
                r = r + brace(d.map_at(i), [d.source.mu_at(n - i)], F, F)
            for k, l in product(range(n + 1), repeat=2):
                m = n - k - l
                if m >= 0:
                    r = r - brace(d.target.mu_at(k), [d.map_at(l), d.map_at(m)], F, F)
        elif kind == "nat":
            F, G = d.nat.source, d.nat.target
            nu = d.codomain
            r = Cochain(F, G, 1)
            for i, j in product(range(n + 1), repeat=2):
                k = n - i - j
                if k >= 0:
                    r = r + brace(nu.mu_at(i), [d.source.map_at(j), d.component_at(k)], F, G)
                    r = r + brace(nu.mu_at(i), [d.component_at(j), d.target.map_at(k)], F, G)
        else:
            raise DeformationError("Maurer-Cartan residuals are defined for categories, functors and natural transformations")
        residuals[n] = r
    return residuals


# Validation


def _first_failures(name, defects, describe):
    """One finding per chain: the lowest order at which it fails."""
    failed = set()
    findings = []
    for n in sorted(defects):
        for chain in sorted(defects[n].data):
            if chain not in failed:
                failed.add(chain)
                findings.append(f"{name}: {describe} fails at order {n} on {chain_label(defects[n], chain)}")
    return findings


def chain_label(cochain, chain):
    objs, idx = chain
    if not idx:
        return objs[0]
    A = cochain.category
    return "(" + ", ".join(A.basis(objs[k], objs[k + 1])[i] for k, i in enumerate(idx)) + ")"


def validate_category_deformation(d):
    findings = [f"{d.name}: base {finding}" for finding in validate_category(d.base)]
    defects = category_defects(d)
    findings += _first_failures(d.name, {n: v[0] for n, v in defects.items()}, "associativity")
    findings += _first_failures(d.name, {n: v[1] for n, v in defects.items()}, "left unit law")
    findings += _first_failures(d.name, {n: v[2] for n, v in defects.items()}, "right unit law")
    for n, r in mc_residual(d).items():
        if r != -defects[n][0]:
            findings.append(f"{d.name}: Maurer-Cartan residual disagrees with the associativity defect at order {n}")
    return findings


def validate_functor_deformation(fd):
    findings = [f"{fd.name}: base {finding}" for finding in validate_functor(fd.functor)]
    if fd.source.order != fd.order or fd.target.order != fd.order:
        findings.append(f"{fd.name}: category deformations have a different order")
        return findings
    findings += validate_category_deformation(fd.source)
    if fd.target is not fd.source:
        findings += validate_category_deformation(fd.target)
    defects = functor_defects(fd)
    findings += _first_failures(fd.name, {n: v[0] for n, v in defects.items()}, "multiplicativity")
    findings += _first_failures(fd.name, {n: v[1] for n, v in defects.items()}, "unit preservation")
    for n, r in mc_residual(fd).items():
        if r != defects[n][0]:
            findings.append(f"{fd.name}: Maurer-Cartan residual disagrees with the multiplicativity defect at order {n}")
    return findings


def validate_nat_deformation(nd, include_functors=True):
    findings = [f"{nd.name}: base {finding}" for finding in validate_naturality(nd.nat)]
    if not (
        category_deformations_equal(nd.source.source, nd.target.source)
        and category_deformations_equal(nd.source.target, nd.target.target)
    ):
        findings.append(f"{nd.name}: source and target functor deformations are over different category deformations")
        return findings
    if include_functors:
        findings += validate_functor_deformation(nd.source)
        findings += validate_functor_deformation(nd.target)
    defects = nat_defects(nd)
    findings += _first_failures(nd.name, defects, "naturality")
    for n, r in mc_residual(nd).items():
        if r != -defects[n]:
            findings.append(f"{nd.name}: Maurer-Cartan residual disagrees with the naturality defect at order {n}")
    return findings


def validate_diagram_deformation(dd):
    K = dd.label.computad
    findings = []
    for v in K.vertices:
        d = dd.vertices[v]
        if not same_category(d.base, dd.label.categories[v]) or d.order != dd.order:
            findings.append(f"{dd.name}: deformation at vertex {v} does not match the label or the order")
            continue
        findings += validate_category_deformation(d)
    for e, (dom, cod) in K.edges.items():
        fd = dd.edges[e]
        if not (
            category_deformations_equal(fd.source, dd.vertices[dom])
            and category_deformations_equal(fd.target, dd.vertices[cod])
            and functors_equal(fd.functor, dd.label.functors[e])
        ):
            findings.append(f"{dd.name}: deformation on edge {e} does not run between its vertex deformations")
            continue
        findings += _first_failures(
            fd.name, {n: v[0] for n, v in functor_defects(fd).items()}, "multiplicativity"
        )
        findings += _first_failures(fd.name, {n: v[1] for n, v in functor_defects(fd).items()}, "unit preservation")
    if findings:
        return findings
    for f in K.cells2:
        findings += validate_nat_deformation(dd.face(f), include_functors=False)
    if findings:
        return findings
    for c in K.cells3:
        dom_nd = induce_2_diagram(dd, dd.label.scheme_for(c, "dom"))
        cod_nd = induce_2_diagram(dd, dd.label.scheme_for(c, "cod"))
        for x in dom_nd.nat.source.source.objects:
            first, second = dom_nd.component(x), cod_nd.component(x)
            for n in range(dd.order + 1):
                if first[n] != second[n]:
                    findings.append(f"{dd.name}: 3-cell {c} composites differ at order {n} on {x}")
                    break
    return findings


def validate_deformation(d):
    """
    Check every deformation equation at every order on all basis tuples

    Returns:
        list: Findings, empty iff the deformation is valid
    """
    kind = deformation_kind(d)
    if kind == "category":
        return validate_category_deformation(d)
    if kind == "functor":
        return validate_functor_deformation(d)
    if kind == "nat":
        return validate_nat_deformation(d)
    return validate_diagram_deformation(d)


# Equality


def category_deformations_equal(d1, d2):
    if d1 is d2:
        return True
    return (
        same_category(d1.base, d2.base)
        and d1.order == d2.order
        and d1.mu.keys() == d2.mu.keys()
        and all(d1.mu[i] == d2.mu[i] for i in d1.mu)
        and d1.iota.keys() == d2.iota.keys()
        and all(d1.iota[i] == d2.iota[i] for i in d1.iota)
    )


def functor_deformations_equal(f1, f2):
    if f1 is f2:
        return True
    return (
        functors_equal(f1.functor, f2.functor)
        and f1.order == f2.order
        and category_deformations_equal(f1.source, f2.source)
        and category_deformations_equal(f1.target, f2.target)
        and all(f1.map_at(i) == f2.map_at(i) for i in range(1, f1.order + 1))
    )


def nat_deformations_equal(s1, s2):
    return (
        s1.order == s2.order
        and functor_deformations_equal(s1.source, s2.source)
        and functor_deformations_equal(s1.target, s2.target)
        and all(s1.component_at(i).data == s2.component_at(i).data for i in range(s1.order + 1))
    )


# Induced deformations of composites


def identity_functor_deformation(d):
    return FunctorDeformation(f"id_{d.name}", identity_functor(d.base), d, d, d.order)


def _is_trivial_identity(fd):
    return is_identity_functor(fd.functor) and not fd.maps


def compose_functor_deformations(f1, f2):
    """Φ^{(n)}(f) = Σ_{j+k=n} G^{(j)}(F^{(k)}(f)) for the composite F;G."""
    if not category_deformations_equal(f1.target, f2.source):
        raise CompositionError(f"Cannot compose {f1.name} with {f2.name}: the middle deformations differ")
    if _is_trivial_identity(f2):
        return f1
    if _is_trivial_identity(f1):
        return f2
    F, G = f1.functor, f2.functor
    FG = compose_functors(F, G)
    A = F.source
    N = min(f1.order, f2.order)
    maps = {}
    for n in range(1, N + 1):
        data = {}
        for (x, y), (i,) in enumerate_chains(A, 1):
            acc = list(FG.target.field.zero_vector(FG.target.dim(FG(x), FG(y))))
            for k in range(n + 1):
                Fk = f1.map_at(k).value(((x, y), (i,)))
                if f1.field.vector_is_zero(Fk):
                    continue
                _add_into(acc, evaluate(f2.map_at(n - k), (F(x), F(y)), [Fk]))
            data[((x, y), (i,))] = tuple(acc)
        maps[n] = Cochain(FG, FG, 1, data)
    return FunctorDeformation(f"{f1.name};{f2.name}", FG, f1.source, f2.target, N, maps)


def induce_path(dd, path):
    """Induced deformation of the composite functor along a path of the diagram."""
    if not path.edges:
        return identity_functor_deformation(dd.vertices[path.start])
    result = dd.edges[path.edges[0]]
    for e in path.edges[1:]:
        result = compose_functor_deformations(result, dd.edges[e])
    return result


def whisker_left_deformation(kd, sd):
    """(K̃σ̃)^{(i)}_x = σ^{(i)}_{K(x)}."""
    K = kd.functor
    nat = whisker_left(K, sd.nat)
    components = {}
    for i in range(1, sd.order + 1):
        comp = sd.component_at(i)
        components[i] = Cochain(nat.source, nat.target, 0, {((x,), ()): comp.value(((K(x),), ())) for x in K.source.objects})
    return NatDeformation(
        nat.name,
        nat,
        compose_functor_deformations(kd, sd.source),
        compose_functor_deformations(kd, sd.target),
        sd.order,
        components,
    )


def whisker_right_deformation(sd, hd):
    """(σ̃H̃)^{(n)}_x = Σ_{j+k=n} H^{(j)}(σ^{(k)}_x)."""
    F, G = sd.nat.source, sd.nat.target
    nat = whisker_right(sd.nat, hd.functor)
    field = sd.field
    N = sd.order
    components = {}
    for x in F.source.objects:
        image = hd.apply(F(x), G(x), sd.component(x))
        for n in range(1, N + 1):
            components.setdefault(n, {})[((x,), ())] = image[n]
    return NatDeformation(
        nat.name,
        nat,
        compose_functor_deformations(sd.source, hd),
        compose_functor_deformations(sd.target, hd),
        N,
        {n: Cochain(nat.source, nat.target, 0, data) for n, data in components.items()},
    )


def vertical_compose_deformations(sd, td):
    """(σ̃·τ̃)_x = ν̃(σ̃_x, τ̃_x)."""
    if not functor_deformations_equal(sd.target, td.source):
        raise CompositionError(f"Cannot compose {sd.name} with {td.name}: boundary deformations differ")
    nat = vertical_compose_nats(sd.nat, td.nat)
    F, G, H = sd.nat.source, sd.nat.target, td.nat.target
    nu = sd.codomain
    components = {}
    for x in F.source.objects:
        c = nu.compose(F(x), G(x), H(x), sd.component(x), td.component(x))
        for n in range(1, sd.order + 1):
            components.setdefault(n, {})[((x,), ())] = c[n]
    return NatDeformation(
        nat.name,
        nat,
        sd.source,
        td.target,
        sd.order,
        {n: Cochain(nat.source, nat.target, 0, data) for n, data in components.items()},
    )


def identity_nat_deformation(fd):
    """Identity components ι̃_{F(x)} of the target category deformation."""
    F = fd.functor
    nat = identity_nat(F)
    components = {}
    for n in range(1, fd.order + 1):
        components[n] = Cochain(
            F, F, 0, {((x,), ()): fd.target.iota_at(n).value(((F(x),), ())) for x in F.source.objects}
        )
    return NatDeformation(nat.name, nat, fd, fd, fd.order, components)


def induce_step(dd, step):
    sd = dd.face(step.cell)
    left = whisker_left_deformation(induce_path(dd, step.prefix), sd)
    return whisker_right_deformation(left, induce_path(dd, step.suffix))


def induce_2_diagram(dd, scheme, sequentialization=None):
    """Right-nested vertical composite W̃_1(W̃_2(..W̃_m)) of the whiskered steps."""
    seq = sequentialization or sequentialize(scheme)
    if not seq.steps:
        return identity_nat_deformation(induce_path(dd, scheme.source))
    steps = [induce_step(dd, step) for step in seq.steps]
    result = steps[-1]
    for sd in reversed(steps[:-1]):
        result = vertical_compose_deformations(sd, result)
    return result


def induce_composite(shape, *parts, sequentialization=None):
    """
    Induced deformation of a composite

    Args:
        shape (str): "path" (dd, path), "functors" (F̃, G̃), "whisker_left" (K̃, σ̃),
            "whisker_right" (σ̃, H̃), "vertical" (σ̃, τ̃) or "diagram" (dd, scheme)
    """
    if shape == "path":
        return induce_path(*parts)
    if shape == "functors":
        return compose_functor_deformations(*parts)
    if shape == "whisker_left":
        return whisker_left_deformation(*parts)
    if shape == "whisker_right":
        return whisker_right_deformation(*parts)
    if shape == "vertical":
        return vertical_compose_deformations(*parts)
    if shape == "diagram":
        return induce_2_diagram(*parts, sequentialization=sequentialization)
    raise DeformationError(f"Unknown composite shape '{shape}'")


# Realization over the truncated ring


def realize(d):
    """
    The deformed category over k[ε]/(ε^{N+1}) as a k-linear category

    Basis arrows are b.e<i> for each basis arrow b and 0 <= i <= N.

    Raises:
        DeformationError: The identities are deformed
    """
    if not d.is_unit_trivial():
        raise DeformationError(f"{d.name}: realize needs undeformed identities; run normalize-units first")
    C, N = d.base, d.order
    hom_basis = {
        (x, y): [f"{b}.e{i}" for i in range(N + 1) for b in C.basis(x, y)]
        for x in C.objects
        for y in C.objects
    }
    identities = {x: f"{C.identity_id(x)}.e0" for x in C.objects}
    products = {}
    for (x, y, z), (i, j) in enumerate_chains(C, 2):
        b, c = C.basis(x, y)[i], C.basis(y, z)[j]
        for p, q in product(range(N + 1), repeat=2):
            value = {}
            for k in range(N + 1 - p - q):
                for t, coef in enumerate(d.mu_at(k).value(((x, y, z), (i, j)))):
                    if coef != d.field.zero:
                        key = f"{C.basis(x, z)[t]}.e{p + q + k}"
                        value[key] = value.get(key, d.field.zero) + coef
            products[(f"{b}.e{p}", f"{c}.e{q}")] = value
    return LinCategory(f"{C.name}[eps^{N + 1}]", C.field, C.objects, hom_basis, identities, products, fill_identities=False)


# Equivalence equations at full order


def check_category_equivalence(d1, d2, witness):
    """
    witness: FunctorDeformation of the identity functor from d1 to d2

    Returns:
        list: Findings, empty iff the witness is an equivalence d1 -> d2
    """
    findings = []
    if not is_identity_functor(witness.functor):
        findings.append("equivalence witness must deform the identity functor")
    if not (category_deformations_equal(witness.source, d1) and category_deformations_equal(witness.target, d2)):
        findings.append("equivalence witness does not run from the first to the second deformation")
    if findings:
        return findings
    return validate_functor_deformation(witness)


def check_functor_weak_equivalence(f1, f2, gamma, delta, phi):
    """
    Witness: Γ: Ã1 -> Ã2, Δ: B̃1 -> B̃2 and φ: F̃1;Δ => Γ;F̃2

    Returns:
        list: Findings, empty iff the witness satisfies every equation
    """
    findings = check_category_equivalence(f1.source, f2.source, gamma)
    findings += check_category_equivalence(f1.target, f2.target, delta)
    if findings:
        return findings
    if not (
        functor_deformations_equal(phi.source, compose_functor_deformations(f1, delta))
        and functor_deformations_equal(phi.target, compose_functor_deformations(gamma, f2))
    ):
        return ["φ does not run from F̃1;Δ to Γ;F̃2"]
    return validate_nat_deformation(phi, include_functors=False)


def check_nat_weak_equivalence(s1, s2, gamma, delta, phi, psi):
    """
    Witness: Γ, Δ, φ: F̃1;Δ => Γ;F̃2 and ψ: G̃1;Δ => Γ;G̃2 with Δ(σ̃1) ψ = φ σ̃2

    Returns:
        list: Findings, empty iff the witness satisfies every equation
    """
    findings = check_functor_weak_equivalence(s1.source, s2.source, gamma, delta, phi)
    findings += check_functor_weak_equivalence(s1.target, s2.target, gamma, delta, psi)
    if findings:
        return findings
    F, G = s1.nat.source, s1.nat.target
    nu = s2.codomain
    for x in F.source.objects:
        transported = delta.apply(F(x), G(x), s1.component(x))
        lhs = nu.compose(F(x), G(x), G(x), transported, psi.component(x))
        rhs = nu.compose(F(x), F(x), G(x), phi.component(x), s2.component(x))
        for n in range(s1.order + 1):
            if lhs[n] != rhs[n]:
                findings.append(f"transported square fails at order {n} on {x}")
                break
    return findings


def truncate(d, order):
    """Drop every coefficient above the given order."""
    if order > d.order:
        raise DeformationError(f"{d!r} has no coefficients above order {d.order} to truncate to {order}")
    return d.with_order(order)


def padded(d, order):
    """Raise the order, with zero coefficients in the new orders."""
    if order < d.order:
        raise DeformationError(f"{d!r} already has order {d.order}")
    return d.with_order(order)


def trivial_deformation(kind, subject, order=0, name=None):
    """
    The deformation with every higher coefficient zero

    Args:
        kind (str): category, functor, nat or diagram
        subject: LinCategory, LinFunctor, NatTransf or DiagramLabel
    """
    name = name or f"trivial_{subject.name}"
    if kind == "category":
        return CategoryDeformation(name, subject, order)
    if kind == "functor":
        return FunctorDeformation(
            name,
            subject,
            CategoryDeformation(f"{name}.src", subject.source, order),
            CategoryDeformation(f"{name}.tgt", subject.target, order),
            order,
        )
    if kind == "nat":
        A = CategoryDeformation(f"{name}.src", subject.source.source, order)
        B = CategoryDeformation(f"{name}.tgt", subject.source.target, order)
        return NatDeformation(
            name,
            subject,
            FunctorDeformation(f"{name}.F", subject.source, A, B, order),
            FunctorDeformation(f"{name}.G", subject.target, A, B, order),
            order,
        )
    if kind == "diagram":
        K = subject.computad
        vertices = {v: CategoryDeformation(f"{name}.{v}", subject.categories[v], order) for v in K.vertices}
        edges = {
            e: FunctorDeformation(f"{name}.{e}", subject.functors[e], vertices[dom], vertices[cod], order)
            for e, (dom, cod) in K.edges.items()
        }
        return DiagramDeformation(name, subject, order, vertices, edges)
    raise DeformationError(f"No deformations of kind '{kind}'")
