"""
Obstructions, order-by-order extension and first-order classification

The order-n coefficients of a deformation are encoded as one vector of its
deformation complex; the deformation equations at order n then read d x = Ω,
where Ω is the order-n defect computed with the order-n unknowns set to zero.
"""

import logging

from pasting_deformations.engine.defcomplex import build_complex, cohomology_dim, cohomology_representatives
from pasting_deformations.engine.deform import (
    CategoryDeformation,
    DiagramDeformation,
    FunctorDeformation,
    NatDeformation,
    category_defects,
    check_category_equivalence,
    check_functor_weak_equivalence,
    check_nat_weak_equivalence,
    compose_functor_deformations,
    deformation_kind,
    functor_defects,
    induce_2_diagram,
    nat_defects,
    trivial_deformation,
    validate_deformation,
)
from pasting_deformations.engine.errors import DeformationError
from pasting_deformations.engine.exactlinalg import class_coordinates, matrix_entries, matrix_times_vector, solve_linear
from pasting_deformations.engine.hochschild import Cochain, CochainSpace, delta_matrix
from pasting_deformations.engine.lincat import functors_equal, identity_nat, nats_equal, same_category

logger = logging.getLogger(__name__)

# Complex degree holding the order-n unknowns; obstructions live one above
UNKNOWN_DEGREE = {"category": 2, "functor": 1, "nat": 0, "diagram": -1}


def deformation_subject(d):
    kind = deformation_kind(d)
    if kind == "category":
        return d.base
    if kind == "functor":
        return d.functor
    if kind == "nat":
        return d.nat
    return d.label


def _check_units(d):
    kind = deformation_kind(d)
    if kind == "category":
        parts = [d]
    elif kind == "functor":
        parts = [d.source, d.target]
    elif kind == "nat":
        parts = [d.source.source, d.source.target]
    else:
        parts = list(d.vertices.values())
    for part in parts:
        if not part.is_unit_trivial():
            raise DeformationError(
                f"{part.name} has deformed identities; run normalize-units first",
                [f"{part.name}: ι^{{({i})}} is nonzero" for i in sorted(part.iota)],
            )


def encode_order(d, n):
    """
    Order-n coefficients as summand cochains of the deformation complex

    category -μ; functor (-μ, -ν, F); nat (-μ, -ν, -F, -G, -σ);
    diagram (-μ_v, F_e, σ_f, 0).
    """
    kind = deformation_kind(d)
    if kind == "category":
        return {"A": -d.mu_at(n)}
    if kind == "functor":
        return {"A": -d.source.mu_at(n), "B": -d.target.mu_at(n), "F": d.map_at(n)}
    if kind == "nat":
        return {
            "A": -d.source.source.mu_at(n),
            "B": -d.source.target.mu_at(n),
            "F": -d.source.map_at(n),
            "G": -d.target.map_at(n),
            "σ": -d.component_at(n),
        }
    parts = {f"vertex:{v}": -vd.mu_at(n) for v, vd in d.vertices.items()}
    parts.update({f"edge:{e}": fd.map_at(n) for e, fd in d.edges.items()})
    for f in d.label.computad.cells2:
        parts[f"face:{f}"] = d.face(f).component_at(n)
    return parts


def decode_order(d, n, parts):
    """
    Inverse of encode_order: d (valid through n - 1) extended by order-n coefficients

    Returns:
        Deformation of order n
    """
    kind = deformation_kind(d)
    base = d.with_order(n - 1)
    if kind == "category":
        return _extend_category(base, n, parts["A"])
    if kind == "functor":
        A = _extend_category(base.source, n, parts["A"])
        B = _extend_category(base.target, n, parts["B"])
        return _extend_functor(base, n, parts["F"], A, B)
    if kind == "nat":
        A = _extend_category(base.source.source, n, parts["A"])
        B = _extend_category(base.source.target, n, parts["B"])
        F = _extend_functor(base.source, n, -parts["F"], A, B)
        G = _extend_functor(base.target, n, -parts["G"], A, B)
        components = dict(base.components)
        components[n] = -parts["σ"]
        return NatDeformation(base.name, base.nat, F, G, n, components)

    K = d.label.computad
    vertices = {v: _extend_category(vd, n, parts[f"vertex:{v}"]) for v, vd in base.vertices.items()}
    edges = {}
    for e, fd in base.edges.items():
        dom, cod = K.edges[e]
        edges[e] = _extend_functor(fd, n, parts[f"edge:{e}"], vertices[dom], vertices[cod])
    faces = {}
    for f in K.cells2:
        comps = dict(base.faces[f])
        comps[n] = parts[f"face:{f}"]
        faces[f] = comps
    return DiagramDeformation(base.name, base.label, n, vertices, edges, faces)


def _extend_category(cd, n, encoded):
    mu = dict(cd.mu)
    mu[n] = -encoded
    return CategoryDeformation(cd.name, cd.base, n, mu, cd.iota)


def _extend_functor(fd, n, map_, source, target):
    maps = dict(fd.maps)
    maps[n] = map_
    return FunctorDeformation(fd.name, fd.functor, source, target, n, maps)


class Obstruction:
    """
    The order-n obstruction of a deformation valid through order n - 1

    Attributes:
        complex (AssembledComplex): The deformation complex
        degree (int): Complex degree of the obstruction
        parts (dict): {summand key: Cochain}
        vector (tuple): Flattened obstruction
    """

    def __init__(self, deformation, order, complex_, degree, parts, vector):
        self.deformation = deformation
        self.order = order
        self.complex = complex_
        self.degree = degree
        self.parts = parts
        self.vector = vector
        self._coordinates = None

    def is_zero(self):
        return all(c == self.complex.field.zero for c in self.vector)

    def nonzero_summands(self):
        return sorted(key for key, cochain in self.parts.items() if not cochain.is_zero())

    def class_coordinates(self):
        """Coordinates of the obstruction class against representative cocycles of H^degree."""
        if self._coordinates is None:
            reps, coboundaries = cohomology_representatives(self.complex, self.degree)
            self._coordinates = class_coordinates(self.vector, coboundaries, reps, self.complex.field.domain)
        return self._coordinates

    def table(self):
        rows = []
        for key in sorted(self.parts):
            for objs, ids, target, value in self.parts[key].entries():
                rows.append((key, " ".join(objs), " ".join(ids), target, value))
        return rows


def _complex_for(d, config):
    kind = deformation_kind(d)
    return build_complex(kind, deformation_subject(d), config=config)


def _require_valid(d, n):
    if d.order < n - 1:
        raise DeformationError(f"{d.name} has order {d.order}; order {n - 1} is needed before order {n}")
    findings = validate_deformation(d.with_order(n - 1))
    if findings:
        raise DeformationError(f"{d.name} is not valid through order {n - 1}", findings)


def _defect_parts(d, n, X):
    """Order-n defects of d, whose order-n coefficients are zero."""
    kind = deformation_kind(d)
    if kind == "category":
        return {"A": -category_defects(d)[n][0]}
    if kind == "functor":
        return {
            "A": category_defects(d.source)[n][0],
            "B": category_defects(d.target)[n][0],
            "F": functor_defects(d)[n][0],
        }
    if kind == "nat":
        return {
            "A": -category_defects(d.source.source)[n][0],
            "B": -category_defects(d.source.target)[n][0],
            "F": functor_defects(d.source)[n][0],
            "G": functor_defects(d.target)[n][0],
            "σ": nat_defects(d)[n],
        }

    K = d.label.computad
    parts = {f"vertex:{v}": category_defects(vd)[n][0] for v, vd in d.vertices.items()}
    parts.update({f"edge:{e}": functor_defects(fd)[n][0] for e, fd in d.edges.items()})
    for f in K.cells2:
        parts[f"face:{f}"] = nat_defects(d.face(f))[n]
    spaces = {s.key: s.space for s in X.groups[0]}
    for c in K.cells3:
        space = spaces[f"cell:{c}"]
        dom = induce_2_diagram(d, d.label.scheme_for(c, "dom"))
        cod = induce_2_diagram(d, d.label.scheme_for(c, "cod"))
        data = {}
        for x in space.source.source.objects:
            data[((x,), ())] = d.field.sub(cod.component(x)[n], dom.component(x)[n])
        parts[f"cell:{c}"] = Cochain(space.source, space.target, 0, data)
    return parts


def obstruction(d, n, config=None, complex_=None):
    """
    The order-n obstruction cocycle of a deformation valid through order n - 1

    Closedness dΩ = 0 is checked exactly against the assembled differential.

    Args:
        d: Category, functor, nat or diagram deformation
        n (int): Order to be added, n >= 1
        config (dict): Engine configuration
        complex_ (AssembledComplex): Reuse an already assembled complex

    Returns:
        Obstruction: The cocycle and its complex
    """
    if n < 1:
        raise DeformationError(f"Obstructions start at order 1, got {n}")
    _require_valid(d, n)
    _check_units(d)
    X = complex_ or _complex_for(d, config)
    kind = deformation_kind(d)
    degree = UNKNOWN_DEGREE[kind] + 1
    padded_d = d.with_order(n - 1).with_order(n)
    parts = _defect_parts(padded_d, n, X)
    for key, cochain in parts.items():
        if not cochain.is_normalized():
            raise DeformationError(f"Obstruction summand {key} is not normalized; the coefficients must vanish on identities")
    vector = X.encode(degree, parts)
    closed = matrix_times_vector(X.differential(degree), vector)
    if any(c != X.field.zero for c in closed):
        raise DeformationError(f"Obstruction of {d.name} at order {n} is not closed")
    omega = Obstruction(d, n, X, degree, parts, vector)
    logger.info("Obstruction of %s at order %s: %s", d.name, n, "zero" if omega.is_zero() else "nonzero")
    return omega


def obstruction_diagram(dd, n, config=None):
    if deformation_kind(dd) != "diagram":
        raise DeformationError(f"{dd.name} is not a diagram deformation")
    return obstruction(dd, n, config)


def extend_order(d, n=None, config=None):
    """
    Extend a deformation valid through order n - 1 to order n

    Solves d x = Ω in the deformation complex; the solution with free
    coordinates zero is decoded into the order-n coefficients.

    Returns:
        tuple: (extended deformation or None, Obstruction)
    """
    n = n if n is not None else d.order + 1
    omega = obstruction(d, n, config)
    X = omega.complex
    x = solve_linear(X.differential(omega.degree - 1), omega.vector)
    if x is None:
        coordinates = omega.class_coordinates()
        logger.info("Extension of %s to order %s is obstructed: class %s", d.name, n, coordinates)
        return None, omega
    extended = decode_order(d, n, X.decode(omega.degree - 1, x))
    findings = validate_deformation(extended)
    if findings:
        raise DeformationError(f"Extension of {d.name} to order {n} failed re-validation", findings)
    return extended, omega


class Classification:
    """
    First-order deformations up to equivalence

    Attributes:
        dimension (int): dim H in the classifying degree
        representatives (list): Representative cocycle vectors
        deformations (list): The representatives decoded as first-order deformations
    """

    def __init__(self, kind, subject, degree, dimension, representatives, deformations):
        self.kind = kind
        self.subject = subject
        self.degree = degree
        self.dimension = dimension
        self.representatives = representatives
        self.deformations = deformations


def classify_first_order(subject, kind, config=None, complex_=None):
    """
    Cohomology in the classifying degree: H^2 for categories, H^1 for functors,
    H^0 for natural transformations, H^-1 for diagrams

    Returns:
        Classification: Dimension, representatives and decoded deformations
    """
    if kind not in UNKNOWN_DEGREE:
        raise DeformationError(f"No first-order classification for kind '{kind}'")
    X = complex_ or build_complex(kind, subject, config=config)
    degree = UNKNOWN_DEGREE[kind]
    dimension = cohomology_dim(X, degree)
    reps, _ = cohomology_representatives(X, degree)
    base = trivial_deformation(kind, subject, 0, f"{subject.name}_class")
    deformations = []
    for k, rep in enumerate(reps):
        d = decode_order(base, 1, X.decode(degree, rep))
        d.name = f"{subject.name}_class{k + 1}"
        deformations.append(d)
    return Classification(kind, subject, degree, dimension, reps, deformations)


# First-order equivalence


def _check_first_order_pair(d1, d2):
    kind = deformation_kind(d1)
    if deformation_kind(d2) != kind:
        raise DeformationError(f"Cannot compare a {kind} deformation with a {deformation_kind(d2)} deformation")
    if d1.order != 1 or d2.order != 1:
        raise DeformationError("First-order equivalence needs two deformations of order 1")
    s1, s2 = deformation_subject(d1), deformation_subject(d2)
    if kind == "category":
        same = same_category(s1, s2)
    elif kind == "functor":
        same = functors_equal(s1, s2)
    else:
        same = nats_equal(s1, s2) if kind == "nat" else s1 is s2
    if not same:
        raise DeformationError(f"{d1.name} and {d2.name} deform different bases")
    return kind


def _category_witness(d1, d2):
    """Solve δΦ¹ = μ₁¹ - μ₂¹ with Φ¹(1_x) = ι₂¹ - ι₁¹ on unnormalized cochains."""
    C, I = d1.base, d1.identity
    field = C.field
    source = CochainSpace(I, I, 1, False)
    target = CochainSpace(I, I, 2, False)
    D = delta_matrix(I, I, 1, normalized=False)
    entries = {}
    for r, row in matrix_entries(D).items():
        entries[r] = dict(row)
    rhs = list(target.to_vector(d1.mu_at(1) - d2.mu_at(1)))
    row = target.dim
    for x in C.objects:
        chain = ((x, x), (C.identity_index(x),))
        offset = source.offsets[chain]
        wanted = field.sub(d2.iota_at(1).value(((x,), ())), d1.iota_at(1).value(((x,), ())))
        for t in range(source.dims[chain]):
            entries[row] = {offset + t: field.one}
            rhs.append(wanted[t])
            row += 1
    M = field.matrix(entries, row, source.dim)
    x = solve_linear(M, rhs)
    if x is None:
        return None
    return FunctorDeformation(f"{d1.name}~{d2.name}", I, d1, d2, 1, {1: source.from_vector(x)})


def _solve_difference(d1, d2, config):
    kind = deformation_kind(d1)
    X = build_complex(kind, deformation_subject(d1), config=config)
    degree = UNKNOWN_DEGREE[kind]
    difference = tuple(
        a - b for a, b in zip(X.encode(degree, encode_order(d1, 1)), X.encode(degree, encode_order(d2, 1)))
    )
    z = solve_linear(X.differential(degree - 1), difference)
    if z is None:
        return None
    return X.decode(degree - 1, z)


def _identity_witness(name, cd1, cd2, cochain):
    return FunctorDeformation(name, cd1.identity, cd1, cd2, 1, {1: cochain})


def check_equivalence_first_order(d1, d2, config=None):
    """
    Find an equivalence between two first-order deformations of the same base

    category: Φ with δΦ¹ = μ₁ - μ₂ (deformed identities allowed);
    functor: (Γ, Δ, φ) from d^0 z = enc₁ - enc₂ with Γ = a, Δ = b, φ = -c;
    nat: (Γ, Δ, φ, ψ) from d^-1 z = enc₁ - enc₂, all four negated.

    Returns:
        tuple or None: The witness, verified against the full equivalence equations
    """
    kind = _check_first_order_pair(d1, d2)
    if kind == "diagram":
        raise DeformationError(
            "Diagram deformations are compared by cohomology class only; use same_first_order_class"
        )
    if kind == "category":
        witness = _category_witness(d1, d2)
        if witness is None:
            return None
        findings = check_category_equivalence(d1, d2, witness)
        if findings:
            raise DeformationError("Constructed equivalence fails its own equations", findings)
        return (witness,)

    _check_units(d1)
    _check_units(d2)
    z = _solve_difference(d1, d2, config)
    if z is None:
        return None

    if kind == "functor":
        gamma = _identity_witness("Γ", d1.source, d2.source, z["A"])
        delta = _identity_witness("Δ", d1.target, d2.target, z["B"])
        F = d1.functor
        phi = NatDeformation(
            "φ",
            identity_nat(F),
            compose_functor_deformations(d1, delta),
            compose_functor_deformations(gamma, d2),
            1,
            {1: -z["F"]},
        )
        findings = check_functor_weak_equivalence(d1, d2, gamma, delta, phi)
        if findings:
            raise DeformationError("Constructed weak equivalence fails its own equations", findings)
        return gamma, delta, phi

    gamma = _identity_witness("Γ", d1.source.source, d2.source.source, -z["A"])
    delta = _identity_witness("Δ", d1.source.target, d2.source.target, -z["B"])
    phi = NatDeformation(
        "φ",
        identity_nat(d1.nat.source),
        compose_functor_deformations(d1.source, delta),
        compose_functor_deformations(gamma, d2.source),
        1,
        {1: -z["F"]},
    )
    psi = NatDeformation(
        "ψ",
        identity_nat(d1.nat.target),
        compose_functor_deformations(d1.target, delta),
        compose_functor_deformations(gamma, d2.target),
        1,
        {1: -z["G"]},
    )
    findings = check_nat_weak_equivalence(d1, d2, gamma, delta, phi, psi)
    if findings:
        raise DeformationError("Constructed weak equivalence fails its own equations", findings)
    return gamma, delta, phi, psi


def same_first_order_class(dd1, dd2, config=None):
    """Whether two first-order diagram deformations have cohomologous cocycles."""
    _check_first_order_pair(dd1, dd2)
    _check_units(dd1)
    _check_units(dd2)
    return _solve_difference(dd1, dd2, config) is not None
