"""
Replacing deformed identities by the undeformed ones

A category deformation with identities ι̃ is equivalent to one with
identities 1_x: with κ̃ the solution of κ̃_x 1_x = ι̃_x, the composition
f ⋆' g = (f κ̃) g has unit 1_x, and g -> 1 g is an equivalence from the
old deformation to the new one.
"""

from pasting_deformations.engine.deform import (
    CategoryDeformation,
    FunctorDeformation,
    NatDeformation,
    check_category_equivalence,
    check_functor_weak_equivalence,
    check_nat_weak_equivalence,
    compose_functor_deformations,
    constant_arrow,
    deformation_kind,
    identity_functor_deformation,
    validate_deformation,
)
from pasting_deformations.engine.errors import DeformationError
from pasting_deformations.engine.hochschild import Cochain, enumerate_chains, evaluate
from pasting_deformations.engine.lincat import identity_nat


def unit_inverse(d):
    """
    κ̃ with κ^{(0)} = 1 and κ^{(n)} = ι^{(n)} - Σ_{i>=1} μ^{(i)}(κ^{(n-i)}, 1)

    Returns:
        dict: {object: truncated arrow}
    """
    C, field = d.base, d.field
    kappa = {}
    for x in C.objects:
        one = C.identity_vector(x)
        coefficients = [one]
        for n in range(1, d.order + 1):
            value = d.iota_at(n).value(((x,), ()))
            for i in range(1, n + 1):
                value = field.sub(value, evaluate(d.mu_at(i), (x, x, x), [coefficients[n - i], one]))
            coefficients.append(value)
        kappa[x] = tuple(coefficients)
    return kappa


def _normalize_category(d):
    C, field, N = d.base, d.field, d.order
    I = d.identity
    kappa = unit_inverse(d)
    mu = {n: {} for n in range(1, N + 1)}
    for (x, y, z), (i, j) in enumerate_chains(C, 2):
        f = constant_arrow(field, field.unit_vector(C.dim(x, y), i), N)
        g = constant_arrow(field, field.unit_vector(C.dim(y, z), j), N)
        product = d.compose(x, y, z, d.compose(x, y, y, f, kappa[y]), g)
        for n in range(1, N + 1):
            mu[n][((x, y, z), (i, j))] = product[n]
    normalized = CategoryDeformation(
        d.name, C, N, {n: Cochain(I, I, 2, data) for n, data in mu.items()}
    )

    witness = {n: {} for n in range(1, N + 1)}
    for (x, y), (j,) in enumerate_chains(C, 1):
        g = field.unit_vector(C.dim(x, y), j)
        for n in range(1, N + 1):
            witness[n][((x, y), (j,))] = evaluate(d.mu_at(n), (x, x, y), [C.identity_vector(x), g])
    psi = FunctorDeformation(
        f"{d.name}->{d.name}'",
        I,
        d,
        normalized,
        N,
        {n: Cochain(I, I, 1, data) for n, data in witness.items()},
    )
    return normalized, psi, kappa


def _normalize_functor(fd, A, B, psi_a, psi_b, kappa_a):
    F = fd.functor
    src, field, N = F.source, fd.field, fd.order
    maps = {n: {} for n in range(1, N + 1)}
    for (x, y), (i,) in enumerate_chains(src, 1):
        f = constant_arrow(field, field.unit_vector(src.dim(x, y), i), N)
        shifted = fd.apply(x, y, fd.source.compose(x, x, y, kappa_a[x], f))
        one = constant_arrow(field, fd.target.base.identity_vector(F(x)), N)
        image = fd.target.compose(F(x), F(x), F(y), one, shifted)
        for n in range(1, N + 1):
            maps[n][((x, y), (i,))] = image[n]
    normalized = FunctorDeformation(
        fd.name, F, A, B, N, {n: Cochain(F, F, 1, data) for n, data in maps.items()}
    )
    phi = NatDeformation(
        f"1_{F.name}",
        identity_nat(F),
        compose_functor_deformations(fd, psi_b),
        compose_functor_deformations(psi_a, normalized),
        N,
    )
    return normalized, phi


def normalize_units(d):
    """
    An equivalent deformation with undeformed identities, plus the equivalence

    Returns:
        tuple: (normalized deformation, witness); the witness is (Ψ,) for a
            category, (Γ, Δ, φ) for a functor and (Γ, Δ, φ, ψ) for a natural
            transformation, each checked against the full equivalence equations
    """
    kind = deformation_kind(d)
    if kind == "diagram":
        raise DeformationError("normalize-units applies to category, functor and nat deformations")
    findings = validate_deformation(d)
    if findings:
        raise DeformationError(f"{d.name} is not a valid deformation", findings)

    if kind == "category":
        if d.is_unit_trivial():
            return d, (identity_functor_deformation(d),)
        normalized, psi, _ = _normalize_category(d)
        findings = check_category_equivalence(d, normalized, psi)
        if findings:
            raise DeformationError("Unit normalization produced an invalid equivalence", findings)
        return normalized, (psi,)

    functor_d = d if kind == "functor" else d.source
    A, psi_a, kappa_a = _normalize_category(functor_d.source)
    B, psi_b, _ = _normalize_category(functor_d.target)

    if kind == "functor":
        normalized, phi = _normalize_functor(d, A, B, psi_a, psi_b, kappa_a)
        findings = check_functor_weak_equivalence(d, normalized, psi_a, psi_b, phi)
        if findings:
            raise DeformationError("Unit normalization produced an invalid weak equivalence", findings)
        return normalized, (psi_a, psi_b, phi)

    F_new, phi = _normalize_functor(d.source, A, B, psi_a, psi_b, kappa_a)
    G_new, psi = _normalize_functor(d.target, A, B, psi_a, psi_b, kappa_a)
    F, G = d.nat.source, d.nat.target
    field, N = d.field, d.order
    components = {n: {} for n in range(1, N + 1)}
    for x in F.source.objects:
        one = constant_arrow(field, B.base.identity_vector(F(x)), N)
        image = d.codomain.compose(F(x), F(x), G(x), one, d.component(x))
        for n in range(1, N + 1):
            components[n][((x,), ())] = image[n]
    normalized = NatDeformation(
        d.name, d.nat, F_new, G_new, N, {n: Cochain(F, G, 0, data) for n, data in components.items()}
    )
    findings = check_nat_weak_equivalence(d, normalized, psi_a, psi_b, phi, psi)
    if findings:
        raise DeformationError("Unit normalization produced an invalid weak equivalence", findings)
    return normalized, (psi_a, psi_b, phi, psi)
