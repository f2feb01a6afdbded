"""
Deformation complexes as explicit finite complexes

Every complex is a graded object whose degree-n group is a list of keyed
summands, each a space of Hochschild cochains, with the differential given
blockwise. Complexes of functors, natural transformations and diagrams are
built as iterated mapping cones

    cone(u: X -> Y)^n = X^{n+1} ⊕ Y^n,    d(x, y) = (-d_X x, -u(x) + d_Y y)

and flattened over a degree window into one sparse matrix per degree.
"""

import logging

from pasting_deformations.config.engine_settings import get_complex_config, get_window_config
from pasting_deformations.engine.computad import Path, compose_path, sequentialize, step_whiskering
from pasting_deformations.engine.errors import DegreeCapError, ValidationError, WindowError
from pasting_deformations.engine.exactlinalg import (
    complement_basis,
    dense_rows,
    is_zero_matrix,
    kernel_basis,
    matrix_entries,
    matrix_product,
    rank,
)
from pasting_deformations.engine.hochschild import (
    SIGMA_DAGGER_SIGNS,
    CochainSpace,
    brace_fixed_matrix,
    compose_context,
    cup,
    cochain_from_nat,
    delta_matrix,
    postcompose_matrix,
    precompose_matrix,
    pullback,
    pullback_matrix,
    pushforward,
    pushforward_matrix,
)
from pasting_deformations.engine.lincat import identity_functor, vertical_compose_nats
from pasting_deformations.engine.utils import log_complex_build

logger = logging.getLogger(__name__)


class Summand:
    def __init__(self, key, space):
        self.key = key
        self.space = space

    @property
    def degree(self):
        return self.space.degree

    @property
    def dim(self):
        return self.space.dim

    @property
    def label(self):
        return f"{self.key}: C^{self.space.degree}({self.space.source.name}, {self.space.target.name})"


def _add_block(blocks, key, matrix):
    if key in blocks:
        blocks[key] = blocks[key] + matrix
    else:
        blocks[key] = matrix


class HochschildComplex:
    """C^{n+shift}(F, G) as a one-summand complex."""

    def __init__(self, key, source, target, shift=0, normalized=True):
        self.key = key
        self.source = source
        self.target = target
        self.shift = shift
        self.normalized = normalized
        self._spaces = {}

    def space(self, n):
        if n not in self._spaces:
            self._spaces[n] = CochainSpace(self.source, self.target, n + self.shift, self.normalized)
        return self._spaces[n]

    def summands(self, n):
        return [Summand(self.key, self.space(n))]

    def differential(self, n):
        if n + self.shift < 0:
            return {}
        return {(self.key, self.key): delta_matrix(self.source, self.target, n + self.shift, self.normalized)}


class DirectSum:
    def __init__(self, parts):
        self.parts = list(parts)

    def summands(self, n):
        return [s for part in self.parts for s in part.summands(n)]

    def differential(self, n):
        blocks = {}
        for part in self.parts:
            blocks.update(part.differential(n))
        return blocks


class ChainMap:
    """
    A degree-preserving map given blockwise

    Args:
        blocks (callable): n -> {(target key, source key): matrix}
    """

    def __init__(self, blocks):
        self._blocks = blocks
        self._cache = {}

    def blocks(self, n):
        if n not in self._cache:
            self._cache[n] = self._blocks(n)
        return self._cache[n]


class Cone:
    """cone(u: X -> Y); summand keys of X and Y must be disjoint."""

    def __init__(self, source, target, chain_map):
        self.source = source
        self.target = target
        self.chain_map = chain_map

    def summands(self, n):
        return self.source.summands(n + 1) + self.target.summands(n)

    def differential(self, n):
        blocks = {key: -matrix for key, matrix in self.source.differential(n + 1).items()}
        for key, matrix in self.chain_map.blocks(n + 1).items():
            _add_block(blocks, key, -matrix)
        for key, matrix in self.target.differential(n).items():
            _add_block(blocks, key, matrix)
        return blocks


def _spaces_by_key(summands):
    return {s.key: s.space for s in summands}


class AssembledComplex:
    """
    A complex flattened over a degree window [lo, hi]

    Group n is stored for lo <= n <= hi + 1 and d^n for lo <= n <= hi.
    """

    def __init__(self, kind, subject, complex_, window, field, max_degree=None, metadata=None):
        self.kind = kind
        self.subject = subject
        self.complex = complex_
        self.window = tuple(window)
        self.field = field
        self.metadata = dict(metadata or {})
        lo, hi = self.window

        self.groups = {}
        self.offsets = {}
        for n in range(lo, hi + 2):
            summands = complex_.summands(n)
            if max_degree is not None and n <= hi:
                for s in summands:
                    if s.dim and s.degree > max_degree:
                        raise DegreeCapError(s.degree, max_degree)
            self.groups[n] = summands
            offsets, offset = {}, 0
            for s in summands:
                offsets[s.key] = offset
                offset += s.dim
            self.offsets[n] = offsets

        self.differentials = {}
        for n in range(lo, hi + 1):
            self.differentials[n] = self._flatten(n, complex_.differential(n))

    def _flatten(self, n, blocks):
        entries = {}
        rows, cols = self.offsets[n + 1], self.offsets[n]
        for (target_key, source_key), matrix in blocks.items():
            r0, c0 = rows[target_key], cols[source_key]
            for i, row in matrix_entries(matrix).items():
                out = entries.setdefault(r0 + i, {})
                for j, value in row.items():
                    out[c0 + j] = out.get(c0 + j, self.field.zero) + value
        return self.field.matrix(entries, self.dim(n + 1), self.dim(n))

    def dim(self, n):
        if n in self.groups:
            return sum(s.dim for s in self.groups[n])
        return sum(s.dim for s in self.complex.summands(n))

    def dimensions(self):
        return {n: [(s.key, s.degree, s.dim) for s in summands] for n, summands in self.groups.items()}

    def differential(self, n):
        if n not in self.differentials:
            raise WindowError(f"d^{n} lies outside the window {self.window[0]}:{self.window[1]}", self.window, n)
        return self.differentials[n]

    def decode(self, n, vector):
        """Split a degree-n vector into {summand key: Cochain}."""
        if len(vector) != self.dim(n):
            raise ValidationError(f"Vector of length {len(vector)} does not fit degree {n} of dimension {self.dim(n)}")
        parts = {}
        for s in self.groups[n]:
            o = self.offsets[n][s.key]
            parts[s.key] = s.space.from_vector(vector[o:o + s.dim])
        return parts

    def encode(self, n, parts):
        """Inverse of decode; missing summands are zero."""
        v = []
        for s in self.groups[n]:
            cochain = parts.get(s.key)
            v.extend(s.space.to_vector(cochain) if cochain is not None else self.field.zero_vector(s.dim))
        return tuple(v)

    def summand_table(self):
        rows = []
        for n, summands in sorted(self.groups.items()):
            for s in summands:
                rows.append((n, s.key, s.degree, s.dim))
        return rows

    def report_into(self, report, include_matrices=False):
        """Attach summand tables and, optionally, full differential dumps."""
        report.add_table(
            f"{self.kind} complex of {_subject_name(self.subject)}",
            ("degree", "summand", "hochschild degree", "dim"),
            self.summand_table(),
        )
        if include_matrices:
            for n, matrix in sorted(self.differentials.items()):
                report.matrices[f"d^{n}"] = [
                    " ".join(self.field.format(c) for c in row) for row in dense_rows(matrix)
                ]
        report.metadata.update(self.metadata)
        return report


def _subject_name(subject):
    if isinstance(subject, tuple):
        return ",".join(part.name for part in subject)
    return subject.name


def verify_d_squared(X):
    """
    Check d^{n+1} d^n = 0 on the whole window

    Returns:
        list: Findings, one per failing degree
    """
    findings = []
    lo, hi = X.window
    for n in range(lo, hi):
        if not is_zero_matrix(matrix_product(X.differentials[n + 1], X.differentials[n])):
            findings.append(f"{X.kind} complex of {_subject_name(X.subject)}: d^{n + 1} d^{n} is not zero")
    return findings


def cohomology_dim(X, n):
    """
    dim ker d^n - rank d^{n-1}

    Raises:
        WindowError: d^n or a needed d^{n-1} lies outside the window
    """
    lo, hi = X.window
    if not lo <= n <= hi:
        raise WindowError(f"Degree {n} lies outside the window {lo}:{hi}", X.window, n)
    incoming = 0
    if n - 1 >= lo:
        incoming = rank(X.differentials[n - 1])
    elif X.dim(n - 1):
        raise WindowError(f"Cohomology in degree {n} needs d^{n - 1}; widen the window", X.window, n)
    return X.dim(n) - rank(X.differentials[n]) - incoming


def cohomology_representatives(X, n):
    """
    Cocycles whose classes form a basis of H^n, plus a basis of coboundaries

    Returns:
        tuple: (representatives, coboundaries), lists of vectors
    """
    cohomology_dim(X, n)
    lo, _ = X.window
    cocycles = kernel_basis(X.differentials[n])
    coboundaries = []
    if n - 1 >= lo:
        d_prev = X.differentials[n - 1]
        rows = dense_rows(d_prev)
        coboundaries = [tuple(row[j] for row in rows) for j in range(d_prev.shape[1])]
        coboundaries = [v for v in coboundaries if any(c != X.field.zero for c in v)]
    chosen = complement_basis(coboundaries, cocycles, X.dim(n), X.field.domain)
    return [cocycles[k] for k in chosen], coboundaries


# Individual complexes


def category_complex(category, normalized=True):
    I = identity_functor(category)
    return HochschildComplex("A", I, I, 0, normalized)


def pair_complex(F, G, normalized=True):
    """cone([[F_*, -F^*], [G_*, -G^*]]) from C(A) ⊕ C(B) to C(F) ⊕ C(G)."""
    A, B = F.source, F.target
    IA, IB = identity_functor(A), identity_functor(B)
    X = DirectSum([HochschildComplex("A", IA, IA, 0, normalized), HochschildComplex("B", IB, IB, 0, normalized)])
    Y = DirectSum([HochschildComplex("F", F, F, 0, normalized), HochschildComplex("G", G, G, 0, normalized)])

    def blocks(n):
        spaces = _spaces_by_key(X.summands(n))
        targets = _spaces_by_key(Y.summands(n))
        return {
            ("F", "A"): pushforward_matrix(F, spaces["A"], targets["F"]),
            ("F", "B"): -pullback_matrix(F, spaces["B"], targets["F"]),
            ("G", "A"): pushforward_matrix(G, spaces["A"], targets["G"]),
            ("G", "B"): -pullback_matrix(G, spaces["B"], targets["G"]),
        }

    return Cone(X, Y, ChainMap(blocks))


def functor_complex(F, normalized=True):
    """cone(F^* p_B - F_* p_A): degree n is C^{n+1}(A) ⊕ C^{n+1}(B) ⊕ C^n(F)."""
    A, B = F.source, F.target
    IA, IB = identity_functor(A), identity_functor(B)
    X = DirectSum([HochschildComplex("A", IA, IA, 0, normalized), HochschildComplex("B", IB, IB, 0, normalized)])
    Y = HochschildComplex("F", F, F, 0, normalized)

    def blocks(n):
        spaces = _spaces_by_key(X.summands(n))
        target = Y.space(n)
        return {
            ("F", "A"): -pushforward_matrix(F, spaces["A"], target),
            ("F", "B"): pullback_matrix(F, spaces["B"], target),
        }

    return Cone(X, Y, ChainMap(blocks))


def sigma_dagger_map(sigma, P, key="σ", Z=None):
    """σ‡ = [0, (-){σ}, -σ_*, σ^*] from the pair complex to C(F, G)."""
    F, G = sigma.source, sigma.target

    def blocks(n):
        spaces = _spaces_by_key(P.summands(n))
        target = Z.space(n)
        return {
            (key, "B"): brace_fixed_matrix([sigma], spaces["B"], target),
            (key, "F"): -postcompose_matrix(sigma, spaces["F"], target),
            (key, "G"): precompose_matrix(sigma, spaces["G"], target),
        }

    return ChainMap(blocks)


def nat_complex(sigma, normalized=True):
    """cone(σ‡): degree n is C^{n+2}(A) ⊕ C^{n+2}(B) ⊕ C^{n+1}(F) ⊕ C^{n+1}(G) ⊕ C^n(F, G)."""
    F, G = sigma.source, sigma.target
    P = pair_complex(F, G, normalized)
    Z = HochschildComplex("σ", F, G, 0, normalized)
    return Cone(P, Z, sigma_dagger_map(sigma, P, "σ", Z))


def identity3_complex(sigma, normalized=True):
    """cone(p_σ - p_σ') over cone(σ‡ ⊕ σ‡)."""
    F, G = sigma.source, sigma.target
    P = pair_complex(F, G, normalized)
    Z1 = HochschildComplex("σ", F, G, 0, normalized)
    Z2 = HochschildComplex("σ'", F, G, 0, normalized)
    first = sigma_dagger_map(sigma, P, "σ", Z1)
    second = sigma_dagger_map(sigma, P, "σ'", Z2)

    def doubled(n):
        blocks = dict(first.blocks(n))
        blocks.update(second.blocks(n))
        return blocks

    X = Cone(P, DirectSum([Z1, Z2]), ChainMap(doubled))
    W = HochschildComplex("1σ", F, G, 0, normalized)

    def difference(n):
        dim = W.space(n).dim
        identity = W.space(n).field.identity_matrix(dim)
        return {("1σ", "σ"): identity, ("1σ", "σ'"): -identity}

    return Cone(X, W, ChainMap(difference))


# Whiskering along paths and 2-diagrams


def _split_path(label, path, j):
    K = label.computad
    edge = path.edges[j]
    dom, cod = K.edges[edge]
    pre = compose_path(label, Path(path.start, path.edges[:j]))
    post = compose_path(label, Path(cod, path.edges[j + 1:]))
    return pre, label.functors[edge], post


def whisker_cochain_1(label, path, j, phi):
    """
    ℘ along a path: the cochain φ on the j-th edge, pulled back along the
    edges before it and pushed forward along the edges after it
    """
    pre, _, post = _split_path(label, path, j)
    return pushforward(post, pullback(pre, phi))


def path_whisker_matrix(label, path, j, n, normalized=True):
    """Matrix of whisker_cochain_1 from C^n(F_e, F_e) to C^n(comp path, comp path)."""
    pre, F, post = _split_path(label, path, j)
    s0 = CochainSpace(F, F, n, normalized)
    PF = compose_context(pre, F)
    s1 = CochainSpace(PF, PF, n, normalized)
    full = compose_context(PF, post)
    s2 = CochainSpace(full, full, n, normalized)
    return matrix_product(pushforward_matrix(post, s1, s2), pullback_matrix(pre, s0, s1))


class _StepData:
    """Per-step pieces of a sequentialized labelled 2-diagram."""

    def __init__(self, label, seq):
        self.steps = seq.steps
        self.whiskered = [step_whiskering(label, step) for step in seq.steps]
        m = len(self.whiskered)
        self.before = [None] * m
        self.after = [None] * m
        for i in range(1, m):
            prev = self.before[i - 1]
            self.before[i] = self.whiskered[i - 1] if prev is None else vertical_compose_nats(prev, self.whiskered[i - 1])
        for i in range(m - 2, -1, -1):
            nxt = self.after[i + 1]
            self.after[i] = self.whiskered[i + 1] if nxt is None else vertical_compose_nats(self.whiskered[i + 1], nxt)


def whisker_cochain_2(label, scheme, face, phi, sequentialization=None):
    """
    ℘ along a 2-diagram: W_{<i} ∪ R_*L^*φ ∪ W_{>i} for the step i firing face

    Args:
        phi (Cochain): In C^n(P, Q) for the face σ: P => Q
    """
    seq = sequentialization or sequentialize(scheme)
    data = _StepData(label, seq)
    i = seq.order.index(face)
    step = seq.steps[i]
    L = compose_path(label, step.prefix)
    R = compose_path(label, step.suffix)
    result = pushforward(R, pullback(L, phi))
    if data.before[i] is not None:
        result = cup(cochain_from_nat(data.before[i]), result)
    if data.after[i] is not None:
        result = cup(result, cochain_from_nat(data.after[i]))
    return result


def _conjugate(matrix, space, before, after, normalized):
    """Apply W_{<i} ∪ (-) ∪ W_{>i} to a matrix landing in space."""
    if before is not None:
        target = CochainSpace(before.source, space.target, space.degree, normalized)
        matrix = matrix_product(precompose_matrix(before, space, target), matrix)
        space = target
    if after is not None:
        target = CochainSpace(space.source, after.target, space.degree, normalized)
        matrix = matrix_product(postcompose_matrix(after, space, target), matrix)
    return matrix


def _linearized_composite(label, scheme, n, sources, target, sign):
    """
    Blocks of the linearized induced composite of a labelled 2-diagram

    sources maps summand keys of the face complex at degree n to their spaces:
    vertices at C^{n+2}, edges at C^{n+1}, faces at C^n.
    """
    K = label.computad
    seq = sequentialize(scheme)
    data = _StepData(label, seq)
    m = len(seq.steps)
    t = K.path_end(scheme.source)
    blocks = {}

    def add(key, matrix):
        _add_block(blocks, (target.key, key), matrix if sign > 0 else -matrix)

    for i, step in enumerate(seq.steps):
        sigma = label.nats[step.cell]
        L = compose_path(label, step.prefix)
        R = compose_path(label, step.suffix)
        before, after = data.before[i], data.after[i]

        # face deformation
        face_space = sources[f"face:{step.cell}"]
        LP, LQ = compose_context(L, sigma.source), compose_context(L, sigma.target)
        s1 = CochainSpace(LP, LQ, n, True)
        s2 = CochainSpace(compose_context(LP, R), compose_context(LQ, R), n, True)
        M = matrix_product(pushforward_matrix(R, s1, s2), pullback_matrix(L, face_space, s1))
        add(f"face:{step.cell}", _conjugate(M, s2, before, after, True))

        # suffix edge deformations acting on σ
        if step.suffix.edges:
            PR, QR = compose_context(sigma.source, R), compose_context(sigma.target, R)
            braced = CochainSpace(PR, QR, n, True)
            pulled = CochainSpace(compose_context(L, PR), compose_context(L, QR), n, True)
            Rn1 = CochainSpace(R, R, n + 1, True)
            brace_then_pull = matrix_product(
                pullback_matrix(L, braced, pulled), brace_fixed_matrix([sigma], Rn1, braced)
            )
            for j, edge in enumerate(step.suffix.edges):
                W = path_whisker_matrix(label, step.suffix, j, n + 1)
                M = matrix_product(brace_then_pull, W)
                add(f"edge:{edge}", _conjugate(M, pulled, before, after, True))

        # composition deformation at the sink
        if i < m - 1:
            I = identity_functor(label.categories[t])
            vertex_space = sources[f"vertex:{t}"]
            wi = data.whiskered[i]
            tail = data.after[i]
            out = CochainSpace(wi.source, tail.target, n, True)
            M = -brace_fixed_matrix([wi, tail], vertex_space, out)
            add(f"vertex:{t}", _conjugate(M, out, before, None, True))
    return blocks


def diagram_complex(label):
    """
    The deformation complex of a labelled diagram, on normalized cochains

    Degree n is ⊕_v C^{n+3}(A_v) ⊕ ⊕_e C^{n+2}(F_e) ⊕ ⊕_f C^{n+1}(P_f, Q_f) ⊕ ⊕_c C^n(S_c, T_c).
    """
    K = label.computad

    vertex = {}
    for v in K.vertices:
        I = identity_functor(label.categories[v])
        vertex[v] = HochschildComplex(f"vertex:{v}", I, I)
    edge = {
        e: HochschildComplex(f"edge:{e}", label.functors[e], label.functors[e]) for e in K.edges
    }
    X1 = DirectSum(vertex.values())
    Y1 = DirectSum(edge.values())

    def kappa1(n):
        blocks = {}
        for e, (dom, cod) in K.edges.items():
            F = label.functors[e]
            target = edge[e].space(n)
            _add_block(blocks, (f"edge:{e}", f"vertex:{cod}"), pullback_matrix(F, vertex[cod].space(n), target))
            _add_block(blocks, (f"edge:{e}", f"vertex:{dom}"), -pushforward_matrix(F, vertex[dom].space(n), target))
        return blocks

    C1 = Cone(X1, Y1, ChainMap(kappa1))

    face = {
        f: HochschildComplex(f"face:{f}", label.nats[f].source, label.nats[f].target) for f in K.cells2
    }
    Y2 = DirectSum(face.values())

    def kappa2(n):
        blocks = {}
        sources = _spaces_by_key(C1.summands(n))
        for f, (dom, cod) in K.cells2.items():
            sigma = label.nats[f]
            target = face[f].space(n)
            t = K.path_end(dom)
            _add_block(
                blocks,
                (f"face:{f}", f"vertex:{t}"),
                -brace_fixed_matrix([sigma], sources[f"vertex:{t}"], target),
            )
            pp = CochainSpace(sigma.source, sigma.source, n, True)
            for j, e in enumerate(dom.edges):
                M = matrix_product(postcompose_matrix(sigma, pp, target), path_whisker_matrix(label, dom, j, n))
                _add_block(blocks, (f"face:{f}", f"edge:{e}"), -M)
            qq = CochainSpace(sigma.target, sigma.target, n, True)
            for j, e in enumerate(cod.edges):
                M = matrix_product(precompose_matrix(sigma, qq, target), path_whisker_matrix(label, cod, j, n))
                _add_block(blocks, (f"face:{f}", f"edge:{e}"), M)
        return blocks

    C2 = Cone(C1, Y2, ChainMap(kappa2))

    cells = {}
    for c, c3 in K.cells3.items():
        dom_scheme = label.scheme_for(c, "dom")
        S = compose_path(label, c3.source)
        T = compose_path(label, dom_scheme.target)
        cells[c] = HochschildComplex(f"cell:{c}", S, T)
    Y3 = DirectSum(cells.values())

    def kappa3(n):
        blocks = {}
        sources = _spaces_by_key(C2.summands(n))
        for c in K.cells3:
            target = Summand(f"cell:{c}", cells[c].space(n))
            for side, sign in (("cod", 1), ("dom", -1)):
                scheme = label.scheme_for(c, side)
                for key, matrix in _linearized_composite(label, scheme, n, sources, target, sign).items():
                    _add_block(blocks, key, matrix)
        return blocks

    return Cone(C2, Y3, ChainMap(kappa3))


_BUILDERS = {
    "category": lambda subject, normalized: category_complex(subject, normalized),
    "functor": lambda subject, normalized: functor_complex(subject, normalized),
    "pair": lambda subject, normalized: pair_complex(subject[0], subject[1], normalized),
    "nat": lambda subject, normalized: nat_complex(subject, normalized),
    "identity3": lambda subject, normalized: identity3_complex(subject, normalized),
    "diagram": lambda subject, normalized: diagram_complex(subject),
}


def build_complex(kind, subject, window=None, config=None, normalized=None):
    """
    Assemble a deformation complex over a degree window and verify d² = 0

    Args:
        kind (str): category, functor, pair, nat, identity3 or diagram
        subject: LinCategory, LinFunctor, (F, G), NatTransf or DiagramLabel
        window (tuple): (lo, hi); the configured default for kind when omitted
        config (dict): Engine configuration
        normalized (bool): Override the configured normalization flag

    Returns:
        AssembledComplex: The verified complex
    """
    from pasting_deformations.engine.validators import InputValidator

    is_valid, error = InputValidator.validate_complex_kind(kind)
    if not is_valid:
        raise ValidationError(error)
    settings = get_complex_config(config)
    window = tuple(window or get_window_config(kind, config))
    if normalized is None:
        normalized = settings["normalized"]
    if kind == "diagram":
        normalized = True

    if kind == "pair":
        field = subject[0].target.field
    elif kind in ("nat", "identity3"):
        field = subject.source.target.field
    elif kind == "functor":
        field = subject.target.field
    elif kind == "diagram":
        field = next(iter(subject.categories.values())).field
    else:
        field = subject.field

    metadata = {"normalized": normalized}
    if kind in ("nat", "identity3", "diagram"):
        metadata["sigma_dagger_signs"] = list(SIGMA_DAGGER_SIGNS)

    X = AssembledComplex(
        kind,
        subject,
        _BUILDERS[kind](subject, normalized),
        window,
        field,
        settings["max_degree"],
        metadata,
    )
    findings = verify_d_squared(X)
    if findings:
        raise ValidationError("Assembled complex is not a complex", findings)
    log_complex_build(
        kind,
        _subject_name(subject),
        window,
        {n: X.dim(n) for n in X.groups},
        config,
    )
    return X
