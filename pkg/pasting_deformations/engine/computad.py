"""
Computads, pasting schemes and labelled pasting diagrams

A 3-computad has vertices, edges between vertices, 2-cells between edge
paths with common endpoints, and 3-cells between two 2-diagrams on a common
source path. Planarity of a 2-pasting scheme is checked combinatorially:
boundary conditions, reachability from the source and an Euler count.
"""

import networkx as nx

from pasting_deformations.engine.errors import CompositionError
from pasting_deformations.engine.lincat import (
    compose_functors,
    functors_equal,
    identity_functor,
    identity_nat,
    nats_equal,
    same_category,
    vertical_compose_nats,
    whisker_left,
    whisker_right,
)


class Path:
    """An edge path starting at a vertex; the empty path stands for an identity."""

    def __init__(self, start, edges=()):
        self.start = start
        self.edges = tuple(edges)

    def __eq__(self, other):
        return isinstance(other, Path) and (self.start, self.edges) == (other.start, other.edges)

    def __hash__(self):
        return hash((self.start, self.edges))

    def __len__(self):
        return len(self.edges)

    def __repr__(self):
        return f"Path({self.start}: {' '.join(self.edges) or '()'})"

    def __str__(self):
        return "(" + " ".join(self.edges) + ")" if self.edges else f"(@{self.start})"


class Cell3:
    """A 3-cell between the 2-diagrams dom_faces and cod_faces pasted on source."""

    def __init__(self, name, source, dom_faces, cod_faces):
        self.name = name
        self.source = source
        self.dom_faces = tuple(dom_faces)
        self.cod_faces = tuple(cod_faces)


class Computad3:
    """
    Args:
        name (str): Computad id
        vertices (list): Vertex ids
        edges (dict): {edge: (dom vertex, cod vertex)}
        cells2 (dict): {cell: (dom Path, cod Path)}
        cells3 (dict): {cell: Cell3}
    """

    def __init__(self, name, vertices, edges=None, cells2=None, cells3=None):
        self.name = name
        self.vertices = list(vertices)
        self.edges = dict(edges or {})
        self.cells2 = dict(cells2 or {})
        self.cells3 = dict(cells3 or {})

    def __repr__(self):
        return f"Computad3({self.name})"

    def path_end(self, path):
        if not path.edges:
            return path.start
        return self.edges[path.edges[-1]][1]

    def path_vertices(self, path):
        """Vertex sequence visited by the path, including both ends."""
        vertices = [path.start]
        for edge in path.edges:
            vertices.append(self.edges[edge][1])
        return vertices

    def path_findings(self, path, where):
        findings = []
        if path.start not in self.vertices:
            return [f"{where}: unknown vertex {path.start}"]
        current = path.start
        for edge in path.edges:
            if edge not in self.edges:
                return [*findings, f"{where}: unknown edge {edge}"]
            dom, cod = self.edges[edge]
            if dom != current:
                findings.append(f"{where}: edge {edge} starts at {dom}, not at {current}")
            current = cod
        return findings

    def scheme(self, name, source, faces):
        return PastingScheme2(name, self, source, faces)


def validate_computad3(computad):
    """
    Check vertex, edge and cell boundaries

    Returns:
        list: Findings, empty iff the computad is well formed
    """
    K = computad
    findings = []
    if len(set(K.vertices)) != len(K.vertices):
        findings.append(f"{K.name}: duplicate vertex ids")
    for edge, (dom, cod) in K.edges.items():
        for v in (dom, cod):
            if v not in K.vertices:
                findings.append(f"{K.name}: edge {edge} refers to unknown vertex {v}")

    for cell, (dom, cod) in K.cells2.items():
        path_findings = K.path_findings(dom, f"2-cell {cell} domain") + K.path_findings(cod, f"2-cell {cell} codomain")
        findings.extend(path_findings)
        if path_findings:
            continue
        if dom.start != cod.start or K.path_end(dom) != K.path_end(cod):
            findings.append(
                f"2-cell {cell}: domain {dom} runs {dom.start}->{K.path_end(dom)} "
                f"but codomain {cod} runs {cod.start}->{K.path_end(cod)}"
            )

    if findings:
        return findings

    for cell, c3 in K.cells3.items():
        missing = [f for f in c3.dom_faces + c3.cod_faces if f not in K.cells2]
        if missing:
            findings.append(f"3-cell {cell}: unknown 2-cells {', '.join(missing)}")
            continue
        dom_scheme = K.scheme(f"{cell}.dom", c3.source, c3.dom_faces)
        cod_scheme = K.scheme(f"{cell}.cod", c3.source, c3.cod_faces)
        dom_findings = validate_pasting_scheme2(dom_scheme)
        cod_findings = validate_pasting_scheme2(cod_scheme)
        findings.extend(dom_findings + cod_findings)
        if dom_findings or cod_findings:
            continue
        if dom_scheme.target != cod_scheme.target:
            findings.append(
                f"3-cell {cell}: 2-diagrams end at different paths {dom_scheme.target} and {cod_scheme.target}"
            )
    return findings


class Step:
    """One firing: prefix path, 2-cell, suffix path."""

    def __init__(self, prefix, cell, suffix):
        self.prefix = prefix
        self.cell = cell
        self.suffix = suffix

    def __repr__(self):
        return f"Step({self.prefix} | {self.cell} | {self.suffix})"


class Sequentialization:
    def __init__(self, source, target, steps):
        self.source = source
        self.target = target
        self.steps = list(steps)

    @property
    def order(self):
        return [step.cell for step in self.steps]

    def __repr__(self):
        return f"Sequentialization({' '.join(self.order) or '-'})"


class PastingScheme2:
    """
    A 2-pasting scheme inside a computad: faces pasted onto a source path

    Args:
        name (str): Scheme id
        computad (Computad3): Ambient computad
        source (Path): dom G, starting at s(G)
        faces (list): 2-cell ids, each used once
        vertices (list): Extra vertices belonging to the scheme
    """

    def __init__(self, name, computad, source, faces, vertices=None):
        self.name = name
        self.computad = computad
        self.source = source
        self.faces = tuple(faces)
        self.extra_vertices = tuple(vertices or ())

    def __repr__(self):
        return f"PastingScheme2({self.name}, faces {list(self.faces)})"

    def graph(self):
        """The underlying 1-computad as a multigraph keyed by edge id."""
        K = self.computad
        graph = nx.MultiDiGraph()
        graph.add_node(self.source.start)
        graph.add_nodes_from(self.extra_vertices)
        paths = [self.source]
        for face in self.faces:
            paths.extend(K.cells2[face])
        for path in paths:
            graph.add_node(path.start)
            for edge in path.edges:
                dom, cod = K.edges[edge]
                graph.add_edge(dom, cod, key=edge)
        return graph

    @property
    def sink(self):
        return self.computad.path_end(self.source)

    @property
    def target(self):
        """cod G: the frontier after firing every face."""
        return sequentialize(self).target


def _frontier_positions(K, frontier, start, path):
    """Positions where path occurs in the frontier; an empty path only at its first vertex occurrence."""
    if not path.edges:
        vertices = K.path_vertices(Path(start, frontier))
        for pos, v in enumerate(vertices):
            if v == path.start:
                return [pos]
        return []
    n = len(path.edges)
    return [pos for pos in range(len(frontier) - n + 1) if tuple(frontier[pos:pos + n]) == path.edges]


def _fire(K, start, frontier, face, pos):
    dom, cod = K.cells2[face]
    prefix = Path(start, frontier[:pos])
    suffix = Path(K.path_end(dom), frontier[pos + len(dom.edges):])
    new_frontier = frontier[:pos] + list(cod.edges) + frontier[pos + len(dom.edges):]
    return Step(prefix, face, suffix), new_frontier


def sequentialize(scheme):
    """
    Greedy leftmost firing order

    At each step the fireable face with the smallest (frontier position, id) fires.

    Raises:
        CompositionError: Some face never becomes fireable
    """
    K = scheme.computad
    start = scheme.source.start
    frontier = list(scheme.source.edges)
    remaining = set(scheme.faces)
    steps = []
    while remaining:
        candidates = []
        for face in remaining:
            for pos in _frontier_positions(K, frontier, start, K.cells2[face][0]):
                candidates.append((pos, face))
        if not candidates:
            raise CompositionError(
                f"Scheme {scheme.name} is not composable: no face among {sorted(remaining)} can fire on {frontier}"
            )
        pos, face = min(candidates)
        step, frontier = _fire(K, start, frontier, face, pos)
        steps.append(step)
        remaining.discard(face)
    return Sequentialization(scheme.source, Path(start, frontier), steps)


def all_sequentializations(scheme):
    """Every firing order, by depth-first search."""
    K = scheme.computad
    start = scheme.source.start
    found = []

    def explore(frontier, remaining, steps):
        if not remaining:
            found.append(Sequentialization(scheme.source, Path(start, frontier), steps))
            return
        for face in sorted(remaining):
            for pos in _frontier_positions(K, frontier, start, K.cells2[face][0]):
                step, new_frontier = _fire(K, start, frontier, face, pos)
                explore(new_frontier, remaining - {face}, [*steps, step])

    explore(list(scheme.source.edges), frozenset(scheme.faces), [])
    return found


def validate_pasting_scheme2(scheme):
    """
    Check per-face boundaries, reachability of every vertex and the Euler count

    Returns:
        list: Findings, empty iff the scheme is a composable planar pasting scheme
    """
    K = scheme.computad
    findings = []
    if len(set(scheme.faces)) != len(scheme.faces):
        findings.append(f"{scheme.name}: a face is listed twice")
    for face in scheme.faces:
        if face not in K.cells2:
            findings.append(f"{scheme.name}: unknown 2-cell {face}")
    findings.extend(K.path_findings(scheme.source, f"{scheme.name} source"))
    if findings:
        return findings

    for face in scheme.faces:
        dom, cod = K.cells2[face]
        if dom.start != cod.start or K.path_end(dom) != K.path_end(cod):
            findings.append(f"{scheme.name}: face {face} has mismatched boundary endpoints")

    graph = scheme.graph()
    s, t = scheme.source.start, scheme.sink
    for v in sorted(graph.nodes):
        if not (nx.has_path(graph, s, v) and nx.has_path(graph, v, t)):
            findings.append(f"{scheme.name}: vertex {v} lies on no path from {s} to {t}")

    V, E, F = graph.number_of_nodes(), graph.number_of_edges(), len(scheme.faces) + 1
    if V - E + F != 2:
        findings.append(f"{scheme.name}: Euler count V - E + F = {V} - {E} + {F} is not 2")

    try:
        sequentialize(scheme)
    except CompositionError as e:
        findings.append(e.message)
    return findings


class DiagramLabel:
    """
    A labelling of a computad by categories, functors and natural transformations

    Args:
        name (str): Label id
        computad (Computad3): The labelled computad
        categories (dict): {vertex: LinCategory}
        functors (dict): {edge: LinFunctor}
        nats (dict): {2-cell: NatTransf}
    """

    def __init__(self, name, computad, categories, functors, nats):
        self.name = name
        self.computad = computad
        self.categories = dict(categories)
        self.functors = dict(functors)
        self.nats = dict(nats)

    def __repr__(self):
        return f"DiagramLabel({self.name} for {self.computad.name})"

    def scheme_for(self, cell3, side):
        c3 = self.computad.cells3[cell3]
        faces = c3.dom_faces if side == "dom" else c3.cod_faces
        return self.computad.scheme(f"{cell3}.{side}", c3.source, faces)


def compose_path(label, path):
    """Left-to-right composite of the functors along a path; identity when empty."""
    if not path.edges:
        return identity_functor(label.categories[path.start])
    functor = label.functors[path.edges[0]]
    for edge in path.edges[1:]:
        functor = compose_functors(functor, label.functors[edge])
    return functor


def step_whiskering(label, step):
    """The whiskered 2-cell of one firing: (prefix ∘ σ) ∘ suffix."""
    sigma = label.nats[step.cell]
    left = whisker_left(compose_path(label, step.prefix), sigma)
    return whisker_right(left, compose_path(label, step.suffix))


def compose_2_diagram(label, scheme, sequentialization=None):
    """
    Composite natural transformation of a labelled 2-pasting scheme

    Args:
        label (DiagramLabel): Labelling of the ambient computad
        scheme (PastingScheme2): Scheme to compose
        sequentialization (Sequentialization): Firing order; greedy when omitted

    Returns:
        NatTransf: comp(dom G) => comp(cod G)
    """
    seq = sequentialization or sequentialize(scheme)
    if not seq.steps:
        return identity_nat(compose_path(label, scheme.source))
    result = step_whiskering(label, seq.steps[0])
    for step in seq.steps[1:]:
        result = vertical_compose_nats(result, step_whiskering(label, step))
    result.name = scheme.name
    return result


def validate_labelling(label):
    """
    Check that labels fit together and that every 3-cell commutes

    Returns:
        list: Findings, empty iff the labelled diagram is valid
    """
    K = label.computad
    findings = []
    for v in K.vertices:
        if v not in label.categories:
            findings.append(f"{label.name}: vertex {v} is not labelled")
    for edge, (dom, cod) in K.edges.items():
        functor = label.functors.get(edge)
        if functor is None:
            findings.append(f"{label.name}: edge {edge} is not labelled")
            continue
        if dom in label.categories and not same_category(functor.source, label.categories[dom]):
            findings.append(f"{label.name}: {functor.name} on {edge} does not start at the label of {dom}")
        if cod in label.categories and not same_category(functor.target, label.categories[cod]):
            findings.append(f"{label.name}: {functor.name} on {edge} does not end at the label of {cod}")
    if findings:
        return findings

    for cell, (dom, cod) in K.cells2.items():
        nat = label.nats.get(cell)
        if nat is None:
            findings.append(f"{label.name}: 2-cell {cell} is not labelled")
            continue
        try:
            if not functors_equal(nat.source, compose_path(label, dom)):
                findings.append(f"{label.name}: source of {nat.name} is not the composite of {dom}")
            if not functors_equal(nat.target, compose_path(label, cod)):
                findings.append(f"{label.name}: target of {nat.name} is not the composite of {cod}")
        except CompositionError as e:
            findings.append(f"{label.name}: 2-cell {cell}: {e.message}")
    if findings:
        return findings

    for cell in K.cells3:
        try:
            dom_nat = compose_2_diagram(label, label.scheme_for(cell, "dom"))
            cod_nat = compose_2_diagram(label, label.scheme_for(cell, "cod"))
        except CompositionError as e:
            findings.append(f"{label.name}: 3-cell {cell}: {e.message}")
            continue
        if not nats_equal(dom_nat, cod_nat):
            findings.append(f"{label.name}: 3-cell {cell} asserts equal composites, but they differ")
    return findings
