"""
Project files

A project file declares a ground field, settings, categories, functors,
natural transformations, computads, labellings, pasting schemes and
deformations, each defined before it is used:

    field fp:3

    category DUAL {
        object o
        hom o -> o : e x
        identity o = e
        product x x = 0
    }

    deformation dual_def : category DUAL order 1 {
        mu 1 x x = e
    }

Linear combinations are written `2*a - 1/2*b + c`, or `0`; ids may contain
inner hyphens, so a minus sign between terms needs surrounding spaces. Paths are a start
vertex followed by bracketed edges, `a[f g]`; face lists are parenthesized.
"""

import re
from functools import lru_cache
from pathlib import Path as FilePath

import pyparsing as pp

from pasting_deformations.config.engine_settings import get_engine_config, get_field_config
from pasting_deformations.engine.computad import Cell3, Computad3, DiagramLabel, Path, PastingScheme2, compose_path
from pasting_deformations.engine.deform import (
    CategoryDeformation,
    DiagramDeformation,
    FunctorDeformation,
    NatDeformation,
    deformation_kind,
)
from pasting_deformations.engine.errors import EngineError, ParseError
from pasting_deformations.engine.exactlinalg import Field
from pasting_deformations.engine.hochschild import Cochain
from pasting_deformations.engine.lincat import (
    LinCategory,
    LinFunctor,
    NatTransf,
    compose_functors,
    identity_functor,
    identity_nat,
)
from pasting_deformations.engine.validators import COMPLEX_KINDS, IDENTIFIER_PATTERN, InputValidator

STATEMENTS = ("field", "settings", "category", "functor", "nat", "computad", "label", "scheme", "deformation", "results")

KEYWORDS = STATEMENTS + (
    "object",
    "hom",
    "identity",
    "product",
    "map",
    "component",
    "vertex",
    "edge",
    "cell2",
    "cell3",
    "face",
    "mu",
    "iota",
    "order",
    "over",
    "max_degree",
    "max_order",
    "window",
    "normalized",
    "include_matrices",
    "log_commands",
    "log_errors",
    "log_builds",
)

DEFORMATION_KINDS = ("category", "functor", "nat", "diagram")


class Statement:
    def __init__(self, kind, tokens, line):
        self.kind = kind
        self.tokens = tokens
        self.line = line

    @property
    def section(self):
        if self.kind in ("field", "settings", "results"):
            return self.kind
        return f"{self.kind} {self.tokens[0]}"


def _statement(kind):
    def action(s, loc, toks):
        return Statement(kind, toks, pp.lineno(loc, s))

    return action


@lru_cache(maxsize=None)
def project_grammar():
    LBRACE, RBRACE, LBRACK, RBRACK, LPAR, RPAR, COLON, EQ, SEMI = map(pp.Suppress, "{}[]():=;")
    ARROW = pp.Suppress("->")
    DARROW = pp.Suppress("=>")
    K = pp.Keyword

    reserved = pp.MatchFirst([K(word) for word in KEYWORDS])
    name = pp.Combine(~reserved + pp.Regex(IDENTIFIER_PATTERN))
    integer = pp.Regex(r"\d+").set_parse_action(lambda t: int(t[0]))
    scalar = pp.Regex(r"\d+(?:/\d+)?")
    sign = pp.one_of("+ -")
    coefficient = scalar + pp.Suppress("*")
    first_term = pp.Group(pp.Opt(sign, default="+") + pp.Opt(coefficient, default="1") + name)
    next_term = pp.Group(sign + pp.Opt(coefficient, default="1") + name)
    zero = pp.Regex(r"0(?![\d/*])").suppress()
    lincomb = pp.Group(zero | first_term + pp.ZeroOrMore(next_term))

    path = pp.Group(name + LBRACK + pp.Group(pp.ZeroOrMore(name)) + RBRACK)
    faces = pp.Group(LPAR + pp.ZeroOrMore(name) + RPAR)
    block = lambda item: LBRACE + pp.Group(pp.ZeroOrMore(pp.Group(item))) + RBRACE  # noqa: E731

    field_stmt = K("field").suppress() + pp.Regex(r"q|fp:\d+")

    boolean = (K("true") | K("false")).set_parse_action(lambda t: t[0] == "true")
    setting = (
        K("max_degree") + integer
        | K("max_order") + integer
        | K("window") + pp.one_of(COMPLEX_KINDS, as_keyword=True) + pp.Regex(r"-?\d+:-?\d+")
        | K("normalized") + boolean
        | K("include_matrices") + boolean
        | (K("log_commands") | K("log_errors") | K("log_builds")) + boolean
    )
    settings_stmt = K("settings").suppress() + block(setting)

    category_item = (
        K("object") + pp.OneOrMore(name)
        | K("hom") + name + ARROW + name + COLON + pp.Group(pp.OneOrMore(name))
        | K("identity") + name + EQ + name
        | K("product") + name + name + EQ + lincomb
    )
    category_stmt = K("category").suppress() + name + block(category_item)

    functor_item = K("object") + name + ARROW + name | K("map") + name + ARROW + lincomb
    functor_stmt = K("functor").suppress() + name + (
        pp.Group(COLON + name + ARROW + name + block(functor_item))("explicit")
        | EQ + K("identity").suppress() + name("identity_of")
        | EQ + pp.Group(name + pp.OneOrMore(SEMI + name))("composite")
    )

    nat_item = K("component").suppress() + name + EQ + lincomb
    nat_stmt = K("nat").suppress() + name + (
        pp.Group(COLON + name + DARROW + name + block(nat_item))("explicit")
        | EQ + K("identity").suppress() + name("identity_of")
    )

    computad_item = (
        K("vertex") + pp.OneOrMore(name)
        | K("edge") + name + COLON + name + ARROW + name
        | K("cell2") + name + COLON + path + DARROW + path
        | K("cell3") + name + COLON + path + faces + DARROW + faces
    )
    computad_stmt = K("computad").suppress() + name + block(computad_item)

    label_item = (K("vertex") | K("edge") | K("cell2")) + name + EQ + name
    label_stmt = K("label").suppress() + name + COLON + name + block(label_item)

    scheme_stmt = K("scheme").suppress() + name + COLON + name + path + faces

    deformation_item = (
        (K("mu") | K("map")) + integer + pp.Group(pp.OneOrMore(name)) + EQ + lincomb
        | (K("iota") | K("component")) + integer + name + EQ + lincomb
        | (K("vertex") | K("edge")) + name + EQ + name
        | K("face") + integer + name + name + EQ + lincomb
    )
    deformation_stmt = (
        K("deformation").suppress()
        + name
        + COLON
        + pp.one_of(DEFORMATION_KINDS, as_keyword=True)
        + name
        + K("order").suppress()
        + integer
        + pp.Group(pp.Opt(K("over").suppress() + pp.OneOrMore(name)))
        + block(deformation_item)
    )

    results_stmt = pp.Regex(r"results\s*\{.*?^\}", flags=re.S | re.M)

    statement = pp.MatchFirst(
        [
            field_stmt.set_parse_action(_statement("field")),
            settings_stmt.set_parse_action(_statement("settings")),
            category_stmt.set_parse_action(_statement("category")),
            functor_stmt.set_parse_action(_statement("functor")),
            nat_stmt.set_parse_action(_statement("nat")),
            computad_stmt.set_parse_action(_statement("computad")),
            label_stmt.set_parse_action(_statement("label")),
            scheme_stmt.set_parse_action(_statement("scheme")),
            deformation_stmt.set_parse_action(_statement("deformation")),
            results_stmt.set_parse_action(_statement("results")),
        ]
    )
    grammar = pp.ZeroOrMore(statement) + pp.StringEnd()
    grammar.ignore(pp.python_style_comment)
    return grammar


def _section_at(text, line):
    """The statement a line belongs to, for diagnostics."""
    lines = text.splitlines()
    for k in range(min(line, len(lines)) - 1, -1, -1):
        words = lines[k].split()
        if words and words[0] in STATEMENTS:
            return " ".join(words[:2]) if len(words) > 1 and words[1] not in ("{",) else words[0]
    return None


def parse_statements(text):
    """
    Parse project text into statements

    Raises:
        ParseError: With the failing line and the enclosing statement
    """
    try:
        return list(project_grammar().parse_string(text, parse_all=True))
    except pp.ParseBaseException as e:
        raise ParseError(f"Syntax error: {e.msg}", e.lineno, _section_at(text, e.lineno)) from e


class Project:
    """
    Everything declared in one project file

    Attributes:
        field (Field): Ground field
        settings (dict): Settings block in engine configuration layout
        categories, functors, nats, computads, labels (dict): Declarations by id
        schemes (dict): {id: (DiagramLabel, PastingScheme2)}
        deformations (dict): {id: deformation}
    """

    def __init__(self, text, field, settings, path=None):
        self.text = text
        self.path = path
        self.field = field
        self.settings = settings
        self.categories = {}
        self.functors = {}
        self.nats = {}
        self.computads = {}
        self.labels = {}
        self.schemes = {}
        self.deformations = {}

    def config(self, overrides=None):
        return get_engine_config(self.settings, overrides)

    def subject(self, name):
        """
        Find a declared structure by id

        Returns:
            tuple: (kind, object), kind one of category, functor, nat, diagram
        """
        for kind, table in (
            ("category", self.categories),
            ("functor", self.functors),
            ("nat", self.nats),
            ("diagram", self.labels),
        ):
            if name in table:
                return kind, table[name]
        raise ParseError(f"Unknown structure '{name}'")

    def deformation(self, name):
        if name not in self.deformations:
            raise ParseError(f"Unknown deformation '{name}'")
        return self.deformations[name]

    def scheme(self, name):
        if name not in self.schemes:
            raise ParseError(f"Unknown scheme '{name}'")
        return self.schemes[name]

    def name_of(self, obj):
        """The id a structure was declared under, falling back to its own name."""
        for table in (self.categories, self.functors, self.nats, self.labels):
            for key, value in table.items():
                if value is obj:
                    return key
        return obj.name


class ProjectBuilder:
    """Turns parsed statements into a Project, resolving ids in order."""

    def __init__(self, text, statements, field_spec=None, path=None):
        self.text = text
        self.statements = statements
        self.field_spec = field_spec
        self.path = path
        self.current = None

    def error(self, message):
        st = self.current
        return ParseError(message, st.line if st else None, st.section if st else None)

    def build(self):
        spec = self.field_spec
        settings = {}
        for st in self.statements:
            self.current = st
            if st.kind == "field" and spec is None:
                spec = st.tokens[0]
            elif st.kind == "settings":
                settings = self._settings(st)
        spec = spec or get_field_config()
        is_valid, value, error = InputValidator.validate_field_spec(spec)
        if not is_valid:
            raise ParseError(error, None, "field")
        settings["field"] = {"spec": spec}
        self.field = Field(*value)
        self.project = Project(self.text, self.field, settings, self.path)
        self.max_order = self.project.config()["deformation"]["max_order"]

        handlers = {
            "category": self._category,
            "functor": self._functor,
            "nat": self._nat,
            "computad": self._computad,
            "label": self._label,
            "scheme": self._scheme,
            "deformation": self._deformation,
        }
        for st in self.statements:
            self.current = st
            handler = handlers.get(st.kind)
            if handler is None:
                continue
            name = st.tokens[0]
            if name in self._names():
                raise self.error(f"'{name}' is already defined")
            try:
                handler(st)
            except ParseError:
                raise
            except EngineError as e:
                raise self.error(e.message) from e
            except (KeyError, ValueError, ZeroDivisionError) as e:
                raise self.error(f"Invalid value: {e}") from e
        self.current = None
        return self.project

    def _names(self):
        p = self.project
        return set(p.categories) | set(p.functors) | set(p.nats) | set(p.computads) | set(p.labels) | set(
            p.schemes
        ) | set(p.deformations)

    def _lookup(self, table, name, what):
        if name not in table:
            raise self.error(f"Unknown {what} '{name}'")
        return table[name]

    def _settings(self, st):
        settings = {}
        for item in st.tokens[0]:
            key = item[0]
            if key == "max_degree":
                settings.setdefault("complex", {})["max_degree"] = item[1]
            elif key == "normalized":
                settings.setdefault("complex", {})["normalized"] = item[1]
            elif key == "window":
                is_valid, window, error = InputValidator.validate_window(item[2])
                if not is_valid:
                    raise self.error(error)
                settings.setdefault("complex", {}).setdefault("windows", {})[item[1]] = window
            elif key == "max_order":
                settings.setdefault("deformation", {})["max_order"] = item[1]
            elif key == "include_matrices":
                settings.setdefault("report", {})["include_matrices"] = item[1]
            elif key.startswith("log_"):
                settings.setdefault("logging", {})[key] = item[1]
        return settings

    def _lincomb(self, tokens):
        value = {}
        for sign, scalar, arrow in tokens:
            c = self.field.parse(scalar)
            if sign == "-":
                c = -c
            value[arrow] = value.get(arrow, self.field.zero) + c
        return value

    # Structures

    def _category(self, st):
        name, items = st.tokens[0], st.tokens[1]
        objects, hom, identities, products = [], {}, {}, {}
        for item in items:
            key = item[0]
            if key == "object":
                objects.extend(item[1:])
            elif key == "hom":
                if (item[1], item[2]) in hom:
                    raise self.error(f"hom({item[1]}, {item[2]}) is given twice")
                hom[(item[1], item[2])] = list(item[3])
            elif key == "identity":
                identities[item[1]] = item[2]
            else:
                products[(item[1], item[2])] = self._lincomb(item[3])
        self.project.categories[name] = LinCategory(name, self.field, objects, hom, identities, products)

    def _functor(self, st):
        name, tokens = st.tokens[0], st.tokens
        p = self.project
        if "identity_of" in tokens:
            functor = identity_functor(self._lookup(p.categories, tokens["identity_of"], "category"))
        elif "composite" in tokens:
            parts = [self._lookup(p.functors, part, "functor") for part in tokens["composite"]]
            functor = parts[0]
            for part in parts[1:]:
                functor = compose_functors(functor, part)
        else:
            source_name, target_name, items = tokens["explicit"]
            source = self._lookup(p.categories, source_name, "category")
            target = self._lookup(p.categories, target_name, "category")
            obj_map, images = {}, {}
            for item in items:
                if item[0] == "object":
                    obj_map[item[1]] = item[2]
                else:
                    images[item[1]] = self._lincomb(item[2])
            functor = LinFunctor(name, source, target, obj_map, images)
        p.functors[name] = functor

    def _nat(self, st):
        name, tokens = st.tokens[0], st.tokens
        p = self.project
        if "identity_of" in tokens:
            nat = identity_nat(self._lookup(p.functors, tokens["identity_of"], "functor"))
            nat.name = name
        else:
            source_name, target_name, items = tokens["explicit"]
            source = self._lookup(p.functors, source_name, "functor")
            target = self._lookup(p.functors, target_name, "functor")
            nat = NatTransf(name, source, target, {x: self._lincomb(value) for x, value in items})
        p.nats[name] = nat

    def _computad(self, st):
        name, items = st.tokens[0], st.tokens[1]
        vertices, edges, cells2, cells3 = [], {}, {}, {}
        for item in items:
            key = item[0]
            if key == "vertex":
                vertices.extend(item[1:])
            elif key == "edge":
                edges[item[1]] = (item[2], item[3])
            elif key == "cell2":
                cells2[item[1]] = (_path(item[2]), _path(item[3]))
            else:
                cells3[item[1]] = Cell3(item[1], _path(item[2]), list(item[3]), list(item[4]))
        self.project.computads[name] = Computad3(name, vertices, edges, cells2, cells3)

    def _label(self, st):
        name, computad_name, items = st.tokens
        p = self.project
        K = self._lookup(p.computads, computad_name, "computad")
        categories, functors, nats = {}, {}, {}
        for key, target, value in items:
            if key == "vertex":
                if target not in K.vertices:
                    raise self.error(f"{computad_name} has no vertex {target}")
                categories[target] = self._lookup(p.categories, value, "category")
            elif key == "edge":
                if target not in K.edges:
                    raise self.error(f"{computad_name} has no edge {target}")
                functors[target] = self._lookup(p.functors, value, "functor")
            else:
                if target not in K.cells2:
                    raise self.error(f"{computad_name} has no 2-cell {target}")
                nats[target] = self._lookup(p.nats, value, "natural transformation")
        p.labels[name] = DiagramLabel(name, K, categories, functors, nats)

    def _scheme(self, st):
        name, label_name, path, faces = st.tokens
        label = self._lookup(self.project.labels, label_name, "label")
        self.project.schemes[name] = (label, PastingScheme2(name, label.computad, _path(path), list(faces)))

    # Deformations

    def _chain(self, category, ids):
        objs, idx = [], []
        for arrow_id in ids:
            if arrow_id not in category.arrows:
                raise self.error(f"{arrow_id} is not a basis arrow of {category.name}")
            x, y, i = category.arrows[arrow_id]
            if objs and objs[-1] != x:
                raise self.error(f"Arrows {' '.join(ids)} are not composable")
            if not objs:
                objs.append(x)
            objs.append(y)
            idx.append(i)
        return tuple(objs), tuple(idx)

    def _order(self, value, order):
        if not 1 <= value <= order:
            raise self.error(f"Coefficient order {value} lies outside 1..{order}")
        return value

    def _referenced(self, name, kind, order):
        d = self._lookup(self.project.deformations, name, "deformation")
        if deformation_kind(d) != kind:
            raise self.error(f"'{name}' is not a {kind} deformation")
        if d.order != order:
            raise self.error(f"'{name}' has order {d.order}, expected {order}")
        return d

    def _deformation(self, st):
        name, kind, base_name, order, over, items = st.tokens
        is_valid, order, error = InputValidator.validate_order(order, self.max_order)
        if not is_valid:
            raise self.error(error)
        p = self.project
        over = list(over)
        if kind == "category":
            d = self._category_deformation(name, self._lookup(p.categories, base_name, "category"), order, items)
        elif kind == "functor":
            d = self._functor_deformation(name, self._lookup(p.functors, base_name, "functor"), order, over, items)
        elif kind == "nat":
            d = self._nat_deformation(name, self._lookup(p.nats, base_name, "natural transformation"), order, over, items)
        else:
            d = self._diagram_deformation(name, self._lookup(p.labels, base_name, "label"), order, items)
        p.deformations[name] = d

    def _category_deformation(self, name, C, order, items):
        I = identity_functor(C)
        mu, iota = {}, {}
        for item in items:
            key = item[0]
            n = self._order(item[1], order)
            if key == "mu":
                objs, idx = self._chain(C, list(item[2]))
                if len(idx) != 2:
                    raise self.error("mu coefficients take two basis arrows")
                mu.setdefault(n, {})[(objs, idx)] = C.vector(objs[0], objs[-1], self._lincomb(item[3]))
            elif key == "iota":
                x = item[2]
                if x not in C.objects:
                    raise self.error(f"{C.name} has no object {x}")
                iota.setdefault(n, {})[((x,), ())] = C.vector(x, x, self._lincomb(item[3]))
            else:
                raise self.error(f"'{key}' does not belong in a category deformation")
        return CategoryDeformation(
            name,
            C,
            order,
            {n: Cochain(I, I, 2, data) for n, data in mu.items()},
            {n: Cochain(I, I, 0, data) for n, data in iota.items()},
        )

    def _functor_deformation(self, name, F, order, over, items, source=None, target=None):
        if over:
            if len(over) != 2:
                raise self.error("A functor deformation is over two category deformations")
            source = self._referenced(over[0], "category", order)
            target = self._referenced(over[1], "category", order)
        source = source or CategoryDeformation(f"{name}_src", F.source, order)
        target = target or CategoryDeformation(f"{name}_tgt", F.target, order)
        maps = {}
        for item in items:
            if item[0] != "map":
                raise self.error(f"'{item[0]}' does not belong in a functor deformation")
            n = self._order(item[1], order)
            objs, idx = self._chain(F.source, list(item[2]))
            if len(idx) != 1:
                raise self.error("map coefficients take one basis arrow")
            value = F.target.vector(F(objs[0]), F(objs[1]), self._lincomb(item[3]))
            maps.setdefault(n, {})[(objs, idx)] = value
        return FunctorDeformation(
            name, F, source, target, order, {n: Cochain(F, F, 1, data) for n, data in maps.items()}
        )

    def _nat_deformation(self, name, sigma, order, over, items):
        F, G = sigma.source, sigma.target
        if over:
            if len(over) != 2:
                raise self.error("A nat deformation is over two functor deformations")
            source = self._referenced(over[0], "functor", order)
            target = self._referenced(over[1], "functor", order)
        else:
            A = CategoryDeformation(f"{name}_src", F.source, order)
            B = CategoryDeformation(f"{name}_tgt", F.target, order)
            source = FunctorDeformation(f"{name}_F", F, A, B, order)
            target = FunctorDeformation(f"{name}_G", G, A, B, order)
        B = F.target
        components = {}
        for item in items:
            if item[0] != "component":
                raise self.error(f"'{item[0]}' does not belong in a nat deformation")
            n = self._order(item[1], order)
            x = item[2]
            if x not in F.source.objects:
                raise self.error(f"{F.source.name} has no object {x}")
            components.setdefault(n, {})[((x,), ())] = B.vector(F(x), G(x), self._lincomb(item[3]))
        return NatDeformation(
            name, sigma, source, target, order, {n: Cochain(F, G, 0, data) for n, data in components.items()}
        )

    def _diagram_deformation(self, name, label, order, items):
        K = label.computad
        vertices, edge_refs, faces = {}, {}, {}
        for item in items:
            key = item[0]
            if key == "vertex":
                if item[1] not in K.vertices:
                    raise self.error(f"{K.name} has no vertex {item[1]}")
                vertices[item[1]] = self._referenced(item[2], "category", order)
            elif key == "edge":
                if item[1] not in K.edges:
                    raise self.error(f"{K.name} has no edge {item[1]}")
                edge_refs[item[1]] = self._referenced(item[2], "functor", order)
            elif key == "face":
                n = self._order(item[1], order)
                f, x = item[2], item[3]
                if f not in K.cells2:
                    raise self.error(f"{K.name} has no 2-cell {f}")
                sigma = label.nats[f]
                P, Q = sigma.source, sigma.target
                if x not in P.source.objects:
                    raise self.error(f"{P.source.name} has no object {x}")
                value = P.target.vector(P(x), Q(x), self._lincomb(item[4]))
                faces.setdefault(f, {}).setdefault(n, {})[((x,), ())] = value
            else:
                raise self.error(f"'{key}' does not belong in a diagram deformation")
        for v in K.vertices:
            if v not in vertices:
                vertices[v] = CategoryDeformation(f"{name}_{v}", label.categories[v], order)
        edges = {}
        for e, (dom, cod) in K.edges.items():
            F = label.functors[e]
            ref = edge_refs.get(e)
            maps = ref.maps if ref is not None else {}
            if ref is not None and ref.functor is not F:
                raise self.error(f"'{ref.name}' deforms {ref.functor.name}, not the label of {e}")
            edges[e] = FunctorDeformation(ref.name if ref else f"{name}_{e}", F, vertices[dom], vertices[cod], order, maps)
        face_cochains = {}
        for f, per_order in faces.items():
            sigma = label.nats[f]
            face_cochains[f] = {n: Cochain(sigma.source, sigma.target, 0, data) for n, data in per_order.items()}
        return DiagramDeformation(name, label, order, vertices, edges, face_cochains)


def _path(tokens):
    return Path(tokens[0], list(tokens[1]))


def parse_project_text(text, field_spec=None, path=None):
    """
    Parse and build a project

    Args:
        text (str): Project source
        field_spec (str): Override for the file's field statement

    Returns:
        Project: The resolved project
    """
    return ProjectBuilder(text, parse_statements(text), field_spec, path).build()


def load_project(path, field_spec=None):
    path = FilePath(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"Cannot read project file {path}: {e.strerror}") from e
    return parse_project_text(text, field_spec, str(path))


# Emitting


def format_lincomb(category, x, y, vector):
    field = category.field
    terms = []
    for arrow_id, c in zip(category.basis(x, y), vector):
        if field.is_zero(c):
            continue
        negative = field.kind == "q" and c < 0
        magnitude = -c if negative else c
        text = arrow_id if magnitude == field.one else f"{field.format(magnitude)}*{arrow_id}"
        if not terms:
            terms.append(f"-{text}" if negative else text)
        else:
            terms.append(f"{'-' if negative else '+'} {text}")
    return " ".join(terms) if terms else "0"


def _arrow_ids(category, chain):
    objs, idx = chain
    return " ".join(category.basis(objs[k], objs[k + 1])[i] for k, i in enumerate(idx))


def _category_block(project, d, name):
    C = d.base
    lines = [f"deformation {name} : category {project.name_of(C)} order {d.order} {{"]
    for n in sorted(d.mu):
        for chain, value in sorted(d.mu[n].data.items()):
            objs = chain[0]
            lines.append(f"    mu {n} {_arrow_ids(C, chain)} = {format_lincomb(C, objs[0], objs[-1], value)}")
    for n in sorted(d.iota):
        for ((x,), _), value in sorted(d.iota[n].data.items()):
            lines.append(f"    iota {n} {x} = {format_lincomb(C, x, x, value)}")
    lines.append("}")
    return "\n".join(lines)


def _functor_block(project, fd, name, source_name, target_name):
    F = fd.functor
    B = F.target
    lines = [f"deformation {name} : functor {project.name_of(F)} order {fd.order} over {source_name} {target_name} {{"]
    for n in sorted(fd.maps):
        for chain, value in sorted(fd.maps[n].data.items()):
            x, y = chain[0]
            lines.append(f"    map {n} {_arrow_ids(F.source, chain)} = {format_lincomb(B, F(x), F(y), value)}")
    lines.append("}")
    return "\n".join(lines)


def _category_blocks(project, d, name, emitted):
    """Emit a category deformation once, keyed by identity."""
    for existing, existing_name in emitted:
        if existing is d:
            return existing_name, []
    emitted.append((d, name))
    return name, [_category_block(project, d, name)]


def deformation_blocks(project, d, name):
    """
    Project-file text for a deformation, preceded by the deformations it is over

    Returns:
        list: Text blocks in definition order
    """
    kind = deformation_kind(d)
    if kind == "category":
        return [_category_block(project, d, name)]

    emitted = []
    if kind == "functor":
        src, blocks = _category_blocks(project, d.source, f"{name}_src", emitted)
        tgt, more = _category_blocks(project, d.target, f"{name}_tgt", emitted)
        return blocks + more + [_functor_block(project, d, name, src, tgt)]

    if kind == "nat":
        src, blocks = _category_blocks(project, d.source.source, f"{name}_src", emitted)
        tgt, more = _category_blocks(project, d.source.target, f"{name}_tgt", emitted)
        blocks += more
        blocks.append(_functor_block(project, d.source, f"{name}_F", src, tgt))
        blocks.append(_functor_block(project, d.target, f"{name}_G", src, tgt))
        sigma = d.nat
        F, G = sigma.source, sigma.target
        lines = [f"deformation {name} : nat {project.name_of(sigma)} order {d.order} over {name}_F {name}_G {{"]
        for n in sorted(d.components):
            for ((x,), _), value in sorted(d.components[n].data.items()):
                lines.append(f"    component {n} {x} = {format_lincomb(F.target, F(x), G(x), value)}")
        lines.append("}")
        return blocks + ["\n".join(lines)]

    K = d.label.computad
    blocks, vertex_names = [], {}
    for v in K.vertices:
        vertex_names[v], more = _category_blocks(project, d.vertices[v], f"{name}_{v}", emitted)
        blocks += more
    lines = [f"deformation {name} : diagram {project.name_of(d.label)} order {d.order} {{"]
    for v in K.vertices:
        lines.append(f"    vertex {v} = {vertex_names[v]}")
    for e, (dom, cod) in K.edges.items():
        blocks.append(_functor_block(project, d.edges[e], f"{name}_{e}", vertex_names[dom], vertex_names[cod]))
        lines.append(f"    edge {e} = {name}_{e}")
    for f in K.cells2:
        sigma = d.label.nats[f]
        P, Q = sigma.source, sigma.target
        for n in sorted(d.faces[f]):
            for ((x,), _), value in sorted(d.faces[f][n].data.items()):
                lines.append(f"    face {n} {f} {x} = {format_lincomb(P.target, P(x), Q(x), value)}")
    lines.append("}")
    return blocks + ["\n".join(lines)]


def composite_blocks(project, label, scheme, nat, name):
    """Project-file text declaring a composite natural transformation and its boundary functors."""
    blocks = []
    boundary = []
    for side, path in (("src", scheme.source), ("tgt", scheme.target)):
        functor_name = f"{name}_{side}"
        if not path.edges:
            category = label.categories[path.start]
            blocks.append(f"functor {functor_name} = identity {project.name_of(category)}")
        else:
            parts = " ; ".join(project.name_of(label.functors[e]) for e in path.edges)
            if len(path.edges) == 1:
                functor_name = parts
            else:
                blocks.append(f"functor {functor_name} = {parts}")
        boundary.append(functor_name)
    F, G = nat.source, nat.target
    lines = [f"nat {name} : {boundary[0]} => {boundary[1]} {{"]
    for x in F.source.objects:
        lines.append(f"    component {x} = {format_lincomb(F.target, F(x), G(x), nat.component(x))}")
    lines.append("}")
    blocks.append("\n".join(lines))
    return blocks


def results_block(command, results):
    lines = ["results {", f"    command = {command}"]
    for key in sorted(results):
        lines.append(f"    {key} = {results[key]}")
    lines.append("}")
    return "\n".join(lines)


def emit_project(project, blocks, command, results):
    """The original project text followed by new blocks and a results block."""
    text = project.text.rstrip("\n")
    parts = [text, *blocks, results_block(command, results)]
    return "\n\n".join(parts) + "\n"


def composite_boundary(label, scheme):
    return compose_path(label, scheme.source), compose_path(label, scheme.target)
