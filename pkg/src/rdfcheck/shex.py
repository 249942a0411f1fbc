"""Shape-expression compact syntax: a small frontend over the row model.

Supported surface: shape blocks `name { ... }`, `,` grouping, `|` choice,
`( ... )` value sets and expression groups, `@shape` references, `&` shape
inclusion, `!` negation, cardinalities `{n}` / `{m,n}` / `{m,}` / `+` / `*`
/ `?`, datatype IRIs, the `IRI` node-kind, and `{}` for "any node". Each
shape compiles to a DEFINE row (plus generated helper rows) so shapes can be
evaluated and mixed with rows from other sources.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import rdf
from .model import (
    ClassRef, Constraint, Element, PropertyRef, TOP_REF,
    CONTEXT_CLASS, MODE_DEFINE,
)

UNBOUNDED = -1


class ShexSyntaxError(ValueError):
    def __init__(self, message: str, pos: int = -1):
        self.pos = pos
        suffix = f" at offset {pos}" if pos >= 0 else ""
        super().__init__(message + suffix)


class UnsupportedFeature(ValueError):
    pass


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class AnyNode:
    pass


@dataclass(frozen=True)
class IriKind:
    pass


@dataclass(frozen=True)
class DatatypeRef:
    iri: str


@dataclass(frozen=True)
class ValueSet:
    terms: tuple


@dataclass(frozen=True)
class ShapeRef:
    name: str


@dataclass
class TripleConstraintNode:
    predicate: str
    value_spec: object
    min: int = 1
    max: int = 1          # UNBOUNDED for open upper bound
    negated: bool = False


@dataclass
class GroupNode:
    children: list = field(default_factory=list)


@dataclass
class ChoiceNode:
    branches: list = field(default_factory=list)


@dataclass
class InclusionNode:
    name: str


@dataclass
class ShapeAst:
    name: str
    expression: object    # GroupNode (possibly empty)


# --- Tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
      (?P<ws>\s+|\#[^\n]*)
    | (?P<prefixdecl>@prefix\b)
    | (?P<iriref><[^<>\s]*>)
    | (?P<literal>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
    | (?P<atref>@(?:[A-Za-z][\w.-]*)?:[\w.-]*|@<[^<>\s]*>)
    | (?P<pname>(?:[A-Za-z][\w.-]*)?:[\w.-]*)
    | (?P<kw>IRI\b)
    | (?P<number>\d+)
    | (?P<punct>[{}(),|!&*+?.])
    """, re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ShexSyntaxError(f"unknown token {text[pos:pos+12]!r}", pos)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        tokens.append((m.lastgroup, m.group(), m.start()))
    return tokens


def _local_name(pname: str) -> str:
    if pname.startswith("<") and pname.endswith(">"):
        iri_str = pname[1:-1]
        for sep in ("#", "/"):
            if sep in iri_str:
                return iri_str.rsplit(sep, 1)[1]
        return iri_str
    return pname.rpartition(":")[2]


_WELL_KNOWN = {
    "rdf": rdf.RDF_NS, "rdfs": rdf.RDFS_NS, "xsd": rdf.XSD_NS,
    "owl": rdf.OWL_NS,
}


class _Parser:
    def __init__(self, text: str, base: str = "http://example.org/"):
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes = dict(_WELL_KNOWN)
        self.prefixes.setdefault("", base)
        self.base = base

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ShexSyntaxError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok[1] != text:
            raise ShexSyntaxError(f"expected {text!r}, got {tok[1]!r}", tok[2])
        return tok

    def expand(self, token_text: str) -> str:
        if token_text.startswith("<"):
            return token_text[1:-1]
        label, _, local = token_text.partition(":")
        base = self.prefixes.get(label)
        if base is None:
            raise ShexSyntaxError(f"undeclared prefix {label!r}")
        return base + local

    # -- grammar -----------------------------------------------------------

    def parse_document(self):
        shapes = []
        while self.peek() is not None:
            kind, text, pos = self.peek()
            if kind == "prefixdecl":
                self.next()
                label_tok = self.next()
                iri_tok = self.next()
                if self.peek() and self.peek()[1] == ".":
                    self.next()
                if not label_tok[1].endswith(":") or iri_tok[0] != "iriref":
                    raise ShexSyntaxError("bad prefix declaration", pos)
                self.prefixes[label_tok[1][:-1]] = iri_tok[1][1:-1]
                continue
            shapes.append(self.parse_shape())
        return shapes

    def parse_shape(self) -> ShapeAst:
        kind, text, pos = self.next()
        if kind not in ("pname", "iriref"):
            raise ShexSyntaxError(f"expected shape name, got {text!r}", pos)
        name = _local_name(text)
        self.expect("{")
        if self.peek() and self.peek()[1] == "}":
            self.next()
            return ShapeAst(name, GroupNode([]))
        expr = self.parse_choice()
        self.expect("}")
        if isinstance(expr, GroupNode):
            return ShapeAst(name, expr)
        return ShapeAst(name, GroupNode([expr]))

    def parse_choice(self):
        first = self.parse_sequence()
        if not (self.peek() and self.peek()[1] == "|"):
            return first
        branches = [first]
        while self.peek() and self.peek()[1] == "|":
            self.next()
            branches.append(self.parse_sequence())
        return ChoiceNode(branches)

    def parse_sequence(self):
        items = [self.parse_unary()]
        while self.peek() and self.peek()[1] == ",":
            self.next()
            items.append(self.parse_unary())
        if len(items) == 1:
            return items[0]
        return GroupNode(items)

    def parse_unary(self):
        tok = self.peek()
        if tok is None:
            raise ShexSyntaxError("unexpected end of input")
        kind, text, pos = tok
        if text == "!":
            self.next()
            inner = self.parse_unary()
            if isinstance(inner, TripleConstraintNode):
                inner.negated = True
                return inner
            raise UnsupportedFeature("'!' applies to a triple constraint")
        if text == "&":
            self.next()
            ref = self.next()
            if ref[0] not in ("pname", "iriref", "atref"):
                raise ShexSyntaxError(
                    f"expected shape name after '&', got {ref[1]!r}", ref[2])
            name = ref[1][1:] if ref[1].startswith("@") else ref[1]
            return InclusionNode(_local_name(name))
        if text == "(":
            self.next()
            inner = self.parse_choice()
            self.expect(")")
            if isinstance(inner, (GroupNode, ChoiceNode)):
                return inner
            return GroupNode([inner])
        if kind in ("pname", "iriref"):
            self.next()
            value_spec = self.parse_value_spec()
            lo, hi = self.parse_cardinality()
            return TripleConstraintNode(self.expand(text), value_spec, lo, hi)
        raise ShexSyntaxError(f"unexpected token {text!r}", pos)

    def parse_value_spec(self):
        tok = self.peek()
        if tok is None:
            return AnyNode()
        kind, text, pos = tok
        if kind == "kw" and text == "IRI":
            self.next()
            return IriKind()
        if kind == "atref":
            self.next()
            return ShapeRef(_local_name(text[1:]))
        if text == "{":
            # `{}` = any node; `{n...}` is a cardinality, not a value spec
            nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) \
                else None
            if nxt and nxt[1] == "}":
                self.i += 2
                return AnyNode()
            return AnyNode()
        if text == "(":
            self.next()
            terms = []
            while self.peek() and self.peek()[1] != ")":
                terms.append(self.parse_term())
            self.expect(")")
            if not terms:
                raise ShexSyntaxError("empty value set", pos)
            return ValueSet(tuple(terms))
        if kind in ("pname", "iriref"):
            self.next()
            return DatatypeRef(self.expand(text))
        return AnyNode()

    def parse_term(self) -> rdf.Term:
        kind, text, pos = self.next()
        if kind == "literal":
            lexical = text[1:-1]
            lang = ""
            datatype = rdf.XSD_STRING
            if self.peek() and self.peek()[1] == ".":
                pass
            return rdf.literal(lexical, datatype=datatype, lang=lang)
        if kind in ("pname", "iriref"):
            return rdf.iri(self.expand(text))
        raise ShexSyntaxError(f"bad value-set term {text!r}", pos)

    def parse_cardinality(self):
        tok = self.peek()
        if tok is None:
            return 1, 1
        text = tok[1]
        if text == "*":
            self.next()
            return 0, UNBOUNDED
        if text == "+":
            self.next()
            return 1, UNBOUNDED
        if text == "?":
            self.next()
            return 0, 1
        if text == "{":
            nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) \
                else None
            if not nxt or nxt[0] != "number":
                return 1, 1
            self.next()                      # '{'
            lo = int(self.next()[1])
            tok2 = self.next()
            if tok2[1] == "}":
                return lo, lo
            if tok2[1] != ",":
                raise ShexSyntaxError(
                    f"bad cardinality, got {tok2[1]!r}", tok2[2])
            tok3 = self.next()
            if tok3[1] == "}":
                return lo, UNBOUNDED
            if tok3[0] != "number":
                raise ShexSyntaxError(
                    f"bad cardinality bound {tok3[1]!r}", tok3[2])
            self.expect("}")
            return lo, int(tok3[1])
        return 1, 1


def parse_shexc(text: str, base: str = "http://example.org/"):
    """Parse shape blocks into ASTs."""
    return _Parser(text, base).parse_document()


# --- Compilation -----------------------------------------------------------

class _Compiler:
    def __init__(self, shapes):
        self.shapes = list(shapes)
        self.known = {s.name for s in shapes}
        self.rows: list = []
        self.counters: dict = {}

    def fresh(self, shape: str) -> str:
        n = self.counters.get(shape, 0) + 1
        self.counters[shape] = n
        return f"{shape}.{n}"

    def define(self, label: str, element: Element, *, left=(), classes=(),
               value=None) -> ClassRef:
        self.rows.append(Constraint(
            id=label, mode=MODE_DEFINE, context_kind=CONTEXT_CLASS
            if not left else "property",
            context=ClassRef.defined(label),
            left=tuple(left), classes=tuple(classes),
            element=element, value=value))
        return ClassRef.defined(label)

    def compile(self):
        for shape in self.shapes:
            conjuncts = self.compile_group(shape.expression, shape.name)
            if len(conjuncts) == 1 and conjuncts[0].kind == "defined":
                # collapse: rename the single helper into the shape itself?
                # keep a wrapper row so the shape label always exists
                self.define(shape.name, Element.INTERSECTION,
                            classes=conjuncts)
            else:
                self.define(shape.name, Element.INTERSECTION,
                            classes=conjuncts)
        return self.rows

    def compile_group(self, node, shape: str):
        """Compile an AND-group into a list of conjunct ClassRefs."""
        conjuncts = []
        children = node.children if isinstance(node, GroupNode) else [node]
        for child in children:
            conjuncts.extend(self.compile_node(child, shape))
        return conjuncts

    def compile_node(self, node, shape: str):
        if isinstance(node, InclusionNode):
            if node.name not in self.known:
                raise UnsupportedFeature(
                    f"inclusion of unknown shape {node.name!r}")
            return [ClassRef.defined(node.name)]
        if isinstance(node, GroupNode):
            inner = self.compile_group(node, shape)
            if not inner:
                return []
            if len(inner) == 1:
                return inner
            return [self.define(self.fresh(shape), Element.INTERSECTION,
                                classes=inner)]
        if isinstance(node, ChoiceNode):
            branch_refs = []
            for branch in node.branches:
                refs = self.compile_node(branch, shape) \
                    if not isinstance(branch, GroupNode) \
                    else [self.wrap_group(branch, shape)]
                if len(refs) == 1:
                    branch_refs.append(refs[0])
                else:
                    branch_refs.append(self.define(
                        self.fresh(shape), Element.INTERSECTION,
                        classes=refs))
            return [self.define(self.fresh(shape), Element.XOR,
                                classes=branch_refs)]
        if isinstance(node, TripleConstraintNode):
            return self.compile_triple_constraint(node, shape)
        raise UnsupportedFeature(f"unsupported node {type(node).__name__}")

    def wrap_group(self, group: GroupNode, shape: str) -> ClassRef:
        inner = self.compile_group(group, shape)
        if len(inner) == 1:
            return inner[0]
        return self.define(self.fresh(shape), Element.INTERSECTION,
                           classes=inner)

    def compile_triple_constraint(self, tc: TripleConstraintNode,
                                  shape: str):
        prop = PropertyRef(iri=tc.predicate)
        qual, extra = self.qualifier(tc.value_spec, prop, shape)
        rows = list(extra)
        if tc.negated:
            exists = self.define(self.fresh(shape), Element.EXISTS,
                                 left=(prop,), classes=(qual,))
            rows.append(self.define(self.fresh(shape), Element.NEGATION,
                                    classes=(exists,)))
            return rows
        if tc.min > 0:
            rows.append(self.define(self.fresh(shape), Element.MIN_CARD,
                                    left=(prop,), classes=(qual,),
                                    value=tc.min))
        if tc.max != UNBOUNDED:
            rows.append(self.define(self.fresh(shape), Element.MAX_CARD,
                                    left=(prop,), classes=(qual,),
                                    value=tc.max))
        return rows

    def qualifier(self, spec, prop: PropertyRef, shape: str):
        if isinstance(spec, (AnyNode, IriKind)):
            # the IRI node-kind collapses to "any node" here
            return TOP_REF, []
        if isinstance(spec, DatatypeRef):
            return ClassRef.datatype(spec.iri), []
        if isinstance(spec, ShapeRef):
            if spec.name not in self.known:
                raise UnsupportedFeature(
                    f"reference to unknown shape {spec.name!r}")
            return ClassRef.defined(spec.name), []
        if isinstance(spec, ValueSet):
            nominal = ClassRef.nominals(spec.terms)
            allowed = self.define(self.fresh(shape), Element.ALLOWED_VALUES,
                                  left=(prop,), classes=(nominal,))
            return nominal, [allowed]
        raise UnsupportedFeature(f"unsupported value spec {spec!r}")


def compile_shapes(shapes) -> list:
    """Compile shape ASTs into DEFINE rows; deterministic ids and order."""
    return _Compiler(shapes).compile()


def shapes_report(shapes, graph: rdf.Graph, extra_rows=(),
                  config=None) -> dict:
    """Extension of every shape's defined class over the graph."""
    from .model import resolve
    from .validator import ValidationConfig, build_env
    rows = compile_shapes(shapes) + list(extra_rows)
    cset = resolve(rows)
    env = build_env(graph, cset, config or ValidationConfig())
    return {shape.name: env.extension(ClassRef.defined(shape.name))
            for shape in shapes}
