"""The generic constraint row model.

Every constraint, whatever language it originated in, is one uniform row:
(mode, context kind, context class, left properties, right properties,
class list, constraining element, value, severity). DEFINE rows name a class
by its condition; ASSERT rows demand an inclusion and yield violations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

from .rdf import Term


class Element(enum.Enum):
    SUBCLASS_OF = "subClassOf"
    CLASS_EQUIV = "classEquiv"
    SUBPROPERTY_OF = "subPropertyOf"
    PROPERTY_EQUIV = "propertyEquiv"
    PROPERTY_DISJOINT = "propertyDisjoint"
    CLASS_DISJOINT = "classDisjoint"
    DOMAIN = "domain"
    RANGE = "range"
    INVERSE = "inverse"
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"
    REFLEXIVE = "reflexive"
    IRREFLEXIVE = "irreflexive"
    TRANSITIVE = "transitive"
    FUNCTIONAL = "functional"
    INVERSE_FUNCTIONAL = "inverseFunctional"
    KEYFOR = "keyFor"
    EXISTS = "exists"
    FORALL = "forAll"
    MIN_CARD = "minCard"
    MAX_CARD = "maxCard"
    EXACT_CARD = "exactCard"
    INTERSECTION = "intersection"
    UNION = "union"
    NEGATION = "negation"
    XOR = "xor"
    INDIVIDUAL_EQ = "individualEq"
    INDIVIDUAL_NEQ = "individualNeq"
    ASSERTION_EQ = "assertionEq"
    ASSERTION_NEQ = "assertionNeq"
    VALUE_RESTRICTION = "valueRestriction"
    ALLOWED_VALUES = "allowedValues"
    NOT_ALLOWED_VALUES = "notAllowedValues"
    VOCAB_MEMBERSHIP = "vocabMembership"
    PATTERN = "pattern"
    NEG_PATTERN = "negPattern"
    FACET_RANGE = "facetRange"
    NEG_FACET_RANGE = "negFacetRange"
    COMPARE = "compare"
    LANG_TAG = "langTag"
    LANG_TAG_CARD = "langTagCard"
    WHITESPACE = "whitespace"
    HTML_FREE = "htmlFree"
    STRING_LENGTH = "stringLength"
    ORDERED = "ordered"
    DEFAULT_VALUE = "defaultValue"
    MATH_OP = "mathOp"
    COUNT_AGG = "countAgg"
    REQUIRED = "required"
    OPTIONAL = "optional"
    REPEATABLE = "repeatable"
    RECOMMENDED = "recommended"
    CONDITIONAL = "conditional"
    VALID_CLASSES = "validClasses"
    VALID_PROPERTIES = "validProperties"
    VALUE_VALID_FOR_DATATYPE = "valueValidForDatatype"
    NOT_REDUNDANT = "notRedundant"
    LIST_OP = "listOp"
    PROVENANCE = "provenance"
    VOCABULARY_ONLY = "vocabularyOnly"
    HTTP_URI_SCHEME = "httpUriScheme"
    CARD_SHORTCUT = "cardShortcut"


ELEMENT_BY_NAME = {e.value: e for e in Element}

# Elements that quantify or count fillers of a property.
QUANTIFIER_ELEMENTS = frozenset({
    Element.EXISTS, Element.FORALL,
    Element.MIN_CARD, Element.MAX_CARD, Element.EXACT_CARD,
})

# Cardinality bounds carry a non-negative integer value.
CARDINALITY_ELEMENTS = frozenset({
    Element.MIN_CARD, Element.MAX_CARD, Element.EXACT_CARD,
})

COMPARE_OPERATORS = ("<", "<=", ">", ">=", "=", "!=")


class Severity(enum.IntEnum):
    INFO = 0
    WARNING = 1
    ERROR = 2

    @classmethod
    def parse(cls, name: str) -> "Severity":
        return cls[name.upper()]


NAMED = "named"
DEFINED = "defined"
NOMINALS = "nominals"
DATATYPE = "datatype"
TOP = "top"
BOTTOM = "bottom"
SELF = "self"


@dataclass(frozen=True)
class ClassRef:
    kind: str
    iri: str = ""                       # NAMED / DATATYPE
    label: str = ""                     # DEFINED
    members: frozenset = frozenset()    # NOMINALS, of Term

    @classmethod
    def named(cls, iri: str) -> "ClassRef":
        return cls(NAMED, iri=iri)

    @classmethod
    def defined(cls, label: str) -> "ClassRef":
        return cls(DEFINED, label=label)

    @classmethod
    def nominals(cls, members) -> "ClassRef":
        members = frozenset(members)
        if not members:
            raise ValueError("nominal set cannot be empty")
        return cls(NOMINALS, members=members)

    @classmethod
    def datatype(cls, iri: str) -> "ClassRef":
        return cls(DATATYPE, iri=iri)


TOP_REF = ClassRef(TOP)
BOTTOM_REF = ClassRef(BOTTOM)
SELF_REF = ClassRef(SELF)


@dataclass(frozen=True)
class PropertyRef:
    """A property position: single step, inverse step, or forward/inverse chain."""
    iri: str = ""
    inverse: bool = False
    chain: tuple = ()   # of PropertyRef, length >= 2 when used

    def __post_init__(self):
        if self.chain:
            if self.iri or self.inverse:
                raise ValueError("chain ref cannot also be a single step")
            for step in self.chain:
                if step.chain:
                    raise ValueError("chains contain only single steps")

    def is_chain(self) -> bool:
        return bool(self.chain)

    def flipped(self) -> "PropertyRef":
        if self.chain:
            raise ValueError("cannot flip a chain")
        return replace(self, inverse=not self.inverse)


class ConstraintError(ValueError):
    """Structural problem in a constraint set."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


MODE_DEFINE = "define"
MODE_ASSERT = "assert"
CONTEXT_CLASS = "class"
CONTEXT_PROPERTY = "property"


@dataclass(frozen=True)
class Constraint:
    id: str
    mode: str
    context_kind: str
    context: ClassRef
    left: tuple = ()        # of PropertyRef
    right: tuple = ()       # of PropertyRef
    classes: tuple = ()     # of ClassRef
    element: Element = Element.EXISTS
    value: object = None
    severity: Severity = Severity.ERROR

    def __post_init__(self):
        if self.mode not in (MODE_DEFINE, MODE_ASSERT):
            raise ConstraintError("BAD_MODE", f"{self.id}: mode {self.mode!r}")
        if self.context_kind not in (CONTEXT_CLASS, CONTEXT_PROPERTY):
            raise ConstraintError("BAD_CONTEXT_KIND", f"{self.id}: {self.context_kind!r}")
        if self.context_kind == CONTEXT_CLASS and (self.left or self.right):
            raise ConstraintError(
                "CLASS_ROW_WITH_PROPERTIES",
                f"{self.id}: class rows have empty left/right")
        if self.context_kind == CONTEXT_PROPERTY and not self.left:
            raise ConstraintError(
                "MISSING_LEFT", f"{self.id}: property rows need a left property")
        if self.element in CARDINALITY_ELEMENTS:
            if not isinstance(self.value, int) or self.value < 0:
                raise ConstraintError(
                    "MISSING_VALUE",
                    f"{self.id}: {self.element.value} needs a non-negative integer")
        if self.element in (Element.PATTERN, Element.NEG_PATTERN):
            if not isinstance(self.value, str) or not self.value:
                raise ConstraintError(
                    "MISSING_VALUE", f"{self.id}: {self.element.value} needs a regex")
        if self.element is Element.COMPARE and self.value not in COMPARE_OPERATORS:
            raise ConstraintError(
                "MISSING_VALUE",
                f"{self.id}: compare needs an operator in {COMPARE_OPERATORS}")
        if self.mode == MODE_DEFINE:
            if self.context.kind != DEFINED or self.context.label != self.id:
                raise ConstraintError(
                    "BAD_DEFINE_CONTEXT",
                    f"{self.id}: define rows use context @{self.id}")

    def class_refs(self):
        yield self.context
        yield from self.classes


# References whose extension feeds through a complement: a defined class
# reached through one of these must live in a strictly earlier stratum.
_NEGATIVE_ELEMENTS = frozenset({
    Element.NEGATION, Element.XOR, Element.NOT_ALLOWED_VALUES,
    Element.MAX_CARD, Element.FORALL,
})


@dataclass
class ConstraintSet:
    """A resolved constraint set: DEFINE rows indexed, strata computed."""
    constraints: list
    defines: dict = field(default_factory=dict)      # label -> Constraint
    strata: dict = field(default_factory=dict)       # label -> stratum index
    cyclic: set = field(default_factory=set)         # labels in a recursive component

    def __iter__(self):
        return iter(self.constraints)

    def asserts(self):
        return [c for c in self.constraints if c.mode == MODE_ASSERT]

    def by_element(self, element: Element):
        return [c for c in self.constraints if c.element is element]


def resolve(constraints) -> ConstraintSet:
    """Check DEFINED references, detect negation cycles, assign strata."""
    constraints = list(constraints)
    defines: dict = {}
    seen_ids = set()
    for c in constraints:
        if c.id in seen_ids:
            raise ConstraintError("DUPLICATE_ID", c.id)
        seen_ids.add(c.id)
        if c.mode == MODE_DEFINE:
            defines[c.id] = c

    edges: dict = {label: [] for label in defines}   # label -> [(target, negative)]
    for c in constraints:
        for ref in c.class_refs():
            if ref.kind == DEFINED and ref.label not in defines:
                raise ConstraintError(
                    "UNRESOLVED_LABEL", f"{c.id} references @{ref.label}")
        if c.mode != MODE_DEFINE:
            continue
        negative = c.element in _NEGATIVE_ELEMENTS
        for ref in c.classes:
            if ref.kind == DEFINED:
                edges[c.id].append((ref.label, negative))

    strata, cyclic = _stratify(edges)
    return ConstraintSet(constraints, defines, strata, cyclic)


def _stratify(edges: dict):
    """Tarjan SCC + topological strata; negation inside an SCC is an error."""
    index: dict = {}
    lowlink: dict = {}
    on_stack: dict = {}
    stack: list = []
    scc_of: dict = {}
    sccs: list = []
    counter = [0]

    def strongconnect(v):
        # iterative Tarjan to survive deep reference chains
        work = [(v, iter(edges[v]))]
        index[v] = lowlink[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack[v] = True
        while work:
            node, it = work[-1]
            advanced = False
            for target, _neg in it:
                if target not in index:
                    index[target] = lowlink[target] = counter[0]
                    counter[0] += 1
                    stack.append(target)
                    on_stack[target] = True
                    work.append((target, iter(edges[target])))
                    advanced = True
                    break
                if on_stack.get(target):
                    lowlink[node] = min(lowlink[node], index[target])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
                for w in comp:
                    scc_of[w] = len(sccs) - 1

    for v in edges:
        if v not in index:
            strongconnect(v)

    cyclic = set()
    for comp in sccs:
        comp_set = set(comp)
        self_recursive = len(comp) > 1 or any(
            t == comp[0] for t, _ in edges[comp[0]])
        if self_recursive:
            cyclic.update(comp)
        for v in comp:
            for target, negative in edges[v]:
                if negative and target in comp_set and self_recursive:
                    raise ConstraintError(
                        "NEGATION_CYCLE",
                        f"@{v} negates @{target} inside a recursive component")

    # Tarjan emits SCCs in reverse topological order: dependencies first.
    strata = {}
    for stratum, comp in enumerate(sccs):
        for v in comp:
            strata[v] = stratum
    return strata, cyclic


# ---------------------------------------------------------------------------
# DL text renderer
# ---------------------------------------------------------------------------

DL_EXPRESSIBLE_ELEMENTS = frozenset({
    Element.SUBCLASS_OF, Element.CLASS_EQUIV, Element.SUBPROPERTY_OF,
    Element.PROPERTY_EQUIV, Element.PROPERTY_DISJOINT, Element.CLASS_DISJOINT,
    Element.DOMAIN, Element.RANGE, Element.INVERSE, Element.SYMMETRIC,
    Element.ASYMMETRIC, Element.REFLEXIVE, Element.IRREFLEXIVE,
    Element.TRANSITIVE, Element.FUNCTIONAL, Element.INVERSE_FUNCTIONAL,
    Element.KEYFOR, Element.EXISTS, Element.FORALL, Element.MIN_CARD,
    Element.MAX_CARD, Element.EXACT_CARD, Element.INTERSECTION, Element.UNION,
    Element.NEGATION, Element.XOR, Element.INDIVIDUAL_EQ,
    Element.INDIVIDUAL_NEQ, Element.ASSERTION_EQ, Element.ASSERTION_NEQ,
    Element.VALUE_RESTRICTION, Element.ALLOWED_VALUES,
    Element.NOT_ALLOWED_VALUES, Element.VOCAB_MEMBERSHIP, Element.REQUIRED,
    Element.OPTIONAL, Element.REPEATABLE, Element.CONDITIONAL,
    Element.CARD_SHORTCUT,
})


class NotDlExpressible(ValueError):
    pass


def _short(iri_str: str, prefixes: Optional[dict] = None) -> str:
    if prefixes:
        for label, base in sorted(prefixes.items(), key=lambda kv: -len(kv[1])):
            if iri_str.startswith(base) and len(iri_str) > len(base):
                local = iri_str[len(base):]
                return f"{label}:{local}" if label else local
    for sep in ("#", "/"):
        if sep in iri_str:
            tail = iri_str.rsplit(sep, 1)[1]
            if tail:
                return tail
    return iri_str


def _term_text(t: Term, prefixes) -> str:
    if t.kind == "iri":
        return _short(t.iri, prefixes)
    if t.kind == "blank":
        return f"_:{t.label}"
    return t.lexical


def _class_text(ref: ClassRef, prefixes) -> str:
    if ref.kind == TOP:
        return "⊤"
    if ref.kind == BOTTOM:
        return "⊥"
    if ref.kind == SELF:
        return "Self"
    if ref.kind == NOMINALS:
        inner = ", ".join(sorted(_term_text(m, prefixes) for m in ref.members))
        return "{" + inner + "}"
    if ref.kind == DEFINED:
        return ref.label
    return _short(ref.iri, prefixes)


def _prop_text(ref: PropertyRef, prefixes) -> str:
    if ref.chain:
        return " ∘ ".join(_prop_text(step, prefixes) for step in ref.chain)
    base = _short(ref.iri, prefixes)
    return base + "⁻" if ref.inverse else base


def _body_text(c: Constraint, prefixes) -> str:
    # an unqualified restriction counts every filler, i.e. qualifier ⊤
    classes = [_class_text(r, prefixes) for r in c.classes] or ["⊤"]
    if c.element is Element.EXISTS or c.element in (
            Element.REQUIRED, Element.VALUE_RESTRICTION):
        return f"∃{_prop_text(c.left[0], prefixes)}.{classes[0]}"
    if c.element is Element.FORALL:
        return f"∀{_prop_text(c.left[0], prefixes)}.{classes[0]}"
    if c.element is Element.MIN_CARD:
        return f"≥{c.value} {_prop_text(c.left[0], prefixes)}.{classes[0]}"
    if c.element is Element.MAX_CARD:
        return f"≤{c.value} {_prop_text(c.left[0], prefixes)}.{classes[0]}"
    if c.element is Element.EXACT_CARD:
        p = _prop_text(c.left[0], prefixes)
        return (f"≥{c.value} {p}.{classes[0]} ⊓ "
                f"≤{c.value} {p}.{classes[0]}")
    if c.element is Element.INTERSECTION:
        return " ⊓ ".join(classes)
    if c.element in (Element.UNION, Element.ALLOWED_VALUES):
        return " ⊔ ".join(classes)
    if c.element is Element.NEGATION:
        return f"¬{classes[0]}"
    if c.element is Element.NOT_ALLOWED_VALUES:
        union = " ⊔ ".join(classes)
        return f"¬∃{_prop_text(c.left[0], prefixes)}.({union})"
    if c.element is Element.XOR:
        a, b = classes[0], classes[1]
        return f"(¬{a} ⊓ {b}) ⊔ ({a} ⊓ ¬{b})" \
            if len(classes) == 2 else "xor(" + ", ".join(classes) + ")"
    raise NotDlExpressible(c.element.value)


def render_dl(c: Constraint, cset: Optional[ConstraintSet] = None,
              prefixes: Optional[dict] = None) -> str:
    """Deterministic DL-style text for one row.

    Raises NotDlExpressible for elements outside the DL-expressible subset.
    """
    if c.element not in DL_EXPRESSIBLE_ELEMENTS:
        raise NotDlExpressible(c.element.value)
    ctx = _class_text(c.context, prefixes)
    rel = "≡" if c.mode == MODE_DEFINE else "⊑"

    if c.element is Element.SUBCLASS_OF:
        return f"{ctx} ⊑ {_class_text(c.classes[0], prefixes)}"
    if c.element is Element.CLASS_EQUIV:
        return f"{ctx} ≡ {_class_text(c.classes[0], prefixes)}"
    if c.element is Element.CLASS_DISJOINT:
        parts = " ⊓ ".join(
            [ctx] + [_class_text(r, prefixes) for r in c.classes])
        return f"{parts} ⊑ ⊥"
    if c.element in (Element.SUBPROPERTY_OF, Element.CONDITIONAL):
        return (f"{_prop_text(c.left[0], prefixes)} ⊑ "
                f"{_prop_text(c.right[0], prefixes)}")
    if c.element is Element.PROPERTY_EQUIV:
        return (f"{_prop_text(c.left[0], prefixes)} ≡ "
                f"{_prop_text(c.right[0], prefixes)}")
    if c.element is Element.PROPERTY_DISJOINT:
        return (f"Disjoint({_prop_text(c.left[0], prefixes)}, "
                f"{_prop_text(c.right[0], prefixes)})")
    if c.element is Element.INVERSE:
        return (f"{_prop_text(c.left[0], prefixes)} ≡ "
                f"{_prop_text(c.right[0], prefixes)}⁻")
    if c.element is Element.SYMMETRIC:
        p = _prop_text(c.left[0], prefixes)
        return f"{p} ≡ {p}⁻"
    if c.element is Element.ASYMMETRIC:
        p = _prop_text(c.left[0], prefixes)
        return f"Disjoint({p}, {p}⁻)"
    if c.element is Element.TRANSITIVE:
        p = _prop_text(c.left[0], prefixes)
        return f"{p} ∘ {p} ⊑ {p}"
    if c.element is Element.REFLEXIVE:
        p = _prop_text(c.left[0], prefixes)
        return f"{ctx} ⊑ ∃{p}.Self"
    if c.element is Element.IRREFLEXIVE:
        p = _prop_text(c.left[0], prefixes)
        return f"{ctx} ⊑ ¬∃{p}.Self"
    if c.element is Element.DOMAIN:
        return (f"∃{_prop_text(c.left[0], prefixes)}.⊤ ⊑ "
                f"{_class_text(c.classes[0], prefixes)}")
    if c.element is Element.RANGE:
        return (f"⊤ ⊑ ∀{_prop_text(c.left[0], prefixes)}."
                f"{_class_text(c.classes[0], prefixes)}")
    if c.element is Element.FUNCTIONAL:
        return f"funct {_prop_text(c.left[0], prefixes)}"
    if c.element is Element.INVERSE_FUNCTIONAL:
        return f"funct {_prop_text(c.left[0], prefixes)}⁻"
    if c.element is Element.KEYFOR:
        return f"{_prop_text(c.left[0], prefixes)} keyfor {ctx}"
    if c.element is Element.INDIVIDUAL_EQ:
        return f"{ctx} = {_class_text(c.classes[0], prefixes)}"
    if c.element is Element.INDIVIDUAL_NEQ:
        return f"{ctx} ≠ {_class_text(c.classes[0], prefixes)}"
    if c.element is Element.ASSERTION_EQ:
        subj = _class_text(c.context, prefixes).strip("{}")
        obj = _value_text(c, prefixes)
        return f"{_prop_text(c.left[0], prefixes)}({subj}, {obj})"
    if c.element is Element.ASSERTION_NEQ:
        subj = _class_text(c.context, prefixes).strip("{}")
        obj = _value_text(c, prefixes)
        return f"¬{_prop_text(c.left[0], prefixes)}({subj}, {obj})"
    if c.element is Element.REPEATABLE:
        return f"{ctx} ⊑ ≥1 {_prop_text(c.left[0], prefixes)}.⊤"
    if c.element is Element.OPTIONAL:
        cls = _class_text(c.classes[0], prefixes) if c.classes else "⊤"
        return f"∃{_prop_text(c.left[0], prefixes)}.{cls} ⊑ {ctx}"
    if c.element is Element.CARD_SHORTCUT:
        lo, hi = _shortcut_bounds(c.value)
        p = _prop_text(c.left[0], prefixes)
        parts = []
        if lo > 0:
            parts.append(f"≥{lo} {p}.⊤")
        if hi is not None:
            parts.append(f"≤{hi} {p}.⊤")
        body = " ⊓ ".join(parts) if parts else "⊤"
        return f"{ctx} ⊑ {body}"
    if c.element is Element.VOCAB_MEMBERSHIP:
        union = " ⊔ ".join(_class_text(r, prefixes) for r in c.classes)
        return (f"{ctx} ⊑ ∀{_prop_text(c.left[0], prefixes)}.({union})")
    # remaining class-operator bodies: ∃/∀/cards/boolean ops
    body = _body_text(c, prefixes)
    return f"{ctx} {rel} {body}"


def _value_text(c: Constraint, prefixes) -> str:
    if isinstance(c.value, Term):
        return _term_text(c.value, prefixes)
    if c.classes:
        return _class_text(c.classes[0], prefixes).strip("{}")
    return str(c.value)


def _shortcut_bounds(value) -> tuple:
    """Map a cardinality-shortcut phrase to (min, max-or-None)."""
    text = str(value or "").lower()
    mandatory = "mandatory" in text or "required" in text
    repeatable = "non-repeatable" not in text and "repeatable" in text
    lo = 1 if mandatory else 0
    hi = None if repeatable else 1
    return lo, hi
