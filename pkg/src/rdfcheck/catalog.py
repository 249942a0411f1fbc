"""Static catalog of the 81 constraint types.

Each entry records the classification dimensions (context, complexity,
DL-expressibility), the closed-world / unique-name dependency flags, whether
an inference pre-pass applies, per-language support, the constraining
elements the type uses, and whether this engine ships a check for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP

from .model import Element

CONTEXT_PROPERTY = "property"
CONTEXT_CLASS = "class"
CONTEXT_BOTH = "both"

SIMPLE = "simple"
SUGAR = "sugar"
COMPLEX = "complex"

YES = "yes"
NO = "no"
PARTIAL = "partial"

LANGUAGES = ("DSP", "OWL2-QL", "OWL2-DL", "ReSh", "ShEx", "SPIN")


@dataclass(frozen=True)
class CatalogEntry:
    type_name: str
    context_dim: str
    complexity_dim: str
    dl_expressible: bool
    cwa_dependent: bool
    una_dependent: bool
    inference_pre_pass: bool
    language_support: dict
    constraining_elements: tuple
    implemented: bool


_CTX = {"P": CONTEXT_PROPERTY, "C": CONTEXT_CLASS, "B": CONTEXT_BOTH}
_CPLX = {"S": SIMPLE, "G": SUGAR, "X": COMPLEX}
_MARK = {"v": YES, "x": NO, "p": PARTIAL}
E = Element

# Row format: (name, inference*, ctx, complexity, dl, cwa, una,
#              language marks [DSP, OWL2-QL, OWL2-DL, ReSh, ShEx, SPIN],
#              elements, implemented)
_ROWS = [
    ("Subsumption", True, "C", "S", True, True, True, "xvvpvv",
     (E.SUBCLASS_OF,), True),
    ("Class Equivalence", True, "C", "X", True, True, True, "xvvxxv",
     (E.CLASS_EQUIV,), True),
    ("Sub Properties", True, "P", "S", True, True, True, "xvvxxv",
     (E.SUBPROPERTY_OF,), True),
    ("Property Domains", True, "P", "G", True, True, True, "xvvxxv",
     (E.DOMAIN,), True),
    ("Property Ranges", True, "P", "G", True, True, True, "xvvxxv",
     (E.RANGE,), True),
    ("Inverse Object Properties", True, "P", "S", True, True, True, "xvvpxv",
     (E.INVERSE,), True),
    ("Symmetric Object Properties", True, "P", "S", True, True, True,
     "xvvxxv", (E.SYMMETRIC,), True),
    ("Asymmetric Object Properties", True, "P", "G", True, False, False,
     "xvvxxv", (E.ASYMMETRIC,), True),
    ("Reflexive Object Properties", True, "P", "G", True, True, True,
     "xvvxxv", (E.REFLEXIVE,), True),
    ("Irreflexive Object Properties", True, "P", "G", True, False, False,
     "xvvxxv", (E.IRREFLEXIVE,), True),
    ("Disjoint Properties", False, "P", "S", True, False, False, "xvvxxv",
     (E.PROPERTY_DISJOINT,), True),
    ("Disjoint Classes", False, "C", "X", True, False, True, "xvvxxv",
     (E.CLASS_DISJOINT,), True),
    ("Context-Specific Property Groups", False, "B", "X", True, True, True,
     "xppvvv", (E.INTERSECTION,), True),
    ("Context-Specific Inclusive OR of Properties", False, "B", "X", True,
     True, True, "xppxxv", (E.UNION,), True),
    ("Context-Specific Inclusive OR of Property Groups", False, "B", "X",
     True, True, True, "xppxxv", (E.UNION, E.INTERSECTION), True),
    ("Recursive Queries", False, "P", "S", True, False, False, "vvvvvp",
     (), True),
    ("Individual Inequality", False, "C", "X", True, False, False, "xvvxxv",
     (E.INDIVIDUAL_NEQ,), True),
    ("Equivalent Properties", True, "P", "X", True, True, True, "xvvxxv",
     (E.PROPERTY_EQUIV,), True),
    ("Property Assertions", False, "P", "S", True, True, True, "xvpxxv",
     (E.ASSERTION_EQ, E.ASSERTION_NEQ), True),
    ("Data Property Facets", False, "C", "S", False, False, False, "xvvxxv",
     (E.FACET_RANGE,), True),
    ("Literal Pattern Matching", False, "C", "S", False, False, False,
     "xvxxxv", (E.PATTERN,), True),
    ("Negative Literal Pattern Matching", False, "C", "X", False, False,
     False, "xvxxxv", (E.NEG_PATTERN,), True),
    ("Object Property Paths", True, "P", "S", True, True, True, "xvxxxv",
     (E.SUBPROPERTY_OF,), True),
    ("Intersection", True, "C", "S", True, True, True, "xvxvvv",
     (E.INTERSECTION,), True),
    ("Disjunction", True, "C", "S", True, True, True, "xvxxxv",
     (E.UNION,), True),
    ("Negation", True, "C", "S", True, False, False, "xvxxxv",
     (E.NEGATION,), True),
    ("Existential Quantifications", True, "P", "S", True, True, True,
     "xvxppv", (E.EXISTS,), True),
    ("Universal Quantifications", True, "P", "S", True, False, True,
     "xvxxxv", (E.FORALL,), True),
    ("Minimum Unqualified Cardinality", True, "P", "S", True, True, True,
     "vvxpvv", (E.MIN_CARD,), True),
    ("Minimum Qualified Cardinality", True, "P", "S", True, True, True,
     "vvxpvv", (E.MIN_CARD,), True),
    ("Maximum Unqualified Cardinality", True, "P", "S", True, False, True,
     "vvxpvv", (E.MAX_CARD,), True),
    ("Maximum Qualified Cardinality", True, "P", "S", True, False, True,
     "vvxpvv", (E.MAX_CARD,), True),
    ("Exact Unqualified Cardinality", True, "P", "G", True, True, True,
     "vvxpvv", (E.EXACT_CARD,), True),
    ("Exact Qualified Cardinality", True, "P", "G", True, True, True,
     "vvxpvv", (E.EXACT_CARD,), True),
    ("Transitive Object Properties", True, "P", "S", True, True, True,
     "xvxxxv", (E.TRANSITIVE,), True),
    ("Context-Specific Exclusive OR of Properties", False, "B", "X", True,
     False, True, "xvxxvv", (E.XOR,), True),
    ("Context-Specific Exclusive OR of Property Groups", False, "B", "X",
     True, False, True, "xpxvvv", (E.XOR,), True),
    ("Allowed Values", False, "C", "S", True, False, True, "vvxvvv",
     (E.ALLOWED_VALUES,), True),
    ("Not Allowed Values", False, "C", "X", True, False, True, "xvxxvv",
     (E.NOT_ALLOWED_VALUES,), True),
    ("Literal Ranges", False, "C", "X", False, False, False, "xvxxxv",
     (E.FACET_RANGE,), True),
    ("Negative Literal Ranges", False, "C", "X", False, False, False,
     "xvxxxv", (E.NEG_FACET_RANGE,), True),
    ("Required Properties", False, "P", "S", True, True, True, "vvxvvv",
     (E.REQUIRED,), True),
    ("Optional Properties", False, "P", "G", True, False, False, "vvxvvv",
     (E.OPTIONAL,), True),
    ("Repeatable Properties", False, "P", "S", True, True, False, "vvxvvv",
     (E.REPEATABLE,), True),
    ("Negative Property Constraints", False, "B", "X", True, False, True,
     "xvxxvv", (E.NEGATION, E.EXISTS), True),
    ("Individual Equality", True, "C", "X", True, True, False, "xvxxxv",
     (E.INDIVIDUAL_EQ,), True),
    ("Functional Properties", True, "P", "S", True, True, True, "xvxxxv",
     (E.FUNCTIONAL,), True),
    ("Inverse-Functional Properties", True, "P", "X", True, True, True,
     "xvxxxv", (E.INVERSE_FUNCTIONAL,), True),
    ("Value Restrictions", True, "P", "S", True, True, True, "vvxvvv",
     (E.VALUE_RESTRICTION,), True),
    ("Self Restrictions", True, "B", "X", True, True, True, "xvxxxv",
     (E.EXISTS,), True),
    ("Primary Key Properties", True, "P", "G", True, True, True, "xvxxxv",
     (E.KEYFOR,), True),
    ("Class-Specific Property Range", True, "P", "G", True, True, True,
     "vvxvvv", (E.RANGE,), True),
    ("Class-Specific Reflexive Object Properties", True, "P", "S", True,
     True, True, "xvxxxv", (E.REFLEXIVE,), True),
    ("Membership in Controlled Vocabularies", False, "B", "X", True, True,
     True, "vxxxxv", (E.VOCAB_MEMBERSHIP,), True),
    ("IRI Pattern Matching", False, "C", "S", False, False, True, "xxxxvv",
     (E.PATTERN,), True),
    ("Literal Value Comparison", False, "P", "S", False, False, False,
     "xxxxvv", (E.COMPARE,), True),
    ("Ordering", False, "P", "S", False, True, False, "xxxxxv",
     (E.ORDERED,), True),
    ("Validation Levels", False, "B", "S", False, True, False, "xxxxxv",
     (), False),
    ("String Operations", False, "P", "S", False, False, False, "xxxxxv",
     (E.STRING_LENGTH,), True),
    ("Context-Specific Valid Classes", False, "C", "S", False, False, False,
     "xxxxxv", (E.VALID_CLASSES,), True),
    ("Context-Specific Valid Properties", False, "P", "S", False, False,
     False, "xxxxxv", (E.VALID_PROPERTIES,), True),
    ("Default Values", True, "P", "S", False, True, True, "xxxvxv",
     (E.DEFAULT_VALUE,), True),
    ("Mathematical Operations", False, "P", "S", False, False, False,
     "xxxxxv", (E.MATH_OP,), True),
    ("Language Tag Matching", False, "P", "S", False, True, False, "xxxxxv",
     (E.LANG_TAG,), True),
    ("Language Tag Cardinality", False, "P", "S", False, True, True,
     "xxxxxv", (E.LANG_TAG_CARD,), True),
    ("Whitespace Handling", False, "P", "S", False, False, False, "xxxxxv",
     (E.WHITESPACE,), True),
    ("HTML Handling", False, "P", "S", False, False, False, "xxxxxv",
     (E.HTML_FREE,), True),
    ("Conditional Properties", False, "P", "S", True, True, True, "xxxxxv",
     (E.CONDITIONAL,), True),
    ("Recommended Properties", False, "P", "S", False, True, True, "xxxxxv",
     (E.RECOMMENDED,), True),
    ("Handle RDF Collections", False, "P", "S", False, False, False,
     "xxxxxv", (E.LIST_OP, E.ORDERED), True),
    ("Value is Valid for Datatype", False, "P", "S", False, False, False,
     "xxxxxv", (E.VALUE_VALID_FOR_DATATYPE,), True),
    ("Use Sub-Super Relations in Validation", False, "P", "S", False, False,
     True, "xxxxxv", (E.NOT_REDUNDANT,), True),
    ("Cardinality Shortcuts", True, "P", "S", True, True, True, "xvxvvv",
     (E.CARD_SHORTCUT,), True),
    ("Aggregations", False, "P", "S", False, False, False, "xxxxxv",
     (E.COUNT_AGG,), True),
    ("Class-Specific Irreflexive Object Properties", True, "P", "G", True,
     False, True, "xvxxxv", (E.IRREFLEXIVE,), True),
    ("Provenance", False, "C", "S", False, True, True, "xxxxxv",
     (E.PROVENANCE,), True),
    ("Data Model Consistency", False, "B", "X", False, True, True, "xxxxxv",
     (), False),
    ("Structure", False, "B", "X", False, True, True, "xxxxxv", (), False),
    ("Labeling and Documentation", False, "B", "X", False, True, True,
     "xxxxxv", (), False),
    ("Vocabulary", False, "C", "S", False, True, True, "xxxxxv",
     (E.VOCABULARY_ONLY,), True),
    ("HTTP URI Scheme Violation", False, "C", "S", False, False, True,
     "xxxxxv", (E.HTTP_URI_SCHEME,), True),
]


def _build() -> tuple:
    entries = []
    for (name, star, ctx, cplx, dl, cwa, una, marks, elems, impl) in _ROWS:
        entries.append(CatalogEntry(
            type_name=name,
            context_dim=_CTX[ctx],
            complexity_dim=_CPLX[cplx],
            dl_expressible=dl,
            cwa_dependent=cwa,
            una_dependent=una,
            inference_pre_pass=star,
            language_support={
                lang: _MARK[m] for lang, m in zip(LANGUAGES, marks)},
            constraining_elements=elems,
            implemented=impl,
        ))
    return tuple(entries)


_CATALOG = _build()
_BY_NAME = {e.type_name: e for e in _CATALOG}


def catalog() -> list:
    """The full 81-entry constraint-type catalog."""
    return list(_CATALOG)


def entry(type_name: str) -> CatalogEntry:
    return _BY_NAME[type_name]


def _pct(part: int, whole: int) -> Decimal:
    if whole == 0:
        return Decimal("0.00")
    raw = Decimal(part) * 100 / Decimal(whole)
    return raw.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def classification_matrix(entries=None) -> dict:
    """Counts and percentages for the three classification dimensions."""
    if entries is None:
        entries = _CATALOG
    entries = list(entries)
    total = len(entries)

    def count(pred):
        n = sum(1 for e in entries if pred(e))
        return {"count": n, "percent": _pct(n, total)}

    return {
        "context": {
            "property": count(lambda e: e.context_dim == CONTEXT_PROPERTY),
            "class": count(lambda e: e.context_dim == CONTEXT_CLASS),
            "both": count(lambda e: e.context_dim == CONTEXT_BOTH),
        },
        "complexity": {
            "simple": count(lambda e: e.complexity_dim == SIMPLE),
            "sugar": count(lambda e: e.complexity_dim == SUGAR),
            "complex": count(lambda e: e.complexity_dim == COMPLEX),
        },
        "dl": {
            "expressible": count(lambda e: e.dl_expressible),
            "not_expressible": count(lambda e: not e.dl_expressible),
        },
        "total": total,
    }
