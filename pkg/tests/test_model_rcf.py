"""Constraint row model, reference resolution, RCF text format, DL output."""

import glob
import os

import pytest

from rdfcheck import rcf, rdf
from rdfcheck.model import (
    ClassRef, Constraint, ConstraintError, Element, PropertyRef, Severity,
    NotDlExpressible, SELF_REF, TOP_REF,
    MODE_ASSERT, MODE_DEFINE, CONTEXT_CLASS, CONTEXT_PROPERTY,
    render_dl, resolve,
)
from rdfcheck.validator import normalize_sugar

from conftest import FIXTURES, fixture_text, load_rows


def _row(**kw):
    base = dict(id="r", mode=MODE_ASSERT, context_kind=CONTEXT_PROPERTY,
                context=TOP_REF,
                left=(PropertyRef(iri="http://example.org/p"),),
                element=Element.EXISTS)
    base.update(kw)
    return Constraint(**base)


# --------------------------------------------------------------------------
# row invariants

def test_class_rows_reject_properties():
    with pytest.raises(ConstraintError) as exc:
        _row(context_kind=CONTEXT_CLASS)
    assert exc.value.code == "CLASS_ROW_WITH_PROPERTIES"


def test_property_rows_require_left():
    with pytest.raises(ConstraintError) as exc:
        _row(left=())
    assert exc.value.code == "MISSING_LEFT"


def test_cardinality_needs_nonnegative_int():
    for bad in (None, -1, "2"):
        with pytest.raises(ConstraintError):
            _row(element=Element.MIN_CARD, value=bad)
    assert _row(element=Element.MIN_CARD, value=0).value == 0


def test_compare_needs_known_operator():
    with pytest.raises(ConstraintError):
        _row(element=Element.COMPARE, value="~",
             right=(PropertyRef(iri="http://example.org/q"),))


def test_define_context_must_be_own_label():
    with pytest.raises(ConstraintError) as exc:
        _row(mode=MODE_DEFINE)
    assert exc.value.code == "BAD_DEFINE_CONTEXT"
    ok = _row(mode=MODE_DEFINE, context=ClassRef.defined("r"))
    assert ok.context.label == "r"


def test_property_ref_chain_invariants():
    single = PropertyRef(iri="http://example.org/p")
    chain = PropertyRef(chain=(single, single.flipped()))
    assert chain.is_chain()
    with pytest.raises(ValueError):
        PropertyRef(iri="x:y", chain=(single, single))
    with pytest.raises(ValueError):
        PropertyRef(chain=(chain, single))
    with pytest.raises(ValueError):
        chain.flipped()


def test_severity_parse_and_order():
    assert Severity.parse("warning") is Severity.WARNING
    assert Severity.INFO < Severity.WARNING < Severity.ERROR


# --------------------------------------------------------------------------
# resolution and stratification

def _define(label, element, classes=(), **kw):
    return Constraint(
        id=label, mode=MODE_DEFINE, context_kind=CONTEXT_CLASS,
        context=ClassRef.defined(label), classes=tuple(classes),
        element=element, **kw)


def test_duplicate_ids_rejected():
    rows = [_row(id="a"), _row(id="a")]
    with pytest.raises(ConstraintError) as exc:
        resolve(rows)
    assert exc.value.code == "DUPLICATE_ID"


def test_unresolved_label_rejected():
    rows = [_row(classes=(ClassRef.defined("ghost"),))]
    with pytest.raises(ConstraintError) as exc:
        resolve(rows)
    assert exc.value.code == "UNRESOLVED_LABEL"


def test_positive_recursion_is_allowed():
    rows = [
        _define("A", Element.UNION,
                [ClassRef.defined("B"),
                 ClassRef.named("http://example.org/C")]),
        _define("B", Element.UNION, [ClassRef.defined("A")]),
    ]
    cset = resolve(rows)
    assert {"A", "B"} <= cset.cyclic
    assert cset.strata["A"] == cset.strata["B"]


def test_negation_cycle_rejected():
    rows = [
        _define("A", Element.NEGATION, [ClassRef.defined("B")]),
        _define("B", Element.UNION, [ClassRef.defined("A")]),
    ]
    with pytest.raises(ConstraintError) as exc:
        resolve(rows)
    assert exc.value.code == "NEGATION_CYCLE"


def test_negation_across_strata_is_fine():
    rows = [
        _define("A", Element.UNION, [ClassRef.named("http://example.org/C")]),
        _define("B", Element.NEGATION, [ClassRef.defined("A")]),
    ]
    cset = resolve(rows)
    assert cset.strata["A"] < cset.strata["B"]


# --------------------------------------------------------------------------
# sugar expansion

def test_required_becomes_exists():
    (core,) = normalize_sugar(_row(element=Element.REQUIRED))
    assert core.element is Element.EXISTS


def test_repeatable_becomes_min_one():
    (core,) = normalize_sugar(_row(element=Element.REPEATABLE))
    assert (core.element, core.value) == (Element.MIN_CARD, 1)


def test_exact_card_splits_into_bounds():
    rows = normalize_sugar(_row(element=Element.EXACT_CARD, value=2))
    assert {(r.element, r.value) for r in rows} == {
        (Element.MIN_CARD, 2), (Element.MAX_CARD, 2)}


# --------------------------------------------------------------------------
# RCF text format

def _rcf_fixture_names():
    return sorted(os.path.basename(p)
                  for p in glob.glob(str(FIXTURES / "*.rcf")))


@pytest.mark.parametrize("name", _rcf_fixture_names())
def test_rcf_round_trip_is_fixed_point(name):
    rows = load_rows(name)
    text = rcf.serialize_rcf(rows)
    rows2 = rcf.parse_rcf(text)
    assert rows2 == rows
    assert rcf.serialize_rcf(rows2) == text


def test_rcf_parses_all_value_shapes():
    rows = rcf.parse_rcf(
        "@prefix : <http://example.org/>\n"
        "constraint v1 {\n"
        "  mode: assert ; contextKind: property ; context: TOP ;\n"
        "  left: :p ; element: minCard ; value: 2 ; severity: warning\n"
        "}\n"
        "constraint v2 {\n"
        "  mode: assert ; contextKind: property ; context: TOP ;\n"
        "  left: :p ; element: facetRange ;\n"
        "  value: {minInclusive=1, maxExclusive=9} ; severity: info\n"
        "}\n")
    assert rows[0].value == 2 and rows[0].severity is Severity.WARNING
    assert rows[1].value == {"minInclusive": 1, "maxExclusive": 9}


def test_rcf_classref_forms():
    rows = rcf.parse_rcf(
        "@prefix : <http://example.org/>\n"
        "constraint c1 {\n"
        "  mode: assert ; contextKind: property ; context: {:a, 'lit'} ;\n"
        "  left: :p ; classes: SELF ; element: exists ; severity: error\n"
        "}\n"
        "constraint c2 {\n"
        "  mode: assert ; contextKind: class ; context: dt::SSN ;\n"
        "  element: pattern ; value: 'x' ; severity: error\n"
        "}\n")
    ctx = rows[0].context
    assert ctx.kind == "nominals"
    assert rdf.literal("lit") in ctx.members
    assert rows[0].classes == (SELF_REF,)
    assert rows[1].context.kind == "datatype"
    assert rows[1].context.iri == "http://example.org/SSN"


def test_rcf_property_forms():
    rows = rcf.parse_rcf(
        "@prefix : <http://example.org/>\n"
        "constraint p1 {\n"
        "  mode: assert ; contextKind: property ; context: TOP ;\n"
        "  left: ^:p ; right: :a/:b ; element: subPropertyOf ;\n"
        "  severity: error\n"
        "}\n")
    assert rows[0].left[0].inverse
    chain = rows[0].right[0]
    assert [s.iri for s in chain.chain] == [
        "http://example.org/a", "http://example.org/b"]


def test_rcf_syntax_error_carries_line():
    with pytest.raises(rcf.RcfSyntaxError):
        rcf.parse_rcf("constraint broken {\n  mode: assert\n")


# --------------------------------------------------------------------------
# DL rendering

def test_dl_min_card_unqualified():
    rows = load_rows("captain.rcf")
    cset = resolve(rows)
    assert render_dl(rows[0], cset) == "Captain ⊑ ≥1 commandsVessel.⊤"


def test_dl_subclass_and_disjoint():
    sub = load_rows("subsumption.rcf")
    assert render_dl(sub[0], resolve(sub)) == "Jedi ⊑ FeelingForce"
    dis = load_rows("disjoint.rcf")
    assert render_dl(dis[0], resolve(dis)) == "Male ⊓ Female ⊑ ⊥"


def test_dl_rejects_inexpressible_elements():
    row = _row(element=Element.PATTERN, value="x")
    with pytest.raises(NotDlExpressible):
        render_dl(row, resolve([row]))


def test_dl_expressible_count_matches_catalog_split():
    from rdfcheck import catalog
    dl_rows = [e for e in catalog.catalog() if e.dl_expressible]
    assert len(dl_rows) == 52
