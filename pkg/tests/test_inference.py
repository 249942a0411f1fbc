"""Materialization: fixpoint properties, strategy agreement, merging."""

import glob
import os

import pytest
from hypothesis import given, settings, strategies as st

from rdfcheck import inference, rdf
from rdfcheck.model import (
    ClassRef, Constraint, Element, PropertyRef, TOP_REF,
    MODE_ASSERT, CONTEXT_CLASS, CONTEXT_PROPERTY, resolve,
)

from conftest import FIXTURES, load_graph, load_rows


EX = "http://example.org/"


def _p(name, inverse=False):
    return PropertyRef(iri=EX + name, inverse=inverse)


def _c(name):
    return ClassRef.named(EX + name)


def _prop_row(rid, element, left, right=(), classes=()):
    return Constraint(id=rid, mode=MODE_ASSERT,
                      context_kind=CONTEXT_PROPERTY, context=TOP_REF,
                      left=left, right=right, classes=classes,
                      element=element)


def _ruleset():
    return resolve([
        Constraint(id="c0-sub-c1", mode=MODE_ASSERT,
                   context_kind=CONTEXT_CLASS, context=_c("C0"),
                   classes=(_c("C1"),), element=Element.SUBCLASS_OF),
        _prop_row("p0-domain", Element.DOMAIN, (_p("p0"),),
                  classes=(_c("C2"),)),
        _prop_row("p1-range", Element.RANGE, (_p("p1"),),
                  classes=(_c("C0"),)),
        _prop_row("p0-inverse-p1", Element.INVERSE, (_p("p0"),), (_p("p1"),)),
        _prop_row("p2-transitive", Element.TRANSITIVE, (_p("p2"),)),
        _prop_row("p3-sub-p2", Element.SUBPROPERTY_OF, (_p("p3"),),
                  (_p("p2"),)),
        _prop_row("p0p1-chain-p3", Element.SUBPROPERTY_OF,
                  (PropertyRef(chain=(_p("p0"), _p("p1"))),), (_p("p3"),)),
        _prop_row("p4-equiv-p0", Element.PROPERTY_EQUIV, (_p("p4"),),
                  (_p("p0"),)),
        _prop_row("p4-functional", Element.FUNCTIONAL, (_p("p4"),)),
        _prop_row("p1-inv-functional", Element.INVERSE_FUNCTIONAL,
                  (_p("p1"),)),
    ])


RULES = _ruleset()

_node = st.sampled_from([rdf.iri(f"{EX}n{i}") for i in range(10)])
_pred = st.sampled_from([rdf.iri(f"{EX}p{i}") for i in range(5)])
_cls = st.sampled_from([rdf.iri(f"{EX}C{i}") for i in range(3)])
_triple = st.one_of(
    st.builds(rdf.Triple, _node, _pred, _node),
    st.builds(rdf.Triple, _node, st.just(rdf.TYPE), _cls),
)
_triples = st.lists(_triple, max_size=25)


def _tset(g: rdf.Graph) -> frozenset:
    return frozenset(g.triples)


def _classes(part: inference.SameAsPartition) -> frozenset:
    return frozenset(frozenset(members)
                     for members in part.classes().values())


@settings(max_examples=200, deadline=None)
@given(_triples)
def test_materialize_is_idempotent_and_inflationary(triples):
    g = rdf.Graph(triples)
    once, _ = inference.materialize(g, RULES)
    assert _tset(once) >= _tset(g)
    twice, _ = inference.materialize(once, RULES)
    assert _tset(twice) == _tset(once)


@settings(max_examples=200, deadline=None)
@given(_triples)
def test_materialize_is_monotone(triples):
    whole = rdf.Graph(triples)
    part_in = rdf.Graph(triples[: len(triples) // 2])
    big, _ = inference.materialize(whole, RULES)
    small, _ = inference.materialize(part_in, RULES)
    assert _tset(small) <= _tset(big)


@settings(max_examples=200, deadline=None)
@given(_triples, st.booleans())
def test_seminaive_agrees_with_naive(triples, una):
    g = rdf.Graph(triples)
    config = inference.InferenceConfig(una=una)
    semi_g, semi_p = inference.materialize(g, RULES, config, "seminaive")
    naive_g, naive_p = inference.materialize(g, RULES, config, "naive")
    assert _tset(semi_g) == _tset(naive_g)
    assert _classes(semi_p) == _classes(naive_p)


@settings(max_examples=100, deadline=None)
@given(_triples)
def test_merging_materialization_is_idempotent(triples):
    g = rdf.Graph(triples)
    config = inference.InferenceConfig(una=False)
    once, part1 = inference.materialize(g, RULES, config)
    twice, part2 = inference.materialize(once, RULES, config)
    assert _tset(twice) == _tset(once)
    assert _classes(part1) == _classes(part2)


def test_una_keeps_partition_discrete():
    g = rdf.parse_turtle(
        "@prefix : <http://example.org/> .\n"
        ":s :p4 :a . :s :p4 :b .\n")
    _, part = inference.materialize(g, RULES, inference.InferenceConfig())
    assert part.is_discrete()
    _, merged = inference.materialize(
        g, RULES, inference.InferenceConfig(una=False))
    assert merged.same(rdf.iri(EX + "a"), rdf.iri(EX + "b"))


def test_fixpoint_cap_is_enforced():
    g = rdf.parse_turtle(
        "@prefix : <http://example.org/> .\n"
        ":a :p2 :b . :b :p2 :c .\n")
    with pytest.raises(inference.FixpointLimit):
        inference.materialize(g, RULES, inference.InferenceConfig(
            fixpoint_cap=1))


# --------------------------------------------------------------------------
# fixture corpus reaches a fixpoint under the default cap

def _fixture_pairs():
    pairs = []
    for path in sorted(glob.glob(str(FIXTURES / "*.rcf"))):
        stem = os.path.basename(path)[:-len(".rcf")]
        for data in sorted(glob.glob(str(FIXTURES / f"{stem}_*.ttl"))):
            pairs.append((os.path.basename(path), os.path.basename(data)))
    return pairs


@pytest.mark.parametrize("rcf_name,data_name", _fixture_pairs())
@pytest.mark.parametrize("una", [True, False])
def test_fixture_corpus_reaches_fixpoint(rcf_name, data_name, una):
    cset = resolve(load_rows(rcf_name))
    g = load_graph(data_name)
    out, _ = inference.materialize(
        g, cset, inference.InferenceConfig(una=una))
    assert _tset(out) >= _tset(g)


# --------------------------------------------------------------------------
# concrete rule behavior on the fixture corpus

def test_default_values_add_exactly_four_triples():
    cset = resolve(load_rows("defaults.rcf"))
    g = load_graph("defaults_data.ttl")
    out = inference.apply_default_values(g, cset)
    xsd = rdf.XSD_NS
    added = _tset(out) - _tset(g)
    assert added == {
        rdf.Triple(rdf.iri(EX + "Joda"), rdf.iri(EX + "laserSwordColor"),
                   rdf.literal("blue", datatype=xsd + "string")),
        rdf.Triple(rdf.iri(EX + "Joda"), rdf.iri(EX + "numberLaserSwords"),
                   rdf.literal("1", datatype=xsd + "nonNegativeInteger")),
        rdf.Triple(rdf.iri(EX + "DarthSidious"),
                   rdf.iri(EX + "laserSwordColor"),
                   rdf.literal("red", datatype=xsd + "string")),
        rdf.Triple(rdf.iri(EX + "DarthSidious"),
                   rdf.iri(EX + "numberLaserSwords"),
                   rdf.literal("2", datatype=xsd + "nonNegativeInteger")),
    }


def test_default_values_never_override_existing_statements():
    cset = resolve(load_rows("defaults.rcf"))
    g = load_graph("defaults_data.ttl").with_triples([
        rdf.Triple(rdf.iri(EX + "Joda"), rdf.iri(EX + "laserSwordColor"),
                   rdf.literal("green"))])
    out = inference.apply_default_values(g, cset)
    colors = out.objects(rdf.iri(EX + "Joda"),
                         rdf.iri(EX + "laserSwordColor"))
    assert colors == [rdf.literal("green")]


def test_property_equivalence_adds_exactly_two_triples():
    cset = resolve(load_rows("equiv_props.rcf"))
    g = load_graph("equiv_props_data.ttl")
    out, _ = inference.materialize(g, cset)
    assert _tset(out) - _tset(g) == {
        rdf.Triple(rdf.iri(EX + "Chris"), rdf.iri(EX + "hasMaleSibling"),
                   rdf.iri(EX + "Stewie")),
        rdf.Triple(rdf.iri(EX + "Stewie"), rdf.iri(EX + "hasBrother"),
                   rdf.iri(EX + "Chris")),
    }


def test_functional_row_entails_identity_without_una():
    cset = resolve(load_rows("functional.rcf"))
    g = load_graph("functional_data.ttl")
    assert inference.entails_same(
        g, rdf.iri(EX + "Peter"), rdf.iri(EX + "Peter_Griffin"), cset)
    # under the unique-name assumption nothing merges
    assert not inference.entails_same(
        g, rdf.iri(EX + "Peter"), rdf.iri(EX + "Peter_Griffin"), cset,
        inference.InferenceConfig(una=True))


def test_merged_nodes_share_copied_triples():
    cset = resolve(load_rows("functional.rcf"))
    g = load_graph("functional_data.ttl").with_triples([
        rdf.Triple(rdf.iri(EX + "Peter_Griffin"), rdf.iri(EX + "age"),
                   rdf.literal("42"))])
    out, part = inference.materialize(
        g, cset, inference.InferenceConfig(una=False))
    rep = part.find(rdf.iri(EX + "Peter_Griffin"))
    assert out.objects(rep, rdf.iri(EX + "age")) == [rdf.literal("42")]


# --------------------------------------------------------------------------
# partition data structure

def test_partition_prefers_least_iri_representative():
    part = inference.SameAsPartition()
    a, b, blank = rdf.iri(EX + "a"), rdf.iri(EX + "b"), rdf.blank("x")
    assert part.merge(b, blank)
    assert part.merge(a, b)
    assert not part.merge(a, blank)
    assert part.find(blank) == a
    assert part.same(a, blank) and part.same(b, blank)
    assert set(part.classmates(b)) == {a, b, blank}
    assert not part.is_discrete()


def test_partition_from_graph_reads_sameas_links():
    g = rdf.parse_turtle(
        "@prefix : <http://example.org/> .\n"
        "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
        ":a owl:sameAs :b . :c owl:sameAs :c .\n")
    part = inference.SameAsPartition.from_graph(g)
    assert part.same(rdf.iri(EX + "a"), rdf.iri(EX + "b"))
    assert not part.same(rdf.iri(EX + "a"), rdf.iri(EX + "c"))
