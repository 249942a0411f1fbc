"""ShEx-compact parsing, compilation to constraint rows, shape extensions."""

import glob
import os

import pytest

from rdfcheck import inference, rcf, rdf, shex, validator
from rdfcheck.model import ClassRef, resolve

from conftest import FIXTURES, fixture_text, load_graph


EX = "http://example.org/"


def _names(ext) -> set:
    return {t.iri.rsplit("/", 1)[1] for t in ext}


def _jedi_report(shex_name: str) -> dict:
    """Shape extensions over the Jedi graph with the inverse-property row
    materialized first (mentorOf and studentOf mirror each other)."""
    shapes = shex.parse_shexc(fixture_text(shex_name))
    extra = rcf.parse_rcf(fixture_text("jedi_inverse.rcf"))
    cset = resolve(list(shex.compile_shapes(shapes)) + list(extra))
    graph = load_graph("jedi_data.ttl")
    graph, _ = inference.materialize(graph, cset, inference.InferenceConfig())
    return shex.shapes_report(shapes, graph, extra_rows=extra)


@pytest.mark.parametrize("shex_name", ["jedi_unqual.shex", "jedi_qual.shex"])
def test_jedi_shape_extensions(shex_name):
    report = _jedi_report(shex_name)
    assert _names(report["Jedi"]) == {
        "Yoda", "MaceWindu", "Obi-Wan", "Anakin", "Luke"}
    assert _names(report["JediStudent"]) == {
        "MaceWindu", "Obi-Wan", "Anakin", "Luke"}
    assert _names(report["JediMaster"]) == {"Obi-Wan"}
    assert _names(report["SuperJediMaster"]) == {"Yoda"}


def test_qualified_and_unqualified_agree_on_jedi_data():
    assert {k: v for k, v in _jedi_report("jedi_unqual.shex").items()} == \
        {k: v for k, v in _jedi_report("jedi_qual.shex").items()}


def test_xor_shape_verdicts():
    shapes = shex.parse_shexc(fixture_text("xor_human.shex"))
    valid = shex.shapes_report(shapes, load_graph("xor_human_valid.ttl"))
    assert _names(valid["Human"]) == {"Han", "Anakin"}
    invalid = shex.shapes_report(shapes, load_graph("xor_human_invalid.ttl"))
    assert _names(invalid["Human"]) == set()


def test_choice_binds_looser_than_sequence():
    """`a | b , c` groups as a | (b , c)."""
    shapes = shex.parse_shexc(
        "<S> { ( :a {} | :b {} , :c {} ) }")
    graph = rdf.parse_turtle(
        "@prefix : <http://example.org/> .\n"
        ":x :a :v .\n"
        ":y :b :v ; :c :v .\n"
        ":z :b :v .\n")
    report = shex.shapes_report(shapes, graph)
    assert _names(report["S"]) == {"x", "y"}


def test_plus_is_sugar_for_one_or_more():
    plus = shex.parse_shexc("<S> { :p xsd:string + }")
    explicit = shex.parse_shexc("<S> { :p xsd:string {1,} }")
    assert shex.compile_shapes(plus) == shex.compile_shapes(explicit)


def test_compilation_is_deterministic():
    text = fixture_text("xor_human.shex")
    once = rcf.serialize_rcf(shex.compile_shapes(shex.parse_shexc(text)))
    twice = rcf.serialize_rcf(shex.compile_shapes(shex.parse_shexc(text)))
    assert once == twice


def _shex_fixture_names():
    return sorted(os.path.basename(p)
                  for p in glob.glob(str(FIXTURES / "*.shex")))


@pytest.mark.parametrize("shex_name", _shex_fixture_names())
@pytest.mark.parametrize("data_name", [
    "jedi_data.ttl", "xor_human_valid.ttl", "xor_human_invalid.ttl"])
def test_compiled_rows_agree_with_direct_evaluation(shex_name, data_name):
    """Compiling to rows and evaluating extensions gives the same node sets
    as the shapes_report frontend, on every shape/data combination."""
    shapes = shex.parse_shexc(fixture_text(shex_name))
    graph = load_graph(data_name)
    report = shex.shapes_report(shapes, graph)
    cset = resolve(shex.compile_shapes(shapes))
    env = validator.build_env(graph, cset, validator.ValidationConfig())
    for shape in shapes:
        assert env.extension(ClassRef.defined(shape.name)) == \
            report[shape.name], shape.name


def test_value_set_restricts_and_forbids():
    shapes = shex.parse_shexc("<S> { :color ('red' 'green') }")
    graph = rdf.parse_turtle(
        "@prefix : <http://example.org/> .\n"
        ":ok :color 'red' .\n"
        ":bad :color 'blue' .\n"
        ":none :other 'red' .\n")
    report = shex.shapes_report(shapes, graph)
    # a value outside the set breaks the shape; having none fails min-card
    assert _names(report["S"]) == {"ok"}


def test_negated_constraint():
    shapes = shex.parse_shexc("<S> { ! :p {} }")
    graph = rdf.parse_turtle(
        "@prefix : <http://example.org/> .\n"
        ":with :p :v .\n"
        ":without :q :v .\n")
    report = shex.shapes_report(shapes, graph)
    assert _names(report["S"]) == {"without", "v"}


def test_unknown_shape_reference_is_rejected():
    shapes = shex.parse_shexc("<S> { :p @:Ghost }")
    with pytest.raises(shex.UnsupportedFeature):
        shex.compile_shapes(shapes)


def test_syntax_error_reports_offset():
    with pytest.raises(shex.ShexSyntaxError):
        shex.parse_shexc("<S> { :p ")
