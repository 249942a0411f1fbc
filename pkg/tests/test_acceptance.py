"""Acceptance gate: one test (and one pass/fail line) per release criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line before asserting,
so a plain run of this module yields a per-criterion checklist.
"""

import glob
import io
import json
import os
import random
import time
from decimal import Decimal

import pytest

from rdfcheck import catalog, cli, inference, rcf, rdf, shex, validator
from rdfcheck.model import ClassRef, resolve

import setalg
from conftest import (FIXTURES, fixture_text, load_graph, load_rows,
                      run_validation, violation_signature)
from test_validator import VERDICTS


def _record(number: int, ok: bool, note: str = ""):
    suffix = f" ({note})" if note else ""
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}{suffix}")
    assert ok, f"criterion {number} failed{suffix}"


# --------------------------------------------------------------------------
# 1. classification matrix reproduction

def test_criterion_1_catalog_matrix():
    start = time.monotonic()
    matrix = catalog.classification_matrix()
    counts_ok = (
        {k: v["count"] for k, v in matrix["context"].items()}
        == {"property": 49, "class": 20, "both": 12}
        and {k: v["count"] for k, v in matrix["complexity"].items()}
        == {"simple": 49, "sugar": 11, "complex": 21}
        and {k: v["count"] for k, v in matrix["dl"].items()}
        == {"expressible": 52, "not_expressible": 29}
        and matrix["total"] == 81)
    expected_percents = [
        ("context", "property", "60.49"),
        ("context", "class", "24.96"),
        ("context", "both", "14.81"),
        ("complexity", "simple", "60.49"),
        ("complexity", "sugar", "13.58"),
        ("complexity", "complex", "25.93"),
        ("dl", "expressible", "64.2"),
        ("dl", "not_expressible", "35.80"),
    ]
    off = [
        (dim, key, str(matrix[dim][key]["percent"]))
        for dim, key, want in expected_percents
        if abs(matrix[dim][key]["percent"] - Decimal(want)) > Decimal("0.01")
    ]
    fast = time.monotonic() - start < 1.0
    _record(1, counts_ok and fast and not off,
            f"percent cells off: {off}" if off else "")


# --------------------------------------------------------------------------
# 2. fixture corpus transcribed from worked examples

def _names(ext) -> set:
    return {t.iri.rsplit("/", 1)[1] for t in ext}


def test_criterion_2_fixture_corpus():
    start = time.monotonic()
    failures = []

    for rcf_name, data_name, overrides, expected in VERDICTS:
        report = run_validation(rcf_name, data_name, **overrides)
        if report.conforms is not expected:
            failures.append((rcf_name, data_name, overrides))

    # shape extensions over the Jedi graph (inverse-property row applied)
    shapes = shex.parse_shexc(fixture_text("jedi_unqual.shex"))
    extra = rcf.parse_rcf(fixture_text("jedi_inverse.rcf"))
    cset = resolve(list(shex.compile_shapes(shapes)) + list(extra))
    graph, _ = inference.materialize(
        load_graph("jedi_data.ttl"), cset, inference.InferenceConfig())
    shape_report = shex.shapes_report(shapes, graph, extra_rows=extra)
    if not (_names(shape_report["SuperJediMaster"]) == {"Yoda"}
            and _names(shape_report["JediMaster"]) == {"Obi-Wan"}
            and _names(shape_report["JediStudent"])
            == {"MaceWindu", "Obi-Wan", "Anakin", "Luke"}):
        failures.append(("jedi shapes",))

    # controlled-vocabulary violation names the offending scheme
    vocab = run_validation("vocab.rcf", "vocab_invalid.ttl")
    if not any("BooksAboutBirds" in v.detail for v in vocab.violations):
        failures.append(("vocab detail",))

    # default-value materialization adds the four triples verbatim
    dcset = resolve(load_rows("defaults.rcf"))
    dgraph = load_graph("defaults_data.ttl")
    added = set(inference.apply_default_values(dgraph, dcset).triples) \
        - set(dgraph.triples)
    if len(added) != 4:
        failures.append(("default values",))

    pairs = {(r, d) for r, d, _, _ in VERDICTS}
    elapsed = time.monotonic() - start
    _record(2, not failures and len(pairs) >= 25 and elapsed < 5.0,
            f"{len(pairs)} pairs in {elapsed:.2f}s"
            + (f"; failures: {failures}" if failures else ""))


# --------------------------------------------------------------------------
# 3. extension() against the brute-force set-algebra oracle

def test_criterion_3_oracle_equivalence():
    start = time.monotonic()
    rng = random.Random(42)
    mismatches = 0
    for _ in range(1000):
        graph = setalg.random_graph(rng)
        tree = setalg.random_tree(rng, depth=3)
        root, rows = setalg.compile_tree(tree)
        env = validator.build_env(
            graph, resolve(rows), validator.ValidationConfig())
        if set(env.extension(root)) != setalg.oracle_extension(tree, graph):
            mismatches += 1
    elapsed = time.monotonic() - start
    _record(3, mismatches == 0 and elapsed < 60.0,
            f"1000 trials, {mismatches} mismatches, {elapsed:.1f}s")


# --------------------------------------------------------------------------
# 4. materialization fixpoint properties

def test_criterion_4_inference_properties():
    from test_inference import RULES, _tset
    rng = random.Random(99)
    ok = True
    for _ in range(200):
        triples = [
            t for g in [setalg.random_graph(rng)] for t in g.triples]
        g = rdf.Graph(triples)
        once, _ = inference.materialize(g, RULES)
        twice, _ = inference.materialize(once, RULES)
        naive, _ = inference.materialize(g, RULES, strategy="naive")
        sub, _ = inference.materialize(
            rdf.Graph(triples[: len(triples) // 2]), RULES)
        ok = ok and _tset(once) >= _tset(g) \
            and _tset(twice) == _tset(once) \
            and _tset(naive) == _tset(once) \
            and _tset(sub) <= _tset(once)
        if not ok:
            break
    # every fixture pair reaches a fixpoint under the default cap
    for path in sorted(glob.glob(str(FIXTURES / "*.rcf"))):
        stem = os.path.basename(path)[:-len(".rcf")]
        cset = resolve(load_rows(os.path.basename(path)))
        for data in sorted(glob.glob(str(FIXTURES / f"{stem}_*.ttl"))):
            for una in (True, False):
                inference.materialize(
                    load_graph(os.path.basename(data)), cset,
                    inference.InferenceConfig(una=una))
    _record(4, ok)


# --------------------------------------------------------------------------
# 5. round-trip fixed points and frontend equivalence

def test_criterion_5_round_trips():
    ok = True
    for path in sorted(glob.glob(str(FIXTURES / "*.ttl"))):
        g = load_graph(os.path.basename(path))
        text = rdf.serialize_ntriples(g)
        again = rdf.parse_ntriples(text)
        ok = ok and rdf.serialize_ntriples(again) == text \
            and rdf.canonical_blank_relabeling(again) \
            == rdf.canonical_blank_relabeling(g)
    for path in sorted(glob.glob(str(FIXTURES / "*.rcf"))):
        rows = load_rows(os.path.basename(path))
        text = rcf.serialize_rcf(rows)
        ok = ok and rcf.parse_rcf(text) == rows \
            and rcf.serialize_rcf(rcf.parse_rcf(text)) == text
    for shex_path in sorted(glob.glob(str(FIXTURES / "*.shex"))):
        shapes = shex.parse_shexc(fixture_text(os.path.basename(shex_path)))
        cset = resolve(shex.compile_shapes(shapes))
        for data in ("jedi_data.ttl", "xor_human_valid.ttl",
                     "xor_human_invalid.ttl"):
            graph = load_graph(data)
            report = shex.shapes_report(shapes, graph)
            env = validator.build_env(
                graph, cset, validator.ValidationConfig())
            ok = ok and all(
                env.extension(ClassRef.defined(s.name)) == report[s.name]
                for s in shapes)
    _record(5, ok)


# --------------------------------------------------------------------------
# 6. closed-world / unique-name dependency of the sentinel types

# (type name, constraint fixture, data fixture, demonstrable axes)
# Functional and inverse-functional violations always cite present triples,
# so only their unique-name axis is observable through the report; the
# closed-world flag is checked against the catalog but not toggled.
SENTINELS = [
    ("Minimum Unqualified Cardinality", "sentinel_min.rcf",
     "sentinel_card_data.ttl", ("cwa", "una")),
    ("Maximum Unqualified Cardinality", "sentinel_max.rcf",
     "sentinel_card_data.ttl", ("cwa", "una")),
    ("Existential Quantifications", "sentinel_exists.rcf",
     "sentinel_quant_data.ttl", ("cwa", "una")),
    ("Universal Quantifications", "sentinel_forall.rcf",
     "sentinel_quant_data.ttl", ("cwa", "una")),
    ("Functional Properties", "sentinel_functional.rcf",
     "sentinel_functional_data.ttl", ("una",)),
    ("Inverse-Functional Properties", "sentinel_invfunctional.rcf",
     "sentinel_invfunctional_data.ttl", ("una",)),
    ("Individual Inequality", "sentinel_indneq.rcf",
     "sentinel_indneq_data.ttl", ("cwa", "una")),
    ("Context-Specific Exclusive OR of Property Groups", "sentinel_xor.rcf",
     "sentinel_xor_merge.ttl", ("cwa", "una")),
]


def _snapshot(rcf_name, data_name, **overrides):
    report = run_validation(rcf_name, data_name, infer=True, **overrides)
    return (report.conforms, violation_signature(report))


def test_criterion_6_cwa_una_behavior_table():
    wrong = []
    for type_name, rcf_name, data_name, axes in SENTINELS:
        entry = catalog.entry(type_name)
        base = _snapshot(rcf_name, data_name)
        if "cwa" in axes:
            changed = _snapshot(rcf_name, data_name, cwa=False) != base
            if changed is not entry.cwa_dependent:
                wrong.append((type_name, "cwa", changed))
        if "una" in axes:
            changed = _snapshot(rcf_name, data_name, una=False) != base
            if changed is not entry.una_dependent:
                wrong.append((type_name, "una", changed))
    _record(6, not wrong, f"mismatches: {wrong}" if wrong else "")


# --------------------------------------------------------------------------
# 7. byte-identical reports across runs

def _corpus_json() -> bytes:
    chunks = []
    for rcf_name, data_name, overrides, _ in VERDICTS:
        argv = ["validate", "--data", str(FIXTURES / data_name),
                "--constraints", str(FIXTURES / rcf_name),
                "--format", "json"]
        if overrides.get("infer"):
            argv.append("--infer")
        if overrides.get("una") is False:
            argv += ["--no-una", "--infer"]
        buffer = io.StringIO()
        import contextlib
        with contextlib.redirect_stdout(buffer):
            cli.main(argv)
        chunks.append(buffer.getvalue())
    return "".join(chunks).encode("utf-8")


def test_criterion_7_deterministic_reports():
    first = _corpus_json()
    second = _corpus_json()
    _record(7, first == second,
            f"{len(first)} bytes per run")
