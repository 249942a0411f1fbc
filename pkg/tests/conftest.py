"""Shared helpers: fixture loading and a one-call validation runner."""

from pathlib import Path

import pytest

from rdfcheck import inference, rcf, rdf, shex, validator
from rdfcheck.model import resolve

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_graph(name: str) -> rdf.Graph:
    text = fixture_text(name)
    if name.endswith(".nt"):
        return rdf.parse_ntriples(text)
    return rdf.parse_turtle(text)


def load_rows(name: str) -> list:
    if name.endswith(".shex"):
        return list(shex.compile_shapes(shex.parse_shexc(fixture_text(name))))
    return list(rcf.parse_rcf(fixture_text(name)))


def run_validation(constraint_file: str, data_file: str, *,
                   cwa: bool = True, una: bool = True,
                   infer: bool = False) -> validator.Report:
    """Load a constraint/data fixture pair and validate it.

    Mirrors the CLI pipeline: default values and materialization run
    before validation whenever inference is enabled.
    """
    cset = resolve(load_rows(constraint_file))
    graph = load_graph(data_file)
    config = validator.ValidationConfig(cwa=cwa, una=una, infer=infer)
    partition = None
    if config.infer:
        graph = inference.apply_default_values(graph, cset)
        graph, partition = inference.materialize(
            graph, cset, inference.InferenceConfig(una=config.una))
    return validator.validate(graph, cset, config, partition)


def violation_signature(report: validator.Report) -> tuple:
    return tuple((v.constraint_id, v.severity.name, rdf.n3(v.focus), v.detail)
                 for v in report.violations)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
