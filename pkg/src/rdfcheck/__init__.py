"""Generic RDF constraint validation.

An RDF data model with parsers (N-Triples, a Turtle subset), a uniform
constraint row model with a typed catalog of constraint types, a ShEx-compact
frontend, forward-chaining inference, and a validator with configurable
closed-world / unique-name semantics.
"""

from . import catalog, inference, model, rcf, rdf, shex, validator

__all__ = ["catalog", "inference", "model", "rcf", "rdf", "shex",
           "validator"]
__version__ = "0.1.0"
