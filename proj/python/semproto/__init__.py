"""Check query protocols against a server ontology and its database.

Documents can be passed as text or as a ``pathlib.Path`` to read them from.
Database arguments are directory paths.
"""

import json
import os
from pathlib import Path

from . import _core
from ._core import Error, InconsistentTraceError, ParseError, SchemaError, SemanticError

__all__ = [
    "Error",
    "InconsistentTraceError",
    "ParseError",
    "SchemaError",
    "SemanticError",
    "canonical",
    "check",
    "explain",
    "parse",
    "reachable",
    "step",
    "verify_db",
]


def _text(doc):
    if isinstance(doc, os.PathLike):
        return Path(doc).read_text(encoding="utf-8")
    if isinstance(doc, (dict, list)):
        return json.dumps(doc)
    return doc


def check(server, protocol, fail_fast=False):
    """Ontology-level conflicts, as a list of mismatch dicts."""
    return json.loads(_core.check(_text(server), _text(protocol), fail_fast))


def explain(server, protocol):
    """Human-readable description of every conflict."""
    return _core.explain(_text(server), _text(protocol))


def verify_db(server, protocol, db, paper_disjunction=False, oracle=False):
    """One verdict dict per conflicting query."""
    return json.loads(
        _core.verify_db(_text(server), _text(protocol), os.fspath(db), paper_disjunction, oracle)
    )


def step(server, protocol, db, trace, paper_disjunction=False):
    """Verdicts after the partial execution described by ``trace``."""
    return json.loads(
        _core.step(_text(server), _text(protocol), os.fspath(db), _text(trace), paper_disjunction)
    )


def reachable(server, protocol, db, query_id):
    """Whether some execution over ``db`` reaches the query (exhaustive search)."""
    return _core.reachable(_text(server), _text(protocol), os.fspath(db), query_id)


def canonical(protocol):
    """The protocol re-printed in canonical form."""
    return _core.canonical(_text(protocol))


def parse(protocol):
    """The protocol's syntax tree as nested dicts."""
    return json.loads(_core.protocol_json(_text(protocol)))
