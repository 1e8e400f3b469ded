"""Versioned JSON graph files and the JSON schemas of emitted reports.

Graph file, version 1::

    {"version": 1,
     "vertices": [{"id": "a", "weight": 1.0}, ...],   # weight optional
     "base_vertex": "a",                              # optional, default first vertex
     "edges": [{"id": "e", "ends": ["a", "b"]}, ...]}

Weights must be given for every vertex or for none.
"""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .graph_core import Edge, GraphValidationError, WeightedUndirectedGraph

FORMAT_VERSION = 1


class SchemaError(ValueError):
    """Graph file does not match the schema; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


GRAPH_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "vertices", "edges"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": FORMAT_VERSION},
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "weight": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "base_vertex": {"type": "string"},
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "ends"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "ends": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                },
            },
        },
    },
}

_group = {
    "type": "object",
    "required": ["rank", "torsion"],
    "properties": {
        "rank": {"type": "integer", "minimum": 0},
        "torsion": {"type": "array", "items": {"type": "integer", "minimum": 2}},
    },
}

_law = {
    "type": "object",
    "required": ["density_kind", "atoms", "support", "total_mass", "params"],
    "properties": {
        "density_kind": {"enum": ["semicircular", "free_poisson_forward", "free_poisson_backward", "none"]},
        "atoms": {"type": "array", "items": {"type": "object", "required": ["location", "mass"]}},
        "support": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "total_mass": {"type": "number", "exclusiveMinimum": 0},
        "params": {"type": "object"},
    },
}

REPORT_SCHEMAS = {
    "directify": {
        "type": "object",
        "required": ["vertices", "dedges"],
        "properties": {
            "vertices": {"type": "array", "items": {"type": "string"}},
            "dedges": {
                "type": "array",
                "items": {"type": "object", "required": ["id", "source", "target", "op", "origin"]},
            },
        },
    },
    "validate": {
        "type": "object",
        "required": ["connected", "locally_finite", "strongly_connected_double", "edge_matrix_is_permutation", "excluded_case"],
        "properties": {"excluded_case": {"enum": ["none", "single_loop", "A2", "edgeless"]}},
    },
    "fp": {
        "type": "object",
        "required": ["eigenvalue", "weighting", "base_vertex"],
        "properties": {
            "eigenvalue": {"type": "number", "exclusiveMinimum": 0},
            "weighting": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        },
    },
    "ktheory": {
        "type": "object",
        "required": ["algebra", "k0", "k1", "unit_class"],
        "properties": {
            "algebra": {"enum": ["ck", "free"]},
            "k0": _group,
            "k1": _group,
            "unit_class": {
                "type": "object",
                "required": ["torsion", "free"],
                "properties": {
                    "torsion": {"type": "array", "items": {"type": "integer"}},
                    "free": {"type": "array", "items": {"type": "integer"}},
                },
            },
            "warnings": {"type": "array", "items": {"type": "string"}},
        },
    },
    "verify": {
        "type": "object",
        "required": ["depth", "basis_size", "passed", "checks"],
        "properties": {
            "checks": {
                "type": "array",
                "items": {"type": "object", "required": ["name", "passed", "max_residual"]},
            }
        },
    },
    "laws": {
        "type": "object",
        "required": ["edge", "case", "laws"],
        "properties": {
            "case": {"enum": ["loop", "unequal_mass", "equal_mass"]},
            "laws": {"type": "object", "additionalProperties": _law},
        },
    },
    "structure": {
        "type": "object",
        "required": ["edges", "a_mu", "A_set", "atom_masses", "factor_type", "intersects_compacts"],
        "properties": {
            "edges": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["edge", "case", "blocks"],
                    "properties": {"case": {"enum": ["loop", "unequal_mass", "equal_mass"]}},
                },
            },
            "factor_type": {"enum": ["finite", "semifinite"]},
        },
    },
    "bratteli": {
        "type": "object",
        "required": ["kind", "levels", "edges"],
        "properties": {"kind": {"enum": ["cuntz_core", "compressed_toeplitz_core", "toeplitz_zero_core"]}},
    },
    "kms": {
        "type": "object",
        "required": ["word", "value", "grade", "lambda", "beta", "max_generator_residual", "defect_weights", "perron"],
    },
    "error": {
        "type": "object",
        "required": ["error", "message"],
    },
}


def _locate(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def graph_from_json(doc: dict) -> WeightedUndirectedGraph:
    validator = jsonschema.Draft202012Validator(GRAPH_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise SchemaError(errors[0].message, _locate(errors[0]))
    verts = doc["vertices"]
    weights = {v["id"]: v["weight"] for v in verts if "weight" in v}
    if weights and len(weights) != len(verts):
        missing = next(v["id"] for v in verts if "weight" not in v)
        raise SchemaError(f"vertex {missing!r} has no weight but others do", "/vertices")
    try:
        return WeightedUndirectedGraph(
            tuple(v["id"] for v in verts),
            tuple(Edge(e["id"], tuple(e["ends"])) for e in doc["edges"]),
            weights or None,
            doc.get("base_vertex"),
        )
    except GraphValidationError as exc:
        raise SchemaError(str(exc), "/") from exc


def load_graph(path: str | Path) -> WeightedUndirectedGraph:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    return graph_from_json(doc)


def graph_to_json(g: WeightedUndirectedGraph) -> dict:
    verts = []
    for v in g.vertices:
        entry = {"id": v}
        if g.weights is not None:
            entry["weight"] = float(g.weights[v])
        verts.append(entry)
    return {
        "version": FORMAT_VERSION,
        "vertices": verts,
        "base_vertex": g.base_vertex,
        "edges": [{"id": e.id, "ends": list(e.ends)} for e in g.edges],
    }


def validate_report(command: str, report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMAS[command])
