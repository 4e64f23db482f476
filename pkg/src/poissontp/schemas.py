"""JSON schemas for every document the CLI reads or writes."""

from __future__ import annotations

import jsonschema

SCHEMA_VERSION = "1.0"

_num = {"type": "number"}
_num_or_null = {"type": ["number", "null"]}
_rows = {"type": "array", "items": {"type": "array", "items": _num}}

MATRIX = {
    "type": "object",
    "required": ["rows", "cols", "re"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "re": _rows,
        "im": _rows,
    },
}

VECTOR = {
    "oneOf": [
        {
            "type": "object",
            "required": ["re"],
            "properties": {"re": {"type": "array", "items": _num}, "im": {"type": "array", "items": _num}},
        },
        {"type": "array", "items": _num},
    ]
}

STATE = {
    "type": "object",
    "properties": {"sector": {"type": "integer", "minimum": 0}, "vector": VECTOR, "label": {"type": "string"}},
    "oneOf": [{"required": ["vector"]}, {"required": ["label"]}],
}

SECTOR = {
    "oneOf": [
        {
            "type": "object",
            "required": ["kind", "dim"],
            "properties": {
                "kind": {"const": "quantum"},
                "dim": {"type": "integer", "minimum": 1},
                "hbar": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        {
            "type": "object",
            "required": ["kind", "points"],
            "properties": {
                "kind": {"const": "classical"},
                "points": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            },
        },
    ]
}

BUNDLE = {
    "type": "object",
    "required": ["sectors"],
    "properties": {
        "sectors": {"type": "array", "items": SECTOR, "minItems": 1},
        "states": {"type": "array", "items": STATE},
    },
}

CHECK = {
    "type": "object",
    "required": ["name", "sector", "trials", "worst", "tol", "pass", "note"],
    "properties": {
        "name": {"type": "string"},
        "sector": {"type": ["integer", "null"]},
        "trials": {"type": "integer", "minimum": 0},
        "worst": _num_or_null,
        "tol": _num,
        "pass": {"type": "boolean"},
        "note": {"type": "string"},
    },
}

REPORT = {
    "type": "object",
    "required": ["suite", "pass", "checks", "config"],
    "properties": {
        "suite": {"enum": ["qm", "cm", "reconstruction", "lattice"]},
        "pass": {"type": "boolean"},
        "checks": {"type": "array", "items": CHECK},
        "config": {"type": "object"},
    },
}

TRAJECTORY = {
    "type": "object",
    "required": ["method", "trajectory"],
    "properties": {
        "method": {"enum": ["exact", "rk4"]},
        "hbar": _num,
        "trajectory": {
            "type": "array",
            "items": {"type": "object", "required": ["t", "state"], "properties": {"t": _num, "state": STATE}},
        },
        "compare": {
            "type": "object",
            "required": ["max_distance", "tol", "pass"],
            "properties": {"max_distance": _num, "tol": _num, "pass": {"type": "boolean"}},
        },
    },
}

RECONSTRUCT = {
    "type": "object",
    "required": ["blocks", "span_dims", "assoc_residual", "oracle_residual", "pass", "report"],
    "properties": {
        "blocks": {"type": "array", "items": {"type": "integer"}},
        "span_dims": {"type": "array", "items": {"type": "integer"}},
        "assoc_residual": _num,
        "oracle_residual": _num,
        "pass": {"type": "boolean"},
        "report": REPORT,
    },
}

HBAR = {
    "type": "object",
    "required": ["hbar_est", "per_sector", "pass"],
    "properties": {
        "hbar_est": _num,
        "pass": {"type": "boolean"},
        "per_sector": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["sector", "hbar_true", "hbar_est", "rel_error"],
                "properties": {"sector": {"type": "integer"}, "hbar_true": _num, "hbar_est": _num, "rel_error": _num},
            },
        },
    },
}

LATTICE = {
    "type": "object",
    "required": ["dim", "pairs", "orthomodular_pass", "covering_pass", "pass", "report"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "pairs": {"type": "integer", "minimum": 1},
        "orthomodular_pass": {"type": "boolean"},
        "covering_pass": {"type": "boolean"},
        "pass": {"type": "boolean"},
        "report": REPORT,
    },
}

OBSERVABLE = {
    "type": "object",
    "required": ["terms"],
    "properties": {
        "terms": {
            "type": "array",
            "items": {"type": "object", "required": ["re", "state"], "properties": {"re": _num, "im": _num, "state": STATE}},
        },
        "operator": {"type": "object", "additionalProperties": MATRIX},
    },
}

# Order matters: the most specific document kinds come first.
KINDS = {
    "reconstruct": RECONSTRUCT,
    "lattice": LATTICE,
    "hbar": HBAR,
    "report": REPORT,
    "trajectory": TRAJECTORY,
    "observable": OBSERVABLE,
    "bundle": BUNDLE,
    "matrix": MATRIX,
}


def identify(doc) -> str:
    """Name of the first schema ``doc`` satisfies.

    Raises:
        jsonschema.ValidationError: if no schema matches.
    """
    errors = []
    for kind, schema in KINDS.items():
        try:
            jsonschema.validate(doc, schema)
            return kind
        except jsonschema.ValidationError as exc:
            errors.append(exc)
    best = jsonschema.exceptions.best_match(errors)
    raise best if best is not None else jsonschema.ValidationError("unrecognized document")
