"""Run reports: deterministic JSON with a jsonschema contract.

Exponent vectors are always fraction strings. Reports carry no timestamps,
so identical inputs and seeds give identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import jsonschema

from . import __version__

FRACTION = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
QVEC = {"type": "array", "items": FRACTION}
BRACKET = {
    "type": "object",
    "required": ["lower", "upper"],
    "properties": {"lower": {"type": "number"}, "upper": {"type": "number"}},
}

RESULT_SCHEMAS: dict[str, dict] = {
    "polytope": {
        "type": "object",
        "required": ["mode", "feasible", "vertices", "affine_dimension", "constraints", "family"],
        "properties": {
            "mode": {"enum": ["necessary", "sufficient"]},
            "feasible": {"type": "boolean"},
            "vertices": {"type": "array", "items": QVEC},
            "p_vertices": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
            "affine_dimension": {"type": "integer"},
            "constraints": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["coeffs", "relation", "rhs", "tag"],
                    "properties": {
                        "coeffs": QVEC,
                        "relation": {"enum": ["==", "<=", ">="]},
                        "rhs": FRACTION,
                        "tag": {"type": "string"},
                    },
                },
            },
            "family": {"type": "array", "items": {"type": "string"}},
        },
    },
    "check": {
        "type": "object",
        "required": ["mode", "results"],
        "properties": {
            "mode": {"enum": ["necessary", "sufficient"]},
            "results": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["q", "p", "inside", "violated", "critical_subspaces"],
                    "properties": {
                        "q": QVEC,
                        "p": {"type": "array", "items": {"type": "string"}},
                        "inside": {"type": "boolean"},
                        "violated": {"type": "array", "items": {"type": "string"}},
                        "critical_subspaces": {"type": "array", "items": {"type": "string"}},
                    },
                },
            },
        },
    },
    "witness": {
        "type": "object",
        "required": ["witness", "parameter", "predicted", "rows", "slopes", "complete"],
        "properties": {
            "witness": {"type": "string"},
            "parameter": {"type": "string"},
            "one_sided": {"type": "boolean"},
            "predicted": {"type": "object"},
            "rows": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["param", "omega", "images"],
                    "properties": {
                        "param": {"type": "number"},
                        "omega": {"type": "number"},
                        "images": {"type": "array", "items": BRACKET},
                        "ratio": {"type": "number"},
                    },
                },
            },
            "slopes": {"type": "object"},
            "checks": {"type": "object"},
            "complete": {"type": "boolean"},
            "q": QVEC,
            "predicted_ratio_exponent": FRACTION,
        },
    },
    "frames": {
        "type": "object",
        "required": ["fields", "brackets", "frame_pairs", "extreme_points", "conjectural"],
        "properties": {
            "frame_pairs": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
            "extreme_points": {"type": "array", "items": QVEC},
            "conjectural": {"type": "boolean"},
        },
    },
    "montecarlo": {
        "type": "object",
        "required": ["estimate", "stderr", "samples"],
        "properties": {
            "estimate": {"type": "number"},
            "stderr": {"type": "number"},
            "samples": {"type": "integer"},
            "sweep": {"type": "array"},
        },
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["tool", "version", "command", "config", "result"],
    "properties": {
        "tool": {"const": "heisbl"},
        "version": {"type": "string"},
        "command": {"enum": sorted(RESULT_SCHEMAS)},
        "seed": {"type": ["integer", "null"]},
        "config": {"type": "object"},
        "result": {"type": "object"},
    },
}


def fraction_str(q: Fraction) -> str:
    return str(Fraction(q))


def qvec(q) -> list[str]:
    return [fraction_str(v) for v in q]


def pvec(q) -> list[str]:
    return ["inf" if v == 0 else fraction_str(1 / Fraction(v)) for v in q]


def make_report(command: str, config: dict, result: dict, seed: int | None = None) -> dict:
    report = {
        "tool": "heisbl",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "result": result,
    }
    validate(report)
    return report


def validate(report: Any) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)
    jsonschema.validate(report["result"], RESULT_SCHEMAS[report["command"]])


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> dict:
    report = json.loads(text)
    validate(report)
    return report
