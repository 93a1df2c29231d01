"""JSON schemas for CLI job configs and the reports the CLI writes.

Configs are YAML documents; after parsing they are validated against the
schemas below. Complex numbers are written either as plain numbers or as
strings Python's ``complex()`` accepts, e.g. ``"0.5-1j"``.
"""
from __future__ import annotations

SERIES_KINDS = ["taylor", "chebyshev", "double_chebyshev"]

_complex = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^[-+0-9.eEj ]+$"}]}
_complex_list = {"type": "array", "items": _complex, "minItems": 2}
_eps = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
_seed = {"type": "integer", "minimum": 0}

QLT_PROBLEM = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": SERIES_KINDS},
        "eps": _eps,
        "x": _complex_list,
        "y": _complex_list,
        "random": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "complex": {"type": "boolean"},
                "bound": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["n"],
        },
        "K_override": {"type": ["integer", "null"], "minimum": 0},
    },
    "required": ["eps"],
    "oneOf": [{"required": ["x", "y"]}, {"required": ["random"]}],
}

LAPLACE_PROBLEM = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "f_values": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "t_grid": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "M": {"type": "number", "minimum": 0},
        "z_points": _complex_list,
        "k": {"type": "number", "exclusiveMinimum": 0},
        "a": {"type": "number"},
        "t0": {"type": "number", "minimum": 0},
        "eps": _eps,
        "kind": {"enum": SERIES_KINDS},
    },
    "required": ["f_values", "z_points", "k", "a", "eps"],
    "oneOf": [{"required": ["M"]}, {"required": ["t_grid"]}],
}

SYNTHESIZE_CONFIG = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "problem": QLT_PROBLEM,
        "seed": _seed,
        "cost_model": {"enum": ["ir", "two_qubit"]},
    },
    "required": ["problem"],
}

VERIFY_CONFIG = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "problem": QLT_PROBLEM,
        "laplace": LAPLACE_PROBLEM,
        "simulate": {"type": "boolean"},
        "state": _complex_list,
        "seed": _seed,
        "cost_model": {"enum": ["ir", "two_qubit"]},
    },
    "oneOf": [{"required": ["problem"]}, {"required": ["laplace"]}],
}

SCALING_CONFIG = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "scaling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "eps": {"type": "array", "items": _eps},
                "kind": {"enum": SERIES_KINDS},
                "bound": {"type": "number", "exclusiveMinimum": 0},
                "cost_model": {"enum": ["ir", "two_qubit"]},
            },
            "required": ["n", "eps"],
        },
        "seed": _seed,
    },
    "required": ["scaling"],
}

DEMO_CONFIG = {
    "type": "object",
    "additionalProperties": False,
    "properties": {"seed": _seed},
}

CONFIG_SCHEMAS = {
    "synthesize": SYNTHESIZE_CONFIG,
    "verify": VERIFY_CONFIG,
    "scaling": SCALING_CONFIG,
    "demo": DEMO_CONFIG,
}

_registers = {
    "type": "object",
    "additionalProperties": {"type": "integer", "minimum": 0},
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qlaplace synthesize/verify report",
    "type": "object",
    "properties": {
        "command": {"enum": ["synthesize", "verify"]},
        "problem": {"enum": ["qlt", "laplace"]},
        "seed": _seed,
        "kind": {"enum": SERIES_KINDS},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "K": {"type": "integer", "minimum": 0},
        "terms": {"type": "integer", "minimum": 1},
        "size": {"type": "integer", "minimum": 0},
        "depth": {"type": "integer", "minimum": 0},
        "overhead_size": {"type": "integer", "minimum": 0},
        "overhead_depth": {"type": "integer", "minimum": 0},
        "total_qubits": {"type": "integer", "minimum": 1},
        "system_qubits": {"type": "integer", "minimum": 1},
        "certificate_ancillas": {"type": "integer", "minimum": 0},
        "work_qubits": {"type": "integer", "minimum": 0},
        "predicted_ancilla_count": {"type": "integer", "minimum": 0},
        "registers": _registers,
        "controlled_diagonal_invocations": {"type": "integer", "minimum": 0},
        "diagonal_eps": {"type": "number", "minimum": 0},
        "cost_model": {"enum": ["ir", "two_qubit"]},
        "measured_error": {"type": ["number", "null"], "minimum": 0},
        "passed": {"type": ["boolean", "null"]},
        "success_probability": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "laplace": {"type": "object"},
    },
    "required": [
        "command",
        "problem",
        "kind",
        "alpha",
        "eps",
        "K",
        "size",
        "depth",
        "total_qubits",
        "registers",
        "controlled_diagonal_invocations",
    ],
    "allOf": [
        {
            "if": {"properties": {"command": {"const": "verify"}}},
            "then": {"required": ["measured_error", "passed", "success_probability"]},
        }
    ],
}

DEMO_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qlaplace demo report",
    "type": "object",
    "properties": {
        "demo": {"enum": ["ztransform", "continuous-laplace", "fourier-diagonal"]},
        "seed": _seed,
        "checks": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "passed": {"type": "boolean"},
    },
    "required": ["demo", "checks", "passed"],
}
