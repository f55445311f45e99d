from typing import Any, Dict

from .exceptions import SchemaValidationError

_POSITIVE_INT = {"type": "integer", "minimum": 1}
_NUMBER = {"type": "number"}
_RANGE = {
    "type": "object",
    "properties": {"start": _NUMBER, "stop": _NUMBER, "step": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["start", "stop", "step"],
    "additionalProperties": False,
}

SCENARIO_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "system": {
            "type": "object",
            "properties": {
                "K": {"type": "integer", "minimum": 2},
                "R": {"type": "number", "exclusiveMinimum": 0},
                "alpha": {"type": "number", "exclusiveMinimum": 2},
                "noise_power_dbm": _NUMBER,
                "p_max_dbm": _NUMBER,
                "quad_orders": {
                    "type": "object",
                    "properties": {
                        key: _POSITIVE_INT
                        for key in ("L", "M", "Q", "N", "B", "integration", "fallback")
                    },
                    "additionalProperties": False,
                },
                "target_rates": {
                    "type": "object",
                    "properties": {
                        key: {"type": "number", "minimum": 0}
                        for key in ("rate_p", "rate_s", "rate_i", "rate_j")
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "simulation": {
            "type": "object",
            "properties": {
                "trials": _POSITIVE_INT,
                "seed": {"type": "integer", "minimum": 0},
                "block_size": _POSITIVE_INT,
                "confidence_z": {"type": "number", "exclusiveMinimum": 0},
                "ergodic_metric": {"enum": ["secondary", "sum", "first", "second"]},
            },
            "additionalProperties": False,
        },
        "validation": {
            "type": "object",
            "properties": {
                "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "probability_floor": {"type": "number", "minimum": 0},
                "half_widths": {"type": "number", "exclusiveMinimum": 0},
                "slope_tol": {"type": "number", "exclusiveMinimum": 0},
                "insufficient_below": {"type": "number", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "experiments": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {
                    "sweep": _RANGE,
                    "trials": _POSITIVE_INT,
                    "seed": {"type": "integer", "minimum": 0},
                    "analytic": {"type": "boolean"},
                    "params": {"type": "object"},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


def validate_schema(data: Any, schema: Dict[str, Any] = SCENARIO_SCHEMA) -> None:
    """
    Validate data against a JSON schema.
    """
    try:
        import jsonschema
    except ImportError:
        raise ImportError(
            "jsonschema is required for scenario validation. Install it with 'pip install jsonschema'."
        )

    try:
        jsonschema.validate(instance=data, schema=schema)
    except jsonschema.exceptions.ValidationError as e:
        field_path = "/".join(str(part) for part in e.absolute_path) or "<root>"
        raise SchemaValidationError(field_path, e.message)
