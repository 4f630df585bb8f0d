"""JSON schemas for input files and command outputs."""

_prob = {"type": "number", "minimum": 0, "maximum": 1}
_value = {"type": ["integer", "string"]}

SPACE = {
    "type": "object",
    "required": ["variables"],
    "properties": {
        "variables": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {
                    "name": {"type": "string"},
                    "type": {"enum": ["int", "categorical"]},
                    "low": {"type": "integer"},
                    "high": {"type": "integer"},
                    "labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                },
            },
        }
    },
}

PRIOR = {
    "type": "object",
    "required": ["type", "space", "states"],
    "properties": {
        "type": {"enum": ["stationary", "dtmc"]},
        "space": SPACE,
        "states": {"type": "array", "items": {"type": "array", "items": _value}},
        "probs": {"type": "array", "items": _prob},
        "p_init": {"type": "array", "items": _prob},
        "P": {"type": "array", "items": {"type": "array", "items": _prob}},
    },
    "allOf": [
        {"if": {"properties": {"type": {"const": "stationary"}}}, "then": {"required": ["probs"]}},
        {"if": {"properties": {"type": {"const": "dtmc"}}}, "then": {"required": ["p_init", "P"]}},
    ],
}

TRAJECTORY = {
    "type": "object",
    "required": ["states"],
    "properties": {
        "id": {"type": ["string", "integer"]},
        "states": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _value}},
    },
}

_templates = {
    "type": "object",
    "properties": {
        "variable": {"type": "string"},
        "shapes": {"type": "array", "items": {"type": "string"}},
        "imax": {"type": "integer", "minimum": 2},
    },
}

CONFIG = {
    "type": "object",
    "properties": {
        "inference": {
            "type": "object",
            "properties": {
                "p_th": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "p_hat_th": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "ell_th": {"type": "integer", "minimum": 1},
                "alpha": {"type": "number", "exclusiveMinimum": 1},
                "epsilon": {"type": "number", "minimum": 0},
                "mc_samples": {"type": "integer", "minimum": 1},
                "conjunction_rule": {"enum": ["coverage", "epsilon"]},
                "seed": {"type": "integer", "minimum": 0},
                "max_rounds": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "pso": {
            "type": "object",
            "properties": {
                "swarm_size": {"type": "integer", "minimum": 2},
                "iterations": {"type": "integer", "minimum": 1},
                "inertia": {"type": "number", "exclusiveMinimum": 0},
                "c1": {"type": "number", "exclusiveMinimum": 0},
                "c2": {"type": "number", "exclusiveMinimum": 0},
                "vclamp": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "penalty": {
            "type": "object",
            "properties": {
                "rho": {"type": "number", "exclusiveMinimum": 0},
                "p_hat_th": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
            "additionalProperties": False,
        },
        "simulation": {
            "type": "object",
            "properties": {
                "case": {"enum": ["1", "2a", "2b", "3", "prior"]},
                "n": {"type": "integer", "minimum": 1},
                "L": {"type": "integer", "minimum": 1},
            },
        },
        "templates": _templates,
        "causal": {
            "type": "object",
            "required": ["causes"],
            "properties": {
                "causes": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "x": {"type": "string"},
                "y": {"type": "string"},
                "shapes": {"type": "array", "items": {"type": "string"}},
                "imax": {"type": "integer", "minimum": 2},
            },
        },
    },
}

INFOGAIN_OUT = {
    "type": "object",
    "required": ["beta", "gamma", "gain", "L"],
    "properties": {
        "formula": {"type": "string"},
        "beta": _prob,
        "gamma": _prob,
        "gain": {"type": "number", "minimum": 0},
        "L": {"type": "integer", "minimum": 1},
        "estimated": {"type": "boolean"},
    },
}

EVAL_OUT = {
    "type": "object",
    "required": ["formula", "beta", "m", "verdicts"],
    "properties": {
        "formula": {"type": "string"},
        "beta": _prob,
        "m": {"type": "integer", "minimum": 1},
        "verdicts": {"type": "array", "items": {"type": "boolean"}},
        "ids": {"type": "array"},
    },
}

_candidate = {
    "type": "object",
    "required": ["template", "formula", "feasible"],
    "properties": {
        "template": {"type": "string"},
        "formula": {"type": "string"},
        "feasible": {"type": "boolean"},
        "beta": _prob,
        "gamma": _prob,
        "gain": {"type": "number"},
        "eta": _prob,
    },
}

INFER_OUT = {
    "type": "object",
    "required": ["formula", "beta", "rounds", "size", "success", "patterns"],
    "properties": {
        "formula": {"type": "string"},
        "beta": _prob,
        "beta_exact": {"type": "string"},
        "rounds": {"type": "integer", "minimum": 1},
        "size": {"type": "integer", "minimum": 0},
        "success": {"type": "boolean"},
        "patterns": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["formula", "coverage", "gain"],
                "properties": {"candidates": {"type": "array", "items": _candidate}},
            },
        },
    },
}

CAUSAL_OUT = {
    "type": "object",
    "required": ["results"],
    "properties": {
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["cause", "eta", "excluded"],
                "properties": {"eta": _prob, "beta": _prob, "formula": {"type": "string"}},
            },
        },
        "excluded": {"type": "array", "items": {"type": "string"}},
    },
}
