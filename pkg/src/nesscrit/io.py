"""Model files (JSON), CSV writers and canonical JSON reports.

Model file layout::

    {
      "generators": [{"span": 2, "odd": [{"nu": 1, "g": 0}, {"nu": 1, "g": 0.1}],
                      "even": [{"nu": 0, "g": 0}, {"nu": 0, "g": 0}]}],
      "hamiltonian": {"couplings": [{"offset": 1, "species": ["odd", "even"], "value": 0.5}]},
      "chain": "infinite"            # or {"finite": {"L": 8, "periodic": true}}
    }

Phases are in radians.  ``hamiltonian`` is optional.  Unknown keys are rejected.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import jsonschema

from .errors import ModelValidationError
from .model import (
    ComplexAmplitude,
    FiniteChain,
    HamiltonianStencil,
    InfiniteChain,
    LatticeModel,
    LindbladGenerator,
)

_AMPLITUDE = {
    "type": "object",
    "properties": {"nu": {"type": "number", "minimum": 0}, "g": {"type": "number"}},
    "required": ["nu"],
    "additionalProperties": False,
}

MODEL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "generators": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "span": {"type": "integer", "minimum": 1},
                    "odd": {"type": "array", "items": _AMPLITUDE},
                    "even": {"type": "array", "items": _AMPLITUDE},
                },
                "required": ["span", "odd", "even"],
                "additionalProperties": False,
            },
        },
        "hamiltonian": {
            "type": ["object", "null"],
            "properties": {
                "couplings": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "offset": {"type": "integer"},
                            "species": {
                                "type": "array",
                                "items": {"enum": ["odd", "even"]},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                            "value": {"type": "number"},
                        },
                        "required": ["offset", "species", "value"],
                        "additionalProperties": False,
                    },
                }
            },
            "required": ["couplings"],
            "additionalProperties": False,
        },
        "chain": {
            "oneOf": [
                {"const": "infinite"},
                {
                    "type": "object",
                    "properties": {"infinite": {"type": "object", "maxProperties": 0}},
                    "required": ["infinite"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "finite": {
                            "type": "object",
                            "properties": {
                                "L": {"type": "integer", "minimum": 1},
                                "periodic": {"type": "boolean"},
                            },
                            "required": ["L"],
                            "additionalProperties": False,
                        }
                    },
                    "required": ["finite"],
                    "additionalProperties": False,
                },
            ]
        },
    },
    "required": ["generators"],
    "additionalProperties": False,
}

_SPECIES = ("odd", "even")


def _path(err: jsonschema.ValidationError) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def model_from_dict(data) -> LatticeModel:
    """Validate against :data:`MODEL_SCHEMA`, then build the model (which checks the remaining invariants)."""
    validator = jsonschema.Draft202012Validator(MODEL_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ModelValidationError(f"model file invalid at {_path(err)}: {err.message}")
    gens = []
    for k, entry in enumerate(data["generators"]):
        try:
            odd = tuple(ComplexAmplitude(a["nu"], a.get("g", 0.0)) for a in entry["odd"])
            even = tuple(ComplexAmplitude(a["nu"], a.get("g", 0.0)) for a in entry["even"])
            gens.append(LindbladGenerator(entry["span"], odd, even))
        except ModelValidationError as exc:
            raise ModelValidationError(f"generator {k}: {exc}") from None
    ham = None
    if data.get("hamiltonian") is not None:
        couplings = {}
        for c in data["hamiltonian"]["couplings"]:
            key = (c["offset"], tuple(c["species"]))
            couplings[key] = couplings.get(key, 0.0) + c["value"]
        ham = HamiltonianStencil(couplings)
    chain = data.get("chain", "infinite")
    if isinstance(chain, dict) and "finite" in chain:
        fin = chain["finite"]
        chain = FiniteChain(fin["L"], fin.get("periodic", True))
    else:
        chain = InfiniteChain()
    return LatticeModel(tuple(gens), ham, chain)


def model_to_dict(model: LatticeModel) -> dict:
    """Canonical form: phases in ``(-pi, pi]``, explicit chain, couplings sorted."""

    def amp(a: ComplexAmplitude):
        return {"nu": a.nu, "g": a.g}

    out = {
        "generators": [
            {"span": g.span, "odd": [amp(a) for a in g.odd], "even": [amp(a) for a in g.even]}
            for g in model.generators
        ]
    }
    if model.hamiltonian is not None:
        out["hamiltonian"] = {
            "couplings": [
                {"offset": off, "species": [_SPECIES[a], _SPECIES[b]], "value": v}
                for (off, (a, b)), v in sorted(model.hamiltonian.couplings.items())
            ]
        }
    if model.is_finite:
        out["chain"] = {"finite": {"L": model.chain.L, "periodic": model.chain.periodic}}
    else:
        out["chain"] = "infinite"
    return out


def load_model(path) -> LatticeModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelValidationError(f"cannot read model file {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelValidationError(f"model file {path} is not valid JSON: {exc}") from None
    return model_from_dict(data)


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _finite(obj):
    """Replace non-finite floats by ``None`` so the output is strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    plain = json.loads(json.dumps(obj, default=_json_default))
    return json.dumps(_finite(plain), sort_keys=True, indent=2, allow_nan=False) + "\n"


def dump_model(model: LatticeModel) -> str:
    return dumps(model_to_dict(model))


def _fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if v is None:
        return "nan"
    return repr(float(v))


def format_csv(header, rows, metadata: dict | None = None) -> str:
    """CSV text with ``\\n`` line ends; ``metadata`` goes into leading ``#`` comment lines."""
    lines = []
    for key, value in sorted((metadata or {}).items()):
        lines.append(f"# {key}: {value}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows, metadata: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(format_csv(header, rows, metadata), newline="\n")
    return path


def read_csv(path) -> list[dict]:
    """Rows of a CSV written by :func:`write_csv` (comment lines skipped), values as floats."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [{k: float(v) for k, v in row.items()} for row in reader]
