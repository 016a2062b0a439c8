"""Reading chain specification documents.

A document is a JSON object::

    {
      "version": 1,
      "stages": [{"tick": 0, "outcomes": {"x1": "1/2", "x2": 0.5}}, ...],
      "kernels": [{"source": ["x1", "x2"], "target": ["y1", "y2"],
                   "rows": [[1, 0], [0, 1]]}],
      "realized": ["x1", "y1"],
      "frame": {"anchor_stage": 1}
    }

Probabilities are JSON numbers or strings holding a decimal or ``"a/b"``
rational.  Outcome order is declaration order.  Loading only checks the
document's shape; the chain invariants are left to
:func:`timeinfo.events.validate_chain`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import TimeInfoError
from .events import OperatorKernel, ProcessChain, TimeMomentSet

SPEC_VERSION = 1
BUNDLED = ("fig1a.json", "fig1b.json", "fig3.json", "fig4.json", "merge3.json", "refine2.json")

_PROB = {
    "oneOf": [
        {"type": "number", "minimum": 0},
        {"type": "string", "pattern": r"^\s*(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?\s*(/\s*\d+\s*)?$"},
    ]
}
_LABELS = {"type": "array", "items": {"type": "string", "minLength": 1}, "minItems": 1}

SCHEMA = {
    "type": "object",
    "required": ["version", "stages"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": SPEC_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "stages": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["tick", "outcomes"],
                "additionalProperties": False,
                "properties": {
                    "tick": {"type": "integer", "minimum": 0},
                    "outcomes": {
                        "type": "object",
                        "minProperties": 1,
                        "additionalProperties": _PROB,
                    },
                },
            },
        },
        "kernels": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["rows"],
                "additionalProperties": False,
                "properties": {
                    "source": _LABELS,
                    "target": _LABELS,
                    "rows": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": "array", "minItems": 1, "items": _PROB},
                    },
                },
            },
        },
        "realized": {"type": "array", "items": {"type": "string"}},
        "artificial": {"type": "boolean"},
        "frame": {
            "type": "object",
            "required": ["anchor_stage"],
            "additionalProperties": False,
            "properties": {"anchor_stage": {"type": "integer", "minimum": 0}},
        },
    },
}


class SpecError(TimeInfoError):
    """The document could not be parsed or does not match the schema."""


@dataclass(frozen=True, eq=False)
class ChainDocument:
    chain: ProcessChain
    name: str
    frame_anchor: int | None = None


def parse_probability(value) -> float:
    if isinstance(value, str):
        return float(Fraction(value.replace(" ", "")))
    return float(value)


def _where(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out.lstrip(".") or "<document>"


def _kernel(spec: dict, k: int, src_labels, tgt_labels) -> OperatorKernel:
    rows = spec["rows"]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SpecError(f"kernels[{k}].rows: rows have different lengths")
    try:
        matrix = np.array([[parse_probability(v) for v in r] for r in rows])
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"kernels[{k}].rows: {exc}") from None
    source, target = spec.get("source"), spec.get("target")
    for axis, labels, n in (("source", source, matrix.shape[0]), ("target", target, width)):
        if labels is not None and len(labels) != n:
            raise SpecError(f"kernels[{k}].{axis}: {len(labels)} labels for {n} entries")
    # labeled axes may list outcomes in any order; align them with the stages
    if source is not None and sorted(source) == sorted(src_labels) and len(set(source)) == len(source):
        matrix = matrix[[source.index(l) for l in src_labels], :]
        source = list(src_labels)
    if target is not None and sorted(target) == sorted(tgt_labels) and len(set(target)) == len(target):
        matrix = matrix[:, [target.index(l) for l in tgt_labels]]
        target = list(tgt_labels)
    return OperatorKernel.unchecked(matrix, source, target)


def parse_document(data, name: str = "<document>") -> ChainDocument:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        raise SpecError(f"{name}: {_where(error.absolute_path)}: {error.message}")
    stages = []
    for s, spec in enumerate(data["stages"]):
        try:
            outcomes = [(l, parse_probability(p)) for l, p in spec["outcomes"].items()]
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"{name}: stages[{s}].outcomes: {exc}") from None
        stages.append(TimeMomentSet.unchecked(spec["tick"], outcomes))
    kernels = []
    for k, spec in enumerate(data.get("kernels", [])):
        if k + 1 >= len(stages):
            raise SpecError(f"{name}: kernels[{k}]: no stage {k + 1} to map onto")
        try:
            kernels.append(_kernel(spec, k, stages[k].labels, stages[k + 1].labels))
        except SpecError as exc:
            raise SpecError(f"{name}: {exc}") from None
    frame = data.get("frame")
    chain = ProcessChain(
        stages, kernels, data.get("realized"), bool(data.get("artificial", False))
    )
    return ChainDocument(chain, data.get("name", name), None if frame is None else frame["anchor_stage"])


def load_document(path) -> ChainDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path.name}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return parse_document(data, path.name)


def bundled_path(name: str) -> Path:
    """Filesystem path of one of the bundled example documents."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled document {name!r}")
    return Path(str(resources.files("timeinfo") / "data" / name))
