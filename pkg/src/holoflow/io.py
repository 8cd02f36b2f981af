"""JSON documents for the command line tool.

Complex scalars are ``[re, im]`` pairs of doubles; matrices are row-major
nested lists of those pairs. A bare JSON number is accepted as a real
scalar on input but never written.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HoloflowError
from .flow import FlowConfig
from .linalg import as_frame
from .synth import BoundaryProblem, MonodromyReport, SynthesisParams, SynthesisResult


class DocumentError(HoloflowError):
    """Malformed input document; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(a) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(a)]


def decode_complex(value, field: str) -> complex:
    if isinstance(value, bool):
        raise DocumentError(field, "expected a number or [re, im] pair")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(float(value[0]), float(value[1]))
    raise DocumentError(field, "expected a number or [re, im] pair")


def decode_matrix(value, field: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise DocumentError(field, "expected a non-empty nested array of rows")
    width = len(value[0])
    rows = []
    for i, row in enumerate(value):
        if len(row) != width or width == 0:
            raise DocumentError(f"{field}[{i}]", f"expected {width} entries, got {len(row)}")
        rows.append([decode_complex(z, f"{field}[{i}][{j}]") for j, z in enumerate(row)])
    out = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(out)):
        raise DocumentError(field, "non-finite entries")
    return out


def _int(doc: dict, key: str, default=None) -> int | None:
    if key not in doc or doc[key] is None:
        return default
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(key, "expected an integer")
    return value


def load_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("document", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document", "top level must be an object")
    return doc


@dataclass(frozen=True)
class ProblemDocument:
    problem: BoundaryProblem
    params: SynthesisParams
    flow: FlowConfig
    H: np.ndarray | None = None


def _wrap(field: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except DocumentError:
        raise
    except (HoloflowError, ValueError) as exc:
        msg = str(exc)
        prefix = f"{field}: "
        raise DocumentError(field, msg[len(prefix):] if msg.startswith(prefix) else msg) from None


def parse_problem(doc: dict, require_params: bool = True) -> ProblemDocument:
    for key in ("frame", "g0"):
        if key not in doc:
            raise DocumentError(key, "missing field")
    frame = decode_matrix(doc["frame"], "frame")
    g0 = decode_matrix(doc["g0"], "g0")
    n = _int(doc, "ambient_dim", frame.shape[0])
    if n != frame.shape[0]:
        raise DocumentError("ambient_dim", f"{n} does not match frame with {frame.shape[0]} rows")
    _wrap("frame", as_frame, frame)
    if frame.shape[1] >= frame.shape[0]:
        raise DocumentError("frame", f"rank {frame.shape[1]} fills the ambient dimension; no room for extension")
    if g0.shape != (frame.shape[1], frame.shape[1]):
        raise DocumentError("g0", f"expected shape ({frame.shape[1]}, {frame.shape[1]}), got {g0.shape}")
    problem = _wrap("g0", BoundaryProblem, frame, g0)

    if "omega" in doc:
        omega = decode_matrix(doc["omega"], "omega")
    elif require_params:
        raise DocumentError("omega", "missing field")
    else:
        omega = np.eye(2, dtype=complex)
    winding = _int(doc, "winding", 1 if require_params else 0)
    if require_params and "winding" not in doc:
        raise DocumentError("winding", "missing field")
    pivot = _int(doc, "pivot")
    if pivot is not None and not 1 <= pivot <= problem.m:
        raise DocumentError("pivot", f"{pivot} outside [1, {problem.m}]")
    params = _wrap("omega", SynthesisParams, omega, winding, pivot)

    flow_doc = doc.get("flow") or {}
    if not isinstance(flow_doc, dict):
        raise DocumentError("flow", "expected an object")
    steps = _int(flow_doc, "steps", 100)
    stride = _int(flow_doc, "stride", 1)
    retraction = flow_doc.get("retraction", False)
    if not isinstance(retraction, bool):
        raise DocumentError("flow.retraction", "expected a boolean")
    flow = _wrap("flow", FlowConfig, steps, stride, retraction)

    h = decode_matrix(doc["H"], "H") if "H" in doc else None
    if h is not None and h.shape != (problem.n, problem.n):
        raise DocumentError("H", f"expected shape ({problem.n}, {problem.n}), got {h.shape}")
    return ProblemDocument(problem, params, flow, h)


def report_to_dict(report: MonodromyReport) -> dict:
    out = report._asdict()
    out["nontrivial"] = bool(out["nontrivial"])
    return {k: (v if isinstance(v, bool) else float(v)) for k, v in out.items()}


def result_to_dict(result: SynthesisResult) -> dict:
    return {
        "version": __version__,
        "H": encode_matrix(result.H),
        "U": encode_matrix(result.U),
        "basis": encode_matrix(result.basis),
        "phases": [float(x) for x in result.phases],
        "report": report_to_dict(result.report),
    }


def dump_json(doc: dict, path=None) -> str:
    # one top-level key per line, values compact
    body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v)}" for k, v in doc.items())
    text = "{\n" + body + "\n}\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
