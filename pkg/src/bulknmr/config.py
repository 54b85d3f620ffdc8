"""JSON run configuration.

Frequencies are given in Hz (``offset_hz``, ``j_hz``) and converted with
``omega = 2 pi f``. ``beta`` is in seconds (hbar = 1, energies in rad/s), so
the dimensionless polarization parameter is ``beta * omega``. Unknown keys
are rejected anywhere in the document.

Example::

    {
      "nuclei": [{"offset_hz": 200.0}, {"offset_hz": -200.0}],
      "j_hz": [[0, 10], [10, 0]],
      "molecules": 1e20,
      "beta": 1e-4,
      "sequence": [
        {"pulse": {"targets": [1, 2], "axis": "x", "angle_rad": 1.5707963267948966}},
        {"acquire": {"dwell_s": 0.0009765625, "points": 1024}}
      ]
    }
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .algebra import MAX_NUCLEI
from .dynamics import Method, StateVector
from .spinsys import (
    Acquire, Evolve, FieldMode, FieldSpec, HardPulse, PulseSequence, SpinSystem, validate_sequence,
)
from .thermal import ThermalMode

__all__ = ["ConfigError", "RunConfig", "SCHEMA", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

_FIELD = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "mode": {"enum": ["longitudinal", "explicit"]},
        "b_t": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
        "transverse_t": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    },
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["nuclei"],
    "properties": {
        "nuclei": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["offset_hz"],
                "properties": {"offset_hz": _NUM, "gamma": _NUM},
            },
        },
        "j_hz": {"type": "array", "items": {"type": "array", "items": _NUM}},
        "molecules": {"type": "number", "minimum": 1},
        "beta": {"type": "number", "minimum": 0},
        "thermal": {"enum": ["exact", "high_temperature"]},
        "initial_state": {"type": "object", "additionalProperties": _NUM},
        "receiver_weights": {"type": "array", "items": _NUM},
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "method": {"enum": ["exact", "rk"]},
                "rtol": _POS,
                "atol": _POS,
                "krylov_tol": _POS,
            },
        },
        "processing": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "line_broadening_hz": {"type": "number", "minimum": 0},
                "zero_fill": {"type": "integer", "minimum": 2},
                "peak_threshold": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "export": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"trajectory": {"enum": ["all", "rank1", "none"]}},
        },
        "sequence": {
            "type": "array",
            "items": {
                "oneOf": [
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["evolve"],
                        "properties": {
                            "evolve": {
                                "type": "object",
                                "additionalProperties": False,
                                "required": ["duration_s"],
                                "properties": {"duration_s": _NUM, "field": _FIELD},
                            }
                        },
                    },
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["pulse"],
                        "properties": {
                            "pulse": {
                                "type": "object",
                                "additionalProperties": False,
                                "required": ["targets", "axis", "angle_rad"],
                                "properties": {
                                    "targets": {"type": "array", "items": {"type": "integer"}},
                                    "axis": {"enum": ["x", "y", "z"]},
                                    "angle_rad": _NUM,
                                },
                            }
                        },
                    },
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["acquire"],
                        "properties": {
                            "acquire": {
                                "type": "object",
                                "additionalProperties": False,
                                "required": ["dwell_s", "points"],
                                "properties": {"dwell_s": _NUM, "points": {"type": "integer"}},
                            }
                        },
                    },
                ]
            },
        },
    },
}


@dataclass
class RunConfig:
    system: SpinSystem
    sequence: PulseSequence
    thermal: ThermalMode = ThermalMode.EXACT
    initial: StateVector | None = None
    method: Method = Method.EXACT_EXPONENTIAL
    tolerances: dict = field(default_factory=dict)
    receiver_weights: np.ndarray | None = None
    line_broadening_hz: float = 0.0
    zero_fill: int | None = None
    peak_threshold: float = 0.01
    export_trajectory: str = "all"
    sha256: str = ""


def _field(spec: dict | None) -> FieldSpec:
    if spec is None:
        return FieldSpec()
    mode = spec.get("mode", "longitudinal")
    if mode == "explicit":
        if "b_t" not in spec or "transverse_t" in spec:
            raise ConfigError("explicit field needs 'b_t' and no 'transverse_t'")
        return FieldSpec(FieldMode.EXPLICIT, B=tuple(spec["b_t"]))
    if "b_t" in spec:
        raise ConfigError("longitudinal field takes 'transverse_t', not 'b_t'")
    tr = spec.get("transverse_t")
    return FieldSpec(FieldMode.LONGITUDINAL_OMEGA, transverse=None if tr is None else tuple(tr))


def parse_config(doc: dict, raw: bytes | None = None) -> RunConfig:
    """Validate a decoded configuration document and build a RunConfig."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema error at {where}: {exc.message}") from None
    n = len(doc["nuclei"])
    if n > MAX_NUCLEI:
        raise ConfigError(f"at most {MAX_NUCLEI} nuclei are supported, got {n}")
    offsets = [nuc["offset_hz"] for nuc in doc["nuclei"]]
    gamma = [nuc.get("gamma", 1.0) for nuc in doc["nuclei"]]
    j_hz = doc.get("j_hz")
    if j_hz is not None and (len(j_hz) != n or any(len(row) != n for row in j_hz)):
        raise ConfigError(f"j_hz must be a {n}x{n} matrix")
    try:
        system = SpinSystem.from_hz(
            offsets, j_hz, gamma=gamma, N=doc.get("molecules", 1.0), beta=doc.get("beta", 0.0)
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    events = []
    for item in doc.get("sequence", []):
        if "evolve" in item:
            ev = item["evolve"]
            try:
                events.append(Evolve(ev["duration_s"], _field(ev.get("field"))))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        elif "pulse" in item:
            ev = item["pulse"]
            events.append(HardPulse(tuple(ev["targets"]), ev["axis"], ev["angle_rad"]))
        else:
            ev = item["acquire"]
            events.append(Acquire(ev["dwell_s"], ev["points"]))
    try:
        sequence = validate_sequence(events, system)
    except ValueError as exc:
        raise ConfigError(f"invalid sequence: {exc}") from None

    initial = None
    if "initial_state" in doc:
        try:
            initial = StateVector.from_mapping(n, doc["initial_state"])
        except ValueError as exc:
            raise ConfigError(f"initial_state: {exc}") from None

    weights = doc.get("receiver_weights")
    if weights is not None and len(weights) != n:
        raise ConfigError(f"receiver_weights needs {n} entries")

    integ = doc.get("integrator", {})
    tolerances = {k: integ[k] for k in ("rtol", "atol", "krylov_tol") if k in integ}
    proc = doc.get("processing", {})
    zf = proc.get("zero_fill")
    if zf is not None and zf & (zf - 1):
        raise ConfigError(f"zero_fill must be a power of two, got {zf}")

    if raw is None:
        raw = json.dumps(doc, sort_keys=True).encode()
    return RunConfig(
        system=system,
        sequence=sequence,
        thermal=ThermalMode(doc.get("thermal", "exact")),
        initial=initial,
        method=Method(integ.get("method", "exact")),
        tolerances=tolerances,
        receiver_weights=None if weights is None else np.asarray(weights, dtype=float),
        line_broadening_hz=proc.get("line_broadening_hz", 0.0),
        zero_fill=zf,
        peak_threshold=proc.get("peak_threshold", 0.01),
        export_trajectory=doc.get("export", {}).get("trajectory", "all"),
        sha256=hashlib.sha256(raw).hexdigest(),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return parse_config(doc, raw)
