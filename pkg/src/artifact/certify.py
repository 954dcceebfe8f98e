"""Certification of steering classes from published variance measurements.

Measured numbers are compared against their bounds as given (epsilon = 0).
A criterion whose inputs are missing leaves its flags undetermined.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable, Mapping, Sequence

import jsonschema
import numpy as np

from .criteria import (
    DATA_EPS,
    VLF_NAMES,
    CriterionReport,
    SteeringClass,
    cluster_pair_rule,
    criterion3_from_values,
    criterion4,
    criterion4b,
    criterion5,
    criterion5b,
    criterion5c,
    criterion6c,
    criterion7,
    steering_flag,
)
from .errors import InvalidArgument, ValidationError
from .gains import optimize_steering_gains
from .phase_space import GaussianState
from .quad_forms import Bipartition, enumerate_bipartitions, mode_label

KINDS = ("steering_product", "variance_pair", "vlf_sum", "vlf_product", "cluster_vlf_sum")

_GAIN_MAP = {"type": "object", "patternProperties": {"^[1-9][0-9]*$": {"type": "number"}}, "additionalProperties": False}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["records"],
    "properties": {
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "value", "labels"],
                "properties": {
                    "kind": {"enum": list(KINDS)},
                    "value": {"oneOf": [{"type": "number"}, {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}]},
                    "labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "gains": {"type": "object", "properties": {"h": _GAIN_MAP, "g": _GAIN_MAP}, "additionalProperties": False},
                    "normalized": {"type": "boolean"},
                    "source": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "n_modes": {"type": "integer", "minimum": 2},
        "description": {"type": "string"},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class MeasurementRecord:
    """One published quantity.

    ``steering_product``: a product S_{A|B}; label "1|23" (steered side first).
        Without gains the value is taken as already divided by its bound,
        which is automatic for a single steered mode with gains pinned to 1.
    ``variance_pair``: the two variances (var u, var v) behind S_{A|B}; needs gains.
    ``vlf_sum`` / ``vlf_product``: B or S for label "I", "II" or "III".
    ``cluster_vlf_sum``: B'_I or B'_II of the cluster experiment.
    """

    kind: str
    value: float | tuple[float, float]
    labels: tuple[str, ...]
    gains: Mapping[str, Mapping[int, float]] | None = None
    normalized: bool = False
    source: str = ""

    @property
    def key(self) -> tuple[str, tuple[str, ...]]:
        return self.kind, self.labels

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "kind": self.kind,
            "value": list(self.value) if isinstance(self.value, tuple) else self.value,
            "labels": list(self.labels),
        }
        if self.gains is not None:
            out["gains"] = {side: {str(m + 1): v for m, v in sorted(vals.items())} for side, vals in sorted(self.gains.items())}
        if self.normalized:
            out["normalized"] = True
        if self.source:
            out["source"] = self.source
        return out

    def direction(self) -> tuple[frozenset[int], frozenset[int]]:
        return Bipartition.parse(self.labels[0])

    def unit_gains(self) -> bool:
        """True only when gains were reported and every one of them is 1."""
        if not self.gains:
            return False
        return all(v == 1.0 for side in self.gains.values() for v in side.values())


def _fail(message: str, path: Sequence[Any]) -> ValidationError:
    return ValidationError(message, "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path))


def _parse_record(raw: Mapping[str, Any], index: int) -> MeasurementRecord:
    path = ["records", index]
    kind = raw["kind"]
    value = raw["value"]
    if kind == "variance_pair":
        if not isinstance(value, list):
            raise _fail("variance_pair needs [var_u, var_v]", path + ["value"])
        value = (float(value[0]), float(value[1]))
        values = list(value)
    else:
        if isinstance(value, list):
            raise _fail(f"{kind} takes a single number", path + ["value"])
        value = float(value)
        values = [value]
    if any(v < 0 or not np.isfinite(v) for v in values):
        raise _fail(f"measured variances must be finite and non-negative, got {raw['value']}", path + ["value"])
    labels = tuple(raw["labels"])
    gains = None
    if "gains" in raw:
        gains = {side: {int(m) - 1: float(v) for m, v in raw["gains"].get(side, {}).items()} for side in ("h", "g")}
    normalized = bool(raw.get("normalized", False))

    if kind in ("steering_product", "variance_pair"):
        try:
            steered, steerers = Bipartition.parse(labels[0])
        except InvalidArgument as exc:
            raise _fail(str(exc), path + ["labels", 0]) from exc
        gain_dependent = kind == "variance_pair" or (len(steered) > 1 and not normalized)
        if gain_dependent:
            if gains is None:
                raise _fail(f"{kind} {labels[0]} has a gain-dependent bound; gains are required", path)
            if any(m not in gains["h"] or m not in gains["g"] for m in steered):
                raise _fail(f"gains must cover the steered modes of {labels[0]}", path + ["gains"])
    elif kind in ("vlf_sum", "vlf_product"):
        if labels[0] not in VLF_NAMES:
            raise _fail(f"{kind} label must be one of {VLF_NAMES}", path + ["labels", 0])
    elif labels[0] not in ("I", "II"):
        raise _fail("cluster_vlf_sum label must be 'I' or 'II'", path + ["labels", 0])
    return MeasurementRecord(kind, value, labels, gains, normalized, str(raw.get("source", "")))


def load_measurements(document: Mapping[str, Any] | str) -> list[MeasurementRecord]:
    """Validate a measurement document (dict or JSON text) and return its records.

    Exact duplicates collapse to one record; conflicting duplicates are an error.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"not valid JSON: {exc}") from exc
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(document))
    if err is not None:
        raise _fail(err.message, list(err.absolute_path))
    seen: dict[tuple[str, tuple[str, ...]], MeasurementRecord] = {}
    out = []
    for i, raw in enumerate(document["records"]):
        rec = _parse_record(raw, i)
        if rec.key in seen:
            if seen[rec.key] != rec:
                raise _fail(f"conflicting duplicate record {rec.kind} {list(rec.labels)}", ["records", i])
            continue
        seen[rec.key] = rec
        out.append(rec)
    return out


def load_bundled(name: str) -> list[MeasurementRecord]:
    """Load one of the measurement files shipped in ``artifact/data``."""
    text = resources.files("artifact").joinpath("data").joinpath(name).read_text()
    return load_measurements(json.loads(text))


def bundled_files() -> list[str]:
    return sorted(p.name for p in resources.files("artifact").joinpath("data").iterdir() if p.name.endswith(".json"))


@dataclass(frozen=True)
class Certificate:
    steering_class: SteeringClass
    reports: tuple[CriterionReport, ...]
    inputs_digest: str
    records: tuple[MeasurementRecord, ...] = field(default=())

    @property
    def flags(self) -> dict[str, bool | None]:
        return dict(self.steering_class.flags)

    def to_dict(self) -> dict[str, Any]:
        sc = self.steering_class.to_dict()
        return {
            "n_modes": sc["n_modes"],
            "flags": sc["flags"],
            "evidence": sc["evidence"],
            "reports": [r.to_dict() for r in self.reports],
            "inputs_digest": self.inputs_digest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def inputs_digest(records: Iterable[MeasurementRecord]) -> str:
    canonical = json.dumps([r.to_dict() for r in records], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _infer_modes(records: Sequence[MeasurementRecord]) -> int:
    n = 3
    for rec in records:
        if rec.kind in ("steering_product", "variance_pair"):
            a, b = rec.direction()
            n = max(n, max(a | b) + 1)
    return n


def _steered_bound(rec: MeasurementRecord, steered: frozenset[int]) -> float:
    assert rec.gains is not None
    return float(abs(sum(rec.gains["h"][m] * rec.gains["g"][m] for m in steered)))


def _directional(rec: MeasurementRecord) -> CriterionReport:
    steered, steerers = rec.direction()
    if rec.kind == "variance_pair":
        var_u, var_v = rec.value  # type: ignore[misc]
        product = float(np.sqrt(var_u * var_v))
        bound = _steered_bound(rec, steered)
    elif rec.gains is not None and not rec.normalized and any(m in rec.gains["h"] for m in steered):
        product, bound = float(rec.value), _steered_bound(rec, steered)  # type: ignore[arg-type]
    else:
        product, bound = float(rec.value), 1.0  # type: ignore[arg-type]
    flag = steering_flag(steered, steerers)
    violated = product < bound - DATA_EPS
    return CriterionReport(
        "steering",
        product,
        bound,
        violated,
        (flag,) if violated else (),
        {mode_label(steered): bound},
        {"direction": rec.labels[0], "source": rec.source},
        epsilon=DATA_EPS,
    )


def _pair_bound(rec: MeasurementRecord, k: int) -> float | None:
    if not rec.gains:
        return None
    others = [m for m in range(3) if m != k]
    h, g = rec.gains["h"], rec.gains["g"]
    if not all(m in h and m in g for m in others):
        return None
    return float(abs(sum(h[m] * g[m] for m in others)))


def _single_steered(records: Sequence[MeasurementRecord]) -> tuple[list[float], list[float] | None] | None:
    """S_{k|lm} for k = 1, 2, 3 if all three are present, plus pair bounds if gains allow."""
    by_mode: dict[int, MeasurementRecord] = {}
    for rec in records:
        if rec.kind != "steering_product":
            continue
        steered, steerers = rec.direction()
        if len(steered) == 1 and steerers == frozenset(range(3)) - steered:
            by_mode[next(iter(steered))] = rec
    if set(by_mode) != {0, 1, 2}:
        return None
    values = [float(by_mode[k].value) for k in range(3)]  # type: ignore[arg-type]
    bounds = [_pair_bound(by_mode[k], k) for k in range(3)]
    return values, None if any(b is None for b in bounds) else bounds  # type: ignore[return-value]


def _vlf(records: Sequence[MeasurementRecord], kind: str) -> tuple[list[float | None], bool]:
    found = {rec.labels[0]: rec for rec in records if rec.kind == kind}
    values = [float(found[n].value) if n in found else None for n in VLF_NAMES]  # type: ignore[arg-type]
    unit = bool(found) and all(rec.unit_gains() for rec in found.values())
    return values, unit


def certify(records: Sequence[MeasurementRecord], n_modes: int | None = None) -> Certificate:
    """Apply every criterion whose inputs are present, with no tolerance slack."""
    records = list(records)
    n = n_modes if n_modes is not None else _infer_modes(records)
    result = SteeringClass(n)
    reports: list[CriterionReport] = []

    def take(rep: CriterionReport, tested: Sequence[str] = ()) -> None:
        reports.append(rep)
        result.absorb(rep, tested)

    for rec in records:
        if rec.kind in ("steering_product", "variance_pair"):
            rep = _directional(rec)
            # a measured product above its bound is recorded as "not certified"
            take(rep, tested=(steering_flag(*rec.direction()),))

    if n == 3:
        single = _single_steered(records)
        if single is not None:
            values, bounds = single
            take(criterion3_from_values(values, bounds, eps=DATA_EPS))
        s_values, s_unit = _vlf(records, "vlf_product")
        if any(v is not None for v in s_values):
            take(criterion4(s_values, DATA_EPS))
            take(criterion5(s_values, DATA_EPS))
            if s_unit:
                take(criterion5c(s_values, eps=DATA_EPS))
                take(criterion7(s_values, "S", eps=DATA_EPS))
        b_values, b_unit = _vlf(records, "vlf_sum")
        if any(v is not None for v in b_values):
            take(criterion4b(b_values, DATA_EPS))
            take(criterion5b(b_values, DATA_EPS))
            if b_unit:
                take(criterion6c(b_values, eps=DATA_EPS))
                take(criterion7(b_values, "B", eps=DATA_EPS))
        cluster = {rec.labels[0]: float(rec.value) for rec in records if rec.kind == "cluster_vlf_sum"}  # type: ignore[arg-type]
        if set(cluster) == {"I", "II"}:
            take(cluster_pair_rule(cluster["I"], cluster["II"], eps=DATA_EPS))

    result.close()
    return Certificate(result, tuple(reports), inputs_digest(records), tuple(records))


def export_measurements(state: GaussianState, source: str = "simulated") -> dict[str, Any]:
    """Optimised, normalised S_{A|B} for both directions of every bipartition, as a measurement document."""
    n = state.n_modes
    records = []
    for p in enumerate_bipartitions(n):
        a, b = p.sides()
        for s, t in ((a, b), (b, a)):
            gs = optimize_steering_gains(state, s, t)
            record: dict[str, Any] = {
                "kind": "steering_product",
                "value": float(gs.value),
                "labels": [f"{mode_label(s)}|{mode_label(t)}"],
                "normalized": True,
                "source": source,
            }
            if len(s) == 1:
                record["gains"] = {side: {str(m + 1): v for m, v in sorted(vals.items())} for side, vals in (("h", gs.h), ("g", gs.g))}
                record.pop("normalized")
            records.append(record)
    return {"n_modes": n, "records": records}
