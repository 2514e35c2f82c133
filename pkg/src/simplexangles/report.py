"""Experiment reports: JSON with floats as 17-significant-digit strings.

Floats are written as ``"%.16e"`` strings, which round-trip exactly, and are
recognised on the way back by that exact shape. Integers, booleans, and
ordinary strings stay native JSON.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field

from .mc import AngleEstimate, ComparisonVerdict, z_score

_FLOAT_RE = re.compile(r"^-?\d\.\d{16}e[+-]\d{2,3}$|^-?inf$|^nan$")
CSV_HEADER = ("experiment", "d", "label", "value", "std_error", "n")


def encode(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return f"{obj:.16e}"
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if hasattr(obj, "item"):
        return encode(obj.item())
    if hasattr(obj, "tolist"):
        return encode(obj.tolist())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def decode(obj):
    if isinstance(obj, str):
        return float(obj) if _FLOAT_RE.match(obj) else obj
    if isinstance(obj, dict):
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def estimate_record(label: str, est: AngleEstimate) -> dict:
    return {"kind": "estimate", "label": label, **est.to_dict()}


def comparison_record(label: str, verdict: ComparisonVerdict) -> dict:
    return {"kind": "comparison", "label": label, **verdict.to_dict()}


def check_record(label: str, passed: bool, **detail) -> dict:
    return {"kind": "check", "label": label, "passed": bool(passed), "detail": detail}


def value_record(label: str, value, std_error: float | None = None) -> dict:
    rec = {"kind": "value", "label": label, "value": value}
    if std_error is not None:
        rec["std_error"] = float(std_error)
    return rec


def record_passes(rec: dict) -> bool:
    """Re-derive a record's verdict from its stored numbers."""
    if rec["kind"] == "comparison":
        z = z_score(abs(rec["a"] - rec["b"]), rec["combined_se"])
        return z <= rec["threshold"]
    if rec["kind"] == "check":
        return bool(rec["passed"])
    return True


def derive_verdict(results: list[dict]) -> str:
    return "pass" if all(record_passes(r) for r in results) else "fail"


@dataclass
class ExperimentReport:
    experiment: str
    dimension: int
    parameters: dict
    results: list[dict] = field(default_factory=list)
    verdict: str = "fail"
    wall_time: float | None = None

    def finalize(self) -> ExperimentReport:
        self.verdict = derive_verdict(self.results)
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def find(self, label: str) -> dict:
        for rec in self.results:
            if rec["label"] == label:
                return rec
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "dimension": self.dimension,
            "parameters": self.parameters,
            "results": self.results,
            "verdict": self.verdict,
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return json.dumps(encode(self.to_dict()), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ExperimentReport:
        return cls(**decode(json.loads(text)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in self.results:
            if rec["kind"] == "estimate":
                writer.writerow([
                    self.experiment, self.dimension, rec["label"],
                    encode(float(rec["value"])), encode(float(rec["std_error"])), rec["n_samples"],
                ])
        return buf.getvalue()
