"""Fidelity report assembly and canonical JSON serialization.

Reports are emitted as canonical JSON (sorted keys, fixed separators, Python
shortest round-trip float repr) so that identical inputs always produce
byte-identical files suitable for golden-file diffing.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .relations import FidelityOutcomes, MrOutcome


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _mr12_dict(o: MrOutcome) -> dict:
    d = {
        "hold_rate": o.hold_rate,
        "violation_rate": o.violation_rate,
        "support": o.support,
    }
    if o.mr_id == "MR2":
        d["delta"] = o.parameter
    return d


def _mr3_entry(tau: float, o: Optional[MrOutcome]) -> dict:
    if o is None:
        return {"tau": tau, "undefined": True}
    return {
        "tau": tau,
        "undefined": False,
        "hold_rate": o.hold_rate,
        "violation_rate": o.violation_rate,
        "support": o.support,
    }


def _mr4_entry(bins: int, o: MrOutcome) -> dict:
    return {
        "bins": bins,
        "eca": o.hold_rate,
        "support": o.support,
        "calibration": [
            {
                "lower": b.lower,
                "upper": b.upper,
                "count": b.count,
                "teacher_accuracy": b.teacher_accuracy,
                "student_accuracy": b.student_accuracy,
            }
            for b in o.calibration.bins
        ],
    }


@dataclass(frozen=True)
class FidelityReport:
    """Fully serialized evaluation outcome plus provenance metadata."""

    payload: dict

    def to_json(self) -> str:
        return canonical_json(self.payload)

    def write(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_json_file(cls, path) -> "FidelityReport":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(payload=json.load(fh))

    @property
    def behavior_preserving(self) -> bool:
        return self.payload["verdict"]["behavior_preserving"]


def build_report(
    outcomes: FidelityOutcomes,
    sample_ids,
    config_echo: dict,
    inputs: dict,
    tool_version: str,
    dropped_teacher_ids=(),
    dropped_student_ids=(),
) -> FidelityReport:
    """Assemble the canonical report dictionary from evaluated outcomes.

    ``inputs`` maps role -> {"file": basename, "sha256": digest}. Only file
    basenames are recorded so reports stay byte-identical across machines.
    """
    per_sample_kl = [
        {"id": sid, "kl_pq": pq, "kl_qp": qp}
        for sid, (pq, qp) in zip(sample_ids, outcomes.mr2.per_sample)
    ]
    payload = {
        "metadata": {
            "tool": "metafidelity",
            "version": tool_version,
            "config": config_echo,
            "inputs": inputs,
            "dropped_teacher_ids": list(dropped_teacher_ids),
            "dropped_student_ids": list(dropped_student_ids),
        },
        "mr_outcomes": {
            "MR1": _mr12_dict(outcomes.mr1),
            "MR2": _mr12_dict(outcomes.mr2),
            "MR3": [_mr3_entry(tau, o) for tau, o in sorted(outcomes.mr3.items())],
            "MR4": [_mr4_entry(b, o) for b, o in sorted(outcomes.mr4.items())],
        },
        "per_sample_kl": per_sample_kl,
        "verdict": {"behavior_preserving": outcomes.behavior_preserving},
        "warnings": list(outcomes.warnings),
    }
    return FidelityReport(payload=payload)


def build_quality_payload(report, inputs: dict, tool_version: str) -> dict:
    """Serialize a QualityReport (attacks.quality) with provenance metadata."""
    return {
        "metadata": {
            "tool": "metafidelity",
            "version": tool_version,
            "inputs": inputs,
        },
        "metrics": {
            "icr": report.icr,
            "tcr": report.tcr,
            "aed": report.aed,
            "acs": report.acs,
            "asr": report.asr,
        },
        "per_pair": [
            {
                "id": p.id,
                "identifiers_total": p.identifiers_total,
                "identifiers_changed": p.identifiers_changed,
                "tokens_total": p.tokens_total,
                "tokens_modified": p.tokens_modified,
                "substitutions": p.substitutions,
                "edit_distance_total": p.edit_distance_total,
                "cosine": p.cosine,
            }
            for p in report.per_pair
        ],
        "warnings": list(report.warnings),
    }
