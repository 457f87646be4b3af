"""Domain types, NDJSON ingestion, and teacher/student pairing.

Prediction dump format: NDJSON, one object per line, UTF-8, with fields
exactly ``id`` (string), ``label`` (integer), and exactly one of ``logits``
or ``probs`` (array of numbers). Unknown fields are rejected unless
``lenient`` is set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import errors
from .divergence import softmax

SIMPLEX_TOL = 1e-6

_ALLOWED_KEYS = {"id", "label", "logits", "probs"}


@dataclass(frozen=True)
class PredictionRecord:
    """One sample's scores and ground-truth label for a single model."""

    id: str
    scores: tuple
    label: int
    is_probs: bool

    @property
    def num_classes(self) -> int:
        return len(self.scores)


@dataclass(frozen=True)
class PairedSample:
    """Teacher and student probability distributions for the same input."""

    id: str
    teacher_probs: tuple
    student_probs: tuple
    label: int


@dataclass(frozen=True)
class PairedDataset:
    samples: tuple  # of PairedSample, sorted ascending by id
    num_classes: int

    def __len__(self):
        return len(self.samples)

    def ids(self):
        return [s.id for s in self.samples]

    def teacher_matrix(self) -> np.ndarray:
        return np.array([s.teacher_probs for s in self.samples], dtype=float)

    def student_matrix(self) -> np.ndarray:
        return np.array([s.student_probs for s in self.samples], dtype=float)

    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)


@dataclass(frozen=True)
class PairingResult:
    dataset: PairedDataset
    dropped_teacher_ids: tuple
    dropped_student_ids: tuple


@dataclass(frozen=True)
class FidelityConfig:
    """Free parameters of the fidelity evaluation."""

    delta: float = 0.5
    tau: float = 0.9
    bins: int = 10
    temperature: float = 1.0
    prob_floor: float = 1e-12

    def __post_init__(self):
        if self.delta < 0:
            raise errors.NegativeDelta(f"delta must be >= 0, got {self.delta}")
        if not 0.5 < self.tau <= 1.0:
            raise errors.OutOfRange(f"tau must be in (0.5, 1], got {self.tau}")
        if self.bins < 1:
            raise errors.ZeroBins(f"bins must be a positive integer, got {self.bins}")
        if self.temperature <= 0:
            raise errors.NonPositiveTemperature(
                f"temperature must be > 0, got {self.temperature}"
            )
        if self.prob_floor <= 0:
            raise errors.OutOfRange(f"prob_floor must be > 0, got {self.prob_floor}")


def validate_record(raw: Mapping, lenient: bool = False, line=None) -> PredictionRecord:
    """Validate one parsed dump object into a PredictionRecord."""
    if not isinstance(raw, Mapping):
        raise errors.MissingField("record is not an object", line=line)
    for key in ("id", "label"):
        if key not in raw:
            raise errors.MissingField(f"missing required field {key!r}", line=line)
    if not lenient:
        extra = set(raw) - _ALLOWED_KEYS
        if extra:
            raise errors.UnknownField(
                f"unknown field(s) {sorted(extra)} (use lenient mode to ignore)", line=line
            )
    has_logits = "logits" in raw
    has_probs = "probs" in raw
    if has_logits and has_probs:
        raise errors.BothScoreKinds("record carries both 'logits' and 'probs'", line=line)
    if not has_logits and not has_probs:
        raise errors.MissingField("record needs exactly one of 'logits' or 'probs'", line=line)

    rid = raw["id"]
    if not isinstance(rid, str):
        raise errors.MissingField(f"'id' must be a string, got {type(rid).__name__}", line=line)
    label = raw["label"]
    if isinstance(label, bool) or not isinstance(label, int):
        raise errors.MissingField(f"'label' must be an integer, got {label!r}", line=line)
    if label < 0:
        raise errors.LabelOutOfRange(f"label must be non-negative, got {label}", line=line)

    scores = raw["logits"] if has_logits else raw["probs"]
    try:
        scores = tuple(float(v) for v in scores)
    except (TypeError, ValueError):
        raise errors.NonFinite("scores must be an array of numbers", line=line)
    if len(scores) < 2:
        raise errors.MissingField(
            f"scores must have length >= 2, got {len(scores)}", line=line
        )
    if any(not math.isfinite(v) for v in scores):
        raise errors.NonFinite("scores contain a non-finite value", line=line)
    if has_probs:
        if any(v < 0.0 or v > 1.0 for v in scores):
            raise errors.NotASimplex("probabilities must lie in [0, 1]", line=line)
        total = math.fsum(scores)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise errors.NotASimplex(
                f"probabilities sum to {total!r}, expected 1 within {SIMPLEX_TOL}", line=line
            )
    if label >= len(scores):
        raise errors.LabelOutOfRange(
            f"label {label} out of range for {len(scores)} classes", line=line
        )
    return PredictionRecord(id=rid, scores=scores, label=label, is_probs=has_probs)


def load_records(path, lenient: bool = False) -> list:
    """Read and validate an NDJSON prediction dump. Blank lines are ignored."""
    records = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw_line in enumerate(fh, start=1):
            if not raw_line.strip():
                continue
            try:
                obj = json.loads(raw_line)
            except json.JSONDecodeError as exc:
                raise errors.MissingField(f"invalid JSON: {exc.msg}", line=lineno)
            rec = validate_record(obj, lenient=lenient, line=lineno)
            if rec.id in seen:
                raise errors.DuplicateId(f"duplicate id {rec.id!r}", line=lineno)
            seen.add(rec.id)
            records.append(rec)
    return records


def _to_probs(record: PredictionRecord, temperature: float) -> tuple:
    if record.is_probs:
        return record.scores
    return tuple(softmax(np.array(record.scores), temperature).tolist())


def pair_datasets(
    teacher: Sequence[PredictionRecord],
    student: Sequence[PredictionRecord],
    temperature: float = 1.0,
) -> PairingResult:
    """Join validated teacher/student records on sample id.

    Logit records are converted to probabilities via temperature softmax.
    Ids present in only one dump are dropped and reported, not fatal.
    """
    t_by_id = {r.id: r for r in teacher}
    s_by_id = {r.id: r for r in student}
    if len(t_by_id) != len(teacher) or len(s_by_id) != len(student):
        raise errors.DuplicateId("duplicate ids within a dump")

    shared = sorted(set(t_by_id) & set(s_by_id))
    if not shared:
        raise errors.EmptyIntersection("teacher and student dumps share no sample ids")

    samples = []
    num_classes = None
    for sid in shared:
        t, s = t_by_id[sid], s_by_id[sid]
        if t.label != s.label:
            raise errors.LabelMismatch(
                f"id {sid!r}: teacher label {t.label} != student label {s.label}"
            )
        if t.num_classes != s.num_classes:
            raise errors.ClassCountMismatch(
                f"id {sid!r}: teacher has {t.num_classes} classes, student {s.num_classes}"
            )
        if num_classes is None:
            num_classes = t.num_classes
        elif t.num_classes != num_classes:
            raise errors.ClassCountMismatch(
                f"id {sid!r}: {t.num_classes} classes, expected {num_classes}"
            )
        samples.append(
            PairedSample(
                id=sid,
                teacher_probs=_to_probs(t, temperature),
                student_probs=_to_probs(s, temperature),
                label=t.label,
            )
        )
    dataset = PairedDataset(samples=tuple(samples), num_classes=num_classes)
    return PairingResult(
        dataset=dataset,
        dropped_teacher_ids=tuple(sorted(set(t_by_id) - set(s_by_id))),
        dropped_student_ids=tuple(sorted(set(s_by_id) - set(t_by_id))),
    )


def dump_paired(dataset: PairedDataset, path) -> None:
    """Serialize a PairedDataset to NDJSON; float repr round-trips exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in dataset.samples:
            fh.write(
                json.dumps(
                    {
                        "id": s.id,
                        "teacher_probs": list(s.teacher_probs),
                        "student_probs": list(s.student_probs),
                        "label": s.label,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def load_paired(path) -> PairedDataset:
    samples = []
    num_classes = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw_line in enumerate(fh, start=1):
            if not raw_line.strip():
                continue
            try:
                obj = json.loads(raw_line)
            except json.JSONDecodeError as exc:
                raise errors.MissingField(f"invalid JSON: {exc.msg}", line=lineno)
            try:
                sample = PairedSample(
                    id=obj["id"],
                    teacher_probs=tuple(float(v) for v in obj["teacher_probs"]),
                    student_probs=tuple(float(v) for v in obj["student_probs"]),
                    label=int(obj["label"]),
                )
            except KeyError as exc:
                raise errors.MissingField(f"missing field {exc.args[0]!r}", line=lineno)
            if num_classes is None:
                num_classes = len(sample.teacher_probs)
            samples.append(sample)
    if not samples:
        raise errors.EmptyIntersection("no samples in paired dataset file")
    samples.sort(key=lambda s: s.id)
    return PairedDataset(samples=tuple(samples), num_classes=num_classes)
