"""The four output-based metamorphic relations over a paired dataset.

MR1: top-1 label agreement (label loyalty).
MR2: per-sample KL divergence within a tolerance delta (probability loyalty).
MR3: agreement on high-confidence inputs with confidence retention (HCAR).
MR4: calibration alignment over equal-width confidence bins (ECA).

Argmax ties break toward the lowest class index so MR1/MR3 stay reproducible.
MR4 bins every sample by its TEACHER confidence; empty bins contribute 0 and
the divisor stays B ("literal" mode). An "occupied" mode averaging only over
non-empty bins is available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from . import errors
from .divergence import kl_divergence_rows
from .records import FidelityConfig, PairedDataset

DEFAULT_TAU_SWEEP = (0.8, 0.85, 0.9)
DEFAULT_BIN_SWEEP = (10, 15, 20)
DEFAULT_ECA_THRESHOLD = 0.05


@dataclass(frozen=True)
class CalibrationBin:
    lower: float
    upper: float
    count: int
    teacher_accuracy: Optional[float]  # None when the bin is empty
    student_accuracy: Optional[float]


@dataclass(frozen=True)
class CalibrationProfile:
    bins: tuple  # of CalibrationBin, covering [0, 1] in equal widths

    def total_count(self) -> int:
        return sum(b.count for b in self.bins)


@dataclass(frozen=True)
class MrOutcome:
    mr_id: str
    hold_rate: float  # for MR4 this is the ECA score (lower = better)
    violation_rate: float
    support: int
    parameter: Optional[float] = None  # tau for MR3, B for MR4
    per_sample: Optional[tuple] = None
    calibration: Optional[CalibrationProfile] = None


def violation_rate(hold_rate: float) -> float:
    if not 0.0 <= hold_rate <= 1.0:
        raise errors.OutOfRange(f"hold_rate must be in [0, 1], got {hold_rate}")
    return 1.0 - hold_rate


def _require_nonempty(data: PairedDataset):
    if len(data) == 0:
        raise errors.EmptyDataset("paired dataset has no samples")


def mr1_label_loyalty(data: PairedDataset) -> MrOutcome:
    """Fraction of samples where student and teacher argmax predictions agree."""
    _require_nonempty(data)
    agree = np.argmax(data.teacher_matrix(), axis=1) == np.argmax(
        data.student_matrix(), axis=1
    )
    hold = float(np.count_nonzero(agree)) / len(data)
    return MrOutcome(
        mr_id="MR1",
        hold_rate=hold,
        violation_rate=violation_rate(hold),
        support=len(data),
        per_sample=tuple(bool(a) for a in agree),
    )


def mr2_prob_loyalty(
    data: PairedDataset, delta: float, prob_floor: float = 1e-12
) -> MrOutcome:
    """Fraction of samples with KL(teacher || student) <= delta.

    per_sample carries (kl_pq, kl_qp) for every sample: the thresholded
    teacher->student direction plus the reverse, since KL is asymmetric.
    """
    _require_nonempty(data)
    if delta < 0:
        raise errors.NegativeDelta(f"delta must be >= 0, got {delta}")
    T = data.teacher_matrix()
    S = data.student_matrix()
    kl_pq = kl_divergence_rows(T, S, floor=prob_floor)
    kl_qp = kl_divergence_rows(S, T, floor=prob_floor)
    hold = float(np.count_nonzero(kl_pq <= delta)) / len(data)
    return MrOutcome(
        mr_id="MR2",
        hold_rate=hold,
        violation_rate=violation_rate(hold),
        support=len(data),
        parameter=delta,
        per_sample=tuple((float(a), float(b)) for a, b in zip(kl_pq, kl_qp)),
    )


def mr3_hcar(data: PairedDataset, tau: float) -> MrOutcome:
    """High Confidence Agreement Rate on the teacher-confident subset.

    Raises EmptyConfidenceSubset when the teacher never reaches tau (the
    relation is undefined for that dataset/threshold).
    """
    _require_nonempty(data)
    if not 0.5 < tau <= 1.0:
        raise errors.OutOfRange(f"tau must be in (0.5, 1], got {tau}")
    T = data.teacher_matrix()
    S = data.student_matrix()
    conf_mask = T.max(axis=1) >= tau
    support = int(np.count_nonzero(conf_mask))
    if support == 0:
        raise errors.EmptyConfidenceSubset(
            f"teacher confidence never reaches tau={tau}"
        )
    agree = np.argmax(T[conf_mask], axis=1) == np.argmax(S[conf_mask], axis=1)
    confident = S[conf_mask].max(axis=1) >= tau
    holds = agree & confident
    hold = float(np.count_nonzero(holds)) / support
    return MrOutcome(
        mr_id="MR3",
        hold_rate=hold,
        violation_rate=violation_rate(hold),
        support=support,
        parameter=tau,
        per_sample=tuple(bool(h) for h in holds),
    )


def _bin_index(confidences: np.ndarray, bins: int) -> np.ndarray:
    # bin i covers [i/B, (i+1)/B); the last bin is closed at 1.0
    edges = np.arange(bins + 1, dtype=float) / bins
    idx = np.searchsorted(edges, confidences, side="right") - 1
    return np.minimum(idx, bins - 1)


def mr4_eca(
    data: PairedDataset, bins: int, empty_bins: str = "literal"
) -> MrOutcome:
    """Expected Calibration Alignment over equal-width teacher-confidence bins.

    The outcome's hold_rate field carries the ECA score itself (lower means
    closer calibration alignment).
    """
    _require_nonempty(data)
    if bins < 1:
        raise errors.ZeroBins(f"bins must be a positive integer, got {bins}")
    if empty_bins not in ("literal", "occupied"):
        raise errors.OutOfRange(f"empty_bins must be 'literal' or 'occupied', got {empty_bins!r}")
    T = data.teacher_matrix()
    S = data.student_matrix()
    y = data.labels()
    conf = T.max(axis=1)
    idx = _bin_index(conf, bins)
    t_correct = np.argmax(T, axis=1) == y
    s_correct = np.argmax(S, axis=1) == y

    profile = []
    diffs = []
    for b in range(bins):
        members = idx == b
        count = int(np.count_nonzero(members))
        if count == 0:
            profile.append(
                CalibrationBin(b / bins, (b + 1) / bins, 0, None, None)
            )
            if empty_bins == "literal":
                diffs.append(0.0)
            continue
        acc_t = float(np.count_nonzero(t_correct[members])) / count
        acc_s = float(np.count_nonzero(s_correct[members])) / count
        profile.append(CalibrationBin(b / bins, (b + 1) / bins, count, acc_t, acc_s))
        diffs.append(abs(acc_t - acc_s))
    divisor = bins if empty_bins == "literal" else max(len(diffs), 1)
    eca = float(sum(diffs) / divisor)
    return MrOutcome(
        mr_id="MR4",
        hold_rate=eca,
        violation_rate=eca,
        support=len(data),
        parameter=bins,
        per_sample=tuple(int(i) for i in idx),
        calibration=CalibrationProfile(bins=tuple(profile)),
    )


@dataclass
class FidelityOutcomes:
    """Aggregated MR results for one paired dataset."""

    mr1: MrOutcome
    mr2: MrOutcome
    mr3: dict  # tau -> MrOutcome or None when undefined
    mr4: dict  # B -> MrOutcome
    behavior_preserving: bool
    warnings: list = field(default_factory=list)


def evaluate_all(
    data: PairedDataset,
    cfg: FidelityConfig = FidelityConfig(),
    tau_sweep: Sequence[float] = DEFAULT_TAU_SWEEP,
    bin_sweep: Sequence[int] = DEFAULT_BIN_SWEEP,
    eca_threshold: float = DEFAULT_ECA_THRESHOLD,
    empty_bins: str = "literal",
) -> FidelityOutcomes:
    """Run MR1, MR2, MR3 per tau, and MR4 per B; derive the overall verdict.

    The verdict is true when MR1 and MR2 hold on every sample, MR3 holds on
    every confident sample for every tau at which it is defined, and every
    swept ECA stays at or below eca_threshold. An undefined MR3 (teacher
    never confident) is recorded as a warning, not a failure.
    """
    mr1 = mr1_label_loyalty(data)
    mr2 = mr2_prob_loyalty(data, cfg.delta, prob_floor=cfg.prob_floor)
    warnings = []
    mr3 = {}
    for tau in tau_sweep:
        try:
            mr3[tau] = mr3_hcar(data, tau)
        except errors.EmptyConfidenceSubset as exc:
            mr3[tau] = None
            warnings.append(f"MR3 undefined at tau={tau}: {exc}")
    mr4 = {b: mr4_eca(data, b, empty_bins=empty_bins) for b in bin_sweep}

    verdict = (
        mr1.hold_rate == 1.0
        and mr2.hold_rate == 1.0
        and all(o is None or o.hold_rate == 1.0 for o in mr3.values())
        and all(o.hold_rate <= eca_threshold for o in mr4.values())
    )
    return FidelityOutcomes(
        mr1=mr1, mr2=mr2, mr3=mr3, mr4=mr4,
        behavior_preserving=verdict, warnings=warnings,
    )


class FidelityEvaluator(BaseEstimator):
    """Estimator-style wrapper so the MR suite composes with sklearn tooling.

    ``fit`` evaluates all relations on a PairedDataset and exposes the
    results as fitted attributes; ``score`` returns the MR1 hold rate.
    """

    def __init__(
        self,
        delta: float = 0.5,
        temperature: float = 1.0,
        prob_floor: float = 1e-12,
        tau_sweep=DEFAULT_TAU_SWEEP,
        bin_sweep=DEFAULT_BIN_SWEEP,
        eca_threshold: float = DEFAULT_ECA_THRESHOLD,
        empty_bins: str = "literal",
    ):
        self.delta = delta
        self.temperature = temperature
        self.prob_floor = prob_floor
        self.tau_sweep = tau_sweep
        self.bin_sweep = bin_sweep
        self.eca_threshold = eca_threshold
        self.empty_bins = empty_bins

    def fit(self, X: PairedDataset, y=None):
        cfg = FidelityConfig(
            delta=self.delta,
            temperature=self.temperature,
            prob_floor=self.prob_floor,
        )
        self.outcomes_ = evaluate_all(
            X,
            cfg,
            tau_sweep=self.tau_sweep,
            bin_sweep=self.bin_sweep,
            eca_threshold=self.eca_threshold,
            empty_bins=self.empty_bins,
        )
        self.behavior_preserving_ = self.outcomes_.behavior_preserving
        return self

    def score(self, X: PairedDataset, y=None) -> float:
        return mr1_label_loyalty(X).hold_rate
