"""Behavioral-fidelity testing for teacher/student classifier pairs."""

__version__ = "0.1.0"

from .divergence import kd_loss, kl_divergence, softmax
from .records import (
    FidelityConfig,
    PairedDataset,
    PairedSample,
    PredictionRecord,
    load_records,
    pair_datasets,
    validate_record,
)
from .relations import (
    FidelityEvaluator,
    MrOutcome,
    evaluate_all,
    mr1_label_loyalty,
    mr2_prob_loyalty,
    mr3_hcar,
    mr4_eca,
    violation_rate,
)
from .report import FidelityReport
from .stats import ObservationMatrix, friedman_test, wilcoxon_signed_rank

__all__ = [
    "FidelityConfig",
    "FidelityEvaluator",
    "FidelityReport",
    "MrOutcome",
    "ObservationMatrix",
    "PairedDataset",
    "PairedSample",
    "PredictionRecord",
    "evaluate_all",
    "friedman_test",
    "kd_loss",
    "kl_divergence",
    "load_records",
    "mr1_label_loyalty",
    "mr2_prob_loyalty",
    "mr3_hcar",
    "mr4_eca",
    "pair_datasets",
    "softmax",
    "validate_record",
    "violation_rate",
    "wilcoxon_signed_rank",
]
