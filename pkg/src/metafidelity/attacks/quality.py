"""Adversarial-example quality metrics (ICR, TCR, AED, ACS) and ASR.

Code pairs arrive as NDJSON with fields "id", "original", "adversarial",
"lang", and optional "original_embedding"/"adversarial_embedding" vectors.
Embeddings are consumed precomputed; this module never runs an encoder.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .. import errors
from ..records import PredictionRecord, pair_datasets
from .distance import align_tokens, levenshtein
from .lexer import identifier_names, lex

_REQUIRED_KEYS = {"id", "original", "adversarial", "lang"}
_OPTIONAL_KEYS = {"original_embedding", "adversarial_embedding"}


@dataclass(frozen=True)
class CodePair:
    id: str
    original: str
    adversarial: str
    lang: str
    original_embedding: Optional[tuple] = None
    adversarial_embedding: Optional[tuple] = None


@dataclass(frozen=True)
class PairBreakdown:
    id: str
    identifiers_total: int  # k_i: distinct identifier names in the original
    identifiers_changed: int  # n_i: names absent from the adversarial snippet
    tokens_total: int
    tokens_modified: int  # substituted or deleted originals
    substitutions: int
    edit_distance_total: int  # summed char-level distance over substitutions
    cosine: Optional[float] = None


@dataclass(frozen=True)
class QualityReport:
    icr: float
    tcr: float
    aed: Optional[float]  # None when no token was substituted anywhere
    acs: Optional[float]  # None when ACS was not requested
    asr: Optional[float]  # None when before/after dumps were not supplied
    per_pair: tuple  # of PairBreakdown
    warnings: tuple = ()


def validate_code_pair(raw, lenient: bool = False, line=None) -> CodePair:
    if not isinstance(raw, dict):
        raise errors.MissingField("code pair is not an object", line=line)
    missing = _REQUIRED_KEYS - set(raw)
    if missing:
        raise errors.MissingField(f"missing field(s) {sorted(missing)}", line=line)
    if not lenient:
        extra = set(raw) - _REQUIRED_KEYS - _OPTIONAL_KEYS
        if extra:
            raise errors.UnknownField(f"unknown field(s) {sorted(extra)}", line=line)
    if raw["lang"] not in ("c", "java"):
        raise errors.UnsupportedLanguage(f"unsupported language {raw['lang']!r}")
    if not raw["original"] or not raw["adversarial"]:
        raise errors.MissingField("source texts must be non-empty", line=line)

    def embedding(key):
        if key not in raw or raw[key] is None:
            return None
        vec = tuple(float(v) for v in raw[key])
        if any(not math.isfinite(v) for v in vec):
            raise errors.NonFinite(f"{key} contains a non-finite value", line=line)
        return vec

    orig_emb = embedding("original_embedding")
    adv_emb = embedding("adversarial_embedding")
    if (orig_emb is None) != (adv_emb is None):
        raise errors.MissingEmbeddings(
            f"pair {raw['id']!r} carries only one embedding vector"
        )
    if orig_emb is not None and len(orig_emb) != len(adv_emb):
        raise errors.LengthMismatch(
            f"pair {raw['id']!r}: embedding dimensions differ"
        )
    return CodePair(
        id=raw["id"],
        original=raw["original"],
        adversarial=raw["adversarial"],
        lang=raw["lang"],
        original_embedding=orig_emb,
        adversarial_embedding=adv_emb,
    )


def load_code_pairs(path, lenient: bool = False) -> list:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw_line in enumerate(fh, start=1):
            if not raw_line.strip():
                continue
            try:
                obj = json.loads(raw_line)
            except json.JSONDecodeError as exc:
                raise errors.MissingField(f"invalid JSON: {exc.msg}", line=lineno)
            pairs.append(validate_code_pair(obj, lenient=lenient, line=lineno))
    return pairs


def _require_pairs(pairs):
    if not pairs:
        raise errors.EmptyInput("no code pairs supplied")


def icr(pairs: Sequence[CodePair]) -> float:
    """Identifier change rate: sum(n_i) / sum(k_i) over distinct names."""
    _require_pairs(pairs)
    total_k = total_n = 0
    for pair in pairs:
        orig = identifier_names(pair.original, pair.lang)
        adv = identifier_names(pair.adversarial, pair.lang)
        total_k += len(orig)
        total_n += len(orig - adv)
    if total_k == 0:
        raise errors.NoIdentifiers("originals contain no identifiers")
    return total_n / total_k


def tcr(pairs: Sequence[CodePair]) -> float:
    """Token change rate: modified original tokens / total original tokens."""
    _require_pairs(pairs)
    total = modified = 0
    for pair in pairs:
        a = [t.text for t in lex(pair.original, pair.lang)]
        b = [t.text for t in lex(pair.adversarial, pair.lang)]
        alignment = align_tokens(a, b)
        total += len(a)
        modified += alignment.modified_originals
    if total == 0:
        raise errors.EmptyInput("originals lex to zero tokens")
    return modified / total


def aed(pairs: Sequence[CodePair]) -> float:
    """Mean character-level edit distance over all substituted token pairs."""
    _require_pairs(pairs)
    distances = []
    for pair in pairs:
        a = [t.text for t in lex(pair.original, pair.lang)]
        b = [t.text for t in lex(pair.adversarial, pair.lang)]
        for orig, adv in align_tokens(a, b).substitutions:
            distances.append(levenshtein(orig, adv))
    if not distances:
        raise errors.NoSubstitutions("no token was substituted in any pair")
    return sum(distances) / len(distances)


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise errors.LengthMismatch(f"vector shapes differ: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise errors.ZeroVector("cosine similarity undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


def acs(pairs: Sequence[CodePair]) -> float:
    """Mean cosine similarity between original and adversarial embeddings."""
    _require_pairs(pairs)
    sims = []
    for pair in pairs:
        if pair.original_embedding is None or pair.adversarial_embedding is None:
            raise errors.MissingEmbeddings(f"pair {pair.id!r} carries no embeddings")
        sims.append(cosine_similarity(pair.original_embedding, pair.adversarial_embedding))
    return sum(sims) / len(sims)


def asr(before: Sequence[PredictionRecord], after: Sequence[PredictionRecord]) -> float:
    """Attack success rate over samples correctly classified before the attack.

    Pre-attack misclassifications are excluded from the denominator; success
    means the post-attack argmax differs from the pre-attack argmax.
    """
    paired = pair_datasets(before, after).dataset
    B = paired.teacher_matrix()  # before-attack distributions
    A = paired.student_matrix()  # after-attack distributions
    y = paired.labels()
    before_pred = np.argmax(B, axis=1)
    correct = before_pred == y
    n_correct = int(np.count_nonzero(correct))
    if n_correct == 0:
        raise errors.EmptyCorrectSet("no sample was correctly classified before the attack")
    flipped = np.argmax(A[correct], axis=1) != before_pred[correct]
    return float(np.count_nonzero(flipped)) / n_correct


def evaluate_quality(
    pairs: Sequence[CodePair],
    include_acs: bool = True,
    before: Optional[Sequence[PredictionRecord]] = None,
    after: Optional[Sequence[PredictionRecord]] = None,
) -> QualityReport:
    """Compute the full quality-metric suite with per-pair breakdowns."""
    _require_pairs(pairs)
    warnings = []
    per_pair = []
    for pair in pairs:
        orig_names = identifier_names(pair.original, pair.lang)
        adv_names = identifier_names(pair.adversarial, pair.lang)
        a = [t.text for t in lex(pair.original, pair.lang)]
        b = [t.text for t in lex(pair.adversarial, pair.lang)]
        alignment = align_tokens(a, b)
        cos = None
        if include_acs and pair.original_embedding is not None:
            cos = cosine_similarity(pair.original_embedding, pair.adversarial_embedding)
        per_pair.append(
            PairBreakdown(
                id=pair.id,
                identifiers_total=len(orig_names),
                identifiers_changed=len(orig_names - adv_names),
                tokens_total=len(a),
                tokens_modified=alignment.modified_originals,
                substitutions=len(alignment.substitutions),
                edit_distance_total=sum(
                    levenshtein(o, n) for o, n in alignment.substitutions
                ),
                cosine=cos,
            )
        )
    per_pair.sort(key=lambda p: p.id)

    try:
        aed_value = aed(pairs)
    except errors.NoSubstitutions:
        aed_value = None
        warnings.append("AED undefined: no token was substituted in any pair")
    acs_value = acs(pairs) if include_acs else None
    asr_value = None
    if before is not None and after is not None:
        asr_value = asr(before, after)
    return QualityReport(
        icr=icr(pairs),
        tcr=tcr(pairs),
        aed=aed_value,
        acs=acs_value,
        asr=asr_value,
        per_pair=tuple(per_pair),
        warnings=tuple(warnings),
    )


class AttackQualityEvaluator(BaseEstimator):
    """Estimator-style wrapper around the quality-metric suite."""

    def __init__(self, include_acs: bool = True):
        self.include_acs = include_acs

    def fit(self, X: Sequence[CodePair], y=None):
        self.report_ = evaluate_quality(X, include_acs=self.include_acs)
        self.icr_ = self.report_.icr
        self.tcr_ = self.report_.tcr
        self.aed_ = self.report_.aed
        self.acs_ = self.report_.acs
        return self
