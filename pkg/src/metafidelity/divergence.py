"""Numerically stable softmax, KL divergence, and the distillation-loss diagnostic.

All logarithms are natural. Probability vectors handed to ``kl_divergence``
are renormalized before evaluation; the second argument is additionally
floored at ``floor`` so the ratio is always defined, while exact zeros on the
first-argument side use the 0*log(0/q) = 0 convention so analytic values such
as KL([1,0] || [0.5,0.5]) = ln 2 come out exact.
"""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch, NonFinite, NonPositiveTemperature

DEFAULT_FLOOR = 1e-12


def _as_float_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains a non-finite value")
    return arr


def softmax(logits, temperature: float = 1.0) -> np.ndarray:
    """Temperature softmax with max-subtraction for overflow safety.

    Accepts a vector or a (n_samples, n_classes) matrix; the softmax is taken
    along the last axis.
    """
    if temperature <= 0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {temperature}")
    z = _as_float_array(logits, "logits")
    z = z / temperature
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def clamp_to_simplex(p, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Clip entries to [floor, 1] and renormalize rows to sum exactly to 1."""
    arr = _as_float_array(p, "probabilities")
    arr = np.clip(arr, floor, 1.0)
    return arr / arr.sum(axis=-1, keepdims=True)


def kl_divergence(p, q, floor: float = DEFAULT_FLOOR) -> float:
    """KL(p || q) = sum_i p_i * ln(p_i / q_i), natural log, >= 0."""
    p = _as_float_array(p, "p")
    q = _as_float_array(q, "q")
    if p.shape != q.shape:
        raise LengthMismatch(f"length mismatch: {p.shape} vs {q.shape}")
    return float(kl_divergence_rows(p[None, :], q[None, :], floor=floor)[0])


def kl_divergence_rows(P, Q, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Row-wise KL(P_i || Q_i) for two (n, k) probability matrices."""
    P = _as_float_array(P, "P")
    Q = _as_float_array(Q, "Q")
    if P.shape != Q.shape:
        raise LengthMismatch(f"shape mismatch: {P.shape} vs {Q.shape}")
    P = P / P.sum(axis=-1, keepdims=True)
    Q = clamp_to_simplex(Q, floor=floor)
    mask = P > 0
    ratio = np.ones_like(P)
    np.divide(P, Q, out=ratio, where=mask)
    terms = np.zeros_like(P)
    np.multiply(P, np.log(ratio, where=mask, out=np.zeros_like(P)), out=terms, where=mask)
    return terms.sum(axis=-1)


def kd_loss(teacher_logits, student_logits, temperature: float = 1.0) -> float:
    """Distillation-loss diagnostic over paired logit batches.

    Per sample: inner product of the softened teacher distribution with the
    log of the softened student distribution, summed over classes; the loss
    is the negated sample mean scaled by temperature**2.
    """
    if temperature <= 0:
        raise NonPositiveTemperature(f"temperature must be > 0, got {temperature}")
    t = np.atleast_2d(_as_float_array(teacher_logits, "teacher_logits"))
    s = np.atleast_2d(_as_float_array(student_logits, "student_logits"))
    if t.shape != s.shape:
        raise LengthMismatch(f"shape mismatch: {t.shape} vs {s.shape}")
    t_soft = softmax(t, temperature)
    z = s / temperature
    log_s_soft = z - np.log(np.exp(z - z.max(axis=-1, keepdims=True)).sum(axis=-1, keepdims=True)) \
        - z.max(axis=-1, keepdims=True)
    per_sample = (t_soft * log_s_soft).sum(axis=-1)
    return float(-per_sample.mean() * temperature**2)
