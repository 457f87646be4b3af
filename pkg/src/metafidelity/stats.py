"""Friedman and Wilcoxon signed-rank tests for quality-metric comparisons.

Both tests use midranks for ties and report two-sided p-values. Wilcoxon
drops zero differences, computes the exact null distribution for up to 25
remaining pairs, and otherwise falls back to a normal approximation with tie
and continuity corrections.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import chi2, norm, rankdata

from . import errors

EXACT_LIMIT = 25


@dataclass(frozen=True)
class ObservationMatrix:
    """n subjects (rows) by k treatments (columns) of real measurements."""

    values: np.ndarray
    treatments: tuple

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise errors.DegenerateMatrix("observations must form a 2-D matrix")
        if not np.all(np.isfinite(values)):
            raise errors.NonFinite("observations contain a non-finite value")
        if values.shape[1] < 2:
            raise errors.DegenerateMatrix("need at least 2 treatments")
        if values.shape[0] < 2:
            raise errors.TooFewRows("need at least 2 subjects")
        if len(self.treatments) != values.shape[1]:
            raise errors.DegenerateMatrix("treatment names do not match column count")


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    method: str  # "chi-square" | "exact" | "normal-approximation"
    n_used: int
    zero_drop_policy: str = "drop"


def friedman_test(m: ObservationMatrix) -> TestResult:
    """Friedman rank test with midrank ties and tie correction.

    A matrix whose rows are all constant carries no rank information; the
    statistic is 0 and p = 1 by convention.
    """
    values = m.values
    n, k = values.shape
    ranks = np.apply_along_axis(rankdata, 1, values)
    col_sums = ranks.sum(axis=0)
    stat = 12.0 / (n * k * (k + 1)) * np.sum(
        (col_sums - n * (k + 1) / 2.0) ** 2
    )

    # tie correction: sum of (t^3 - t) over tie groups of every row
    ties = 0.0
    for row in values:
        _, counts = np.unique(row, return_counts=True)
        ties += float(np.sum(counts**3 - counts))
    correction = 1.0 - ties / (n * k * (k**2 - 1))
    if correction <= 0.0:
        # every row constant: no discriminating ranks at all
        return TestResult(0.0, 1.0, "chi-square", n)
    stat = float(stat / correction)
    p = float(chi2.sf(stat, k - 1))
    return TestResult(stat, p, "chi-square", n)


def _exact_signed_rank_p(ranks: np.ndarray, w_min: float) -> float:
    """Exact two-sided p for W = min(W+, W-) given the observed |d| ranks.

    Enumerates the null distribution of W+ by convolution over the 2^n
    equiprobable sign assignments; midranks are doubled so sums stay integral.
    """
    doubled = np.rint(ranks * 2).astype(int)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: counts.size - r]
        counts = counts + shifted
    counts /= 2.0 ** len(doubled)
    threshold = np.rint(w_min * 2).astype(int)
    p = 2.0 * counts[: threshold + 1].sum()
    return float(min(p, 1.0))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sided Wilcoxon signed-rank test on paired measurements."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise errors.LengthMismatch(f"paired vectors differ: {a.shape} vs {b.shape}")
    if a.size < 1:
        raise errors.TooFewRows("need at least one pair")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise errors.NonFinite("observations contain a non-finite value")

    d = a - b
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        raise errors.AllZeroDifferences("all paired differences are zero")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if n <= EXACT_LIMIT:
        return TestResult(w, _exact_signed_rank_p(ranks, w), "exact", n)

    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    # tie correction on the variance
    _, counts = np.unique(ranks, return_counts=True)
    variance -= float(np.sum(counts**3 - counts)) / 48.0
    if variance <= 0.0:
        raise errors.DegenerateMatrix("zero variance in signed ranks")
    # continuity correction toward the mean
    z = (w - mean + 0.5) / np.sqrt(variance)
    p = float(min(1.0, 2.0 * norm.cdf(z)))
    return TestResult(w, p, "normal-approximation", n)


def load_matrix_csv(path) -> ObservationMatrix:
    """Parse a CSV with a header row of treatment names and one row per subject."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise errors.TooFewRows("CSV needs a header row and at least 2 subject rows")
    header = tuple(cell.strip() for cell in rows[0])
    width = len(header)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise errors.MissingField(
                f"expected {width} columns, got {len(row)}", line=lineno
            )
        try:
            values.append([float(cell) for cell in row])
        except ValueError as exc:
            raise errors.NonFinite(str(exc), line=lineno)
    return ObservationMatrix(values=np.array(values, dtype=float), treatments=header)
