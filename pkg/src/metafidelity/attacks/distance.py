"""Character-level Levenshtein distance and token-level edit alignment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance between two strings (two-row iteration)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class TokenAlignment:
    """Minimal token-level edit script between two token text sequences."""

    substitutions: tuple  # of (original_text, adversarial_text) pairs
    deletions: int  # original tokens with no counterpart
    insertions: int  # adversarial tokens with no counterpart
    matches: int

    @property
    def modified_originals(self) -> int:
        return len(self.substitutions) + self.deletions


def align_tokens(original: Sequence[str], adversarial: Sequence[str]) -> TokenAlignment:
    """Align two token sequences on their longest common subsequence.

    LCS tokens stay matched; between anchors, leftover originals pair up with
    leftover adversarials in order as substitutions (so consistently renamed
    identifiers line up), with the surplus counted as deletions/insertions.
    """
    n, m = len(original), len(adversarial)
    # LCS length table with backtrace; token streams are short enough
    lcs = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        row, prev_row = lcs[i], lcs[i - 1]
        oi = original[i - 1]
        for j in range(1, m + 1):
            if oi == adversarial[j - 1]:
                row[j] = prev_row[j - 1] + 1
            else:
                row[j] = max(prev_row[j], row[j - 1])

    anchors = []
    i, j = n, m
    while i > 0 and j > 0:
        if original[i - 1] == adversarial[j - 1]:
            anchors.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif lcs[i - 1][j] >= lcs[i][j - 1]:
            i -= 1
        else:
            j -= 1
    anchors.reverse()

    subs = []
    deletions = insertions = 0
    prev_i = prev_j = 0
    for ai, aj in anchors + [(n, m)]:
        gap_orig = original[prev_i:ai]
        gap_adv = adversarial[prev_j:aj]
        paired = min(len(gap_orig), len(gap_adv))
        subs.extend(zip(gap_orig[:paired], gap_adv[:paired]))
        deletions += len(gap_orig) - paired
        insertions += len(gap_adv) - paired
        prev_i, prev_j = ai + 1, aj + 1
    return TokenAlignment(
        substitutions=tuple(subs),
        deletions=deletions,
        insertions=insertions,
        matches=len(anchors),
    )
