from .distance import TokenAlignment, align_tokens, levenshtein
from .lexer import Token, identifier_names, lex
from .quality import (
    AttackQualityEvaluator,
    CodePair,
    QualityReport,
    acs,
    aed,
    asr,
    cosine_similarity,
    evaluate_quality,
    icr,
    load_code_pairs,
    tcr,
    validate_code_pair,
)

__all__ = [
    "AttackQualityEvaluator",
    "CodePair",
    "QualityReport",
    "Token",
    "TokenAlignment",
    "acs",
    "aed",
    "align_tokens",
    "asr",
    "cosine_similarity",
    "evaluate_quality",
    "icr",
    "identifier_names",
    "levenshtein",
    "lex",
    "load_code_pairs",
    "tcr",
    "validate_code_pair",
]
