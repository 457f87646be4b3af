"""Minimal C/Java lexer: just enough to count identifiers and tokens.

Identifiers are maximal [A-Za-z_][A-Za-z0-9_]* runs outside the language
keyword list. String/char literals and comments never yield identifiers;
comments and whitespace are dropped from the token stream. C preprocessor
directives are consumed as single punctuation lines so macro names do not
pollute identifier counts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import UnsupportedLanguage, UnterminatedLiteral

C_KEYWORDS = frozenset("""
    auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Alignas _Alignof _Atomic _Bool _Complex _Generic _Imaginary _Noreturn
    _Static_assert _Thread_local
""".split())

JAVA_KEYWORDS = frozenset("""
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package
    private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while
    true false null var record yield sealed permits non-sealed
""".split())

_KEYWORDS = {"c": C_KEYWORDS, "java": JAVA_KEYWORDS}

_IDENT_START = re.compile(r"[A-Za-z_]")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"\.?\d(?:[eEpP][+-]|[\w.])*")

# longest-match-first operator table shared by both languages
_OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "++", "--", "<<", ">>",
    "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "::", "+", "-", "*", "/", "%", "<", ">", "=", "!",
    "&", "|", "^", "~", "?", ":", ".", "@",
)
_PUNCTUATION = frozenset("()[]{};,")


@dataclass(frozen=True)
class Token:
    kind: str  # identifier | keyword | literal | operator | punctuation
    text: str


def lex(source: str, lang: str) -> list:
    """Tokenize C or Java source, dropping comments and whitespace."""
    try:
        keywords = _KEYWORDS[lang]
    except KeyError:
        raise UnsupportedLanguage(f"unsupported language {lang!r}; expected 'c' or 'java'")

    tokens = []
    i, n = 0, len(source)
    at_line_start = True
    while i < n:
        ch = source[i]

        if ch in " \t\r":
            i += 1
            continue
        if ch == "\n":
            at_line_start = True
            i += 1
            continue

        if source.startswith("//", i):
            end = source.find("\n", i)
            i = n if end < 0 else end
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                raise UnterminatedLiteral("unterminated block comment")
            i = end + 2
            continue

        if ch == "#" and lang == "c" and at_line_start:
            # whole preprocessor line, honoring backslash continuations
            start = i
            while i < n:
                end = source.find("\n", i)
                if end < 0:
                    i = n
                    break
                if source[end - 1] == "\\":
                    i = end + 1
                    continue
                i = end
                break
            tokens.append(Token("punctuation", source[start:i]))
            continue

        at_line_start = False

        if ch in "\"'":
            quote = ch
            j = i + 1
            while j < n:
                if source[j] == "\\":
                    j += 2
                    continue
                if source[j] == quote:
                    break
                j += 1
            if j >= n:
                raise UnterminatedLiteral(f"unterminated {quote} literal")
            tokens.append(Token("literal", source[i : j + 1]))
            i = j + 1
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            m = _NUMBER.match(source, i)
            tokens.append(Token("literal", m.group()))
            i = m.end()
            continue

        if _IDENT_START.match(ch):
            m = _IDENT.match(source, i)
            word = m.group()
            kind = "keyword" if word in keywords else "identifier"
            tokens.append(Token(kind, word))
            i = m.end()
            continue

        if ch in _PUNCTUATION:
            tokens.append(Token("punctuation", ch))
            i += 1
            continue

        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("operator", op))
                i += len(op)
                break
        else:
            # unknown byte: keep it as punctuation so nothing is lost
            tokens.append(Token("punctuation", ch))
            i += 1

    return tokens


def identifier_names(source: str, lang: str) -> set:
    """Distinct identifier names appearing in the source."""
    return {t.text for t in lex(source, lang) if t.kind == "identifier"}
