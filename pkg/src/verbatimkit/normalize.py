"""Scoring-time text normalization.

The pipeline collapses every compiled variant of the same utterance onto
one canonical token sequence, so pure, rich, and extra renderings of a
transcript all score identically. Per whitespace-separated token, in
order:

1. lowercase
2. delete sentence punctuation characters  . ? … , ! ; :
3. strip trailing hyphens (the partial-word marker)
4. drop the token if it is now the standalone hesitation tag "#"
5. expand pure digit strings to English words
6. drop filled-pause tokens from the configured lexicon
7. drop the token if nothing is left

Step 3 strips a whole trailing run of hyphens and step 4 runs after it so
that normalization is idempotent on arbitrary input, not just compiler
output. Internal hyphens ("well-known") and apostrophes ("don't") are
lexical content and survive. Mixed alphanumerics ("2nd", "a1") are left
alone apart from lowercasing; only pure digit strings are verbalized.
Digit strings of fifteen or more digits are read out digit by digit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError, RangeError
from .lexicon import DEFAULT_LEXICON, FillerLexicon

TokenSequence = list[str]

_PUNCT_TABLE = str.maketrans("", "", ".?…,!;:")

_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen",
]
_TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]
_SCALES = ["", "thousand", "million", "billion", "trillion"]
_MAX_VERBALIZED = 10 ** 15


@dataclass(frozen=True)
class NormalizationConfig:
    """Toggles for the normalization pipeline; defaults match scoring."""

    lexicon: FillerLexicon = DEFAULT_LEXICON
    verbalize_numbers: bool = True
    strip_partial_hyphen: bool = True
    lowercase: bool = True


DEFAULT_NORMALIZATION = NormalizationConfig()


def _hundreds(value: int) -> list[str]:
    # value in 1..999
    words: list[str] = []
    hundreds, rest = divmod(value, 100)
    if hundreds:
        words += [_ONES[hundreds], "hundred"]
    if rest:
        if rest < 20:
            words.append(_ONES[rest])
        else:
            tens, ones = divmod(rest, 10)
            words.append(_TENS[tens])
            if ones:
                words.append(_ONES[ones])
    return words


def number_to_words(digits: str) -> list[str]:
    """Verbalize a digit string as an English cardinal.

    Lowercase, no "and", hyphenated compounds split into separate tokens
    ("25" -> ["twenty", "five"]). Accepts values below 10**15; larger
    values raise RangeError and non-digit input raises FormatError.
    Leading zeros are allowed and ignored ("007" -> ["seven"]).
    """
    if not digits or not (digits.isascii() and digits.isdigit()):
        raise FormatError(f"not a digit string: {digits!r}")
    value = int(digits)
    if value >= _MAX_VERBALIZED:
        raise RangeError(f"value {digits} is at or above 10**15")
    if value == 0:
        return ["zero"]
    groups: list[int] = []
    while value:
        value, group = divmod(value, 1000)
        groups.append(group)
    words: list[str] = []
    for idx in range(len(groups) - 1, -1, -1):
        group = groups[idx]
        if not group:
            continue
        words += _hundreds(group)
        if idx:
            words.append(_SCALES[idx])
    return words


def _expand_digits(token: str) -> list[str]:
    if int(token) < _MAX_VERBALIZED:
        return number_to_words(token)
    return [_ONES[int(ch)] for ch in token]


def normalize(text: str, cfg: NormalizationConfig = DEFAULT_NORMALIZATION) -> TokenSequence:
    """Run the full pipeline over arbitrary text. Total: never raises."""
    tokens: TokenSequence = []
    for raw in text.split():
        tok = raw.lower() if cfg.lowercase else raw
        tok = tok.translate(_PUNCT_TABLE)
        if cfg.strip_partial_hyphen:
            tok = tok.rstrip("-")
        if not tok or tok == "#":
            continue
        if cfg.verbalize_numbers and tok.isascii() and tok.isdigit():
            expanded = _expand_digits(tok)
        else:
            expanded = [tok]
        for word in expanded:
            if word not in cfg.lexicon.entries:
                tokens.append(word)
    return tokens
