"""Shared test utilities: independent oracles and corpus generators.

The oracles deliberately avoid the production code paths. The edit
distance oracle walks the defining recurrence top-down; the number
oracle composes verbalizations from literal lookup tables per range.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Sequence

from verbatimkit.corpus import (
    AnnotatedToken,
    AnnotatedTranscript,
    SpeechUnit,
    SpeechUnitType,
    WordTag,
)

# ---------------------------------------------------------------------------
# edit distance oracle

def oracle_edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    """Exhaustive search over the edit lattice via the defining recurrence."""
    ref = tuple(ref)
    hyp = tuple(hyp)

    @lru_cache(maxsize=None)
    def best(i: int, j: int) -> int:
        if i == len(ref):
            return len(hyp) - j
        if j == len(hyp):
            return len(ref) - i
        diag = best(i + 1, j + 1) + (0 if ref[i] == hyp[j] else 1)
        return min(diag, 1 + best(i + 1, j), 1 + best(i, j + 1))

    return best(0, 0)


# ---------------------------------------------------------------------------
# number verbalization oracle (hand-written lookup, composed per range)

ORACLE_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
    "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
    "seventeen", "eighteen", "nineteen",
]
ORACLE_TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]


def oracle_number_words(n: int) -> list[str]:
    """English cardinal for 0..9999, built directly from the lookup tables."""
    assert 0 <= n <= 9999
    if n < 20:
        return [ORACLE_ONES[n]]
    if n < 100:
        tens, ones = divmod(n, 10)
        return [ORACLE_TENS[tens]] + ([ORACLE_ONES[ones]] if ones else [])
    if n < 1000:
        hundreds, rest = divmod(n, 100)
        return [ORACLE_ONES[hundreds], "hundred"] + (oracle_number_words(rest) if rest else [])
    thousands, rest = divmod(n, 1000)
    return (
        oracle_number_words(thousands)
        + ["thousand"]
        + (oracle_number_words(rest) if rest else [])
    )


# ---------------------------------------------------------------------------
# random annotated transcripts

WORDS = [
    "i", "think", "so", "because", "yes", "no", "maybe", "really", "Okay",
    "don't", "well-known", "she", "said", "about", "travel", "HELLO", "it's",
    "three", "people", "went", "to", "the", "city", "25", "100", "7",
]
PARTIAL_FRAGMENTS = ["th", "no", "par", "wa", "s", "exa"]


def random_token(rng: random.Random) -> AnnotatedToken:
    roll = rng.random()
    if roll < 0.2:
        return AnnotatedToken("", frozenset({WordTag.HESITATION}))
    if roll < 0.35:
        return AnnotatedToken(rng.choice(PARTIAL_FRAGMENTS), frozenset({WordTag.PARTIAL}))
    if roll < 0.45:
        return AnnotatedToken(rng.choice(WORDS), frozenset({WordTag.BACKCHANNEL}))
    if roll < 0.55:
        return AnnotatedToken(rng.choice(WORDS), frozenset({WordTag.DISFLUENCY}))
    if roll < 0.6:
        return AnnotatedToken(rng.choice(WORDS), frozenset({WordTag.BACKCHANNEL, WordTag.DISFLUENCY}))
    return AnnotatedToken(rng.choice(WORDS))


def random_unit(rng: random.Random, hesitation_only: bool = False) -> SpeechUnit:
    unit_type = rng.choice(list(SpeechUnitType))
    if hesitation_only:
        tokens = [
            AnnotatedToken("", frozenset({WordTag.HESITATION}))
            for _ in range(rng.randint(1, 3))
        ]
    else:
        tokens = [random_token(rng) for _ in range(rng.randint(1, 8))]
    return SpeechUnit(tuple(tokens), unit_type)


def random_transcript(rng: random.Random, uid: str) -> AnnotatedTranscript:
    roll = rng.random()
    if roll < 0.05:
        units: tuple[SpeechUnit, ...] = ()
    elif roll < 0.15:
        units = (random_unit(rng, hesitation_only=True),)
    else:
        units = tuple(
            random_unit(rng, hesitation_only=rng.random() < 0.1)
            for _ in range(rng.randint(1, 4))
        )
    audio_ref = f"audio/{uid}.wav" if rng.random() < 0.5 else None
    return AnnotatedTranscript(uid, units, audio_ref)
