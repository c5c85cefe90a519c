"""CTM hypothesis files: parsing, artifact filtering, reassembly.

Each line carries 5 or 6 whitespace-separated fields::

    <utterance_id> <channel> <start_s> <dur_s> <word> [<confidence>]

Lines starting with ";;" are comments and are skipped. Serialization
renders floats with ``repr`` so numeric fields survive a parse/serialize
round trip bit-exactly.

The artifact filter drops likely end-of-utterance hallucinations: very
short tokens (duration under 20 ms) with weak confidence (under 0.5).
Both inequalities are strict, so boundary-equal tokens are kept. The
default combines the two clauses conjunctively; a disjunctive mode exists
for sensitivity analysis. Tokens without a confidence field are treated
as fully confident and can never be discarded by the confidence clause.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import FormatError


def _check_field(name: str, value: str) -> None:
    if not value or any(ch.isspace() for ch in value):
        raise FormatError(f"{name} must be a non-empty whitespace-free string, got {value!r}")


@dataclass(frozen=True)
class CtmToken:
    """One time-aligned hypothesis word."""

    utterance_id: str
    channel: str
    start_s: float
    dur_s: float
    word: str
    confidence: float | None = None

    def __post_init__(self) -> None:
        _check_field("utterance_id", self.utterance_id)
        _check_field("channel", self.channel)
        _check_field("word", self.word)
        if not math.isfinite(self.start_s) or self.start_s < 0:
            raise FormatError(f"start_s must be finite and non-negative, got {self.start_s!r}")
        if not math.isfinite(self.dur_s) or self.dur_s < 0:
            raise FormatError(f"dur_s must be finite and non-negative, got {self.dur_s!r}")
        if self.confidence is not None:
            if not math.isfinite(self.confidence) or not 0.0 <= self.confidence <= 1.0:
                raise FormatError(f"confidence must be in [0, 1], got {self.confidence!r}")


class CombineMode(str, Enum):
    """How the duration and confidence clauses combine when discarding."""

    CONJUNCTION = "conjunction"
    DISJUNCTION = "disjunction"


@dataclass(frozen=True)
class FilterPolicy:
    """Thresholds for the artifact filter."""

    min_dur_s: float = 0.020
    min_conf: float = 0.5
    combine: CombineMode = CombineMode.CONJUNCTION

    def __post_init__(self) -> None:
        if not math.isfinite(self.min_dur_s) or self.min_dur_s < 0:
            raise FormatError(f"min_dur_s must be finite and non-negative, got {self.min_dur_s!r}")
        if not math.isfinite(self.min_conf) or not 0.0 <= self.min_conf <= 1.0:
            raise FormatError(f"min_conf must be in [0, 1], got {self.min_conf!r}")

    def discards(self, token: CtmToken) -> bool:
        confidence = 1.0 if token.confidence is None else token.confidence
        too_short = token.dur_s < self.min_dur_s
        too_weak = confidence < self.min_conf
        if self.combine is CombineMode.CONJUNCTION:
            return too_short and too_weak
        return too_short or too_weak


def _parse_decimal(value: str, what: str, lineno: int) -> float:
    try:
        number = float(value)
    except ValueError:
        raise FormatError(f"line {lineno}: {what} is not numeric: {value!r}") from None
    if not math.isfinite(number):
        raise FormatError(f"line {lineno}: {what} is not finite: {value!r}")
    return number


def parse_ctm(doc: str) -> list[CtmToken]:
    """Parse a CTM document into tokens, preserving file order.

    Raises FormatError with the offending line number on a wrong field
    count, non-numeric field, or out-of-range value.
    """
    tokens: list[CtmToken] = []
    for lineno, line in enumerate(doc.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";;"):
            continue
        fields = stripped.split()
        if len(fields) not in (5, 6):
            raise FormatError(f"line {lineno}: expected 5 or 6 fields, got {len(fields)}")
        start_s = _parse_decimal(fields[2], "start", lineno)
        dur_s = _parse_decimal(fields[3], "duration", lineno)
        confidence = _parse_decimal(fields[5], "confidence", lineno) if len(fields) == 6 else None
        try:
            tokens.append(
                CtmToken(fields[0], fields[1], start_s, dur_s, fields[4], confidence)
            )
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return tokens


def serialize_ctm(tokens: Iterable[CtmToken]) -> str:
    """Render tokens back to CTM text. parse_ctm of the result is identity."""
    lines = []
    for tok in tokens:
        fields = [tok.utterance_id, tok.channel, repr(tok.start_s), repr(tok.dur_s), tok.word]
        if tok.confidence is not None:
            fields.append(repr(tok.confidence))
        lines.append(" ".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def filter_artifacts(
    tokens: Iterable[CtmToken], policy: FilterPolicy = FilterPolicy()
) -> tuple[list[CtmToken], int]:
    """Apply the artifact filter; returns (survivors, discarded count).

    Survivor order and fields are untouched, so filtering is idempotent.
    """
    survivors = []
    total = 0
    for tok in tokens:
        total += 1
        if not policy.discards(tok):
            survivors.append(tok)
    return survivors, total - len(survivors)


def ctm_to_transcripts(
    tokens: Iterable[CtmToken], reference_ids: Iterable[str] | None = None
) -> dict[str, list[str]]:
    """Group tokens per utterance, sorted by (start time, file order).

    Utterances absent from the CTM appear (as empty lists) only when
    named in ``reference_ids``.
    """
    grouped: dict[str, list[tuple[float, int, str]]] = {}
    for order, tok in enumerate(tokens):
        grouped.setdefault(tok.utterance_id, []).append((tok.start_s, order, tok.word))
    result = {
        uid: [word for _, _, word in sorted(rows, key=lambda row: (row[0], row[1]))]
        for uid, rows in grouped.items()
    }
    if reference_ids is not None:
        for uid in reference_ids:
            result.setdefault(uid, [])
    return result


def ctm_texts(transcripts: Mapping[str, list[str]]) -> dict[str, str]:
    """Join grouped hypothesis tokens into one text line per utterance."""
    return {uid: " ".join(words) for uid, words in transcripts.items()}
