"""Compile annotated transcripts into the three training-target texts.

Rendering rules per token and unit boundary:

    hesitation        -> dropped (pure) / "#" (rich, later filled in extra)
    partial word w    -> "w" (pure) / "w-" (rich, extra)
    backchannel w     -> "w" everywhere (mark dropped)
    disfluency w      -> "w" everywhere (mark dropped)
    statement end     -> nothing (pure) / "." (rich, extra)
    question end      -> nothing (pure) / "?"
    incomplete end    -> nothing (pure) / "..."

Unit-final marks attach to the unit's last rendered token ("so.",
"th-...", "#?"). Pure units that lose all their tokens contribute
nothing, so pure output never carries dangling punctuation. Casing is
preserved exactly as annotated; lowercasing happens at scoring time.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .corpus import AnnotatedTranscript, SpeechUnit, SpeechUnitType, WordTag
from .errors import ArityError, LexiconError
from .lexicon import DEFAULT_LEXICON, FillerLexicon


class Scheme(str, Enum):
    """The three supported transcription targets."""

    PURE = "pure"
    RICH = "rich"
    EXTRA = "extra"


@dataclass(frozen=True)
class PlainTranscript:
    """One compiled training-target string for one utterance."""

    utterance_id: str
    scheme: Scheme
    text: str


HESITATION_TOKEN = "#"

UNIT_MARKS = {
    SpeechUnitType.STATEMENT: ".",
    SpeechUnitType.QUESTION: "?",
    SpeechUnitType.INCOMPLETE: "...",
}


def split_unit_mark(token: str) -> tuple[str, str]:
    """Split a rendered token into (core, unit-final mark).

    The mark is one of "", ".", "?", "...": everything the compiler can
    attach to a unit's last token.
    """
    if token.endswith("..."):
        return token[:-3], "..."
    if token.endswith(".") or token.endswith("?"):
        return token[:-1], token[-1]
    return token, ""


def hesitation_count(text: str) -> int:
    """Number of hesitation sites ("#" tokens, marks ignored) in a rich text."""
    return sum(1 for tok in text.split() if split_unit_mark(tok)[0] == HESITATION_TOKEN)


def substitute_fillers(rich_text: str, fillers: Sequence[str]) -> str:
    """Replace each "#" site, in order, with the corresponding filler.

    Attached unit-final marks stay in place ("#." with "um" gives "um.").
    Raises ArityError unless exactly one filler per site is supplied.
    """
    tokens = rich_text.split()
    sites = [i for i, tok in enumerate(tokens) if split_unit_mark(tok)[0] == HESITATION_TOKEN]
    if len(sites) != len(fillers):
        raise ArityError(f"text has {len(sites)} hesitation sites, got {len(fillers)} fillers")
    for index, filler in zip(sites, fillers):
        _, mark = split_unit_mark(tokens[index])
        tokens[index] = filler + mark
    return " ".join(tokens)


def _render_rich_unit(unit: SpeechUnit) -> list[str]:
    words: list[str] = []
    for tok in unit.tokens:
        if WordTag.HESITATION in tok.tags:
            words.append(HESITATION_TOKEN)
        elif WordTag.PARTIAL in tok.tags:
            words.append(tok.text + "-")
        else:
            words.append(tok.text)
    words[-1] += UNIT_MARKS[unit.unit_type]
    return words


def compile_pure(transcript: AnnotatedTranscript) -> PlainTranscript:
    """Plain verbatim text: hesitations dropped, no marks, no punctuation."""
    words = [
        tok.text
        for unit in transcript.units
        for tok in unit.tokens
        if WordTag.HESITATION not in tok.tags
    ]
    return PlainTranscript(transcript.utterance_id, Scheme.PURE, " ".join(words))


def compile_rich(transcript: AnnotatedTranscript) -> PlainTranscript:
    """Generic hesitation tags plus unit-final punctuation."""
    words = [word for unit in transcript.units for word in _render_rich_unit(unit)]
    return PlainTranscript(transcript.utterance_id, Scheme.RICH, " ".join(words))


def compile_extra(
    transcript: AnnotatedTranscript,
    fillers: Sequence[str],
    lexicon: FillerLexicon = DEFAULT_LEXICON,
) -> PlainTranscript:
    """Rich text with every "#" replaced by a concrete filled pause.

    Fillers must come from the lexicon (LexiconError otherwise) and match
    the transcript's hesitation count one-for-one (ArityError otherwise).
    Punctuation placement is identical to the rich rendering.
    """
    for filler in fillers:
        if filler not in lexicon.entries:
            raise LexiconError(f"filler {filler!r} not in lexicon {sorted(lexicon.entries)}")
    rich = compile_rich(transcript)
    text = substitute_fillers(rich.text, fillers)
    return PlainTranscript(transcript.utterance_id, Scheme.EXTRA, text)


def compile_scheme(
    transcript: AnnotatedTranscript,
    scheme: Scheme,
    fillers: Sequence[str] | None = None,
    lexicon: FillerLexicon = DEFAULT_LEXICON,
) -> PlainTranscript:
    """Dispatch to the scheme-specific compiler."""
    if scheme is Scheme.PURE:
        return compile_pure(transcript)
    if scheme is Scheme.RICH:
        return compile_rich(transcript)
    return compile_extra(transcript, fillers if fillers is not None else [], lexicon)
