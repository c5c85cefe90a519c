"""Filled-pause vocabulary shared by the compiler, completer, and normalizer.

One lexicon instance drives both sides of the pipeline: which tokens may
replace a hesitation site, and which tokens the scoring normalizer strips.
Keeping them identical is what makes the three compiled schemes collapse
to the same scored token sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import LexiconError


@dataclass(frozen=True)
class FillerLexicon:
    """Set of accepted filled-pause tokens plus the fallback choice."""

    entries: frozenset[str]
    default_filler: str = "um"

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", frozenset(self.entries))
        if not self.entries:
            raise LexiconError("filler lexicon must not be empty")
        for entry in self.entries:
            if not entry or any(ch.isspace() for ch in entry):
                raise LexiconError(f"bad lexicon entry {entry!r}: must be a non-empty token")
            if entry != entry.lower():
                raise LexiconError(f"bad lexicon entry {entry!r}: entries are lowercase")
        if self.default_filler not in self.entries:
            raise LexiconError(f"default filler {self.default_filler!r} not in lexicon")

    def __contains__(self, token: str) -> bool:
        return token in self.entries


def make_lexicon(entries: Iterable[str], default_filler: str | None = None) -> FillerLexicon:
    """Build a lexicon from an iterable, defaulting to its first entry."""
    items = list(entries)
    if default_filler is None:
        if not items:
            raise LexiconError("filler lexicon must not be empty")
        default_filler = items[0]
    return FillerLexicon(frozenset(items), default_filler)


DEFAULT_LEXICON = FillerLexicon(frozenset({"um", "uh"}), "um")
