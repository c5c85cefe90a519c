"""Annotated-transcript data model and corpus ingestion.

Transcripts live one JSON document per utterance; a split manifest is a
JSON-lines file pointing at them. All types are immutable after
construction and safe to share across threads.

Utterance document schema::

    {"utterance_id": str,
     "audio_ref": str | null,              # optional, defaults to null
     "units": [{"type": "statement" | "question" | "incomplete",
                "tokens": [{"text": str, "tags": [str, ...]}]}]}

Manifest line schema::

    {"utterance_id": str, "path": str, "audio_ref": str | null}

Relative manifest paths are resolved against the manifest's directory.
Unknown tag names and unit types are rejected outright; extra JSON object
keys are ignored.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator

from .errors import DuplicateIdError, MissingFileError, SchemaError


class WordTag(str, Enum):
    """Word-level annotation tags accepted by the parser."""

    HESITATION = "hesitation"
    PARTIAL = "partial"
    BACKCHANNEL = "backchannel"
    DISFLUENCY = "disfluency"


class SpeechUnitType(str, Enum):
    """Phrase-level span types."""

    STATEMENT = "statement"
    QUESTION = "question"
    INCOMPLETE = "incomplete"


class Split(str, Enum):
    """Dataset splits a manifest can describe."""

    TRAIN = "train"
    DEV = "dev"
    EVAL = "eval"


@dataclass(frozen=True)
class AnnotatedToken:
    """One annotated word.

    Hesitations carry no lexical text in the source annotation; every
    other token must carry a non-empty, whitespace-free string. A token
    can never be both a hesitation and a partial word.
    """

    text: str
    tags: frozenset[WordTag] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tags", frozenset(self.tags))
        if any(ch.isspace() for ch in self.text):
            raise SchemaError(f"token text {self.text!r} contains whitespace")
        if WordTag.HESITATION in self.tags and WordTag.PARTIAL in self.tags:
            raise SchemaError("a token cannot be both hesitation and partial")
        if WordTag.HESITATION in self.tags:
            if self.text:
                raise SchemaError(f"hesitation token must have empty text, got {self.text!r}")
        elif not self.text:
            raise SchemaError("empty token text is only allowed for hesitations")

    @property
    def is_hesitation(self) -> bool:
        return WordTag.HESITATION in self.tags


@dataclass(frozen=True)
class SpeechUnit:
    """A typed phrase-level span of tokens. Never empty."""

    tokens: tuple[AnnotatedToken, ...]
    unit_type: SpeechUnitType

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise SchemaError("speech unit has no tokens")


@dataclass(frozen=True)
class AnnotatedTranscript:
    """Ground-truth annotation for one utterance."""

    utterance_id: str
    units: tuple[SpeechUnit, ...] = ()
    audio_ref: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(self.units))
        if not self.utterance_id:
            raise SchemaError("utterance_id must be non-empty")

    def iter_tokens(self) -> Iterator[AnnotatedToken]:
        for unit in self.units:
            yield from unit.tokens

    def token_count(self) -> int:
        return sum(len(unit.tokens) for unit in self.units)

    def hesitation_count(self) -> int:
        return sum(1 for tok in self.iter_tokens() if tok.is_hesitation)


@dataclass(frozen=True)
class ManifestEntry:
    utterance_id: str
    path: Path
    audio_ref: str | None = None


@dataclass(frozen=True)
class CorpusManifest:
    """A split's worth of utterance pointers, order-preserving."""

    split: Split
    entries: tuple[ManifestEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return [entry.utterance_id for entry in self.entries]


def _require(data: dict, key: str, kind: type, locus: str):
    value = data.get(key)
    if not isinstance(value, kind):
        raise SchemaError(f"{locus}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def parse_annotated_transcript(doc: str) -> AnnotatedTranscript:
    """Parse one utterance document (schema in the module docstring).

    Raises SchemaError with a field locus (``units[2].tokens[0]``) on any
    missing field, unknown tag/unit type, or invariant violation. Token
    and unit order is preserved exactly; nothing is silently dropped.
    """
    try:
        data = json.loads(doc)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SchemaError("top-level value must be a JSON object")

    utterance_id = _require(data, "utterance_id", str, "$")
    audio_ref = data.get("audio_ref")
    if audio_ref is not None and not isinstance(audio_ref, str):
        raise SchemaError("$.audio_ref: expected string or null")
    raw_units = _require(data, "units", list, "$")

    units: list[SpeechUnit] = []
    for ui, raw_unit in enumerate(raw_units):
        locus = f"units[{ui}]"
        if not isinstance(raw_unit, dict):
            raise SchemaError(f"{locus}: expected an object")
        type_name = _require(raw_unit, "type", str, locus)
        try:
            unit_type = SpeechUnitType(type_name)
        except ValueError:
            raise SchemaError(f"{locus}.type: unknown unit type {type_name!r}") from None
        raw_tokens = _require(raw_unit, "tokens", list, locus)
        tokens: list[AnnotatedToken] = []
        for ti, raw_tok in enumerate(raw_tokens):
            tlocus = f"{locus}.tokens[{ti}]"
            if not isinstance(raw_tok, dict):
                raise SchemaError(f"{tlocus}: expected an object")
            text = _require(raw_tok, "text", str, tlocus)
            raw_tags = _require(raw_tok, "tags", list, tlocus)
            tags: set[WordTag] = set()
            for name in raw_tags:
                try:
                    tags.add(WordTag(name))
                except (ValueError, TypeError):
                    raise SchemaError(f"{tlocus}.tags: unknown tag {name!r}") from None
            try:
                tokens.append(AnnotatedToken(text=text, tags=frozenset(tags)))
            except SchemaError as exc:
                raise SchemaError(f"{tlocus}: {exc}") from None
        try:
            units.append(SpeechUnit(tuple(tokens), unit_type))
        except SchemaError as exc:
            raise SchemaError(f"{locus}: {exc}") from None

    try:
        return AnnotatedTranscript(utterance_id, tuple(units), audio_ref)
    except SchemaError as exc:
        raise SchemaError(f"$: {exc}") from None


def serialize_annotated_transcript(transcript: AnnotatedTranscript) -> str:
    """Render a transcript back to its canonical JSON document.

    ``parse_annotated_transcript`` of the result reproduces the input
    exactly (tags are sets, so their serialization order is sorted).
    """
    payload = {
        "utterance_id": transcript.utterance_id,
        "audio_ref": transcript.audio_ref,
        "units": [
            {
                "type": unit.unit_type.value,
                "tokens": [
                    {"text": tok.text, "tags": sorted(tag.value for tag in tok.tags)}
                    for tok in unit.tokens
                ],
            }
            for unit in transcript.units
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _infer_split(path: Path) -> Split:
    stem = path.stem.lower()
    hits = [split for split in Split if split.value in stem]
    if len(hits) != 1:
        raise SchemaError(
            f"cannot infer split from file name {path.name!r}; pass split= explicitly"
        )
    return hits[0]


def load_manifest(path: str | Path, split: Split | str | None = None) -> CorpusManifest:
    """Load a JSON-lines manifest, checking ids and referenced files.

    When ``split`` is omitted it is inferred from the file name (a stem
    containing exactly one of train/dev/eval). Duplicate utterance ids
    raise DuplicateIdError; entries whose transcript path does not exist
    raise MissingFileError.
    """
    path = Path(path)
    if split is None:
        split = _infer_split(path)
    else:
        split = Split(split)

    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path.name}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise SchemaError(f"{path.name}:{lineno}: expected an object")
            utterance_id = obj.get("utterance_id")
            rel = obj.get("path")
            if not isinstance(utterance_id, str) or not utterance_id:
                raise SchemaError(f"{path.name}:{lineno}: utterance_id must be a non-empty string")
            if not isinstance(rel, str) or not rel:
                raise SchemaError(f"{path.name}:{lineno}: path must be a non-empty string")
            audio_ref = obj.get("audio_ref")
            if audio_ref is not None and not isinstance(audio_ref, str):
                raise SchemaError(f"{path.name}:{lineno}: audio_ref must be a string or null")
            if utterance_id in seen:
                raise DuplicateIdError(f"{path.name}:{lineno}: duplicate utterance_id {utterance_id!r}")
            seen.add(utterance_id)
            resolved = Path(rel)
            if not resolved.is_absolute():
                resolved = path.parent / resolved
            if not resolved.exists():
                raise MissingFileError(f"{path.name}:{lineno}: transcript file not found: {rel}")
            entries.append(ManifestEntry(utterance_id, resolved, audio_ref))
    return CorpusManifest(split, tuple(entries))


def load_corpus(manifest: CorpusManifest) -> list[AnnotatedTranscript]:
    """Parse every transcript a manifest references, in manifest order.

    The utterance_id inside each document must match its manifest entry;
    a manifest-level audio_ref overrides the document's own.
    """
    transcripts: list[AnnotatedTranscript] = []
    for entry in manifest.entries:
        doc = entry.path.read_text(encoding="utf-8")
        try:
            transcript = parse_annotated_transcript(doc)
        except SchemaError as exc:
            raise SchemaError(f"{entry.path}: {exc}") from None
        if transcript.utterance_id != entry.utterance_id:
            raise SchemaError(
                f"{entry.path}: utterance_id {transcript.utterance_id!r} "
                f"does not match manifest entry {entry.utterance_id!r}"
            )
        if entry.audio_ref is not None:
            transcript = dataclasses.replace(transcript, audio_ref=entry.audio_ref)
        transcripts.append(transcript)
    return transcripts
