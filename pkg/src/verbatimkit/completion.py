"""Filled-pause completion for hesitation-tagged transcripts.

A provider receives a fixed instruction pair (see ``build_prompt``) plus
an optional audio attachment reference and returns the completed text.
``extract_fillers`` then enforces the contract strictly: the completion
must change the "#" sites and nothing else, and every replacement must
come from the filler lexicon. Violations trigger retries and finally a
default-filler fallback, so corrupted completions can never leak into
training targets.

Providers are a single-method interface. The bundled stub is a pure
function of its input (useful offline and in tests); the HTTP provider
targets a generic JSON chat endpoint with an attachment slot and takes
its API key from the ``VERBATIMKIT_API_KEY`` environment variable.
"""

from __future__ import annotations

import os
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import requests

from .errors import ArityError, DriftError, LexiconError, ProviderError, VerbatimError
from .lexicon import DEFAULT_LEXICON, FillerLexicon
from .schemes import HESITATION_TOKEN, hesitation_count, split_unit_mark, substitute_fillers

SYSTEM_INSTRUCTION = (
    "from the original transcription and speech audio, "
    "try to complete the hesitation tags #, without changing other things."
)
USER_PREFIX = "transcription: "
API_KEY_ENV = "VERBATIMKIT_API_KEY"


@dataclass(frozen=True)
class CompletionRequest:
    """One utterance to complete. Zero-hesitation texts are never sent,
    so constructing a request for one is rejected."""

    utterance_id: str
    rich_text: str
    audio_ref: str | None = None

    def __post_init__(self) -> None:
        if hesitation_count(self.rich_text) < 1:
            raise ValueError(f"rich text for {self.utterance_id!r} has no hesitation sites")


@dataclass(frozen=True)
class CompletionResult:
    """Validated fillers for one utterance, in hesitation-site order."""

    utterance_id: str
    fillers: tuple[str, ...]
    provider_name: str
    raw_response: str | None = None
    fallback: bool = False
    degraded: bool = False


def build_prompt(request: CompletionRequest) -> tuple[str, str]:
    """The (system instruction, user message) pair sent to a provider.

    Audio travels separately as an attachment descriptor, never inlined.
    """
    return SYSTEM_INSTRUCTION, USER_PREFIX + request.rich_text


def extract_fillers(
    rich_text: str,
    completed_text: str,
    lexicon: FillerLexicon = DEFAULT_LEXICON,
) -> list[str]:
    """Recover the per-site replacement tokens from a completed text.

    The completion must be the rich text with each "#" replaced by one
    lexicon token and everything else byte-identical. Errors name the
    first diverging token (1-based position):

    - ArityError: token counts rule out a one-for-one substitution
    - DriftError: a non-"#" token or an attached unit mark changed
    - LexiconError: a replacement is not in the lexicon

    Replacements are canonicalized to lowercase.
    """
    rich_tokens = rich_text.split()
    completed_tokens = completed_text.split()
    if len(rich_tokens) != len(completed_tokens):
        raise ArityError(
            f"token count changed: {len(rich_tokens)} -> {len(completed_tokens)}"
        )
    fillers: list[str] = []
    for pos, (r_tok, c_tok) in enumerate(zip(rich_tokens, completed_tokens), 1):
        core, mark = split_unit_mark(r_tok)
        if core != HESITATION_TOKEN:
            if r_tok != c_tok:
                raise DriftError(f"token {pos} changed: expected {r_tok!r}, got {c_tok!r}")
            continue
        if mark and not c_tok.endswith(mark):
            raise DriftError(f"token {pos}: unit mark {mark!r} missing from {c_tok!r}")
        replacement = c_tok[: len(c_tok) - len(mark)] if mark else c_tok
        canonical = replacement.lower()
        if canonical not in lexicon.entries:
            raise LexiconError(f"token {pos}: replacement {replacement!r} not in filler lexicon")
        fillers.append(canonical)
    return fillers


class CompletionProvider(ABC):
    """Send one request, receive the completed text."""

    name: str = "provider"

    @abstractmethod
    def send(self, system_instruction: str, user_message: str, audio_ref: str | None = None) -> str:
        """Return the completed transcription text. Raise ProviderError on
        transport or protocol failure."""


class StubCompletionProvider(CompletionProvider):
    """Offline provider: fills every hesitation site with one fixed token.

    Deterministic and pure, so pipelines built on it are reproducible.
    """

    name = "stub"

    def __init__(self, filler: str = "um"):
        self.filler = filler

    def send(self, system_instruction: str, user_message: str, audio_ref: str | None = None) -> str:
        rich_text = user_message.removeprefix(USER_PREFIX)
        return substitute_fillers(rich_text, [self.filler] * hesitation_count(rich_text))


class HttpCompletionProvider(CompletionProvider):
    """Generic JSON-over-HTTP chat provider with an audio attachment slot.

    POSTs ``{"model", "system_instruction", "message", "attachments"}``
    to ``base_url`` and expects ``{"text": ...}`` back. The bearer token
    comes from ``api_key`` or the VERBATIMKIT_API_KEY environment
    variable; requests without audio simply omit the attachment.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout_s: float = 30.0,
        post: Callable = requests.post,
    ):
        self.name = f"http:{model}"
        self.base_url = base_url
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout_s = timeout_s
        self._post = post

    def send(self, system_instruction: str, user_message: str, audio_ref: str | None = None) -> str:
        payload = {
            "model": self.model,
            "system_instruction": system_instruction,
            "message": user_message,
            "attachments": [{"type": "audio", "ref": audio_ref}] if audio_ref else [],
        }
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            response = self._post(self.base_url, json=payload, headers=headers, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise ProviderError(f"request failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(f"HTTP {response.status_code} from provider")
        try:
            text = response.json()["text"]
        except (ValueError, KeyError, TypeError):
            raise ProviderError("malformed provider response: expected JSON with a 'text' field") from None
        if not isinstance(text, str):
            raise ProviderError("malformed provider response: 'text' is not a string")
        return text


def complete(
    request: CompletionRequest,
    provider: CompletionProvider,
    lexicon: FillerLexicon = DEFAULT_LEXICON,
    retry_budget: int = 2,
    fallback: bool = True,
) -> CompletionResult:
    """Complete one request with validation, retries, and fallback.

    Any failure (transport, drift, arity, lexicon) consumes one retry;
    after ``retry_budget`` retries the result falls back to the lexicon's
    default filler at every site (flagged), or the last error is raised
    when fallback is disabled. Results from requests without audio are
    flagged degraded.
    """
    system_instruction, user_message = build_prompt(request)
    degraded = request.audio_ref is None
    last_error: VerbatimError | None = None
    for _ in range(retry_budget + 1):
        try:
            raw = provider.send(system_instruction, user_message, request.audio_ref)
            fillers = extract_fillers(request.rich_text, raw, lexicon)
        except (ProviderError, DriftError, ArityError, LexiconError) as exc:
            last_error = exc
            continue
        return CompletionResult(
            request.utterance_id, tuple(fillers), provider.name, raw, False, degraded
        )
    if fallback:
        sites = hesitation_count(request.rich_text)
        return CompletionResult(
            request.utterance_id,
            (lexicon.default_filler,) * sites,
            provider.name,
            None,
            True,
            degraded,
        )
    assert last_error is not None
    raise last_error


def complete_corpus(
    items: Iterable[tuple[str, str, str | None]],
    provider: CompletionProvider,
    lexicon: FillerLexicon = DEFAULT_LEXICON,
    retry_budget: int = 2,
    fallback: bool = True,
    max_in_flight: int = 4,
) -> list[CompletionResult]:
    """Complete (utterance_id, rich_text, audio_ref) triples in bulk.

    Utterances without hesitations are short-circuited to empty filler
    lists and never reach the provider. Requests run concurrently up to
    ``max_in_flight``; results merge deterministically by utterance_id.
    """
    results: list[CompletionResult] = []
    pending: list[CompletionRequest] = []
    for utterance_id, rich_text, audio_ref in items:
        if hesitation_count(rich_text) == 0:
            results.append(
                CompletionResult(utterance_id, (), provider.name, None, False, audio_ref is None)
            )
        else:
            pending.append(CompletionRequest(utterance_id, rich_text, audio_ref))
    if pending:
        with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
            futures = [
                pool.submit(complete, request, provider, lexicon, retry_budget, fallback)
                for request in pending
            ]
            results.extend(future.result() for future in futures)
    results.sort(key=lambda result: result.utterance_id)
    return results
