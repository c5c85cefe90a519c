"""Toolkit for verbatim L2-speech transcripts.

Compiles disfluency-annotated corpora into pure/rich/extra training
targets, completes hesitation tags through pluggable providers, filters
time-aligned CTM hypotheses, normalizes text for scoring, and computes
WER with substitution/deletion/insertion breakdowns.
"""

from .completion import (
    CompletionProvider,
    CompletionRequest,
    CompletionResult,
    HttpCompletionProvider,
    StubCompletionProvider,
    build_prompt,
    complete,
    complete_corpus,
    extract_fillers,
)
from .corpus import (
    AnnotatedToken,
    AnnotatedTranscript,
    CorpusManifest,
    ManifestEntry,
    SpeechUnit,
    SpeechUnitType,
    Split,
    WordTag,
    load_corpus,
    load_manifest,
    parse_annotated_transcript,
    serialize_annotated_transcript,
)
from .ctm import (
    CombineMode,
    CtmToken,
    FilterPolicy,
    ctm_to_transcripts,
    filter_artifacts,
    parse_ctm,
    serialize_ctm,
)
from .errors import (
    ArityError,
    DomainError,
    DriftError,
    DuplicateIdError,
    EmptyCorpusError,
    FormatError,
    LexiconError,
    MissingBaselineError,
    MissingFileError,
    ProviderError,
    RangeError,
    SchemaError,
    UnknownUtteranceError,
    ValidationError,
    VerbatimError,
)
from .finetune import (
    CHALLENGE,
    POST_CHALLENGE,
    LoraSpec,
    OptimizerSpec,
    SchedulePreset,
    emit_manifest,
    rslora_scale,
    standard_lora_scale,
)
from .lexicon import DEFAULT_LEXICON, FillerLexicon, make_lexicon
from .normalize import NormalizationConfig, TokenSequence, normalize, number_to_words
from .report import (
    ComparisonTable,
    SchemeResult,
    build_comparison,
    format_signed,
    relative_delta,
    render_comparison,
    render_text,
    render_tsv,
)
from .schemes import (
    PlainTranscript,
    Scheme,
    compile_extra,
    compile_pure,
    compile_rich,
    compile_scheme,
    hesitation_count,
    substitute_fillers,
)
from .wer import Alignment, EditOp, WerReport, align, score_corpus, score_utterances

__version__ = "0.1.0"
