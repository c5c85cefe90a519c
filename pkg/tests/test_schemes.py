import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from verbatimkit.corpus import (
    AnnotatedToken,
    AnnotatedTranscript,
    SpeechUnit,
    SpeechUnitType,
    WordTag,
)
from verbatimkit.errors import ArityError, LexiconError
from verbatimkit.lexicon import DEFAULT_LEXICON, FillerLexicon
from verbatimkit.normalize import normalize
from verbatimkit.schemes import (
    Scheme,
    compile_extra,
    compile_pure,
    compile_rich,
    hesitation_count,
    split_unit_mark,
    substitute_fillers,
)

from .helpers import random_transcript

HES = AnnotatedToken("", frozenset({WordTag.HESITATION}))


def statement(*tokens):
    return SpeechUnit(tokens, SpeechUnitType.STATEMENT)


def transcript(*units, uid="u1"):
    return AnnotatedTranscript(uid, units)


I_THINK_SO = transcript(
    statement(AnnotatedToken("i"), AnnotatedToken("think"), HES, AnnotatedToken("so"))
)


def test_compile_pure_drops_hesitations_and_marks():
    assert compile_pure(I_THINK_SO).text == "i think so"


def test_compile_pure_hesitation_only_unit_is_empty():
    assert compile_pure(transcript(statement(HES))).text == ""


def test_compile_pure_partial_loses_hyphen():
    unit = SpeechUnit(
        (AnnotatedToken("why"), AnnotatedToken("no", frozenset({WordTag.PARTIAL}))),
        SpeechUnitType.QUESTION,
    )
    assert compile_pure(transcript(unit)).text == "why no"


def test_compile_rich_marks_and_hesitations():
    assert compile_rich(I_THINK_SO).text == "i think # so."


def test_compile_rich_question():
    unit = SpeechUnit((AnnotatedToken("why"),), SpeechUnitType.QUESTION)
    assert compile_rich(transcript(unit)).text == "why?"


def test_compile_rich_incomplete_with_partial():
    unit = SpeechUnit(
        (AnnotatedToken("because"), AnnotatedToken("th", frozenset({WordTag.PARTIAL}))),
        SpeechUnitType.INCOMPLETE,
    )
    assert compile_rich(transcript(unit)).text == "because th-..."


def test_compile_rich_hesitation_only_units_attach_marks():
    assert compile_rich(transcript(statement(HES))).text == "#."
    assert compile_rich(transcript(SpeechUnit((HES,), SpeechUnitType.QUESTION))).text == "#?"
    assert compile_rich(transcript(SpeechUnit((HES,), SpeechUnitType.INCOMPLETE))).text == "#..."


def test_compile_rich_backchannel_and_disfluency_keep_word_only():
    unit = statement(
        AnnotatedToken("uh-huh", frozenset({WordTag.BACKCHANNEL})),
        AnnotatedToken("well", frozenset({WordTag.DISFLUENCY})),
    )
    assert compile_rich(transcript(unit)).text == "uh-huh well."


def test_compile_extra_substitutes_in_order():
    assert compile_extra(I_THINK_SO, ["um"]).text == "i think um so."


def test_compile_extra_no_hesitations_matches_rich():
    plain = transcript(statement(AnnotatedToken("hello")))
    assert compile_extra(plain, []).text == compile_rich(plain).text


def test_compile_extra_arity_error():
    with pytest.raises(ArityError):
        compile_extra(I_THINK_SO, ["um", "uh"])


def test_compile_extra_lexicon_error():
    with pytest.raises(LexiconError):
        compile_extra(I_THINK_SO, ["hmm"])


def test_compile_extra_keeps_unit_mark_on_filler():
    assert compile_extra(transcript(statement(HES)), ["uh"]).text == "uh."


def test_compile_preserves_case():
    unit = statement(AnnotatedToken("Okay"), AnnotatedToken("THEN"))
    assert compile_pure(transcript(unit)).text == "Okay THEN"
    assert compile_rich(transcript(unit)).text == "Okay THEN."


def test_empty_transcript_compiles_empty():
    empty = transcript()
    assert compile_pure(empty).text == ""
    assert compile_rich(empty).text == ""
    assert compile_extra(empty, []).text == ""


def test_scheme_tagging():
    assert compile_pure(I_THINK_SO).scheme is Scheme.PURE
    assert compile_rich(I_THINK_SO).scheme is Scheme.RICH
    assert compile_extra(I_THINK_SO, ["uh"]).scheme is Scheme.EXTRA


def test_split_unit_mark():
    assert split_unit_mark("so.") == ("so", ".")
    assert split_unit_mark("why?") == ("why", "?")
    assert split_unit_mark("th-...") == ("th-", "...")
    assert split_unit_mark("plain") == ("plain", "")
    assert split_unit_mark("#?") == ("#", "?")


def test_hesitation_count_sees_marked_sites():
    assert hesitation_count("a # b #. c #... d #?") == 4
    assert hesitation_count("no sites here.") == 0


def test_substitute_fillers_round_trip_text():
    assert substitute_fillers("a # b #.", ["um", "uh"]) == "a um b uh."
    with pytest.raises(ArityError):
        substitute_fillers("a # b", ["um", "uh"])


transcripts = st.integers(min_value=0, max_value=2**32 - 1).map(
    lambda seed: random_transcript(random.Random(seed), f"utt-{seed}")
)


@settings(max_examples=300)
@given(transcripts, st.randoms(use_true_random=False))
def test_scheme_equivalence_under_normalization(t, rng):
    fillers = [rng.choice(sorted(DEFAULT_LEXICON.entries)) for _ in range(t.hesitation_count())]
    pure = normalize(compile_pure(t).text)
    rich = normalize(compile_rich(t).text)
    extra = normalize(compile_extra(t, fillers).text)
    assert pure == rich == extra


@settings(max_examples=200)
@given(transcripts)
def test_pure_output_carries_no_markup(t):
    text = compile_pure(t).text
    for char in "#?.":
        assert char not in text
    assert "…" not in text
    for token in text.split():
        assert not token.endswith("-")
        assert token not in DEFAULT_LEXICON.entries


@settings(max_examples=200)
@given(transcripts, st.randoms(use_true_random=False))
def test_extra_differs_from_rich_only_at_hesitation_sites(t, rng):
    entries = sorted(DEFAULT_LEXICON.entries)
    fillers = [rng.choice(entries) for _ in range(t.hesitation_count())]
    rich_tokens = compile_rich(t).text.split()
    extra_tokens = compile_extra(t, fillers).text.split()
    assert len(rich_tokens) == len(extra_tokens)
    for rich_tok, extra_tok in zip(rich_tokens, extra_tokens):
        core, mark = split_unit_mark(rich_tok)
        if core == "#":
            extra_core, extra_mark = split_unit_mark(extra_tok)
            assert extra_mark == mark
            assert extra_core in DEFAULT_LEXICON.entries
        else:
            assert rich_tok == extra_tok


def test_custom_lexicon_accepts_its_entries():
    lexicon = FillerLexicon(frozenset({"er", "mm"}), "er")
    assert compile_extra(I_THINK_SO, ["mm"], lexicon).text == "i think mm so."
