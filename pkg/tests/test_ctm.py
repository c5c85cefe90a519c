import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from verbatimkit.ctm import (
    CombineMode,
    CtmToken,
    FilterPolicy,
    ctm_to_transcripts,
    filter_artifacts,
    parse_ctm,
    serialize_ctm,
)
from verbatimkit.errors import FormatError


def tok(dur=0.1, conf=0.9, uid="u1", start=0.0, word="hello"):
    return CtmToken(uid, "1", start, dur, word, conf)


def test_parse_six_column_line():
    tokens = parse_ctm("u1 1 0.00 0.42 hello 0.98\n")
    assert tokens == [CtmToken("u1", "1", 0.0, 0.42, "hello", 0.98)]


def test_parse_five_column_line_has_no_confidence():
    tokens = parse_ctm("u1 1 0.00 0.42 hello\n")
    assert tokens[0].confidence is None


def test_parse_skips_comments_and_blank_lines():
    doc = ";; header\n\nu1 1 0.0 0.1 a\n;; trailing\nu1 1 0.1 0.1 b\n"
    assert [t.word for t in parse_ctm(doc)] == ["a", "b"]


@pytest.mark.parametrize(
    ("line", "fragment"),
    [
        ("u1 1 0.00 hello", "line 1"),
        ("u1 1 0.00 0.42 hello 0.9 extra", "line 1"),
        ("u1 1 zero 0.42 hello", "start"),
        ("u1 1 0.00 0.42 hello 1.5", "confidence"),
        ("u1 1 -0.5 0.42 hello", "start_s"),
        ("u1 1 0.00 -0.1 hello", "dur_s"),
        ("u1 1 nan 0.42 hello", "start"),
    ],
)
def test_parse_errors_carry_line_numbers(line, fragment):
    with pytest.raises(FormatError, match=fragment):
        parse_ctm(line)


def test_parse_error_on_later_line():
    doc = "u1 1 0.0 0.1 a\nu1 1 0.1 bad\n"
    with pytest.raises(FormatError, match="line 2"):
        parse_ctm(doc)


def test_token_field_validation():
    with pytest.raises(FormatError):
        CtmToken("", "1", 0.0, 0.1, "a")
    with pytest.raises(FormatError):
        CtmToken("u1", "1", 0.0, 0.1, "two words")
    with pytest.raises(FormatError):
        CtmToken("u1", "1", 0.0, 0.1, "a", confidence=-0.1)


def test_filter_discards_short_weak_tokens():
    kept, discarded = filter_artifacts([tok(dur=0.015, conf=0.4)])
    assert kept == [] and discarded == 1


def test_filter_conjunction_truth_table():
    # independent oracle: explicit quadrant table around (20 ms, 0.5)
    quadrants = {
        (0.025, 0.9): True,
        (0.025, 0.4): True,
        (0.015, 0.9): True,
        (0.015, 0.4): False,
    }
    policy = FilterPolicy()
    for (dur, conf), expect_kept in quadrants.items():
        kept, _ = filter_artifacts([tok(dur=dur, conf=conf)], policy)
        assert bool(kept) is expect_kept, (dur, conf)


def test_filter_disjunction_truth_table():
    quadrants = {
        (0.025, 0.9): True,
        (0.025, 0.4): False,
        (0.015, 0.9): False,
        (0.015, 0.4): False,
    }
    policy = FilterPolicy(combine=CombineMode.DISJUNCTION)
    for (dur, conf), expect_kept in quadrants.items():
        kept, _ = filter_artifacts([tok(dur=dur, conf=conf)], policy)
        assert bool(kept) is expect_kept, (dur, conf)


def test_filter_boundaries_are_strict():
    kept, _ = filter_artifacts([tok(dur=0.020, conf=0.499)])
    assert len(kept) == 1
    for mode in CombineMode:
        kept, _ = filter_artifacts([tok(dur=0.020, conf=0.5)], FilterPolicy(combine=mode))
        assert len(kept) == 1


def test_filter_missing_confidence_never_weak():
    short_no_conf = CtmToken("u1", "1", 0.0, 0.001, "a")
    kept, _ = filter_artifacts([short_no_conf])
    assert kept == [short_no_conf]
    kept, _ = filter_artifacts([short_no_conf], FilterPolicy(combine=CombineMode.DISJUNCTION))
    assert kept == []  # still short


ctm_tokens = st.builds(
    CtmToken,
    utterance_id=st.from_regex(r"u[0-9]{1,3}", fullmatch=True),
    channel=st.sampled_from(["1", "2", "A"]),
    start_s=st.floats(min_value=0, max_value=1000, allow_nan=False),
    dur_s=st.floats(min_value=0, max_value=5, allow_nan=False),
    word=st.from_regex(r"[a-z']{1,10}", fullmatch=True),
    confidence=st.one_of(st.none(), st.floats(min_value=0, max_value=1, allow_nan=False)),
)


@settings(max_examples=200)
@given(st.lists(ctm_tokens, max_size=30))
def test_filter_idempotent_and_order_preserving(tokens):
    for mode in CombineMode:
        policy = FilterPolicy(combine=mode)
        kept, discarded = filter_artifacts(tokens, policy)
        assert len(kept) + discarded == len(tokens)
        again, zero = filter_artifacts(kept, policy)
        assert again == kept and zero == 0
        it = iter(tokens)
        for survivor in kept:  # survivors appear in original order, unmodified
            assert any(candidate is survivor for candidate in it)


@settings(max_examples=200)
@given(st.lists(ctm_tokens, max_size=30))
def test_conjunction_discards_subset_of_disjunction(tokens):
    conj_kept, _ = filter_artifacts(tokens, FilterPolicy(combine=CombineMode.CONJUNCTION))
    disj_kept, _ = filter_artifacts(tokens, FilterPolicy(combine=CombineMode.DISJUNCTION))
    conj_discarded = {id(t) for t in tokens} - {id(t) for t in conj_kept}
    disj_discarded = {id(t) for t in tokens} - {id(t) for t in disj_kept}
    assert conj_discarded <= disj_discarded


def test_ctm_to_transcripts_sorts_by_start():
    tokens = [tok(start=0.5, word="world"), tok(start=0.0, word="hello")]
    assert ctm_to_transcripts(tokens) == {"u1": ["hello", "world"]}


def test_ctm_to_transcripts_empty():
    assert ctm_to_transcripts([]) == {}


def test_ctm_to_transcripts_interleaved_utterances():
    tokens = [
        tok(uid="u1", start=0.0, word="a"),
        tok(uid="u2", start=0.0, word="x"),
        tok(uid="u1", start=1.0, word="b"),
        tok(uid="u2", start=0.5, word="y"),
    ]
    assert ctm_to_transcripts(tokens) == {"u1": ["a", "b"], "u2": ["x", "y"]}


def test_ctm_to_transcripts_ties_keep_file_order():
    tokens = [tok(start=1.0, word="first"), tok(start=1.0, word="second")]
    assert ctm_to_transcripts(tokens) == {"u1": ["first", "second"]}


def test_ctm_to_transcripts_reference_ids_fill_empty():
    result = ctm_to_transcripts([tok(word="a")], reference_ids=["u1", "u9"])
    assert result == {"u1": ["a"], "u9": []}


def test_serialize_empty():
    assert serialize_ctm([]) == ""


def test_serialize_five_columns_without_confidence():
    line = serialize_ctm([CtmToken("u1", "1", 0.0, 0.5, "a")])
    assert line == "u1 1 0.0 0.5 a\n"


@settings(max_examples=200)
@given(st.lists(ctm_tokens, max_size=50))
def test_parse_serialize_round_trip(tokens):
    doc = serialize_ctm(tokens)
    parsed = parse_ctm(doc)
    assert parsed == tokens
    assert serialize_ctm(parsed) == doc


def test_round_trip_of_handwritten_file():
    doc = ";; comment\nu1 1 0.0 0.42 hello 0.98\nu1 1 0.42 0.1 world\n"
    tokens = parse_ctm(doc)
    assert parse_ctm(serialize_ctm(tokens)) == tokens


def test_large_random_file_round_trip():
    rng = random.Random(99)
    tokens = []
    for i in range(2000):
        conf = round(rng.random(), 6) if rng.random() < 0.7 else None
        tokens.append(
            CtmToken(f"u{i % 40}", "1", rng.random() * 100, rng.random(), f"w{rng.randrange(500)}", conf)
        )
    doc = serialize_ctm(tokens)
    assert parse_ctm(doc) == tokens
    assert serialize_ctm(parse_ctm(doc)) == doc
