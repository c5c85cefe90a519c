"""Minimum-edit-distance alignment and corpus WER aggregation.

Unit edit costs with sclite-style reporting: WER = (S + D + I) / N_ref,
which may exceed 100%. Backtrace ties resolve match > substitute >
delete > insert, applied in a canonical orientation of each pair; the
other orientation is derived by mirroring the result. That keeps output
deterministic and makes role-swap symmetry exact: swapping reference and
hypothesis preserves S and total cost and swaps D and I. (A directional
tie-break alone cannot guarantee this; equal-cost scripts may trade
matches for substitutions differently per direction.)

The dynamic program runs vectorized over whole batches of utterance
pairs, padded to a common shape, so corpus scoring stays fast; the
backtrace then walks each pair's own table. Percentages are kept as
exact ratios here and rounded only at render time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import EmptyCorpusError, UnknownUtteranceError

EditKind = Literal["match", "substitute", "delete", "insert"]

# cell budget per padded DP batch, keeps peak memory modest even for
# corpora mixing very long and very short utterances
_BATCH_CELL_BUDGET = 8_000_000


class EditOp(NamedTuple):
    """One step of an edit script. Deletes carry only the reference token,
    inserts only the hypothesis token, matches/substitutes both."""

    kind: EditKind
    ref: str | None = None
    hyp: str | None = None


@dataclass(frozen=True)
class Alignment:
    """A minimum-cost edit script plus its operation counts."""

    ops: tuple[EditOp, ...]
    n_ref: int
    matches: int
    substitutions: int
    deletions: int
    insertions: int

    @property
    def cost(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def n_hyp(self) -> int:
        return self.matches + self.substitutions + self.insertions


@dataclass(frozen=True)
class WerReport:
    """Aggregated error counts over a non-empty reference."""

    n_ref: int
    substitutions: int
    deletions: int
    insertions: int

    def __post_init__(self) -> None:
        if self.n_ref < 1:
            raise EmptyCorpusError("a WER report needs at least one reference word")

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer_pct(self) -> float:
        return self.errors / self.n_ref * 100.0

    @property
    def sub_pct(self) -> float:
        return self.substitutions / self.n_ref * 100.0

    @property
    def del_pct(self) -> float:
        return self.deletions / self.n_ref * 100.0

    @property
    def ins_pct(self) -> float:
        return self.insertions / self.n_ref * 100.0

    def to_dict(self) -> dict:
        return {
            "n_ref": self.n_ref,
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "wer_pct": self.wer_pct,
            "sub_pct": self.sub_pct,
            "del_pct": self.del_pct,
            "ins_pct": self.ins_pct,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "WerReport":
        return cls(
            n_ref=int(data["n_ref"]),
            substitutions=int(data["substitutions"]),
            deletions=int(data["deletions"]),
            insertions=int(data["insertions"]),
        )


def _canonical(ref: Sequence[str], hyp: Sequence[str]) -> tuple[Sequence[str], Sequence[str], bool]:
    if (len(hyp), tuple(hyp)) < (len(ref), tuple(ref)):
        return hyp, ref, True
    return ref, hyp, False


def _batch_distance(pairs: list[tuple[Sequence[str], Sequence[str]]]) -> np.ndarray:
    """Levenshtein DP tables for a batch of pairs, padded to one shape.

    dp[k, i, j] aligns pairs[k][0][:i] against pairs[k][1][:j]. Cells
    beyond a pair's own lengths are padding garbage; padding token ids
    are chosen so they never match, and the row/column recurrences only
    ever read cells left of or above a valid cell, so every in-range
    cell is exact. Rows are computed vectorized across the whole batch:
    substitution/deletion candidates first, then the within-row
    insertion recurrence closed by a minimum-accumulate of
    (candidate[j] - j).
    """
    batch = len(pairs)
    max_n = max((len(a) for a, _ in pairs), default=0)
    max_m = max((len(b) for _, b in pairs), default=0)
    ref_ids = np.full((batch, max(max_n, 1)), -2, dtype=np.int32)
    hyp_ids = np.full((batch, max(max_m, 1)), -1, dtype=np.int32)
    for k, (a, b) in enumerate(pairs):
        ids: dict[str, int] = {}
        if a:
            ref_ids[k, : len(a)] = [ids.setdefault(t, len(ids)) for t in a]
        if b:
            hyp_ids[k, : len(b)] = [ids.setdefault(t, len(ids)) for t in b]
    col = np.arange(max_m + 1, dtype=np.int32)
    dp = np.empty((batch, max_n + 1, max_m + 1), dtype=np.int32)
    dp[:, 0, :] = col
    cand = np.empty((batch, max_m + 1), dtype=np.int32)
    for i in range(1, max_n + 1):
        prev = dp[:, i - 1, :]
        cand[:, 0] = i
        if max_m:
            np.minimum(
                prev[:, :-1] + (hyp_ids != ref_ids[:, i - 1 : i]),
                prev[:, 1:] + 1,
                out=cand[:, 1:],
            )
        dp[:, i, :] = np.minimum.accumulate(cand - col, axis=1) + col
    return dp


def _backtrace(dp: np.ndarray, ref: Sequence[str], hyp: Sequence[str]) -> Alignment:
    # dp may be padded wider than this pair; only cells up to
    # (len(ref), len(hyp)) are read
    ops: list[EditOp] = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        here = dp[i, j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and dp[i - 1, j - 1] == here:
            ops.append(EditOp("match", ref[i - 1], hyp[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and ref[i - 1] != hyp[j - 1] and dp[i - 1, j - 1] + 1 == here:
            ops.append(EditOp("substitute", ref[i - 1], hyp[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and dp[i - 1, j] + 1 == here:
            ops.append(EditOp("delete", ref=ref[i - 1]))
            i -= 1
        else:
            ops.append(EditOp("insert", hyp=hyp[j - 1]))
            j -= 1
    ops.reverse()
    counts = {"match": 0, "substitute": 0, "delete": 0, "insert": 0}
    for op in ops:
        counts[op.kind] += 1
    return Alignment(
        ops=tuple(ops),
        n_ref=len(ref),
        matches=counts["match"],
        substitutions=counts["substitute"],
        deletions=counts["delete"],
        insertions=counts["insert"],
    )


def _mirror_op(op: EditOp) -> EditOp:
    if op.kind == "delete":
        return EditOp("insert", hyp=op.ref)
    if op.kind == "insert":
        return EditOp("delete", ref=op.hyp)
    return EditOp(op.kind, op.hyp, op.ref)


def _mirror_alignment(alignment: Alignment) -> Alignment:
    return Alignment(
        ops=tuple(_mirror_op(op) for op in alignment.ops),
        n_ref=alignment.n_hyp,
        matches=alignment.matches,
        substitutions=alignment.substitutions,
        deletions=alignment.insertions,
        insertions=alignment.deletions,
    )


def _align_batch(items: list[tuple[Sequence[str], Sequence[str]]]) -> list[Alignment]:
    oriented = [_canonical(ref, hyp) for ref, hyp in items]
    dp = _batch_distance([(a, b) for a, b, _ in oriented])
    alignments = []
    for k, (a, b, swapped) in enumerate(oriented):
        alignment = _backtrace(dp[k], a, b)
        alignments.append(_mirror_alignment(alignment) if swapped else alignment)
    return alignments


def align(ref: Sequence[str], hyp: Sequence[str]) -> Alignment:
    """Minimum-cost alignment of a hypothesis against a reference.

    Costs: match 0, substitute/delete/insert 1 each. Deterministic, and
    exactly role-symmetric: align(hyp, ref) has the same S and cost with
    D and I swapped (see the module docstring for how).
    """
    return _align_batch([(ref, hyp)])[0]


def score_utterances(
    refs: Mapping[str, Sequence[str]], hyps: Mapping[str, Sequence[str]]
) -> dict[str, Alignment]:
    """Align every reference utterance against its hypothesis.

    Hypothesis ids without a reference raise UnknownUtteranceError;
    references without a hypothesis score as all-deletions. Pairs are
    aligned in memory-bounded batches, identical in output to calling
    ``align`` per utterance.
    """
    unknown = [uid for uid in hyps if uid not in refs]
    if unknown:
        raise UnknownUtteranceError(f"hypothesis ids not in references: {sorted(unknown)}")
    uids = list(refs)
    result: dict[str, Alignment] = {}
    chunk: list[str] = []
    max_n = max_m = 0

    def flush() -> None:
        nonlocal chunk, max_n, max_m
        if chunk:
            items = [(refs[uid], hyps.get(uid, ())) for uid in chunk]
            for uid, alignment in zip(chunk, _align_batch(items)):
                result[uid] = alignment
        chunk = []
        max_n = max_m = 0

    for uid in uids:
        new_n = max(max_n, len(refs[uid]))
        new_m = max(max_m, len(hyps.get(uid, ())))
        if chunk and (len(chunk) + 1) * (new_n + 1) * (new_m + 1) > _BATCH_CELL_BUDGET:
            flush()
            new_n = len(refs[uid])
            new_m = len(hyps.get(uid, ()))
        chunk.append(uid)
        max_n, max_m = new_n, new_m
    flush()
    return {uid: result[uid] for uid in uids}


def score_corpus(
    refs: Mapping[str, Sequence[str]], hyps: Mapping[str, Sequence[str]]
) -> WerReport:
    """Corpus-level report: counts summed over per-utterance alignments.

    Empty references with non-empty hypotheses contribute insertions but
    nothing to the denominator. Raises EmptyCorpusError when the summed
    reference length is zero.
    """
    per_utterance = score_utterances(refs, hyps)
    n_ref = sum(a.n_ref for a in per_utterance.values())
    if n_ref == 0:
        raise EmptyCorpusError("total reference length is zero")
    return WerReport(
        n_ref=n_ref,
        substitutions=sum(a.substitutions for a in per_utterance.values()),
        deletions=sum(a.deletions for a in per_utterance.values()),
        insertions=sum(a.insertions for a in per_utterance.values()),
    )
