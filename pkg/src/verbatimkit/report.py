"""Scheme-comparison tables with relative WER deltas.

Deltas are computed from the unrounded corpus WERs; every number is
rounded only at render time, half away from zero, to one decimal. The
plain-text table and its TSV sidecar carry the same column layout:
scheme, WER, delta vs. the baseline, then the substitution, deletion,
and insertion breakdown.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable

from .errors import DomainError, MissingBaselineError, ValidationError
from .schemes import Scheme
from .wer import WerReport

_SCHEME_ORDER = (Scheme.PURE, Scheme.RICH, Scheme.EXTRA)
_SCHEME_LABELS = {Scheme.PURE: "Pure", Scheme.RICH: "Rich", Scheme.EXTRA: "Extra"}


@dataclass(frozen=True)
class SchemeResult:
    """A corpus WER report attributed to one transcription scheme."""

    scheme: Scheme
    report: WerReport


@dataclass(frozen=True)
class ComparisonRow:
    scheme: Scheme
    wer_pct: float
    delta_pct: float | None
    sub_pct: float
    del_pct: float
    ins_pct: float


@dataclass(frozen=True)
class ComparisonTable:
    baseline: Scheme
    rows: tuple[ComparisonRow, ...]


def relative_delta(wer_pct: float, base_pct: float) -> float:
    """Relative WER change vs. a baseline: (wer - base) / base * 100."""
    if base_pct <= 0:
        raise DomainError(f"baseline WER must be positive, got {base_pct}")
    return (wer_pct - base_pct) / base_pct * 100.0


def _round1(value: float) -> Decimal:
    # Decimal(repr(...)) so ties round the way the printed value reads.
    return Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def format_pct(value: float) -> str:
    """One-decimal rendering, half away from zero."""
    return str(_round1(value))

def format_signed(value: float) -> str:
    """One-decimal rendering with an explicit sign ("+16.1", "-11.3")."""
    quantized = _round1(value)
    if quantized == 0:
        return "+0.0"
    return f"+{quantized}" if quantized > 0 else str(quantized)


def build_comparison(results: Iterable[SchemeResult], baseline: Scheme = Scheme.PURE) -> ComparisonTable:
    """Assemble rows in fixed scheme order with deltas against the baseline."""
    by_scheme: dict[Scheme, WerReport] = {}
    for result in results:
        if result.scheme in by_scheme:
            raise ValidationError(f"duplicate result for scheme {result.scheme.value!r}")
        by_scheme[result.scheme] = result.report
    if baseline not in by_scheme:
        raise MissingBaselineError(f"baseline scheme {baseline.value!r} missing from results")
    base_wer = by_scheme[baseline].wer_pct
    rows = []
    for scheme in _SCHEME_ORDER:
        if scheme not in by_scheme:
            continue
        report = by_scheme[scheme]
        delta = None if scheme is baseline else relative_delta(report.wer_pct, base_wer)
        rows.append(
            ComparisonRow(
                scheme=scheme,
                wer_pct=report.wer_pct,
                delta_pct=delta,
                sub_pct=report.sub_pct,
                del_pct=report.del_pct,
                ins_pct=report.ins_pct,
            )
        )
    return ComparisonTable(baseline, tuple(rows))


def table_header(baseline: Scheme) -> list[str]:
    return [
        "Transcription Scheme",
        "WER (%)",
        f"Δ vs. {_SCHEME_LABELS[baseline]} (%)",
        "Substitutions (%)",
        "Deletions (%)",
        "Insertions (%)",
    ]


def _table_cells(table: ComparisonTable, baseline_delta: str) -> list[list[str]]:
    cells = [table_header(table.baseline)]
    for row in table.rows:
        delta = baseline_delta if row.delta_pct is None else format_signed(row.delta_pct)
        cells.append(
            [
                _SCHEME_LABELS[row.scheme],
                format_pct(row.wer_pct),
                delta,
                format_pct(row.sub_pct),
                format_pct(row.del_pct),
                format_pct(row.ins_pct),
            ]
        )
    return cells


def render_text(table: ComparisonTable) -> str:
    """Fixed-width plain-text table; baseline delta rendered as "-"."""
    cells = _table_cells(table, baseline_delta="-")
    widths = [max(len(row[col]) for row in cells) for col in range(len(cells[0]))]
    lines = []
    for row in cells:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render_tsv(table: ComparisonTable) -> str:
    """Tab-separated sidecar; the baseline's delta cell is empty."""
    cells = _table_cells(table, baseline_delta="")
    return "\n".join("\t".join(row) for row in cells) + "\n"


def render_comparison(results: Iterable[SchemeResult], baseline: Scheme = Scheme.PURE) -> str:
    """Convenience: build and render the plain-text comparison."""
    return render_text(build_comparison(results, baseline))
