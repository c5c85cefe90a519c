"""Command-line entry point multiplexing the pipeline stages.

Exit codes: 0 success, 1 data error (bad input content), 2 usage error.
File outputs are written atomically (temp file + rename) so a failing
run never leaves a truncated artifact behind. Configuration precedence
is flags > config file > built-in defaults; the config file is plain
``key = value`` lines with ``#`` comments.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .completion import (
    CompletionProvider,
    HttpCompletionProvider,
    StubCompletionProvider,
    complete_corpus,
)
from .corpus import load_corpus, load_manifest
from .ctm import CombineMode, FilterPolicy, filter_artifacts, parse_ctm, serialize_ctm
from .errors import DuplicateIdError, FormatError, UnknownUtteranceError, VerbatimError
from .finetune import builtin_preset, emit_manifest
from .lexicon import DEFAULT_LEXICON, FillerLexicon
from .normalize import NormalizationConfig, normalize
from .report import SchemeResult, build_comparison, format_pct, render_text, render_tsv
from .schemes import Scheme, compile_rich, compile_scheme
from .wer import WerReport, score_corpus, score_utterances


class UsageError(Exception):
    """Bad invocation that argparse cannot catch on its own."""


_CONFIG_KEYS = {
    "provider.base_url",
    "provider.model",
    "provider.max_in_flight",
    "provider.timeout_s",
    "completion.retry_budget",
    "completion.fallback",
    "lexicon.entries",
    "lexicon.default",
}


def _atomic_write(path: Path | str, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _emit(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        _atomic_write(out, text)


def _read_id_text(path: str) -> dict[str, str]:
    """Read "id<TAB>text" lines, preserving order."""
    result: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise FormatError(f"{path}:{lineno}: expected 'id<TAB>text'")
        uid, _, content = line.partition("\t")
        if not uid:
            raise FormatError(f"{path}:{lineno}: empty utterance id")
        if uid in result:
            raise DuplicateIdError(f"{path}:{lineno}: duplicate id {uid!r}")
        result[uid] = content
    return result


def _id_text_lines(entries: dict[str, str]) -> str:
    if not entries:
        return ""
    return "\n".join(f"{uid}\t{text}" for uid, text in entries.items()) + "\n"


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    config: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        config[key] = value.strip()
    return config


def _config_bool(value: str, key: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise UsageError(f"config key {key}: expected a boolean, got {value!r}")


def _build_lexicon(args: argparse.Namespace, config: dict[str, str]) -> FillerLexicon:
    raw = args.fillers if args.fillers is not None else config.get("lexicon.entries")
    if raw is not None:
        entries = [item.strip() for item in raw.split(",") if item.strip()]
    else:
        entries = sorted(DEFAULT_LEXICON.entries)
    default = args.default_filler if args.default_filler is not None else config.get("lexicon.default")
    if default is None:
        default = DEFAULT_LEXICON.default_filler if DEFAULT_LEXICON.default_filler in entries else entries[0]
    return FillerLexicon(frozenset(entries), default)


def _build_provider(
    name: str, args: argparse.Namespace, config: dict[str, str], lexicon: FillerLexicon
) -> CompletionProvider:
    if name == "stub":
        return StubCompletionProvider(filler=lexicon.default_filler)
    base_url = args.base_url if args.base_url is not None else config.get("provider.base_url")
    model = args.model if args.model is not None else config.get("provider.model")
    if not base_url or not model:
        raise UsageError("the http provider needs --base-url and --model (flags or config file)")
    timeout_raw = args.timeout_s if args.timeout_s is not None else config.get("provider.timeout_s", 30.0)
    return HttpCompletionProvider(base_url, model, timeout_s=float(timeout_raw))


def _completion_settings(args: argparse.Namespace, config: dict[str, str]) -> tuple[int, bool, int]:
    retry_raw = args.retry_budget if args.retry_budget is not None else config.get("completion.retry_budget", 2)
    retry_budget = int(retry_raw)
    if args.no_fallback:
        fallback = False
    elif "completion.fallback" in config:
        fallback = _config_bool(config["completion.fallback"], "completion.fallback")
    else:
        fallback = True
    flight_raw = args.max_in_flight if args.max_in_flight is not None else config.get("provider.max_in_flight", 4)
    return retry_budget, fallback, int(flight_raw)


def _norm_config(args: argparse.Namespace, config: dict[str, str]) -> NormalizationConfig:
    return NormalizationConfig(
        lexicon=_build_lexicon(args, config),
        verbalize_numbers=not args.no_verbalize_numbers,
        strip_partial_hyphen=not args.keep_partial_hyphen,
        lowercase=not args.no_lowercase,
    )


def _load_completions(path: str) -> dict[str, list[str]]:
    completions: dict[str, list[str]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
        uid = row.get("utterance_id")
        fillers = row.get("fillers")
        if not isinstance(uid, str) or not isinstance(fillers, list):
            raise FormatError(f"{path}:{lineno}: expected utterance_id and fillers fields")
        if uid in completions:
            raise DuplicateIdError(f"{path}:{lineno}: duplicate id {uid!r}")
        completions[uid] = [str(f) for f in fillers]
    return completions


def _cmd_compile(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    lexicon = _build_lexicon(args, config)
    manifest = load_manifest(args.manifest, split=args.split)
    print(f"loaded {len(manifest)} manifest entries", file=sys.stderr)
    corpus = load_corpus(manifest)
    schemes = list(Scheme) if args.scheme == "all" else [Scheme(args.scheme)]

    completions: dict[str, list[str]] | None = None
    if Scheme.EXTRA in schemes:
        if args.completions:
            completions = _load_completions(args.completions)
        elif args.provider:
            provider = _build_provider(args.provider, args, config, lexicon)
            retry_budget, fallback, max_in_flight = _completion_settings(args, config)
            items = [(t.utterance_id, compile_rich(t).text, t.audio_ref) for t in corpus]
            results = complete_corpus(items, provider, lexicon, retry_budget, fallback, max_in_flight)
            completions = {r.utterance_id: list(r.fillers) for r in results}
        else:
            raise UsageError("--scheme extra needs --completions FILE or an explicit --provider")

    out_dir = Path(args.out_dir)
    for scheme in schemes:
        lines: dict[str, str] = {}
        for transcript in corpus:
            fillers = None
            if scheme is Scheme.EXTRA:
                assert completions is not None
                fillers = completions.get(transcript.utterance_id)
                if fillers is None:
                    if transcript.hesitation_count() == 0:
                        fillers = []
                    else:
                        raise UnknownUtteranceError(
                            f"no completion entry for utterance {transcript.utterance_id!r}"
                        )
            compiled = compile_scheme(transcript, scheme, fillers, lexicon)
            lines[compiled.utterance_id] = compiled.text
        target = out_dir / f"{scheme.value}.tsv"
        _atomic_write(target, _id_text_lines(lines))
        print(f"wrote {len(lines)} utterances to {target}")
    return 0


def _cmd_complete(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    lexicon = _build_lexicon(args, config)
    provider = _build_provider(args.provider or "stub", args, config, lexicon)
    retry_budget, fallback, max_in_flight = _completion_settings(args, config)
    manifest = load_manifest(args.manifest, split=args.split)
    print(f"loaded {len(manifest)} manifest entries", file=sys.stderr)
    corpus = load_corpus(manifest)
    items = [(t.utterance_id, compile_rich(t).text, t.audio_ref) for t in corpus]
    results = complete_corpus(items, provider, lexicon, retry_budget, fallback, max_in_flight)
    payload = "".join(
        json.dumps(
            {"utterance_id": r.utterance_id, "fillers": list(r.fillers), "fallback": r.fallback}
        )
        + "\n"
        for r in results
    )
    _emit(args.out, payload)
    return 0


def _cmd_filter_ctm(args: argparse.Namespace) -> int:
    tokens = parse_ctm(Path(args.input).read_text(encoding="utf-8"))
    combine = CombineMode.CONJUNCTION if args.combine == "and" else CombineMode.DISJUNCTION
    policy = FilterPolicy(args.min_dur_ms / 1000.0, args.min_conf, combine)
    kept, discarded = filter_artifacts(tokens, policy)
    _emit(args.out, serialize_ctm(kept))
    print(f"discarded {discarded} of {len(tokens)} tokens", file=sys.stderr)
    return 0


def _cmd_normalize(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    cfg = _norm_config(args, config)
    entries = _read_id_text(args.input)
    normalized = {uid: " ".join(normalize(text, cfg)) for uid, text in entries.items()}
    _emit(args.out, _id_text_lines(normalized))
    return 0


def _score_inputs(args: argparse.Namespace, config: dict[str, str]) -> tuple[dict, dict]:
    refs_raw = _read_id_text(args.ref)
    hyps_raw = _read_id_text(args.hyp)
    if args.pre_normalized:
        refs = {uid: text.split() for uid, text in refs_raw.items()}
        hyps = {uid: text.split() for uid, text in hyps_raw.items()}
    else:
        cfg = _norm_config(args, config)
        refs = {uid: normalize(text, cfg) for uid, text in refs_raw.items()}
        hyps = {uid: normalize(text, cfg) for uid, text in hyps_raw.items()}
    return refs, hyps


def _cmd_score(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    refs, hyps = _score_inputs(args, config)
    report = score_corpus(refs, hyps)
    print(f"utterances       {len(refs)}")
    print(f"reference words  {report.n_ref}")
    print(f"WER              {format_pct(report.wer_pct)}%")
    print(f"substitutions    {report.substitutions} ({format_pct(report.sub_pct)}%)")
    print(f"deletions        {report.deletions} ({format_pct(report.del_pct)}%)")
    print(f"insertions       {report.insertions} ({format_pct(report.ins_pct)}%)")
    if args.json:
        _atomic_write(args.json, json.dumps(report.to_dict(), indent=2) + "\n")
    if args.per_utterance:
        rows = []
        for uid, alignment in score_utterances(refs, hyps).items():
            rows.append(
                json.dumps(
                    {
                        "utterance_id": uid,
                        "n_ref": alignment.n_ref,
                        "matches": alignment.matches,
                        "substitutions": alignment.substitutions,
                        "deletions": alignment.deletions,
                        "insertions": alignment.insertions,
                        "wer_pct": (alignment.cost / alignment.n_ref * 100.0) if alignment.n_ref else None,
                    }
                )
            )
        _atomic_write(args.per_utterance, "".join(row + "\n" for row in rows))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    results = []
    for item in args.scores:
        name, sep, path = item.partition("=")
        if not sep or not path:
            raise UsageError(f"expected SCHEME=FILE, got {item!r}")
        try:
            scheme = Scheme(name)
        except ValueError:
            raise UsageError(f"unknown scheme {name!r}; choose pure, rich, or extra") from None
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        results.append(SchemeResult(scheme, WerReport.from_dict(data)))
    table = build_comparison(results, Scheme(args.baseline))
    sys.stdout.write(render_text(table))
    if args.tsv:
        _atomic_write(args.tsv, render_tsv(table))
    return 0


def _cmd_emit_config(args: argparse.Namespace) -> int:
    preset = builtin_preset(args.preset)
    _emit(args.out, json.dumps(emit_manifest(preset), indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verbatimkit",
        description="Verbatim transcript toolkit: compile annotation schemes, "
        "complete hesitations, filter CTM hypotheses, normalize, and score WER.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    config_parent = argparse.ArgumentParser(add_help=False)
    config_parent.add_argument("--config", help="key = value config file")

    lex_parent = argparse.ArgumentParser(add_help=False)
    lex_parent.add_argument("--fillers", help="comma-separated filler lexicon (default: um,uh)")
    lex_parent.add_argument("--default-filler", help="fallback filler (default: um)")

    norm_parent = argparse.ArgumentParser(add_help=False)
    norm_parent.add_argument("--no-verbalize-numbers", action="store_true", help="keep digit strings")
    norm_parent.add_argument("--keep-partial-hyphen", action="store_true", help="keep trailing hyphens")
    norm_parent.add_argument("--no-lowercase", action="store_true", help="preserve casing")

    prov_parent = argparse.ArgumentParser(add_help=False)
    prov_parent.add_argument("--provider", choices=["stub", "http"], help="completion provider")
    prov_parent.add_argument("--base-url", help="http provider endpoint URL")
    prov_parent.add_argument("--model", help="http provider model name")
    prov_parent.add_argument("--timeout-s", type=float, help="per-request timeout (default 30)")
    prov_parent.add_argument("--max-in-flight", type=int, help="concurrent requests (default 4)")
    prov_parent.add_argument("--retry-budget", type=int, help="validation retries (default 2)")
    prov_parent.add_argument("--no-fallback", action="store_true", help="fail instead of defaulting fillers")

    p = sub.add_parser(
        "compile",
        parents=[config_parent, lex_parent, prov_parent],
        help="compile a corpus into pure/rich/extra id<TAB>text files",
    )
    p.add_argument("--manifest", required=True, help="JSON-lines corpus manifest")
    p.add_argument("--out-dir", required=True, help="directory for <scheme>.tsv outputs")
    p.add_argument("--scheme", choices=["pure", "rich", "extra", "all"], default="all")
    p.add_argument("--split", choices=["train", "dev", "eval"], help="override split inference")
    p.add_argument("--completions", help="JSON-lines filler completions for the extra scheme")
    p.set_defaults(handler=_cmd_compile)

    p = sub.add_parser(
        "complete",
        parents=[config_parent, lex_parent, prov_parent],
        help="produce filler completions for every utterance in a manifest",
    )
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", choices=["train", "dev", "eval"])
    p.add_argument("--out", help="output JSON-lines path (default: stdout)")
    p.set_defaults(handler=_cmd_complete)

    p = sub.add_parser("filter-ctm", help="drop short low-confidence CTM tokens")
    p.add_argument("input", help="CTM file")
    p.add_argument("--out", help="filtered CTM path (default: stdout)")
    p.add_argument("--min-dur-ms", type=float, default=20.0)
    p.add_argument("--min-conf", type=float, default=0.5)
    p.add_argument("--combine", choices=["and", "or"], default="and")
    p.set_defaults(handler=_cmd_filter_ctm)

    p = sub.add_parser(
        "normalize",
        parents=[config_parent, lex_parent, norm_parent],
        help="normalize id<TAB>text lines for scoring",
    )
    p.add_argument("input", help="id<TAB>text file")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(handler=_cmd_normalize)

    p = sub.add_parser(
        "score",
        parents=[config_parent, lex_parent, norm_parent],
        help="score hypotheses against references with WER",
    )
    p.add_argument("--ref", required=True, help="reference id<TAB>text file")
    p.add_argument("--hyp", required=True, help="hypothesis id<TAB>text file")
    p.add_argument("--pre-normalized", action="store_true", help="inputs are already normalized")
    p.add_argument("--json", help="write the corpus report as JSON")
    p.add_argument("--per-utterance", help="write per-utterance counts as JSON lines")
    p.set_defaults(handler=_cmd_score)

    p = sub.add_parser("report", help="render a scheme comparison table from score JSON files")
    p.add_argument("scores", nargs="+", metavar="SCHEME=FILE", help="e.g. pure=pure.json rich=rich.json")
    p.add_argument("--baseline", choices=["pure", "rich", "extra"], default="pure")
    p.add_argument("--tsv", help="also write the table as TSV")
    p.set_defaults(handler=_cmd_report)

    p = sub.add_parser("emit-config", help="write a fine-tuning hyperparameter manifest")
    p.add_argument("--preset", required=True, choices=["challenge", "post-challenge"])
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(handler=_cmd_emit_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except VerbatimError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
