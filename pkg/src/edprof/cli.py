"""Command-line surface.

Subcommands: ``prompts`` (generate the prompt suite), ``summarize``
(streams -> per-generation summaries), ``battery`` (falsification tests),
``synth`` (planted-regime fixtures), ``zipf`` (power-law ED baselines),
``report`` (CSV tables / plot data).

Exit codes: 0 success, 2 usage, 3 validation, 4 partial failure,
5 I/O failure. All randomness flows through explicit seeds, so every
command is deterministic given (config, inputs, seed).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import battery as battery_mod
from . import metrics, prompts, report, streamio, synth
from .config import ANALYSES, RunConfig, merge_option, parse_config_file
from .errors import EDProfError, StreamError, ValidationError
from .manifest import (
    GenerationSummary,
    ManifestRow,
    NEUTRAL_CATEGORIES,
    PROMPT_CATEGORIES,
    SEMANTIC_CATEGORIES,
    load_manifest,
    load_summaries,
    resolve_stream_path,
    write_manifest,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_PARTIAL = 4
EXIT_IO = 5


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", type=Path, default=None, help="manifest.jsonl path")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="root seed")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers")
    p.add_argument(
        "--partition",
        choices=battery_mod.PARTITION_SCHEMES,
        default=None,
        help="F1 partition scheme",
    )
    p.add_argument("--config", type=Path, default=None, help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edprof",
        description="Profile how far model token distributions sit from uniform.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prompts", help="generate the prompt suite and its manifest")
    _add_common(p)
    p.add_argument("--corpus", type=Path, default=None,
                   help="corpus dir for semantic categories (corpus/<cat>/<lang>/*.txt)")
    p.add_argument("--categories", default=",".join(PROMPT_CATEGORIES),
                   help="comma-separated category subset")
    p.add_argument("--languages", default="EN", help="comma-separated languages")
    p.add_argument("--temperatures", default="0.7,1.0,1.3")
    p.add_argument("--n-seeds", type=int, default=1, help="seeds per cell")
    p.add_argument("--budget", type=int, default=200, help="neutral length budget, chars")
    p.add_argument("--model-name", default="unassigned")
    p.add_argument("--architecture", default="transformer")
    p.add_argument("--param-count", type=int, default=1)
    p.add_argument("--vocab-size", type=int, default=2)

    p = sub.add_parser("summarize", help="summarize every stream in a manifest")
    _add_common(p)

    p = sub.add_parser("battery", help="run the falsification battery")
    _add_common(p)
    p.add_argument("--summaries", type=Path, default=None,
                   help="summaries.jsonl (default: <out>/summaries.jsonl)")
    p.add_argument("--analyses", default=None,
                   help=f"comma-separated subset of {','.join(ANALYSES)}")
    p.add_argument("--alpha", dest="significance_alpha", type=float, default=None,
                   help="significance level for post-hoc decisions")
    p.add_argument("--no-streams", action="store_true",
                   help="skip analyses that re-read streams (F5)")

    p = sub.add_parser("synth", help="generate planted-regime synthetic streams")
    _add_common(p)
    p.add_argument("regime", choices=synth.REGIMES)
    p.add_argument("--vocab-size", type=int, default=2048)
    p.add_argument("--length", type=int, default=160)
    p.add_argument("--gens-per-level", type=int, default=24)
    p.add_argument("--temperatures", default="0.7,1.0,1.3")

    p = sub.add_parser("zipf", help="power-law ED baseline table")
    _add_common(p)
    p.add_argument("--alpha", default="1.0", help="exponent or comma-separated grid")
    p.add_argument("--vocab-size", type=int, default=150_000)

    p = sub.add_parser("report", help="emit CSV tables from a battery report")
    _add_common(p)
    p.add_argument("--battery", type=Path, default=None,
                   help="battery.json (default: <out>/battery.json)")
    p.add_argument("--summaries", type=Path, default=None)

    return parser


def _config_from_args(args) -> RunConfig:
    file_values = parse_config_file(args.config) if args.config else {}
    return RunConfig(
        manifest=merge_option(args.manifest, file_values, "manifest", None, Path),
        out=merge_option(args.out, file_values, "out", Path("edprof-out"), Path),
        seed=merge_option(args.seed, file_values, "seed", 0, int),
        jobs=merge_option(args.jobs, file_values, "jobs", 1, int),
        partition=merge_option(args.partition, file_values, "partition", "model_category"),
        alpha=merge_option(
            getattr(args, "significance_alpha", None), file_values, "alpha", 0.05, float
        ),
        analyses=tuple(
            merge_option(
                getattr(args, "analyses", None),
                file_values,
                "analyses",
                ",".join(ANALYSES),
            ).split(",")
        ),
    )


def _parse_temperatures(spec: str) -> tuple[float, ...]:
    try:
        temps = tuple(float(t) for t in spec.split(",") if t.strip())
    except ValueError as exc:
        raise ValidationError(f"bad temperature list {spec!r}") from exc
    if not temps:
        raise ValidationError("temperature list is empty")
    return temps


def cmd_prompts(args) -> int:
    cfg = _config_from_args(args)
    categories = tuple(c for c in args.categories.split(",") if c)
    unknown = [c for c in categories if c not in PROMPT_CATEGORIES]
    if unknown:
        raise ValidationError(f"unknown prompt categories: {unknown}")
    languages = tuple(l for l in args.languages.split(",") if l)
    temperatures = _parse_temperatures(args.temperatures)
    out = cfg.out
    prompt_dir = out / "prompts"
    prompt_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    gen_index = 0
    for language in languages:
        for category in categories:
            for seed_offset in range(args.n_seeds):
                seed = cfg.seed + seed_offset
                if category in NEUTRAL_CATEGORIES:
                    spec = prompts.gen_neutral(
                        category, seed, args.budget, language=language
                    )
                else:
                    if args.corpus is None:
                        raise ValidationError(
                            f"semantic category {category!r} requires --corpus"
                        )
                    spec = prompts.load_semantic(category, args.corpus, language, seed)
                rel = f"prompts/{category}-{language}-{seed}.txt"
                (out / rel).write_text(spec.text, encoding="utf-8")
                for temperature in temperatures:
                    rows.append(
                        ManifestRow(
                            model_name=args.model_name,
                            architecture=args.architecture,
                            param_count=args.param_count,
                            vocab_size=args.vocab_size,
                            prompt_category=category,
                            prompt_text_ref=rel,
                            language=language,
                            temperature=temperature,
                            seed=seed,
                            generation_index=gen_index,
                            stream_path=f"streams/{gen_index:06d}.edls",
                        )
                    )
                    gen_index += 1
    manifest_path = out / "manifest.jsonl"
    write_manifest(rows, manifest_path)
    print(f"wrote {len(rows)} manifest rows to {manifest_path}")
    return EXIT_OK


def _summarize_row(manifest_path, row: ManifestRow):
    path = resolve_stream_path(manifest_path, row)
    if not path.exists():
        raise ValidationError(f"stream file not found: {path}")
    return streamio.summarize_stream_path(path, row.temperature)


def cmd_summarize(args) -> int:
    cfg = _config_from_args(args)
    if cfg.manifest is None:
        raise ValidationError("summarize requires --manifest")
    rows = load_manifest(cfg.manifest)
    cfg.out.mkdir(parents=True, exist_ok=True)

    def work(row):
        try:
            return row, _summarize_row(cfg.manifest, row), None
        except (EDProfError, OSError) as exc:
            return row, None, f"{type(exc).__name__}: {exc}"

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(work, rows))
    else:
        results = [work(row) for row in rows]

    failures = 0
    out_path = cfg.out / "summaries.jsonl"
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for row, summary, error in results:  # manifest order: deterministic merge
            if error is not None:
                failures += 1
                record = {"status": "failed", "generation_index": row.generation_index,
                          "stream_path": row.stream_path, "error": error}
                fh.write(json.dumps(record, ensure_ascii=False))
            else:
                fh.write(
                    GenerationSummary(
                        row=row,
                        ed_mean=summary.ed_mean,
                        ed_std=summary.ed_std,
                        length=summary.length,
                        unique_token_count=summary.unique_token_count,
                        mean_entropy=summary.mean_entropy,
                    ).to_json()
                )
            fh.write("\n")
    print(f"summarized {len(results) - failures}/{len(results)} streams -> {out_path}")
    if failures:
        print(f"{failures} stream(s) failed; see status fields", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _load_ed_series(manifest_path, summaries):
    series: dict[str, list[np.ndarray]] = {}
    for s in summaries:
        path = resolve_stream_path(manifest_path, s.row)
        if not path.exists():
            continue
        series.setdefault(s.row.model_name, []).append(
            streamio.per_position_eds(path, s.row.temperature)
        )
    return series


def cmd_battery(args) -> int:
    cfg = _config_from_args(args)
    summaries_path = args.summaries or (cfg.out / "summaries.jsonl")
    summaries = load_summaries(summaries_path)
    cfg.out.mkdir(parents=True, exist_ok=True)
    series = None
    if summaries and not args.no_streams and cfg.manifest is not None:
        series = _load_ed_series(cfg.manifest, summaries)
    rep = battery_mod.run_battery(
        summaries,
        ed_series_by_model=series,
        partition=cfg.partition,
        alpha=cfg.alpha,
        analyses=cfg.analyses,
    )
    out_path = cfg.out / "battery.json"
    payload = rep.to_jsonable()
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False, sort_keys=True)
        fh.write("\n")
    if not summaries:
        print("warning: no summaries; all tests skipped", file=sys.stderr)
    print(f"battery report -> {out_path}")
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = _config_from_args(args)
    params = synth.RegimeParams(
        regime=args.regime,
        vocab_size=args.vocab_size,
        length=args.length,
        gens_per_level=args.gens_per_level,
        temperatures=_parse_temperatures(args.temperatures),
    )
    manifest_path, rows = synth.generate_run(params, cfg.out, cfg.seed)
    print(f"wrote {len(rows)} synthetic streams, manifest -> {manifest_path}")
    return EXIT_OK


def cmd_zipf(args) -> int:
    cfg = _config_from_args(args)
    try:
        alphas = [float(a) for a in str(args.alpha).split(",") if a.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad alpha list {args.alpha!r}") from exc
    if not alphas:
        raise ValidationError("alpha list is empty")
    rows = []
    for alpha in alphas:
        ed_value = metrics.zipf_ed(alpha, args.vocab_size)
        rows.append(
            {
                "alpha": alpha,
                "vocab_size": args.vocab_size,
                "ed": ed_value,
                "entropy_nats": (1.0 - ed_value) * float(np.log(args.vocab_size)),
            }
        )
    cfg.out.mkdir(parents=True, exist_ok=True)
    out_path = cfg.out / "zipf_baseline.json"
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")
    for r in rows:
        print(f"alpha={r['alpha']:g} V={r['vocab_size']} ED={r['ed']:.6f}")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _config_from_args(args)
    battery_path = args.battery or (cfg.out / "battery.json")
    summaries_path = args.summaries or (cfg.out / "summaries.jsonl")
    battery_json = report.load_battery_json(battery_path)
    summaries = load_summaries(summaries_path)
    written = report.emit_report(battery_json, summaries, cfg.out)
    print(f"wrote {len(written)} tables to {cfg.out}")
    return EXIT_OK


_COMMANDS = {
    "prompts": cmd_prompts,
    "summarize": cmd_summarize,
    "battery": cmd_battery,
    "synth": cmd_synth,
    "zipf": cmd_zipf,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except StreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EDProfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
