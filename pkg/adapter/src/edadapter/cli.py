"""Adapter command line: capture logit streams from a local model and export
tokenizer vocabularies, in the profiler's file formats."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .capture import AdapterConfig, AdapterError, capture_generation, capture_manifest
from .vocab import export_vocab


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edadapter",
        description="Capture full-vocabulary logit streams from a local model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capture", help="one generation from a single prompt")
    p.add_argument("--model", required=True, help="local model directory or hub id")
    p.add_argument("--prompt", default=None)
    p.add_argument("--prompt-file", type=Path, default=None)
    p.add_argument("--out", type=Path, default=Path("capture-out"))
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--max-new-tokens", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chat-template", action="store_true")
    p.add_argument("--stop-on-eos", action="store_true")

    p = sub.add_parser("capture-manifest", help="one capture per manifest row")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("capture-out"))
    p.add_argument("--max-new-tokens", type=int, default=500)
    p.add_argument("--architecture", default="transformer",
                   choices=("transformer", "ssm"))
    p.add_argument("--model-name", default=None)
    p.add_argument("--chat-template", action="store_true")
    p.add_argument("--stop-on-eos", action="store_true")

    p = sub.add_parser("export-vocab", help="dump the tokenizer vocabulary")
    p.add_argument("--model", required=True)
    p.add_argument("--out", type=Path, required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "capture":
            if (args.prompt is None) == (args.prompt_file is None):
                print("error: pass exactly one of --prompt/--prompt-file",
                      file=sys.stderr)
                return 2
            prompt = (
                args.prompt
                if args.prompt is not None
                else args.prompt_file.read_text(encoding="utf-8")
            )
            config = AdapterConfig(
                model_ref=args.model,
                temperature=args.temperature,
                max_new_tokens=args.max_new_tokens,
                seed=args.seed,
                chat_template=args.chat_template,
                stop_on_eos=args.stop_on_eos,
                out_dir=args.out,
            )
            result = capture_generation(
                config, prompt, generation_id="capture-000000",
                stream_path=args.out / "streams" / "000000.edls",
            )
            print(f"captured {result.length} positions -> {result.stream_path}")
        elif args.command == "capture-manifest":
            config = AdapterConfig(
                model_ref=args.model,
                max_new_tokens=args.max_new_tokens,
                chat_template=args.chat_template,
                stop_on_eos=args.stop_on_eos,
                out_dir=args.out,
            )
            out_manifest = capture_manifest(
                config, args.manifest,
                architecture=args.architecture, model_name=args.model_name,
            )
            print(f"completed manifest -> {out_manifest}")
        else:
            count = export_vocab(args.model, args.out)
            print(f"wrote {count} vocabulary entries -> {args.out}")
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
