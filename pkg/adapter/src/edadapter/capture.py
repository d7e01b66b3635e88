"""Capture per-position full-vocabulary logits from a local Hugging Face
causal LM during sampling, and emit `.edls` streams plus manifest rows.

Streams always carry raw (pre-softmax, pre-temperature) logits: the
profiler's temperature handling stays the single source of truth. Each
capture also computes an in-process float64 entropy oracle per position at
dump time, saved in a sidecar JSON next to the stream, so the profiler's
recomputation can be checked against what the runtime actually produced.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch


class AdapterError(Exception):
    """Runtime capture failure (model load, vocabulary mismatch, context)."""


@dataclass(frozen=True)
class AdapterConfig:
    model_ref: str
    temperature: float = 1.0
    max_new_tokens: int = 500
    seed: int = 0
    chat_template: bool = False  # off by default: raw prompt, BOS only
    stop_on_eos: bool = False
    out_dir: Path = Path("capture-out")

    def __post_init__(self):
        if not self.temperature > 0:
            raise AdapterError(f"temperature must be > 0, got {self.temperature}")
        if self.max_new_tokens < 1:
            raise AdapterError("max_new_tokens must be >= 1")


@dataclass
class Runtime:
    model: object
    tokenizer: object

    @property
    def vocab_size(self) -> int:
        return len(self.tokenizer)

    @property
    def param_count(self) -> int:
        return sum(p.numel() for p in self.model.parameters())


def load_runtime(model_ref: str) -> Runtime:
    from transformers import AutoModelForCausalLM, AutoTokenizer

    try:
        model = AutoModelForCausalLM.from_pretrained(model_ref)
        tokenizer = AutoTokenizer.from_pretrained(model_ref)
    except Exception as exc:
        raise AdapterError(f"failed to load model {model_ref!r}: {exc}") from exc
    model.eval()
    return Runtime(model=model, tokenizer=tokenizer)


@dataclass
class CaptureResult:
    stream_path: Path
    sidecar_path: Path
    prompt_token_ids: list[int]
    sampled_token_ids: list[int]
    oracle_entropies: list[float]  # nats, at the capture temperature
    vocab_size: int
    length: int


def _prompt_ids(runtime: Runtime, prompt: str, use_chat_template: bool) -> list[int]:
    tok = runtime.tokenizer
    if use_chat_template:
        try:
            ids = tok.apply_chat_template(
                [{"role": "user", "content": prompt}], add_generation_prompt=True
            )
        except Exception as exc:
            raise AdapterError(f"tokenizer has no usable chat template: {exc}") from exc
        return list(ids)
    if prompt == "":
        # flag semantics: an empty prompt is exactly the BOS token
        if tok.bos_token_id is None:
            raise AdapterError("empty prompt needs a tokenizer with a BOS token")
        return [int(tok.bos_token_id)]
    ids = tok.encode(prompt, add_special_tokens=True)
    if not ids:
        raise AdapterError("prompt tokenized to an empty sequence")
    return [int(i) for i in ids]


def _oracle_entropy(logits64: torch.Tensor, temperature: float) -> float:
    s = logits64 / temperature
    p = torch.softmax(s, dim=-1)
    return float(-(p * torch.log(p)).sum())


def capture_generation(
    config: AdapterConfig,
    prompt: str,
    generation_id: str,
    stream_path,
    runtime: Runtime | None = None,
    metadata_digest: int = 0,
) -> CaptureResult:
    """Generate up to max_new_tokens from the prompt, recording the full
    pre-softmax logit vector and the sampled token at every position.

    Aborts with no partial file on any failure: output goes to a temp file
    renamed into place only after the checksum trailer is written.
    """
    from . import edls

    rt = runtime if runtime is not None else load_runtime(config.model_ref)
    vocab_size = rt.vocab_size
    prompt_ids = _prompt_ids(rt, prompt, config.chat_template)

    max_positions = getattr(rt.model.config, "max_position_embeddings", None)
    if max_positions and len(prompt_ids) + config.max_new_tokens > max_positions:
        raise AdapterError(
            f"prompt ({len(prompt_ids)}) + max_new_tokens ({config.max_new_tokens}) "
            f"exceeds the model context ({max_positions})"
        )

    stream_path = Path(stream_path)
    stream_path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = stream_path.with_suffix(stream_path.suffix + ".tmp")
    gen = torch.Generator().manual_seed(config.seed)
    ids = list(prompt_ids)
    sampled: list[int] = []
    entropies: list[float] = []
    try:
        with open(tmp_path, "wb") as sink:
            writer = edls.StreamWriter(
                sink=sink,
                vocab_size=vocab_size,
                generation_id=generation_id,
                position_count_hint=config.max_new_tokens,
                metadata_digest=metadata_digest,
            )
            with torch.no_grad():
                for _ in range(config.max_new_tokens):
                    out = rt.model(input_ids=torch.tensor([ids], dtype=torch.long))
                    logits = out.logits[0, -1, :]
                    if logits.shape[-1] != vocab_size:
                        raise AdapterError(
                            f"runtime emitted {logits.shape[-1]} logits but the "
                            f"tokenizer vocabulary has {vocab_size} entries"
                        )
                    logits64 = logits.double()
                    entropies.append(_oracle_entropy(logits64, config.temperature))
                    probs = torch.softmax(logits64 / config.temperature, dim=-1)
                    token = int(torch.multinomial(probs, 1, generator=gen))
                    writer.add(logits64.numpy(), token)
                    sampled.append(token)
                    ids.append(token)
                    if config.stop_on_eos and token == rt.tokenizer.eos_token_id:
                        break
            writer.finish()
        os.replace(tmp_path, stream_path)
    except BaseException:
        tmp_path.unlink(missing_ok=True)
        raise

    sidecar_path = stream_path.with_suffix(stream_path.suffix + ".capture.json")
    sidecar = {
        "generation_id": generation_id,
        "prompt_token_ids": prompt_ids,
        "bos_token_id": rt.tokenizer.bos_token_id,
        "chat_template": config.chat_template,
        "temperature": config.temperature,
        "seed": config.seed,
        "quantization": "none",
        "oracle_entropies_nats": entropies,
    }
    with open(sidecar_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    return CaptureResult(
        stream_path=stream_path,
        sidecar_path=sidecar_path,
        prompt_token_ids=prompt_ids,
        sampled_token_ids=sampled,
        oracle_entropies=entropies,
        vocab_size=vocab_size,
        length=len(sampled),
    )


def capture_manifest(
    config: AdapterConfig,
    manifest_path,
    architecture: str = "transformer",
    model_name: str | None = None,
) -> Path:
    """Run captures for every row of a prompt manifest, writing streams and a
    completed manifest (real model name, parameter count, vocabulary size)
    under config.out_dir."""
    from . import edls

    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise AdapterError(f"manifest not found: {manifest_path}")
    rt = load_runtime(config.model_ref)
    name = model_name or Path(config.model_ref).name or "local-model"
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows_out = []
    with open(manifest_path, "r", encoding="utf-8") as fh:
        rows_in = [json.loads(line) for line in fh if line.strip()]
    for raw in rows_in:
        prompt_ref = raw["prompt_text_ref"]
        prompt_file = manifest_path.parent / prompt_ref
        if not prompt_file.exists():
            raise AdapterError(f"prompt text not found: {prompt_file}")
        prompt = prompt_file.read_text(encoding="utf-8")
        row = edls.manifest_row(
            model_name=name,
            architecture=architecture,
            param_count=rt.param_count,
            vocab_size=rt.vocab_size,
            prompt_category=raw["prompt_category"],
            prompt_text_ref=prompt_ref,
            language=raw["language"],
            temperature=raw["temperature"],
            seed=raw["seed"],
            generation_index=raw["generation_index"],
            stream_path=raw["stream_path"],
        )
        capture_generation(
            AdapterConfig(
                model_ref=config.model_ref,
                temperature=float(raw["temperature"]),
                max_new_tokens=config.max_new_tokens,
                seed=int(raw["seed"]),
                chat_template=config.chat_template,
                stop_on_eos=config.stop_on_eos,
                out_dir=config.out_dir,
            ),
            prompt,
            generation_id=f"{name}-{raw['generation_index']:06d}",
            stream_path=out / raw["stream_path"],
            runtime=rt,
            metadata_digest=edls.row_digest(row),
        )
        # copy the prompt text so the output directory is self-contained
        dest = out / prompt_ref
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(prompt, encoding="utf-8")
        rows_out.append(row)
    out_manifest = out / "manifest.jsonl"
    edls.write_manifest(rows_out, out_manifest)
    return out_manifest
