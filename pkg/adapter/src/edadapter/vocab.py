"""Export a tokenizer's vocabulary to the documented line-oriented mapping
file (one `<id>\\t<t:|b:>payload` entry per line)."""

from __future__ import annotations

from pathlib import Path

from .capture import AdapterError, Runtime, load_runtime

_TEXT_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}


def _format_line(token_id: int, token_bytes: bytes) -> str:
    try:
        text = token_bytes.decode("utf-8")
    except UnicodeDecodeError:
        return f"{token_id}\tb:{token_bytes.hex()}"
    escaped = "".join(_TEXT_ESCAPES.get(ch, ch) for ch in text)
    return f"{token_id}\tt:{escaped}"


def export_vocab(model_ref: str, out_path, runtime: Runtime | None = None) -> int:
    """Write every token id from 0 to vocab_size-1; ids the tokenizer does
    not name get empty text. Returns the entry count; output is
    deterministic."""
    rt = runtime if runtime is not None else load_runtime(model_ref)
    tok = rt.tokenizer
    vocab = tok.get_vocab()
    if not vocab:
        raise AdapterError("tokenizer reports an empty vocabulary")
    by_id: dict[int, str] = {}
    for token, token_id in vocab.items():
        by_id[int(token_id)] = token
    count = rt.vocab_size
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for token_id in range(count):
            token = by_id.get(token_id, "")
            fh.write(_format_line(token_id, token.encode("utf-8")))
            fh.write("\n")
    return count
