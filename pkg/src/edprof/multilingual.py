"""Tokenizer-level multilingual analysis: fertility, script-based vocabulary
allocation, unique-token usage, and residualized cross-language effect sizes.

Vocabularies are ingested from a line-oriented mapping file (see
docs/vocab-format.md) so the analysis stays independent of any particular
tokenizer library. Script classification uses the fixed Unicode block
ranges listed in docs/script-ranges.md.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .regression import residualize
from .statistics import cohens_d


class Script(enum.Enum):
    LATIN = "Latin"
    HAN = "Han"
    KANA = "Hiragana/Katakana"
    ARABIC = "Arabic"
    CYRILLIC = "Cyrillic"
    DIGIT = "Digit"
    PUNCT_SYMBOL = "Punct/Symbol"
    OTHER = "Other"


# Fixed block ranges (inclusive), checked in order. Anything unmatched
# falls back to the Unicode general category: P*/S* -> PUNCT_SYMBOL,
# everything else OTHER.
_SCRIPT_RANGES: tuple[tuple[int, int, Script], ...] = (
    (0x0030, 0x0039, Script.DIGIT),
    (0x0041, 0x005A, Script.LATIN),
    (0x0061, 0x007A, Script.LATIN),
    (0x00C0, 0x00D6, Script.LATIN),
    (0x00D8, 0x00F6, Script.LATIN),
    (0x00F8, 0x024F, Script.LATIN),
    (0x1E00, 0x1EFF, Script.LATIN),
    (0x2C60, 0x2C7F, Script.LATIN),
    (0xA720, 0xA7FF, Script.LATIN),
    (0x0400, 0x04FF, Script.CYRILLIC),
    (0x0500, 0x052F, Script.CYRILLIC),
    (0x2DE0, 0x2DFF, Script.CYRILLIC),
    (0xA640, 0xA69F, Script.CYRILLIC),
    (0x0600, 0x06FF, Script.ARABIC),
    (0x0750, 0x077F, Script.ARABIC),
    (0x08A0, 0x08FF, Script.ARABIC),
    (0xFB50, 0xFDFF, Script.ARABIC),
    (0xFE70, 0xFEFF, Script.ARABIC),
    (0x3040, 0x309F, Script.KANA),
    (0x30A0, 0x30FF, Script.KANA),
    (0x31F0, 0x31FF, Script.KANA),
    (0xFF66, 0xFF9D, Script.KANA),
    (0x3400, 0x4DBF, Script.HAN),
    (0x4E00, 0x9FFF, Script.HAN),
    (0xF900, 0xFAFF, Script.HAN),
    (0x20000, 0x2A6DF, Script.HAN),
)

# Scripts counted for each manifest language when computing vocabulary
# allocation.
LANGUAGE_SCRIPTS: dict[str, frozenset[Script]] = {
    "EN": frozenset({Script.LATIN}),
    "PL": frozenset({Script.LATIN}),
    "JA": frozenset({Script.KANA, Script.HAN}),
    "ZH": frozenset({Script.HAN}),
    "AR": frozenset({Script.ARABIC}),
}


def classify_script(ch: str) -> Script:
    """Classify a single Unicode scalar into the fixed script buckets."""
    if len(ch) != 1:
        raise ValidationError(f"classify_script expects one character, got {ch!r}")
    cp = ord(ch)
    for lo, hi, script in _SCRIPT_RANGES:
        if lo <= cp <= hi:
            return script
    cat = unicodedata.category(ch)
    if cat.startswith(("P", "S")):
        return Script.PUNCT_SYMBOL
    return Script.OTHER


def fertility(token_count: int, source_char_count: int) -> float:
    """Tokens per source character. Characters are Unicode scalar values of
    the source text, internal whitespace included."""
    if token_count <= 0:
        raise ValidationError(f"token_count must be > 0, got {token_count}")
    if source_char_count <= 0:
        raise ValidationError(
            f"source_char_count must be > 0, got {source_char_count}"
        )
    return token_count / source_char_count


@dataclass(frozen=True)
class VocabEntry:
    token_id: int
    text: str | None  # None when the token's bytes are not valid UTF-8


@dataclass(frozen=True)
class TokenizerProfile:
    entries: tuple[VocabEntry, ...]
    vocab_size: int


# Leading markers various tokenizers use for "word starts here"; dropped
# before script inspection.
_WORD_MARKERS = ("Ġ", "▁")  # byte-level space marker, sentencepiece underline


def _normalized_chars(text: str):
    stripped = text
    while stripped and stripped[0] in _WORD_MARKERS:
        stripped = stripped[1:]
    return [ch for ch in stripped if not ch.isspace()]


def vocab_allocation(profile: TokenizerProfile, scripts) -> int:
    """Count vocabulary entries whose decoded text lies entirely in the given
    script set.

    Normalization: leading word-start markers and all whitespace are
    ignored; an entry with nothing left after normalization is not counted;
    undecodable entries never match (they classify as Other).
    """
    wanted = frozenset(scripts)
    count = 0
    for entry in profile.entries:
        if entry.text is None:
            continue
        chars = _normalized_chars(entry.text)
        if not chars:
            continue
        if all(classify_script(ch) in wanted for ch in chars):
            count += 1
    return count


def unique_tokens(sampled_token_ids) -> int:
    """Number of distinct token ids in a generation."""
    return len(set(sampled_token_ids))


# --- vocabulary file ingestion ----------------------------------------------

_TEXT_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_TEXT_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def escape_token_text(text: str) -> str:
    return "".join(_TEXT_ESCAPES.get(ch, ch) for ch in text)


def unescape_token_text(payload: str) -> str:
    out = []
    i = 0
    while i < len(payload):
        ch = payload[i]
        if ch == "\\":
            if i + 1 >= len(payload) or payload[i + 1] not in _TEXT_UNESCAPES:
                raise ValidationError(f"bad escape in vocab entry: {payload!r}")
            out.append(_TEXT_UNESCAPES[payload[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def format_vocab_line(token_id: int, token_bytes: bytes) -> str:
    """One vocabulary-file line: `<id>\\tt:<escaped-text>` when the token is
    valid UTF-8, `<id>\\tb:<hex>` for raw byte tokens."""
    try:
        text = token_bytes.decode("utf-8")
    except UnicodeDecodeError:
        return f"{token_id}\tb:{token_bytes.hex()}"
    return f"{token_id}\tt:{escape_token_text(text)}"


def write_vocab_file(entries, path) -> None:
    """entries: iterable of (token_id, token_bytes | str)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for token_id, token in entries:
            raw = token.encode("utf-8") if isinstance(token, str) else token
            fh.write(format_vocab_line(int(token_id), raw))
            fh.write("\n")


def load_vocab_file(path) -> TokenizerProfile:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"vocabulary file not found: {path}")
    entries = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                id_part, payload = line.split("\t", 1)
                token_id = int(id_part)
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: malformed line") from exc
            if token_id in seen:
                raise ValidationError(f"{path}:{lineno}: duplicate token id {token_id}")
            seen.add(token_id)
            if payload.startswith("t:"):
                text = unescape_token_text(payload[2:])
            elif payload.startswith("b:"):
                try:
                    raw = bytes.fromhex(payload[2:])
                except ValueError as exc:
                    raise ValidationError(f"{path}:{lineno}: bad hex payload") from exc
                try:
                    text = raw.decode("utf-8")
                except UnicodeDecodeError:
                    text = None
            else:
                raise ValidationError(
                    f"{path}:{lineno}: payload must start with 't:' or 'b:'"
                )
            entries.append(VocabEntry(token_id=token_id, text=text))
    if not entries:
        raise ValidationError(f"vocabulary file is empty: {path}")
    return TokenizerProfile(entries=tuple(entries), vocab_size=len(entries))


# --- residualized cross-language contrasts ----------------------------------


@dataclass(frozen=True)
class LanguageContrast:
    language: str
    n: int
    raw_cohens_d: float
    residualized_cohens_d: float


def residualized_contrast(
    ed_values, token_counts, language_labels, baseline_language: str
) -> dict[str, LanguageContrast]:
    """Cohen's d of each language against the baseline, before and after
    residualizing ED on prompt token count.

    Residualization uses a single pooled intercept-plus-slope regression, so
    a constant covariate reduces to centering and leaves d unchanged.
    """
    ed = np.asarray(ed_values, dtype=np.float64)
    counts = np.asarray(token_counts, dtype=np.float64)
    labels = list(language_labels)
    if not (ed.size == counts.size == len(labels)):
        raise ValidationError("ed, token counts, and labels must align")
    langs = sorted(set(labels))
    if len(langs) < 2:
        raise ValidationError("need at least 2 languages")
    if baseline_language not in langs:
        raise ValidationError(f"baseline language {baseline_language!r} not present")
    masks = {lang: np.array([lb == lang for lb in labels]) for lang in langs}
    for lang, mask in masks.items():
        if mask.sum() < 2:
            raise ValidationError(f"language {lang!r} has fewer than 2 observations")
    if np.all(counts == counts[0]):
        # constant covariate: residualizing is just centering
        resid = ed - ed.mean()
    else:
        resid = residualize(ed, counts)
    base = masks[baseline_language]
    out = {}
    for lang in langs:
        if lang == baseline_language:
            continue
        mask = masks[lang]
        out[lang] = LanguageContrast(
            language=lang,
            n=int(mask.sum()),
            raw_cohens_d=cohens_d(ed[mask], ed[base]),
            residualized_cohens_d=cohens_d(resid[mask], resid[base]),
        )
    return out


@dataclass(frozen=True)
class LanguageReport:
    language: str
    mean_ed: float
    fertility: float | None
    vocab_allocation: int | None
    unique_tokens_per_generation: float
    cohens_d_vs_baseline: float | None
    residualized_cohens_d: float | None
