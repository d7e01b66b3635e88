"""Prompt suite: five neutral generators and four semantic corpus loaders.

Everything is a pure function of (category, language, seed, budget, corpus
snapshot). Neutral text comes from frozen pools shipped here so that a
given seed reproduces byte-identical prompts on any machine; semantic
prompts are seeded excerpts from a user-supplied corpus laid out as
``corpus/<category>/<language>/*.txt``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .manifest import NEUTRAL_CATEGORIES, SEMANTIC_CATEGORIES

# Printable, non-space ASCII. "Random ASCII" is interpreted as a uniform
# draw over this set.
ASCII_LO, ASCII_HI = 0x21, 0x7E

# Frozen pools. Reproducibility requires a fixed list, so these ship with
# the package rather than being generated.
NEUTRAL_STUBS = (
    "The", "A", "In", "It", "On", "When", "There", "This", "An", "At",
    "From", "By", "As", "One", "We", "He", "She", "They", "After",
    "Before", "During", "Under",
)

EXPLICIT_RANDOMNESS_TEMPLATES = (
    "Generate a completely random sequence of tokens",
    "Produce random output with no pattern or meaning.",
    "Write a stream of totally random words.",
    "Emit tokens chosen entirely at random.",
    "Output text that is as unpredictable as possible.",
    "Please be maximally random in what you write next.",
    "Continue with pure noise: no structure, no meaning.",
    "Type random characters and words without any order.",
    "Respond with an arbitrary, patternless sequence.",
    "Give me randomness: no grammar, no topic, no repetition.",
    "Produce an unstructured random token stream.",
    "Say anything at all, chosen uniformly at random.",
    "Write the least predictable text you can.",
    "Generate noise instead of language.",
    "Fill the page with random, meaningless tokens.",
    "Ignore all context and produce random output.",
    "Sample your next tokens as randomly as you can.",
    "Output a disordered jumble of random tokens.",
    "Be a random number generator over your vocabulary.",
    "Print arbitrary tokens with no relation to each other.",
)

# Consonant-vowel-consonant style nonsense, seeded with the canonical
# four-syllable example plus hand-rolled fillers.
NONSENSE_SYLLABLES = (
    "bla", "mup", "ziq", "fon",
    "dak", "pel", "rin", "tog", "vun", "zef", "kib", "lom", "nup", "sav",
    "wex", "yot", "hif", "gur", "bem", "cax", "dov", "fyn", "jaz", "kel",
    "miv", "nol", "pyx", "quv", "rab", "sim", "tuz", "wab", "xen", "yam",
    "zork", "gap", "hun", "jit", "lek", "vos",
)


@dataclass(frozen=True)
class PromptSpec:
    category: str
    language: str
    seed: int
    text: str
    estimated_token_count: int | None = None


def _rng(category: str, seed: int, budget: int) -> random.Random:
    # str seeding hashes with SHA-512 internally: stable across platforms.
    return random.Random(f"{category}|{seed}|{budget}")


def gen_neutral(
    category: str, seed: int, length_budget: int = 200, language: str = "EN"
) -> PromptSpec:
    """Generate one neutral prompt, deterministic in
    (category, seed, length_budget)."""
    if category not in NEUTRAL_CATEGORIES:
        raise ValidationError(f"{category!r} is not a neutral category")
    if category == "empty":
        return PromptSpec(category=category, language=language, seed=seed, text="")
    if length_budget <= 0:
        raise ValidationError(
            f"length_budget must be > 0 for category {category!r}"
        )
    rng = _rng(category, seed, length_budget)
    if category == "random_ascii":
        text = "".join(
            chr(rng.randrange(ASCII_LO, ASCII_HI + 1)) for _ in range(length_budget)
        )
    elif category == "nonsense_syllables":
        parts = [rng.choice(NONSENSE_SYLLABLES)]
        while True:
            nxt = rng.choice(NONSENSE_SYLLABLES)
            if len(" ".join(parts)) + 1 + len(nxt) > length_budget:
                break
            parts.append(nxt)
        text = " ".join(parts)
    elif category == "neutral_stub":
        text = rng.choice(NEUTRAL_STUBS)
    elif category == "explicit_randomness":
        text = rng.choice(EXPLICIT_RANDOMNESS_TEMPLATES)
    else:  # pragma: no cover - category list is closed above
        raise ValidationError(f"unhandled neutral category {category!r}")
    return PromptSpec(category=category, language=language, seed=seed, text=text)


def load_semantic(
    category: str,
    corpus_dir,
    language: str,
    seed: int,
    window_chars: int = 600,
) -> PromptSpec:
    """Pick a seeded fixed-size character window from the corpus.

    File choice and window start are both driven by the seed; a file
    shorter than the window yields its full text (the leading window).
    """
    if category not in SEMANTIC_CATEGORIES:
        raise ValidationError(f"{category!r} is not a semantic category")
    if window_chars <= 0:
        raise ValidationError("window_chars must be > 0")
    cat_dir = Path(corpus_dir) / category / language
    if not cat_dir.is_dir():
        raise ValidationError(f"missing corpus directory: {cat_dir}")
    files = sorted(p for p in cat_dir.iterdir() if p.suffix == ".txt")
    if not files:
        raise ValidationError(f"no .txt files under corpus directory: {cat_dir}")
    rng = _rng(f"{category}/{language}", seed, window_chars)
    chosen = files[rng.randrange(len(files))]
    text = chosen.read_text(encoding="utf-8")
    if len(text) > window_chars:
        start = rng.randrange(len(text) - window_chars + 1)
        text = text[start : start + window_chars]
    return PromptSpec(category=category, language=language, seed=seed, text=text)
