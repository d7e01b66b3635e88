import collections

import pytest

from edprof import prompts
from edprof.distributions import chi2_sf
from edprof.errors import ValidationError


def test_empty_category_is_empty_for_any_seed():
    for seed in (0, 1, 999):
        assert prompts.gen_neutral("empty", seed).text == ""


def test_pools_carry_canonical_entries():
    for syllable in ("bla", "mup", "ziq", "fon"):
        assert syllable in prompts.NONSENSE_SYLLABLES
    assert "The" in prompts.NEUTRAL_STUBS
    assert "Generate a completely random sequence of tokens" in (
        prompts.EXPLICIT_RANDOMNESS_TEMPLATES
    )
    assert len(prompts.NEUTRAL_STUBS) >= 20
    assert len(prompts.EXPLICIT_RANDOMNESS_TEMPLATES) >= 20
    assert len(prompts.NONSENSE_SYLLABLES) >= 20


@pytest.mark.parametrize(
    "category",
    ["random_ascii", "nonsense_syllables", "neutral_stub", "explicit_randomness"],
)
def test_neutral_determinism(category):
    a = prompts.gen_neutral(category, 17, 120)
    b = prompts.gen_neutral(category, 17, 120)
    c = prompts.gen_neutral(category, 18, 120)
    assert a.text == b.text
    assert a.text != c.text or category in ("neutral_stub", "explicit_randomness")


def test_random_ascii_charset_and_budget():
    spec = prompts.gen_neutral("random_ascii", 0, 500)
    assert len(spec.text) == 500
    assert all(0x21 <= ord(ch) <= 0x7E for ch in spec.text)


def test_random_ascii_chi_square_uniformity():
    # 1e5 draws over the 94 printable characters; must pass at the 1% level
    text = prompts.gen_neutral("random_ascii", 123, 100_000).text
    counts = collections.Counter(text)
    k = 0x7E - 0x21 + 1
    expected = len(text) / k
    stat = sum(
        (counts.get(chr(c), 0) - expected) ** 2 / expected
        for c in range(0x21, 0x7F)
    )
    assert chi2_sf(stat, k - 1) > 0.01


def test_nonsense_respects_budget():
    spec = prompts.gen_neutral("nonsense_syllables", 5, 40)
    assert 0 < len(spec.text) <= 40
    assert all(part in prompts.NONSENSE_SYLLABLES for part in spec.text.split(" "))


def test_zero_budget_rejected_for_nonempty():
    with pytest.raises(ValidationError):
        prompts.gen_neutral("random_ascii", 0, 0)
    # the empty category has no budget to violate
    assert prompts.gen_neutral("empty", 0, 0).text == ""


def test_semantic_category_rejected_by_neutral_generator():
    with pytest.raises(ValidationError):
        prompts.gen_neutral("wikipedia", 0, 100)


@pytest.fixture
def corpus(tmp_path):
    for category, language, body in [
        ("wikipedia", "EN", "A short article on measurement."),
        ("wikipedia", "JA", "短い記事です。"),
        ("code", "EN", "def f(x):\n    return x + 1\n" * 40),
    ]:
        d = tmp_path / "corpus" / category / language
        d.mkdir(parents=True)
        (d / "a.txt").write_text(body, encoding="utf-8")
    return tmp_path / "corpus"


def test_single_file_short_corpus_gives_leading_window(corpus):
    spec = prompts.load_semantic("wikipedia", corpus, "EN", seed=3)
    assert spec.text == "A short article on measurement."


def test_seeded_windows_reproducible_and_distinct(corpus):
    a1 = prompts.load_semantic("code", corpus, "EN", seed=1, window_chars=50)
    a2 = prompts.load_semantic("code", corpus, "EN", seed=1, window_chars=50)
    b = prompts.load_semantic("code", corpus, "EN", seed=2, window_chars=50)
    assert a1.text == a2.text
    assert len(a1.text) == 50
    assert a1.text != b.text


def test_missing_language_names_path(corpus):
    with pytest.raises(ValidationError) as exc_info:
        prompts.load_semantic("wikipedia", corpus, "PL", seed=0)
    assert "wikipedia" in str(exc_info.value)
    assert "PL" in str(exc_info.value)
