import numpy as np
import pytest

from edprof.manifest import GenerationSummary, ManifestRow


@pytest.fixture
def make_summary():
    """Factory for GenerationSummary rows with sensible defaults."""

    def _make(
        ed_mean,
        model="model-a",
        category="wikipedia",
        language="EN",
        temperature=1.0,
        seed=None,
        generation_index=0,
        param_count=1_000_000,
        architecture="transformer",
        ed_std=0.01,
        length=100,
        unique_token_count=50,
        stream_path="",
        prompt_text_ref=None,
    ):
        row = ManifestRow(
            model_name=model,
            architecture=architecture,
            param_count=param_count,
            vocab_size=1000,
            prompt_category=category,
            prompt_text_ref=prompt_text_ref
            if prompt_text_ref is not None
            else f"prompt-{generation_index}",
            language=language,
            temperature=temperature,
            seed=seed if seed is not None else generation_index,
            generation_index=generation_index,
            stream_path=stream_path,
        )
        return GenerationSummary(
            row=row,
            ed_mean=float(np.clip(ed_mean, 0.0, 1.0)),
            ed_std=ed_std,
            length=length,
            unique_token_count=unique_token_count,
            mean_entropy=1.0,
        )

    return _make
