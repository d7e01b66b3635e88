"""edprof: measure how far language-model token distributions sit from
uniform, and stress-test the measurement with a falsification battery."""

from .metrics import (
    EDAccumulator,
    SequenceEDProfile,
    ed,
    ed_from_logits,
    ed_sequence,
    entropy,
    entropy_from_logits,
    entropy_to_perplexity,
    kl_from_uniform,
    softmax_with_temperature,
    zipf_ed,
)

__all__ = [
    "EDAccumulator",
    "SequenceEDProfile",
    "ed",
    "ed_from_logits",
    "ed_sequence",
    "entropy",
    "entropy_from_logits",
    "entropy_to_perplexity",
    "kl_from_uniform",
    "softmax_with_temperature",
    "zipf_ed",
]

__version__ = "0.1.0"
