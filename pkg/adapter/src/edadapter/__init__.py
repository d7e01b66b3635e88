"""edadapter: capture per-position full-vocabulary logits from local
Hugging Face models into `.edls` streams, plus tokenizer vocabulary export."""

from .capture import AdapterConfig, AdapterError, capture_generation, capture_manifest
from .vocab import export_vocab

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "capture_generation",
    "capture_manifest",
    "export_vocab",
]

__version__ = "0.1.0"
