"""Training and model configuration, loadable from YAML."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import yaml


@dataclass
class ScorerConfig:
    """Knobs for tokenizer, model size, training, and inference.

    ``epochs`` defaults to 4, the fine-tuning budget for a pretrained
    encoder; training from random initialization (the offline default,
    see ``pretrained``) typically needs 20-40.
    """

    seed: int = 0
    epochs: int = 4
    learning_rate: float = 3e-4
    batch_size: int = 8
    vocab_size: int = 2000
    hidden_size: int = 96
    num_layers: int = 2
    num_heads: int = 4
    intermediate_size: int = 192
    sequence_length: int = 120  # header-model window
    stride: int = 60  # inference slide
    header_augment: int = 4  # random placements per header
    variant: str = "single_paragraph"  # or "full_window"
    side_tokens: int = 254  # per-side cap for full_window
    pretrained: str | None = None  # local checkpoint dir, when available

    def __post_init__(self):
        if self.variant not in ("single_paragraph", "full_window"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.hidden_size % self.num_heads:
            raise ValueError("hidden_size must divide by num_heads")
        if self.stride < 1 or self.stride > self.sequence_length:
            raise ValueError("stride must lie in [1, sequence_length]")

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: str | Path | None) -> ScorerConfig:
    if path is None:
        return ScorerConfig()
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    known = {f.name for f in fields(ScorerConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ScorerConfig(**data)
