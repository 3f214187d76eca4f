"""Model construction and hash-pinned artifact save/load."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import yaml
from transformers import (
    BertConfig,
    BertForNextSentencePrediction,
    BertForTokenClassification,
)

from .config import ScorerConfig
from .tokenization import load_tokenizer, save_tokenizer, wrap


class ArtifactError(Exception):
    """Artifact missing, malformed, or failing its hash pins."""


def _bert_config(cfg: ScorerConfig, vocab_size: int, **extra) -> BertConfig:
    return BertConfig(
        vocab_size=vocab_size,
        hidden_size=cfg.hidden_size,
        num_hidden_layers=cfg.num_layers,
        num_attention_heads=cfg.num_heads,
        intermediate_size=cfg.intermediate_size,
        max_position_embeddings=512,
        **extra,
    )


def build_token_model(cfg: ScorerConfig, vocab_size: int):
    if cfg.pretrained:
        return BertForTokenClassification.from_pretrained(
            cfg.pretrained, num_labels=2
        )
    return BertForTokenClassification(_bert_config(cfg, vocab_size, num_labels=2))


def build_pair_model(cfg: ScorerConfig, vocab_size: int):
    if cfg.pretrained:
        return BertForNextSentencePrediction.from_pretrained(cfg.pretrained)
    return BertForNextSentencePrediction(_bert_config(cfg, vocab_size))


_MODEL_CLASSES = {
    "headers": BertForTokenClassification,
    "breaks": BertForNextSentencePrediction,
}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def save_artifact(model, raw_tokenizer, cfg: ScorerConfig, task: str, out_dir):
    """Write model + tokenizer + config, pinning both by sha256."""
    out = Path(out_dir)
    (out / "model").mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out / "model")
    save_tokenizer(raw_tokenizer, out / "tokenizer.json")
    weights = out / "model" / "model.safetensors"
    pins = {
        "task": task,
        "config": cfg.to_dict(),
        "hashes": {
            "model": _sha256(weights),
            "tokenizer": _sha256(out / "tokenizer.json"),
        },
    }
    (out / "scorer.yaml").write_text(yaml.safe_dump(pins), encoding="utf-8")


def load_artifact(model_dir, expected_task: str):
    """Load a pinned artifact; hash mismatches raise ArtifactError."""
    out = Path(model_dir)
    meta_path = out / "scorer.yaml"
    if not meta_path.exists():
        raise ArtifactError(f"{out} has no scorer.yaml")
    meta = yaml.safe_load(meta_path.read_text(encoding="utf-8"))
    if meta.get("task") != expected_task:
        raise ArtifactError(
            f"artifact task {meta.get('task')!r} != {expected_task!r}"
        )
    weights = out / "model" / "model.safetensors"
    for name, path in (("model", weights), ("tokenizer", out / "tokenizer.json")):
        if _sha256(path) != meta["hashes"][name]:
            raise ArtifactError(f"{name} hash mismatch in {out}")
    raw = load_tokenizer(out / "tokenizer.json")
    tok = wrap(raw)
    model = _MODEL_CLASSES[expected_task].from_pretrained(out / "model")
    model.eval()
    cfg = ScorerConfig(**meta["config"])
    return model, tok, cfg
