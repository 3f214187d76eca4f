"""Transformer-based header and chapter-break confidence scorers."""

from .config import ScorerConfig, load_config
from .inference import score_break_gaps, score_header_lines
from .modeling import ArtifactError, load_artifact, save_artifact
from .training import train_break_model, train_header_model

__version__ = "0.1.0"
