"""Chapter header annotation and chapter-boundary segmentation."""

from .corpus import (
    Book,
    GroundTruth,
    Sentence,
    TokenizerConfig,
    book_from_text,
    lemmatize,
    load_book,
    load_ground_truth,
)
from .dp import DpConfig, segment
from .kernels import BACKEND
from .metrics import (
    MetricConfig,
    RegressionModel,
    coefficient_of_variance,
    default_window,
    exact_f1,
    fit_count_regression,
    pk,
    window_diff,
)
from .pipeline import (
    HeaderAnnotation,
    annotate_book,
    detect_front_matter,
    evaluate_headers,
    generate_candidates,
    hunt_missing,
    refine,
    strip_book,
)
from .rules import ElementKind, HeaderRule, RuleMatch, best_match, generate_rules
from .scores import (
    ScoreSeries,
    TransformConfig,
    load_scores,
    log_transform,
    normalize_prominences,
    save_scores,
)
from .segmentation import Segmentation
from .woc import DensitySeries, WocConfig, compute_density, density_series, find_minima, select_breaks

__version__ = "0.1.0"
