"""Structured-output evaluation: strict TOON codec, multi-format scoring, carbon-aware metrics."""

from ._accel import BACKEND as KERNEL_BACKEND
from .formats import AdapterError, FormatKind, parse_format, serialize_format
from .scoring import ScoreBundle, ScoreWeights, gamma_sweep, gcs, gcs_env, render_score, syntax_score
from .stats import WilcoxonResult, mean_std, wilcoxon_signed_rank
from .sustainability import DecodeMeasurement, EmissionConfig, carbon_intensity, ees, estimate_ce
from .toon import ToonDialect, ToonError, parse_toon, serialize_toon, validate_toon
from .value import flatten, normalized_equal

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "AdapterError",
    "DecodeMeasurement",
    "EmissionConfig",
    "FormatKind",
    "ScoreBundle",
    "ScoreWeights",
    "ToonDialect",
    "ToonError",
    "WilcoxonResult",
    "carbon_intensity",
    "ees",
    "estimate_ce",
    "flatten",
    "gamma_sweep",
    "gcs",
    "gcs_env",
    "mean_std",
    "normalized_equal",
    "parse_format",
    "parse_toon",
    "render_score",
    "serialize_format",
    "serialize_toon",
    "syntax_score",
    "validate_toon",
    "wilcoxon_signed_rank",
]
