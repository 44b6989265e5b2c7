"""Paired evaluation protocol: corpus, prompts, backends, runs, scoring and reports."""

from .backends import BackendError, Generation, HttpBackend, ReplayBackend, ReplayMiss
from .compare import (
    InsufficientPairs,
    Metric,
    PairedComparison,
    compare_formats,
    default_comparisons,
    format_crossing,
    summarize,
    sweep_formats,
)
from .config import ConfigError, RunConfig, load_config
from .corpus import CorpusFormatError, DuplicateInstanceId, TaskInstance, load_corpus
from .prompts import MissingTemplate, PromptTemplate, build_prompt, default_templates, templates_with_overrides
from .records import GenerationRecord, read_records, strip_fences, write_records
from .report import ReportIoError, emit_report
from .runner import (
    RunLocked,
    ScoredRecord,
    UnknownInstance,
    read_scored,
    run_lock,
    run_paired,
    score_records,
    write_scored,
)

__all__ = [
    "BackendError", "ConfigError", "CorpusFormatError", "DuplicateInstanceId", "Generation",
    "GenerationRecord", "HttpBackend", "InsufficientPairs", "Metric", "MissingTemplate",
    "PairedComparison", "PromptTemplate", "ReplayBackend", "ReplayMiss", "ReportIoError",
    "RunConfig", "RunLocked", "ScoredRecord", "TaskInstance", "UnknownInstance", "build_prompt",
    "compare_formats", "default_comparisons", "default_templates", "emit_report", "format_crossing",
    "load_config", "load_corpus", "read_records", "read_scored", "run_lock", "run_paired",
    "score_records", "strip_fences", "summarize", "sweep_formats", "templates_with_overrides", "write_records",
    "write_scored",
]
