"""Per-model/format aggregates and paired format comparisons."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..formats import FormatKind
from ..scoring import crossing_gamma, gamma_sweep
from ..stats import AllZeroDifferences, PairedSample, WilcoxonResult, mean_std, wilcoxon_signed_rank
from .runner import ScoredRecord


class Metric(str, Enum):
    DURATION = "duration"
    CE = "ce"
    N_TOKENS = "n_tokens"
    RENDER = "render"
    SYNTAX = "syntax"
    GCS = "gcs"
    EES = "ees"
    GCS_ENV = "gcs_env"


SUMMARY_METRICS = tuple(Metric)
COMPARISON_METRICS = (Metric.GCS, Metric.EES, Metric.GCS_ENV, Metric.N_TOKENS, Metric.CE, Metric.DURATION)

_GETTERS: Dict[Metric, Callable[[ScoredRecord], Optional[float]]] = {
    Metric.DURATION: lambda s: s.record.measurement.duration_s,
    Metric.CE: lambda s: s.ce_kg,
    Metric.N_TOKENS: lambda s: float(s.record.measurement.n_tokens),
    Metric.RENDER: lambda s: float(s.scores.render),
    Metric.SYNTAX: lambda s: s.scores.syntax,
    Metric.GCS: lambda s: s.scores.gcs,
    Metric.EES: lambda s: s.scores.ees,
    Metric.GCS_ENV: lambda s: s.scores.gcs_env,
}


def metric_value(s: ScoredRecord, metric: Metric) -> Optional[float]:
    return _GETTERS[Metric(metric)](s)


class InsufficientPairs(ValueError):
    pass


@dataclass(frozen=True)
class PairedComparison:
    model_id: str
    format_a: FormatKind
    format_b: FormatKind
    metric: Metric
    samples: Tuple[PairedSample, ...]
    wilcoxon: Optional[WilcoxonResult]  # None when every difference is zero
    mean_a: float
    mean_b: float
    std_a: float
    std_b: float

    @property
    def no_difference(self) -> bool:
        return self.wilcoxon is None


def models_in(scored: Sequence[ScoredRecord]) -> List[str]:
    return list(dict.fromkeys(s.record.model_id for s in scored))


def formats_in(scored: Sequence[ScoredRecord], model_id: Optional[str] = None) -> List[FormatKind]:
    return list(
        dict.fromkeys(s.record.format for s in scored if model_id is None or s.record.model_id == model_id)
    )


def _only_model(scored: Sequence[ScoredRecord]) -> str:
    models = models_in(scored)
    if len(models) != 1:
        raise ValueError(f"scored records hold {len(models)} models; pass model_id explicitly")
    return models[0]


def compare_formats(
    scored: Sequence[ScoredRecord],
    format_a: FormatKind,
    format_b: FormatKind,
    metric: Metric,
    model_id: Optional[str] = None,
    alpha_level: float = 0.05,
) -> PairedComparison:
    """Align two formats by instance for one model and test the paired difference.

    Pairs where either side lacks the metric (degenerate records) are dropped.
    """
    format_a, format_b, metric = FormatKind(format_a), FormatKind(format_b), Metric(metric)
    model_id = model_id or _only_model(scored)
    side: Dict[FormatKind, Dict[str, Optional[float]]] = {format_a: {}, format_b: {}}
    for s in scored:
        r = s.record
        if r.model_id == model_id and r.format in side:
            side[r.format][r.instance_id] = metric_value(s, metric)
    samples = []
    for iid, va in side[format_a].items():
        vb = side[format_b].get(iid)
        if va is not None and vb is not None:
            samples.append(PairedSample(iid, va, vb))
    if not samples:
        raise InsufficientPairs(
            f"no usable {metric.value} pairs for {format_a.value} vs {format_b.value} (model {model_id})"
        )
    try:
        result: Optional[WilcoxonResult] = wilcoxon_signed_rank(samples, alpha_level)
    except AllZeroDifferences:
        result = None
    mean_a, std_a = mean_std([p.value_a for p in samples])
    mean_b, std_b = mean_std([p.value_b for p in samples])
    return PairedComparison(model_id, format_a, format_b, metric, tuple(samples), result, mean_a, mean_b, std_a, std_b)


@dataclass(frozen=True)
class SummaryRow:
    model_id: str
    format: FormatKind
    metric: Metric
    n: int
    mean: float
    std: float


def summarize(scored: Sequence[ScoredRecord]) -> List[SummaryRow]:
    """Mean and sample std of every metric per model and format (degenerate values skipped)."""
    rows = []
    for model in models_in(scored):
        for fmt in formats_in(scored, model):
            group = [s for s in scored if s.record.model_id == model and s.record.format == fmt]
            for metric in SUMMARY_METRICS:
                values = [v for v in (metric_value(s, metric) for s in group) if v is not None]
                if values:
                    mean, std = mean_std(values)
                    rows.append(SummaryRow(model, fmt, metric, len(values), mean, std))
    return rows


def format_means(scored: Sequence[ScoredRecord], model_id: str, fmt: FormatKind) -> Tuple[float, float]:
    """Mean ``(gcs, ees)`` over the non-degenerate records of one model and format."""
    group = [
        s for s in scored if s.record.model_id == model_id and s.record.format == fmt and not s.degenerate
    ]
    if not group:
        raise InsufficientPairs(f"no non-degenerate {fmt.value} records for model {model_id}")
    return mean_std([s.scores.gcs for s in group])[0], mean_std([s.scores.ees for s in group])[0]


@dataclass(frozen=True)
class SweepRow:
    model_id: str
    format: FormatKind
    gamma: float
    gcs_env: float


def sweep_formats(scored: Sequence[ScoredRecord], steps: int = 11) -> List[SweepRow]:
    rows = []
    for model in models_in(scored):
        for fmt in formats_in(scored, model):
            try:
                g, e = format_means(scored, model, fmt)
            except InsufficientPairs:
                continue
            rows.extend(SweepRow(model, fmt, gamma, v) for gamma, v in gamma_sweep(g, e, steps))
    return rows


def format_crossing(scored: Sequence[ScoredRecord], model_id: str, a: FormatKind, b: FormatKind) -> float:
    """Weight at which formats ``a`` and ``b`` reach equal mean ``gcs_env``."""
    return crossing_gamma(format_means(scored, model_id, a), format_means(scored, model_id, b))


def default_comparisons(
    scored: Sequence[ScoredRecord], metrics: Sequence[Metric] = COMPARISON_METRICS
) -> List[PairedComparison]:
    """Every baseline format against TOON, per model and metric."""
    out = []
    for model in models_in(scored):
        fmts = formats_in(scored, model)
        if FormatKind.TOON not in fmts:
            continue
        for base in fmts:
            if base is FormatKind.TOON:
                continue
            for metric in metrics:
                try:
                    out.append(compare_formats(scored, base, FormatKind.TOON, metric, model))
                except InsufficientPairs:
                    continue
    return out
