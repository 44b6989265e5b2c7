"""CSV report files."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, List, Sequence, Union

from .compare import PairedComparison, SummaryRow, SweepRow

SUMMARY_HEADER = ["model_id", "format", "metric", "n", "mean", "std"]
PAIRS_HEADER = [
    "model_id", "format_a", "format_b", "metric", "n_pairs",
    "mean_a", "std_a", "mean_b", "std_b",
    "w_statistic", "p_value", "method", "n_effective", "n_zero",
]
SWEEP_HEADER = ["model_id", "format", "gamma", "gcs_env"]


class ReportIoError(OSError):
    pass


def _num(x: float) -> str:
    return repr(float(x))


def _write(path: Path, header: List[str], rows: List[List[str]]) -> Path:
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ReportIoError(f"cannot write {path}: {exc}") from exc
    return path


def write_summary(path: Union[str, Path], rows: Sequence[SummaryRow]) -> Path:
    return _write(
        Path(path),
        SUMMARY_HEADER,
        [[r.model_id, r.format.value, r.metric.value, str(r.n), _num(r.mean), _num(r.std)] for r in rows],
    )


def write_pairs(path: Union[str, Path], comparisons: Sequence[PairedComparison]) -> Path:
    rows = []
    for c in comparisons:
        w = c.wilcoxon
        stats = (
            [_num(w.w_statistic), _num(w.p_value), w.method.value, str(w.n_effective), str(w.n_zero)]
            if w is not None
            else ["", "", "no_difference", "0", str(len(c.samples))]
        )
        rows.append(
            [c.model_id, c.format_a.value, c.format_b.value, c.metric.value, str(len(c.samples)),
             _num(c.mean_a), _num(c.std_a), _num(c.mean_b), _num(c.std_b)] + stats
        )
    return _write(Path(path), PAIRS_HEADER, rows)


def write_sweep(path: Union[str, Path], rows: Sequence[SweepRow]) -> Path:
    return _write(
        Path(path),
        SWEEP_HEADER,
        [[r.model_id, r.format.value, _num(r.gamma), _num(r.gcs_env)] for r in rows],
    )


def emit_report(
    comparisons: Sequence[PairedComparison],
    sweeps: Sequence[SweepRow],
    out_dir: Union[str, Path],
    summary: Sequence[SummaryRow] = (),
) -> Dict[str, Path]:
    """Write ``summary.csv``, ``pairs.csv`` and ``gamma_sweep.csv`` into ``out_dir``."""
    out = Path(out_dir)
    if not out.is_dir():
        raise ReportIoError(f"{out} is not a directory")
    return {
        "summary": write_summary(out / "summary.csv", summary),
        "pairs": write_pairs(out / "pairs.csv", comparisons),
        "gamma_sweep": write_sweep(out / "gamma_sweep.csv", sweeps),
    }
