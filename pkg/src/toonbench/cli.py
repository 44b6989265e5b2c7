"""``toonbench`` command line.

Exit codes: 0 success, 1 runtime or parse failure, 2 usage or configuration error.
"""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import click

from . import __version__
from .formats import AdapterError, FormatKind, parse_format, serialize_format
from .harness.backends import BackendError, HttpBackend, ReplayBackend, ReplayMiss
from .harness.compare import (
    InsufficientPairs,
    Metric,
    compare_formats,
    default_comparisons,
    format_crossing,
    summarize,
    sweep_formats,
)
from .harness.config import ConfigError, RunConfig, load_config
from .harness.corpus import CorpusFormatError, load_corpus
from .harness.prompts import templates_with_overrides
from .harness.records import RecordFormatError, read_records
from .harness.report import ReportIoError, emit_report, write_pairs, write_summary, write_sweep
from .harness.runner import RunLocked, UnknownInstance, read_scored, run_lock, run_paired, score_records, write_scored
from .scoring import NoCrossing, ScoreWeights
from .sustainability import EmissionConfig, MissingMeasurement
from .toon import ToonDialect, ToonError, parse_toon
from .value import UnrepresentableValue

FORMAT_NAMES = [f.value for f in FormatKind]


class Failure(click.ClickException):
    exit_code = 1


class ConfigFailure(click.ClickException):
    exit_code = 2


def _formats(text: str) -> List[FormatKind]:
    try:
        return [FormatKind.parse(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--formats") from None


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise Failure(f"cannot create output directory {out}: {exc}") from None
    return out


def _config(path: Optional[str]) -> RunConfig:
    try:
        return load_config(path)
    except ConfigError as exc:
        raise ConfigFailure(str(exc)) from None


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="toonbench")
@click.option("-v", "--verbose", is_flag=True, help="Log backend retries and skipped jobs.")
def main(verbose: bool):
    """Structured-output evaluation with strict TOON parsing and carbon-aware scores."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(dir_okay=False), help="Corpus file (JSON lines).")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Run configuration (YAML/JSON).")
@click.option("--backend", type=click.Choice(["replay", "http"]), required=True)
@click.option("--replay-file", type=click.Path(dir_okay=False), help="Record file served by the replay backend.")
@click.option("--formats", "formats_text", default="json,toon", show_default=True, help="Comma-separated formats to issue per instance.")
@click.option("--model", "model_id", help="Model id (overrides the config file).")
@click.option("--no-strip-fences", is_flag=True, help="Keep ``` fences around outputs.")
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False), help="Output directory.")
def run(corpus_path, config_path, backend, replay_file, formats_text, model_id, no_strip_fences, out_path):
    """Generate one output per instance and format; writes OUT/records.jsonl."""
    if backend == "replay" and not replay_file:
        raise click.UsageError("--backend replay requires --replay-file")
    cfg = _config(config_path)
    formats = _formats(formats_text)
    try:
        corpus = load_corpus(corpus_path)
        templates = templates_with_overrides(cfg.templates)
    except (OSError, CorpusFormatError, ValueError) as exc:
        raise ConfigFailure(str(exc)) from None

    model_id = model_id or cfg.model_id
    if backend == "replay":
        try:
            engine = ReplayBackend.from_file(replay_file)
        except (OSError, RecordFormatError) as exc:
            raise ConfigFailure(f"cannot load replay file: {exc}") from None
        if model_id is None:
            if len(engine.model_ids) != 1:
                raise ConfigFailure("replay file holds several models; pass --model")
            model_id = engine.model_ids[0]
    else:
        if not cfg.url:
            raise ConfigFailure("--backend http needs backend.url in the config file")
        if model_id is None:
            raise ConfigFailure("--backend http needs a model id (--model or backend.model_id)")
        engine = HttpBackend(
            cfg.url,
            api_key=os.environ.get(cfg.api_key_env),
            sampling=cfg.sampling,
            stream=cfg.stream,
            timeout_s=cfg.timeout_s,
            max_attempts=cfg.max_attempts,
            backoff_s=cfg.backoff_s,
        )

    out = _out_dir(out_path)
    try:
        with run_lock(out):
            records = run_paired(
                corpus,
                model_id,
                engine,
                formats,
                templates=templates,
                strip=cfg.strip_fences and not no_strip_fences,
                parallelism=cfg.parallelism,
                out_path=out / "records.jsonl",
            )
    except RunLocked as exc:
        raise ConfigFailure(str(exc)) from None
    except (BackendError, ReplayMiss) as exc:
        raise Failure(str(exc)) from None
    finally:
        if isinstance(engine, HttpBackend):
            engine.close()
    failed = sum(r.failed for r in records)
    click.echo(f"wrote {len(records)} records ({failed} failed) to {out / 'records.jsonl'}")


def _weights(cfg: RunConfig, alpha, beta, gamma) -> ScoreWeights:
    base = cfg.weights
    if alpha is not None and beta is None:
        beta = 1.0 - alpha
    elif beta is not None and alpha is None:
        alpha = 1.0 - beta
    try:
        return ScoreWeights(
            alpha=base.alpha if alpha is None else alpha,
            beta=base.beta if beta is None else beta,
            gamma=base.gamma if gamma is None else gamma,
        )
    except ValueError as exc:
        raise ConfigFailure(str(exc)) from None


def _emission(cfg: RunConfig, mode, token_factor, grid_intensity, xref) -> EmissionConfig:
    base = cfg.emission
    try:
        return EmissionConfig(
            mode=base.mode if mode is None else mode,
            token_factor=base.token_factor if token_factor is None else token_factor,
            grid_intensity=base.grid_intensity if grid_intensity is None else grid_intensity,
            x_ref=base.x_ref if xref is None else xref,
        )
    except ValueError as exc:
        raise ConfigFailure(str(exc)) from None


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(dir_okay=False))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(dir_okay=False))
@click.option("--config", "config_path", type=click.Path(dir_okay=False))
@click.option("--alpha", type=float, help="Render weight [default: 0.2].")
@click.option("--beta", type=float, help="Syntax weight [default: 0.8].")
@click.option("--gamma", type=float, help="Sustainability weight [default: 0.5].")
@click.option("--xref", type=float, help="Reference kgCO2e per 1000 tokens [default: 0.001719].")
@click.option("--emission-mode", type=click.Choice(["measured", "token_factor"]))
@click.option("--token-factor", type=float, help="kgCO2e per 1000 tokens in token_factor mode.")
@click.option("--grid-intensity", type=float, help="kgCO2e per kWh for measured energy.")
@click.option("--keys-only", is_flag=True, help="Count an expected pair as satisfied when its path exists.")
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False))
def score(records_path, corpus_path, config_path, alpha, beta, gamma, xref, emission_mode, token_factor,
          grid_intensity, keys_only, out_path):
    """Score records; writes OUT/scored.jsonl and OUT/summary.csv."""
    cfg = _config(config_path)
    weights = _weights(cfg, alpha, beta, gamma)
    emission = _emission(cfg, emission_mode, token_factor, grid_intensity, xref)
    try:
        corpus = load_corpus(corpus_path)
        records = read_records(records_path)
        scored = score_records(records, corpus, weights, emission, keys_only=keys_only)
    except (OSError, CorpusFormatError, RecordFormatError, UnknownInstance, MissingMeasurement) as exc:
        raise ConfigFailure(str(exc)) from None
    out = _out_dir(out_path)
    try:
        with run_lock(out):
            write_scored(out / "scored.jsonl", scored)
            write_summary(out / "summary.csv", summarize(scored))
    except (RunLocked, ReportIoError) as exc:
        raise Failure(str(exc)) from None
    degenerate = sum(s.degenerate for s in scored)
    click.echo(f"scored {len(scored)} records ({degenerate} degenerate) into {out}")


def _scored(path: str):
    try:
        return read_scored(path)
    except (OSError, RecordFormatError) as exc:
        raise ConfigFailure(str(exc)) from None


@main.command()
@click.option("--scored", "scored_path", required=True, type=click.Path(dir_okay=False))
@click.option("--format-a", required=True, type=click.Choice(FORMAT_NAMES))
@click.option("--format-b", default="toon", show_default=True, type=click.Choice(FORMAT_NAMES))
@click.option("--metric", default="gcs", show_default=True, type=click.Choice([m.value for m in Metric]))
@click.option("--model", "model_id")
@click.option("--alpha-level", default=0.05, show_default=True, type=float)
@click.option("--out", "out_path", type=click.Path(file_okay=False), help="Also write OUT/pairs.csv.")
def compare(scored_path, format_a, format_b, metric, model_id, alpha_level, out_path):
    """Paired Wilcoxon comparison of two formats on one metric."""
    scored = _scored(scored_path)
    try:
        c = compare_formats(scored, format_a, format_b, metric, model_id, alpha_level)
    except (InsufficientPairs, ValueError) as exc:
        raise Failure(str(exc)) from None
    head = (
        f"{c.model_id} {c.metric.value}: {c.format_a.value} {c.mean_a:.4f} (+/- {c.std_a:.4f}) vs "
        f"{c.format_b.value} {c.mean_b:.4f} (+/- {c.std_b:.4f}), n={len(c.samples)}"
    )
    if c.wilcoxon is None:
        click.echo(f"{head}; no difference (all paired differences are zero)")
    else:
        w = c.wilcoxon
        verdict = "significant" if w.significant else "not significant"
        click.echo(f"{head}; W={w.w_statistic:g} p={w.p_value:.4g} ({w.method.value}) {verdict}")
    if out_path:
        write_pairs(_out_dir(out_path) / "pairs.csv", [c])


@main.command()
@click.option("--scored", "scored_path", required=True, type=click.Path(dir_okay=False))
@click.option("--steps", default=11, show_default=True, type=click.IntRange(min=2))
@click.option("--cross", "cross", help="Report the crossing weight of two formats, e.g. json:toon.")
@click.option("--model", "model_id")
@click.option("--out", "out_path", type=click.Path(file_okay=False), help="Also write OUT/gamma_sweep.csv.")
def sweep(scored_path, steps, cross, model_id, out_path):
    """Environment-aware score across sustainability weights 0..1."""
    scored = _scored(scored_path)
    rows = sweep_formats(scored, steps)
    if model_id:
        rows = [r for r in rows if r.model_id == model_id]
    for r in rows:
        click.echo(f"{r.model_id}\t{r.format.value}\t{r.gamma:.4f}\t{r.gcs_env:.6f}")
    if cross:
        try:
            a, b = (FormatKind.parse(x) for x in cross.split(":"))
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--cross") from None
        models = [model_id] if model_id else list(dict.fromkeys(r.model_id for r in rows))
        for m in models:
            try:
                click.echo(f"{m}: {a.value} and {b.value} cross at gamma={format_crossing(scored, m, a, b):.4f}")
            except (NoCrossing, InsufficientPairs) as exc:
                click.echo(f"{m}: {a.value} and {b.value} do not cross in [0, 1] ({exc})")
    if out_path:
        write_sweep(_out_dir(out_path) / "gamma_sweep.csv", rows)


@main.command()
@click.option("--scored", "scored_path", required=True, type=click.Path(dir_okay=False))
@click.option("--steps", default=11, show_default=True, type=click.IntRange(min=2))
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False))
def report(scored_path, steps, out_path):
    """Write summary.csv, pairs.csv and gamma_sweep.csv (every baseline vs TOON)."""
    scored = _scored(scored_path)
    out = _out_dir(out_path)
    try:
        with run_lock(out):
            paths = emit_report(default_comparisons(scored), sweep_formats(scored, steps), out, summarize(scored))
    except (RunLocked, ReportIoError) as exc:
        raise Failure(str(exc)) from None
    for p in paths.values():
        click.echo(str(p))


@main.command()
@click.option("--from", "src", required=True, type=click.Choice(FORMAT_NAMES))
@click.option("--to", "dst", required=True, type=click.Choice(FORMAT_NAMES))
def convert(src, dst):
    """Re-encode stdin from one format to another on stdout."""
    text = click.get_text_stream("stdin").read()
    try:
        value = parse_format(text, FormatKind(src))
    except AdapterError as exc:
        raise Failure(str(exc)) from None
    try:
        result = serialize_format(value, FormatKind(dst))
    except UnrepresentableValue as exc:
        raise ConfigFailure(f"cannot express this value as {dst}: {exc}") from None
    if result:
        click.echo(result)


@main.command()
@click.option("--format", "fmt", default="toon", show_default=True, type=click.Choice(FORMAT_NAMES))
@click.option("--indent", default=2, show_default=True, type=click.IntRange(min=1), help="TOON indent width.")
@click.option("--delimiter", default=",", show_default=True, help="TOON row delimiter.")
@click.option("--lenient", is_flag=True, help="TOON only: tolerate count mismatches and duplicate keys.")
def validate(fmt, indent, delimiter, lenient):
    """Check that stdin parses; prints the error and exits 1 if it does not."""
    text = click.get_text_stream("stdin").read()
    try:
        if fmt == "toon":
            try:
                dialect = ToonDialect(indent, "\t" if delimiter == "\\t" else delimiter)
            except ValueError as exc:
                raise click.BadParameter(str(exc), param_hint="--delimiter") from None
            parse_toon(text, dialect, strict=not lenient)
        else:
            parse_format(text, FormatKind(fmt))
    except (ToonError, AdapterError) as exc:
        raise Failure(str(exc)) from None
    click.echo("valid")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
