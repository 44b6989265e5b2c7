"""Paired generation runs and record scoring."""

from __future__ import annotations

import logging
import os
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from ..formats import FormatKind
from ..scoring import ScoreBundle, ScoreWeights, gcs, gcs_env, render_score, syntax_score
from ..sustainability import (
    DecodeMeasurement,
    EmissionConfig,
    MissingMeasurement,
    carbon_intensity,
    ees,
    estimate_ce,
)
from .corpus import TaskInstance
from .prompts import PromptTemplate, build_prompt, default_templates
from .records import GenerationRecord, RecordFormatError, dumps_line, read_jsonl, strip_fences

log = logging.getLogger(__name__)

LOCK_NAME = ".toonbench.lock"


class RunLocked(RuntimeError):
    pass


class UnknownInstance(KeyError):
    pass


@contextmanager
def run_lock(out_dir: Union[str, Path]) -> Iterator[None]:
    """Exclusive lock on an output directory for the duration of a run."""
    lock = Path(out_dir) / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RunLocked(f"{out_dir} is in use by another run (remove {lock} if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def _record(
    inst: TaskInstance, model_id: str, fmt: FormatKind, prompt: str, gen: Any, strip: bool
) -> GenerationRecord:
    text, stripped = gen.output_text, False
    if strip and not gen.failed:
        text, stripped = strip_fences(text)
    return GenerationRecord(
        instance_id=inst.instance_id,
        model_id=model_id,
        format=fmt,
        prompt=prompt,
        output_text=text,
        measurement=DecodeMeasurement(
            n_tokens=gen.n_tokens,
            duration_s=gen.duration_s,
            energy_kwh=gen.energy_kwh,
            ce_kg=gen.ce_kg,
        ),
        timestamp=gen.timestamp,
        duration_mode=gen.duration_mode,
        fence_stripped=stripped,
        failed=gen.failed,
        sampling=gen.sampling,
    )


def run_paired(
    corpus: Sequence[TaskInstance],
    model_id: str,
    backend: Any,
    formats: Sequence[FormatKind],
    *,
    templates: Optional[Mapping[FormatKind, PromptTemplate]] = None,
    strip: bool = True,
    parallelism: int = 1,
    out_path: Union[str, Path, None] = None,
) -> List[GenerationRecord]:
    """Issue every instance once per format and collect one record per pair.

    Records are written to ``out_path`` as they complete, in corpus-then-format
    order regardless of completion order. Backend exceptions abort the run
    after the already-ordered prefix has been persisted.
    """
    templates = templates or default_templates()
    jobs: List[Tuple[TaskInstance, FormatKind, str]] = []
    for inst in corpus:
        for fmt in formats:
            fmt = FormatKind(fmt)
            if fmt not in inst.formats:
                log.warning("instance %s does not declare format %s; skipped", inst.instance_id, fmt.value)
                continue
            jobs.append((inst, fmt, build_prompt(inst, fmt, templates)))

    results: Dict[int, GenerationRecord] = {}
    fh = Path(out_path).open("w", encoding="utf-8") if out_path is not None else None
    next_idx = 0

    def flush():
        nonlocal next_idx
        while next_idx in results:
            if fh is not None:
                fh.write(dumps_line(results[next_idx].to_json()))
                fh.flush()
            next_idx += 1

    def one(i: int) -> Tuple[int, GenerationRecord]:
        inst, fmt, prompt = jobs[i]
        gen = backend.generate(inst, model_id, fmt, prompt)
        return i, _record(inst, model_id, fmt, prompt, gen, strip)

    try:
        if parallelism <= 1:
            for i in range(len(jobs)):
                idx, rec = one(i)
                results[idx] = rec
                flush()
        else:
            with ThreadPoolExecutor(max_workers=parallelism) as pool:
                pending = {pool.submit(one, i) for i in range(len(jobs))}
                while pending:
                    done, pending = wait(pending, return_when=FIRST_EXCEPTION)
                    for fut in done:
                        exc = fut.exception()
                        if exc is not None:
                            for p in pending:
                                p.cancel()
                            raise exc
                        idx, rec = fut.result()
                        results[idx] = rec
                    flush()
    finally:
        if fh is not None:
            fh.close()
    return [results[i] for i in range(len(jobs))]


# -- scoring ----------------------------------------------------------------


@dataclass(frozen=True)
class ScoredRecord:
    record: GenerationRecord
    scores: ScoreBundle
    ce_kg: Optional[float]  # emissions attributed under the emission config

    @property
    def degenerate(self) -> bool:
        return self.scores.degenerate

    def to_json(self) -> Dict[str, Any]:
        s = self.scores
        out = self.record.to_json()
        out["scores"] = {
            "render": s.render,
            "syntax": s.syntax,
            "gcs": s.gcs,
            "ce_kg": self.ce_kg,
            "x_intensity": s.x_intensity,
            "ees": s.ees,
            "gcs_env": s.gcs_env,
            "degenerate": s.degenerate,
        }
        return out

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "ScoredRecord":
        try:
            s = obj["scores"]
            bundle = ScoreBundle(
                render=int(s["render"]),
                syntax=float(s["syntax"]),
                gcs=float(s["gcs"]),
                x_intensity=s["x_intensity"],
                ees=s["ees"],
                gcs_env=s["gcs_env"],
            )
            return cls(GenerationRecord.from_json(obj), bundle, s["ce_kg"])
        except (KeyError, TypeError, ValueError) as exc:
            raise RecordFormatError(f"not a scored record: {exc!r}") from None


def score_one(
    record: GenerationRecord,
    expected: Any,
    weights: ScoreWeights,
    emission: EmissionConfig,
    keys_only: bool = False,
) -> ScoredRecord:
    text = "" if record.failed else record.output_text
    render = 0 if record.failed else render_score(text, record.format)
    syntax = 0.0 if not render else syntax_score(text, record.format, expected, keys_only=keys_only)
    correctness = gcs(render, syntax, weights)
    m = record.measurement
    try:
        ce: Optional[float] = estimate_ce(m, emission)
    except MissingMeasurement:
        if m.n_tokens > 0:
            raise
        ce = None
    x = e = env = None
    if m.n_tokens > 0:
        x = carbon_intensity(ce, m.n_tokens)
        e = ees(x, emission.x_ref)
        env = gcs_env(correctness, e, weights.gamma)
    return ScoredRecord(record, ScoreBundle(render, syntax, correctness, x, e, env), ce)


def score_records(
    records: Iterable[GenerationRecord],
    corpus: Sequence[TaskInstance],
    weights: ScoreWeights = ScoreWeights(),
    emission: EmissionConfig = EmissionConfig(),
    *,
    keys_only: bool = False,
) -> List[ScoredRecord]:
    """Score every record against its instance; zero-token records come back degenerate."""
    by_id = {t.instance_id: t for t in corpus}
    out = []
    for r in records:
        inst = by_id.get(r.instance_id)
        if inst is None:
            raise UnknownInstance(f"record refers to unknown instance {r.instance_id!r}")
        out.append(score_one(r, inst.expected, weights, emission, keys_only))
    return out


def read_scored(path: Union[str, Path]) -> List[ScoredRecord]:
    return [ScoredRecord.from_json(obj) for obj in read_jsonl(path)]


def write_scored(path: Union[str, Path], scored: Iterable[ScoredRecord]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in scored:
            fh.write(dumps_line(s.to_json()))
