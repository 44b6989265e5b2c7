"""Generation records and their line-delimited JSON file format."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from ..formats import FormatKind
from ..sustainability import DecodeMeasurement

RECORD_FIELDS = (
    "instance_id",
    "model_id",
    "format",
    "prompt",
    "output_text",
    "n_tokens",
    "duration_s",
    "duration_mode",
    "energy_kwh",
    "ce_kg",
    "fence_stripped",
    "failed",
    "timestamp",
)

_FENCE = re.compile(r"\A\s*```[A-Za-z0-9_+.-]*[ \t]*\n(.*?)\n?[ \t]*```\s*\Z", re.DOTALL)


class RecordFormatError(ValueError):
    pass


def strip_fences(text: str) -> Tuple[str, bool]:
    """Remove one surrounding triple-backtick fence (optional language tag)."""
    m = _FENCE.match(text)
    if m is None:
        return text, False
    return m.group(1), True


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


@dataclass(frozen=True)
class GenerationRecord:
    instance_id: str
    model_id: str
    format: FormatKind
    prompt: str
    output_text: str
    measurement: DecodeMeasurement
    timestamp: str
    duration_mode: str = "roundtrip"
    fence_stripped: bool = False
    failed: bool = False
    sampling: Dict[str, Any] = field(default_factory=dict)

    @property
    def key(self) -> Tuple[str, str, FormatKind]:
        return self.instance_id, self.model_id, self.format

    def to_json(self) -> Dict[str, Any]:
        m = self.measurement
        out = {
            "instance_id": self.instance_id,
            "model_id": self.model_id,
            "format": self.format.value,
            "prompt": self.prompt,
            "output_text": self.output_text,
            "n_tokens": m.n_tokens,
            "duration_s": m.duration_s,
            "duration_mode": self.duration_mode,
            "energy_kwh": m.energy_kwh,
            "ce_kg": m.ce_kg,
            "fence_stripped": self.fence_stripped,
            "failed": self.failed,
            "timestamp": self.timestamp,
        }
        if self.sampling:
            out["sampling"] = self.sampling
        return out

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "GenerationRecord":
        missing = [f for f in RECORD_FIELDS if f not in obj and f not in ("prompt", "energy_kwh", "ce_kg")]
        if missing:
            raise RecordFormatError(f"missing field(s) {', '.join(missing)}")
        try:
            n_tokens = obj["n_tokens"]
            if isinstance(n_tokens, bool) or not isinstance(n_tokens, int):
                raise RecordFormatError(f"n_tokens must be an integer, got {n_tokens!r}")
            return cls(
                instance_id=str(obj["instance_id"]),
                model_id=str(obj["model_id"]),
                format=FormatKind.parse(obj["format"]),
                prompt=obj.get("prompt") or "",
                output_text=obj["output_text"],
                measurement=DecodeMeasurement(
                    n_tokens=n_tokens,
                    duration_s=float(obj["duration_s"]),
                    energy_kwh=_opt_float(obj.get("energy_kwh")),
                    ce_kg=_opt_float(obj.get("ce_kg")),
                ),
                timestamp=str(obj["timestamp"]),
                duration_mode=str(obj["duration_mode"]),
                fence_stripped=bool(obj["fence_stripped"]),
                failed=bool(obj["failed"]),
                sampling=dict(obj.get("sampling") or {}),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, RecordFormatError):
                raise
            raise RecordFormatError(str(exc)) from None


def _opt_float(v: Any) -> Optional[float]:
    return None if v is None else float(v)


def dumps_line(obj: Dict[str, Any]) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=False) + "\n"


def read_jsonl(path: Union[str, Path]) -> List[Dict[str, Any]]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordFormatError(f"{path}:{lineno}: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise RecordFormatError(f"{path}:{lineno}: expected a JSON object")
            out.append(obj)
    return out


def read_records(path: Union[str, Path]) -> List[GenerationRecord]:
    out = []
    for i, obj in enumerate(read_jsonl(path), 1):
        try:
            out.append(GenerationRecord.from_json(obj))
        except RecordFormatError as exc:
            raise RecordFormatError(f"{path}: record {i}: {exc}") from None
    return out


def write_records(path: Union[str, Path], records: Iterable[GenerationRecord]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for r in records:
            fh.write(dumps_line(r.to_json()))
