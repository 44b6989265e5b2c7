"""Task corpus: one JSON object per line."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Tuple, Union

from ..formats import AdapterError, FormatKind, parse_json, serialize_json


class CorpusFormatError(ValueError):
    pass


class DuplicateInstanceId(CorpusFormatError):
    pass


@dataclass(frozen=True)
class TaskInstance:
    instance_id: str
    description: str
    expected: Any
    formats: Tuple[FormatKind, ...]


def _instance(obj: Any, where: str) -> TaskInstance:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{where}: expected a JSON object")
    missing = {"instance_id", "description", "expected", "formats"} - obj.keys()
    if missing:
        raise CorpusFormatError(f"{where}: missing field(s) {', '.join(sorted(missing))}")
    iid, desc, formats = obj["instance_id"], obj["description"], obj["formats"]
    if not isinstance(iid, str) or not iid:
        raise CorpusFormatError(f"{where}: instance_id must be a non-empty string")
    if not isinstance(desc, str):
        raise CorpusFormatError(f"{where}: description must be a string")
    if obj["expected"] is None:
        raise CorpusFormatError(f"{where}: expected must not be null")
    if not isinstance(formats, list) or not formats:
        raise CorpusFormatError(f"{where}: formats must be a non-empty array")
    try:
        kinds = tuple(FormatKind.parse(f) for f in formats)
    except (ValueError, AttributeError) as exc:
        raise CorpusFormatError(f"{where}: {exc}") from None
    return TaskInstance(iid, desc, obj["expected"], kinds)


def load_corpus(path: Union[str, Path]) -> List[TaskInstance]:
    """Read and validate a corpus file, keeping file order."""
    path = Path(path)
    out: List[TaskInstance] = []
    seen = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{path.name}:{lineno}"
            try:
                obj = parse_json(line)
            except AdapterError as exc:
                raise CorpusFormatError(f"{where}: {exc.message}") from None
            inst = _instance(obj, where)
            if inst.instance_id in seen:
                raise DuplicateInstanceId(f"{where}: duplicate instance_id {inst.instance_id!r}")
            seen.add(inst.instance_id)
            out.append(inst)
    if not out:
        raise CorpusFormatError(f"{path}: corpus is empty")
    return out


def corpus_line(inst: TaskInstance) -> str:
    return serialize_json(
        {
            "instance_id": inst.instance_id,
            "description": inst.description,
            "expected": inst.expected,
            "formats": [f.value for f in inst.formats],
        }
    )

