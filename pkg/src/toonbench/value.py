"""Canonical in-memory values shared by every format.

Values are plain Python objects:

    None                  null
    bool                  true / false
    int                   integral number
    decimal.Decimal       fractional or exponent-form number (exact)
    str                   text
    list                  ordered sequence
    dict[str, Value]      mapping; insertion order is kept for serializers

Floats are never stored. :func:`from_python` converts arbitrary JSON-like
input (including floats and tuples) into this form.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Dict, Iterator, List, Tuple, Union

Scalar = Union[None, bool, int, Decimal, str]
Value = Union[Scalar, List[Any], Dict[str, Any]]

PathSegment = Union[str, int]
KeyPath = Tuple[PathSegment, ...]

_PATH_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
_PATH_INDEX = re.compile(r"\[([0-9]+)\]")


class UnrepresentableValue(ValueError):
    """A value (or key) that the target format cannot express."""


@dataclass(frozen=True)
class EmptyContainer:
    """Leaf marker for an empty mapping or sequence in :func:`flatten` output."""

    kind: str  # "mapping" or "sequence"

    def __repr__(self) -> str:
        return "{}" if self.kind == "mapping" else "[]"


EMPTY_MAPPING = EmptyContainer("mapping")
EMPTY_SEQUENCE = EmptyContainer("sequence")

Leaf = Union[Scalar, EmptyContainer]


def is_scalar(v: Any) -> bool:
    return v is None or isinstance(v, (bool, int, Decimal, str))


def is_number(v: Any) -> bool:
    return isinstance(v, (int, Decimal)) and not isinstance(v, bool)


def from_python(obj: Any) -> Value:
    """Coerce JSON-like Python data into a canonical value.

    Floats go through ``repr`` so ``0.1`` becomes ``Decimal("0.1")``.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return int(obj)
    if isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite number {obj!r} has no structured representation")
        return Decimal(repr(obj))
    if isinstance(obj, Decimal):
        if not obj.is_finite():
            raise ValueError(f"non-finite number {obj!r} has no structured representation")
        return obj
    if isinstance(obj, (list, tuple)):
        return [from_python(x) for x in obj]
    if isinstance(obj, dict):
        out: Dict[str, Any] = {}
        for k, v in obj.items():
            if not isinstance(k, str):
                raise TypeError(f"mapping keys must be text, got {type(k).__name__}")
            out[k] = from_python(v)
        return out
    raise TypeError(f"unsupported value type {type(obj).__name__}")


def format_number(n: Union[int, Decimal]) -> str:
    """Render a number in JSON number grammar, keeping fractional numbers fractional."""
    if isinstance(n, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(n, int):
        return str(n)
    if not n.is_finite():
        raise ValueError(f"non-finite number {n!r}")
    text = str(n)
    if "." not in text and "E" not in text and "e" not in text:
        text += ".0"
    return text


def scalar_text(v: Leaf) -> str:
    """Canonical string rendering of a leaf; used where a format has no typed scalars (XML)."""
    if v is None:
        return ""
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, EmptyContainer):
        return ""
    if isinstance(v, str):
        return v
    return format_number(v)


def normalized_equal(a: Any, b: Any) -> bool:
    """Structural equality ignoring mapping order; numbers compare by exact value."""
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if a is None or b is None:
        return a is None and b is None
    if is_number(a) or is_number(b):
        return is_number(a) and is_number(b) and a == b
    if isinstance(a, str) or isinstance(b, str):
        return isinstance(a, str) and isinstance(b, str) and a == b
    if isinstance(a, EmptyContainer) or isinstance(b, EmptyContainer):
        return a == b
    if isinstance(a, list):
        return isinstance(b, list) and len(a) == len(b) and all(map(normalized_equal, a, b))
    if isinstance(a, dict):
        if not isinstance(b, dict) or len(a) != len(b):
            return False
        return all(k in b and normalized_equal(v, b[k]) for k, v in a.items())
    raise TypeError(f"not a structured value: {type(a).__name__}")


def _walk(v: Any, path: KeyPath) -> Iterator[Tuple[KeyPath, Leaf]]:
    if isinstance(v, dict):
        if not v:
            yield path, EMPTY_MAPPING
        for k, child in v.items():
            yield from _walk(child, path + (k,))
    elif isinstance(v, list):
        if not v:
            yield path, EMPTY_SEQUENCE
        for i, child in enumerate(v):
            yield from _walk(child, path + (i,))
    else:
        yield path, v


def flatten(v: Value) -> Dict[KeyPath, Leaf]:
    """Map every leaf path to its scalar (or empty-container marker).

    >>> flatten({"a": 1, "b": {"c": 2}})
    {('a',): 1, ('b', 'c'): 2}
    """
    return dict(_walk(v, ()))


def flat_equal(fa: Dict[KeyPath, Leaf], fb: Dict[KeyPath, Leaf]) -> bool:
    return fa.keys() == fb.keys() and all(normalized_equal(fa[p], fb[p]) for p in fa)


_MISSING = object()


def resolve(v: Any, path: KeyPath, *, lift_singletons: bool = False) -> Any:
    """Follow ``path`` into ``v``; returns a module-private sentinel when absent.

    With ``lift_singletons``, index 0 applied to a non-sequence stays on that
    node: XML cannot tell a one-element sequence from a single child.
    """
    node = v
    for seg in path:
        if isinstance(seg, int):
            if isinstance(node, list):
                if seg >= len(node):
                    return _MISSING
                node = node[seg]
            elif lift_singletons and seg == 0:
                continue
            else:
                return _MISSING
        else:
            if not isinstance(node, dict) or seg not in node:
                return _MISSING
            node = node[seg]
    return node


def is_missing(x: Any) -> bool:
    return x is _MISSING


def as_leaf(node: Any) -> Any:
    """Turn a resolved node into a flatten-style leaf, or the missing sentinel for non-empty containers."""
    if isinstance(node, dict):
        return EMPTY_MAPPING if not node else _MISSING
    if isinstance(node, list):
        return EMPTY_SEQUENCE if not node else _MISSING
    return node


def format_path(path: KeyPath) -> str:
    """Dotted keys with bracketed indices; awkward keys are bracket-quoted.

    >>> format_path(("users", 0, "first name"))
    'users[0]["first name"]'
    """
    parts: List[str] = []
    for seg in path:
        if isinstance(seg, int):
            parts.append(f"[{seg}]")
        elif _PATH_KEY.fullmatch(seg):
            parts.append(f".{seg}" if parts else seg)
        else:
            parts.append(f"[{json.dumps(seg, ensure_ascii=False)}]")
    return "".join(parts)


def parse_path(text: str) -> KeyPath:
    """Inverse of :func:`format_path`."""
    segs: List[PathSegment] = []
    i, n = 0, len(text)
    decoder = json.JSONDecoder()
    while i < n:
        c = text[i]
        if c == "[":
            if i + 1 < n and text[i + 1] == '"':
                key, end = decoder.raw_decode(text, i + 1)
                if end >= n or text[end] != "]":
                    raise ValueError(f"unterminated key segment at {i} in {text!r}")
                segs.append(key)
                i = end + 1
            else:
                m = _PATH_INDEX.match(text, i)
                if not m:
                    raise ValueError(f"bad index segment at {i} in {text!r}")
                segs.append(int(m.group(1)))
                i = m.end()
        else:
            if c == ".":
                if not segs:
                    raise ValueError(f"leading dot in {text!r}")
                i += 1
            m = _PATH_KEY.match(text, i)
            if not m:
                raise ValueError(f"bad key segment at {i} in {text!r}")
            segs.append(m.group())
            i = m.end()
    return tuple(segs)
