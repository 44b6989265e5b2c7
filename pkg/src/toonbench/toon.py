"""Strict TOON (Token-Oriented Object Notation) codec.

Supported grammar::

    key: value                  scalar entry
    key:                        nested mapping, entries indented one level
    key[N]: v1,v2,...           inline array of N scalars
    key[N]{f1,f2}:              tabular array: N rows of delimited scalars,
      a1,a2                     one level deeper
    key[N]:                     expanded array: N "- " items one level deeper
      - item

A document whose first line is a bare ``[N]...:`` header is a root array;
anything else is a root mapping. Bare keys match ``[A-Za-z0-9_.-]+``; other
keys and awkward strings are double-quoted with JSON escapes. ``true``,
``false`` and ``null`` are literals and numbers follow JSON number grammar.

In strict mode (the default) declared lengths must match realized item or
row counts, rows must carry exactly the header's field count, and sibling
keys must be unique.

>>> parse_toon("users[2]{id,name}:\\n  1,Alice\\n  2,Bob")
{'users': [{'id': 1, 'name': 'Alice'}, {'id': 2, 'name': 'Bob'}]}
>>> serialize_toon({"note": "a,b"})
'note: "a,b"'
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ._accel import scan_lines, split_cells
from .value import UnrepresentableValue, Value, format_number, is_scalar

_BARE_KEY = re.compile(r"[A-Za-z0-9_.-]+")
_LENGTH = re.compile(r"\[([0-9]+)\]")
_NUMBER = re.compile(r"-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?")
_LITERALS = {"true": True, "false": False, "null": None}
_ALWAYS_QUOTE = set(':"\\[]{}')


class ToonErrorKind(str, Enum):
    INDENTATION = "IndentationError"
    LENGTH_MISMATCH = "LengthMismatch"
    FIELD_COUNT_MISMATCH = "FieldCountMismatch"
    UNTERMINATED_QUOTE = "UnterminatedQuote"
    DUPLICATE_KEY = "DuplicateKey"
    MALFORMED_HEADER = "MalformedHeader"


class ToonError(ValueError):
    """Parse failure with a 1-based line number into the offending input."""

    def __init__(self, kind: ToonErrorKind, line: int, message: str):
        self.kind = kind
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {kind.value}: {message}")


@dataclass(frozen=True)
class ToonDialect:
    indent_width: int = 2
    delimiter: str = ","

    def __post_init__(self):
        if not isinstance(self.indent_width, int) or self.indent_width < 1:
            raise ValueError(f"indent_width must be a positive integer, got {self.indent_width!r}")
        if len(self.delimiter) != 1 or self.delimiter in '\n\r "\\':
            raise ValueError(f"unusable delimiter {self.delimiter!r}")


DEFAULT_DIALECT = ToonDialect()


@dataclass
class _Head:
    key: Optional[str]
    length: Optional[int]
    fields: Optional[List[str]]
    rest: str
    line: int


def _closing_quote(text: str, start: int) -> int:
    """Index of the quote closing the string opened at ``start``, or -1."""
    i = start + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == '"':
            return i
        i += 1
    return -1


class _Parser:
    def __init__(self, text: str, dialect: ToonDialect, strict: bool):
        self.delim = dialect.delimiter
        self.strict = strict
        text = text.replace("\r\n", "\n").replace("\r", "\n")
        width = dialect.indent_width
        self.lines: List[Tuple[int, int, str]] = []
        for lineno, lead, content in scan_lines(text):
            if lead < 0:
                raise ToonError(ToonErrorKind.INDENTATION, lineno, "tab character in indentation")
            if lead % width:
                raise ToonError(
                    ToonErrorKind.INDENTATION, lineno, f"indent of {lead} spaces is not a multiple of {width}"
                )
            self.lines.append((lineno, lead // width, content))
        self.pos = 0

    def _peek(self) -> Optional[Tuple[int, int, str]]:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def _fail(self, kind: ToonErrorKind, line: int, msg: str):
        raise ToonError(kind, line, msg)

    def document(self) -> Value:
        if not self.lines:
            return {}
        lineno, depth, content = self.lines[0]
        if depth != 0:
            self._fail(ToonErrorKind.INDENTATION, lineno, "document must start at column 0")
        if content.startswith("["):
            self.pos = 1
            value: Value = self._array(self._head(content, lineno, keyed=False), 1)
        else:
            value = self._mapping(0, {})
        nxt = self._peek()
        if nxt is not None:
            kind = ToonErrorKind.INDENTATION if nxt[1] > 0 else ToonErrorKind.MALFORMED_HEADER
            self._fail(kind, nxt[0], "unexpected content after the root value")
        return value

    # -- tokens -------------------------------------------------------------

    def _quoted(self, text: str, start: int, line: int) -> Tuple[str, int]:
        end = _closing_quote(text, start)
        if end < 0:
            self._fail(ToonErrorKind.UNTERMINATED_QUOTE, line, "missing closing quote")
        try:
            return json.loads(text[start : end + 1]), end + 1
        except json.JSONDecodeError as exc:
            self._fail(ToonErrorKind.MALFORMED_HEADER, line, f"bad escape in quoted string: {exc.msg}")
            raise  # unreachable

    def _key_token(self, token: str, line: int) -> str:
        if token.startswith('"'):
            key, end = self._quoted(token, 0, line)
            if end != len(token):
                self._fail(ToonErrorKind.MALFORMED_HEADER, line, f"text after quoted key {token!r}")
            return key
        if not _BARE_KEY.fullmatch(token):
            self._fail(ToonErrorKind.MALFORMED_HEADER, line, f"invalid key {token!r}")
        return token

    def _scalar(self, token: str, line: int) -> Any:
        if token.startswith('"'):
            value, end = self._quoted(token, 0, line)
            if end != len(token):
                self._fail(ToonErrorKind.MALFORMED_HEADER, line, f"text after quoted string {token!r}")
            return value
        if token in _LITERALS:
            return _LITERALS[token]
        if _NUMBER.fullmatch(token):
            if "." in token or "e" in token or "E" in token:
                return Decimal(token)
            try:
                return int(token)
            except ValueError:  # beyond int parsing limits
                return Decimal(token)
        return token

    def _cells(self, text: str, line: int) -> List[str]:
        cells = split_cells(text, self.delim)
        if cells is None:
            self._fail(ToonErrorKind.UNTERMINATED_QUOTE, line, "missing closing quote")
        return cells

    def _looks_keyed(self, text: str) -> bool:
        if text.startswith('"'):
            end = _closing_quote(text, 0)
            return end >= 0 and end + 1 < len(text) and text[end + 1] in ":["
        m = _BARE_KEY.match(text)
        return m is not None and m.end() < len(text) and text[m.end()] in ":["

    def _head(self, content: str, line: int, keyed: bool = True) -> _Head:
        key = None
        i = 0
        if keyed:
            if content.startswith('"'):
                key, i = self._quoted(content, 0, line)
            else:
                m = _BARE_KEY.match(content)
                if m is None:
                    self._fail(ToonErrorKind.MALFORMED_HEADER, line, f"expected a key in {content!r}")
                key, i = m.group(), m.end()
        length = fields = None
        n = len(content)
        if i < n and content[i] == "[":
            m = _LENGTH.match(content, i)
            if m is None:
                self._fail(ToonErrorKind.MALFORMED_HEADER, line, "array length must be [N] with N >= 0")
            length, i = int(m.group(1)), m.end()
            if i < n and content[i] == "{":
                close = i + 1
                while close < n and content[close] != "}":
                    if content[close] == '"':
                        q = _closing_quote(content, close)
                        if q < 0:
                            self._fail(ToonErrorKind.UNTERMINATED_QUOTE, line, "missing closing quote in fields")
                        close = q
                    close += 1
                if close >= n:
                    self._fail(ToonErrorKind.MALFORMED_HEADER, line, "unclosed field list")
                fields = [self._key_token(c, line) for c in self._cells(content[i + 1 : close], line)]
                if len(set(fields)) != len(fields) and self.strict:
                    self._fail(ToonErrorKind.DUPLICATE_KEY, line, "repeated field name in tabular header")
                i = close + 1
        elif not keyed:
            self._fail(ToonErrorKind.MALFORMED_HEADER, line, "expected an array header")
        if i >= n or content[i] != ":":
            self._fail(ToonErrorKind.MALFORMED_HEADER, line, f"expected ':' in {content!r}")
        return _Head(key, length, fields, content[i + 1 :].strip(" "), line)

    # -- structure ----------------------------------------------------------

    def _put(self, out: Dict[str, Any], key: str, value: Any, line: int):
        if key in out and self.strict:
            self._fail(ToonErrorKind.DUPLICATE_KEY, line, f"duplicate key {key!r}")
        out[key] = value

    def _mapping(self, depth: int, out: Dict[str, Any]) -> Dict[str, Any]:
        while True:
            nxt = self._peek()
            if nxt is None or nxt[1] < depth:
                return out
            lineno, d, content = nxt
            if d > depth:
                self._fail(ToonErrorKind.INDENTATION, lineno, "unexpected indentation")
            if content == "-" or content.startswith("- "):
                self._fail(ToonErrorKind.MALFORMED_HEADER, lineno, "list item outside an array")
            self.pos += 1
            head = self._head(content, lineno)
            self._put(out, head.key, self._entry(head, depth + 1), lineno)

    def _entry(self, head: _Head, child_depth: int) -> Any:
        if head.length is not None:
            return self._array(head, child_depth)
        if head.rest:
            return self._scalar(head.rest, head.line)
        return self._mapping(child_depth, {})

    def _block(self, child_depth: int):
        """Yield the lines of an indented block exactly ``child_depth`` deep."""
        while True:
            nxt = self._peek()
            if nxt is None or nxt[1] < child_depth:
                return
            if nxt[1] > child_depth:
                self._fail(ToonErrorKind.INDENTATION, nxt[0], "unexpected indentation")
            self.pos += 1
            yield nxt

    def _check_length(self, head: _Head, realized: int):
        if self.strict and realized != head.length:
            self._fail(
                ToonErrorKind.LENGTH_MISMATCH,
                head.line,
                f"declared length {head.length} but found {realized}",
            )

    def _array(self, head: _Head, child_depth: int) -> List[Any]:
        if head.fields is not None:
            if head.rest:
                self._fail(ToonErrorKind.MALFORMED_HEADER, head.line, "tabular header must end its line")
            width = len(head.fields)
            rows = []
            for lineno, _, content in self._block(child_depth):
                cells = self._cells(content, lineno)
                if len(cells) != width:
                    if self.strict:
                        self._fail(
                            ToonErrorKind.FIELD_COUNT_MISMATCH,
                            lineno,
                            f"row has {len(cells)} values for {width} fields",
                        )
                    cells = (cells + ["null"] * width)[:width]
                rows.append({f: self._scalar(c, lineno) for f, c in zip(head.fields, cells)})
            self._check_length(head, len(rows))
            return rows
        if head.rest:
            items = [self._scalar(c, head.line) for c in self._cells(head.rest, head.line)]
            self._check_length(head, len(items))
            return items
        items = []
        for lineno, _, content in self._block(child_depth):
            if content != "-" and not content.startswith("- "):
                self._fail(ToonErrorKind.MALFORMED_HEADER, lineno, "expected a '- ' list item")
            items.append(self._item(content[2:].lstrip(" "), lineno, child_depth))
        self._check_length(head, len(items))
        return items

    def _item(self, text: str, line: int, depth: int) -> Any:
        if not text:
            return {}
        if text.startswith("["):
            return self._array(self._head(text, line, keyed=False), depth + 1)
        if self._looks_keyed(text):
            head = self._head(text, line)
            obj: Dict[str, Any] = {}
            self._put(obj, head.key, self._entry(head, depth + 2), line)
            return self._mapping(depth + 1, obj)
        return self._scalar(text, line)


def parse_toon(text: str, dialect: ToonDialect = DEFAULT_DIALECT, *, strict: bool = True) -> Value:
    """Parse a TOON document into a canonical value.

    Raises :class:`ToonError`. ``strict=False`` tolerates count mismatches
    (short rows are padded with null) and lets later duplicate keys win.
    """
    return _Parser(text, dialect, strict).document()


def validate_toon(
    text: str, dialect: ToonDialect = DEFAULT_DIALECT
) -> Tuple[bool, Optional[ToonError]]:
    try:
        parse_toon(text, dialect)
    except ToonError as exc:
        return False, exc
    return True, None


# -- serializer -------------------------------------------------------------


class _Emitter:
    def __init__(self, dialect: ToonDialect):
        self.dialect = dialect
        self.delim = dialect.delimiter
        self.lines: List[Tuple[int, str]] = []

    def key(self, k: str) -> str:
        if not isinstance(k, str) or k == "":
            raise UnrepresentableValue(f"TOON keys must be non-empty text, got {k!r}")
        if _BARE_KEY.fullmatch(k):
            return k
        return json.dumps(k, ensure_ascii=False)

    def scalar(self, v: Any) -> str:
        if v is None:
            return "null"
        if v is True:
            return "true"
        if v is False:
            return "false"
        if isinstance(v, str):
            return json.dumps(v, ensure_ascii=False) if self._needs_quote(v) else v
        return format_number(v)

    def _needs_quote(self, s: str) -> bool:
        if not s or s[0].isspace() or s[-1].isspace():
            return True
        if s in _LITERALS or _NUMBER.fullmatch(s):
            return True
        if self.delim in s:
            return True
        return any(c in _ALWAYS_QUOTE or c < " " or c == "\x7f" for c in s)

    def entry(self, key_text: str, value: Any, depth: int):
        if isinstance(value, dict):
            self.lines.append((depth, f"{key_text}:"))
            self.mapping(value, depth + 1)
        elif isinstance(value, list):
            self.array(key_text, value, depth)
        else:
            self.lines.append((depth, f"{key_text}: {self.scalar(value)}"))

    def mapping(self, obj: Dict[str, Any], depth: int):
        for k, v in obj.items():
            self.entry(self.key(k), v, depth)

    def _tabular_fields(self, arr: List[Any]) -> Optional[List[str]]:
        first = arr[0]
        if not isinstance(first, dict) or not first:
            return None
        names = set(first)
        for item in arr:
            if not isinstance(item, dict) or set(item) != names:
                return None
            if not all(is_scalar(v) for v in item.values()):
                return None
        return list(first)

    def array(self, key_text: str, arr: List[Any], depth: int):
        n = len(arr)
        d = self.delim
        if n == 0:
            self.lines.append((depth, f"{key_text}[0]:"))
        elif all(is_scalar(v) for v in arr):
            self.lines.append((depth, f"{key_text}[{n}]: " + d.join(self.scalar(v) for v in arr)))
        else:
            fields = self._tabular_fields(arr)
            if fields is not None:
                header = d.join(self.key(f) for f in fields)
                self.lines.append((depth, f"{key_text}[{n}]{{{header}}}:"))
                for row in arr:
                    self.lines.append((depth + 1, d.join(self.scalar(row[f]) for f in fields)))
            else:
                self.lines.append((depth, f"{key_text}[{n}]:"))
                for item in arr:
                    self.item(item, depth + 1)

    def item(self, item: Any, depth: int):
        start = len(self.lines)
        if isinstance(item, dict):
            if not item:
                self.lines.append((depth, "-"))
                return
            entries = iter(item.items())
            k, v = next(entries)
            self.entry(self.key(k), v, depth + 1)
            for k, v in entries:
                self.entry(self.key(k), v, depth + 1)
        elif isinstance(item, list):
            self.array("", item, depth)
        else:
            self.lines.append((depth, self.scalar(item)))
        self.lines[start] = (depth, "- " + self.lines[start][1])

    def render(self) -> str:
        pad = " " * self.dialect.indent_width
        return "\n".join(pad * depth + text for depth, text in self.lines)


def serialize_toon(value: Value, dialect: ToonDialect = DEFAULT_DIALECT) -> str:
    """Deterministic TOON text for ``value`` (a mapping or sequence).

    Uniform lists of flat mappings become tabular arrays, lists of scalars go
    inline, and anything else is written as ``- `` items.
    """
    em = _Emitter(dialect)
    if isinstance(value, dict):
        em.mapping(value, 0)
    elif isinstance(value, list):
        em.array("", value, 0)
    else:
        raise UnrepresentableValue("a TOON document root must be a mapping or a sequence")
    return em.render()
