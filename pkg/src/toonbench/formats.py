"""JSON, XML and YAML adapters onto the canonical value model; TOON delegates to :mod:`toonbench.toon`.

XML mapping rule (XML has no typed scalars, so every leaf is text):

* the document becomes ``{root_tag: content}``;
* child elements become mapping entries, repeated sibling names a sequence;
* attributes become ``"@name"`` keys; text next to children goes under ``"#text"``;
* a leaf element (no children, no attributes) is its stripped text.

YAML is restricted to plain block style over JSON-compatible scalars:
anchors, aliases, explicit tags, multi-document streams and non-empty flow
collections are rejected.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from decimal import Decimal
from enum import Enum
from typing import Any, Dict, List, Optional
from xml.sax.saxutils import escape as xml_escape
from xml.sax.saxutils import quoteattr

import yaml

from . import toon
from .value import UnrepresentableValue, Value, format_number, is_scalar, scalar_text


class FormatKind(str, Enum):
    JSON = "json"
    XML = "xml"
    YAML = "yaml"
    TOON = "toon"

    @classmethod
    def parse(cls, name: str) -> "FormatKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown format {name!r}; expected one of json, xml, yaml, toon") from None


class AdapterError(ValueError):
    def __init__(self, format: FormatKind, message: str, line: Optional[int] = None):
        self.format = format
        self.line = line
        self.message = message
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{format.value}: {where}{message}")


# -- JSON -------------------------------------------------------------------


def _json_pairs(pairs):
    out: Dict[str, Any] = {}
    for k, v in pairs:
        if k in out:
            raise ValueError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _reject_constant(name):
    raise ValueError(f"{name} is not a JSON number")


def parse_json(text: str) -> Value:
    try:
        return json.loads(
            text,
            parse_float=Decimal,
            parse_constant=_reject_constant,
            object_pairs_hook=_json_pairs,
        )
    except json.JSONDecodeError as exc:
        raise AdapterError(FormatKind.JSON, exc.msg, exc.lineno) from exc
    except (ValueError, RecursionError) as exc:
        raise AdapterError(FormatKind.JSON, str(exc)) from exc


def serialize_json(value: Value) -> str:
    if isinstance(value, dict):
        return "{" + ",".join(
            json.dumps(k, ensure_ascii=False) + ":" + serialize_json(v) for k, v in value.items()
        ) + "}"
    if isinstance(value, list):
        return "[" + ",".join(serialize_json(v) for v in value) + "]"
    if value is None or isinstance(value, (bool, str)):
        return json.dumps(value, ensure_ascii=False)
    return format_number(value)


# -- YAML -------------------------------------------------------------------

_Y_NULL = re.compile(r"(?:~|null|Null|NULL|)\Z")
_Y_TRUE = re.compile(r"(?:true|True|TRUE)\Z")
_Y_FALSE = re.compile(r"(?:false|False|FALSE)\Z")
_Y_INT = re.compile(r"[-+]?(?:0|[1-9][0-9]*)\Z")
_Y_FLOAT = re.compile(r"[-+]?(?:0|[1-9][0-9]*)(?:\.[0-9]*)?(?:[eE][-+]?[0-9]+)?\Z")
_Y_PLAIN_SAFE = re.compile(r"[A-Za-z_][A-Za-z0-9_ ./-]*\Z")
_Y_UNSAFE_PLAIN_WORDS = {
    "y", "Y", "yes", "Yes", "YES", "n", "N", "no", "No", "NO",
    "on", "On", "ON", "off", "Off", "OFF",
}


def _yaml_plain_scalar(text: str) -> Any:
    if _Y_NULL.match(text):
        return None
    if _Y_TRUE.match(text):
        return True
    if _Y_FALSE.match(text):
        return False
    if _Y_INT.match(text):
        return int(text)
    if _Y_FLOAT.match(text) and any(c in text for c in ".eE"):
        return Decimal(text)
    return text


class _YamlBuilder:
    """Build a value from a PyYAML event stream, enforcing the supported subset."""

    def __init__(self, text: str):
        self.events = yaml.parse(text, Loader=yaml.SafeLoader)

    def _fail(self, message: str, event=None):
        line = event.start_mark.line + 1 if event is not None and event.start_mark else None
        raise AdapterError(FormatKind.YAML, message, line)

    def _check(self, ev):
        if isinstance(ev, yaml.AliasEvent):
            self._fail("aliases are not supported", ev)
        if getattr(ev, "anchor", None) is not None:
            self._fail("anchors are not supported", ev)
        tag = getattr(ev, "tag", None)
        if tag is not None and tag != "!":
            self._fail(f"explicit tag {tag} is not supported", ev)

    def build(self) -> Value:
        docs: List[Value] = []
        for ev in self.events:
            if isinstance(ev, yaml.DocumentStartEvent):
                if docs:
                    self._fail("multiple documents", ev)
                docs.append(self._node(next(self.events)))
        return docs[0] if docs else None

    def _node(self, ev) -> Any:
        self._check(ev)
        if isinstance(ev, yaml.ScalarEvent):
            if ev.style is None:
                return _yaml_plain_scalar(ev.value)
            return ev.value
        if isinstance(ev, yaml.SequenceStartEvent):
            items = []
            for child in self.events:
                if isinstance(child, yaml.SequenceEndEvent):
                    break
                items.append(self._node(child))
            if ev.flow_style and items:
                self._fail("flow sequences are not supported", ev)
            return items
        if isinstance(ev, yaml.MappingStartEvent):
            out: Dict[str, Any] = {}
            for key_ev in self.events:
                if isinstance(key_ev, yaml.MappingEndEvent):
                    break
                self._check(key_ev)
                if not isinstance(key_ev, yaml.ScalarEvent):
                    self._fail("mapping keys must be scalars", key_ev)
                key = key_ev.value
                if key in out:
                    self._fail(f"duplicate key {key!r}", key_ev)
                out[key] = self._node(next(self.events))
            if ev.flow_style and out:
                self._fail("flow mappings are not supported", ev)
            return out
        self._fail(f"unexpected {type(ev).__name__}", ev)


def parse_yaml(text: str) -> Value:
    try:
        return _YamlBuilder(text).build()
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise AdapterError(FormatKind.YAML, str(exc).splitlines()[0], mark.line + 1 if mark else None) from exc
    except RecursionError as exc:
        raise AdapterError(FormatKind.YAML, "nesting too deep") from exc


def _yaml_quote(s: str) -> str:
    out = ['"']
    for c in s:
        o = ord(c)
        if c == '"':
            out.append('\\"')
        elif c == "\\":
            out.append("\\\\")
        elif c == "\n":
            out.append("\\n")
        elif c == "\t":
            out.append("\\t")
        elif o < 0x20 or 0x7F <= o <= 0x9F or 0xD800 <= o <= 0xDFFF or o in (0xFEFF, 0xFFFE, 0xFFFF):
            out.append(f"\\x{o:02X}" if o <= 0xFF else f"\\u{o:04X}")
        else:
            out.append(c)
    out.append('"')
    return "".join(out)


def _yaml_text(s: str) -> str:
    if (
        _Y_PLAIN_SAFE.match(s)
        and s == s.strip()
        and s not in _Y_UNSAFE_PLAIN_WORDS
        and not isinstance(_yaml_plain_scalar(s), (bool, type(None)))
        and " #" not in s
    ):
        return s
    return _yaml_quote(s)


def _yaml_scalar(v: Any) -> str:
    if isinstance(v, str):
        return _yaml_text(v)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    return format_number(v)


def _yaml_lines(v: Any, indent: int, out: List[str]):
    pad = " " * indent
    if isinstance(v, dict):
        for k, child in v.items():
            key = _yaml_text(k)
            if isinstance(child, (dict, list)) and child:
                out.append(f"{pad}{key}:")
                _yaml_lines(child, indent + 2, out)
            else:
                out.append(f"{pad}{key}: {_yaml_inline(child)}")
    else:
        for child in v:
            if isinstance(child, (dict, list)) and child:
                sub: List[str] = []
                _yaml_lines(child, indent + 2, sub)
                out.append(f"{pad}- {sub[0][indent + 2:]}")
                out.extend(sub[1:])
            else:
                out.append(f"{pad}- {_yaml_inline(child)}")


def _yaml_inline(v: Any) -> str:
    if isinstance(v, dict):
        return "{}"
    if isinstance(v, list):
        return "[]"
    return _yaml_scalar(v)


def serialize_yaml(value: Value) -> str:
    if isinstance(value, (dict, list)) and value:
        out: List[str] = []
        _yaml_lines(value, 0, out)
        return "\n".join(out)
    return _yaml_inline(value)


# -- XML --------------------------------------------------------------------

_XML_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.-]*\Z")


def _xml_element(el: ET.Element) -> Dict[str, Any]:
    children = list(el)
    if not children and not el.attrib:
        return (el.text or "").strip()  # type: ignore[return-value]
    out: Dict[str, Any] = {}
    for name, val in el.attrib.items():
        out["@" + name] = val
    text = (el.text or "").strip()
    if text:
        out["#text"] = text
    counts: Dict[str, int] = {}
    for child in children:
        counts[child.tag] = counts.get(child.tag, 0) + 1
    for child in children:
        value = _xml_element(child)
        if counts[child.tag] > 1:
            out.setdefault(child.tag, []).append(value)
        else:
            out[child.tag] = value
    return out


def parse_xml(text: str) -> Value:
    try:
        root = ET.fromstring(text.strip())
    except ET.ParseError as exc:
        line = exc.position[0] if getattr(exc, "position", None) else None
        raise AdapterError(FormatKind.XML, str(exc), line) from exc
    try:
        return {root.tag: _xml_element(root)}
    except (ValueError, RecursionError) as exc:
        raise AdapterError(FormatKind.XML, str(exc)) from exc


def _xml_name(name: str) -> str:
    if not isinstance(name, str) or not _XML_NAME.match(name) or name.lower().startswith("xml"):
        raise UnrepresentableValue(f"{name!r} is not a usable XML element name")
    return name


def _xml_write(tag: str, v: Any, out: List[str]):
    if isinstance(v, list):
        if len(v) < 2:
            raise UnrepresentableValue(f"sequence under <{tag}> needs at least two items to survive XML")
        for item in v:
            if isinstance(item, list):
                raise UnrepresentableValue(f"nested sequence under <{tag}> has no XML form")
            _xml_write(tag, item, out)
        return
    if not isinstance(v, dict):
        out.append(f"<{tag}>{xml_escape(scalar_text(v))}</{tag}>")
        return
    if not v:
        raise UnrepresentableValue(f"empty mapping under <{tag}> has no XML form")
    attrs = []
    body: List[str] = []
    for k, child in v.items():
        if k.startswith("@"):
            if not is_scalar(child):
                raise UnrepresentableValue(f"attribute {k!r} must be scalar")
            attrs.append(f" {_xml_name(k[1:])}={quoteattr(scalar_text(child))}")
        elif k == "#text":
            body.append(xml_escape(scalar_text(child)))
        else:
            _xml_write(_xml_name(k), child, body)
    out.append(f"<{tag}{''.join(attrs)}>{''.join(body)}</{tag}>")


def serialize_xml(value: Value) -> str:
    if not isinstance(value, dict) or len(value) != 1:
        raise UnrepresentableValue("XML needs a mapping with exactly one key (the root element)")
    (tag, content), = value.items()
    if isinstance(content, list):
        raise UnrepresentableValue("the XML root element cannot be a sequence")
    out: List[str] = []
    _xml_write(_xml_name(tag), content, out)
    return "".join(out)


# -- dispatch ---------------------------------------------------------------


def parse_format(text: str, format: FormatKind) -> Value:
    """Parse ``text`` in ``format``; every failure surfaces as :class:`AdapterError`."""
    format = FormatKind(format)
    if format is FormatKind.JSON:
        return parse_json(text)
    if format is FormatKind.YAML:
        return parse_yaml(text)
    if format is FormatKind.XML:
        return parse_xml(text)
    try:
        return toon.parse_toon(text)
    except toon.ToonError as exc:
        raise AdapterError(FormatKind.TOON, f"{exc.kind.value}: {exc.message}", exc.line) from exc
    except RecursionError as exc:
        raise AdapterError(FormatKind.TOON, "nesting too deep") from exc


def serialize_format(value: Value, format: FormatKind) -> str:
    """Deterministic text for ``value``; raises :class:`UnrepresentableValue` when the format cannot hold it."""
    format = FormatKind(format)
    if format is FormatKind.JSON:
        return serialize_json(value)
    if format is FormatKind.YAML:
        return serialize_yaml(value)
    if format is FormatKind.XML:
        return serialize_xml(value)
    return toon.serialize_toon(value)
