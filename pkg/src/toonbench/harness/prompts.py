"""Per-format prompt templates."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Dict, Mapping, Optional

from ..formats import FormatKind
from .corpus import TaskInstance

SLOT = "{description}"

DEFAULT_PREAMBLE = (
    "Generate structured data for the task below. Reply with the document only: "
    "no explanations and no code fences.\n\nTask:\n" + SLOT
)

TOON_RULES = """\
Output format: TOON (Token-Oriented Object Notation). Follow these rules exactly:
- Indent nested content by 2 spaces per level. Never use tabs.
- Scalar field: `key: value`.
- Nested object: `key:` on its own line, its fields indented one level deeper.
- Array of primitives, written inline with its length: `tags[3]: red,green,blue`.
- Array of objects that all have the same primitive fields, written as a table:
  `users[2]{id,name}:` then one comma-separated row per object, indented one level deeper.
- Any other array: `items[N]:` then N entries indented one level deeper, each starting with `- `.
- The length N in brackets must equal the number of values, rows or entries.
- Wrap a string in double quotes only if it contains a comma, colon or quote, has
  leading or trailing spaces, is empty, or would read as a number, true, false or null.
- true, false and null are literals."""

DIRECTIVES = {
    FormatKind.JSON: "Output format: a single valid JSON document.",
    FormatKind.XML: "Output format: a single well-formed XML document with exactly one root element.",
    FormatKind.YAML: "Output format: a single YAML document in block style.",
    FormatKind.TOON: TOON_RULES,
}


class MissingTemplate(KeyError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    format: FormatKind
    preamble: str
    format_rules: str

    def __post_init__(self):
        if self.preamble.count(SLOT) != 1:
            raise ValueError(f"preamble must contain exactly one {SLOT} slot")
        if self.format is FormatKind.TOON and not self.format_rules.strip():
            raise ValueError("the TOON template must carry its formatting rules")

    def render(self, description: str) -> str:
        return self.preamble.replace(SLOT, description) + "\n\n" + self.format_rules


def default_templates() -> Dict[FormatKind, PromptTemplate]:
    return {f: PromptTemplate(f, DEFAULT_PREAMBLE, rules) for f, rules in DIRECTIVES.items()}


def templates_with_overrides(overrides: Optional[Mapping[str, Mapping[str, Any]]]) -> Dict[FormatKind, PromptTemplate]:
    """Defaults with per-format ``preamble``/``format_rules`` replacements."""
    out = default_templates()
    for name, fields in (overrides or {}).items():
        fmt = FormatKind.parse(name)
        unknown = set(fields) - {"preamble", "format_rules"}
        if unknown:
            raise ValueError(f"unknown template field(s) for {name}: {', '.join(sorted(unknown))}")
        out[fmt] = replace(out[fmt], **fields)
    return out


def build_prompt(t: TaskInstance, format: FormatKind, templates: Mapping[FormatKind, PromptTemplate]) -> str:
    try:
        template = templates[FormatKind(format)]
    except (KeyError, ValueError):
        raise MissingTemplate(f"no prompt template for format {format!r}") from None
    return template.render(t.description)
