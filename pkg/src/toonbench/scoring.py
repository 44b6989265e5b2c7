"""Render/Syntax scores, the weighted correctness score and its environment-aware blend."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

from .formats import AdapterError, FormatKind, parse_format
from .value import as_leaf, flatten, is_missing, normalized_equal, resolve, scalar_text

DEFAULT_ALPHA = 0.2
DEFAULT_BETA = 0.8
DEFAULT_GAMMA = 0.5


class NoCrossing(ValueError):
    pass


@dataclass(frozen=True)
class ScoreWeights:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.alpha + self.beta - 1.0) > 1e-12:
            raise ValueError(f"alpha + beta must equal 1, got {self.alpha} + {self.beta}")


@dataclass(frozen=True)
class ScoreBundle:
    render: int
    syntax: float
    gcs: float
    x_intensity: Optional[float]  # None when the record generated no tokens
    ees: Optional[float]
    gcs_env: Optional[float]

    @property
    def degenerate(self) -> bool:
        return self.ees is None


def render_score(output: str, format: FormatKind) -> int:
    try:
        parse_format(output, format)
    except AdapterError:
        return 0
    return 1


def _leaf_matches(expected: Any, got: Any, format: FormatKind) -> bool:
    if format is FormatKind.XML:
        return isinstance(got, str) and scalar_text(expected) == got
    return normalized_equal(expected, got)


def _xml_view(parsed: Any, expected: Any) -> Any:
    # The XML root element wraps the payload unless the expected value names it.
    if isinstance(parsed, dict) and len(parsed) == 1:
        (tag, content), = parsed.items()
        if not (isinstance(expected, dict) and list(expected) == [tag]):
            return content
    return parsed


def match_fraction(parsed: Any, expected: Any, format: FormatKind, keys_only: bool = False) -> float:
    """Share of ``flatten(expected)`` pairs found at the same path in ``parsed``."""
    format = FormatKind(format)
    is_xml = format is FormatKind.XML
    if is_xml:
        parsed = _xml_view(parsed, expected)
    pairs = flatten(expected)
    hit = 0
    for path, leaf in pairs.items():
        node = resolve(parsed, path, lift_singletons=is_xml)
        if is_missing(node):
            continue
        if keys_only:
            hit += 1
            continue
        got = as_leaf(node)
        if not is_missing(got) and _leaf_matches(leaf, got, format):
            hit += 1
    return hit / len(pairs)


def syntax_score(output: str, format: FormatKind, expected: Any, *, keys_only: bool = False) -> float:
    """Recall of expected key-value pairs in the parsed output; 0 when it does not parse.

    Extra keys in the output are not penalized. Sequence elements match by index.
    """
    if expected is None:
        raise ValueError("expected value must be non-null")
    try:
        parsed = parse_format(output, format)
    except AdapterError:
        return 0.0
    return match_fraction(parsed, expected, format, keys_only)


def gcs(render: float, syntax: float, w: ScoreWeights = ScoreWeights()) -> float:
    return w.alpha * render + w.beta * syntax


def gcs_env(gcs_value: float, ees_value: float, gamma: float = DEFAULT_GAMMA) -> float:
    return (1.0 - gamma) * gcs_value + gamma * ees_value


def gamma_sweep(gcs_value: float, ees_value: float, steps: int = 11) -> List[Tuple[float, float]]:
    """``gcs_env`` on ``steps`` evenly spaced weights from 0 to 1 inclusive."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    out = []
    for i in range(steps):
        g = i / (steps - 1)
        out.append((g, gcs_env(gcs_value, ees_value, g)))
    return out


def crossing_gamma(first: Tuple[float, float], second: Tuple[float, float]) -> float:
    """Weight at which two ``(gcs, ees)`` pairs score the same ``gcs_env``.

    Raises :class:`NoCrossing` for parallel lines or a crossing outside [0, 1].
    """
    g1, e1 = first
    g2, e2 = second
    slope = (g1 - g2) - (e1 - e2)  # (g1-g2)(1-y) + (e1-e2)y = 0
    if math.isclose(slope, 0.0, abs_tol=1e-15):
        raise NoCrossing("score lines are parallel")
    gamma = (g1 - g2) / slope
    if not 0.0 <= gamma <= 1.0:
        raise NoCrossing(f"lines cross at gamma={gamma:.6g}, outside [0, 1]")
    return gamma
