"""Pure-Python versions of the hot loops.

``_speedups.pyx`` mirrors these signatures one for one; :mod:`toonbench._accel`
picks whichever is available.
"""

from __future__ import annotations

from typing import List, Optional, Tuple


def scan_lines(text: str) -> List[Tuple[int, int, str]]:
    """Split ``text`` into non-blank ``(lineno, leading_spaces, content)`` triples.

    ``leading_spaces`` is -1 when a tab appears inside the indentation.
    Trailing spaces are dropped from ``content``.
    """
    out = []
    for lineno, line in enumerate(text.split("\n"), 1):
        stripped = line.lstrip(" ")
        if not stripped.strip():
            continue
        lead = len(line) - len(stripped)
        if stripped[0] == "\t":
            lead = -1
        out.append((lineno, lead, stripped.rstrip(" ")))
    return out


def split_cells(text: str, delimiter: str) -> Optional[List[str]]:
    """Split on ``delimiter`` outside double quotes; cells are space-trimmed.

    Returns None if a quote is left open.
    """
    cells = []
    start = 0
    in_quote = False
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if in_quote:
            if c == "\\":
                i += 1
            elif c == '"':
                in_quote = False
        elif c == '"':
            in_quote = True
        elif c == delimiter:
            cells.append(text[start:i].strip(" "))
            start = i + 1
        i += 1
    if in_quote:
        return None
    cells.append(text[start:].strip(" "))
    return cells


def signed_rank_counts(doubled_ranks: List[int]) -> List[int]:
    """Count sign assignments by positive rank sum.

    ``counts[s]`` is the number of the ``2**n`` sign vectors whose positive
    ranks (given doubled, so mid-ranks stay integral) sum to ``s``.
    """
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    reach = 0
    for r in doubled_ranks:
        reach += r
        for s in range(reach, r - 1, -1):
            counts[s] += counts[s - r]
    return counts
