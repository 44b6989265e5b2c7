"""Select compiled kernels when built, else the pure-Python ones.

Set ``TOONBENCH_PURE=1`` to force the pure-Python path.
"""

from __future__ import annotations

import os

from . import _kernels as pure

compiled = None
if not os.environ.get("TOONBENCH_PURE"):
    try:
        from . import _speedups as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

impl = compiled if compiled is not None else pure
BACKEND = "compiled" if compiled is not None else "python"

scan_lines = impl.scan_lines
split_cells = impl.split_cells
signed_rank_counts = impl.signed_rank_counts

__all__ = ["BACKEND", "compiled", "pure", "scan_lines", "split_cells", "signed_rank_counts"]
