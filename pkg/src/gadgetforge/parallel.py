"""Thread-count policy shared by the sweep and suite runners."""

from __future__ import annotations

import os

ENV_VAR = "GADGETFORGE_THREADS"


def thread_count(requested: int | None = None) -> int:
    """Worker count: the explicit request, capped by GADGETFORGE_THREADS when set."""
    cap = os.environ.get(ENV_VAR)
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, int(n))
