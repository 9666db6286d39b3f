# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

from __future__ import annotations


def get_human_delta(seconds: float) -> str:
    """
    Return a human-readable delta like '2h 3m', '5m 10s', '4.2s' or '350ms'.
    Spans under a minute keep one decimal.
    """
    if seconds < 0:
        seconds = 0.0

    if seconds < 1:
        return f"{int(seconds * 1000)}ms"
    if seconds < 60:
        return f"{seconds:.1f}s"

    m, s = divmod(int(seconds), 60)
    if m < 60:
        return f"{m}m" + (f" {s}s" if s else "")

    h, m = divmod(m, 60)
    return f"{h}h" + (f" {m}m" if m else "")
