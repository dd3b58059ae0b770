"""Paired source/target windows over a neighboring-node rate-difference series.

When a node temporarily forwards faster than its successor, the surplus sits
in the successor's queue and drains later; the rate difference therefore
swings nonnegative (source window T1) then negative (target window T2),
crossing zero at the boundaries. ``split`` segments a difference series into
that ordered list of (T1, T2) pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class WindowPair:
    """One correlation window: T1 holds indices with diff >= 0, T2 with diff < 0.

    Within a pair every T1 index precedes every T2 index. T1 is empty only
    for a pair at the start of the series (leading negative prefix); T2 is
    empty only at the end of the series.
    """

    t1: tuple[int, ...]
    t2: tuple[int, ...]


class WindowPairing:
    """Ordered, disjoint (T1, T2) pairs covering the full index range."""

    def __init__(self, pairs: list[WindowPair], length: int):
        self.pairs = pairs
        self.length = length

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def to_json(self) -> str:
        """Debug dump of the pairing."""
        return json.dumps(
            [{"t1": list(p.t1), "t2": list(p.t2)} for p in self.pairs]
        )


def split(diff_series) -> WindowPairing:
    """Partition ``diff_series`` into paired source/target windows.

    Scans left to right: a nonnegative value extends the current T1 while T2
    is still empty; a negative value extends the current T2; a negative ->
    nonnegative transition closes the pair and opens a new one containing
    the current index in its T1.

    Raises ValueError on an empty series.
    """
    n = len(diff_series)
    if n == 0:
        raise ValueError("cannot split an empty series")

    pairs: list[WindowPair] = []
    t1: list[int] = []
    t2: list[int] = []
    for tau in range(n):
        if diff_series[tau] >= 0:
            if t2:
                # zero crossing from below: close the pair, start a new one
                pairs.append(WindowPair(tuple(t1), tuple(t2)))
                t1, t2 = [tau], []
            else:
                t1.append(tau)
        else:
            t2.append(tau)
    pairs.append(WindowPair(tuple(t1), tuple(t2)))
    return WindowPairing(pairs, n)
