"""Non-dominated archive of biobjective solutions (both objectives minimized)."""

from __future__ import annotations

import bisect
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator


@dataclass
class Entry:
    objectives: tuple[int, int]
    payload: Any = None
    tag: str = ""


class ParetoArchive:
    """Entries sorted by f1 ascending; on a clean front f2 is then strictly descending."""

    def __init__(self, items: Iterable = ()):
        self._keys: list[tuple[int, int]] = []
        self._entries: list[Entry] = []
        for it in items:
            if isinstance(it, Entry):
                self.update(it.objectives, it.payload, it.tag)
            else:
                self.update(tuple(it))

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Entry]:
        return iter(list(self._entries))

    def dominated(self, point: tuple[int, int]) -> bool:
        """True if some entry dominates ``point`` or equals it."""
        f1, f2 = point
        i = bisect.bisect_right(self._keys, (f1, float("inf")))
        # entries with f1' <= f1: the last one has the smallest f2 among them
        return i > 0 and self._keys[i - 1][1] <= f2

    def update(self, point, payload: Any = None, tag: str = "") -> bool:
        """Insert unless dominated or duplicated; drop entries it dominates.

        ``point`` may be an objective pair or an object with an
        ``objectives`` attribute (which then doubles as the payload).
        """
        if hasattr(point, "objectives"):
            payload = point if payload is None else payload
            point = point.objectives
        f1, f2 = int(point[0]), int(point[1])
        if self.dominated((f1, f2)):
            return False
        lo = bisect.bisect_left(self._keys, (f1, f2))
        hi = lo
        while hi < len(self._keys) and self._keys[hi][1] >= f2:
            hi += 1
        del self._keys[lo:hi]
        del self._entries[lo:hi]
        self._keys.insert(lo, (f1, f2))
        self._entries.insert(lo, Entry((f1, f2), payload, tag))
        return True

    def front(self) -> list[tuple[int, int]]:
        return list(self._keys)

    def payloads(self) -> list[Any]:
        return [e.payload for e in self._entries]

    def write_csv(self, path: str | Path, solution_files: list[str] | None = None) -> None:
        """Front table with columns f1, f2, affinity_sum, penalization_sum, overtime_sum, solution_file."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["f1", "f2", "affinity_sum", "penalization_sum", "overtime_sum", "solution_file"])
            for k, e in enumerate(self._entries):
                sol = e.payload
                w.writerow([
                    e.objectives[0], e.objectives[1],
                    getattr(sol, "total_affinity", ""), getattr(sol, "total_penalization", ""),
                    getattr(sol, "total_overtime", ""),
                    solution_files[k] if solution_files else "",
                ])


def nondominated(points: Iterable[tuple]) -> list[tuple[int, int]]:
    """Sorted non-dominated subset of ``points`` (duplicates collapsed)."""
    arc = ParetoArchive()
    for p in points:
        arc.update(tuple(p))
    return arc.front()
