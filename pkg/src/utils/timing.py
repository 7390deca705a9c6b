# src/utils/timing.py
import time
from typing import Dict


class Stopwatch:
    """
    Named lap timer for report timings

    Laps are recorded in seconds, keyed by section name.
    """

    def __init__(self):
        self.laps: Dict[str, float] = {}
        self._started = time.perf_counter()
        self._last = self._started

    def lap(self, name: str) -> float:
        now = time.perf_counter()
        elapsed = now - self._last
        self.laps[name] = self.laps.get(name, 0.0) + elapsed
        self._last = now
        return elapsed

    def total(self) -> float:
        return time.perf_counter() - self._started
