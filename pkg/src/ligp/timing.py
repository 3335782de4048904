# SPDX-FileCopyrightText: Copyright (c) 2025 The ligp authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Phase timing for prediction pipelines (seconds, perf_counter based)."""

import statistics
import time
from contextlib import contextmanager
from typing import Dict, Iterable, List

PHASES = ("index", "template", "neighborhood", "design", "mle", "predict")


def _phase_order(name: str) -> int:
    return PHASES.index(name) if name in PHASES else len(PHASES)


class PhaseTimer:
    """Accumulates wall-clock seconds per named phase."""

    def __init__(self):
        self.seconds: Dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.add(name, time.perf_counter() - start)

    def add(self, name: str, seconds: float):
        self.seconds[name] = self.seconds.get(name, 0.0) + seconds

    @property
    def total(self) -> float:
        return sum(self.seconds.values())

    def as_dict(self) -> Dict[str, float]:
        return dict(self.seconds)


class TimingSummary:
    """Per-phase statistics over many timers (sites or replicates)."""

    def __init__(self):
        self.samples: Dict[str, List[float]] = {}

    def record(self, timings: Dict[str, float]):
        for name, seconds in timings.items():
            self.samples.setdefault(name, []).append(seconds)

    def extend(self, timers: Iterable[Dict[str, float]]):
        for timings in timers:
            self.record(timings)

    def get_stats(self, name: str) -> Dict[str, float]:
        values = self.samples.get(name)
        if not values:
            return {}
        return {
            "count": len(values),
            "total": sum(values),
            "mean": statistics.mean(values),
            "median": statistics.median(values),
            "max": max(values),
            "p95": statistics.quantiles(values, n=20)[18] if len(values) > 1 else values[0],
        }

    def totals(self) -> Dict[str, float]:
        return {name: sum(values) for name, values in self.samples.items()}

    def summary(self) -> str:
        lines = ["Phase timings (seconds):"]
        for name in sorted(self.samples, key=_phase_order):
            s = self.get_stats(name)
            lines.append(
                f"  {name:<13} total {s['total']:9.3f}  mean {s['mean']:.4f}"
                f"  p95 {s['p95']:.4f}  n={s['count']}"
            )
        return "\n".join(lines)
