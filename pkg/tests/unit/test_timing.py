"""Unit tests for phase timers and timing summaries."""

import time

import pytest


class TestPhaseTimer:
    def test_phases_accumulate(self):
        """Repeated phases add up and exceptions still record time."""
        from ligp.timing import PhaseTimer

        timer = PhaseTimer()
        with timer.phase("design"):
            time.sleep(0.01)
        with timer.phase("design"):
            time.sleep(0.01)
        with pytest.raises(RuntimeError):
            with timer.phase("mle"):
                raise RuntimeError("boom")

        seconds = timer.as_dict()
        assert seconds["design"] >= 0.02
        assert "mle" in seconds
        assert timer.total == pytest.approx(sum(seconds.values()))


class TestTimingSummary:
    def test_stats(self):
        from ligp.timing import TimingSummary

        summary = TimingSummary()
        summary.extend([{"predict": 1.0, "mle": 2.0}, {"predict": 3.0}])

        stats = summary.get_stats("predict")
        assert stats["count"] == 2
        assert stats["total"] == 4.0
        assert stats["mean"] == 2.0
        assert summary.totals() == {"predict": 4.0, "mle": 2.0}
        assert summary.get_stats("index") == {}

        text = summary.summary()
        assert text.index("mle") < text.index("predict")
        print(text)
