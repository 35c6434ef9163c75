"""Tests for the ordered worker pool."""

from __future__ import annotations

import time

import pytest

from errors import ConfigError
from experiments.runner import THREADS_ENV, default_threads, gather_tasks, run_tasks


def _slow_square(x: int) -> int:
    time.sleep(0.005 * (5 - x))
    return x * x


class TestRunTasks:
    """Tests for running tasks sequentially and on the pool."""

    def test_sequential(self) -> None:
        assert run_tasks(_slow_square, range(5), threads=1) == [0, 1, 4, 9, 16]

    def test_parallel_keeps_task_order(self) -> None:
        assert run_tasks(_slow_square, range(5), threads=4) == [0, 1, 4, 9, 16]

    def test_empty(self) -> None:
        assert run_tasks(_slow_square, [], threads=4) == []

    def test_errors_propagate(self) -> None:
        def boom(x: int) -> int:
            raise ValueError(x)

        with pytest.raises(ValueError):
            run_tasks(boom, range(3), threads=2)


class TestGatherTasks:
    """Tests for the asyncio executor path."""

    async def test_gather_in_order(self) -> None:
        assert await gather_tasks(_slow_square, range(5), threads=3) == [0, 1, 4, 9, 16]


class TestDefaultThreads:
    """Verify the POLYFREG_THREADS lookup."""

    def test_env_override(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv(THREADS_ENV, "3")
        assert default_threads() == 3

    def test_cpu_count_fallback(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv(THREADS_ENV, raising=False)
        assert default_threads() >= 1

    @pytest.mark.parametrize("raw", ["many", "0"])
    def test_invalid_env(self, monkeypatch: pytest.MonkeyPatch, raw: str) -> None:
        monkeypatch.setenv(THREADS_ENV, raw)
        with pytest.raises(ConfigError):
            default_threads()
