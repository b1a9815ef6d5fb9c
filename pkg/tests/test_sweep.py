import pytest

from glstep.utils.sweep import run_grid


def test_inline_keeps_order():
    assert run_grid(lambda x: x * x, [3, 1, 2], threads=1) == [9, 1, 4]


def test_process_pool_keeps_order():
    assert run_grid(abs, [-3, 1, -2, 5], threads=2) == [3, 1, 2, 5]


def test_empty_grid():
    assert run_grid(abs, [], threads=4) == []


def test_invalid_thread_count():
    with pytest.raises(ValueError):
        run_grid(abs, [1, 2], threads=0)
