import threading
import time

import pytest

from certilab.utils.pool import TaskPool, run_ordered


def test_results_keep_task_order():
    def slow_square(x):
        time.sleep(0.01 * (5 - x))
        return x * x

    assert run_ordered(slow_square, range(5), jobs=4) == [0, 1, 4, 9, 16]


def test_serial_path_runs_in_caller_thread():
    caller = threading.get_ident()
    assert run_ordered(lambda _: threading.get_ident(), [1, 2, 3], jobs=1) == [caller] * 3


def test_jobs_floor_at_one():
    assert TaskPool(0).jobs == 1
    assert TaskPool(-3).map(str, [1, 2]) == ["1", "2"]


def test_empty_task_list():
    assert run_ordered(str, [], jobs=8) == []


def test_first_failure_propagates():
    def boom(x):
        if x == 2:
            raise ValueError("bad task")
        return x

    with pytest.raises(ValueError, match="bad task"):
        run_ordered(boom, range(4), jobs=3)
