"""Order-preserving map over a process pool; results never depend on ``jobs``."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def _call(payload):
    fn, args = payload
    return fn(*args)


def parallel_map(fn: Callable, arg_tuples: Sequence[tuple], *, jobs: int = 1) -> list:
    """[fn(*args) for args in arg_tuples], optionally spread over ``jobs`` processes."""
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1 or len(arg_tuples) <= 1:
        return [fn(*args) for args in arg_tuples]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_call, [(fn, args) for args in arg_tuples]))
