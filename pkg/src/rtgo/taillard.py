"""Deterministic regeneration of the classic flowshop benchmark instances.

The instances are defined by a tiny portable pseudo-random generator (a
minimal-standard linear congruential generator evaluated with Schrage's
decomposition) and one published time seed per instance; processing
times are uniform on [1, 99], produced machine by machine.  Given the
right seed, the generated matrix is bit-for-bit the distributed one,
which lets the benchmark data ship as code instead of downloads.

``write_instance_file`` emits the customary distribution layout: a
header marker, one line with jobs/machines/seed/upper/lower values, a
"processing times" marker, then one machine-major row per machine.
The upper bound written is the registered best-known value; the lower
bound is the classic single-machine relaxation computed from the data.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_M = 2147483647
_A = 16807
_Q = 127773
_R = 2836

# published time seeds, instance name -> (jobs, machines, seed)
INSTANCES: dict[str, tuple[int, int, int]] = {
    "tai01": (20, 5, 873654221),
    "tai02": (20, 5, 379008056),
    "tai03": (20, 5, 1866992158),
    "tai04": (20, 5, 216771124),
    "tai05": (20, 5, 495070989),
    "tai06": (20, 5, 402959317),
    "tai07": (20, 5, 1369363414),
    "tai08": (20, 5, 2021925980),
    "tai09": (20, 5, 573109518),
    "tai10": (20, 5, 88325120),
}


def _next(seed: int) -> int:
    k = seed // _Q
    seed = _A * (seed - k * _Q) - _R * k
    if seed < 0:
        seed += _M
    return seed


def _unif(seed: int, low: int, high: int) -> tuple[int, int]:
    seed = _next(seed)
    return seed, low + int(seed / _M * (high - low + 1))


def generate_times(n: int, m: int, time_seed: int) -> np.ndarray:
    """Job-major n x m processing-time matrix for one instance."""
    if not 0 < time_seed < _M:
        raise ValueError(f"time seed must be in (0, {_M}), got {time_seed}")
    by_machine = np.empty((m, n), np.int64)
    seed = time_seed
    for i in range(m):
        for j in range(n):
            seed, v = _unif(seed, 1, 99)
            by_machine[i, j] = v
    return by_machine.T.copy()


def lower_bound(times: np.ndarray) -> int:
    """Single-machine relaxation: each machine with its best head and tail."""
    n, m = times.shape
    best = int(times.sum(axis=1).max())  # busiest job
    heads = np.zeros(n, np.int64)
    for k in range(m):
        tails = times[:, k + 1 :].sum(axis=1)
        load = int(times[:, k].sum())
        cand = int(heads.min()) + load + int(tails.min())
        if cand > best:
            best = cand
        heads += times[:, k]
    return best


def write_instance_file(path, name: str, upper_bound: int) -> None:
    """Write one instance in the customary distribution layout."""
    try:
        n, m, seed = INSTANCES[name]
    except KeyError:
        raise KeyError(f"unknown instance name {name!r}") from None
    times = generate_times(n, m, seed)
    lb = lower_bound(times)
    lines = [
        "number of jobs, number of machines, initial seed, upper bound and lower bound :",
        f"{n:11d}{m:11d}{seed:11d}{upper_bound:11d}{lb:11d}",
        "processing times :",
    ]
    for k in range(m):
        lines.append(" ".join(f"{times[j, k]:3d}" for j in range(n)))
    Path(path).write_text("\n".join(lines) + "\n")
