"""Problem definitions: flowshop scheduling and quadratic assignment.

Flowshop: ``n`` jobs cross ``m`` machines in machine order 1..m, all jobs
in the same job order (a permutation), no preemption.  The objective is
the makespan, i.e. the completion time of the last job on the last
machine, minimized.

Quadratic assignment: place ``n`` facilities on ``n`` locations.  With
``x[i]`` the facility at location ``i``, the cost is the sum over every
ordered location pair of distance times the flow between the facilities
placed there, minimized.

Design choices:
    * exact 64-bit integer arithmetic throughout, no floats;
    * instances are immutable, their matrices are marked read-only;
    * a symmetrized QAP instance keeps raw matrix units internally and
      records ``cost_scale`` so reported objectives stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit


class DimensionError(ValueError):
    """A permutation's length does not match the instance size."""


class SymmetryRequiredError(ValueError):
    """A symmetric-only operation was given a non-symmetric instance."""


class NotSymmetrizableError(ValueError):
    """Neither matrix qualifies as the symmetric zero-diagonal side."""


class CostScaleError(RuntimeError):
    """A raw objective was not divisible by the instance cost scale."""


def _as_matrix(m, name: str) -> np.ndarray:
    arr = np.array(m, np.int64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={arr.ndim}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FspInstance:
    """Flowshop instance: ``times[j, k]`` is job ``j+1``'s time on machine ``k+1``."""

    n: int
    m: int
    times: np.ndarray

    @classmethod
    def from_times(cls, times) -> "FspInstance":
        arr = _as_matrix(times, "times")
        n, m = arr.shape
        if n < 1 or m < 1:
            raise ValueError(f"need at least 1 job and 1 machine, got {n}x{m}")
        if (np.asarray(arr) < 0).any():
            raise ValueError("processing times must be non-negative")
        return cls(n=n, m=m, times=arr)


def _symmetric_zero_diag(mat: np.ndarray) -> bool:
    return bool((mat == mat.T).all() and (np.diag(mat) == 0).all())


@dataclass(frozen=True, eq=False)
class QapInstance:
    """Quadratic assignment instance over location distances and facility flows.

    ``cost_scale`` divides every raw matrix-unit cost down to reported
    units; it is 1 for instances built directly and 2 for the output of
    :func:`qap_symmetrize`.
    """

    n: int
    dist: np.ndarray
    flow: np.ndarray
    is_symmetric: bool = field(default=False)
    cost_scale: int = field(default=1)

    @classmethod
    def create(cls, dist, flow) -> "QapInstance":
        d = _as_matrix(dist, "dist")
        w = _as_matrix(flow, "flow")
        n = d.shape[0]
        if d.shape != (n, n) or w.shape != (n, n):
            raise ValueError(
                f"dist and flow must be square with equal size, got {d.shape} and {w.shape}"
            )
        if n < 1:
            raise ValueError("instance size must be >= 1")
        sym = _symmetric_zero_diag(d) and _symmetric_zero_diag(w)
        return cls(n=n, dist=d, flow=w, is_symmetric=sym, cost_scale=1)


@njit(cache=True, nogil=True)
def _fsp_makespan(times, x):
    # single rolling row of machine completion times, O(m) memory
    n, m = times.shape
    c = np.zeros(m, np.int64)
    for i in range(n):
        job = x[i] - 1
        prev = np.int64(0)
        for k in range(m):
            t = c[k] if c[k] > prev else prev
            t += times[job, k]
            c[k] = t
            prev = t
    return c[m - 1]


@njit(cache=True, nogil=True)
def _qap_raw_objective(dist, flow, x):
    n = dist.shape[0]
    total = np.int64(0)
    for i in range(n):
        fi = x[i] - 1
        for j in range(n):
            total += dist[i, j] * flow[fi, x[j] - 1]
    return total


@njit(cache=True, nogil=True)
def _qap_delta_general(dist, flow, x, i, j):
    # raw-unit objective change of exchanging the facilities at locations i, j
    xi = x[i] - 1
    xj = x[j] - 1
    d = (dist[i, i] - dist[j, j]) * (flow[xj, xj] - flow[xi, xi])
    d += (dist[i, j] - dist[j, i]) * (flow[xj, xi] - flow[xi, xj])
    for k in range(x.size):
        if k == i or k == j:
            continue
        xk = x[k] - 1
        d += (dist[k, i] - dist[k, j]) * (flow[xk, xj] - flow[xk, xi])
        d += (dist[i, k] - dist[j, k]) * (flow[xj, xk] - flow[xi, xk])
    return d


@njit(cache=True, nogil=True)
def _qap_delta_symmetric(dist, flow, x, i, j):
    # valid only when both matrices are symmetric with zero diagonals
    xi = x[i] - 1
    xj = x[j] - 1
    s = np.int64(0)
    for k in range(x.size):
        if k == i or k == j:
            continue
        xk = x[k] - 1
        s += (dist[i, k] - dist[j, k]) * (flow[xj, xk] - flow[xi, xk])
    return 2 * s


def _check_perm_length(n: int, x: np.ndarray) -> np.ndarray:
    arr = np.asarray(x, np.int64)
    if arr.ndim != 1 or arr.size != n:
        raise DimensionError(f"permutation of length {n} required, got shape {arr.shape}")
    return arr


def fsp_makespan(inst: FspInstance, x) -> int:
    """Makespan of schedule ``x`` on ``inst``.

    Args:
        inst: flowshop instance.
        x: job permutation, length ``inst.n``.

    Returns:
        Completion time of the last job on the last machine.
    """
    arr = _check_perm_length(inst.n, x)
    return int(_fsp_makespan(inst.times, arr))


def _scale_down(inst: QapInstance, raw: int) -> int:
    q, r = divmod(int(raw), inst.cost_scale)
    if r:
        raise CostScaleError(
            f"raw objective {raw} is not divisible by cost scale {inst.cost_scale}"
        )
    return q


def qap_objective(inst: QapInstance, x) -> int:
    """Assignment cost of ``x`` on ``inst``, in reported (scaled-down) units."""
    arr = _check_perm_length(inst.n, x)
    return _scale_down(inst, _qap_raw_objective(inst.dist, inst.flow, arr))


def _check_location_pair(n: int, i: int, j: int) -> None:
    for name, v in (("i", i), ("j", j)):
        if not 1 <= v <= n:
            raise IndexError(f"location {name} must be in [1, {n}], got {v}")


def qap_delta_general(inst: QapInstance, x, i: int, j: int) -> int:
    """Raw-unit cost change of swapping the facilities at locations ``i``, ``j``.

    Exact for arbitrary matrices.  Locations are 1-based.  The result is
    in raw matrix units (not divided by ``cost_scale``), matching the
    incremental bookkeeping used by local search.
    """
    arr = _check_perm_length(inst.n, x)
    _check_location_pair(inst.n, i, j)
    return int(_qap_delta_general(inst.dist, inst.flow, arr, i - 1, j - 1))


def qap_delta_symmetric(inst: QapInstance, x, i: int, j: int) -> int:
    """Raw-unit swap delta via the short symmetric form.

    Requires ``inst.is_symmetric``; raises :class:`SymmetryRequiredError`
    otherwise.
    """
    if not inst.is_symmetric:
        raise SymmetryRequiredError("instance is not symmetric with zero diagonals")
    arr = _check_perm_length(inst.n, x)
    _check_location_pair(inst.n, i, j)
    return int(_qap_delta_symmetric(inst.dist, inst.flow, arr, i - 1, j - 1))


def qap_symmetrize(inst: QapInstance) -> QapInstance:
    """Fold a one-sided instance into an equivalent symmetric one.

    When exactly one matrix is symmetric with a zero diagonal, the other
    is replaced by ``M + M.T`` (diagonal zeroed) and ``cost_scale``
    doubles, so every permutation keeps its exact reported objective.
    Already-symmetric instances are returned unchanged.

    Raises:
        NotSymmetrizableError: neither matrix qualifies.
    """
    if inst.is_symmetric:
        return inst
    d_ok = _symmetric_zero_diag(inst.dist)
    w_ok = _symmetric_zero_diag(inst.flow)
    if not d_ok and not w_ok:
        raise NotSymmetrizableError("neither matrix is symmetric with a zero diagonal")

    def fold(mat: np.ndarray) -> np.ndarray:
        out = mat + mat.T
        np.fill_diagonal(out, 0)
        out.setflags(write=False)
        return out

    if d_ok:
        dist, flow = inst.dist, fold(inst.flow)
    else:
        dist, flow = fold(inst.dist), inst.flow
    return QapInstance(
        n=inst.n,
        dist=dist,
        flow=flow,
        is_symmetric=True,
        cost_scale=inst.cost_scale * 2,
    )
