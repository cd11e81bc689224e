"""Problem-specific local search.

Flowshop uses repeated best-position reinsertion: jobs are visited in a
random order and each is moved to the makespan-minimizing position of
the partial schedule, using the prefix/tail completion-time speedup so a
whole reinsertion scan costs one schedule evaluation.  The loop repeats
while a visit round strictly improved the incumbent.

Quadratic assignment uses a first-improvement sweep over all location
pairs in doubly-randomized order, applying every strictly improving
exchange inline, with the objective tracked incrementally from swap
deltas.  Full local search is exactly two such sweeps.

Evaluation counting: flowshop counts candidate positions scanned (n per
reinsertion, so n*n per visit round); assignment counts delta
evaluations (n*n per sweep).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .perm import RngStream, _rand_perm, _frozen
from .problems import (
    DimensionError,
    FspInstance,
    QapInstance,
    _check_perm_length,
    _fsp_makespan,
    _qap_delta_general,
    _qap_delta_symmetric,
    _qap_raw_objective,
    _scale_down,
)


@dataclass(frozen=True)
class LsOutcome:
    """Result of a local-search call: final state, objective, work counter."""

    state: np.ndarray
    objective: int
    evaluations: int


@njit(cache=True, nogil=True)
def _best_insert(times, x, k, done, head, tail, trial):
    """Move job ``k`` (label) to its best position in ``x``, in place.

    ``done``/``head``/``tail``/``trial`` are caller-provided scratch
    buffers of shapes (n-1,), (n, m), (n, m), (m,).  Returns the new
    makespan.  Ties go to the lowest position.  Costs O(n*m).
    """
    n, m = times.shape
    sigma = n - 1

    # schedule without job k, order preserved
    w = 0
    for i in range(n):
        if x[i] != k:
            done[w] = x[i]
            w += 1

    # head[t]: completion times after the first t remaining jobs (row 0 is zeros)
    for j in range(m):
        head[0, j] = 0
    for t in range(1, sigma + 1):
        job = done[t - 1] - 1
        prev = np.int64(0)
        for j in range(m):
            v = head[t - 1, j]
            if prev > v:
                v = prev
            v += times[job, j]
            head[t, j] = v
            prev = v

    # tail[t]: time from machine j to the end over remaining jobs t..sigma-1
    for j in range(m):
        tail[sigma, j] = 0
    for t in range(sigma - 1, -1, -1):
        job = done[t] - 1
        nxt = np.int64(0)
        for j in range(m - 1, -1, -1):
            v = tail[t + 1, j]
            if nxt > v:
                v = nxt
            v += times[job, j]
            tail[t, j] = v
            nxt = v

    # try k at every slot p (0 = front): completion of k per machine + tail bound
    kj = k - 1
    best_val = np.int64(-1)
    best_pos = 0
    for p in range(sigma + 1):
        prev = np.int64(0)
        worst = np.int64(0)
        for j in range(m):
            v = head[p, j]
            if prev > v:
                v = prev
            v += times[kj, j]
            trial[j] = v
            prev = v
            cand = v + tail[p, j]
            if cand > worst:
                worst = cand
        if best_val < 0 or worst < best_val:
            best_val = worst
            best_pos = p

    for i in range(best_pos):
        x[i] = done[i]
    x[best_pos] = k
    for i in range(best_pos, sigma):
        x[i + 1] = done[i]
    return best_val


@njit(cache=True, nogil=True)
def _fsp_ls(times, x, state):
    """Reinsertion descent on ``x`` in place; returns (makespan, evaluations).

    Evaluations count candidate positions scanned: n per reinsertion,
    n*n per visit round.
    """
    n, m = times.shape
    done = np.empty(max(n - 1, 1), np.int64)
    head = np.empty((n, m), np.int64)
    tail = np.empty((n, m), np.int64)
    trial = np.empty(m, np.int64)
    order = np.empty(n, np.int64)

    best = _fsp_makespan(times, x)
    evals = np.int64(0)
    improved = True
    while improved:
        improved = False
        _rand_perm(state, n, order)
        for t in range(n):
            cur = _best_insert(times, x, order[t], done, head, tail, trial)
            evals += n
            if cur < best:
                best = cur
                improved = True
    return best, evals


@njit(cache=True, nogil=True)
def _qap_pass(dist, flow, x, obj, state, symmetric, order_i, order_j):
    """One randomized first-improvement sweep; mutates ``x``, returns (obj, evals)."""
    n = x.size
    _rand_perm(state, n, order_i)
    _rand_perm(state, n, order_j)
    evals = np.int64(0)
    for a in range(n):
        i = order_i[a] - 1
        for b in range(n):
            j = order_j[b] - 1
            if i == j:
                evals += 1
                continue
            if symmetric:
                d = _qap_delta_symmetric(dist, flow, x, i, j)
            else:
                d = _qap_delta_general(dist, flow, x, i, j)
            evals += 1
            if d < 0:
                tmp = x[i]
                x[i] = x[j]
                x[j] = tmp
                obj += d
    return obj, evals


@njit(cache=True, nogil=True)
def _qap_ls(dist, flow, x, state, symmetric):
    """Two consecutive sweeps; mutates ``x``, returns (raw objective, evaluations)."""
    n = x.size
    order_i = np.empty(n, np.int64)
    order_j = np.empty(n, np.int64)
    obj = _qap_raw_objective(dist, flow, x)
    obj, e1 = _qap_pass(dist, flow, x, obj, state, symmetric, order_i, order_j)
    obj, e2 = _qap_pass(dist, flow, x, obj, state, symmetric, order_i, order_j)
    return obj, e1 + e2


def fsp_best_insert(inst: FspInstance, x, k: int) -> tuple[np.ndarray, int]:
    """Best reinsertion of job ``k`` into schedule ``x``.

    Args:
        inst: flowshop instance.
        x: job permutation of length ``inst.n``.
        k: job label to move, in ``[1, inst.n]``.

    Returns:
        ``(schedule, makespan)`` with ``k`` at its best position, ties
        resolved to the lowest position index.
    """
    arr = _check_perm_length(inst.n, x).copy()
    if not 1 <= k <= inst.n:
        raise ValueError(f"job label must be in [1, {inst.n}], got {k}")
    n, m = inst.n, inst.m
    done = np.empty(max(n - 1, 1), np.int64)
    head = np.empty((n, m), np.int64)
    tail = np.empty((n, m), np.int64)
    trial = np.empty(m, np.int64)
    val = _best_insert(inst.times, arr, k, done, head, tail, trial)
    return _frozen(arr), int(val)


def fsp_local_search(inst: FspInstance, x, rng: RngStream) -> LsOutcome:
    """Reinsertion descent from ``x`` until a full round yields no strict gain."""
    arr = _check_perm_length(inst.n, x).copy()
    obj, evals = _fsp_ls(inst.times, arr, rng.state)
    return LsOutcome(state=_frozen(arr), objective=int(obj), evaluations=int(evals))


def qap_neighborhood_pass(inst: QapInstance, x, rng: RngStream) -> LsOutcome:
    """One randomized exchange sweep from ``x`` (single pass, not the full search)."""
    arr = _check_perm_length(inst.n, x).copy()
    n = inst.n
    order_i = np.empty(n, np.int64)
    order_j = np.empty(n, np.int64)
    raw = _qap_raw_objective(inst.dist, inst.flow, arr)
    raw, evals = _qap_pass(
        inst.dist, inst.flow, arr, raw, rng.state, inst.is_symmetric, order_i, order_j
    )
    return LsOutcome(state=_frozen(arr), objective=_scale_down(inst, raw), evaluations=int(evals))


def qap_local_search(inst: QapInstance, x, rng: RngStream) -> LsOutcome:
    """Two consecutive exchange sweeps from ``x``."""
    arr = _check_perm_length(inst.n, x).copy()
    raw, evals = _qap_ls(inst.dist, inst.flow, arr, rng.state, inst.is_symmetric)
    return LsOutcome(state=_frozen(arr), objective=_scale_down(inst, raw), evaluations=int(evals))
