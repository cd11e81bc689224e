"""Objective functions, swap deltas, and instance validation.

Independent oracles: a full-table makespan recurrence and a plain
double-loop assignment cost, both in pure Python, checked against the
jitted implementations on hand examples and fuzzed instances.
"""

from __future__ import annotations

import numpy as np
import pytest

from rtgo import (
    CostScaleError,
    DimensionError,
    FspInstance,
    NotSymmetrizableError,
    QapInstance,
    RngStream,
    SymmetryRequiredError,
    fsp_makespan,
    qap_delta_general,
    qap_delta_symmetric,
    qap_objective,
    qap_symmetrize,
    random_permutation,
)


from oracles import loop_qap as _loop_qap
from oracles import table_makespan as _table_makespan


def _random_qap(rng: np.random.Generator, n: int, symmetric: bool) -> QapInstance:
    def mat():
        a = rng.integers(0, 50, (n, n)).astype(np.int64)
        if symmetric:
            a = a + a.T
            np.fill_diagonal(a, 0)
        return a

    return QapInstance.create(mat(), mat())


def test_makespan_hand_examples():
    assert fsp_makespan(FspInstance.from_times([[5]]), [1]) == 5
    inst = FspInstance.from_times([[1, 2], [3, 1]])
    assert fsp_makespan(inst, (1, 2)) == 5
    assert fsp_makespan(inst, (2, 1)) == 6
    # single machine: makespan is just the sum of times
    one = FspInstance.from_times([[4], [2], [7]])
    assert fsp_makespan(one, (3, 1, 2)) == 13


def test_makespan_matches_table_recurrence():
    rng = np.random.default_rng(11)
    stream = RngStream(11)
    for _ in range(150):
        n = int(rng.integers(1, 15))
        m = int(rng.integers(1, 8))
        times = rng.integers(0, 100, (n, m)).astype(np.int64)
        inst = FspInstance.from_times(times)
        x = random_permutation(n, stream)
        assert fsp_makespan(inst, x) == _table_makespan(times, x)


def test_fsp_instance_validation():
    with pytest.raises(ValueError):
        FspInstance.from_times([[-1]])
    with pytest.raises(ValueError):
        FspInstance.from_times([1, 2, 3])
    with pytest.raises(ValueError):
        FspInstance.from_times(np.empty((0, 3), np.int64))
    inst = FspInstance.from_times([[1, 2], [3, 4]])
    assert (inst.n, inst.m) == (2, 2)
    assert not inst.times.flags.writeable


def test_fsp_instance_copies_input():
    src = np.array([[1, 2], [3, 4]], np.int64)
    inst = FspInstance.from_times(src)
    src[0, 0] = 99
    assert inst.times[0, 0] == 1


def test_fsp_dimension_errors():
    inst = FspInstance.from_times([[1, 2], [3, 1]])
    with pytest.raises(DimensionError):
        fsp_makespan(inst, [1])
    with pytest.raises(DimensionError):
        fsp_makespan(inst, [1, 2, 3])


def test_qap_hand_examples():
    assert qap_objective(QapInstance.create([[3]], [[4]]), [1]) == 12
    D = [[0, 1, 2], [1, 0, 3], [2, 3, 0]]
    W = [[0, 4, 5], [4, 0, 6], [5, 6, 0]]
    inst = QapInstance.create(D, W)
    assert inst.is_symmetric
    assert qap_objective(inst, (1, 2, 3)) == 64
    assert qap_objective(inst, (2, 1, 3)) == 62
    assert qap_delta_general(inst, (1, 2, 3), 1, 2) == -2
    assert qap_delta_symmetric(inst, (1, 2, 3), 1, 2) == -2


def test_qap_instance_validation():
    with pytest.raises(ValueError):
        QapInstance.create([[0, 1]], [[0, 1]])
    with pytest.raises(ValueError):
        QapInstance.create([[0, 1], [1, 0]], [[0]])
    inst = QapInstance.create([[0, 1], [2, 0]], [[0, 3], [4, 0]])
    assert not inst.is_symmetric
    assert inst.cost_scale == 1
    assert not inst.dist.flags.writeable


def test_qap_dimension_and_location_errors():
    inst = QapInstance.create([[0, 1], [1, 0]], [[0, 2], [2, 0]])
    with pytest.raises(DimensionError):
        qap_objective(inst, [1, 2, 3])
    with pytest.raises(IndexError):
        qap_delta_general(inst, [1, 2], 0, 1)
    with pytest.raises(IndexError):
        qap_delta_general(inst, [1, 2], 1, 3)
    with pytest.raises(SymmetryRequiredError):
        qap_delta_symmetric(QapInstance.create([[0, 1], [2, 0]], [[0, 3], [4, 0]]), [1, 2], 1, 2)


def test_delta_general_matches_recompute():
    # every swap on mixed symmetric/asymmetric fuzz instances, raw units
    rng = np.random.default_rng(23)
    stream = RngStream(23)
    for trial in range(60):
        n = int(rng.integers(2, 10))
        inst = _random_qap(rng, n, symmetric=bool(trial % 2))
        x = random_permutation(n, stream)
        base = _loop_qap(inst.dist, inst.flow, x)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                y = np.asarray(x).copy()
                y[i - 1], y[j - 1] = y[j - 1], y[i - 1]
                expect = _loop_qap(inst.dist, inst.flow, y) - base
                assert qap_delta_general(inst, x, i, j) == expect


def test_delta_symmetric_matches_general_on_symmetric():
    rng = np.random.default_rng(31)
    stream = RngStream(31)
    for _ in range(40):
        n = int(rng.integers(2, 10))
        inst = _random_qap(rng, n, symmetric=True)
        x = random_permutation(n, stream)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assert qap_delta_symmetric(inst, x, i, j) == qap_delta_general(inst, x, i, j)


def test_symmetrize_preserves_objective():
    rng = np.random.default_rng(47)
    stream = RngStream(47)
    for trial in range(50):
        n = int(rng.integers(2, 9))
        sym = rng.integers(0, 50, (n, n)).astype(np.int64)
        sym = sym + sym.T
        np.fill_diagonal(sym, 0)
        raw = rng.integers(0, 50, (n, n)).astype(np.int64)  # generic side
        if trial % 2:
            inst = QapInstance.create(sym, raw)
        else:
            inst = QapInstance.create(raw, sym)
        folded = qap_symmetrize(inst)
        assert folded.is_symmetric
        assert folded.cost_scale == 2
        for _ in range(4):
            x = random_permutation(n, stream)
            assert qap_objective(folded, x) == qap_objective(inst, x)


def test_symmetrize_edge_cases():
    sym = QapInstance.create([[0, 1], [1, 0]], [[0, 2], [2, 0]])
    assert qap_symmetrize(sym) is sym
    with pytest.raises(NotSymmetrizableError):
        qap_symmetrize(QapInstance.create([[0, 1], [2, 0]], [[0, 3], [4, 0]]))


def test_cost_scale_guard():
    # handcrafted inconsistent scale: raw objective 12 against scale 5
    inst = QapInstance(
        n=1,
        dist=np.array([[3]], np.int64),
        flow=np.array([[4]], np.int64),
        is_symmetric=False,
        cost_scale=5,
    )
    with pytest.raises(CostScaleError):
        qap_objective(inst, [1])
