from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

import rtgo

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile every jitted path once so timed tests measure work, not JIT."""
    inst = rtgo.FspInstance.from_times(np.array([[2, 1], [1, 3], [4, 2]], np.int64))
    cfg = rtgo.GroupConfig(agents=3, sessions=3, spec="MP(CA1P/O/-)", master_seed=1)
    rtgo.rtgo_run(cfg, rtgo.make_problem(inst))
    rtgo.rtgo_run(rtgo.GroupConfig(agents=3, sessions=3, spec="1P/P/R", master_seed=1),
                  rtgo.make_problem(inst))

    D = np.array([[0, 2, 3], [2, 0, 1], [3, 1, 0]], np.int64)
    W = np.array([[0, 5, 4], [5, 0, 2], [4, 2, 0]], np.int64)
    q = rtgo.QapInstance.create(D, W)
    rtgo.rtgo_run(rtgo.GroupConfig(agents=3, sessions=3, spec="MP(U/P/PM)", master_seed=1),
                  rtgo.make_problem(q))
    asym = rtgo.QapInstance.create(np.array([[0, 1], [2, 0]], np.int64),
                                   np.array([[0, 3], [4, 0]], np.int64))
    rtgo.rtgo_run(rtgo.GroupConfig(agents=2, sessions=2, spec="MP(U/P/PM)", master_seed=1),
                  rtgo.make_problem(asym))
    return True


@pytest.fixture(scope="session")
def fsp_data_dir():
    return DATA_DIR / "fsp"


@pytest.fixture(scope="session")
def qap_data_dir():
    return DATA_DIR / "qap"
