"""Round-table group optimizer for permutation problems.

Public surface re-exported here: permutation and RNG primitives,
problem definitions (flowshop scheduling, quadratic assignment),
local search, the idea-combination operator family, the group engine,
and the benchmark harness.
"""

from .perm import (
    GENERATOR_NAME,
    RngStream,
    derive_seed,
    insert_move,
    is_valid,
    random_permutation,
    swap_move,
)
from .problems import (
    CostScaleError,
    DimensionError,
    FspInstance,
    NotSymmetrizableError,
    QapInstance,
    SymmetryRequiredError,
    fsp_makespan,
    qap_delta_general,
    qap_delta_symmetric,
    qap_objective,
    qap_symmetrize,
)
from .local_search import (
    LsOutcome,
    fsp_best_insert,
    fsp_local_search,
    qap_local_search,
    qap_neighborhood_pass,
)
from .sbx import (
    DegenerateParentsError,
    PartialState,
    SbxSpec,
    SpecParseError,
    apply_base,
    apply_repair,
    apply_social,
    format_spec,
    n_icg,
    parse_spec,
    sbx_combine,
    sbx_macro,
)
from .engine import (
    AgentState,
    FspProblem,
    GroupConfig,
    ImprovementEvent,
    QapProblem,
    RunTrace,
    initialize_group,
    make_problem,
    rtgo_run,
    run_session,
)
from .harness import (
    BoundsRegistry,
    DatasetParseError,
    InstanceRecord,
    RunReport,
    load_fsp_file,
    load_qap_file,
    rpd,
    run_benchmark,
    write_fsp_file,
    write_qap_file,
    write_report_csv,
)

__version__ = "0.1.0"

__all__ = [
    "GENERATOR_NAME",
    "RngStream",
    "derive_seed",
    "insert_move",
    "is_valid",
    "random_permutation",
    "swap_move",
    "CostScaleError",
    "DimensionError",
    "FspInstance",
    "NotSymmetrizableError",
    "QapInstance",
    "SymmetryRequiredError",
    "fsp_makespan",
    "qap_delta_general",
    "qap_delta_symmetric",
    "qap_objective",
    "qap_symmetrize",
    "LsOutcome",
    "fsp_best_insert",
    "fsp_local_search",
    "qap_local_search",
    "qap_neighborhood_pass",
    "DegenerateParentsError",
    "PartialState",
    "SbxSpec",
    "SpecParseError",
    "apply_base",
    "apply_repair",
    "apply_social",
    "format_spec",
    "n_icg",
    "parse_spec",
    "sbx_combine",
    "sbx_macro",
    "AgentState",
    "FspProblem",
    "GroupConfig",
    "ImprovementEvent",
    "QapProblem",
    "RunTrace",
    "initialize_group",
    "make_problem",
    "rtgo_run",
    "run_session",
    "BoundsRegistry",
    "DatasetParseError",
    "InstanceRecord",
    "RunReport",
    "load_fsp_file",
    "load_qap_file",
    "rpd",
    "run_benchmark",
    "write_fsp_file",
    "write_qap_file",
    "write_report_csv",
    "__version__",
]
