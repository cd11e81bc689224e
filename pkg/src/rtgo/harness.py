"""Benchmark plumbing: dataset files, bounds, metrics, runs, reports.

File formats: the classic flowshop text layout (per instance, a header
line of five integers, a marker line, then machine-major time rows) and
the assignment layout (size, then the distance and flow matrices).  A
report is a CSV with one row per run plus a mean row per instance.

The quality metric is the relative percentage deviation over the
best-known value, RPD = 100 * (f - f*) / f*; the speed metric is t_r,
the wall-clock offset of a run's last improvement.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib.resources import files as _resource_files
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .engine import GroupConfig, Problem, RunTrace, make_problem, rtgo_run
from .perm import GENERATOR_NAME, derive_seed
from .problems import FspInstance, QapInstance, _symmetric_zero_diag, qap_symmetrize

# substream purpose tag for per-run seeds (1..3 belong to the engine)
TAG_RUN = 4


class DatasetParseError(ValueError):
    """Bad dataset file; pinpoints the offending line."""

    def __init__(self, path, line: int, reason: str):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{path}:{line}: {reason}")


@dataclass(frozen=True)
class InstanceRecord:
    """A named, loaded instance plus its registered best-known value.

    ``header`` keeps the five integers of a flowshop file's header
    (jobs, machines, seed, upper, lower) so files can be re-serialized
    token-identically; it is None for assignment instances.
    """

    name: str
    kind: str
    payload: Union[FspInstance, QapInstance]
    best_known: Optional[int] = None
    header: Optional[tuple[int, int, int, int, int]] = None


class BoundsRegistry:
    """Name -> best-known objective, with a provenance tag per entry."""

    def __init__(self, table: dict[str, int], provenance: dict[str, str]):
        self._table = dict(table)
        self._provenance = dict(provenance)

    _default = None

    @classmethod
    def default(cls) -> "BoundsRegistry":
        """The packaged registry (lazily loaded, shared)."""
        if cls._default is None:
            text = _resource_files("rtgo").joinpath("data/bounds.txt").read_text()
            table: dict[str, int] = {}
            provenance: dict[str, str] = {}
            for raw in text.splitlines():
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                name, value, source = line.split("\t")
                table[name] = int(value)
                provenance[name] = source
            cls._default = cls(table, provenance)
        return cls._default

    def get(self, name: str) -> Optional[int]:
        return self._table.get(name.lower())

    def provenance(self, name: str) -> Optional[str]:
        return self._provenance.get(name.lower())

    def __contains__(self, name: str) -> bool:
        return name.lower() in self._table

    def __len__(self) -> int:
        return len(self._table)

    def items(self):
        return sorted(self._table.items())


def _numeric_rows(path) -> list[tuple[int, list[int]]]:
    """(line number, integers) per data line; marker/blank lines skipped."""
    rows = []
    with open(path, "r") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if any(ch.isalpha() for ch in line):
                continue  # marker line ("processing times :" and friends)
            values = []
            for tok in line.split():
                try:
                    values.append(int(tok))
                except ValueError:
                    raise DatasetParseError(path, line_no, f"non-integer token {tok!r}") from None
            rows.append((line_no, values))
    return rows


def load_fsp_file(path, registry: Optional[BoundsRegistry] = None) -> list[InstanceRecord]:
    """Read every flowshop instance in a file.

    Layout per instance: a header of exactly five integers (jobs,
    machines, generator seed, upper bound, lower bound), then jobs x
    machines times in machine-major rows; marker lines anywhere are
    ignored.  Single-instance files are named by the file stem,
    multi-instance files get ``stem_01``, ``stem_02``, ...

    Raises:
        DatasetParseError: malformed content, with the line number.
    """
    registry = registry or BoundsRegistry.default()
    rows = _numeric_rows(path)
    instances = []
    i = 0
    while i < len(rows):
        line_no, header = rows[i]
        if len(header) != 5:
            raise DatasetParseError(
                path, line_no,
                f"expected a 5-integer header (jobs machines seed upper lower), got {len(header)} integers",
            )
        n, m, seed, upper, lower = header
        if n < 1 or m < 1:
            raise DatasetParseError(path, line_no, f"job and machine counts must be positive, got {n}, {m}")
        i += 1
        need = n * m
        flat: list[int] = []
        while len(flat) < need:
            if i >= len(rows):
                raise DatasetParseError(
                    path, line_no, f"incomplete time matrix: expected {need} values, file ended at {len(flat)}"
                )
            row_line, values = rows[i]
            if len(flat) + len(values) > need:
                raise DatasetParseError(
                    path, row_line, f"time matrix overflows {need} values; rows are not rectangular"
                )
            flat.extend(values)
            i += 1
        by_machine = np.array(flat, np.int64).reshape(m, n)
        inst = FspInstance.from_times(by_machine.T)
        instances.append((inst, (n, m, seed, upper, lower)))

    stem = Path(path).stem.lower()
    records = []
    for idx, (inst, header) in enumerate(instances):
        name = stem if len(instances) == 1 else f"{stem}_{idx + 1:02d}"
        records.append(
            InstanceRecord(
                name=name, kind="fsp", payload=inst, best_known=registry.get(name), header=header
            )
        )
    return records


def write_fsp_file(records: list[InstanceRecord], path) -> None:
    """Serialize flowshop records in the canonical layout (inverse of the loader)."""
    chunks = []
    for rec in records:
        inst = rec.payload
        header = rec.header or (inst.n, inst.m, 0, 0, 0)
        chunks.append("number of jobs, number of machines, initial seed, upper bound and lower bound :")
        chunks.append(" ".join(str(v) for v in header))
        chunks.append("processing times :")
        for k in range(inst.m):
            chunks.append(" ".join(str(inst.times[j, k]) for j in range(inst.n)))
    Path(path).write_text("\n".join(chunks) + "\n")


def load_qap_file(path, registry: Optional[BoundsRegistry] = None) -> InstanceRecord:
    """Read one assignment instance: size n, then the two n x n matrices.

    The first matrix is taken as distances, the second as flows.  When
    exactly one matrix is symmetric with a zero diagonal the instance is
    folded into its symmetric equivalent automatically.
    """
    registry = registry or BoundsRegistry.default()
    rows = _numeric_rows(path)
    flat: list[int] = []
    line_of_token: list[int] = []
    for line_no, values in rows:
        flat.extend(values)
        line_of_token.extend([line_no] * len(values))
    if not flat:
        raise DatasetParseError(path, 1, "empty file")
    n = flat[0]
    if n <= 0:
        raise DatasetParseError(path, line_of_token[0], f"instance size must be positive, got {n}")
    expected = 1 + 2 * n * n
    if len(flat) != expected:
        where = line_of_token[min(len(flat), expected) - 1]
        raise DatasetParseError(
            path, where, f"expected {expected} integers for size {n} (1 + 2*n*n), found {len(flat)}"
        )
    body = np.array(flat[1:], np.int64)
    dist = body[: n * n].reshape(n, n)
    flow = body[n * n :].reshape(n, n)
    inst = QapInstance.create(dist, flow)
    if not inst.is_symmetric and (
        _symmetric_zero_diag(inst.dist) or _symmetric_zero_diag(inst.flow)
    ):
        inst = qap_symmetrize(inst)
    name = Path(path).stem.lower()
    return InstanceRecord(name=name, kind="qap", payload=inst, best_known=registry.get(name))


def write_qap_file(record: InstanceRecord, path) -> None:
    """Serialize an assignment record (inverse of the loader).

    Uses the instance's current matrices; a symmetrized instance writes
    its folded matrices, so round-trips are stable from the first fold.
    """
    inst = record.payload
    lines = [str(inst.n), ""]
    for mat in (inst.dist, inst.flow):
        for i in range(inst.n):
            lines.append(" ".join(str(v) for v in mat[i]))
        lines.append("")
    Path(path).write_text("\n".join(lines))


def rpd(f: int, f_star: int) -> float:
    """Relative percentage deviation of ``f`` over the baseline ``f_star``."""
    if f_star == 0:
        raise ValueError("baseline objective is zero, deviation undefined")
    return 100.0 * (f - f_star) / f_star


@dataclass(frozen=True)
class RunResult:
    """One run's outcome inside a report."""

    run_index: int
    best_objective: int
    rpd: Optional[float]
    t_r: float


@dataclass
class RunReport:
    """All runs of one instance under one configuration."""

    instance: str
    n: int
    m: Optional[int]
    spec: str
    agents: int
    sessions: int
    seed: int
    runs: list[RunResult]
    generator: str = field(default=GENERATOR_NAME)

    @property
    def mean_rpd(self) -> Optional[float]:
        vals = [r.rpd for r in self.runs if r.rpd is not None]
        if len(vals) != len(self.runs) or not vals:
            return None
        return sum(vals) / len(vals)

    @property
    def mean_t_r(self) -> float:
        if not self.runs:
            return 0.0
        return sum(r.t_r for r in self.runs) / len(self.runs)

    @property
    def mean_best(self) -> float:
        if not self.runs:
            return 0.0
        return sum(r.best_objective for r in self.runs) / len(self.runs)

    @property
    def best_objective(self) -> Optional[int]:
        if not self.runs:
            return None
        return min(r.best_objective for r in self.runs)


def _one_run(rec: InstanceRecord, problem: Problem, cfg: GroupConfig, run_index: int,
             parallel_agents: bool) -> RunResult:
    run_cfg = GroupConfig(
        agents=cfg.agents,
        sessions=cfg.sessions,
        spec=cfg.spec,
        master_seed=derive_seed(cfg.master_seed, TAG_RUN, run_index),
    )
    trace: RunTrace = rtgo_run(run_cfg, problem, parallel=parallel_agents)
    best = trace.best_objective
    deviation = rpd(best, rec.best_known) if rec.best_known else None
    return RunResult(
        run_index=run_index,
        best_objective=best,
        rpd=deviation,
        t_r=trace.improvement_events[-1].elapsed,
    )


def run_benchmark(
    records: list[InstanceRecord],
    cfg: GroupConfig,
    runs: int,
    workers: int = 1,
    parallel_agents: bool = False,
) -> list[RunReport]:
    """Execute ``runs`` independent runs per instance and aggregate.

    Per-run master seeds are derived from (cfg.master_seed, run index),
    so a report is reproducible from its configuration alone.  With
    ``workers > 1`` the runs of an instance execute concurrently; the
    report is identical either way.
    """
    if runs < 1:
        raise ValueError(f"run count must be >= 1, got {runs}")
    reports = []
    for rec in records:
        problem = make_problem(rec.payload)
        indices = range(1, runs + 1)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(
                    lambda r: _one_run(rec, problem, cfg, r, parallel_agents), indices
                ))
        else:
            results = [_one_run(rec, problem, cfg, r, parallel_agents) for r in indices]
        results.sort(key=lambda r: r.run_index)
        inst = rec.payload
        reports.append(
            RunReport(
                instance=rec.name,
                n=inst.n,
                m=inst.m if rec.kind == "fsp" else None,
                spec=str(cfg.spec),
                agents=cfg.agents,
                sessions=cfg.sessions,
                seed=cfg.master_seed,
                runs=results,
            )
        )
    return reports


_CSV_HEADER = [
    "instance", "n", "m", "spec", "agents", "sessions", "seed",
    "run", "best_objective", "rpd", "t_r_seconds",
]


def write_report_csv(reports: list[RunReport], path) -> None:
    """One row per run, then a mean row per instance; RPD and t_r at 3 decimals."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_HEADER)
        for rep in reports:
            fixed = [rep.instance, rep.n, "" if rep.m is None else rep.m,
                     rep.spec, rep.agents, rep.sessions, rep.seed]
            for run in rep.runs:
                writer.writerow(fixed + [
                    run.run_index,
                    run.best_objective,
                    "" if run.rpd is None else f"{run.rpd:.3f}",
                    f"{run.t_r:.3f}",
                ])
            writer.writerow(fixed + [
                "mean",
                f"{rep.mean_best:.3f}",
                "" if rep.mean_rpd is None else f"{rep.mean_rpd:.3f}",
                f"{rep.mean_t_r:.3f}",
            ])


def read_report_csv(path) -> list[dict]:
    """Rows of a report CSV as dicts (the parse-back used in round-trip checks)."""
    with open(path, "r", newline="") as fh:
        return list(csv.DictReader(fh))
