"""The round-table session loop.

A group of N agents, each remembering exactly one base idea, meets for T
sessions.  Per session: agents take uniformly random seats around the
table; every seat passes a snapshot of its base idea to the next seat
clockwise (all snapshots are taken before anyone starts working); each
agent combines its own base idea with the received one, improves the
child with local search, and keeps the child iff it is no worse than
what it remembers.  The best base idea ever held by any agent is the
run's answer.

Determinism: every draw comes from a substream derived by hashing the
master seed with a purpose tag and indices: (master, 1, agent) for
initial ideas, (master, 2, session) for seating, (master, 3, agent,
session) for an agent's in-session work.  Agents therefore never share
stream state, and sequential and concurrent execution produce identical
traces.

Objectives are tracked in raw matrix units internally (exact integers)
and reported in the instance's scaled-down units.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from numba import njit

from .perm import RngStream, _derive3, _frozen, _next_u64, _rand_perm, _seed_state, derive_seed
from .problems import (
    FspInstance,
    QapInstance,
    _fsp_makespan,
    _qap_raw_objective,
    _scale_down,
    fsp_makespan,
    qap_objective,
)
from .local_search import LsOutcome, _fsp_ls, _qap_ls, fsp_local_search, qap_local_search
from .sbx import SbxSpec, _BASE_CODE, _REPAIR_CODE, _SOCIAL_CODE, _sbx_combine, n_icg, parse_spec

U64 = np.uint64

# substream purpose tags (cf. module docstring); 4 is claimed by the harness
TAG_INIT = 1
TAG_SEAT = 2
TAG_AGENT = 3


@dataclass
class AgentState:
    """One agent's memory: its base idea and that idea's exact objective."""

    agent_id: int
    base_idea: np.ndarray
    base_objective: int


@dataclass(frozen=True)
class GroupConfig:
    """Run parameters: group size, session count, operator spec, master seed."""

    agents: int
    sessions: int
    spec: Union[SbxSpec, str]
    master_seed: int

    def __post_init__(self):
        if isinstance(self.spec, str):
            object.__setattr__(self, "spec", parse_spec(self.spec))
        if not isinstance(self.spec, SbxSpec):
            raise ValueError(f"spec must be an SbxSpec or spec string, got {type(self.spec).__name__}")
        if self.agents < 2:
            raise ValueError(f"need at least 2 agents for clockwise sharing, got {self.agents}")
        if self.sessions < 0:
            raise ValueError(f"session count must be >= 0, got {self.sessions}")
        if not 0 <= self.master_seed < (1 << 64):
            raise ValueError(f"master seed must fit in 64 bits, got {self.master_seed}")


@dataclass(frozen=True)
class ImprovementEvent:
    """Group best changed: at which session, when on the wall clock, to what."""

    session: int
    elapsed: float
    objective: int


@dataclass
class RunTrace:
    """Outcome of one full run."""

    best_idea: np.ndarray
    best_objective: int
    improvement_events: list[ImprovementEvent]
    sessions_executed: int
    generator: str = field(default=RngStream.algorithm)

    def signature(self) -> tuple:
        """Everything replay-comparable: excludes wall-clock offsets."""
        return (
            tuple(int(v) for v in self.best_idea),
            self.best_objective,
            tuple((e.session, e.objective) for e in self.improvement_events),
            self.sessions_executed,
        )


@njit(cache=True, nogil=True)
def _fsp_agent_step(times, x_a, x_s, state, bcode, scode, rcode, trials, slots, used, cand):
    """Combine (optionally best-of-trials) then local search; child left in slots."""
    if trials <= 0:
        _sbx_combine(bcode, scode, rcode, x_a, x_s, slots, used, state)
    else:
        seeds = np.empty(trials, np.uint64)
        for t in range(trials):
            seeds[t] = _next_u64(state)
        best = np.int64(-1)
        for t in range(trials):
            tstate = _seed_state(seeds[t])
            _sbx_combine(bcode, scode, rcode, x_a, x_s, cand, used, tstate)
            fc = _fsp_makespan(times, cand)
            if best < 0 or fc < best:
                best = fc
                slots[:] = cand
    f, _ = _fsp_ls(times, slots, state)
    return f


@njit(cache=True, nogil=True)
def _qap_agent_step(dist, flow, sym, x_a, x_s, state, bcode, scode, rcode, trials, slots, used, cand):
    if trials <= 0:
        _sbx_combine(bcode, scode, rcode, x_a, x_s, slots, used, state)
    else:
        seeds = np.empty(trials, np.uint64)
        for t in range(trials):
            seeds[t] = _next_u64(state)
        best_set = False
        best = np.int64(0)
        for t in range(trials):
            tstate = _seed_state(seeds[t])
            _sbx_combine(bcode, scode, rcode, x_a, x_s, cand, used, tstate)
            fc = _qap_raw_objective(dist, flow, cand)
            if not best_set or fc < best:
                best_set = True
                best = fc
                slots[:] = cand
    f, _ = _qap_ls(dist, flow, slots, state, sym)
    return f


@njit(cache=True, nogil=True)
def _build_socials(bases, seats, socials):
    # seat h shares to seat h+1 (wrapping); snapshot copies, all before any work
    big_n = seats.size
    n = bases.shape[1]
    for h in range(big_n):
        giver = seats[h]
        recv = seats[(h + 1) % big_n]
        for p in range(n):
            socials[recv, p] = bases[giver, p]


@njit(cache=True, nogil=True)
def _fsp_session(times, bases, objs, socials, seats, master, session, bcode, scode, rcode, trials):
    big_n, n = bases.shape
    _build_socials(bases, seats, socials)
    slots = np.empty(n, np.int64)
    used = np.empty(n, np.bool_)
    cand = np.empty(n, np.int64)
    for a in range(big_n):
        state = _seed_state(_derive3(master, TAG_AGENT, a + 1, session))
        f = _fsp_agent_step(
            times, bases[a], socials[a], state, bcode, scode, rcode, trials, slots, used, cand
        )
        if objs[a] >= f:
            bases[a, :] = slots
            objs[a] = f


@njit(cache=True, nogil=True)
def _qap_session(dist, flow, sym, bases, objs, socials, seats, master, session, bcode, scode, rcode, trials):
    big_n, n = bases.shape
    _build_socials(bases, seats, socials)
    slots = np.empty(n, np.int64)
    used = np.empty(n, np.bool_)
    cand = np.empty(n, np.int64)
    for a in range(big_n):
        state = _seed_state(_derive3(master, TAG_AGENT, a + 1, session))
        f = _qap_agent_step(
            dist, flow, sym, bases[a], socials[a], state, bcode, scode, rcode, trials, slots, used, cand
        )
        if objs[a] >= f:
            bases[a, :] = slots
            objs[a] = f


class FspProblem:
    """Flowshop adapter: objective, local search, and fused session kernels."""

    kind = "fsp"

    def __init__(self, instance: FspInstance):
        self.instance = instance
        self.n = instance.n
        self.cost_scale = 1

    def objective(self, x) -> int:
        return fsp_makespan(self.instance, x)

    def local_search(self, x, rng: RngStream) -> LsOutcome:
        return fsp_local_search(self.instance, x, rng)

    def _raw_objective(self, x: np.ndarray) -> int:
        return int(_fsp_makespan(self.instance.times, x))

    def _run_session(self, bases, objs, socials, seats, master, session, codes, trials):
        bcode, scode, rcode = codes
        _fsp_session(
            self.instance.times, bases, objs, socials, seats, master, session,
            bcode, scode, rcode, trials,
        )

    def _step(self, x_a, x_s, state, codes, trials):
        bcode, scode, rcode = codes
        n = x_a.size
        slots = np.empty(n, np.int64)
        used = np.empty(n, np.bool_)
        cand = np.empty(n, np.int64)
        f = _fsp_agent_step(
            self.instance.times, x_a, x_s, state, bcode, scode, rcode, trials, slots, used, cand
        )
        return slots, int(f)


class QapProblem:
    """Assignment adapter; raw matrix units inside, scaled units at the surface."""

    kind = "qap"

    def __init__(self, instance: QapInstance):
        self.instance = instance
        self.n = instance.n
        self.cost_scale = instance.cost_scale

    def objective(self, x) -> int:
        return qap_objective(self.instance, x)

    def local_search(self, x, rng: RngStream) -> LsOutcome:
        return qap_local_search(self.instance, x, rng)

    def _raw_objective(self, x: np.ndarray) -> int:
        return int(_qap_raw_objective(self.instance.dist, self.instance.flow, x))

    def _run_session(self, bases, objs, socials, seats, master, session, codes, trials):
        bcode, scode, rcode = codes
        _qap_session(
            self.instance.dist, self.instance.flow, self.instance.is_symmetric,
            bases, objs, socials, seats, master, session, bcode, scode, rcode, trials,
        )

    def _step(self, x_a, x_s, state, codes, trials):
        bcode, scode, rcode = codes
        n = x_a.size
        slots = np.empty(n, np.int64)
        used = np.empty(n, np.bool_)
        cand = np.empty(n, np.int64)
        f = _qap_agent_step(
            self.instance.dist, self.instance.flow, self.instance.is_symmetric,
            x_a, x_s, state, bcode, scode, rcode, trials, slots, used, cand,
        )
        return slots, int(f)


Problem = Union[FspProblem, QapProblem]


def make_problem(instance) -> Problem:
    """Wrap an instance in its engine adapter."""
    if isinstance(instance, FspInstance):
        return FspProblem(instance)
    if isinstance(instance, QapInstance):
        return QapProblem(instance)
    raise TypeError(f"unsupported instance type {type(instance).__name__}")


def _spec_codes(spec: SbxSpec) -> tuple[int, int, int]:
    return _BASE_CODE[spec.base], _SOCIAL_CODE[spec.social], _REPAIR_CODE[spec.repair]


def _trials_for(spec: SbxSpec, n: int) -> int:
    # 0 means plain single combine (no best-of-trials wrapper)
    return n_icg(n) if spec.macro == "MP" else 0


def _initial_arrays(cfg: GroupConfig, problem: Problem) -> tuple[np.ndarray, np.ndarray]:
    n = problem.n
    bases = np.empty((cfg.agents, n), np.int64)
    objs = np.empty(cfg.agents, np.int64)
    for a in range(cfg.agents):
        state = _seed_state(U64(derive_seed(cfg.master_seed, TAG_INIT, a + 1)))
        _rand_perm(state, n, bases[a])
        objs[a] = problem._raw_objective(bases[a])
    return bases, objs


def _seats(cfg: GroupConfig, session_index: int, rng: Optional[RngStream]) -> np.ndarray:
    stream = rng if rng is not None else RngStream(derive_seed(cfg.master_seed, TAG_SEAT, session_index))
    seats = np.arange(cfg.agents, dtype=np.int64)
    stream.shuffle(seats)
    return seats


def initialize_group(cfg: GroupConfig, problem: Problem) -> list[AgentState]:
    """N agents with independent uniformly random ideas; no local search yet."""
    bases, objs = _initial_arrays(cfg, problem)
    return [
        AgentState(
            agent_id=a + 1,
            base_idea=_frozen(bases[a].copy()),
            base_objective=_scale(problem, objs[a]),
        )
        for a in range(cfg.agents)
    ]


def _scale(problem: Problem, raw: int) -> int:
    if problem.kind == "qap":
        return _scale_down(problem.instance, int(raw))
    return int(raw)


def run_session(
    agents: list[AgentState],
    cfg: GroupConfig,
    problem: Problem,
    session_index: int,
    rng: Optional[RngStream] = None,
) -> list[AgentState]:
    """One full session; returns the updated agents as a new list.

    Sessions are numbered 1..T; 0 denotes initialization.  A loop over
    ``run_session(agents, cfg, problem, s)`` for ``s`` in ``1..cfg.sessions``
    reproduces :func:`rtgo_run` exactly.  Other indices still define a
    deterministic session, just one seeded from a different substream.

    ``rng``, when given, supplies the seating shuffle; otherwise seating
    draws from the (master seed, session index) substream.  Agent work
    always draws from per-(agent, session) substreams.
    """
    if len(agents) != cfg.agents:
        raise ValueError(f"expected {cfg.agents} agents, got {len(agents)}")
    n = problem.n
    bases = np.empty((cfg.agents, n), np.int64)
    objs = np.empty(cfg.agents, np.int64)
    for i, ag in enumerate(agents):
        if np.asarray(ag.base_idea).size != n:
            raise ValueError(f"agent {ag.agent_id} idea length != instance size {n}")
        bases[i] = ag.base_idea
        objs[i] = ag.base_objective * problem.cost_scale
    socials = np.empty_like(bases)
    seats = _seats(cfg, session_index, rng)
    problem._run_session(
        bases, objs, socials, seats, U64(cfg.master_seed), session_index,
        _spec_codes(cfg.spec), _trials_for(cfg.spec, n),
    )
    return [
        AgentState(
            agent_id=i + 1,
            base_idea=_frozen(bases[i].copy()),
            base_objective=_scale(problem, objs[i]),
        )
        for i in range(cfg.agents)
    ]


def _quantized(t0: float) -> float:
    # monotonic clock, 1 ms resolution
    return round(time.perf_counter() - t0, 3)


def rtgo_run(cfg: GroupConfig, problem: Problem, parallel: bool = False) -> RunTrace:
    """Full run: initialization plus T sessions, tracking the group best.

    ``parallel=True`` evaluates agents concurrently on threads; the
    result is identical to the sequential path by the substream scheme.
    """
    t0 = time.perf_counter()
    codes = _spec_codes(cfg.spec)
    trials = _trials_for(cfg.spec, problem.n)
    master = U64(cfg.master_seed)

    bases, objs = _initial_arrays(cfg, problem)
    best_at = int(objs.argmin())
    best_raw = int(objs[best_at])
    best_idea = bases[best_at].copy()
    events = [ImprovementEvent(session=0, elapsed=_quantized(t0), objective=_scale(problem, best_raw))]

    socials = np.empty_like(bases)
    executor = None
    try:
        if parallel:
            executor = ThreadPoolExecutor(max_workers=min(cfg.agents, 4))
        for session in range(1, cfg.sessions + 1):
            seats = _seats(cfg, session, None)
            if executor is not None:
                _build_socials(bases, seats, socials)
                futures = [
                    executor.submit(
                        problem._step,
                        bases[a],
                        socials[a],
                        _seed_state(U64(_derive3(master, TAG_AGENT, a + 1, session))),
                        codes,
                        trials,
                    )
                    for a in range(cfg.agents)
                ]
                for a, fut in enumerate(futures):
                    child, f = fut.result()
                    if objs[a] >= f:
                        bases[a] = child
                        objs[a] = f
            else:
                problem._run_session(bases, objs, socials, seats, master, session, codes, trials)
            at = int(objs.argmin())
            if objs[at] < best_raw:
                best_raw = int(objs[at])
                best_idea = bases[at].copy()
                events.append(
                    ImprovementEvent(session=session, elapsed=_quantized(t0), objective=_scale(problem, best_raw))
                )
    finally:
        if executor is not None:
            executor.shutdown(wait=False)

    return RunTrace(
        best_idea=_frozen(best_idea),
        best_objective=_scale(problem, best_raw),
        improvement_events=events,
        sessions_executed=cfg.sessions,
    )
