"""Socially biased idea combination.

A combination operator builds a child state from an agent's own base
idea ``x_A`` and the idea ``x_S`` shared by a neighbor, in three stages:

    base    marks positions copied verbatim from ``x_A``;
    social  fills some holes with unused labels of ``x_S``;
    repair  completes whatever remains.

Operators are named by spec strings such as ``"U/P/PM"`` or the
best-of-several macro form ``"MP(CA1P/O/-)"``.  The repair slot may be
``-`` (none) only when the social policy alone guarantees a complete
state, which order-based filling does and position-based filling does
not.

Draw discipline (fixed for replayability): 1P draws cut then side coin;
2P draws two distinct cuts (second via skip-resampling) then the
inside/outside coin; U draws one coin per position, heads copies; CA1P
draws cut within the non-common window then side coin; random repair
draws one index per hole into the ascending unused labels.  The macro
form pre-draws one 64-bit seed per trial, then runs each trial on a
fresh stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numba import njit

from .perm import RngStream, _below, _coin, _frozen, _next_u64, _seed_state
from .problems import DimensionError

BASE_POLICIES = ("1P", "2P", "U", "CA1P")
SOCIAL_POLICIES = ("P", "O")
REPAIR_POLICIES = ("R", "PM")

_BASE_CODE = {"1P": 0, "2P": 1, "U": 2, "CA1P": 3}
_SOCIAL_CODE = {"P": 0, "O": 1}
_REPAIR_CODE = {"R": 0, "PM": 1, None: 2}


class SpecParseError(ValueError):
    """Malformed operator spec; carries the offending character position."""

    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"at position {position}: {reason}")


class DegenerateParentsError(ValueError):
    """Common-avoiding base policy given two identical parents."""


@dataclass(frozen=True)
class SbxSpec:
    """Parsed operator spec: base/social/repair policies plus optional macro."""

    base: str
    social: str
    repair: Optional[str]
    macro: Optional[str] = None

    def __post_init__(self):
        if self.base not in BASE_POLICIES:
            raise ValueError(f"unknown base policy {self.base!r}")
        if self.social not in SOCIAL_POLICIES:
            raise ValueError(f"unknown social policy {self.social!r}")
        if self.repair is not None and self.repair not in REPAIR_POLICIES:
            raise ValueError(f"unknown repair policy {self.repair!r}")
        if self.repair is None and self.social != "O":
            raise ValueError(
                "repair '-' requires the order-based social policy; "
                f"{self.social!r} may leave unoccupied positions"
            )
        if self.macro not in (None, "MP"):
            raise ValueError(f"unknown macro tag {self.macro!r}")

    def __str__(self) -> str:
        return format_spec(self)


@dataclass(frozen=True)
class PartialState:
    """Partially built child: ``slots[i] == 0`` means position ``i+1`` is open.

    ``used[v-1]`` flags label ``v`` as already placed.  The number of
    used labels always equals the number of occupied slots.
    """

    slots: np.ndarray
    used: np.ndarray

    @property
    def n(self) -> int:
        return self.slots.size

    @property
    def occupied_count(self) -> int:
        return int(np.count_nonzero(self.slots))

    @property
    def is_complete(self) -> bool:
        return bool((self.slots != 0).all())

    def used_labels(self) -> set[int]:
        return {i + 1 for i in range(self.used.size) if self.used[i]}


def _new_partial(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros(n, np.int64), np.zeros(n, np.bool_)


def _copy_partial(partial: PartialState) -> tuple[np.ndarray, np.ndarray]:
    return partial.slots.astype(np.int64), partial.used.astype(np.bool_)


def _check_partial(partial: PartialState) -> None:
    slots = np.asarray(partial.slots)
    used = np.asarray(partial.used)
    n = slots.size
    if used.size != n:
        raise ValueError("slots and used must have equal length")
    occupied = slots[slots != 0]
    if np.unique(occupied).size != occupied.size:
        raise ValueError("a label appears in two slots")
    if occupied.size and (occupied.min() < 1 or occupied.max() > n):
        raise ValueError("slot labels out of range")
    if int(used.sum()) != occupied.size or not all(used[v - 1] for v in occupied):
        raise ValueError("used flags inconsistent with occupied slots")


@njit(cache=True, nogil=True)
def _mark_side(x_a, slots, used, cut, side):
    # side 0: copy positions [0, cut); side 1: copy [cut, n)
    n = x_a.size
    lo = 0 if side == 0 else cut
    hi = cut if side == 0 else n
    for p in range(lo, hi):
        v = x_a[p]
        slots[p] = v
        used[v - 1] = True


@njit(cache=True, nogil=True)
def _base_1p(x_a, slots, used, state):
    n = x_a.size
    cut = 1 + _below(state, n - 1)
    side = _coin(state)
    _mark_side(x_a, slots, used, cut, side)


@njit(cache=True, nogil=True)
def _base_2p(x_a, slots, used, state):
    n = x_a.size
    if n < 3:
        # only one cut-point exists, no distinct pair: degrade to one-point
        _base_1p(x_a, slots, used, state)
        return
    c1 = 1 + _below(state, n - 1)
    c2 = 1 + _below(state, n - 2)
    if c2 >= c1:
        c2 += 1
    if c1 > c2:
        c1, c2 = c2, c1
    outside = _coin(state)
    if outside == 0:
        for p in range(c1, c2):
            v = x_a[p]
            slots[p] = v
            used[v - 1] = True
    else:
        for p in range(c1):
            v = x_a[p]
            slots[p] = v
            used[v - 1] = True
        for p in range(c2, n):
            v = x_a[p]
            slots[p] = v
            used[v - 1] = True


@njit(cache=True, nogil=True)
def _base_u(x_a, slots, used, state):
    # one coin per position, heads (1) copies
    for p in range(x_a.size):
        if _coin(state) == 1:
            v = x_a[p]
            slots[p] = v
            used[v - 1] = True


@njit(cache=True, nogil=True)
def _common_affix(x_a, x_s):
    # lengths of the maximal common prefix and suffix
    n = x_a.size
    a = 0
    while a < n and x_a[a] == x_s[a]:
        a += 1
    if a == n:
        return a, np.int64(0)
    b = np.int64(0)
    while x_a[n - 1 - b] == x_s[n - 1 - b]:
        b += 1
    return a, b


@njit(cache=True, nogil=True)
def _base_ca1p(x_a, x_s, slots, used, state):
    # returns False when the parents are identical (no non-common window)
    n = x_a.size
    a, b = _common_affix(x_a, x_s)
    if a == n:
        return False
    cut = a + 1 + _below(state, n - a - b - 1)
    side = _coin(state)
    _mark_side(x_a, slots, used, cut, side)
    return True


@njit(cache=True, nogil=True)
def _social_fill(code, x_s, slots, used):
    n = x_s.size
    if code == 0:
        # position-based: unused shared label lands at its own position
        for i in range(n):
            v = x_s[i]
            if slots[i] == 0 and not used[v - 1]:
                slots[i] = v
                used[v - 1] = True
    else:
        # order-based: unused shared labels fill open slots left to right
        w = 0
        for i in range(n):
            v = x_s[i]
            if not used[v - 1]:
                while slots[w] != 0:
                    w += 1
                slots[w] = v
                used[v - 1] = True
                w += 1


@njit(cache=True, nogil=True)
def _nth_unused(used, idx):
    # idx-th smallest unused label, 0-based idx
    seen = np.int64(-1)
    for v in range(used.size):
        if not used[v]:
            seen += 1
            if seen == idx:
                return np.int64(v + 1)
    return np.int64(0)  # unreachable under the caller's bookkeeping


@njit(cache=True, nogil=True)
def _random_fill_one(slots, used, i, remaining, state):
    v = _nth_unused(used, _below(state, remaining))
    slots[i] = v
    used[v - 1] = True


@njit(cache=True, nogil=True)
def _repair_fill(code, x_a, x_s, slots, used, state):
    n = slots.size
    if code == 2:
        return
    remaining = np.int64(0)
    for v in range(n):
        if not used[v]:
            remaining += 1
    if code == 0:
        for i in range(n):
            if slots[i] == 0:
                _random_fill_one(slots, used, i, remaining, state)
                remaining -= 1
        return
    # partially-mapped chase: follow x_S through x_A's positions until an
    # unused label turns up; give up after n hops (cycle) and fill randomly
    pos_a = np.empty(n, np.int64)
    for p in range(n):
        pos_a[x_a[p] - 1] = p
    for i in range(n):
        if slots[i] == 0:
            v = x_s[i]
            hops = 0
            while used[v - 1] and hops < n:
                v = x_s[pos_a[v - 1]]
                hops += 1
            if used[v - 1]:
                _random_fill_one(slots, used, i, remaining, state)
            else:
                slots[i] = v
                used[v - 1] = True
            remaining -= 1


@njit(cache=True, nogil=True)
def _sbx_combine(bcode, scode, rcode, x_a, x_s, slots, used, state):
    """Full base/social/repair pipeline writing into (slots, used)."""
    n = x_a.size
    for i in range(n):
        slots[i] = 0
        used[i] = False
    if n == 1:
        slots[0] = x_a[0]
        used[x_a[0] - 1] = True
        return
    if bcode == 0:
        _base_1p(x_a, slots, used, state)
    elif bcode == 1:
        _base_2p(x_a, slots, used, state)
    elif bcode == 2:
        _base_u(x_a, slots, used, state)
    else:
        if not _base_ca1p(x_a, x_s, slots, used, state):
            # identical parents: the child is the base idea itself
            for i in range(n):
                v = x_a[i]
                slots[i] = v
                used[v - 1] = True
            return
    _social_fill(scode, x_s, slots, used)
    _repair_fill(rcode, x_a, x_s, slots, used, state)


def _check_parents(x_a, x_s) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x_a, np.int64)
    s = np.asarray(x_s, np.int64)
    if a.ndim != 1 or s.ndim != 1 or a.size != s.size or a.size < 1:
        raise DimensionError(
            f"parents must be equal-length permutations, got shapes {a.shape} and {s.shape}"
        )
    return a, s


def apply_base(mode: str, x_a, x_s, rng: RngStream) -> PartialState:
    """Mark positions of the child copied from the base parent.

    Args:
        mode: one of ``1P``, ``2P``, ``U``, ``CA1P``.
        x_a: base parent (copied from).
        x_s: shared parent (consulted by ``CA1P`` only).
        rng: draw source.

    Returns:
        A new :class:`PartialState`.

    Raises:
        DegenerateParentsError: ``CA1P`` with identical parents.
    """
    if mode not in BASE_POLICIES:
        raise ValueError(f"unknown base policy {mode!r}")
    a, s = _check_parents(x_a, x_s)
    n = a.size
    slots, used = _new_partial(n)
    if n == 1:
        slots[0] = a[0]
        used[a[0] - 1] = True
        return PartialState(slots=slots, used=used)
    code = _BASE_CODE[mode]
    if code == 0:
        _base_1p(a, slots, used, rng.state)
    elif code == 1:
        _base_2p(a, slots, used, rng.state)
    elif code == 2:
        _base_u(a, slots, used, rng.state)
    else:
        if not _base_ca1p(a, s, slots, used, rng.state):
            raise DegenerateParentsError("parents are identical, no non-common window")
    return PartialState(slots=slots, used=used)


def apply_social(mode: str, partial: PartialState, x_s) -> PartialState:
    """Fill holes with unused labels of the shared parent.

    ``P`` places a label only at its own position in ``x_s`` and may
    leave holes; ``O`` streams unused labels into holes left to right
    and always completes the state.
    """
    if mode not in SOCIAL_POLICIES:
        raise ValueError(f"unknown social policy {mode!r}")
    _check_partial(partial)
    s = np.asarray(x_s, np.int64)
    if s.size != partial.n:
        raise DimensionError(f"shared parent length {s.size} != state length {partial.n}")
    slots, used = _copy_partial(partial)
    _social_fill(_SOCIAL_CODE[mode], s, slots, used)
    return PartialState(slots=slots, used=used)


def apply_repair(mode: Optional[str], partial: PartialState, x_a, x_s, rng: RngStream) -> np.ndarray:
    """Complete the child into a permutation.

    ``R`` fills each hole with a uniform draw from the unused labels;
    ``PM`` chases the partially-mapped candidate chain through the
    parents, falling back to a random fill if the chain cycles; ``None``
    performs no filling and requires an already-complete input.
    """
    if mode is not None and mode not in REPAIR_POLICIES:
        raise ValueError(f"unknown repair policy {mode!r}")
    _check_partial(partial)
    a, s = _check_parents(x_a, x_s)
    if a.size != partial.n:
        raise DimensionError(f"parent length {a.size} != state length {partial.n}")
    slots, used = _copy_partial(partial)
    _repair_fill(_REPAIR_CODE[mode], a, s, slots, used, rng.state)
    if (slots == 0).any():
        raise ValueError("state still has unoccupied positions after no-op repair")
    return _frozen(slots)


def sbx_combine(spec: SbxSpec, x_a, x_s, rng: RngStream) -> np.ndarray:
    """Run the base/social/repair pipeline of a basic (non-macro) spec."""
    if spec.macro is not None:
        raise ValueError("macro spec given; use sbx_macro")
    a, s = _check_parents(x_a, x_s)
    slots, used = _new_partial(a.size)
    _sbx_combine(
        _BASE_CODE[spec.base],
        _SOCIAL_CODE[spec.social],
        _REPAIR_CODE[spec.repair],
        a,
        s,
        slots,
        used,
        rng.state,
    )
    return _frozen(slots)


def n_icg(n: int) -> int:
    """Trial count of the macro operator: 5% of n to the nearest integer, at least 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return max((n + 10) // 20, 1)


def sbx_macro(
    spec: SbxSpec,
    evaluate: Callable[[np.ndarray], int],
    x_a,
    x_s,
    rng: RngStream,
) -> np.ndarray:
    """Best child of several independent pipeline trials.

    Runs the inner operator ``n_icg(n)`` times, each on a stream seeded
    by a word pre-drawn from ``rng``, and returns the candidate with the
    minimum ``evaluate`` value (ties to the earliest trial).
    """
    if spec.macro != "MP":
        raise ValueError("sbx_macro requires a spec with the MP macro tag")
    a, s = _check_parents(x_a, x_s)
    n = a.size
    trials = n_icg(n)
    seeds = [rng.next_u64() for _ in range(trials)]
    bcode = _BASE_CODE[spec.base]
    scode = _SOCIAL_CODE[spec.social]
    rcode = _REPAIR_CODE[spec.repair]
    best = None
    best_val = None
    slots, used = _new_partial(n)
    for seed in seeds:
        _sbx_combine(bcode, scode, rcode, a, s, slots, used, _seed_state(np.uint64(seed)))
        val = evaluate(slots)
        if best_val is None or val < best_val:
            best_val = val
            best = slots.copy()
    return _frozen(best)


def parse_spec(text: str) -> SbxSpec:
    """Parse an operator spec string.

    Grammar: ``BASE/SOCIAL/REPAIR`` or ``MP(BASE/SOCIAL/REPAIR)`` with
    ``BASE`` in {1P, 2P, U, CA1P}, ``SOCIAL`` in {P, O}, ``REPAIR`` in
    {R, PM, -}.  Case-sensitive, no whitespace.  ``-`` repair demands
    the O social policy.

    Raises:
        SpecParseError: with the character position and reason.
    """
    if not isinstance(text, str):
        raise SpecParseError(0, f"spec must be a string, got {type(text).__name__}")
    macro = None
    body = text
    offset = 0
    if text.startswith("MP("):
        if not text.endswith(")"):
            raise SpecParseError(len(text), "unterminated macro, expected ')'")
        macro = "MP"
        body = text[3:-1]
        offset = 3
    parts = body.split("/")
    if len(parts) != 3:
        raise SpecParseError(offset, "expected three '/'-separated fields BASE/SOCIAL/REPAIR")
    base_text, social_text, repair_text = parts
    pos_base = offset
    pos_social = pos_base + len(base_text) + 1
    pos_repair = pos_social + len(social_text) + 1
    if base_text not in BASE_POLICIES:
        raise SpecParseError(pos_base, f"unknown base policy {base_text!r}, expected one of {', '.join(BASE_POLICIES)}")
    if social_text not in SOCIAL_POLICIES:
        raise SpecParseError(pos_social, f"unknown social policy {social_text!r}, expected P or O")
    if repair_text == "-":
        repair = None
    elif repair_text in REPAIR_POLICIES:
        repair = repair_text
    else:
        raise SpecParseError(pos_repair, f"unknown repair policy {repair_text!r}, expected R, PM or -")
    if repair is None and social_text != "O":
        raise SpecParseError(
            pos_repair,
            "repair '-' is only valid with the O social policy; P may leave unoccupied positions",
        )
    return SbxSpec(base=base_text, social=social_text, repair=repair, macro=macro)


def format_spec(spec: SbxSpec) -> str:
    """Canonical text of a spec; inverse of :func:`parse_spec`."""
    body = f"{spec.base}/{spec.social}/{spec.repair if spec.repair is not None else '-'}"
    return f"MP({body})" if spec.macro else body
