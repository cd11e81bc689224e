"""Independent pure-Python reference implementations used across tests.

Nothing here imports from the package's jitted internals; these mirrors
exist so kernel behavior can be replayed and compared draw-for-draw.
"""

from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def ref_mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def ref_seed_state(seed: int) -> list[int]:
    state = []
    s = seed & MASK
    for _ in range(4):
        s = (s + GOLDEN) & MASK
        state.append(ref_mix64(s))
    return state


def ref_rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK


def ref_next(state: list[int]) -> int:
    result = (ref_rotl((state[1] * 5) & MASK, 7) * 9) & MASK
    t = (state[1] << 17) & MASK
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = ref_rotl(state[3], 45)
    return result


def ref_below(state: list[int], n: int) -> int:
    if n <= 1:
        return 0
    mask = n - 1
    for shift in (1, 2, 4, 8, 16, 32):
        mask |= mask >> shift
    while True:
        v = ref_next(state) & mask
        if v < n:
            return v


def ref_coin(state: list[int]) -> int:
    return ref_next(state) >> 63


def ref_shuffle(state: list[int], arr: list) -> None:
    for i in range(len(arr) - 1, 0, -1):
        j = ref_below(state, i + 1)
        arr[i], arr[j] = arr[j], arr[i]


def ref_perm(state: list[int], n: int) -> list[int]:
    arr = list(range(1, n + 1))
    ref_shuffle(state, arr)
    return arr


def ref_derive(seed: int, *indices: int) -> int:
    h = seed & MASK
    for x in indices:
        h = ref_mix64(((h ^ ref_mix64(x & MASK)) + GOLDEN) & MASK)
    return h


def table_makespan(times: np.ndarray, x) -> int:
    """Full (n+1) x (m+1) completion-table recurrence."""
    n, m = times.shape
    table = np.zeros((n + 1, m + 1), np.int64)
    for a, job in enumerate(x, start=1):
        for k in range(1, m + 1):
            table[a, k] = max(table[a - 1, k], table[a, k - 1]) + times[job - 1, k - 1]
    return int(table[n, m])


def loop_qap(dist: np.ndarray, flow: np.ndarray, x) -> int:
    """Plain double-loop assignment cost, raw matrix units."""
    n = len(x)
    return sum(
        int(dist[i, j]) * int(flow[x[i] - 1, x[j] - 1])
        for i in range(n)
        for j in range(n)
    )


def naive_best_insert(times: np.ndarray, x, k: int) -> tuple[list[int], int]:
    """Try job ``k`` at every position, full makespan each time, lowest-tie."""
    rest = [v for v in x if v != k]
    best_val = None
    best_pos = 0
    for p in range(len(rest) + 1):
        val = table_makespan(times, rest[:p] + [k] + rest[p:])
        if best_val is None or val < best_val:
            best_val = val
            best_pos = p
    return rest[:best_pos] + [k] + rest[best_pos:], best_val


def mirror_fsp_ls(times: np.ndarray, x, ref_state: list[int]) -> tuple[list[int], int, int]:
    """Replay of the reinsertion descent: (schedule, makespan, evaluations)."""
    n = times.shape[0]
    cur = list(x)
    best = table_makespan(times, cur)
    evals = 0
    improved = True
    while improved:
        improved = False
        for k in ref_perm(ref_state, n):
            cur, val = naive_best_insert(times, cur, k)
            evals += n
            if val < best:
                best = val
                improved = True
    return cur, best, evals


def mirror_qap_pass(
    dist: np.ndarray, flow: np.ndarray, x: list[int], obj: int, ref_state: list[int]
) -> tuple[int, int]:
    """Replay of one randomized exchange sweep; mutates ``x``."""
    n = len(x)
    order_i = ref_perm(ref_state, n)
    order_j = ref_perm(ref_state, n)
    evals = 0
    for a in range(n):
        i = order_i[a] - 1
        for b in range(n):
            j = order_j[b] - 1
            evals += 1
            if i == j:
                continue
            x[i], x[j] = x[j], x[i]
            delta = loop_qap(dist, flow, x) - obj
            if delta < 0:
                obj += delta
            else:
                x[i], x[j] = x[j], x[i]
    return obj, evals


def mirror_qap_ls(
    dist: np.ndarray, flow: np.ndarray, x, ref_state: list[int]
) -> tuple[list[int], int]:
    """Two sweeps on one stream: (state, raw objective)."""
    cur = list(x)
    obj = loop_qap(dist, flow, cur)
    obj, _ = mirror_qap_pass(dist, flow, cur, obj, ref_state)
    obj, _ = mirror_qap_pass(dist, flow, cur, obj, ref_state)
    return cur, obj


def mirror_combine(
    base: str, social: str, repair, x_a, x_s, ref_state: list[int]
) -> list[int]:
    """Replay of the base/social/repair pipeline."""
    n = len(x_a)
    if n == 1:
        return [x_a[0]]
    slots = [0] * n
    used = [False] * n

    def mark(p):
        v = x_a[p]
        slots[p] = v
        used[v - 1] = True

    def mark_side(cut, side):
        for p in (range(cut) if side == 0 else range(cut, n)):
            mark(p)

    if base == "1P":
        cut = 1 + ref_below(ref_state, n - 1)
        mark_side(cut, ref_coin(ref_state))
    elif base == "2P":
        if n < 3:
            cut = 1 + ref_below(ref_state, n - 1)
            mark_side(cut, ref_coin(ref_state))
        else:
            c1 = 1 + ref_below(ref_state, n - 1)
            c2 = 1 + ref_below(ref_state, n - 2)
            if c2 >= c1:
                c2 += 1
            if c1 > c2:
                c1, c2 = c2, c1
            if ref_coin(ref_state) == 0:
                for p in range(c1, c2):
                    mark(p)
            else:
                for p in list(range(c1)) + list(range(c2, n)):
                    mark(p)
    elif base == "U":
        for p in range(n):
            if ref_coin(ref_state) == 1:
                mark(p)
    else:  # CA1P
        a = 0
        while a < n and x_a[a] == x_s[a]:
            a += 1
        if a == n:
            return list(x_a)
        b = 0
        while x_a[n - 1 - b] == x_s[n - 1 - b]:
            b += 1
        cut = a + 1 + ref_below(ref_state, n - a - b - 1)
        mark_side(cut, ref_coin(ref_state))

    if social == "P":
        for i in range(n):
            v = x_s[i]
            if slots[i] == 0 and not used[v - 1]:
                slots[i] = v
                used[v - 1] = True
    else:  # O
        w = 0
        for i in range(n):
            v = x_s[i]
            if not used[v - 1]:
                while slots[w] != 0:
                    w += 1
                slots[w] = v
                used[v - 1] = True
                w += 1

    if repair is not None:
        remaining = used.count(False)

        def fill_random(i, remaining):
            idx = ref_below(ref_state, remaining)
            unused = [v + 1 for v in range(n) if not used[v]]
            v = unused[idx]
            slots[i] = v
            used[v - 1] = True

        if repair == "R":
            for i in range(n):
                if slots[i] == 0:
                    fill_random(i, remaining)
                    remaining -= 1
        else:  # PM
            pos_a = {x_a[p]: p for p in range(n)}
            for i in range(n):
                if slots[i] == 0:
                    v = x_s[i]
                    hops = 0
                    while used[v - 1] and hops < n:
                        v = x_s[pos_a[v]]
                        hops += 1
                    if used[v - 1]:
                        fill_random(i, remaining)
                    else:
                        slots[i] = v
                        used[v - 1] = True
                    remaining -= 1
    return slots


def mirror_agent_step(
    kind: str, payload, x_a, x_s, ref_state: list[int], spec, trials: int
) -> tuple[list[int], int]:
    """Replay of one agent's in-session work: combine (or best-of-trials), then LS."""
    base, social, repair = spec

    def raw(x):
        if kind == "fsp":
            return table_makespan(payload, x)
        return loop_qap(payload[0], payload[1], x)

    if trials <= 0:
        child = mirror_combine(base, social, repair, x_a, x_s, ref_state)
    else:
        seeds = [ref_next(ref_state) for _ in range(trials)]
        best = None
        child = None
        for sd in seeds:
            c = mirror_combine(base, social, repair, x_a, x_s, ref_seed_state(sd))
            fc = raw(c)
            if best is None or fc < best:
                best = fc
                child = c
    if kind == "fsp":
        child, f, _ = mirror_fsp_ls(payload, child, ref_state)
    else:
        child, f = mirror_qap_ls(payload[0], payload[1], child, ref_state)
    return child, f


def mirror_rtgo_run(kind: str, payload, n: int, agents: int, sessions: int, spec,
                    trials: int, master: int):
    """Full independent replay of a run.

    ``payload`` is the times matrix for fsp or (dist, flow) for qap.
    Returns (best_idea, best_raw_objective, [(session, raw_objective)], bases).
    """

    def raw(x):
        if kind == "fsp":
            return table_makespan(payload, x)
        return loop_qap(payload[0], payload[1], x)

    bases = []
    objs = []
    for a in range(agents):
        state = ref_seed_state(ref_derive(master, 1, a + 1))
        p = ref_perm(state, n)
        bases.append(p)
        objs.append(raw(p))
    best_at = min(range(agents), key=lambda a: (objs[a], a))
    best_obj = objs[best_at]
    best_idea = list(bases[best_at])
    events = [(0, best_obj)]

    for session in range(1, sessions + 1):
        seats = list(range(agents))
        ref_shuffle(ref_seed_state(ref_derive(master, 2, session)), seats)
        socials = [None] * agents
        for h in range(agents):
            socials[seats[(h + 1) % agents]] = list(bases[seats[h]])
        for a in range(agents):
            state = ref_seed_state(ref_derive(master, 3, a + 1, session))
            child, f = mirror_agent_step(kind, payload, bases[a], socials[a], state, spec, trials)
            if objs[a] >= f:
                bases[a] = child
                objs[a] = f
        at = min(range(agents), key=lambda i: (objs[i], i))
        if objs[at] < best_obj:
            best_obj = objs[at]
            best_idea = list(bases[at])
            events.append((session, best_obj))
    return best_idea, best_obj, events, bases
