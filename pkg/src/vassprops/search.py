"""Breadth-first search for pseudo-runs weakly satisfying a property.

The search explores pairs (pseudo-configuration, decomposition progress).
Once a loop has strictly increased a component, that component may go
negative and only its differences matter afterwards, so its absolute value
is dropped from the search key.  The same holds from the start for
components that no transition decrements, since they can never go negative.
This keeps the explored space small without losing any witness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import Configuration, PseudoConfiguration, PseudoRun, Vass
from .properties import Decomposition, GupProperty, GupWeak, verify

DEFAULT_DEPTH_CAP = 10**4
DEFAULT_STATE_CAP = 5 * 10**4


@dataclass
class SearchResult:
    pseudo_run: PseudoRun | None
    decomposition: Decomposition | None
    exhausted: bool
    states: int
    depth_reached: int
    cap_hit: str | None = None

    @property
    def found(self) -> bool:
        return self.pseudo_run is not None


def search_weak_witness(
    v: Vass,
    init: Configuration,
    prop: GupProperty,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    state_cap: int = DEFAULT_STATE_CAP,
    nonempty_first_loop: bool = False,
) -> SearchResult:
    """Shortest pseudo-run (in transitions) weakly satisfying ``prop`` from ``init``.

    ``exhausted`` is True when the whole search space was explored without
    hitting either cap, in which case a missing witness is definite.
    """
    n = v.dim
    K = prop.length
    last_mark = 2 * K
    # key: (marks placed, state, values, loop diff, loop start state, dropped comps, loop moved)
    # dropped comps = free ones plus those increased by a completed loop; their diffs never go negative unexcused
    free = frozenset(j for j in range(n) if all(t.update[j] >= 0 for t in v.transitions))
    start_vals = tuple(0 if j in free else x for j, x in enumerate(init.values))
    start = (0, init.state, start_vals, None, None, free, False)
    parent: dict = {start: None}
    depth = {start: 0}
    queue = deque([start])
    cap_hit = None
    max_depth = 0
    trans = v.transitions
    goal = None

    while queue:
        key = queue.popleft()
        p, q, vals, diff, loop_q, pos, moved = key
        d = depth[key]
        max_depth = max(max_depth, d)

        # place the next mark here (no transition consumed)
        nxt = None
        if p % 2 == 0:
            nxt = (p + 1, q, vals, (0,) * n, q, pos, False)
        else:
            l = (p + 1) // 2
            row = prop.rows[l - 1]
            ok = q == loop_q and (moved or not (nonempty_first_loop and l == 1))
            ok = ok and all(x in iv for x, iv in zip(diff, row))
            ok = ok and all(x >= 0 or j in pos for j, x in enumerate(diff))
            if ok:
                new_pos = pos | {j for j, x in enumerate(diff) if x > 0}
                new_vals = tuple(0 if j in new_pos else x for j, x in enumerate(vals))
                nxt = (p + 1, q, new_vals, None, None, frozenset(new_pos), False)
        if nxt is not None and nxt not in parent:
            parent[nxt] = (key, None)
            depth[nxt] = d
            if nxt[0] == last_mark:
                goal = nxt
                break
            queue.appendleft(nxt)

        if d >= depth_cap:
            cap_hit = cap_hit or "depth"
            continue
        for k in v.outgoing[q]:
            t = trans[k]
            new_vals = []
            bad = False
            for j, (x, b) in enumerate(zip(vals, t.update)):
                if j in pos:
                    new_vals.append(0)
                else:
                    y = x + b
                    if y < 0:
                        bad = True
                        break
                    new_vals.append(y)
            if bad:
                continue
            new_diff = None if diff is None else tuple(x + b for x, b in zip(diff, t.update))
            child = (p, t.target, tuple(new_vals), new_diff, loop_q, pos, moved or p % 2 == 1)
            if child in parent:
                continue
            if len(parent) >= state_cap:
                cap_hit = "states"
                queue.clear()
                break
            parent[child] = (key, k)
            depth[child] = d + 1
            queue.append(child)

    if goal is None:
        return SearchResult(None, None, cap_hit is None, len(parent), max_depth, cap_hit)

    path: list[int] = []
    mark_steps: list[int] = []
    key = goal
    while parent[key] is not None:
        prev, k = parent[key]
        if k is None:
            mark_steps.append(depth[key])
        else:
            path.append(k)
        key = prev
    path.reverse()
    mark_steps.reverse()
    pr = PseudoRun(v, PseudoConfiguration(init.state, tuple(init.values)), tuple(path))
    dec = Decomposition((0, *mark_steps))
    assert verify(pr, dec, GupWeak(prop)), "search produced a non-verifying witness"
    return SearchResult(pr, dec, False, len(parent), max_depth)
