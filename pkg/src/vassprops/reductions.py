"""Model transformations: reversal-counting products, VASS-to-VAS encodings,
globalization and the strong-promptness reduction."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Sequence

from .coverability import OMEGA, ExtVector
from .errors import ModelError
from .model import Configuration, Transition, Vass

INC = "INC"
DEC = "DEC"

Modes = tuple[str, ...]


def rb_step(modes: Modes, update: Sequence[int]) -> tuple[Modes, tuple[int, ...]]:
    """Mode vector after ``update`` and the per-component reversal increments."""
    new_modes = []
    incs = []
    for m, b in zip(modes, update):
        if b < 0:
            new_modes.append(DEC)
            incs.append(1 if m == INC else 0)
        elif b > 0:
            new_modes.append(INC)
            incs.append(1 if m == DEC else 0)
        else:
            new_modes.append(m)
            incs.append(0)
    return tuple(new_modes), tuple(incs)


@dataclass(frozen=True)
class RbProduct:
    """Lazy product of a VASS with {DEC, INC}^n; components n..2n-1 count reversals.

    States are pairs ``(base_state, modes)``.  Labels of successors are base
    transition indices.
    """

    base: Vass

    @property
    def dim(self) -> int:
        return 2 * self.base.dim

    def initial(self, c: Configuration) -> tuple[tuple[Hashable, Modes], tuple[int, ...]]:
        return (c.state, (INC,) * self.base.dim), tuple(c.values) + (0,) * self.base.dim

    def successors(self, state, vector: ExtVector):
        q, modes = state
        n = self.base.dim
        for k in self.base.outgoing[q]:
            t = self.base.transitions[k]
            new_modes, incs = rb_step(modes, t.update)
            upd = tuple(t.update) + incs
            y = tuple(OMEGA if v is OMEGA else v + b for v, b in zip(vector, upd))
            if all(v is OMEGA or v >= 0 for v in y[:n]):
                yield k, (t.target, new_modes), y

    def to_vass(self, init_state) -> Vass:
        """Materialize the product states reachable in the control graph from ``init_state``.

        Exponential in the dimension; only meant for small cross-checks.
        """
        seen = {init_state: None}
        order = [init_state]
        trans = []
        queue = deque([init_state])
        while queue:
            q, modes = queue.popleft()
            for k in self.base.outgoing[q]:
                t = self.base.transitions[k]
                new_modes, incs = rb_step(modes, t.update)
                dst = (t.target, new_modes)
                trans.append(Transition((q, modes), dst, tuple(t.update) + incs))
                if dst not in seen:
                    seen[dst] = None
                    order.append(dst)
                    queue.append(dst)
        return Vass(tuple(order), self.dim, tuple(trans))


@dataclass(frozen=True)
class GatedRbProduct(RbProduct):
    """Reversal product for Karp-Miller trees that only counts reversals of a
    component once it is OMEGA on the current branch.

    Every counted reversal then happens at values that can be made as large
    as wanted, so the reversal counter of i accelerates strictly after i.
    """

    def successors(self, state, vector: ExtVector):
        q, modes = state
        n = self.base.dim
        for k in self.base.outgoing[q]:
            t = self.base.transitions[k]
            new_modes, incs = rb_step(modes, t.update)
            incs = tuple(d if vector[j] is OMEGA else 0 for j, d in enumerate(incs))
            upd = tuple(t.update) + incs
            y = tuple(OMEGA if v is OMEGA else v + b for v, b in zip(vector, upd))
            if all(v is OMEGA or v >= 0 for v in y[:n]):
                yield k, (t.target, new_modes), y


def project_rb_path(base: Vass, product: Vass, path: Sequence[int]) -> tuple[int, ...]:
    """Base transition indices of a path in a materialized product."""
    out = []
    n = base.dim
    for k in path:
        t = product.transitions[k]
        q, dst = t.source[0], t.target[0]
        for b in base.outgoing[q]:
            bt = base.transitions[b]
            if bt.target == dst and tuple(bt.update) == tuple(t.update[:n]):
                out.append(b)
                break
        else:
            raise ModelError(f"product transition {k} has no base counterpart")
    return tuple(out)


def rb_lift(v: Vass, c: Configuration) -> tuple[RbProduct, tuple[tuple[Hashable, Modes], tuple[int, ...]]]:
    prod = RbProduct(v)
    return prod, prod.initial(c)


def count_reversals(values: Sequence[int]) -> int:
    """Number of alternations between nondecreasing and nonincreasing phases.

    The counter starts in increasing mode, so an initial decrease counts as a reversal.
    """
    mode = INC
    count = 0
    for a, b in zip(values, values[1:]):
        if b < a and mode == INC:
            mode, count = DEC, count + 1
        elif b > a and mode == DEC:
            mode, count = INC, count + 1
    return count


@dataclass(frozen=True)
class TsBSystem:
    """Reversal counting that only registers switches made above the bound ``B``."""

    base: Vass
    bound: int

    @property
    def dim(self) -> int:
        return 2 * self.base.dim

    def successors(self, state, vector):
        q, modes = state
        n = self.base.dim
        for k in self.base.outgoing[q]:
            t = self.base.transitions[k]
            new_modes, switched = rb_step(modes, t.update)
            incs = tuple(1 if s and vector[i] > self.bound else 0 for i, s in enumerate(switched))
            head = tuple(x + b for x, b in zip(vector[:n], t.update))
            if any(x < 0 for x in head):
                continue
            tail = tuple(x + d for x, d in zip(vector[n:], incs))
            yield k, (t.target, new_modes), head + tail


def ts_b_successors(system: TsBSystem, state, vector) -> list:
    return list(system.successors(state, vector))


def vass_to_vas_simple(v: Vass, c: Configuration) -> tuple[Vass, tuple[int, ...]]:
    """One extra counter per control state, holding 1 for the current state.

    Self-loops have zero net effect on the state counters and can therefore
    fire from any control state of the image; the encoding is step-faithful
    only for VASS without self-loops (and for single-state VASS).
    """
    idx = {q: i for i, q in enumerate(v.states)}
    m = len(v.states)
    vecs = []
    for t in v.transitions:
        extra = [0] * m
        extra[idx[t.source]] -= 1
        extra[idx[t.target]] += 1
        vecs.append(tuple(t.update) + tuple(extra))
    init = [0] * m
    init[idx[c.state]] = 1
    return Vass.vas(vecs, dim=v.dim + m), tuple(c.values) + tuple(init)


def _hp_order(v: Vass) -> list:
    # Put a state entered by some transition first so the largest gadget entry occurs.
    targets = [t.target for t in v.transitions]
    states = list(v.states)
    if targets:
        first = targets[0]
        states.remove(first)
        states.insert(0, first)
    return states


def vass_to_vas_hp(v: Vass, c: Configuration) -> tuple[Vass, tuple[int, ...]]:
    """Encode control states in three extra counters.

    With k states numbered 0..k-1, state i is held as the pair
    (i, (k+1)(k+1-i)) on two of the three extra counters, the third being 0.
    Each VASS step tests both counters exactly, empties them and writes the
    target's pair one counter further (cyclically), so every transition has
    one copy per rotation phase and runs correspond step for step.
    The image has dimension n+3 and absmax = max((k+1)^2, absmax(V)) whenever
    the VASS has at least one transition.
    """
    n = v.dim
    order = _hp_order(v)
    idx = {q: i for i, q in enumerate(order)}
    k = len(order)
    big = lambda i: (k + 1) * (k + 1 - i)  # noqa: E731
    vecs = []
    for phase in range(3):
        c0, c1, c2 = phase, (phase + 1) % 3, (phase + 2) % 3
        for t in v.transitions:
            i, j = idx[t.source], idx[t.target]
            extra = [0, 0, 0]
            extra[c0] = -i
            extra[c1] = -big(i) + j
            extra[c2] = big(j)
            vecs.append(tuple(t.update) + tuple(extra))
    q0 = idx[c.state]
    return Vass.vas(vecs, dim=n + 3), tuple(c.values) + (q0, big(q0), 0)


def hp_state_of(v: Vass, extra: Sequence[int]):
    """Decode the control state held in the three extra counters of an hp image."""
    order = _hp_order(v)
    k = len(order)
    for phase in range(3):
        small, large, zero = extra[phase], extra[(phase + 1) % 3], extra[(phase + 2) % 3]
        if zero == 0 and 0 <= small < k and large == (k + 1) * (k + 1 - small):
            return order[small], phase
    raise ModelError(f"{tuple(extra)} does not encode a control state")


def _fresh_name(v: Vass, base: str) -> str:
    name = base
    taken = {str(q) for q in v.states}
    while name in taken:
        name += "'"
    return name


def globalize(v: Vass, new_state: str | None = None) -> Vass:
    """Add a state pumping every counter by unit self-loops, with zero jumps into every original state."""
    q_new = new_state or _fresh_name(v, "q_new")
    loops = []
    for i in range(v.dim):
        e = [0] * v.dim
        e[i] = 1
        loops.append(Transition(q_new, q_new, tuple(e)))
    jumps = [Transition(q_new, q, (0,) * v.dim) for q in v.states]
    return Vass(v.states + (q_new,), v.dim, v.transitions + tuple(loops) + tuple(jumps))


@dataclass(frozen=True)
class PromptnessInstance:
    base: Vass
    internal: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "internal", frozenset(self.internal))
        bad = [k for k in self.internal if not 0 <= k < len(self.base.transitions)]
        if bad:
            raise ModelError(f"internal transition indices out of range: {sorted(bad)}")

    @property
    def external(self) -> frozenset[int]:
        return frozenset(range(len(self.base.transitions))) - self.internal


def promptness_reduction(p: PromptnessInstance, c: Configuration) -> tuple[Vass, Configuration, int]:
    """Two-phase image whose extra counter (index n) is unbounded iff the instance is not strongly prompt.

    Phase 1 copies every transition; a zero switch per state enters phase 2,
    where only internal transitions remain and each increments the extra counter.
    States of the image are pairs ``(state, phase)``.
    """
    v = p.base
    n = v.dim
    zero = (0,) * (n + 1)
    states = tuple((q, 1) for q in v.states) + tuple((q, 2) for q in v.states)
    trans = [Transition((t.source, 1), (t.target, 1), tuple(t.update) + (0,)) for t in v.transitions]
    trans += [Transition((q, 1), (q, 2), zero) for q in v.states]
    for k in sorted(p.internal):
        t = v.transitions[k]
        trans.append(Transition((t.source, 2), (t.target, 2), tuple(t.update) + (1,)))
    image = Vass(states, n + 1, tuple(trans))
    return image, Configuration((c.state, 1), tuple(c.values) + (0,)), n
