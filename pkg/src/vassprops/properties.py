"""Generalized unboundedness properties and their witness conditions.

Components are 0-based throughout.  Row indices ``l`` of a property and the
marks of a :class:`Decomposition` follow the usual 1-based convention:
row ``l`` constrains the loop segment between marks ``2l-1`` and ``2l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import MalformedDecomposition, PreconditionViolated, SearchCap
from .model import PseudoRun, Run, norms

DEFAULT_SEARCH_BUDGET = 10**7


@dataclass(frozen=True)
class Interval:
    """Integer interval; ``None`` bounds stand for -inf / +inf."""

    lower: int | None = None
    upper: int | None = None

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower},{self.upper}]")

    def __contains__(self, x: int) -> bool:
        return (self.lower is None or self.lower <= x) and (self.upper is None or x <= self.upper)

    @classmethod
    def at_least(cls, a: int) -> "Interval":
        return cls(a, None)

    @classmethod
    def at_most(cls, b: int) -> "Interval":
        return cls(None, b)

    def endpoints(self) -> list[int]:
        return [e for e in (self.lower, self.upper) if e is not None]

    def __str__(self) -> str:
        lo = "(-inf" if self.lower is None else f"[{self.lower}"
        hi = "inf)" if self.upper is None else f"{self.upper}]"
        return f"{lo},{hi}"


ANY = Interval()
NONNEG = Interval.at_least(0)
POSITIVE = Interval.at_least(1)
NEGATIVE = Interval.at_most(-1)


@dataclass(frozen=True)
class GupProperty:
    rows: tuple[tuple[Interval, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise ValueError("a property needs at least one row")
        n = len(rows[0])
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("all rows must have the same positive arity")

    @property
    def dim(self) -> int:
        return len(self.rows[0])

    @property
    def length(self) -> int:
        return len(self.rows)

    @property
    def scale(self) -> int:
        return max([1] + [abs(e) for r in self.rows for iv in r for e in iv.endpoints()])

    def __str__(self) -> str:
        return " | ".join(" ".join(map(str, r)) for r in self.rows)


@dataclass(frozen=True)
class DisjointnessSequence:
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if not sets or any(not s for s in sets):
            raise ValueError("a disjointness sequence is a nonempty sequence of nonempty sets")
        seen: set[int] = set()
        for s in sets:
            if seen & s:
                raise ValueError("sets of a disjointness sequence must be pairwise disjoint")
            seen |= s

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def union(self) -> frozenset[int]:
        return frozenset().union(*self.sets)

    def __str__(self) -> str:
        return ".".join("{" + ",".join(str(j + 1) for j in sorted(s)) + "}" for s in self.sets)


def disjointness_sequences(n: int) -> Iterable[DisjointnessSequence]:
    """All disjointness sequences over n components: by length, then lexicographically."""
    subsets = [frozenset(c) for r in range(1, n + 1) for c in combinations(range(n), r)]
    subsets.sort(key=lambda s: (sorted(s), len(s)))

    def extend(prefix, used, k):
        if len(prefix) == k:
            yield DisjointnessSequence(tuple(prefix))
            return
        for s in subsets:
            if not (s & used):
                yield from extend(prefix + [s], used | s, k)

    for k in range(1, n + 1):
        yield from extend([], frozenset(), k)


@dataclass(frozen=True)
class Decomposition:
    """Positions ``f(0..2K)`` of the marked pseudo-configurations inside a (pseudo-)run."""

    marks: tuple[int, ...]

    def __post_init__(self):
        marks = tuple(self.marks)
        object.__setattr__(self, "marks", marks)
        if len(marks) < 3 or len(marks) % 2 == 0:
            raise MalformedDecomposition(f"need 2K+1 marks with K >= 1, got {len(marks)}")
        if marks[0] != 0:
            raise MalformedDecomposition("the first mark must be position 0")
        if any(a > b for a, b in zip(marks, marks[1:])):
            raise MalformedDecomposition("marks must be nondecreasing")

    @property
    def length(self) -> int:
        return (len(self.marks) - 1) // 2

    def check_against(self, pr: PseudoRun) -> None:
        if self.marks[-1] != len(pr) - 1:
            raise MalformedDecomposition(
                f"last mark {self.marks[-1]} must be the final position {len(pr) - 1}"
            )

    def loop(self, l: int) -> tuple[int, int]:
        return self.marks[2 * l - 1], self.marks[2 * l]


@dataclass(frozen=True)
class ApproxContext:
    property: GupProperty
    l: int
    incr: frozenset[int]
    within: frozenset[int]
    bound: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "incr", frozenset(self.incr))
        object.__setattr__(self, "within", frozenset(self.within))
        if not 1 <= self.l <= self.property.length:
            raise ValueError(f"row index {self.l} outside 1..{self.property.length}")
        if self.bound is not None and self.bound < 2:
            raise ValueError("a finite window bound must be at least 2")


@dataclass(frozen=True)
class GupRun:
    property: GupProperty


@dataclass(frozen=True)
class GupWeak:
    property: GupProperty


@dataclass(frozen=True)
class PbSigma:
    sigma: DisjointnessSequence


@dataclass(frozen=True)
class Approx:
    context: ApproxContext


Mode = Union[GupRun, GupWeak, PbSigma, Approx]


def _mode_length(mode: Mode) -> int:
    if isinstance(mode, PbSigma):
        return len(mode.sigma)
    if isinstance(mode, Approx):
        return mode.context.property.length
    return mode.property.length


def _row_diffs(pr: PseudoRun, marks: Sequence[int], K: int) -> list[tuple[int, ...]]:
    cfg = pr.configs
    return [
        tuple(b - a for a, b in zip(cfg[marks[2 * l - 1]].values, cfg[marks[2 * l]].values))
        for l in range(1, K + 1)
    ]


def _p0(pr: PseudoRun, marks: Sequence[int], rows: Iterable[int]) -> bool:
    cfg = pr.configs
    return all(cfg[marks[2 * l - 1]].state == cfg[marks[2 * l]].state for l in rows)


def _p1(diffs, prop: GupProperty, rows: Iterable[int]) -> bool:
    return all(d in iv for l in rows for d, iv in zip(diffs[l - 1], prop.rows[l - 1]))


def _p2(diffs, rows: Sequence[int], excused: frozenset[int] = frozenset()) -> bool:
    rows = list(rows)
    for idx, l in enumerate(rows):
        for j, d in enumerate(diffs[l - 1]):
            if d < 0 and j not in excused and not any(diffs[l2 - 1][j] > 0 for l2 in rows[:idx]):
                return False
    return True


def _p3(pr: PseudoRun, marks: Sequence[int], diffs, K: int) -> bool:
    # a negative entry needs an earlier completed loop with positive effect on it
    positive: set[int] = set()
    nxt = 1
    for p, c in enumerate(pr.configs):
        while nxt <= K and marks[2 * nxt] <= p:
            positive.update(j for j, d in enumerate(diffs[nxt - 1]) if d > 0)
            nxt += 1
        if any(v < 0 and j not in positive for j, v in enumerate(c.values)):
            return False
    return True


def _approx_p3(pr: PseudoRun, marks: Sequence[int], diffs, ctx: ApproxContext) -> bool:
    K = ctx.property.length
    l = ctx.l
    cfg = pr.configs
    positive: set[int] = set()
    cur = l - 1
    for p in range(marks[2 * l - 2], len(cfg)):
        while cur < K and marks[2 * (cur + 1)] <= p:
            cur += 1
            positive.update(j for j, d in enumerate(diffs[cur - 1]) if d > 0)
        window = ctx.within - ctx.incr - positive
        for j in window:
            x = cfg[p].values[j]
            if x < 0 or (ctx.bound is not None and x > ctx.bound - 1):
                return False
    return True


def verify(pr: PseudoRun, dec: Decomposition, mode: Mode) -> bool:
    """Exact evaluation of the witness conditions of ``mode`` on ``pr`` under ``dec``."""
    K = dec.length
    if K != _mode_length(mode):
        raise MalformedDecomposition(f"decomposition has {K} loops, condition expects {_mode_length(mode)}")
    dec.check_against(pr)
    marks = dec.marks
    diffs = _row_diffs(pr, marks, K)
    rows = range(1, K + 1)
    if isinstance(mode, GupRun):
        _check_arity(pr, mode.property)
        return pr.is_run and _p0(pr, marks, rows) and _p1(diffs, mode.property, rows) and _p2(diffs, rows)
    if isinstance(mode, GupWeak):
        _check_arity(pr, mode.property)
        return (
            _p0(pr, marks, rows)
            and _p1(diffs, mode.property, rows)
            and _p2(diffs, rows)
            and _p3(pr, marks, diffs, K)
        )
    if isinstance(mode, PbSigma):
        sets = mode.sigma.sets
        if max(mode.sigma.union) >= pr.vass.dim:
            raise MalformedDecomposition("disjointness sequence mentions a component beyond the dimension")
        if not _p0(pr, marks, rows):
            return False
        earlier: frozenset[int] = frozenset()
        for l in rows:
            X = sets[l - 1]
            d = diffs[l - 1]
            if any(d[j] <= 0 for j in X):
                return False
            if any(d[j] < 0 and j not in earlier for j in range(len(d)) if j not in X):
                return False
            earlier |= X
        return True
    ctx = mode.context
    _check_arity(pr, ctx.property)
    arows = range(ctx.l, K + 1)
    return (
        _p0(pr, marks, arows)
        and _p1(diffs, ctx.property, arows)
        and _p2(diffs, arows, ctx.incr)
        and _approx_p3(pr, marks, diffs, ctx)
    )


def _check_arity(pr: PseudoRun, prop: GupProperty) -> None:
    if prop.dim != pr.vass.dim:
        raise MalformedDecomposition(f"property has arity {prop.dim}, model has dimension {pr.vass.dim}")


def encode_pb_sigma(sigma: DisjointnessSequence, n: int) -> GupProperty:
    rows = []
    seen: set[int] = set()
    for X in sigma.sets:
        seen |= X
        rows.append(tuple(POSITIVE if j in X else (NONNEG if j not in seen else ANY) for j in range(n)))
    return GupProperty(tuple(rows))


def nonregularity_properties(n: int) -> list[GupProperty]:
    return [
        GupProperty(
            (
                tuple(POSITIVE if j == i else NONNEG for j in range(n)),
                tuple(NEGATIVE if j == i else ANY for j in range(n)),
            )
        )
        for i in range(n)
    ]


def termination_property(n: int) -> tuple[GupProperty, bool]:
    """Self-covering loop: one all-[0,inf) row; the flag requires a nonempty loop."""
    return GupProperty((tuple(NONNEG for _ in range(n)),)), True


def find_decomposition(
    pr: PseudoRun,
    mode: Mode,
    nonempty_first_loop: bool = False,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Decomposition | None:
    """First verifying decomposition in lexicographic order of the marks, or None."""
    K = _mode_length(mode)
    last = len(pr) - 1
    cfg = pr.configs
    prop = None
    if isinstance(mode, (GupRun, GupWeak)):
        prop = mode.property
    elif isinstance(mode, Approx):
        prop = mode.context.property
    first_row = mode.context.l if isinstance(mode, Approx) else 1
    if isinstance(mode, GupRun) and not pr.is_run:
        return None
    spent = 0
    marks = [0] * (2 * K + 1)

    def row_feasible(l: int) -> bool:
        a, b = marks[2 * l - 1], marks[2 * l]
        if l < first_row:
            return True
        if cfg[a].state != cfg[b].state:
            return False
        if isinstance(mode, PbSigma):
            X = mode.sigma.sets[l - 1]
            return all(cfg[b].values[j] > cfg[a].values[j] for j in X)
        return all(y - x in iv for x, y, iv in zip(cfg[a].values, cfg[b].values, prop.rows[l - 1]))

    def rec(k: int):
        nonlocal spent
        if k == 2 * K:
            marks[k] = last
            candidates = [last]
        else:
            candidates = range(marks[k - 1], last + 1)
        for pos in candidates:
            spent += 1
            if spent > budget:
                raise SearchCap(f"decomposition search exceeded {budget} candidates", budget)
            marks[k] = pos
            if k % 2 == 0:
                l = k // 2
                if l == 1 and nonempty_first_loop and marks[2] == marks[1]:
                    continue
                if not row_feasible(l):
                    continue
                if k == 2 * K:
                    dec = Decomposition(tuple(marks))
                    if verify(pr, dec, mode):
                        return dec
                    continue
            found = rec(k + 1)
            if found is not None:
                return found
        return None

    return rec(1)


def _pumped(pr: PseudoRun, dec: Decomposition, counts: Sequence[int], first: int) -> tuple[PseudoRun, Decomposition]:
    """Repeat loop l (for l >= first) counts[l-first] times; its odd mark moves before the last copy."""
    path = pr.path
    marks = dec.marks
    K = dec.length
    new_path: list[int] = []
    new_marks = [0]
    cursor = 0
    for l in range(1, K + 1):
        a, b = marks[2 * l - 1], marks[2 * l]
        new_path.extend(path[cursor:a])
        loop = path[a:b]
        reps = counts[l - first] if l >= first else 1
        new_path.extend(loop * (reps - 1))
        new_marks.append(len(new_path))
        new_path.extend(loop)
        new_marks.append(len(new_path))
        cursor = b
    new_path.extend(path[cursor:])
    new_marks[-1] = len(new_path)
    return PseudoRun(pr.vass, pr.init, tuple(new_path)), Decomposition(tuple(new_marks))


def pump(pr: PseudoRun, dec: Decomposition, counts: Sequence[int], context: ApproxContext) -> tuple[PseudoRun, Decomposition]:
    """Repeat loops ``context.l .. K`` the given number of times (each >= 1).

    Requires the input to satisfy the approximation property with an unbounded window.
    """
    K = dec.length
    if len(counts) != K - context.l + 1 or any(c < 1 for c in counts):
        raise ValueError(f"expected {K - context.l + 1} repetition counts, each >= 1")
    if context.bound is not None:
        raise PreconditionViolated("pumping is only sound for an unbounded window")
    if not verify(pr, dec, Approx(context)):
        raise PreconditionViolated("input does not satisfy the approximation property")
    return _pumped(pr, dec, counts, context.l)


def pseudorun_length_bound(L: int, K: int, pic: int) -> int:
    """((L*pic)^K) * (1 + K^2*L*pic) + L, with pic clamped to >= 1."""
    pic = max(1, pic)
    return (L * pic) ** K * (1 + K * K * L * pic) + L


def pseudo_to_run(pr: PseudoRun, prop: GupProperty, dec: Decomposition) -> tuple[Run, Decomposition]:
    """Turn a pseudo-run weakly satisfying ``prop`` into a run satisfying it.

    Loops are repeated from the last one to the first: loop m is repeated
    enough to lift every component whose first strictly increasing loop is m
    back to nonnegative values after the loop.
    """
    if not verify(pr, dec, GupWeak(prop)):
        raise PreconditionViolated("pseudo-run does not weakly satisfy the property")
    K = dec.length
    n = pr.vass.dim
    diffs = _row_diffs(pr, dec.marks, K)
    first_pos: dict[int, int] = {}
    for l in range(1, K + 1):
        for j in range(n):
            if diffs[l - 1][j] > 0 and j not in first_pos:
                first_pos[j] = l
    counts = [1] * K
    for m in range(K, 0, -1):
        owned = [j for j, l in first_pos.items() if l == m]
        if not owned:
            continue
        cur, cdec = _pumped(pr, dec, counts, 1)
        start = cdec.marks[2 * m]
        extra = 0
        for j in owned:
            low = min(c.values[j] for c in cur.configs[start:])
            if low < 0:
                extra = max(extra, math.ceil(-low / diffs[m - 1][j]))
        counts[m - 1] += extra
    bound = pseudorun_length_bound(len(pr), K, norms(pr.vass).pic)
    cur, cdec = _pumped(pr, dec, counts, 1)
    while not cur.is_run:
        counts = [2 * c for c in counts]
        cur, cdec = _pumped(pr, dec, counts, 1)
        if len(cur) > bound:
            raise RuntimeError("repetition counts exceeded the length bound")
    if len(cur) > bound:
        raise RuntimeError("repaired run exceeds the length bound")
    run = cur.to_run()
    return run, cdec
