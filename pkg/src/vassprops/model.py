"""VASS syntax, configurations, (pseudo-)runs and size measures.

A VAS is represented as a :class:`Vass` with a single control state.
Transitions are identified by their index in ``Vass.transitions``; two
transitions with the same triple are still distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from .errors import (
    BrokenPath,
    DimensionMismatch,
    EmptyModel,
    ModelError,
    NegativeCounter,
    UnknownState,
    WrongSource,
)

State = Hashable
Vector = tuple[int, ...]

VAS_STATE = "q"


@dataclass(frozen=True)
class Transition:
    source: State
    target: State
    update: Vector

    def __str__(self) -> str:
        return f"{self.source} -{list(self.update)}-> {self.target}"


@dataclass(frozen=True)
class Vass:
    states: tuple[State, ...]
    dim: int
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        if not self.states:
            raise EmptyModel("a VASS needs at least one control state")
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state identifiers")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise DimensionMismatch(f"dimension must be a positive integer, got {self.dim!r}")
        known = set(self.states)
        for k, t in enumerate(self.transitions):
            if t.source not in known:
                raise UnknownState(f"transition {k}: unknown source state {t.source!r}")
            if t.target not in known:
                raise UnknownState(f"transition {k}: unknown target state {t.target!r}")
            if len(t.update) != self.dim:
                raise DimensionMismatch(
                    f"transition {k}: update has length {len(t.update)}, expected {self.dim}"
                )

    @classmethod
    def vas(cls, updates: Iterable[Sequence[int]], dim: int | None = None) -> "Vass":
        """Build a single-state VASS from a collection of update vectors."""
        vecs = [tuple(int(x) for x in u) for u in updates]
        if dim is None:
            if not vecs:
                raise DimensionMismatch("cannot infer the dimension of an empty VAS")
            dim = len(vecs[0])
        return cls((VAS_STATE,), dim, tuple(Transition(VAS_STATE, VAS_STATE, v) for v in vecs))

    @property
    def is_vas(self) -> bool:
        return len(self.states) == 1

    @cached_property
    def outgoing(self) -> dict[State, tuple[int, ...]]:
        out: dict[State, list[int]] = {q: [] for q in self.states}
        for k, t in enumerate(self.transitions):
            out[t.source].append(k)
        return {q: tuple(ks) for q, ks in out.items()}

    def configuration(self, state: State, values: Sequence[int]) -> "Configuration":
        if state not in self.outgoing:
            raise UnknownState(f"unknown state {state!r}")
        if len(values) != self.dim:
            raise DimensionMismatch(f"expected {self.dim} values, got {len(values)}")
        return Configuration(state, tuple(int(v) for v in values))


@dataclass(frozen=True)
class PseudoConfiguration:
    state: State
    values: Vector

    @property
    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    def __str__(self) -> str:
        return f"<{self.state},({','.join(map(str, self.values))})>"


@dataclass(frozen=True)
class Configuration(PseudoConfiguration):
    def __post_init__(self):
        for i, v in enumerate(self.values):
            if v < 0:
                raise NegativeCounter(i, v)


def validate(raw: dict) -> Vass:
    """Turn a raw parse tree ``{"dim", "states", "transitions"}`` into a Vass.

    ``transitions`` holds ``(source, target, update)`` triples.
    """
    states = tuple(raw.get("states") or ())
    if not states:
        raise EmptyModel("model declares no states")
    dim = raw.get("dim")
    if dim is None:
        raise DimensionMismatch("model declares no dimension")
    trans = tuple(
        Transition(src, dst, tuple(int(x) for x in upd)) for src, dst, upd in raw.get("transitions", ())
    )
    return Vass(states, int(dim), trans)


def fire(c: Configuration, t: Transition) -> Configuration:
    if c.state != t.source:
        raise WrongSource(f"configuration is in {c.state!r}, transition leaves {t.source!r}")
    values = tuple(x + b for x, b in zip(c.values, t.update))
    return Configuration(t.target, values)


def fire_pseudo(c: PseudoConfiguration, t: Transition) -> PseudoConfiguration:
    if c.state != t.source:
        raise WrongSource(f"configuration is in {c.state!r}, transition leaves {t.source!r}")
    return PseudoConfiguration(t.target, tuple(x + b for x, b in zip(c.values, t.update)))


@dataclass(frozen=True)
class PseudoRun:
    """An initial pseudo-configuration plus a path of transition indices."""

    vass: Vass
    init: PseudoConfiguration
    path: tuple[int, ...]
    _configs: tuple[PseudoConfiguration, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self._configs:
            object.__setattr__(self, "_configs", _materialize(self.vass, self.init, self.path))

    @property
    def configs(self) -> tuple[PseudoConfiguration, ...]:
        return self._configs

    def __len__(self) -> int:
        return len(self.path) + 1

    @property
    def final(self) -> PseudoConfiguration:
        return self._configs[-1]

    @property
    def is_run(self) -> bool:
        return all(c.is_nonnegative for c in self._configs)

    def to_run(self) -> "Run":
        return Run(self.vass, Configuration(self.init.state, self.init.values), self.path)


@dataclass(frozen=True)
class Run(PseudoRun):
    def __post_init__(self):
        if not isinstance(self.init, Configuration):
            object.__setattr__(self, "init", Configuration(self.init.state, self.init.values))
        super().__post_init__()
        for c in self._configs:
            for i, v in enumerate(c.values):
                if v < 0:
                    raise NegativeCounter(i, v)


def _materialize(v: Vass, init: PseudoConfiguration, path: Sequence[int]) -> tuple[PseudoConfiguration, ...]:
    if init.state not in v.outgoing:
        raise UnknownState(f"unknown state {init.state!r}")
    if len(init.values) != v.dim:
        raise DimensionMismatch(f"expected {v.dim} values, got {len(init.values)}")
    seq = [PseudoConfiguration(init.state, tuple(init.values))]
    state, vals = init.state, list(init.values)
    for k, idx in enumerate(path):
        if not 0 <= idx < len(v.transitions):
            raise BrokenPath(k, f"step {k}: no transition with index {idx}")
        t = v.transitions[idx]
        if t.source != state:
            raise BrokenPath(k, f"step {k}: transition {idx} leaves {t.source!r}, not {state!r}")
        for i, b in enumerate(t.update):
            vals[i] += b
        state = t.target
        seq.append(PseudoConfiguration(state, tuple(vals)))
    return tuple(seq)


def replay(v: Vass, init: PseudoConfiguration, path: Sequence[int]) -> PseudoRun:
    """Materialize the pseudo-configuration sequence of ``path`` from ``init``.

    ``result.is_run`` tells whether the sequence never leaves N^n.
    """
    return PseudoRun(v, PseudoConfiguration(init.state, tuple(init.values)), tuple(path))


@dataclass(frozen=True)
class Norms:
    pic: int
    absmax: int
    size: int

    @property
    def pic_bound(self) -> int:
        return max(1, self.pic)


def vector_pic(b: Sequence[int]) -> int:
    return max((max(0, -x) for x in b), default=0)


def norms(v: Vass) -> Norms:
    pic = max((vector_pic(t.update) for t in v.transitions), default=0)
    absmax = max((abs(x) for t in v.transitions for x in t.update), default=0)
    q = len(v.states)
    # ceil(log2(1 + a)) == a.bit_length() for a >= 0
    size = q + v.dim * len(v.transitions) * (2 * q + 2 + absmax.bit_length())
    return Norms(pic, absmax, max(size, 2))
