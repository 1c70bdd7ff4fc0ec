"""Karp-Miller coverability trees with per-branch acceleration history.

Any object with a ``dim`` attribute and a ``successors(state, vector)``
method yielding ``(label, state, vector)`` triples can be explored; plain
VASS are wrapped by :class:`VassSystem`.  Extended vectors are tuples whose
entries are ints or :data:`OMEGA`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Protocol, Sequence

from .errors import ResourceCap
from .model import Vass

DEFAULT_KM_CAP = 10**6


class _Omega:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OMEGA"

    def __str__(self) -> str:
        return "w"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()

ExtVector = tuple  # entries: int | OMEGA


def is_omega(x) -> bool:
    return x is OMEGA


def ext_add(x: ExtVector, b: Sequence[int]) -> ExtVector:
    return tuple(OMEGA if xi is OMEGA else xi + bi for xi, bi in zip(x, b))


def ext_leq(x: ExtVector, y: ExtVector) -> bool:
    """Componentwise order with OMEGA above every natural."""
    for a, b in zip(x, y):
        if b is OMEGA:
            continue
        if a is OMEGA or a > b:
            return False
    return True


def ext_lt_at(a, b) -> bool:
    if a is OMEGA:
        return False
    return b is OMEGA or a < b


def omega_positions(x: ExtVector) -> frozenset[int]:
    return frozenset(i for i, v in enumerate(x) if v is OMEGA)


def format_ext(x: ExtVector, omega: str = "w") -> str:
    return "(" + ",".join(omega if v is OMEGA else str(v) for v in x) + ")"


class System(Protocol):
    dim: int

    def successors(self, state: Hashable, vector: ExtVector) -> Iterable[tuple[Hashable, Hashable, ExtVector]]:
        ...


class VassSystem:
    """Successor function of a VASS over extended vectors; labels are transition indices."""

    def __init__(self, vass: Vass):
        self.vass = vass
        self.dim = vass.dim

    def successors(self, state, vector):
        for k in self.vass.outgoing[state]:
            t = self.vass.transitions[k]
            y = ext_add(vector, t.update)
            if all(v is OMEGA or v >= 0 for v in y):
                yield k, t.target, y


def as_system(model) -> System:
    return VassSystem(model) if isinstance(model, Vass) else model


@dataclass
class KmNode:
    id: int
    state: Hashable
    vector: ExtVector
    parent: int | None
    label: Hashable | None
    accel_history: tuple[frozenset[int], ...]
    batch: frozenset[int] = frozenset()
    depth: int = 0
    children: list[int] = field(default_factory=list)
    covered_by: int | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class KmTree:
    nodes: list[KmNode]
    dim: int

    @property
    def root(self) -> KmNode:
        return self.nodes[0]

    def __len__(self) -> int:
        return len(self.nodes)

    def ancestors(self, node: KmNode) -> Iterator[KmNode]:
        """Proper ancestors, nearest first."""
        p = node.parent
        while p is not None:
            a = self.nodes[p]
            yield a
            p = a.parent

    def branch(self, node: KmNode) -> list[KmNode]:
        """Nodes from the root down to ``node``."""
        out = [node, *self.ancestors(node)]
        out.reverse()
        return out

    def labels(self, node: KmNode) -> list:
        return [n.label for n in self.branch(node)[1:]]

    def has_omega(self) -> bool:
        return any(omega_positions(n.vector) for n in self.nodes)


def build_km(
    model,
    init_state: Hashable,
    init_vector: Sequence[int],
    cap: int = DEFAULT_KM_CAP,
    subsumption: str = "ancestors",
) -> KmTree:
    """Breadth-first Karp-Miller tree.

    A new node is accelerated against every ancestor with the same state that
    it dominates (repeated until no further component changes); the set of
    components turned to OMEGA by that step forms one batch of the branch's
    acceleration history.  A node whose extended vector is covered by an
    ancestor with the same state is not expanded.

    With ``subsumption="global"`` a node is also left unexpanded when any
    expanded-or-queued node with the same state covers it.  Every reachable
    configuration is still covered by some node, so OMEGA detection is
    unaffected, but the tree can be far smaller.  Acceleration histories of
    individual branches may differ between the two modes.
    """
    if subsumption not in ("ancestors", "global"):
        raise ValueError(f"unknown subsumption mode {subsumption!r}")
    live: dict = {}
    system = as_system(model)
    root = KmNode(0, init_state, tuple(init_vector), None, None, ())
    nodes = [root]
    live.setdefault(init_state, []).append(root)
    queue = deque([0])
    tree = KmTree(nodes, system.dim)
    while queue:
        node = nodes[queue.popleft()]
        if node.covered_by is not None:
            continue
        lineage = [node, *tree.ancestors(node)]
        for label, state, vec in system.successors(node.state, node.vector):
            vec = list(vec)
            batch: set[int] = set()
            changed = True
            while changed:
                changed = False
                for a in lineage:
                    if a.state != state or not ext_leq(a.vector, vec):
                        continue
                    for i, (av, yv) in enumerate(zip(a.vector, vec)):
                        if yv is not OMEGA and av < yv:
                            vec[i] = OMEGA
                            batch.add(i)
                            changed = True
            vec = tuple(vec)
            history = node.accel_history + ((frozenset(batch),) if batch else ())
            child = KmNode(len(nodes), state, vec, node.id, label, history, frozenset(batch), node.depth + 1)
            for a in lineage:
                if a.state == state and ext_leq(vec, a.vector):
                    child.covered_by = a.id
                    break
            if child.covered_by is None and subsumption == "global":
                for other in live.get(state, ()):
                    if ext_leq(vec, other.vector):
                        child.covered_by = other.id
                        break
            if child.covered_by is None:
                live.setdefault(state, []).append(child)
            nodes.append(child)
            node.children.append(child.id)
            if len(nodes) > cap:
                raise ResourceCap(f"Karp-Miller tree exceeded {cap} nodes", cap)
            if child.covered_by is None:
                queue.append(child.id)
    return tree


def simultaneously_unbounded_km(tree: KmTree, components: Iterable[int]) -> list[KmNode] | None:
    """Branch to the first node carrying OMEGA on every given component, if any."""
    comps = frozenset(components)
    for n in tree.nodes:
        if comps <= omega_positions(n.vector):
            return tree.branch(n)
    return None


def disjointness_witness_km(
    tree: KmTree, predicate: Callable[[tuple[frozenset[int], ...]], bool]
) -> tuple[list[KmNode], tuple[frozenset[int], ...]] | None:
    """First node (in creation order) whose acceleration history has a prefix satisfying ``predicate``."""
    for n in tree.nodes:
        h = n.accel_history
        for k in range(1, len(h) + 1):
            if predicate(h[:k]):
                return tree.branch(n), h[:k]
    return None


def self_covering_pair_km(tree: KmTree) -> tuple[KmNode, KmNode] | None:
    """A node together with a proper ancestor of the same state that it covers."""
    for n in tree.nodes:
        for a in tree.ancestors(n):
            if a.state == n.state and ext_leq(a.vector, n.vector):
                return a, n
    return None


def to_dot(tree: KmTree, name: str = "km") -> str:
    """Graphviz rendering; OMEGA is written as ``w`` and accelerating edges are dashed."""
    lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
    for n in tree.nodes:
        label = f"{n.state}\\n{format_ext(n.vector)}".replace('"', '\\"')
        style = ", style=dotted" if n.covered_by is not None else ""
        lines.append(f'  n{n.id} [label="{label}"{style}];')
    for n in tree.nodes:
        if n.parent is None:
            continue
        attrs = [f'label="{n.label}"']
        if n.batch:
            attrs.append("style=dashed")
        lines.append(f"  n{n.parent} -> n{n.id} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
