"""Decision procedures combining Karp-Miller trees and bounded witness search.

Every procedure returns a :class:`Verdict`.  ``Yes`` and ``No`` answers are
always justified, either by a witness (a replayable run or a Karp-Miller
branch) or by a completeness argument recorded in ``completeness_note``.
``Unknown`` only arises when a cap was hit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Hashable, Iterable, Sequence

from .bounds import DEFAULT_C, DEFAULT_C1, BoundParams, bound_summary, log2_rackoff_closed_bound
from .coverability import (
    DEFAULT_KM_CAP,
    KmNode,
    KmTree,
    build_km,
    disjointness_witness_km,
    omega_positions,
    self_covering_pair_km,
    simultaneously_unbounded_km,
)
from .errors import OracleDisagreement, PreconditionViolated, ResourceCap
from .model import Configuration, Run, Vass, norms
from .properties import (
    DisjointnessSequence,
    GupProperty,
    disjointness_sequences,
    encode_pb_sigma,
    nonregularity_properties,
    pseudo_to_run,
    termination_property,
)
from .reductions import GatedRbProduct, PromptnessInstance, RbProduct, project_rb_path, promptness_reduction
from .search import DEFAULT_DEPTH_CAP, DEFAULT_STATE_CAP, search_weak_witness

METHODS = ("km", "search", "both")


class Answer(str, Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def negate(self) -> "Answer":
        if self is Answer.YES:
            return Answer.NO
        if self is Answer.NO:
            return Answer.YES
        return self

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Options:
    method: str = "km"
    depth_cap: int = DEFAULT_DEPTH_CAP
    state_cap: int = DEFAULT_STATE_CAP
    km_cap: int = DEFAULT_KM_CAP
    c1: int = DEFAULT_C1
    c: int = DEFAULT_C

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        if min(self.depth_cap, self.state_cap, self.km_cap) < 1:
            raise ValueError("caps must be positive")


@dataclass
class Verdict:
    answer: Answer
    witness: Run | list[KmNode] | None
    method: str
    completeness_note: str
    details: dict = field(default_factory=dict)

    @property
    def definite(self) -> bool:
        return self.answer is not Answer.UNKNOWN

    def negated(self) -> "Verdict":
        return replace(self, answer=self.answer.negate())


# -- helpers -----------------------------------------------------------------


@lru_cache(maxsize=64)
def _km(model, state: Hashable, vector: tuple, cap: int, subsumption: str) -> KmTree:
    return build_km(model, state, vector, cap, subsumption)


def _km_tree(model, state, vector, options: Options, subsumption: str = "global") -> KmTree | Verdict:
    try:
        return _km(model, state, tuple(vector), options.km_cap, subsumption)
    except ResourceCap as e:
        return Verdict(Answer.UNKNOWN, None, "km", f"cap hit: {e}", {"km_cap": options.km_cap})


def _combine(km_v: Verdict, search_v: Verdict, what: str) -> Verdict:
    if km_v.definite and search_v.definite and km_v.answer is not search_v.answer:
        raise OracleDisagreement(
            f"{what}: Karp-Miller says {km_v.answer}, witness search says {search_v.answer}"
        )
    lead = km_v if km_v.definite else search_v
    witness = search_v.witness if isinstance(search_v.witness, Run) else lead.witness
    if witness is None:
        witness = km_v.witness
    notes = f"km: {km_v.completeness_note}; search: {search_v.completeness_note}"
    details = {**km_v.details, **search_v.details}
    return Verdict(lead.answer, witness, "both", notes, details)


def _dispatch(km_fn, search_fn, options: Options, what: str) -> Verdict:
    if options.method == "km":
        return km_fn()
    if options.method == "search":
        return search_fn()
    return _combine(km_fn(), search_fn(), what)


def completeness_params(v: Vass, prop: GupProperty, options: Options) -> BoundParams:
    """Bound parameters of the single-state image on which the length bound is stated."""
    nm = norms(v)
    n, absmax, pic = v.dim, max(1, nm.absmax), nm.pic
    if len(v.states) > 1:
        k = len(v.states)
        n += 3
        absmax = max(absmax, (k + 1) ** 2)
        pic = max(pic, (k + 1) ** 2)
    return BoundParams(max(n, 2), prop.length, absmax, prop.scale, pic, options.c1, options.c)


def _cap_reached_bound(depth_cap: int, p: BoundParams) -> bool:
    return math.log2(depth_cap) >= log2_rackoff_closed_bound(p)


# -- generalized unboundedness -----------------------------------------------


def gup_holds(
    v: Vass,
    init: Configuration,
    prop: GupProperty,
    options: Options = Options(),
    nonempty_first_loop: bool = False,
    show_bounds: bool = False,
) -> Verdict:
    """Does some run from ``init`` satisfy ``prop``?  Decided by witness search."""
    if prop.dim != v.dim:
        raise PreconditionViolated(f"property has arity {prop.dim}, model has dimension {v.dim}")
    res = search_weak_witness(v, init, prop, options.depth_cap, options.state_cap, nonempty_first_loop)
    details: dict = {"states_explored": res.states}
    params = completeness_params(v, prop, options)
    if show_bounds:
        details["bounds"] = bound_summary(params)
    if res.found:
        run, dec = pseudo_to_run(res.pseudo_run, prop, res.decomposition)
        details["decomposition"] = list(dec.marks)
        details["pseudo_run_length"] = len(res.pseudo_run.path)
        return Verdict(Answer.YES, run, "search", "witness run found", details)
    if res.exhausted:
        return Verdict(Answer.NO, None, "search", "search space exhausted", details)
    if _cap_reached_bound(options.depth_cap, params):
        return Verdict(Answer.NO, None, "search", "search exhausted to completeness bound", details)
    details["bounds"] = bound_summary(params)
    details["depth_cap"] = options.depth_cap
    details["state_cap"] = options.state_cap
    return Verdict(
        Answer.UNKNOWN,
        None,
        "search",
        f"cap hit ({res.cap_hit}) below the completeness bound",
        details,
    )


# -- simultaneous unboundedness ----------------------------------------------


def _check_components(X: Iterable[int], dim: int) -> frozenset[int]:
    X = frozenset(X)
    if not X or any(not 0 <= i < dim for i in X):
        raise PreconditionViolated(f"component set must be a nonempty subset of 0..{dim - 1}")
    return X


def candidate_sequences(v: Vass, X: frozenset[int]) -> list[DisjointnessSequence]:
    """Disjointness sequences relevant for X, skipping those needing a never-incremented component."""
    incremented = {j for t in v.transitions for j, b in enumerate(t.update) if b > 0}
    return [
        s
        for s in disjointness_sequences(v.dim)
        if X <= s.union and X & s.sets[-1] and s.union <= incremented
    ]


def _simul_km(model, state, vector, X, options: Options) -> Verdict:
    tree = _km_tree(model, state, vector, options)
    if isinstance(tree, Verdict):
        return tree
    branch = simultaneously_unbounded_km(tree, X)
    details = {"km_nodes": len(tree)}
    if branch is not None:
        return Verdict(Answer.YES, branch, "km", "Karp-Miller node with omega on all components", details)
    return Verdict(Answer.NO, None, "km", "complete Karp-Miller tree has no such node", details)


def _cap_schedule(state_cap: int) -> list[int]:
    caps = []
    c = 1000
    while c < state_cap:
        caps.append(c)
        c *= 10
    return caps + [state_cap]


def _search_any(v: Vass, init: Configuration, props: list[tuple[object, GupProperty]], options: Options) -> Verdict:
    """First candidate with a witness, raising the state cap for all open candidates in rounds.

    Yes as soon as one candidate has a witness; No when every candidate is
    definitely refuted; otherwise the last Unknown.
    """
    open_ = list(props)
    last_unknown = None
    for cap in _cap_schedule(options.state_cap):
        round_opts = replace(options, state_cap=cap)
        still_open = []
        for tag, prop in open_:
            r = gup_holds(v, init, prop, round_opts)
            if r.answer is Answer.YES:
                r.details["candidate"] = str(tag)
                return r
            if r.answer is Answer.UNKNOWN:
                still_open.append((tag, prop))
                last_unknown = r
        open_ = still_open
        if not open_:
            return Verdict(Answer.NO, None, "search", "every candidate refuted (search exhausted)")
    return last_unknown


def _simul_search(v: Vass, init: Configuration, X, options: Options) -> Verdict:
    cands = [(s, encode_pb_sigma(s, v.dim)) for s in candidate_sequences(v, X)]
    if not cands:
        return Verdict(Answer.NO, None, "search", "no candidate sequence: a component of X is never incremented")
    r = _search_any(v, init, cands, options)
    if r.answer is Answer.YES:
        r.details["sigma"] = r.details.pop("candidate")
        r.completeness_note = f"witness run for sigma = {r.details['sigma']}"
    return r


def simultaneously_unbounded(
    v: Vass, init: Configuration, X: Iterable[int], options: Options = Options()
) -> Verdict:
    """Is ``init`` simultaneously unbounded on the (0-based) components X?"""
    X = _check_components(X, v.dim)
    return _dispatch(
        lambda: _simul_km(v, init.state, init.values, X, options),
        lambda: _simul_search(v, init, X, options),
        options,
        f"simultaneous unboundedness of {sorted(X)}",
    )


def place_bounded(v: Vass, init: Configuration, i: int, options: Options = Options()) -> Verdict:
    return simultaneously_unbounded(v, init, {i}, options).negated()


def bounded(v: Vass, init: Configuration, options: Options = Options()) -> Verdict:
    def km():
        tree = _km_tree(v, init.state, init.values, options)
        if isinstance(tree, Verdict):
            return tree
        for node in tree.nodes:
            if omega_positions(node.vector):
                return Verdict(
                    Answer.NO, tree.branch(node), "km", "Karp-Miller node with omega", {"km_nodes": len(tree)}
                )
        return Verdict(Answer.YES, None, "km", "complete Karp-Miller tree is omega-free", {"km_nodes": len(tree)})

    def search():
        seqs: dict = {}
        for i in range(v.dim):
            for sq in candidate_sequences(v, frozenset({i})):
                seqs.setdefault(sq, None)
        if not seqs:
            return Verdict(Answer.YES, None, "search", "no component is ever incremented")
        r = _search_any(v, init, [(sq, encode_pb_sigma(sq, v.dim)) for sq in seqs], options)
        if r.answer is Answer.YES:
            r.details["sigma"] = r.details.pop("candidate")
            r.completeness_note = f"unboundedness witness for sigma = {r.details['sigma']}"
        elif r.answer is Answer.NO:
            r.completeness_note = "no component has an unboundedness witness (search exhausted)"
        return r.negated()

    return _dispatch(km, search, options, "boundedness")


# -- termination ---------------------------------------------------------------


def _control_cycle_path(v: Vass, start) -> list[int] | None:
    """Transition indices from ``start`` to and around a reachable control cycle."""
    colour: dict = {start: 1}
    stack = [(start, iter(v.outgoing[start]))]
    path: list[int] = []
    while stack:
        q, it = stack[-1]
        k = next(it, None)
        if k is None:
            colour[q] = 2
            stack.pop()
            if path:
                path.pop()
            continue
        r = v.transitions[k].target
        if colour.get(r) == 1:
            return path + [k]
        if r not in colour:
            colour[r] = 1
            path.append(k)
            stack.append((r, iter(v.outgoing[r])))
    return None


def _finite_cycle_run(v: Vass, init: Configuration, cap: int) -> list[int] | None | Verdict:
    """Depth-first search of a finite reachability graph for a repeated configuration."""
    start = (init.state, tuple(init.values))
    colour = {start: 1}
    path: list[int] = []

    def succ(cfg):
        q, vals = cfg
        for k in v.outgoing[q]:
            t = v.transitions[k]
            y = tuple(a + b for a, b in zip(vals, t.update))
            if min(y, default=0) >= 0:
                yield k, (t.target, y)

    stack = [(start, succ(start))]
    while stack:
        cfg, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            colour[cfg] = 2
            stack.pop()
            if path:
                path.pop()
            continue
        k, child = nxt
        if colour.get(child) == 1:
            return path + [k]
        if child not in colour:
            if len(colour) >= cap:
                return Verdict(Answer.UNKNOWN, None, "km", f"cap hit: reachability graph exceeds {cap} nodes")
            colour[child] = 1
            path.append(k)
            stack.append((child, succ(child)))
    return None


def terminates(v: Vass, init: Configuration, options: Options = Options()) -> Verdict:
    """Is every run from ``init`` finite?"""
    cycle = _control_cycle_path(v, init.state)
    if cycle is None:
        return Verdict(Answer.YES, None, options.method, "control graph reachable from the initial state is acyclic")
    if all(b >= 0 for t in v.transitions for b in t.update):
        run = Run(v, init, tuple(cycle))
        return Verdict(Answer.NO, run, options.method, "nonnegative updates with a reachable control cycle")

    def km():
        tree = _km_tree(v, init.state, init.values, options)
        if isinstance(tree, Verdict):
            return tree
        pair = self_covering_pair_km(tree)
        if pair is not None:
            a, node = pair
            branch = tree.branch(node)
            witness: Run | list[KmNode] = branch
            if not tree.has_omega():
                witness = Run(v, init, tuple(tree.labels(node)))
            return Verdict(Answer.NO, witness, "km", "self-covering Karp-Miller branch", {"km_nodes": len(tree)})
        found = _finite_cycle_run(v, init, options.km_cap)
        if isinstance(found, Verdict):
            return found
        if found is not None:
            return Verdict(Answer.NO, Run(v, init, tuple(found)), "km", "repeated configuration in finite run space")
        return Verdict(Answer.YES, None, "km", "finite run space exhausted without a cycle")

    def search():
        prop, nonempty = termination_property(v.dim)
        r = gup_holds(v, init, prop, options, nonempty_first_loop=nonempty)
        r.completeness_note = {
            Answer.YES: "self-covering witness run found",
            Answer.NO: "no self-covering pseudo-run (search exhausted)",
        }.get(r.answer, r.completeness_note)
        return r.negated()

    return _dispatch(km, search, options, "termination")


# -- reversal-boundedness --------------------------------------------------------


def _project_witness(v: Vass, init: Configuration, product: Vass, r: Verdict) -> Verdict:
    if isinstance(r.witness, Run) and r.witness.vass is product:
        r.witness = Run(v, init, project_rb_path(v, product, r.witness.path))
    return r


def _check_index(i: int, dim: int) -> None:
    if not 0 <= i < dim:
        raise PreconditionViolated(f"component {i} outside 0..{dim - 1}")


def reversal_bounded(v: Vass, init: Configuration, i: int, options: Options = Options()) -> Verdict:
    """Is the number of reversals of component i bounded over all runs from ``init``?"""
    _check_index(i, v.dim)
    prod = RbProduct(v)
    state, vec = prod.initial(init)
    target = frozenset({v.dim + i})

    def search():
        pv = prod.to_vass(state)
        return _project_witness(v, init, pv, _simul_search(pv, Configuration(state, vec), target, options))

    r = _dispatch(
        lambda: _simul_km(prod, state, vec, target, options),
        search,
        options,
        f"reversal counter {i}",
    )
    return r.negated()


def weak_rb_predicate(n: int, i: int):
    """Acceleration-history test: the reversal counter of i accelerates after i did."""

    def pred(history: Sequence[frozenset[int]]) -> bool:
        return n + i in history[-1] and any(i in batch for batch in history[:-1])

    return pred


def weakly_reversal_bounded(v: Vass, init: Configuration, i: int, options: Options = Options()) -> Verdict:
    """Are reversals of component i bounded once those made at values below some B are ignored?"""
    _check_index(i, v.dim)
    n = v.dim
    prod = RbProduct(v)
    state, vec = prod.initial(init)

    def km():
        tree = _km_tree(GatedRbProduct(v), state, vec, options)
        if isinstance(tree, Verdict):
            return tree
        hit = disjointness_witness_km(tree, weak_rb_predicate(n, i))
        details = {"km_nodes": len(tree)}
        if hit is not None:
            branch, _ = hit
            return Verdict(Answer.YES, branch, "km", "component grows before its reversals accelerate", details)
        return Verdict(Answer.NO, None, "km", "no acceleration history matches", details)

    def search():
        pv = prod.to_vass(state)
        pinit = Configuration(state, vec)
        incremented = {j for t in pv.transitions for j, b in enumerate(t.update) if b > 0}
        cands = [
            (s, encode_pb_sigma(s, 2 * n))
            for s in disjointness_sequences(2 * n)
            if n + i in s.sets[-1] and any(i in x for x in s.sets[:-1]) and s.union <= incremented
        ]
        if not cands:
            return Verdict(Answer.NO, None, "search", "no candidate sequence")
        r = _search_any(pv, pinit, cands, options)
        if r.answer is Answer.YES:
            r.details["sigma"] = r.details.pop("candidate")
        return _project_witness(v, init, pv, r)

    return _dispatch(km, search, options, f"weak reversal counter {i}").negated()


# -- regularity and promptness ---------------------------------------------------


def nonregular(v: Vass, init: Configuration, options: Options = Options()) -> Verdict:
    """Is there a run with a strictly increasing loop followed by a loop strictly decreasing the same component?"""
    props = nonregularity_properties(v.dim)
    live = [
        i
        for i in range(v.dim)
        if any(t.update[i] > 0 for t in v.transitions) and any(t.update[i] < 0 for t in v.transitions)
    ]
    if not live:
        # the answer is No regardless; a small exhaustive search upgrades the note when it succeeds
        note = "no component is both incremented and decremented"
        if any(t.update[i] < 0 for t in v.transitions for i in range(v.dim)):
            res = search_weak_witness(v, init, props[0], options.depth_cap, min(options.state_cap, 2000))
            if res.exhausted:
                note = "run space exhausted; " + note
        return Verdict(Answer.NO, None, "search", note)
    r = _search_any(v, init, [(i, props[i]) for i in live], options)
    if r.answer is Answer.YES:
        r.details["component"] = int(r.details.pop("candidate"))
    return r


def strongly_prompt(p: PromptnessInstance, init: Configuration, options: Options = Options()) -> Verdict:
    """Is there a uniform bound on internal-only segments after any reachable configuration?"""
    image, image_init, extra = promptness_reduction(p, init)
    return simultaneously_unbounded(image, image_init, {extra}, options).negated()
