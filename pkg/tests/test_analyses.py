import random

import pytest

from vassprops import analyses as an
from vassprops.analyses import (
    Answer,
    Options,
    bounded,
    gup_holds,
    nonregular,
    place_bounded,
    reversal_bounded,
    simultaneously_unbounded,
    strongly_prompt,
    terminates,
    weakly_reversal_bounded,
)
from vassprops.coverability import build_km
from vassprops.errors import OracleDisagreement, PreconditionViolated
from vassprops.model import Configuration, Run, Transition as T, Vass, replay
from vassprops.properties import GupProperty, Interval, POSITIVE, disjointness_sequences, encode_pb_sigma
from vassprops.reductions import PromptnessInstance
from oracles import all_paths
from zoo import countdown, fig_prompt, fig_two_phase, monotone, oscillator, random_suite, up_down

BOTH = Options(method="both", depth_cap=200, state_cap=3000)
SEARCH = Options(method="search", depth_cap=200, state_cap=3000)
YES, NO, UNKNOWN = Answer.YES, Answer.NO, Answer.UNKNOWN


def sigma(text, n):
    return next(s for s in disjointness_sequences(n) if str(s) == text)


def assert_replays(verdict, v, init):
    if isinstance(verdict.witness, Run):
        assert replay(v, init, verdict.witness.path).is_run


# -- generalized unboundedness


def test_gup_two_phase_witness():
    v, c = fig_two_phase()
    r = gup_holds(v, c, encode_pb_sigma(sigma("{1}.{2}", 2), 2))
    assert r.answer is YES and len(r.witness.path) <= 6
    assert_replays(r, v, c)


def test_gup_countdown_is_refuted_by_exhaustion():
    v, c = countdown(5)
    r = gup_holds(v, c, GupProperty(((POSITIVE,),)))
    assert r.answer is NO and "exhausted" in r.completeness_note


def test_gup_unknown_reports_bounds():
    v, c = fig_two_phase()
    r = gup_holds(v, c, GupProperty(((Interval(3, 3), Interval(3, 3)),)), Options(depth_cap=5))
    assert r.answer is UNKNOWN
    assert r.details["bounds"]["log2_closed_bound"] > 100 and r.details["depth_cap"] == 5


def test_gup_arity_check():
    v, c = fig_two_phase()
    with pytest.raises(PreconditionViolated):
        gup_holds(v, c, GupProperty(((POSITIVE,),)))


# -- simultaneous unboundedness and boundedness


@pytest.mark.parametrize("method", ["km", "search", "both"])
def test_two_phase_second_component_unbounded(method):
    v, c = fig_two_phase()
    r = simultaneously_unbounded(v, c, {1}, Options(method=method))
    assert r.answer is YES
    assert_replays(r, v, c)


def test_two_phase_first_component_via_single_set():
    v, c = fig_two_phase()
    r = simultaneously_unbounded(v, c, {0}, Options(method="search"))
    assert r.answer is YES and r.details["sigma"] == "{1}"


def test_only_decreasing_component_is_bounded():
    v = Vass.vas([(1, -1)])
    c = Configuration("q", (0, 5))
    assert simultaneously_unbounded(v, c, {1}).answer is NO
    assert simultaneously_unbounded(v, c, {1}, BOTH).answer is NO


def test_boundedness_examples():
    v, c = fig_two_phase()
    assert bounded(v, c, BOTH).answer is NO
    assert place_bounded(v, c, 1, BOTH).answer is NO
    v, c = countdown(5)
    assert bounded(v, c, BOTH).answer is YES
    assert terminates(v, c, BOTH).answer is YES
    vas = Vass.vas([(1, 0), (-1, 1)])
    assert place_bounded(vas, Configuration("q", (0, 0)), 1, BOTH).answer is NO


def test_component_set_validation():
    v, c = fig_two_phase()
    with pytest.raises(PreconditionViolated):
        simultaneously_unbounded(v, c, set())
    with pytest.raises(PreconditionViolated):
        simultaneously_unbounded(v, c, {2})


def test_naive_self_covering_witness_does_not_exist():
    # no run from A reaches a repeated state with x1 <= x2 and strict growth of component 2,
    # although component 2 is unbounded
    v, c = fig_two_phase()
    for length in range(21):
        for path in all_paths(v, c.state, length):
            pr = replay(v, c, path)
            if not pr.is_run:
                continue
            cfg = pr.configs
            for i in range(len(cfg)):
                for j in range(i + 1, len(cfg)):
                    a, b = cfg[i], cfg[j]
                    if a.state == b.state and all(x <= y for x, y in zip(a.values, b.values)):
                        assert not a.values[1] < b.values[1]
    assert simultaneously_unbounded(v, c, {1}).answer is YES


# -- termination


def test_termination_examples():
    v, c = oscillator()
    r = terminates(v, c, BOTH)
    assert r.answer is NO
    v, c = monotone()
    r = terminates(v, c)
    assert r.answer is NO and isinstance(r.witness, Run)
    assert_replays(r, v, c)
    acyclic = Vass(("a", "b"), 1, (T("a", "b", (1,)),))
    assert terminates(acyclic, Configuration("a", (0,))).answer is YES


def test_termination_with_finite_cycle_not_found_by_covering():
    # values bounded, a cycle exists only through a strictly smaller intermediate configuration
    v = Vass(("a", "b"), 1, (T("a", "b", (-1,)), T("b", "a", (1,)), T("a", "a", (-1,))))
    c = Configuration("a", (2,))
    assert terminates(v, c, BOTH).answer is NO


# -- reversal-boundedness


def test_reversal_examples():
    v, c = up_down()
    assert reversal_bounded(v, c, 0, BOTH).answer is NO
    assert weakly_reversal_bounded(v, c, 0, BOTH).answer is NO
    v, c = monotone()
    for i in range(2):
        assert reversal_bounded(v, c, i, BOTH).answer is YES
        assert weakly_reversal_bounded(v, c, i, BOTH).answer is YES
    v, c = oscillator()
    assert reversal_bounded(v, c, 0, BOTH).answer is NO
    assert weakly_reversal_bounded(v, c, 0).answer is YES
    v, c = fig_two_phase()
    assert reversal_bounded(v, c, 0).answer is YES


def test_reversal_witnesses_are_base_runs():
    v, c = up_down()
    r = weakly_reversal_bounded(v, c, 0, SEARCH)
    assert r.answer is NO and r.witness.vass is v
    assert_replays(r, v, c)


# -- regularity and promptness


def test_regularity_examples():
    v = Vass.vas([(1,), (-1,)])
    c = Configuration("q", (0,))
    r = nonregular(v, c)
    assert r.answer is YES and len(r.witness.path) == 2
    v, c = countdown(5)
    r = nonregular(v, c)
    assert r.answer is NO
    r = nonregular(Vass.vas([(1,)]), Configuration("q", (0,)))
    assert r.answer is NO


def test_regularity_exhaustion_without_prefilter():
    v = Vass.vas([(1, -1), (-1, 0)])
    r = nonregular(v, Configuration("q", (0, 3)))
    assert r.answer is NO and "exhausted" in r.completeness_note


def test_promptness_examples():
    p, c = fig_prompt()
    assert strongly_prompt(p, c, BOTH).answer is NO
    assert strongly_prompt(PromptnessInstance(p.base, frozenset()), c, BOTH).answer is YES
    v = Vass(("a", "b"), 1, (T("a", "b", (1,)), T("b", "b", (0,))))
    assert strongly_prompt(PromptnessInstance(v, frozenset({1})), Configuration("a", (0,)), BOTH).answer is NO
    assert strongly_prompt(PromptnessInstance(v, frozenset({0})), Configuration("a", (0,)), BOTH).answer is YES


# -- suite-wide invariants


SUITE = random_suite(60, seed=77)


def test_bounded_reachability_implies_reversal_boundedness():
    for v, c in SUITE:
        if build_km(v, c.state, c.values).has_omega():
            continue
        for i in range(v.dim):
            assert reversal_bounded(v, c, i).answer is YES
            assert weakly_reversal_bounded(v, c, i).answer is YES


def test_reversal_bounded_implies_weakly_reversal_bounded():
    for v, c in SUITE:
        for i in range(v.dim):
            if reversal_bounded(v, c, i).answer is YES:
                assert weakly_reversal_bounded(v, c, i).answer is YES


def test_weak_reversal_routes_agree():
    small = Options(method="both", depth_cap=60, state_cap=1500)
    definite = 0
    for v, c in random_suite(40, seed=5):
        if v.dim > 2:
            continue
        for i in range(v.dim):
            r = weakly_reversal_bounded(v, c, i, small)
            assert r.answer is not UNKNOWN
            definite += 1
    assert definite > 10


def test_termination_routes_agree():
    for v, c in SUITE:
        r = terminates(v, c, BOTH)
        assert r.definite
        assert_replays(r, v, c)


def test_verdicts_are_deterministic():
    for v, c in SUITE[:20]:
        a = simultaneously_unbounded(v, c, {0}, BOTH)
        b = simultaneously_unbounded(v, c, {0}, BOTH)
        assert (a.answer, a.witness, a.completeness_note, a.details) == (b.answer, b.witness, b.completeness_note, b.details)


def test_disagreement_is_surfaced(monkeypatch):
    v, c = fig_two_phase()
    monkeypatch.setattr(an, "_simul_search", lambda *a, **k: an.Verdict(NO, None, "search", "forced"))
    with pytest.raises(OracleDisagreement):
        simultaneously_unbounded(v, c, {1}, Options(method="both"))


def test_options_validation():
    with pytest.raises(ValueError):
        Options(method="magic")
    with pytest.raises(ValueError):
        Options(depth_cap=0)
