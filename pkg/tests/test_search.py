import random

from vassprops.model import PseudoRun, Vass
from vassprops.properties import (
    GupProperty,
    GupWeak,
    Interval,
    POSITIVE,
    disjointness_sequences,
    encode_pb_sigma,
    find_decomposition,
    nonregularity_properties,
    termination_property,
    verify,
)
from vassprops.search import search_weak_witness
from oracles import all_paths
from zoo import countdown, fig_two_phase, random_vass


def shortest_by_enumeration(v, c, prop, max_len, nonempty=False):
    for length in range(max_len + 1):
        for path in all_paths(v, c.state, length):
            pr = PseudoRun(v, c, path)
            if find_decomposition(pr, GupWeak(prop), nonempty_first_loop=nonempty) is not None:
                return length
    return None


def test_two_phase_witness_is_three_steps():
    v, c = fig_two_phase()
    res = search_weak_witness(v, c, encode_pb_sigma(next(s for s in disjointness_sequences(2) if str(s) == "{1}.{2}"), 2))
    assert res.found and res.pseudo_run.path == (0, 1, 2)
    assert verify(res.pseudo_run, res.decomposition, GupWeak(encode_pb_sigma(
        next(s for s in disjointness_sequences(2) if str(s) == "{1}.{2}"), 2)))


def test_countdown_space_is_exhausted():
    v, c = countdown(5)
    res = search_weak_witness(v, c, GupProperty(((POSITIVE,),)))
    assert not res.found and res.exhausted and res.cap_hit is None


def test_caps_are_reported():
    v, c = fig_two_phase()
    impossible = GupProperty(((Interval(5, 5), Interval(5, 5)),))
    res = search_weak_witness(v, c, impossible, depth_cap=8)
    assert not res.found and not res.exhausted and res.cap_hit == "depth"
    res = search_weak_witness(v, c, impossible, state_cap=50)
    assert res.cap_hit == "states"


def test_search_returns_shortest_weak_witness():
    rng = random.Random(8)
    checked = 0
    for _ in range(120):
        v, c = random_vass(rng, max_dim=2, max_states=2, max_trans=4)
        props = nonregularity_properties(v.dim) + [
            encode_pb_sigma(s, v.dim) for s in disjointness_sequences(v.dim)
        ]
        prop = rng.choice(props)
        expected = shortest_by_enumeration(v, c, prop, 5)
        res = search_weak_witness(v, c, prop, depth_cap=40, state_cap=20000)
        if expected is not None:
            assert res.found and len(res.pseudo_run.path) == expected
            checked += 1
        elif res.found:
            assert len(res.pseudo_run.path) > 5
        if res.found:
            assert verify(res.pseudo_run, res.decomposition, GupWeak(prop))
    assert checked >= 20


def test_nonempty_first_loop_flag():
    v = Vass.vas([(0,)])
    prop, nonempty = termination_property(1)
    c = v.configuration("q", (0,))
    res = search_weak_witness(v, c, prop, nonempty_first_loop=nonempty)
    assert res.found and len(res.pseudo_run.path) == 1
    res = search_weak_witness(v, c, prop, nonempty_first_loop=False)
    assert res.found and len(res.pseudo_run.path) == 0


def test_search_is_deterministic():
    rng = random.Random(12)
    for _ in range(20):
        v, c = random_vass(rng)
        prop = nonregularity_properties(v.dim)[0]
        a = search_weak_witness(v, c, prop, depth_cap=30, state_cap=3000)
        b = search_weak_witness(v, c, prop, depth_cap=30, state_cap=3000)
        assert (a.pseudo_run, a.decomposition, a.exhausted, a.states) == (b.pseudo_run, b.decomposition, b.exhausted, b.states)
