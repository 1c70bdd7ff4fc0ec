import random

import pytest

from vassprops.errors import MalformedDecomposition, PreconditionViolated, SearchCap
from vassprops.model import PseudoConfiguration, PseudoRun, Transition as T, Vass, norms
from vassprops.properties import (
    ANY,
    NONNEG,
    POSITIVE,
    Approx,
    ApproxContext,
    Decomposition,
    DisjointnessSequence,
    GupProperty,
    GupRun,
    GupWeak,
    Interval,
    PbSigma,
    disjointness_sequences,
    encode_pb_sigma,
    find_decomposition,
    nonregularity_properties,
    pseudo_to_run,
    pseudorun_length_bound,
    pump,
    termination_property,
    verify,
)
from gen import fitting_property, random_context, random_decomposition, random_pseudo_run
from zoo import fig_two_phase, random_vass


def seq(*sets):
    return DisjointnessSequence(tuple(frozenset(s) for s in sets))


def test_interval_membership_and_text():
    iv = Interval(-2, 3)
    assert -2 in iv and 3 in iv and 4 not in iv
    assert str(Interval.at_least(1)) == "[1,inf)"
    assert str(Interval.at_most(-1)) == "(-inf,-1]"
    assert str(ANY) == "(-inf,inf)"
    with pytest.raises(ValueError):
        Interval(3, 2)


def test_scale():
    p = GupProperty(((Interval.at_least(-7), Interval(0, 5)),))
    assert p.scale == 7
    assert GupProperty(((ANY,),)).scale == 1


def test_disjointness_sequence_enumeration():
    assert [len(list(disjointness_sequences(n))) for n in (1, 2, 3)] == [1, 5, 25]
    seqs = list(disjointness_sequences(2))
    assert [str(s) for s in seqs] == ["{1}", "{1,2}", "{2}", "{1}.{2}", "{2}.{1}"]
    ks = [len(s) for s in disjointness_sequences(3)]
    assert ks == sorted(ks)
    with pytest.raises(ValueError):
        seq({0}, {0, 1})


def test_encoding_of_two_step_sequence():
    p = encode_pb_sigma(seq({0}, {1}), 2)
    assert p.rows == ((POSITIVE, NONNEG), (ANY, POSITIVE))


def test_two_phase_witness_verifies():
    v, c = fig_two_phase()
    pr = PseudoRun(v, c, (0, 1, 2))
    dec = Decomposition((0, 0, 1, 2, 3))
    assert verify(pr, dec, PbSigma(seq({0}, {1})))
    assert verify(pr, dec, GupRun(encode_pb_sigma(seq({0}, {1}), 2)))
    assert not verify(pr, dec, PbSigma(seq({1}, {0})))
    assert find_decomposition(pr, PbSigma(seq({0}, {1}))) == dec


def test_decomposition_validation():
    with pytest.raises(MalformedDecomposition):
        Decomposition((0, 2, 1))
    with pytest.raises(MalformedDecomposition):
        Decomposition((1, 1, 2))
    v, c = fig_two_phase()
    pr = PseudoRun(v, c, (0, 1, 2))
    with pytest.raises(MalformedDecomposition):
        verify(pr, Decomposition((0, 0, 1)), GupWeak(encode_pb_sigma(seq({0}), 2)))


def test_last_mark_must_close_the_run():
    v = Vass.vas([(1,), (-2,)])
    prop = GupProperty(((POSITIVE,),))
    pr = PseudoRun(v, PseudoConfiguration("q", (0,)), (0, 1))
    with pytest.raises(MalformedDecomposition):
        verify(pr, Decomposition((0, 0, 1)), GupWeak(prop))
    # the only loops ending at the last position have effect -1 or -2
    assert find_decomposition(pr, GupWeak(prop)) is None


def test_pseudo_to_run_repairs_negative_tail():
    v = Vass(("q",), 1, (T("q", "q", (1,)), T("q", "q", (-3,))))
    prop = GupProperty(((POSITIVE,), (Interval.at_most(-1),)))
    pr = PseudoRun(v, PseudoConfiguration("q", (0,)), (0, 1))
    dec = Decomposition((0, 0, 1, 1, 2))
    assert verify(pr, dec, GupWeak(prop)) and not pr.is_run
    run, rdec = pseudo_to_run(pr, prop, dec)
    assert run.is_run and verify(run, rdec, GupRun(prop))
    assert run.path == (0, 0, 0, 1)
    assert len(run) <= pseudorun_length_bound(len(pr), 2, norms(v).pic)


def test_p3_rejects_early_negative():
    v = Vass.vas([(-1,), (2,)])
    prop = GupProperty(((POSITIVE,),))
    pr = PseudoRun(v, PseudoConfiguration("q", (0,)), (0, 1))
    assert not verify(pr, Decomposition((0, 1, 2)), GupWeak(prop))


def test_pseudo_to_run_requires_weak_witness():
    v, c = fig_two_phase()
    pr = PseudoRun(v, c, (1, 2))
    with pytest.raises(PreconditionViolated):
        pseudo_to_run(pr, encode_pb_sigma(seq({1}), 2), Decomposition((0, 1, 2)))


def test_search_budget():
    v = Vass.vas([(1,), (0,)])
    pr = PseudoRun(v, PseudoConfiguration("q", (0,)), (1,) * 30)
    mode = GupWeak(GupProperty(((POSITIVE,), (POSITIVE,), (POSITIVE,))))
    with pytest.raises(SearchCap):
        find_decomposition(pr, mode, budget=100)


def test_pb_sigma_equals_encoded_property_on_runs():
    rng = random.Random(17)
    agree = 0
    for _ in range(1500):
        v, _ = random_vass(rng, max_dim=3, max_states=2)
        pr = random_pseudo_run(rng, v, rng.randint(0, 8))
        if not pr.is_run:
            continue
        sigmas = list(disjointness_sequences(v.dim))
        sigma = rng.choice(sigmas)
        dec = random_decomposition(rng, pr, len(sigma))
        a = verify(pr, dec, PbSigma(sigma))
        b = verify(pr, dec, GupRun(encode_pb_sigma(sigma, v.dim)))
        assert a == b
        agree += a
    assert agree > 0


def test_run_satisfaction_implies_weak_satisfaction():
    rng = random.Random(23)
    for _ in range(800):
        v, _ = random_vass(rng, max_dim=2, max_states=2)
        pr = random_pseudo_run(rng, v, rng.randint(0, 8))
        K = rng.randint(1, 2)
        dec = random_decomposition(rng, pr, K)
        prop = fitting_property(rng, pr, dec)
        if verify(pr, dec, GupRun(prop)):
            assert verify(pr, dec, GupWeak(prop))


def generate_pump_cases(count, seed=31):
    rng = random.Random(seed)
    cases = []
    while len(cases) < count:
        v, _ = random_vass(rng, max_dim=2, max_states=2, max_trans=4)
        pr = random_pseudo_run(rng, v, rng.randint(2, 10))
        K = rng.randint(1, 3)
        dec = random_decomposition(rng, pr, K)
        prop = fitting_property(rng, pr, dec)
        ctx = random_context(rng, prop)
        if verify(pr, dec, Approx(ctx)):
            counts = [rng.randint(1, 4) for _ in range(K - ctx.l + 1)]
            cases.append((pr, dec, ctx, counts))
    return cases


def test_pumping_preserves_approximation():
    for pr, dec, ctx, counts in generate_pump_cases(200, seed=41):
        big, bdec = pump(pr, dec, counts, ctx)
        assert verify(big, bdec, Approx(ctx))


def test_pump_preconditions():
    v, c = fig_two_phase()
    pr = PseudoRun(v, c, (0, 1, 2))
    dec = Decomposition((0, 0, 1, 2, 3))
    prop = encode_pb_sigma(seq({0}, {1}), 2)
    ctx = ApproxContext(prop, 1, frozenset(), frozenset({0, 1}))
    big, bdec = pump(pr, dec, [3, 2], ctx)
    assert big.path == (0, 0, 0, 1, 2, 2) and bdec.marks == (0, 2, 3, 5, 6)
    with pytest.raises(PreconditionViolated):
        pump(pr, dec, [1, 1], ApproxContext(prop, 1, frozenset(), frozenset(), 5))
    with pytest.raises(ValueError):
        pump(pr, dec, [1], ctx)
    with pytest.raises(PreconditionViolated):
        pump(pr, Decomposition((0, 1, 1, 2, 3)), [1, 1], ctx)


def test_special_properties():
    props = nonregularity_properties(2)
    assert len(props) == 2 and props[1].rows[1][1] == Interval.at_most(-1)
    p, nonempty = termination_property(3)
    assert nonempty and p.rows == ((NONNEG,) * 3,)
