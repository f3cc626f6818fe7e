import math
import random
from fractions import Fraction

import pytest

from lossyhibe import hibtdf, lossylab
from lossyhibe.errors import ParameterError
from lossyhibe.oracles import ScriptedAdversary

LOW = lossylab.eta_lower_bound


def test_eta_lower_bound_values():
    assert LOW(2, 2, 1) == Fraction(1, 16)
    assert LOW(1, 1, 1) == Fraction(1, 4)
    assert LOW(2, 2, 2) == Fraction(1, 128)
    with pytest.raises(ParameterError):
        LOW(0, 2, 1)


def test_delta_bound_values():
    assert lossylab.delta_bound(2, 2, 1) == Fraction(13, 256)
    assert lossylab.delta_bound(1, 1, 1) == Fraction(13, 64)
    assert lossylab.delta_bound(mode=hibtdf.SELECTIVE) == 1
    assert isinstance(lossylab.delta_bound(3, 2, 2), Fraction)


def test_sample_count():
    n = lossylab.sample_count(0.5, LOW(2, 2, 1))
    assert n == math.ceil(8 * 4 * math.log(2) * 16 * math.log(16))
    with pytest.raises(ParameterError):
        lossylab.sample_count(1.0, LOW(1, 1, 1))


def test_exact_eta_hand_values():
    # worked by hand: y' in {0,1}, xi in {0,1}, y2 in {0,1}
    assert lossylab.exact_eta([], ((1, 0),), 1, 2, 1) == Fraction(1, 4)
    assert lossylab.exact_eta([], ((1, 1),), 1, 2, 1) == Fraction(1, 4)
    assert lossylab.exact_eta([((1, 1),)], ((1, 0),), 1, 2, 2) == Fraction(3, 32)
    assert lossylab.exact_eta([((1, 0),)], ((1, 1),), 1, 2, 2) == Fraction(3, 32)
    # the 16-point space of the wider xi range
    assert lossylab.exact_eta([], ((1, 0),), 1, 2, 1, xi_range="wide") == Fraction(2, 16)


@pytest.mark.parametrize("mu, q", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_estimator_matches_enumeration(mu, q):
    rng = random.Random(mu * 10 + q)
    id_star = ((1,) + (0,) * (mu - 1),)
    IS = lossylab.siblings(id_star, mu, q)
    exact = lossylab.exact_eta(IS, id_star, 1, mu, q)
    est = lossylab.estimate_eta(IS, id_star, 0.5, 1, mu, q, rng, samples=20000)
    sigma = math.sqrt(float(exact * (1 - exact)) / est.samples)
    assert abs(est.eta - float(exact)) <= 3 * sigma
    assert exact >= LOW(q, mu, 1)


def test_estimate_basics():
    a = lossylab.estimate_eta([], ((1, 0),), 0.5, 1, 2, 2, random.Random(9))
    b = lossylab.estimate_eta([], ((1, 0),), 0.5, 1, 2, 2, random.Random(9))
    assert a == b
    assert 0 <= a.eta <= 1 and a.c == 8
    assert a.samples >= lossylab.sample_count(0.5, a.eta_low)


def test_preoutput_stage():
    rng = random.Random(1)
    low = LOW(2, 2, 1)
    at_low = lossylab.AbortEstimate(float(low) / 2, 1, low)
    assert all(lossylab.preoutput_stage(at_low, rng) == 1 for _ in range(1000))
    double = lossylab.AbortEstimate(float(2 * low), 1, low)
    n = 10000
    ones = sum(lossylab.preoutput_stage(double, rng) for _ in range(n))
    assert abs(ones / n - 0.5) <= 3 * math.sqrt(0.25 / n)
    assert lossylab.preoutput_stage(double, rng, mode=hibtdf.SELECTIVE) == 1


@pytest.fixture
def sel_pms(t11):
    return hibtdf.hf_setup(2, 4, 2, hibtdf.SELECTIVE, suite=t11)


def check_algebra(tr):
    assert tr.d_not_abort == (tr.d1 & tr.d2)
    assert tr.d_exp == (tr.d_A & tr.d1 & tr.d2)


@pytest.mark.parametrize("beta", [lossylab.REAL, lossylab.LOSSY])
def test_selective_experiment(sel_pms, beta):
    target = ((1, 3), (1, 4))
    adv = ScriptedAdversary(target, [("create", [(1, 5)]), ("reveal", [(1, 5)])], commit=target,
                            guess=1)
    tr = lossylab.run_experiment(beta, adv, hibtdf.SELECTIVE, sel_pms, random.Random(beta))
    assert tr.verdict == "ok" and tr.d1 == 1 and tr.d2 == 1 and tr.d_A == 1
    assert tr.IS == [((1, 5),)] and tr.id_star == target
    check_algebra(tr)


def test_image_method_agrees_with_partition(sel_pms):
    target = ((1, 3),)
    adv = ScriptedAdversary(target, [("create", [(1, 5)]), ("reveal", [(1, 5)])], commit=target, guess=0)
    for method in ("partition", "image"):
        tr = lossylab.run_experiment(1, adv, hibtdf.SELECTIVE, sel_pms, random.Random(2), d1_method=method)
        assert tr.d1 == 1
        check_algebra(tr)


def test_lossy_challenge_has_residual_lossiness(sel_pms, t11):
    target = ((1, 3), (1, 4))
    y = lossylab.aux_selective(target, 2, 2, 11)
    mpk, _ = hibtdf.hf_mkg(sel_pms, y, random.Random(0))
    assert lossylab.lossiness(sel_pms, mpk, target) >= sel_pms.n - math.log2(11)


def test_selective_prefix_reveal_is_invalid(sel_pms):
    target = ((1, 3), (1, 4))
    adv = ScriptedAdversary(target, [("create", [(1, 3)]), ("reveal", [(1, 3)])], commit=target)
    tr = lossylab.run_experiment(0, adv, hibtdf.SELECTIVE, sel_pms, random.Random(0))
    assert tr.verdict == "invalid adversary" and tr.d_exp is None


def test_adaptive_experiment(tbig):
    pms = hibtdf.hf_setup(1, 3, 2, hibtdf.ADAPTIVE, suite=tbig)
    seen = set()
    for seed in range(30):
        adv = ScriptedAdversary(((1, 0),), [("create", [(1, 1)]), ("reveal", [(1, 1)])], guess=1)
        tr = lossylab.run_experiment(1, adv, hibtdf.ADAPTIVE, pms, random.Random(seed), q=1, samples=400)
        assert tr.estimate is not None and tr.estimate.samples == 400
        check_algebra(tr)
        seen.add(tr.d1)
    assert seen == {0, 1}
    bad = ScriptedAdversary(((1, 1),), [("create", [(1, 1)]), ("reveal", [(1, 1)])])
    tr = lossylab.run_experiment(0, bad, hibtdf.ADAPTIVE, pms, random.Random(0), samples=10)
    assert tr.verdict == "invalid adversary"


def test_experiment_mode_mismatch(sel_pms):
    with pytest.raises(ParameterError):
        lossylab.run_experiment(0, ScriptedAdversary(((1, 1),)), hibtdf.ADAPTIVE, sel_pms, random.Random(0))


def test_verify_non_abort_reports():
    rep = lossylab.verify_non_abort_bound(1, 2, 1, 20000, random.Random(4), id_star=((1, 0),), exact=True)
    assert rep.exact >= Fraction(1, 8) and rep.passed
    with pytest.warns(RuntimeWarning):
        bad = lossylab.verify_non_abort_bound(1, 2, 1, 100, random.Random(0), IS=[((1, 0),)], id_star=((1, 0),))
    assert bad.empirical == 0 and bad.warning and not bad.passed


def test_verify_non_abort_depth_two():
    rep = lossylab.verify_non_abort_bound(2, 2, 2, 20000, random.Random(8), exact=True)
    assert rep.passed and rep.exact >= LOW(2, 2, 2)


def test_lossy_demo_rows(t11):
    pms = hibtdf.hf_setup(2, 6, 2, suite=t11)
    demo = lossylab.lossy_demo(pms, [(1, 3), (1, 4)], random.Random(0))
    sizes = {r.relation: [] for r in demo.rows}
    for r in demo.rows:
        sizes[r.relation].append(r.image_size)
        assert (r.verdict == "lossy") == (r.relation in ("target", "prefix"))
    assert max(sizes["target"] + sizes["prefix"]) <= 11
    assert set(sizes["non-prefix"]) == {64}
