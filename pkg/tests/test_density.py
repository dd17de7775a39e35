import math

import pytest

import oracles
from gaplab import (InvalidArgumentError, SequenceKind, ThresholdCurve,
                    chain_report, chain_sweep, delta_series, density_report,
                    density_series, plan_segments, threshold)

PRIMES = SequenceKind.PRIMES
SQUAREFREE = SequenceKind.SQUAREFREE

# frozen via 30-digit evaluation of log(2)^2.1 and log(11)^2.5
LOG2_POW_21 = 0.463162583984522451
LOG11_POW_25 = 8.90380271924910308


def test_threshold_values():
    c = ThresholdCurve.for_kind(PRIMES, 0.1)
    assert threshold(c, 2) == pytest.approx(LOG2_POW_21, rel=1e-15)
    c5 = ThresholdCurve.for_kind(PRIMES, 0.5)
    assert threshold(c5, 11) == pytest.approx(LOG11_POW_25, rel=1e-15)
    assert threshold(c5, 11) > 4  # d(11) = 4 obeys this curve
    assert threshold(c, 1) == 0.0


def test_threshold_turning_point():
    c = ThresholdCurve.for_kind(PRIMES, 0.0)
    assert c.turning_point == pytest.approx(math.e ** 2, rel=1e-15)
    assert ThresholdCurve.for_kind(SQUAREFREE, 0.25).turning_point == pytest.approx(
        math.e ** 1.25, rel=1e-15)


@pytest.mark.parametrize("eps", [0.0, 0.1, 1.0])
def test_q_derivative_sign_split(eps):
    c = ThresholdCurve.for_kind(PRIMES, eps)
    t_star = c.turning_point
    for t in [1.5, 2.0, t_star * 0.9, t_star * 0.999]:
        if t > 1.0:
            assert c.q_derivative(t) > 0
    for t in [t_star * 1.001, t_star * 1.5, 100.0, 1e6, 1e12]:
        assert c.q_derivative(t) < 0


def test_curve_validation():
    with pytest.raises(InvalidArgumentError):
        ThresholdCurve.for_kind(PRIMES, -0.5)
    with pytest.raises(InvalidArgumentError):
        ThresholdCurve.for_kind(PRIMES, 0.1, scale=0.5)


def test_density_example_eps01_x100():
    plan = plan_segments(100, 64, PRIMES)
    rep = density_report(plan, 0.1, 100)
    assert rep.total == 25
    assert rep.n_eps == 24
    assert rep.delta == 0.04
    assert rep.violator_count == 1
    assert [v.term for v in rep.violators] == [2]
    assert rep.n_eps + rep.violator_count == rep.total


def test_density_against_bruteforce_squarefree():
    plan = plan_segments(100, 64, SQUAREFREE)
    rep = density_report(plan, 0.5, 100, scale=2.0)
    sf = oracles.squarefree_upto(100)
    want = [(t, g) for t, g in oracles.gaps(sf) if g > 2 * math.log(t) ** 1.5]
    assert rep.violator_count == len(want)
    assert [v.term for v in rep.violators] == [t for t, _ in want]
    assert rep.total == 61


def test_density_rejects_bad_args():
    plan = plan_segments(100, 64, PRIMES)
    with pytest.raises(InvalidArgumentError):
        density_report(plan, -1.0, 100)
    with pytest.raises(InvalidArgumentError):
        density_report(plan, 0.1, 1)
    with pytest.raises(InvalidArgumentError):
        density_report(plan, 0.1, 200)


def test_delta_monotone_in_epsilon():
    plan = plan_segments(10**4, 1 << 10, PRIMES)
    deltas = [density_report(plan, eps, 10**4).delta
              for eps in (0.0, 0.1, 0.25, 0.5, 1.0, 2.0)]
    for a, b in zip(deltas, deltas[1:]):
        assert b <= a


def test_delta_series_prime_trend():
    plan = plan_segments(10**4, 1 << 10, PRIMES)
    series = delta_series(plan, 0.1, [10**2, 10**3, 10**4])
    assert series[0] == (100, 1 / 25)
    assert series[1][1] <= 0.04
    values = [d for _, d in series]
    assert values == sorted(values, reverse=True)


def test_delta_series_squarefree_trend():
    plan = plan_segments(10**5, 1 << 14, SQUAREFREE)
    series = delta_series(plan, 0.1, [10**3, 10**4, 10**5])
    values = [d for _, d in series]
    assert values == sorted(values, reverse=True)


def test_delta_series_empty_checkpoints():
    plan = plan_segments(100, 64, PRIMES)
    assert delta_series(plan, 0.1, []) == []


def test_large_epsilon_violators_only_two():
    plan = plan_segments(10**4, 1 << 10, PRIMES)
    rep = density_report(plan, 1.0, 10**4)
    assert [v.term for v in rep.violators] == [2]
    assert rep.delta == rep.violator_count / rep.total


def test_chain_example_eps01_x100():
    plan = plan_segments(100, 64, PRIMES)
    rep = chain_report(plan, 0.1, 100)
    assert rep.violator_recip_sum == 1.0  # d(2)/2
    q100 = math.log(100) ** 2.1 / 100
    q2 = LOG2_POW_21 / 2
    assert rep.boundary_term == pytest.approx(q100, rel=1e-14)
    assert rep.integral_term == pytest.approx(-(q100 - q2), rel=1e-13)
    assert rep.violator_recip_sum + 1e-9 >= rep.boundary_term + rep.integral_term
    assert rep.full_sum >= rep.violator_recip_sum >= 0
    assert rep.m_eps_estimate >= -rep.integral_term


def test_chain_empty_violator_set():
    # scale 10 pushes the threshold above the first gap, emptying the set
    plan = plan_segments(10, 64, PRIMES)
    rep = chain_report(plan, 1.0, 10, scale=10.0)
    assert rep.violator_recip_sum == 0.0
    assert rep.boundary_term == 0.0
    assert rep.integral_term == 0.0
    assert rep.m_eps_estimate == 0.0


def test_chain_sweep_running_m_eps():
    plan = plan_segments(10**5, 1 << 14, PRIMES)
    for eps in (0.1, 0.5, 1.0):
        reports = chain_sweep(plan, eps, [10**3, 10**4, 10**5])
        m = [r.m_eps_estimate for r in reports]
        assert m == sorted(m)
        assert math.isfinite(m[-1])
        for r in reports:
            assert r.violator_recip_sum + 1e-9 >= r.boundary_term + r.integral_term
            assert r.integral_term >= -r.m_eps_estimate
            assert r.full_sum >= r.violator_recip_sum >= 0


def test_chain_x_below_second_term():
    plan = plan_segments(100, 64, PRIMES)
    with pytest.raises(InvalidArgumentError):
        chain_report(plan, 0.1, 2)


def test_density_series_combined():
    plan = plan_segments(10**4, 1 << 10, PRIMES)
    rows = density_series(plan, 0.1, [100, 10**4], with_chain=True)
    assert [r.x for r, _ in rows] == [100, 10**4]
    rep, chain = rows[0]
    assert rep.delta == 0.04
    assert chain is not None and chain.x == 100
    single = chain_report(plan, 0.1, 100)
    assert chain.boundary_term == pytest.approx(single.boundary_term, rel=1e-14)
    assert chain.integral_term == pytest.approx(single.integral_term, rel=1e-13)


def test_density_threads_do_not_change_values():
    plan = plan_segments(10**5, 1 << 12, PRIMES)
    a = density_report(plan, 0.1, 10**5, threads=1)
    b = density_report(plan, 0.1, 10**5, threads=4)
    assert a == b
