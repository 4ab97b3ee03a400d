import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coopsense import analytic as an
from coopsense.channel import Awgn, Lognormal, Nakagami, Rayleigh, SensingParams
from coopsense.errors import DomainError
from coopsense.fusion import WeightVector, egc_weights
from coopsense.montecarlo import (BLOCK_SIZE, Egc, SimEstimate, SimScenario, WcAdaptive, WcFixed,
                                  simulate, simulate_counts, simulate_curve)

G6 = 10 ** 0.6
D3 = (500.0, 1000.0, 1500.0)


def within_3sigma(p_hat, p, trials):
    return abs(p_hat - p) <= 3 * math.sqrt(p * (1 - p) / trials)


@pytest.mark.slow
def test_awgn_egc_million_trials():
    lam = an.threshold_for_pf(0.063, 3, 1)
    sc = SimScenario(SensingParams(1, 3, 4.0, lam), Awgn(G6), D3, Egc(), 10 ** 6, 2024)
    est = simulate(sc)
    assert within_3sigma(est.psi_d_hat, an.psi_d_awgn(lam, 3, 1, 3 * G6), est.trials)
    assert within_3sigma(est.psi_f_hat, 0.063, est.trials)


def test_lambda_zero_detects_everything():
    for model in (Awgn(G6), Rayleigh(G6), Nakagami(2, G6), Lognormal(1.0, 6.0)):
        est = simulate(SimScenario(SensingParams(1, 3, 4.0, 0.0), model, D3, Egc(), 3000, 1))
        assert est.psi_d_hat == 1.0 and est.psi_f_hat == 1.0


def test_unit_fixed_weights_equal_egc_bitwise():
    p = SensingParams(2, 3, 4.0, 14.0)
    a = simulate(SimScenario(p, Rayleigh(G6), D3, Egc(), 20000, 77))
    b = simulate(SimScenario(p, Rayleigh(G6), D3, WcFixed(egc_weights(3)), 20000, 77))
    assert a == b


def test_one_point_curve_equals_simulate():
    sc = SimScenario(SensingParams(1, 3, 4.0, 9.0), Nakagami(2, G6), D3, WcAdaptive(), 12000, 8)
    assert simulate_curve(sc, [9.0])[0][1] == simulate(sc)


@pytest.mark.parametrize("mode", [Egc(), WcAdaptive(), WcFixed(WeightVector.from_weights([0.5, 2.0, 1.0]))],
                         ids=lambda m: m.name)
def test_curve_monotone(mode):
    sc = SimScenario(SensingParams(1, 3, 4.0), Lognormal(1.0, 6.0), D3, mode, 10000, 4)
    ests = [e for _, e in simulate_curve(sc, np.linspace(0.2, 40, 30))]
    assert np.all(np.diff([e.psi_d_hat for e in ests]) <= 0)
    assert np.all(np.diff([e.psi_f_hat for e in ests]) <= 0)


def test_rayleigh_egc_curve_traced():
    n, r = 3, 1
    lams = sorted(an.threshold_for_pf(p, n, r) for p in np.logspace(-3, -0.05, 20))
    sc = SimScenario(SensingParams(r, n, 4.0), Rayleigh(G6), D3, Egc(), 10 ** 5, 31)
    for lam, est in simulate_curve(sc, lams):
        assert within_3sigma(est.psi_d_hat, an.psi_d_rayleigh(lam, n, r, G6, n), est.trials)
        assert within_3sigma(est.psi_f_hat, an.psi_f(lam, n, r), est.trials)


def test_worker_count_does_not_matter():
    sc = SimScenario(SensingParams(1, 3, 4.0), Rayleigh(G6), D3, WcAdaptive(), 3 * BLOCK_SIZE + 17, 99)
    grid = [2.0, 6.0, 11.0]
    assert simulate_curve(sc, grid, workers=1) == simulate_curve(sc, grid, workers=4)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(1, 20000), min_size=1, max_size=5))
def test_partition_invariance(cuts):
    trials = 20000
    sc = SimScenario(SensingParams(1, 2, 4.0), Nakagami(2, G6), (400.0, 900.0), WcAdaptive(), trials, 5)
    grid = [1.0, 4.0, 9.0]
    edges = sorted({0, trials, *cuts})
    det = np.zeros(3, dtype=np.int64)
    fa = np.zeros(3, dtype=np.int64)
    fb = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        d, f, b = simulate_counts(sc, grid, lo, hi)
        det += d
        fa += f
        fb += b
    whole = simulate_counts(sc, grid)
    assert det.tolist() == whole[0].tolist() and fa.tolist() == whole[1].tolist() and fb == whole[2]


def test_seed_changes_results():
    p = SensingParams(1, 3, 4.0, 8.0)
    a = simulate(SimScenario(p, Rayleigh(G6), D3, Egc(), 20000, 1))
    b = simulate(SimScenario(p, Rayleigh(G6), D3, Egc(), 20000, 2))
    assert (a.detections, a.false_alarms) != (b.detections, b.false_alarms)


def test_stderr_scaling():
    p = SensingParams(1, 3, 4.0, 9.0)
    small = simulate(SimScenario(p, Rayleigh(G6), D3, Egc(), 25000, 3))
    large = simulate(SimScenario(p, Rayleigh(G6), D3, Egc(), 100000, 3))
    assert large.stderr_d / small.stderr_d == pytest.approx(0.5, rel=0.2)
    assert large.stderr_f / small.stderr_f == pytest.approx(0.5, rel=0.2)


def test_estimate_fields():
    est = SimEstimate.from_counts(30, 10, 100, 4)
    assert est.psi_d_hat == 0.3 and est.psi_f_hat == 0.1 and est.fallbacks == 4
    assert est.stderr_d == pytest.approx(math.sqrt(0.21 / 100))


def test_adaptive_false_alarm_reported():
    # weighted H0 sum is not the EGC chi-square; the estimate is only required to be well formed
    lam = an.threshold_for_pf(0.1, 3, 1)
    est = simulate(SimScenario(SensingParams(1, 3, 4.0, lam), Rayleigh(G6), D3, WcAdaptive(), 20000, 6))
    assert 0.0 <= est.psi_f_hat <= 1.0 and est.stderr_f >= 0.0
    assert est.fallbacks > 0


def test_shared_snr_matches_lognormal_closed_form():
    # with one shadowing draw per trial the combined SNR is exactly n * 10^(S/10)
    n, r = 3, 1
    lams = sorted(an.threshold_for_pf(p, n, r) for p in (0.01, 0.1, 0.5))
    sc = SimScenario(SensingParams(r, n, 4.0), Lognormal(1.0, 6.0), D3, Egc(), 10 ** 5, 12, shared_snr=True)
    for lam, est in simulate_curve(sc, lams):
        assert within_3sigma(est.psi_d_hat, an.psi_d_lognormal(lam, n, r, 1.0, 6.0, n, 64), est.trials)


@pytest.mark.parametrize("make", [
    lambda: SimScenario(SensingParams(n=2), Rayleigh(1.0), (1.0,)),
    lambda: SimScenario(SensingParams(n=2), Rayleigh(1.0), (1.0, -1.0)),
    lambda: SimScenario(SensingParams(n=2), Rayleigh(1.0), (1.0, 2.0), trials=0),
    lambda: SimScenario(SensingParams(n=2), Rayleigh(1.0), (1.0, 2.0), seed=-1),
    lambda: SimScenario(SensingParams(n=2), Rayleigh(1.0), (1.0, 2.0), WcFixed(egc_weights(3))),
])
def test_invalid_scenarios(make):
    with pytest.raises(DomainError):
        make()


def test_invalid_grids():
    sc = SimScenario(SensingParams(n=1), Rayleigh(1.0), (1.0,), trials=10)
    for grid in ([], [2.0, 1.0], [-1.0], [1.0, 1.0]):
        with pytest.raises(DomainError):
            simulate_curve(sc, grid)
    with pytest.raises(DomainError):
        simulate_counts(sc, [1.0], 5, 3)
