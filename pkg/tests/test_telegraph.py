import math

import numpy as np
import pytest
from scipy import stats

from conftest import GAMMA_20MK, NTH_ANCHOR, SEED
from thermospec.telegraph import (
    TelegraphTrajectory,
    empirical_autocorrelation,
    fit_correlation_decay_rate,
    sample,
    simulate_trajectory,
)
from thermospec.thermal import QubitRates, steady_state

ANCHOR_RATES = QubitRates(GAMMA_20MK, NTH_ANCHOR)


def occupancy_sigma(rates: QubitRates, duration: float) -> float:
    """Long-run standard deviation of the excited-state time fraction."""
    rho = steady_state(rates).rho_ee
    return math.sqrt(2 * rho * (1 - rho) / (rates.total_rate * duration))


class TestSimulateTrajectory:
    def test_frozen_ground_state_at_zero_occupation(self):
        rates = QubitRates(1e6, 0.0)
        traj = simulate_trajectory(rates, 1e-3, seed=SEED, init="ground")
        assert len(traj.switch_times) == 0
        sig = sample(traj, 1e7)
        assert np.all(sig.values == -1)

    def test_excited_start_decays_once_at_zero_occupation(self):
        rates = QubitRates(1e6, 0.0)
        traj = simulate_trajectory(rates, 1.0, seed=SEED, init="excited")
        assert len(traj.switch_times) == 1  # ground state is absorbing

    def test_switch_times_strictly_increasing_inside_record(self):
        traj = simulate_trajectory(ANCHOR_RATES, 5e-3, seed=SEED)
        assert np.all(np.diff(traj.switch_times) > 0)
        assert traj.switch_times[0] >= 0
        assert traj.switch_times[-1] < traj.duration

    def test_occupancy_matches_steady_state_within_3_sigma(self):
        duration = 1e-3
        traj = simulate_trajectory(ANCHOR_RATES, duration, seed=SEED)
        rho = steady_state(ANCHOR_RATES).rho_ee
        assert abs(traj.occupancy() - rho) < 3 * occupancy_sigma(ANCHOR_RATES, duration)

    def test_mean_dwells_match_exponential_means_within_1_percent(self):
        # ~4e5 dwells of each kind: the 1 % check sits at ~6 sigma
        traj = simulate_trajectory(ANCHOR_RATES, 8.0, seed=SEED)
        excited, ground = traj.dwell_times()
        assert len(excited) >= 10_000 and len(ground) >= 10_000
        assert excited.mean() * ANCHOR_RATES.down_rate == pytest.approx(1.0, abs=0.01)
        assert ground.mean() * ANCHOR_RATES.up_rate == pytest.approx(1.0, abs=0.01)

    def test_dwell_laws_pass_kolmogorov_smirnov(self):
        traj = simulate_trajectory(ANCHOR_RATES, 2.0, seed=SEED)
        excited, ground = traj.dwell_times()
        ks_e = stats.kstest(excited[:10_000], "expon", args=(0, 1 / ANCHOR_RATES.down_rate))
        ks_g = stats.kstest(ground[:10_000], "expon", args=(0, 1 / ANCHOR_RATES.up_rate))
        assert ks_e.pvalue > 0.01
        assert ks_g.pvalue > 0.01

    def test_deterministic_for_fixed_seed(self):
        a = simulate_trajectory(ANCHOR_RATES, 2e-3, seed=SEED)
        b = simulate_trajectory(ANCHOR_RATES, 2e-3, seed=SEED)
        assert a.initial_state == b.initial_state
        assert np.array_equal(a.switch_times, b.switch_times)
        c = simulate_trajectory(ANCHOR_RATES, 2e-3, seed=SEED + 1)
        assert not np.array_equal(a.switch_times, c.switch_times)

    def test_init_policies(self):
        assert simulate_trajectory(ANCHOR_RATES, 1e-4, seed=1, init="ground").initial_z == -1
        assert simulate_trajectory(ANCHOR_RATES, 1e-4, seed=1, init="excited").initial_z == 1
        with pytest.raises(ValueError):
            simulate_trajectory(ANCHOR_RATES, 1e-4, seed=1, init="hovering")

    def test_csv_dump_roundtrip(self, tmp_path):
        traj = simulate_trajectory(ANCHOR_RATES, 1e-4, seed=SEED)
        path = tmp_path / "switches.csv"
        traj.to_csv(path)
        lines = path.read_text().splitlines()
        header = [l for l in lines if l.startswith("#")]
        assert any("n_th" in h for h in header)
        assert any("seed" in h for h in header)
        values = np.array([float(l) for l in lines if not l.startswith("#") and l[0].isdigit()])
        assert np.array_equal(values, traj.switch_times)


class TestSample:
    def test_no_switches_gives_constant(self):
        traj = simulate_trajectory(QubitRates(1e6, 0.0), 1.0, seed=1, init="ground")
        sig = sample(traj, 10.0)
        assert len(sig) == 10
        assert np.all(sig.values == -1)

    def test_single_switch_splits_record(self):
        traj = TelegraphTrajectory(
            initial_state="ground",
            switch_times=np.array([0.45]),
            duration=1.0,
            rates=QubitRates(1.0, 0.1),
            seed=None,
        )
        sig = sample(traj, 10.0)
        assert list(sig.values[:5]) == [-1] * 5
        assert list(sig.values[5:]) == [1] * 5

    def test_left_continuous_at_switch_instant(self):
        # a sample falling exactly on a switch time reports the pre-switch state
        traj = TelegraphTrajectory(
            initial_state="ground",
            switch_times=np.array([0.5]),
            duration=1.0,
            rates=QubitRates(1.0, 0.1),
            seed=None,
        )
        sig = sample(traj, 10.0)
        assert sig.values[5] == -1  # t = 0.5 exactly
        assert sig.values[6] == 1

    def test_sample_count_is_floor_of_duration_times_rate(self):
        traj = simulate_trajectory(ANCHOR_RATES, 1e-3, seed=1)
        assert len(sample(traj, 9999.0)) == 9
        assert len(sample(traj, 1e4)) == 10

    def test_sampled_occupancy_tracks_dwell_occupancy(self):
        traj = simulate_trajectory(ANCHOR_RATES, 1e-3, seed=SEED)
        sig = sample(traj, 100e6)
        sampled = float((sig.values == 1).mean())
        # sampling error is at most ~one sample per switch
        bound = (len(traj.switch_times) + 1) / len(sig)
        assert abs(sampled - traj.occupancy()) < max(2 * bound, 1e-4)

    def test_sampled_fraction_matches_steady_state(self):
        duration = 1e-3
        traj = simulate_trajectory(ANCHOR_RATES, duration, seed=SEED)
        sig = sample(traj, 100e6)
        rho = steady_state(ANCHOR_RATES).rho_ee
        bound = 3 * occupancy_sigma(ANCHOR_RATES, duration)
        assert abs(float((sig.values == 1).mean()) - rho) < bound


class TestEmpiricalAutocorrelation:
    def test_constant_signal_has_zero_connected_correlator(self):
        traj = simulate_trajectory(QubitRates(1e6, 0.0), 1e-3, seed=1, init="ground")
        sig = sample(traj, 1e7)
        acf = empirical_autocorrelation(sig, 32)
        assert np.allclose(acf, 0.0, atol=1e-15)

    def test_lag_zero_matches_bernoulli_variance(self):
        duration = 0.2048
        traj = simulate_trajectory(ANCHOR_RATES, duration, seed=SEED)
        sig = sample(traj, 100e6)
        acf = empirical_autocorrelation(sig, 8)
        rho = steady_state(ANCHOR_RATES).rho_ee
        assert acf[0] == pytest.approx(4 * rho * (1 - rho), rel=0.05)

    def test_decay_rate_matches_total_fluctuation_rate(self):
        fs = 100e6
        traj = simulate_trajectory(ANCHOR_RATES, 0.2048, seed=SEED)
        sig = sample(traj, fs)
        max_lag = int(3 * fs / ANCHOR_RATES.total_rate)  # lags up to 3 correlation times
        acf = empirical_autocorrelation(sig, max_lag)
        lags = np.arange(max_lag + 1) / fs
        rate = fit_correlation_decay_rate(lags[1:], acf[1:])
        assert rate == pytest.approx(ANCHOR_RATES.total_rate, rel=0.05)

    def test_max_lag_validated(self):
        traj = simulate_trajectory(ANCHOR_RATES, 1e-5, seed=1)
        sig = sample(traj, 1e8)
        with pytest.raises(ValueError):
            empirical_autocorrelation(sig, len(sig))
