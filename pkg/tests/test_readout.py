import json
import math

import numpy as np
import pytest

from conftest import GAMMA_20MK, NTH_ANCHOR, SEED
from thermospec.readout import (
    DetectorParams,
    QuadratureRecord,
    chop,
    chop_layout,
    synthesize,
    synthesize_off,
)
from thermospec.telegraph import SampledSignal, sample, simulate_trajectory
from thermospec.thermal import QubitRates, steady_state

ANCHOR_RATES = QubitRates(GAMMA_20MK, NTH_ANCHOR)


def constant_signal(value: int, n: int, fs: float = 100e6) -> SampledSignal:
    return SampledSignal(values=np.full(n, value, dtype=np.int8), sample_rate=fs)


class TestSynthesize:
    def test_noiseless_ground_state_is_exact(self):
        det = DetectorParams(mean_i=0.3e-3, delta_i=2e-3, delta_q=0.0, noise_std_per_sample=0.0)
        rec = synthesize(constant_signal(-1, 100), det, seed=SEED)
        assert np.all(rec.i_values == det.mean_i - det.delta_i / 2)
        assert np.all(rec.q_values == det.mean_q)

    def test_noiseless_toggle_follows_z(self):
        a = 1.5e-3
        det = DetectorParams(mean_i=1e-3, delta_i=2 * a, delta_q=0.0, noise_std_per_sample=0.0)
        z = np.array([-1, 1, 1, -1, 1], dtype=np.int8)
        rec = synthesize(SampledSignal(z, 1e6), det, seed=SEED)
        assert np.array_equal(rec.i_values, det.mean_i + a * z.astype(float))

    def test_noise_variance_on_constant_stretch(self):
        det = DetectorParams(noise_std_per_sample=2.76e-3)
        n = 200_000
        rec = synthesize(constant_signal(-1, n), det, seed=SEED)
        target = det.noise_std_per_sample**2
        # sample variance of n gaussians has relative sd sqrt(2/n) ~ 0.3 %
        assert rec.i_values.var() == pytest.approx(target, rel=0.05)
        assert rec.q_values.var() == pytest.approx(target, rel=0.05)

    def test_mean_over_on_samples(self):
        duration = 10e-3
        traj = simulate_trajectory(ANCHOR_RATES, duration, seed=SEED)
        z = sample(traj, 100e6)
        det = DetectorParams(mean_i=0.5e-3)
        rec = synthesize(z, det, seed=SEED + 1)
        z_bar = steady_state(ANCHOR_RATES).z_mean
        expected = det.mean_i + 0.5 * det.delta_i * z_bar
        # dominant uncertainty: occupancy fluctuation of the finite record
        rho = steady_state(ANCHOR_RATES).rho_ee
        sigma_zbar = 2 * math.sqrt(2 * rho * (1 - rho) / (ANCHOR_RATES.total_rate * duration))
        sigma = math.hypot(
            0.5 * det.delta_i * sigma_zbar,
            det.noise_std_per_sample / math.sqrt(len(z)),
        )
        assert abs(rec.i_values.mean() - expected) < 5 * sigma

    def test_quadrature_variance_sum(self):
        duration = 10e-3
        traj = simulate_trajectory(ANCHOR_RATES, duration, seed=SEED)
        z = sample(traj, 100e6)
        det = DetectorParams()
        rec = synthesize(z, det, seed=SEED + 2)
        rho = steady_state(ANCHOR_RATES).rho_ee
        var_z = 4 * rho * (1 - rho)
        expected = det.delta_v_half**2 * var_z + 2 * det.noise_std_per_sample**2
        total = rec.i_values.var() + rec.q_values.var()
        assert total == pytest.approx(expected, rel=0.02)


class TestSynthesizeOff:
    def test_zero_noise_is_all_zero(self):
        det = DetectorParams(noise_std_per_sample=0.0)
        rec = synthesize_off(1000, det, seed=SEED, sample_rate=1e6)
        assert np.all(rec.i_values == 0.0)
        assert np.all(rec.q_values == 0.0)
        assert not rec.window_on[0]

    def test_off_mean_is_zero_within_5_sigma(self):
        det = DetectorParams()
        n = 1_000_000
        rec = synthesize_off(n, det, seed=SEED, sample_rate=1e8)
        bound = 5 * det.noise_std_per_sample / math.sqrt(n)
        assert abs(rec.i_values.mean()) < bound
        assert abs(rec.q_values.mean()) < bound


class TestChop:
    def test_duty_one_is_single_on_window(self):
        bounds, labels = chop_layout(10_000, 1e6, chop_period=1e-3, duty=1.0)
        assert list(bounds) == [0, 10_000]
        assert list(labels) == [True]

    def test_window_arithmetic(self):
        # 10 ms at 2.5 ms period, duty 0.5: four ON + four OFF windows of 1.25 ms
        fs = 1e6
        bounds, labels = chop_layout(int(10e-3 * fs), fs, chop_period=2.5e-3, duty=0.5)
        widths = np.diff(bounds)
        assert list(labels) == [True, False] * 4
        assert np.all(widths == int(1.25e-3 * fs))

    def test_chop_preserves_trajectory_and_labels_noise_only_off(self):
        traj = simulate_trajectory(ANCHOR_RATES, 2e-3, seed=SEED)
        z = sample(traj, 20e6)
        det = DetectorParams(mean_i=1e-3, delta_q=0.0, noise_std_per_sample=0.0)
        rec = chop(z, det, chop_period=0.5e-3, duty=0.5, seed=SEED)
        # ON windows reproduce the telegraph samples exactly; OFF windows are silent
        for sl in rec.window_slices(on=True):
            expected = det.mean_i + 0.5 * det.delta_i * z.values[sl].astype(float)
            assert np.array_equal(rec.i_values[sl], expected)
        for sl in rec.window_slices(on=False):
            assert np.all(rec.i_values[sl] == 0.0)
            assert np.all(rec.q_values[sl] == 0.0)

    def test_chop_noise_reproducible(self):
        z = constant_signal(-1, 4000, fs=1e6)
        det = DetectorParams()
        a = chop(z, det, chop_period=1e-3, duty=0.5, seed=SEED)
        b = chop(z, det, chop_period=1e-3, duty=0.5, seed=SEED)
        assert np.array_equal(a.i_values, b.i_values)
        assert np.array_equal(a.q_values, b.q_values)

    def test_validation(self):
        z = constant_signal(-1, 100, fs=1e6)
        with pytest.raises(ValueError):
            chop(z, DetectorParams(), chop_period=0.0, duty=0.5, seed=1)
        with pytest.raises(ValueError):
            chop(z, DetectorParams(), chop_period=1e-3, duty=0.0, seed=1)


class TestQuadratureRecord:
    def test_partition_validation(self):
        with pytest.raises(ValueError):
            QuadratureRecord(
                i_values=np.zeros(10),
                q_values=np.zeros(10),
                sample_rate=1.0,
                window_bounds=np.array([0, 5]),  # does not reach the end
                window_on=np.array([True]),
            )
        with pytest.raises(ValueError):
            QuadratureRecord(
                i_values=np.zeros(10),
                q_values=np.zeros(9),
                sample_rate=1.0,
                window_bounds=np.array([0, 10]),
                window_on=np.array([True]),
            )

    def test_binary_roundtrip(self, tmp_path):
        det = DetectorParams()
        traj = simulate_trajectory(ANCHOR_RATES, 1e-4, seed=SEED)
        z = sample(traj, 100e6)
        rec = chop(z, det, chop_period=4e-5, duty=0.5, seed=SEED)
        path = tmp_path / "record.bin"
        rec.save(path, detector=det)
        back = QuadratureRecord.load(path)
        assert np.array_equal(back.i_values, rec.i_values)
        assert np.array_equal(back.q_values, rec.q_values)
        assert np.array_equal(back.window_bounds, rec.window_bounds)
        assert np.array_equal(back.window_on, rec.window_on)
        assert back.sample_rate == rec.sample_rate
        sidecar = json.loads((tmp_path / "record.bin.json").read_text())
        assert sidecar["detector"]["noise_std_per_sample_v"] == det.noise_std_per_sample
        assert sidecar["chop_period_s"] == 4e-5


class TestDetectorParams:
    def test_delta_v_override_preserves_split(self):
        det = DetectorParams(delta_i=3e-3, delta_q=4e-3)
        scaled = det.with_delta_v_half(1e-3)
        assert scaled.delta_v_half == pytest.approx(1e-3, rel=1e-12)
        assert scaled.delta_i / scaled.delta_q == pytest.approx(0.75, rel=1e-12)
        assert scaled.noise_std_per_sample == det.noise_std_per_sample

    def test_delta_v_override_from_zero(self):
        det = DetectorParams(delta_i=0.0, delta_q=0.0)
        scaled = det.with_delta_v_half(2e-3)
        assert scaled.delta_v_half == pytest.approx(2e-3, rel=1e-12)
        assert scaled.delta_i == scaled.delta_q
