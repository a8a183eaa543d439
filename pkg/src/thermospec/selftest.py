"""Built-in invariant checks behind ``thermospec selftest``.

A fast, dependency-free subset of the test suite: each check prints one
pass/fail line and the run exits nonzero if any check fails.  The full
statistical validation lives in the pytest suite.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from . import fitting
from .calibration import estimate_delta_v, simulate_saturated_records
from .pipeline import ExperimentConfig, run_point
from .readout import DetectorParams, synthesize_off
from .spectra import analytic_spectrum, periodogram_accumulate, telegraph_psd
from .telegraph import simulate_trajectory
from .thermal import (
    QubitRates,
    bose_einstein_occupation,
    effective_temperature,
    steady_state,
)


def _check_thermal_roundtrip(seed) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(32):
        f = 10 ** rng.uniform(8.5, 10.5)
        t = 10 ** rng.uniform(-2.5, 0.5)
        rho = steady_state(QubitRates(1.0, bose_einstein_occupation(f, t))).rho_ee
        worst = max(worst, abs(effective_temperature(rho, f) / t - 1.0))
    return worst < 1e-9, f"worst relative error {worst:.2e}"

def _check_inversion_algebra(seed) -> tuple[bool, str]:
    dv = 5.52e-3
    worst = 0.0
    for rho in (0.0, 0.001, 0.01, 0.1, 0.49):
        back = fitting.population_from_amplitude(
            fitting.amplitude_from_population(rho, dv), dv
        )
        worst = max(worst, abs(back - rho))
    try:
        fitting.population_from_amplitude(dv**2 / 4 * 1.0001, dv)
        return False, "amplitude bound not enforced"
    except fitting.AmplitudeBoundError:
        pass
    return worst < 1e-12, f"worst roundtrip error {worst:.2e}"

def _check_analytic_fit(seed) -> tuple[bool, str]:
    rates = QubitRates(1.0 / 226e-9, 0.012)
    det = DetectorParams()
    freqs = np.arange(513) * (100e6 / 1024)
    fit = fitting.fit(analytic_spectrum(rates, det, freqs))
    a_true = fitting.amplitude_from_population(steady_state(rates).rho_ee, det.delta_v)
    err = max(abs(fit.gamma1 / rates.total_rate - 1), abs(fit.amplitude / a_true - 1))
    return err < 1e-8, f"worst relative error {err:.2e}"

def _check_spectrum_area(seed) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        rates = QubitRates(10 ** rng.uniform(5, 7), 10 ** rng.uniform(-2.5, 0.5))
        rho = steady_state(rates).rho_ee
        f0 = rates.total_rate / (2 * np.pi)  # integrate in half-width units
        area = quad(
            lambda u: telegraph_psd(rates, np.array([u * f0]))[0] * f0,
            0.0,
            np.inf,
            limit=200,
        )[0]
        worst = max(worst, abs(area / (4 * rho * (1 - rho)) - 1.0))
    return worst < 1e-3, f"worst relative error {worst:.2e}"

def _check_occupancy(seed) -> tuple[bool, str]:
    rates = QubitRates(1.0 / 226e-9, 0.012)
    rho = steady_state(rates).rho_ee
    traj = simulate_trajectory(rates, 20e-3, seed=seed)
    occ = traj.occupancy()
    n_dwells = max(len(traj.dwell_times()[0]), 1)
    sigma = math.sqrt(rho * (1 - rho) / n_dwells)
    pull = abs(occ - rho) / sigma
    return pull < 4.0, f"occupancy {occ:.5f} vs {rho:.5f} ({pull:.2f} sigma)"

def _check_off_spectrum_level(seed) -> tuple[bool, str]:
    det = DetectorParams()
    fs = 100e6
    record = synthesize_off(512 * 1024, det, seed=seed, sample_rate=fs)
    _, s_off = periodogram_accumulate(record, segment_length=1024)
    level = s_off.values[1:-1].mean()
    expect = 2 * (2 * det.noise_std_per_sample**2 / fs)
    err = abs(level / expect - 1)
    return err < 0.02, f"flat level off by {err * 100:.2f}%"

def _check_calibration(seed) -> tuple[bool, str]:
    det = DetectorParams(noise_std_per_sample=3 * 2.76e-3)
    sat = simulate_saturated_records(det, 1_000_000, seed=(seed, 1))
    off = synthesize_off(1_000_000, det, seed=(seed, 2), sample_rate=100e6)
    result = estimate_delta_v(sat, off)
    err = abs(result.delta_v_half / det.delta_v_half - 1)
    return err < 0.05, f"dV/2 off by {err * 100:.2f}%"

def _check_determinism(seed) -> tuple[bool, str]:
    config = ExperimentConfig(
        n_averages=64, chop_period=0.2e-3, master_seed=seed, temperatures=(0.06,)
    )
    a = run_point(config, 0.060)
    b = run_point(config, 0.060)
    same = a.row == b.row and np.array_equal(
        a.spectrum_subtracted.values, b.spectrum_subtracted.values
    )
    return same, "repeated run identical" if same else "runs differ"


_CHECKS = [
    ("thermal temperature roundtrip", _check_thermal_roundtrip),
    ("population/amplitude inversion", _check_inversion_algebra),
    ("analytic spectrum fit recovery", _check_analytic_fit),
    ("spectrum area = variance", _check_spectrum_area),
    ("telegraph occupancy", _check_occupancy),
    ("OFF spectrum level", _check_off_spectrum_level),
    ("calibration roundtrip", _check_calibration),
    ("pipeline determinism", _check_determinism),
]


def run(seed: int = 1) -> int:
    failures = 0
    for name, check in _CHECKS:
        try:
            ok, detail = check(seed)
        except Exception as err:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(err).__name__}: {err}"
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failures += 0 if ok else 1
    print(f"{len(_CHECKS) - failures}/{len(_CHECKS)} checks passed")
    return 0 if failures == 0 else 1
