"""End-to-end orchestration: temperature sweeps from bath physics to fits.

One sweep point runs the whole chain at a base temperature T_c: effective
bath occupation -> telegraph trajectory -> chopped quadrature record ->
averaged ON/OFF periodograms -> background subtraction -> Lorentzian fit ->
population and relaxation-rate extraction.  Everything is derived
deterministically from (config, master_seed, point index), so identical
configurations give byte-identical output files for any worker count.

Model columns (rho_model, gamma1_model, t1_model_ns) come from the closed
forms only and carry no simulation noise.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fitting
from .readout import DetectorParams, QuadratureRecord, synthesize_window
from .seeding import ROLE_NOISE, ROLE_TRAJECTORY, spawn_rng
from .spectra import PowerSpectrum, SpectrumAccumulator, analytic_spectrum, background_subtract
from .telegraph import sample, simulate_trajectory
from .thermal import (
    QubitRates,
    RadiationStage,
    ThermalEnvironment,
    effective_photon_number,
    steady_state,
)

# two-level treatment degrades above this base temperature (higher transmon
# levels start to populate); the CLI warns beyond it
TWO_LEVEL_VALIDITY_MAX_K = 0.100

DEFAULT_TEMPERATURES = tuple(round(0.020 * k, 3) for k in range(1, 11))  # 20..200 mK

# recorded setup constants; informational only, never used in computation
DEFAULT_METADATA = {
    "cavity_frequency_hz": 5.796e9,
    "coupling_g_hz": 45e6,
    "dispersive_shift_hz": 1.75e6,
    "resonator_bandwidth_hz": 30.3e6,
    "mean_intraresonator_photons": 2.5,
    "critical_photon_number": 30,
}

SWEEP_CSV_COLUMNS = [
    "temperature_K",
    "replica",
    "n_th_effective",
    "rho_model",
    "rho_fitted",
    "rho_uncertainty",
    "gamma1_model_rad_s",
    "gamma1_fitted_rad_s",
    "t1_model_ns",
    "t1_fitted_ns",
    "fit_chi2",
    "status",
]

STATUS_OK = "ok"
STATUS_NO_SIGNAL = "no_signal"
STATUS_FIT_FAILED = "fit_failed"
STATUS_AMPLITUDE_BOUND = "amplitude_bound"


def _default_environment() -> ThermalEnvironment:
    return ThermalEnvironment(
        qubit_frequency=5.304e9,
        base_temperature=0.020,
        radiation_stages=(RadiationStage(source_temperature=0.600, attenuation_db=22.0),),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of a simulated acquisition run.

    Together with ``master_seed`` this determines every output byte.
    """

    environment: ThermalEnvironment = field(default_factory=_default_environment)
    gamma_intrinsic: float = 1.0 / 226e-9  # 1/s, zero-temperature relaxation rate
    detector: DetectorParams = field(default_factory=DetectorParams)
    sample_rate: float = 100e6  # Hz
    segment_length: int = 1024
    chop_period: float = 2.5e-3  # s
    duty: float = 0.5  # ON fraction of each chop period
    n_averages: int = 20_000  # requested periodogram segments per chop state
    temperatures: tuple[float, ...] = DEFAULT_TEMPERATURES  # K
    master_seed: int = 1
    metadata: dict = field(default_factory=lambda: dict(DEFAULT_METADATA))

    def to_json_dict(self) -> dict:
        return {
            "environment": {
                "qubit_frequency_hz": self.environment.qubit_frequency,
                "base_temperature_k": self.environment.base_temperature,
                "radiation_stages": [
                    {
                        "source_temperature_k": s.source_temperature,
                        "attenuation_db": s.attenuation_db,
                    }
                    for s in self.environment.radiation_stages
                ],
            },
            "gamma_intrinsic_per_s": self.gamma_intrinsic,
            "detector": {
                "mean_i_v": self.detector.mean_i,
                "mean_q_v": self.detector.mean_q,
                "delta_i_v": self.detector.delta_i,
                "delta_q_v": self.detector.delta_q,
                "noise_std_per_sample_v": self.detector.noise_std_per_sample,
            },
            "sample_rate_hz": self.sample_rate,
            "segment_length": self.segment_length,
            "chop_period_s": self.chop_period,
            "duty": self.duty,
            "n_averages": self.n_averages,
            "temperatures_k": list(self.temperatures),
            "master_seed": self.master_seed,
            "metadata": self.metadata,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=1) + "\n")

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        defaults = cls()
        env_data = data.get("environment", {})
        env = ThermalEnvironment(
            qubit_frequency=float(
                env_data.get("qubit_frequency_hz", defaults.environment.qubit_frequency)
            ),
            base_temperature=float(
                env_data.get("base_temperature_k", defaults.environment.base_temperature)
            ),
            radiation_stages=tuple(
                RadiationStage(
                    source_temperature=float(s["source_temperature_k"]),
                    attenuation_db=float(s["attenuation_db"]),
                )
                for s in env_data.get(
                    "radiation_stages",
                    [
                        {"source_temperature_k": s.source_temperature, "attenuation_db": s.attenuation_db}
                        for s in defaults.environment.radiation_stages
                    ],
                )
            ),
        )
        det_data = data.get("detector", {})
        det = DetectorParams(
            mean_i=float(det_data.get("mean_i_v", defaults.detector.mean_i)),
            mean_q=float(det_data.get("mean_q_v", defaults.detector.mean_q)),
            delta_i=float(det_data.get("delta_i_v", defaults.detector.delta_i)),
            delta_q=float(det_data.get("delta_q_v", defaults.detector.delta_q)),
            noise_std_per_sample=float(
                det_data.get("noise_std_per_sample_v", defaults.detector.noise_std_per_sample)
            ),
        )
        return cls(
            environment=env,
            gamma_intrinsic=float(data.get("gamma_intrinsic_per_s", defaults.gamma_intrinsic)),
            detector=det,
            sample_rate=float(data.get("sample_rate_hz", defaults.sample_rate)),
            segment_length=int(data.get("segment_length", defaults.segment_length)),
            chop_period=float(data.get("chop_period_s", defaults.chop_period)),
            duty=float(data.get("duty", defaults.duty)),
            n_averages=int(data.get("n_averages", defaults.n_averages)),
            temperatures=tuple(
                float(t) for t in data.get("temperatures_k", defaults.temperatures)
            ),
            master_seed=int(data.get("master_seed", defaults.master_seed)),
            metadata=dict(data.get("metadata", defaults.metadata)),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass
class PointResult:
    temperature: float
    replica: int
    rates: QubitRates
    spectrum_on: PowerSpectrum
    spectrum_off: PowerSpectrum
    spectrum_subtracted: PowerSpectrum
    spectrum_analytic: PowerSpectrum
    fit: fitting.LorentzianFit | None
    status: str
    row: dict


@dataclass
class SweepResult:
    config: ExperimentConfig
    points: list[PointResult]

    @property
    def rows(self) -> list[dict]:
        return [p.row for p in self.points]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(SWEEP_CSV_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(",".join(_format_cell(row[c]) for c in SWEEP_CSV_COLUMNS) + "\n")


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.17g}"


def _chop_geometry(config: ExperimentConfig) -> tuple[int, int, int, int]:
    """(period_len, on_len, segments_per_on_window, n_periods) in samples."""
    if not 0.0 < config.duty < 1.0:
        raise ValueError("the acquisition needs OFF windows: duty must be in (0, 1)")
    period_len = int(round(config.chop_period * config.sample_rate))
    on_len = int(round(config.duty * config.chop_period * config.sample_rate))
    segs_per_on = on_len // config.segment_length
    off_segs = (period_len - on_len) // config.segment_length
    if segs_per_on == 0 or off_segs == 0:
        raise ValueError("chop windows shorter than one segment; increase chop_period")
    n_periods = math.ceil(config.n_averages / segs_per_on)
    return period_len, on_len, segs_per_on, n_periods


def run_point(
    config: ExperimentConfig, temperature: float, point_index: int = 0, replica: int = 0
) -> PointResult:
    """Run the full chain at one base temperature.

    Deterministic given (config, master_seed, point_index, replica).  Fit
    failures do not raise; they flag the row via ``status`` and leave the
    fitted columns NaN.
    """
    env = config.environment.at_base_temperature(temperature)
    n_eff = effective_photon_number(env)
    rates = QubitRates(gamma_intrinsic=config.gamma_intrinsic, n_th=n_eff)
    ss = steady_state(rates)

    period_len, on_len, _, n_periods = _chop_geometry(config)
    n_samples = n_periods * period_len
    duration = n_samples / config.sample_rate

    traj = simulate_trajectory(
        rates,
        duration,
        seed=np.random.SeedSequence(
            (config.master_seed, point_index, ROLE_TRAJECTORY, replica)
        ),
        init="steady",
    )

    det = config.detector
    acc = SpectrumAccumulator(
        config.sample_rate, config.segment_length, det.gain_i, det.gain_q
    )
    # synthesize and accumulate period by period; OFF samples never touch the
    # telegraph signal even though the trajectory keeps evolving under them
    for p in range(n_periods):
        start = p * period_len
        z_on = sample(
            traj, config.sample_rate, start_time=start / config.sample_rate, n_samples=on_len
        )
        rng_on = spawn_rng(config.master_seed, point_index, ROLE_NOISE, replica, 2 * p)
        i_on, q_on = synthesize_window(z_on.values, on_len, det, rng_on)
        off_len = period_len - on_len
        rng_off = spawn_rng(config.master_seed, point_index, ROLE_NOISE, replica, 2 * p + 1)
        i_off, q_off = synthesize_window(None, off_len, det, rng_off)
        record = _period_record(i_on, q_on, i_off, q_off, config)
        acc.add_record(record)

    meta = {
        "temperature_K": temperature,
        "sample_rate_hz": config.sample_rate,
        "segment_length": config.segment_length,
        "chop_period_s": config.chop_period,
        "duty": config.duty,
        "gamma_intrinsic_per_s": config.gamma_intrinsic,
        "n_th_effective": n_eff,
        "delta_v_half_V": det.delta_v_half,
        "noise_std_per_sample_V": det.noise_std_per_sample,
        "master_seed": config.master_seed,
        "point_index": point_index,
        "replica": replica,
    }
    s_on = acc.finalize(on=True, metadata=meta)
    s_off = acc.finalize(on=False, metadata=meta)
    s_sub = background_subtract(s_on, s_off)
    s_model = analytic_spectrum(rates, det, s_sub.frequencies)

    fit_obj: fitting.LorentzianFit | None = None
    status = STATUS_OK
    try:
        fit_obj = fitting.fit(s_sub)
    except fitting.NoSignalError:
        status = STATUS_NO_SIGNAL
    except fitting.FitConvergenceError as err:
        fit_obj = err.last_fit
        status = STATUS_FIT_FAILED

    rho_fitted = math.nan
    rho_sigma = math.nan
    gamma1_fitted = math.nan
    t1_fitted_ns = math.nan
    chi2 = math.nan
    if fit_obj is not None:
        gamma1_fitted = fit_obj.gamma1
        t1_fitted_ns = 1e9 / fit_obj.gamma1
        chi2 = fit_obj.chi2
        if status == STATUS_OK and fit_obj.amplitude < 2.0 * fit_obj.amplitude_sigma:
            status = STATUS_NO_SIGNAL  # amplitude consistent with zero
        try:
            rho_fitted = fitting.population_from_amplitude(fit_obj.amplitude, det.delta_v)
            rho_sigma = fit_obj.amplitude_sigma / (
                det.delta_v**2 * max(1.0 - 2.0 * rho_fitted, 1e-12)
            )
        except fitting.AmplitudeBoundError:
            status = STATUS_AMPLITUDE_BOUND

    row = {
        "temperature_K": temperature,
        "replica": replica,
        "n_th_effective": n_eff,
        "rho_model": ss.rho_ee,
        "rho_fitted": rho_fitted,
        "rho_uncertainty": rho_sigma,
        "gamma1_model_rad_s": rates.total_rate,
        "gamma1_fitted_rad_s": gamma1_fitted,
        "t1_model_ns": 1e9 / rates.total_rate,
        "t1_fitted_ns": t1_fitted_ns,
        "fit_chi2": chi2,
        "status": status,
    }
    return PointResult(
        temperature=temperature,
        replica=replica,
        rates=rates,
        spectrum_on=s_on,
        spectrum_off=s_off,
        spectrum_subtracted=s_sub,
        spectrum_analytic=s_model,
        fit=fit_obj,
        status=status,
        row=row,
    )


def _period_record(i_on, q_on, i_off, q_off, config: ExperimentConfig):
    n_on = len(i_on)
    n_total = n_on + len(i_off)
    i = np.concatenate([i_on, i_off])
    q = np.concatenate([q_on, q_off])
    return QuadratureRecord(
        i_values=i,
        q_values=q,
        sample_rate=config.sample_rate,
        window_bounds=np.array([0, n_on, n_total], dtype=np.int64),
        window_on=np.array([True, False]),
        chop_period=config.chop_period,
    )


def _run_point_job(args) -> PointResult:
    config, temperature, point_index, replica = args
    return run_point(config, temperature, point_index=point_index, replica=replica)


def run_sweep(
    config: ExperimentConfig, workers: int = 1, replicate: bool = False
) -> SweepResult:
    """Map :func:`run_point` over the configured temperatures.

    With ``replicate`` every point runs a second time on an independent seed
    stream (replica 1), mimicking the warm-up/cool-down consistency check.
    Points are independent jobs; the reduction is a deterministic reassembly
    in (point, replica) order, so worker count never changes the output.
    """
    jobs = []
    for index, temperature in enumerate(config.temperatures):
        jobs.append((config, temperature, index, 0))
        if replicate:
            jobs.append((config, temperature, index, 1))
    if not jobs:
        return SweepResult(config=config, points=[])
    if workers <= 1:
        points = [_run_point_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_run_point_job, jobs))
    return SweepResult(config=config, points=points)


def emit_figure_data(sweep: SweepResult, out_dir) -> list[Path]:
    """Write the three plot-data files (spectra, population, relaxation time).

    Long-format CSVs consumable by any plotting tool; replica 0 only for the
    spectra file.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    path = out_dir / "spectra_vs_frequency.csv"
    with open(path, "w") as fh:
        fh.write("temperature_K,frequency_Hz,psd_subtracted_V2_per_Hz,psd_model_V2_per_Hz\n")
        for point in sweep.points:
            if point.replica != 0:
                continue
            sub = point.spectrum_subtracted
            model = point.spectrum_analytic
            for f_hz, v, m in zip(sub.frequencies, sub.values, model.values):
                fh.write(
                    f"{point.temperature:.17g},{f_hz:.17g},{v:.17g},{m:.17g}\n"
                )
    paths.append(path)

    path = out_dir / "population_vs_temperature.csv"
    with open(path, "w") as fh:
        fh.write("temperature_K,replica,rho_model,rho_fitted,rho_uncertainty\n")
        for row in sweep.rows:
            fh.write(
                ",".join(
                    _format_cell(row[c])
                    for c in [
                        "temperature_K",
                        "replica",
                        "rho_model",
                        "rho_fitted",
                        "rho_uncertainty",
                    ]
                )
                + "\n"
            )
    paths.append(path)

    path = out_dir / "relaxation_time_vs_temperature.csv"
    with open(path, "w") as fh:
        fh.write("temperature_K,replica,t1_model_ns,t1_fitted_ns\n")
        for row in sweep.rows:
            fh.write(
                ",".join(
                    _format_cell(row[c])
                    for c in ["temperature_K", "replica", "t1_model_ns", "t1_fitted_ns"]
                )
                + "\n"
            )
    paths.append(path)
    return paths


def fit_report(point: PointResult) -> dict:
    """Structured fit summary for one point (JSON-serializable)."""
    fit_obj = point.fit
    report = {
        "temperature_K": point.temperature,
        "status": point.status,
        "A": None,
        "gamma1_rad_s": None,
        "gamma1_over_2pi_Hz": None,
        "rho_ee": _none_if_nan(point.row["rho_fitted"]),
        "gamma_intrinsic": None,
        "t1_ns": _none_if_nan(point.row["t1_fitted_ns"]),
        "chi2": _none_if_nan(point.row["fit_chi2"]),
        "converged": None,
        "n_iterations": None,
        "covariance": None,
    }
    if fit_obj is not None:
        report.update(
            {
                "A": fit_obj.amplitude,
                "gamma1_rad_s": fit_obj.gamma1,
                "gamma1_over_2pi_Hz": fit_obj.gamma1_hz,
                "gamma_intrinsic": fitting.gamma_from_width(
                    fit_obj.gamma1, point.rates.n_th
                ),
                "converged": fit_obj.converged,
                "n_iterations": fit_obj.n_iterations,
                "covariance": [
                    [_none_if_nan(float(v)) for v in line] for line in fit_obj.covariance
                ],
            }
        )
    return report


def _none_if_nan(x):
    return None if isinstance(x, float) and math.isnan(x) else x


def write_point_outputs(point: PointResult, out_dir, tag: str | None = None) -> list[Path]:
    """Write the spectra CSVs and the fit JSON for one point."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if tag is None:
        tag = f"T{point.temperature * 1e3:07.2f}mK"
        if point.replica:
            tag += f"_r{point.replica}"
    paths = []
    for name, spec_obj in [
        ("on", point.spectrum_on),
        ("off", point.spectrum_off),
        ("subtracted", point.spectrum_subtracted),
        ("analytic", point.spectrum_analytic),
    ]:
        path = out_dir / f"spectrum_{tag}_{name}.csv"
        spec_obj.to_csv(path)
        paths.append(path)
    path = out_dir / f"fit_{tag}.json"
    path.write_text(json.dumps(fit_report(point), indent=1) + "\n")
    paths.append(path)
    return paths
