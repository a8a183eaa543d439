"""Telegraph-noise spectroscopy of a thermally excited two-level system.

Simulates a qubit thermally switching between its two states while being
monitored through noisy homodyne quadratures, reproduces the averaged
ON/OFF-subtracted power spectra of the acquisition chain, and inverts the
Lorentzian fit into the excited-state population and relaxation rate.
"""

from .calibration import (
    CalibrationError,
    CalibrationResult,
    estimate_delta_v,
    simulate_saturated_records,
)
from .fitting import (
    AmplitudeBoundError,
    FitConvergenceError,
    LorentzianFit,
    NoSignalError,
    amplitude_from_population,
    fit,
    gamma_from_width,
    population_from_amplitude,
)
from .pipeline import (
    ExperimentConfig,
    PointResult,
    SweepResult,
    emit_figure_data,
    run_point,
    run_sweep,
)
from .readout import DetectorParams, QuadratureRecord, chop, synthesize, synthesize_off
from .spectra import (
    LORENTZIAN_ONESIDED_WEIGHT,
    PowerSpectrum,
    SpectrumAccumulator,
    SpectrumGridError,
    analytic_spectrum,
    background_subtract,
    periodogram_accumulate,
    telegraph_psd,
)
from .telegraph import (
    SampledSignal,
    TelegraphTrajectory,
    empirical_autocorrelation,
    sample,
    simulate_trajectory,
)
from .thermal import (
    PopulationInversionError,
    QubitRates,
    RadiationStage,
    SteadyState,
    ThermalEnvironment,
    bose_einstein_occupation,
    effective_photon_number,
    effective_temperature,
    steady_state,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeBoundError",
    "CalibrationError",
    "CalibrationResult",
    "DetectorParams",
    "ExperimentConfig",
    "FitConvergenceError",
    "LORENTZIAN_ONESIDED_WEIGHT",
    "LorentzianFit",
    "NoSignalError",
    "PointResult",
    "PopulationInversionError",
    "PowerSpectrum",
    "QuadratureRecord",
    "QubitRates",
    "RadiationStage",
    "SampledSignal",
    "SpectrumAccumulator",
    "SpectrumGridError",
    "SteadyState",
    "SweepResult",
    "TelegraphTrajectory",
    "ThermalEnvironment",
    "amplitude_from_population",
    "analytic_spectrum",
    "background_subtract",
    "bose_einstein_occupation",
    "chop",
    "effective_photon_number",
    "effective_temperature",
    "emit_figure_data",
    "empirical_autocorrelation",
    "estimate_delta_v",
    "fit",
    "gamma_from_width",
    "periodogram_accumulate",
    "population_from_amplitude",
    "run_point",
    "run_sweep",
    "sample",
    "simulate_saturated_records",
    "simulate_trajectory",
    "steady_state",
    "synthesize",
    "synthesize_off",
    "telegraph_psd",
]
