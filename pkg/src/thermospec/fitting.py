"""Lorentzian fits of subtracted noise spectra and their physical inversion.

The subtracted detector spectrum of a thermally fluctuating two-level system
is S(f) = 4 A G1 / (G1^2 + w^2) (+ flat baseline), w = 2 pi f, where the
reported amplitude A = dV^2 rho (1 - rho) is the total telegraph band power
in V^2 and G1 is the half-width at half maximum in rad/s.  The factor 4 is
LORENTZIAN_ONESIDED_WEIGHT from :mod:`thermospec.spectra`; fitting and
population extraction share it, so extraction is the exact inverse of
synthesis.

Inversion: rho = (1 - sqrt(1 - 4 A / dV^2)) / 2 (thermal branch, below 1/2)
and gamma = G1 / (1 + 2 n_th).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .spectra import KIND_ANALYTIC, KIND_SUBTRACTED, LORENTZIAN_ONESIDED_WEIGHT, PowerSpectrum

_SMOOTH_BINS = 5  # moving-average width used for initialization only


def _safe_sqrt(value: float) -> float:
    value = float(value)
    return math.sqrt(value) if value >= 0 else math.nan


class NoSignalError(ValueError):
    """Spectrum carries no usable positive signal to fit."""


class FitConvergenceError(RuntimeError):
    """Optimizer ran out of its iteration budget; carries the last iterate."""

    def __init__(self, message: str, last_fit: "LorentzianFit"):
        super().__init__(message)
        self.last_fit = last_fit


class AmplitudeBoundError(ValueError):
    """Fitted amplitude exceeds dV^2/4: no population reproduces it."""


@dataclass(frozen=True)
class LorentzianFit:
    """Result of a Lorentzian fit.

    ``amplitude`` is the total telegraph band power A in V^2 (the model reads
    4 A G1 / (G1^2 + w^2) + baseline in V^2/Hz), ``gamma1`` the angular
    half-width in rad/s.  ``covariance`` is 3x3 over (amplitude, gamma1,
    baseline); baseline rows are zero when the baseline was not floated.
    ``chi2`` is the reduced chi-square with the per-bin noise scale estimated
    from the upper half of the fit band.
    """

    amplitude: float
    gamma1: float
    baseline: float
    covariance: np.ndarray
    chi2: float
    converged: bool
    n_iterations: int

    @property
    def gamma1_hz(self) -> float:
        """Half-width as an ordinary frequency, G1 / 2 pi."""
        return self.gamma1 / (2.0 * math.pi)

    @property
    def amplitude_sigma(self) -> float:
        return _safe_sqrt(self.covariance[0, 0])

    @property
    def gamma1_sigma(self) -> float:
        return _safe_sqrt(self.covariance[1, 1])


def _initial_guess(f: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """(amplitude, gamma1) start from a 5-bin-smoothed peak and its HWHM."""
    kernel = np.ones(_SMOOTH_BINS) / _SMOOTH_BINS
    smooth = np.convolve(y, kernel, mode="same")
    peak_idx = int(np.argmax(smooth))
    peak = smooth[peak_idx]
    if peak <= 0:
        raise NoSignalError("smoothed spectrum has no positive peak")
    below = np.nonzero(smooth[peak_idx:] < 0.5 * peak)[0]
    if below.size:
        f_half = f[peak_idx + below[0]]
    else:
        f_half = f[peak_idx] + 0.25 * (f[-1] - f[peak_idx])  # no crossing: mid-band fallback
    gamma1 = 2.0 * math.pi * max(f_half, f[1] - f[0])
    amplitude = peak * gamma1 / LORENTZIAN_ONESIDED_WEIGHT
    return amplitude, gamma1


def fit(
    spectrum: PowerSpectrum,
    fit_baseline: bool | None = None,
    freq_range: tuple[float, float] | None = None,
    weights: np.ndarray | None = None,
    max_iter: int = 200,
) -> LorentzianFit:
    """Weighted nonlinear least squares of the Lorentzian model.

    Parameters
    ----------
    spectrum:
        A SUBTRACTED or ANALYTIC spectrum.
    fit_baseline:
        Float a flat offset; defaults to True for SUBTRACTED input (absorbs
        imperfect background removal) and False for ANALYTIC input.
    freq_range:
        Inclusive fit band in Hz.  Defaults to [2 * bin_width, Nyquist]; the
        DC bin and its neighbour are always excluded because per-segment mean
        removal distorts them.
    weights:
        Optional per-bin weights on the full frequency grid (e.g. inverse
        standard deviations); uniform by default.
    max_iter:
        Budget of residual evaluations before the fit is declared failed.

    Amplitude and width are optimized as logarithms (positivity by
    construction) with a trust-region solver and analytic Jacobian.
    """
    if spectrum.kind not in (KIND_SUBTRACTED, KIND_ANALYTIC):
        raise ValueError(f"can only fit SUBTRACTED or ANALYTIC spectra, got {spectrum.kind}")
    if fit_baseline is None:
        fit_baseline = spectrum.kind == KIND_SUBTRACTED
    bin_width = spectrum.bin_width
    lo, hi = freq_range if freq_range is not None else (2.0 * bin_width, np.inf)
    lo = max(lo, 2.0 * bin_width)
    mask = (spectrum.frequencies >= lo) & (spectrum.frequencies <= hi)
    if mask.sum() < 8:
        raise ValueError("need at least 8 bins inside the fit range")
    f = spectrum.frequencies[mask]
    y = spectrum.values[mask]
    if not (y > 0).any():
        raise NoSignalError("spectrum is non-positive over the whole fit range")
    if weights is None:
        wts = np.ones_like(y)
    else:
        weights = np.asarray(weights, dtype=float)
        if len(weights) != len(spectrum.frequencies):
            raise ValueError("weights must cover the full frequency grid")
        wts = weights[mask]
        wts = wts / wts.max()

    a0, g0 = _initial_guess(f, y)
    # work on O(1) numbers: PSDs are ~1e-13 V^2/Hz and would starve the
    # gradient-norm termination test of the solver
    y_scale = float(np.max(np.abs(y)))
    ys = y / y_scale
    a0 /= y_scale
    w2 = (2.0 * np.pi * f) ** 2
    weight = LORENTZIAN_ONESIDED_WEIGHT

    def unpack(p):
        a, g = np.exp(p[0]), np.exp(p[1])
        b = p[2] if fit_baseline else 0.0
        return a, g, b

    def residuals(p):
        a, g, b = unpack(p)
        return wts * (weight * a * g / (g**2 + w2) + b - ys)

    def jacobian(p):
        a, g, b = unpack(p)
        denom = g**2 + w2
        model = weight * a * g / denom
        cols = [model, model * (w2 - g**2) / denom]  # d/dlnA, d/dlnG1
        if fit_baseline:
            cols.append(np.ones_like(w2))
        return wts[:, None] * np.stack(cols, axis=1)

    p0 = [math.log(a0), math.log(g0)] + ([0.0] if fit_baseline else [])
    # generous log-space box keeps the solver finite on signal-free input
    lower = [math.log(a0) - 40.0, math.log(2.0 * math.pi * bin_width * 1e-3)]
    upper = [math.log(a0) + 40.0, math.log(2.0 * math.pi * f[-1] * 1e3)]
    if fit_baseline:
        lower.append(-np.inf)
        upper.append(np.inf)
    result = least_squares(
        residuals,
        p0,
        jac=jacobian,
        method="trf",
        bounds=(lower, upper),
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_iter,
    )
    amplitude, gamma1, baseline = unpack(result.x)
    amplitude *= y_scale
    baseline *= y_scale

    # covariance in physical parameters via the log-space chain rule
    n_par = len(result.x)
    dof = max(len(f) - n_par, 1)
    jtj = result.jac.T @ result.jac
    try:
        cov_log = np.linalg.inv(jtj) * (2.0 * result.cost / dof)
    except np.linalg.LinAlgError:
        cov_log = np.full((n_par, n_par), np.nan)
    scale = np.array([amplitude, gamma1, y_scale][:n_par])
    cov = np.zeros((3, 3))
    cov[:n_par, :n_par] = cov_log * np.outer(scale, scale)

    # reduced chi-square against the noise scale of the upper half of the band
    tail = result.fun[len(result.fun) // 2 :]
    noise_scale = float(np.std(tail)) if np.std(tail) > 0 else 1.0
    chi2 = float(2.0 * result.cost / (noise_scale**2 * dof))

    fit_obj = LorentzianFit(
        amplitude=float(amplitude),
        gamma1=float(gamma1),
        baseline=float(baseline),
        covariance=cov,
        chi2=chi2,
        converged=bool(result.status > 0),
        n_iterations=int(result.nfev),
    )
    if result.status <= 0:
        raise FitConvergenceError(
            f"no convergence within {max_iter} residual evaluations", fit_obj
        )
    return fit_obj


def amplitude_from_population(rho_ee: float, delta_v: float) -> float:
    """Band power A = dV^2 rho (1 - rho) produced by a population rho."""
    if delta_v <= 0:
        raise ValueError("delta_v must be > 0")
    if not 0.0 <= rho_ee < 0.5:
        raise ValueError("rho_ee must lie in [0, 1/2)")
    return delta_v**2 * rho_ee * (1.0 - rho_ee)


def population_from_amplitude(amplitude: float, delta_v: float) -> float:
    """Thermal-branch root of A = dV^2 rho (1 - rho): the one below 1/2."""
    if delta_v <= 0:
        raise ValueError("delta_v must be > 0")
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    discriminant = 1.0 - 4.0 * amplitude / delta_v**2
    if discriminant < 0:
        raise AmplitudeBoundError(
            f"amplitude {amplitude!r} exceeds dV^2/4 = {delta_v**2 / 4!r}: "
            "no population reproduces it (check the dV calibration)"
        )
    return 0.5 * (1.0 - math.sqrt(discriminant))


def population_roots(amplitude: float, delta_v: float) -> tuple[float, float]:
    """Both roots of the amplitude quadratic: (thermal, inverted).

    The inverted root above 1/2 is diagnostic only; a thermal system never
    reaches it.
    """
    rho = population_from_amplitude(amplitude, delta_v)
    return rho, 1.0 - rho


def gamma_from_width(gamma1: float, n_th: float) -> float:
    """Intrinsic relaxation rate gamma = G1 / (1 + 2 n_th), in 1/s."""
    if gamma1 <= 0:
        raise ValueError("gamma1 must be > 0")
    if n_th < 0:
        raise ValueError("n_th must be >= 0")
    return gamma1 / (1.0 + 2.0 * n_th)
