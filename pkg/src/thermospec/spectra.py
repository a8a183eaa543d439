"""Averaged-periodogram spectral estimation and the closed-form oracles.

Estimator, mirroring the acquisition chain it models: the record is cut into
non-overlapping segments of ``segment_length`` samples inside a single chop
state (segments never straddle an ON/OFF boundary), each segment is mean-
removed, Fourier transformed with a rectangular window, and squared.  The
one-sided normalization is ``2 |FFT|^2 / (sample_rate * segment_length)``
(bins 0 and Nyquist are not doubled), so a white noise of per-sample variance
s^2 averages to the flat density 2 s^2 / sample_rate per quadrature and
Parseval holds exactly per segment.  I and Q periodograms are corrected per
bin by their gain profiles (divided by gain^2) and summed; ON and OFF
segments accumulate separately and the background is removed by subtraction.

Analytic oracle: an exponentially correlated telegraph signal with variance
Var(z) = 4 rho (1 - rho) and decay rate G1 has the one-sided Lorentzian
density S_z(f) = LORENTZIAN_ONESIDED_WEIGHT * Var(z) * G1 / (G1^2 + w^2),
w = 2 pi f, normalized so that the integral over f in [0, inf) equals
Var(z); the detector scales it by (dV/2)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .readout import DetectorParams, QuadratureRecord
from .thermal import QubitRates, steady_state

#: Weight making A * G1 / (G1^2 + w^2) a one-sided Hz density of total
#: power A: integral of 4 G1 / (G1^2 + (2 pi f)^2) over f in [0, inf) is 1.
LORENTZIAN_ONESIDED_WEIGHT = 4.0

KIND_ON = "ON"
KIND_OFF = "OFF"
KIND_SUBTRACTED = "SUBTRACTED"
KIND_ANALYTIC = "ANALYTIC"

_CSV_HEADER = "frequency_Hz,psd_V2_per_Hz"


class SpectrumGridError(ValueError):
    """Operands of a bin-wise spectrum operation live on different grids."""


@dataclass(frozen=True)
class PowerSpectrum:
    """One-sided power spectral density on a uniform frequency grid.

    ``frequencies`` runs from DC to Nyquist with bin width
    sample_rate / segment_length; ``values`` are in V^2/Hz.  ``n_averages``
    counts averaged periodogram segments (0 for analytic spectra).
    """

    frequencies: np.ndarray
    values: np.ndarray
    n_averages: int
    kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.frequencies) != len(self.values):
            raise ValueError("frequencies and values must have the same length")

    @property
    def bin_width(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def to_csv(self, path) -> None:
        """Decimal serialization at 17 significant digits (bit-exact round trip)."""
        with open(path, "w") as fh:
            fh.write(f"# kind={self.kind}\n")
            fh.write(f"# n_averages={self.n_averages}\n")
            for key in sorted(self.metadata):
                fh.write(f"# {key}={self.metadata[key]!r}\n")
            fh.write(_CSV_HEADER + "\n")
            for f_hz, v in zip(self.frequencies, self.values):
                fh.write(f"{f_hz:.17g},{v:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "PowerSpectrum":
        kind = "?"
        n_averages = 0
        metadata: dict = {}
        freqs: list[float] = []
        vals: list[float] = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line == _CSV_HEADER:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    if key == "kind":
                        kind = value
                    elif key == "n_averages":
                        n_averages = int(value)
                    else:
                        metadata[key] = value
                    continue
                a, b = line.split(",")
                freqs.append(float(a))
                vals.append(float(b))
        return cls(
            frequencies=np.asarray(freqs),
            values=np.asarray(vals),
            n_averages=n_averages,
            kind=kind,
            metadata=metadata,
        )


class SpectrumAccumulator:
    """Map-reduce accumulator for ON/OFF averaged periodograms.

    ``add_record`` may be called once with a full record or repeatedly with
    consecutive blocks; per-window partial sums (numpy pairwise summation
    inside a window) are reduced with math.fsum, which is exactly
    associative, so the final average is bit-identical for any blocking or
    ordering of the map step.
    """

    def __init__(
        self,
        sample_rate: float,
        segment_length: int = 1024,
        gain_i: np.ndarray | None = None,
        gain_q: np.ndarray | None = None,
    ):
        if segment_length < 2 or segment_length & (segment_length - 1):
            raise ValueError("segment_length must be a power of two >= 2")
        self.sample_rate = float(sample_rate)
        self.segment_length = int(segment_length)
        n_bins = segment_length // 2 + 1
        self._gain2 = {}
        for name, gain in (("i", gain_i), ("q", gain_q)):
            if gain is None:
                self._gain2[name] = None
            else:
                gain = np.asarray(gain, dtype=float)
                if len(gain) != n_bins:
                    raise ValueError(f"gain profile must have {n_bins} bins")
                self._gain2[name] = gain**2
        # one-sided scaling: double interior bins only
        scale = np.full(n_bins, 2.0 / (self.sample_rate * segment_length))
        scale[0] *= 0.5
        scale[-1] *= 0.5
        self._scale = scale
        self._partials: dict[bool, list[np.ndarray]] = {True: [], False: []}
        self._counts = {True: 0, False: 0}

    def _window_periodogram_sum(self, i_vals, q_vals) -> tuple[np.ndarray, int]:
        n_seg = len(i_vals) // self.segment_length
        if n_seg == 0:
            return np.zeros(self.segment_length // 2 + 1), 0
        total = np.zeros(self.segment_length // 2 + 1)
        batch = 4096  # segments per FFT batch, bounds memory for long windows
        for name, data in (("i", i_vals), ("q", q_vals)):
            segs = data[: n_seg * self.segment_length].reshape(n_seg, self.segment_length)
            for lo in range(0, n_seg, batch):
                part = segs[lo : lo + batch]
                part = part - part.mean(axis=1, keepdims=True)
                psd = np.abs(np.fft.rfft(part, axis=1)) ** 2 * self._scale
                if self._gain2[name] is not None:
                    psd = psd / self._gain2[name]
                total += psd.sum(axis=0)
        return total, n_seg

    def add_record(self, record: QuadratureRecord) -> None:
        if record.sample_rate != self.sample_rate:
            raise SpectrumGridError("record sample rate does not match the accumulator")
        for w, on in enumerate(record.window_on):
            on = bool(on)
            lo, hi = int(record.window_bounds[w]), int(record.window_bounds[w + 1])
            partial, n_seg = self._window_periodogram_sum(
                record.i_values[lo:hi], record.q_values[lo:hi]
            )
            if n_seg == 0:
                continue  # window shorter than a segment: skipped, never mixed
            self._partials[on].append(partial)
            self._counts[on] += n_seg

    def finalize(self, on: bool, metadata: dict | None = None) -> PowerSpectrum | None:
        count = self._counts[on]
        if count == 0:
            return None
        partials = self._partials[on]
        values = np.array(
            [math.fsum(p[b] for p in partials) for b in range(len(self._scale))]
        )
        values /= count
        freqs = np.arange(len(self._scale)) * (self.sample_rate / self.segment_length)
        meta = {
            "sample_rate_hz": self.sample_rate,
            "segment_length": self.segment_length,
        }
        meta.update(metadata or {})
        return PowerSpectrum(
            frequencies=freqs,
            values=values,
            n_averages=count,
            kind=KIND_ON if on else KIND_OFF,
            metadata=meta,
        )


def periodogram_accumulate(
    record: QuadratureRecord,
    segment_length: int = 1024,
    gain_i: np.ndarray | None = None,
    gain_q: np.ndarray | None = None,
) -> tuple[PowerSpectrum | None, PowerSpectrum | None]:
    """Averaged (ON, OFF) spectra of one record.

    A chop state that is present in the record but yields zero complete
    segments raises; a state with no windows at all comes back as ``None``
    (e.g. the OFF slot of an unchopped record).
    """
    acc = SpectrumAccumulator(record.sample_rate, segment_length, gain_i, gain_q)
    acc.add_record(record)
    labels = np.asarray(record.window_on, dtype=bool)
    out: list[PowerSpectrum | None] = []
    for on in (True, False):
        spec = acc.finalize(on=on)
        if spec is None and bool((labels == on).any()):
            raise ValueError(
                f"record has {'ON' if on else 'OFF'} windows but no complete segment"
            )
        out.append(spec)
    return out[0], out[1]


def background_subtract(s_on: PowerSpectrum, s_off: PowerSpectrum) -> PowerSpectrum:
    """Bin-wise ON - OFF; requires identical frequency grids."""
    if len(s_on.frequencies) != len(s_off.frequencies) or not np.array_equal(
        s_on.frequencies, s_off.frequencies
    ):
        raise SpectrumGridError("ON and OFF spectra live on different frequency grids")
    return PowerSpectrum(
        frequencies=s_on.frequencies,
        values=s_on.values - s_off.values,
        n_averages=min(s_on.n_averages, s_off.n_averages),
        kind=KIND_SUBTRACTED,
        metadata={**s_off.metadata, **s_on.metadata},
    )


def telegraph_psd(rates: QubitRates, frequencies: np.ndarray) -> np.ndarray:
    """One-sided density of z(t) in 1/Hz: 4 Var(z) G1 / (G1^2 + w^2)."""
    rho = steady_state(rates).rho_ee
    var_z = 4.0 * rho * (1.0 - rho)
    g1 = rates.total_rate
    w = 2.0 * np.pi * np.asarray(frequencies, dtype=float)
    return LORENTZIAN_ONESIDED_WEIGHT * var_z * g1 / (g1**2 + w**2)


def analytic_spectrum(
    rates: QubitRates, det: DetectorParams, frequencies: np.ndarray
) -> PowerSpectrum:
    """Closed-form detector spectrum (dV/2)^2 S_z(f), background-free."""
    frequencies = np.asarray(frequencies, dtype=float)
    values = det.delta_v_half**2 * telegraph_psd(rates, frequencies)
    return PowerSpectrum(
        frequencies=frequencies,
        values=values,
        n_averages=0,
        kind=KIND_ANALYTIC,
        metadata={
            "gamma1_rad_s": rates.total_rate,
            "rho_ee": steady_state(rates).rho_ee,
            "delta_v_half_V": det.delta_v_half,
        },
    )


def segment_parseval_gap(record: QuadratureRecord, segment_length: int = 1024) -> float:
    """Largest relative gap between bin-sum x bin-width and mean-removed power.

    Checked per channel on the first complete ON segment; the one-sided
    normalization makes the identity exact up to rounding.
    """
    for sl in record.window_slices(on=True):
        if sl.stop - sl.start >= segment_length:
            gaps = []
            for data in (record.i_values[sl], record.q_values[sl]):
                seg = data[:segment_length] - data[:segment_length].mean()
                n_bins = segment_length // 2 + 1
                scale = np.full(n_bins, 2.0 / (record.sample_rate * segment_length))
                scale[0] *= 0.5
                scale[-1] *= 0.5
                psd = np.abs(np.fft.rfft(seg)) ** 2 * scale
                bin_width = record.sample_rate / segment_length
                power = float((seg**2).mean())
                gap = abs(psd.sum() * bin_width - power)
                gaps.append(gap / power if power > 0 else gap)
            return max(gaps)
    raise ValueError("record contains no complete ON segment")
