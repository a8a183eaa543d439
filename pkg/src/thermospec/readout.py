"""Synthesis of homodyne quadrature records from a telegraph signal.

Each quadrature follows X(t) = X_mean + (dX/2) z(t) + xi(t) while the
measurement tone is ON; xi is white Gaussian amplifier noise, independent
between I and Q.  When the tone is chopped OFF the record contains noise
only (zero mean) while the underlying telegraph process keeps evolving.
The detector sensitivity is (dV/2)^2 = (dI/2)^2 + (dQ/2)^2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .seeding import ROLE_NOISE, spawn_rng
from .telegraph import SampledSignal

# experimentally calibrated half swing; the default noise is a desk-scale choice (see README)
DEFAULT_DELTA_V_HALF = 2.76e-3  # V


@dataclass(frozen=True)
class DetectorParams:
    """Homodyne detector model: means, state swings, and noise per quadrature.

    ``delta_i`` / ``delta_q`` are full swings between the two qubit states so
    the telegraph term is (delta/2) * z.  ``noise_std_per_sample`` is the
    standard deviation of the white noise per quadrature per sample at the
    configured sample rate.  ``gain_i`` / ``gain_q`` are optional per-frequency
    multiplicative gain profiles applied by the spectral estimator (identity
    when None).
    """

    mean_i: float = 0.0  # V
    mean_q: float = 0.0  # V
    delta_i: float = DEFAULT_DELTA_V_HALF * math.sqrt(2.0)  # V
    delta_q: float = DEFAULT_DELTA_V_HALF * math.sqrt(2.0)  # V
    noise_std_per_sample: float = DEFAULT_DELTA_V_HALF  # V
    gain_i: np.ndarray | None = None
    gain_q: np.ndarray | None = None

    def __post_init__(self):
        if self.noise_std_per_sample < 0:
            raise ValueError("noise_std_per_sample must be >= 0")

    @property
    def delta_v(self) -> float:
        """Full vector swing dV = sqrt(dI^2 + dQ^2)."""
        return math.hypot(self.delta_i, self.delta_q)

    @property
    def delta_v_half(self) -> float:
        return 0.5 * self.delta_v

    def with_delta_v_half(self, delta_v_half: float) -> "DetectorParams":
        """Copy with the vector sensitivity overridden (e.g. by a calibration).

        The I/Q split of the swing is preserved; a zero-swing detector gets
        the new sensitivity divided equally.
        """
        if delta_v_half < 0:
            raise ValueError("delta_v_half must be >= 0")
        old = self.delta_v_half
        if old > 0:
            ratio = delta_v_half / old
            new_i, new_q = self.delta_i * ratio, self.delta_q * ratio
        else:
            new_i = new_q = delta_v_half * math.sqrt(2.0)
        return DetectorParams(
            mean_i=self.mean_i,
            mean_q=self.mean_q,
            delta_i=new_i,
            delta_q=new_q,
            noise_std_per_sample=self.noise_std_per_sample,
            gain_i=self.gain_i,
            gain_q=self.gain_q,
        )


@dataclass(frozen=True)
class QuadratureRecord:
    """Sampled I/Q record with its ON/OFF chop bookkeeping.

    Windows are contiguous half-periods of the chop cycle:
    ``window_bounds[k]:window_bounds[k+1]`` is ON where ``window_on[k]`` is
    true.  A record without chopping is a single ON (or OFF) window.
    """

    i_values: np.ndarray  # V
    q_values: np.ndarray  # V
    sample_rate: float  # Hz
    window_bounds: np.ndarray  # int sample indices, len = n_windows + 1
    window_on: np.ndarray  # bool, len = n_windows
    chop_period: float | None = None  # seconds, None when not chopped

    def __post_init__(self):
        if len(self.i_values) != len(self.q_values):
            raise ValueError("i_values and q_values must have the same length")
        if self.window_bounds[0] != 0 or self.window_bounds[-1] != len(self.i_values):
            raise ValueError("windows must partition the record exhaustively")
        if len(self.window_on) != len(self.window_bounds) - 1:
            raise ValueError("one ON/OFF label per window is required")

    def __len__(self) -> int:
        return len(self.i_values)

    def window_slices(self, on: bool) -> list[slice]:
        return [
            slice(int(self.window_bounds[k]), int(self.window_bounds[k + 1]))
            for k in range(len(self.window_on))
            if bool(self.window_on[k]) == on
        ]

    def save(self, path, detector: "DetectorParams | None" = None) -> None:
        """Interleaved float64 (I, Q) binary plus a JSON sidecar.

        Passing the detector records its parameters in the sidecar alongside
        the sampling and chop schedule.
        """
        path = Path(path)
        data = np.empty(2 * len(self), dtype="<f8")
        data[0::2] = self.i_values
        data[1::2] = self.q_values
        data.tofile(path)
        meta = {
            "n_samples": len(self),
            "sample_rate_hz": self.sample_rate,
            "chop_period_s": self.chop_period,
            "window_bounds": [int(b) for b in self.window_bounds],
            "window_on": [bool(w) for w in self.window_on],
            "layout": "interleaved little-endian float64 pairs (I, Q)",
        }
        if detector is not None:
            meta["detector"] = {
                "mean_i_v": detector.mean_i,
                "mean_q_v": detector.mean_q,
                "delta_i_v": detector.delta_i,
                "delta_q_v": detector.delta_q,
                "noise_std_per_sample_v": detector.noise_std_per_sample,
            }
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, indent=1))

    @classmethod
    def load(cls, path) -> "QuadratureRecord":
        path = Path(path)
        meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        data = np.fromfile(path, dtype="<f8")
        return cls(
            i_values=data[0::2].copy(),
            q_values=data[1::2].copy(),
            sample_rate=float(meta["sample_rate_hz"]),
            window_bounds=np.asarray(meta["window_bounds"], dtype=np.int64),
            window_on=np.asarray(meta["window_on"], dtype=bool),
            chop_period=meta["chop_period_s"],
        )


def _single_window_record(i, q, sample_rate, on, chop_period=None) -> QuadratureRecord:
    return QuadratureRecord(
        i_values=i,
        q_values=q,
        sample_rate=float(sample_rate),
        window_bounds=np.array([0, len(i)], dtype=np.int64),
        window_on=np.array([on]),
        chop_period=chop_period,
    )


def synthesize_window(
    z_values: np.ndarray | None,
    n_samples: int,
    det: DetectorParams,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """One window of I/Q samples; ``z_values=None`` means the tone is OFF.

    The I-channel noise is drawn before the Q-channel noise from the given
    stream; this ordering is part of the reproducibility contract.
    """
    xi_i = rng.normal(0.0, det.noise_std_per_sample, n_samples)
    xi_q = rng.normal(0.0, det.noise_std_per_sample, n_samples)
    if z_values is None:
        return xi_i, xi_q
    z = np.asarray(z_values, dtype=float)
    i = det.mean_i + 0.5 * det.delta_i * z + xi_i
    q = det.mean_q + 0.5 * det.delta_q * z + xi_q
    return i, q


def synthesize(z: SampledSignal, det: DetectorParams, seed) -> QuadratureRecord:
    """Tone-ON record for a sampled telegraph signal."""
    rng = np.random.default_rng(seed)
    i, q = synthesize_window(z.values, len(z), det, rng)
    return _single_window_record(i, q, z.sample_rate, on=True)


def synthesize_off(
    n_samples: int, det: DetectorParams, seed, sample_rate: float
) -> QuadratureRecord:
    """Tone-OFF record: amplifier noise only, zero mean."""
    rng = np.random.default_rng(seed)
    i, q = synthesize_window(None, n_samples, det, rng)
    return _single_window_record(i, q, sample_rate, on=False)


def chop_layout(
    n_samples: int, sample_rate: float, chop_period: float, duty: float
) -> tuple[np.ndarray, np.ndarray]:
    """Window bounds and ON labels for an alternating ON/OFF chop schedule.

    Windows alternate ON, OFF, ON, ... with the ON window covering
    round(duty * period * sample_rate) samples of each period; a trailing
    partial window is kept (labeled by where it falls in the cycle).
    """
    if chop_period <= 0:
        raise ValueError("chop_period must be > 0")
    if not 0.0 < duty <= 1.0:
        raise ValueError("duty must be in (0, 1]")
    if duty == 1.0:
        return (
            np.asarray([0, n_samples], dtype=np.int64),
            np.asarray([True], dtype=bool),
        )
    period_len = int(round(chop_period * sample_rate))
    on_len = int(round(duty * chop_period * sample_rate))
    if period_len <= 0 or on_len <= 0:
        raise ValueError("chop_period too short for the sample rate")
    bounds = [0]
    labels = []
    pos = 0
    while pos < n_samples:
        on_stop = min(pos + on_len, n_samples)
        bounds.append(on_stop)
        labels.append(True)
        if on_stop < n_samples:
            off_stop = min(pos + period_len, n_samples)
            if off_stop > on_stop:
                bounds.append(off_stop)
                labels.append(False)
        pos += period_len
    return np.asarray(bounds, dtype=np.int64), np.asarray(labels, dtype=bool)


def chop(
    z: SampledSignal,
    det: DetectorParams,
    chop_period: float,
    duty: float,
    seed,
) -> QuadratureRecord:
    """Interleaved ON/OFF record over the full sampled telegraph signal.

    The telegraph process evolves continuously across OFF windows (only the
    readout tone stops), so the underlying trajectory is identical with and
    without chopping.  Noise streams are derived per window from ``seed``,
    making the record independent of how windows are synthesized in parallel.
    """
    bounds, labels = chop_layout(len(z), z.sample_rate, chop_period, duty)
    i = np.empty(len(z))
    q = np.empty(len(z))
    for w, on in enumerate(labels):
        lo, hi = int(bounds[w]), int(bounds[w + 1])
        rng = spawn_rng(_seed_entropy(seed), ROLE_NOISE, w)
        zw = z.values[lo:hi] if on else None
        i[lo:hi], q[lo:hi] = synthesize_window(zw, hi - lo, det, rng)
    return QuadratureRecord(
        i_values=i,
        q_values=q,
        sample_rate=z.sample_rate,
        window_bounds=bounds,
        window_on=labels,
        chop_period=chop_period,
    )


def _seed_entropy(seed) -> int:
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    raise TypeError("chop requires an integer seed to derive per-window streams")
