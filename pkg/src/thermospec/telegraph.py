"""Exact stochastic simulation of the two-state telegraph process.

The qubit state z(t) in {-1, +1} is a continuous-time Markov chain: dwell
times in the excited state are Exponential(down_rate), dwell times in the
ground state Exponential(up_rate).  Trajectories are generated event by event
from inverse-CDF exponential draws, so there is no timestep discretization
bias; uniform sampling onto a grid happens afterwards.

Conventions: the state is left-continuous at switch instants (a sample taken
exactly at a switch time reports the pre-switch state), and the default
initial state is a steady-state Bernoulli draw so finite records are
stationary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .thermal import QubitRates, steady_state

GROUND = "ground"
EXCITED = "excited"

_Z_OF_STATE = {GROUND: -1, EXCITED: +1}

# dwell draws are taken in blocks of this many events
_EVENT_BLOCK = 4096


@dataclass(frozen=True)
class TelegraphTrajectory:
    """Event-time representation of one realization of z(t).

    ``switch_times`` is strictly increasing within [0, duration); each entry
    toggles the state.  The realization is fully determined by
    (rates, duration, seed, initial-state policy).
    """

    initial_state: str  # GROUND or EXCITED
    switch_times: np.ndarray  # seconds, strictly increasing
    duration: float  # seconds
    rates: QubitRates
    seed: object  # whatever seed specification produced the realization

    def __post_init__(self):
        if self.initial_state not in (GROUND, EXCITED):
            raise ValueError(f"unknown initial_state {self.initial_state!r}")
        if self.duration <= 0:
            raise ValueError("duration must be > 0")

    @property
    def initial_z(self) -> int:
        return _Z_OF_STATE[self.initial_state]

    def z_at(self, times: np.ndarray) -> np.ndarray:
        """State z in {-1, +1} at each time, left-continuous at switches."""
        times = np.asarray(times, dtype=float)
        # number of switches strictly before t
        flips = np.searchsorted(self.switch_times, times, side="left")
        z = np.where(flips % 2 == 0, self.initial_z, -self.initial_z)
        return z.astype(np.int8)

    def dwell_times(self) -> tuple[np.ndarray, np.ndarray]:
        """Complete dwell times, split by state: (excited, ground).

        The final dwell is censored by the end of the record and excluded.
        The dwell starting at t=0 is included: by memorylessness the time to
        the first switch is exactly exponential with the current exit rate.
        """
        edges = np.concatenate(([0.0], self.switch_times))
        dwells = np.diff(edges)  # complete dwells only; the tail is dropped
        in_initial = dwells[0::2]
        in_other = dwells[1::2]
        if self.initial_z == 1:
            return in_initial, in_other
        return in_other, in_initial

    def occupancy(self) -> float:
        """Fraction of time spent in the excited state over [0, duration]."""
        edges = np.concatenate(([0.0], self.switch_times, [self.duration]))
        dwells = np.diff(edges)
        offset = 0 if self.initial_z == 1 else 1
        return float(dwells[offset::2].sum() / self.duration)

    def to_csv(self, path) -> None:
        """Dump switch times, one float64 seconds per line, with a header."""
        with open(path, "w") as fh:
            fh.write(f"# gamma_intrinsic={self.rates.gamma_intrinsic!r}\n")
            fh.write(f"# n_th={self.rates.n_th!r}\n")
            fh.write(f"# duration={self.duration!r}\n")
            fh.write(f"# initial_state={self.initial_state}\n")
            fh.write(f"# seed={self.seed!r}\n")
            fh.write("switch_time_s\n")
            for t in self.switch_times:
                fh.write(f"{t:.17g}\n")


@dataclass(frozen=True)
class SampledSignal:
    """z(t) evaluated on a uniform grid: values[k] = z(start_time + k/sample_rate)."""

    values: np.ndarray  # int8 in {-1, +1}
    sample_rate: float  # Hz
    start_time: float = 0.0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")

    def __len__(self) -> int:
        return len(self.values)


def _exponential_dwells(rng: np.random.Generator, rate: float, size: int) -> np.ndarray:
    # inverse CDF: -log(1-u)/rate with u uniform in [0, 1)
    if rate == 0.0:
        return np.full(size, np.inf)
    return -np.log1p(-rng.random(size)) / rate


def simulate_trajectory(
    rates: QubitRates,
    duration: float,
    seed,
    init: str = "steady",
) -> TelegraphTrajectory:
    """Draw one telegraph realization of length ``duration`` seconds.

    Parameters
    ----------
    rates:
        Transition rates; dwell laws are Exponential(up_rate) in the ground
        state and Exponential(down_rate) in the excited state.
    duration:
        Record length in seconds.
    seed:
        Anything accepted by ``numpy.random.default_rng`` (int, SeedSequence).
    init:
        ``"steady"`` draws the initial state Bernoulli(rho_ee) so the record
        is stationary; ``"ground"`` / ``"excited"`` pin it.

    A zero up-rate with a ground start yields a valid trajectory with no
    switches.
    """
    if duration <= 0:
        raise ValueError("duration must be > 0")
    rng = np.random.default_rng(seed)
    if init == "steady":
        rho = steady_state(rates).rho_ee
        state = EXCITED if rng.random() < rho else GROUND
    elif init in (GROUND, EXCITED):
        state = init
    else:
        raise ValueError(f"init must be 'steady', 'ground' or 'excited', got {init!r}")

    exit_rate = {GROUND: rates.up_rate, EXCITED: rates.down_rate}
    # alternate exponential dwells in blocks until the record is covered
    chunks: list[np.ndarray] = []
    t = 0.0
    current = state
    while t < duration:
        rate_now = exit_rate[current]
        if rate_now == 0.0:
            break  # current state is absorbing
        other = GROUND if current == EXCITED else EXCITED
        rate_other = exit_rate[other]
        if rate_other == 0.0:
            # partner state is absorbing: at most one more switch
            t_switch = t + _exponential_dwells(rng, rate_now, 1)[0]
            if t_switch < duration:
                chunks.append(np.array([t_switch]))
            break
        block = np.empty(_EVENT_BLOCK)
        block[0::2] = _exponential_dwells(rng, rate_now, _EVENT_BLOCK // 2)
        block[1::2] = _exponential_dwells(rng, rate_other, _EVENT_BLOCK // 2)
        times = t + np.cumsum(block)
        keep = times < duration
        chunks.append(times[keep])
        t = float(times[-1])
        if int(keep.sum()) % 2 == 1:
            current = other
    switch_times = np.concatenate(chunks) if chunks else np.empty(0)
    return TelegraphTrajectory(
        initial_state=state,
        switch_times=switch_times,
        duration=float(duration),
        rates=rates,
        seed=seed,
    )


def sample(
    traj: TelegraphTrajectory,
    sample_rate: float,
    start_time: float = 0.0,
    n_samples: int | None = None,
) -> SampledSignal:
    """Piecewise-constant evaluation of the trajectory on a uniform grid.

    By default the grid covers the whole record with
    floor(duration * sample_rate) points starting at t=0; callers that track
    exact sample counts (the acquisition pipeline) pass ``n_samples``.
    """
    if sample_rate <= 0:
        raise ValueError("sample_rate must be > 0")
    if n_samples is None:
        n_samples = int(np.floor(traj.duration * sample_rate))
    values = np.empty(n_samples, dtype=np.int8)
    # chunked evaluation keeps memory flat for long records
    chunk = 1 << 20
    for lo in range(0, n_samples, chunk):
        hi = min(lo + chunk, n_samples)
        t = start_time + np.arange(lo, hi, dtype=float) / sample_rate
        values[lo:hi] = traj.z_at(t)
    return SampledSignal(values=values, sample_rate=float(sample_rate), start_time=start_time)


def empirical_autocorrelation(signal: SampledSignal, max_lag: int) -> np.ndarray:
    """Biased estimator of the connected correlator <dz(t+k) dz(t)>, k=0..max_lag.

    dz = z - mean(z); normalization is 1/N at every lag (biased), which keeps
    the estimate positive semidefinite.
    """
    n = len(signal)
    if max_lag >= n:
        raise ValueError("max_lag must be smaller than the signal length")
    dz = signal.values.astype(float)
    dz -= dz.mean()
    nfft = 1 << int(np.ceil(np.log2(n + max_lag + 1)))
    spec = np.fft.rfft(dz, nfft)
    acf = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    return acf / n


def fit_correlation_decay_rate(
    lags_s: np.ndarray, correlator: np.ndarray
) -> float:
    """Log-linear decay-rate estimate of an exponentially decaying correlator.

    Used as an independent cross-check of the spectral width: a straight-line
    fit of log C(tau) over the supplied lags returns the decay rate in 1/s.
    Only strictly positive correlator values are usable.
    """
    lags_s = np.asarray(lags_s, dtype=float)
    correlator = np.asarray(correlator, dtype=float)
    good = correlator > 0
    if good.sum() < 2:
        raise ValueError("need at least two positive correlator values")
    slope = np.polyfit(lags_s[good], np.log(correlator[good]), 1)[0]
    return -float(slope)
