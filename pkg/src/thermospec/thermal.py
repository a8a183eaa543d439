"""Thermodynamics of a two-level system coupled to a bosonic Markovian bath.

A qubit with transition frequency f exchanging energy with thermal radiation
relaxes at rate ``gamma*(1 + n_th)`` and is excited at rate ``gamma*n_th``,
where ``n_th`` is the Bose-Einstein occupation of the bath at f.  The
radiation reaching a cryogenic sample is the sum of the base-stage field and
the fields of warmer attenuators, each divided by its linear power
attenuation.  Everything here is closed form; the stochastic counterpart
lives in :mod:`thermospec.telegraph`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

# 2019 SI exact values; only the ratio h/k_B enters the occupation formula.
PLANCK_H = 6.62607015e-34  # J s
BOLTZMANN_K = 1.380649e-23  # J / K


class PopulationInversionError(ValueError):
    """Excited-state population >= 1/2: no thermal state reproduces it."""


@dataclass(frozen=True)
class RadiationStage:
    """A thermal radiator seen by the qubit through a fixed attenuation."""

    source_temperature: float  # K
    attenuation_db: float  # power attenuation between source and sample

    def __post_init__(self):
        if self.source_temperature < 0:
            raise ValueError("source_temperature must be >= 0 K")
        if self.attenuation_db < 0:
            raise ValueError("attenuation_db must be >= 0 dB")

    @property
    def linear_attenuation(self) -> float:
        return 10.0 ** (self.attenuation_db / 10.0)


@dataclass(frozen=True)
class ThermalEnvironment:
    """Radiation environment of the qubit.

    Parameters
    ----------
    qubit_frequency:
        Transition frequency f in Hz at which occupations are evaluated.
    base_temperature:
        Temperature of the coldest stage (the sample holder), in K.
    radiation_stages:
        Additional thermal radiators, each attenuated before reaching the
        sample.  Their photons add as ``n_th(T_stage) / 10^(dB/10)``.
    """

    qubit_frequency: float
    base_temperature: float
    radiation_stages: tuple[RadiationStage, ...] = ()

    def __post_init__(self):
        if self.qubit_frequency <= 0:
            raise ValueError("qubit_frequency must be > 0 Hz")
        if self.base_temperature < 0:
            raise ValueError("base_temperature must be >= 0 K")
        object.__setattr__(self, "radiation_stages", tuple(self.radiation_stages))

    def at_base_temperature(self, temperature: float) -> "ThermalEnvironment":
        """Same environment with the base stage set to ``temperature``."""
        return ThermalEnvironment(self.qubit_frequency, temperature, self.radiation_stages)


@dataclass(frozen=True)
class QubitRates:
    """Intrinsic relaxation rate and bath occupation of the two-level system.

    ``gamma_intrinsic`` is the zero-temperature energy relaxation rate in 1/s.
    The bath occupation ``n_th`` sets the up and down transition rates and
    with them every stationary property of the telegraph process.
    """

    gamma_intrinsic: float  # 1/s
    n_th: float  # photons, dimensionless

    def __post_init__(self):
        if self.gamma_intrinsic <= 0:
            raise ValueError("gamma_intrinsic must be > 0")
        if self.n_th < 0:
            raise ValueError("n_th must be >= 0")

    @property
    def up_rate(self) -> float:
        """Excitation rate g -> e, gamma * n_th."""
        return self.gamma_intrinsic * self.n_th

    @property
    def down_rate(self) -> float:
        """Relaxation rate e -> g, gamma * (1 + n_th)."""
        return self.gamma_intrinsic * (1.0 + self.n_th)

    @property
    def total_rate(self) -> float:
        """Total fluctuation rate Gamma_1 = gamma * (1 + 2 n_th), in 1/s.

        This is the decay rate of the state autocorrelation and the
        half-width (in angular frequency) of the noise spectrum.
        """
        return self.gamma_intrinsic * (1.0 + 2.0 * self.n_th)


class SteadyState(NamedTuple):
    rho_ee: float  # excited-state occupation probability
    z_mean: float  # mean of z = 2 rho_ee - 1


def bose_einstein_occupation(frequency: float, temperature: float) -> float:
    """Mean photon number 1/(exp(h f / k_B T) - 1) of a mode at ``frequency``.

    The zero-temperature limit returns exactly 0 (no division is attempted).
    """
    if frequency <= 0:
        raise ValueError("frequency must be > 0 Hz")
    if temperature < 0:
        raise ValueError("temperature must be >= 0 K")
    if temperature == 0.0:
        return 0.0
    x = PLANCK_H * frequency / (BOLTZMANN_K * temperature)
    if x > 700.0:  # expm1 would overflow; occupation underflows gracefully
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def effective_photon_number(env: ThermalEnvironment) -> float:
    """Total occupation at the sample: base stage plus attenuated radiators."""
    n = bose_einstein_occupation(env.qubit_frequency, env.base_temperature)
    for stage in env.radiation_stages:
        n += (
            bose_einstein_occupation(env.qubit_frequency, stage.source_temperature)
            / stage.linear_attenuation
        )
    return n


def steady_state(rates: QubitRates) -> SteadyState:
    """Stationary occupation of the rate equation.

    rho_ee = n_th / (1 + 2 n_th) and z_mean = -1 / (1 + 2 n_th); rho_ee is
    always below 1/2 for a thermal bath.
    """
    rho = rates.n_th / (1.0 + 2.0 * rates.n_th)
    return SteadyState(rho_ee=rho, z_mean=2.0 * rho - 1.0)


def effective_temperature(rho_ee: float, frequency: float) -> float:
    """Temperature whose equilibrium occupation gives ``rho_ee`` at ``frequency``.

    Inverts rho = n/(1+2n) and then the Bose-Einstein law.  Only populations
    strictly below 1/2 correspond to a (finite, positive) temperature.
    """
    if frequency <= 0:
        raise ValueError("frequency must be > 0 Hz")
    if rho_ee <= 0:
        raise ValueError("rho_ee must be > 0 for a finite temperature")
    if rho_ee >= 0.5:
        raise PopulationInversionError(
            f"rho_ee = {rho_ee} >= 1/2 has no thermal-equilibrium temperature"
        )
    n = rho_ee / (1.0 - 2.0 * rho_ee)
    x = math.log1p(1.0 / n)  # h f / (k_B T)
    return PLANCK_H * frequency / (BOLTZMANN_K * x)
