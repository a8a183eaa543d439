"""
Telegraph dynamics of a thermally excited two-level system
==========================================================

A qubit in contact with a thermal bath hops between ground and excited
states: up at rate gamma*n_th, down at rate gamma*(1+n_th).  This demo draws
one trajectory at the 20 mK operating point, checks the dwell-time laws
against their exponential distributions, and compares the sampled signal's
autocorrelation with the closed form C(tau) = 4 rho (1-rho) exp(-Gamma1 tau).
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from thermospec import (
    QubitRates,
    empirical_autocorrelation,
    sample,
    simulate_trajectory,
    steady_state,
)

rates = QubitRates(gamma_intrinsic=1 / 226e-9, n_th=0.012)
rho = steady_state(rates).rho_ee
print(f"steady-state excited population: {rho:.4f}")
print(f"total fluctuation rate Gamma1/2pi: {rates.total_rate / 2 / np.pi / 1e3:.0f} kHz")

traj = simulate_trajectory(rates, duration=0.1, seed=1)
excited, ground = traj.dwell_times()
print(f"{len(traj.switch_times)} switches, occupancy {traj.occupancy():.4f}")

fig, axes = plt.subplots(2, 2, figsize=(10, 7))

# a 100 us excerpt of the sampled signal
sig = sample(traj, 100e6, n_samples=10_000)
t_us = np.arange(len(sig)) / 100.0
axes[0, 0].step(t_us, sig.values, lw=0.8)
axes[0, 0].set_xlabel("time (us)")
axes[0, 0].set_ylabel("z(t)")
axes[0, 0].set_title("trajectory excerpt")

# dwell histograms against the exponential laws
for ax, dwells, rate, label in [
    (axes[0, 1], excited, rates.down_rate, "excited"),
    (axes[1, 0], ground, rates.up_rate, "ground"),
]:
    tau = dwells * rate  # in units of the mean dwell
    ax.hist(tau, bins=60, range=(0, 6), density=True, alpha=0.6)
    grid = np.linspace(0, 6, 200)
    ax.plot(grid, np.exp(-grid), "k--", label="Exponential(1)")
    ax.set_yscale("log")
    ax.set_xlabel("dwell / mean dwell")
    ax.set_title(f"{label} dwells (n={len(dwells)})")
    ax.legend()

# autocorrelation of the sampled signal vs the closed form
full = sample(traj, 100e6)
max_lag = 120
acf = empirical_autocorrelation(full, max_lag)
lags_us = np.arange(max_lag + 1) / 100.0
axes[1, 1].plot(lags_us, acf, ".", ms=3, label="measured")
var_z = 4 * rho * (1 - rho)
axes[1, 1].plot(
    lags_us,
    var_z * np.exp(-rates.total_rate * lags_us * 1e-6),
    "k--",
    label="4 rho(1-rho) exp(-Gamma1 tau)",
)
axes[1, 1].set_xlabel("lag (us)")
axes[1, 1].set_ylabel("C_z(tau)")
axes[1, 1].set_title("connected autocorrelation")
axes[1, 1].legend()

fig.tight_layout()
fig.savefig("demo_01_telegraph_trajectory.png", dpi=120)
print("wrote demo_01_telegraph_trajectory.png")
