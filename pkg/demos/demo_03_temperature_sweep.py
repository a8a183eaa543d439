"""
Temperature sweep: spectra, population, and relaxation time
===========================================================

Sweeping the base temperature grows the thermal photon number and with it the
Lorentzian amplitude (population) and width (fluctuation rate).  The model
branch predicts the relaxation time 1/Gamma1 = 1/(gamma (1+2 n_th)) to fall
with temperature through stimulated emission.  Above ~100 mK the two-level
treatment is a caricature of a real transmon, so take the hot points with a
grain of salt.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from thermospec import ExperimentConfig, run_sweep

config = ExperimentConfig(
    temperatures=(0.020, 0.060, 0.100, 0.150, 0.200),
    n_averages=8_000,
    master_seed=5,
)
sweep = run_sweep(config)

fig, axes = plt.subplots(1, 3, figsize=(14, 4.2))

colors = plt.cm.viridis(np.linspace(0.1, 0.9, len(sweep.points)))
for point, color in zip(sweep.points, colors):
    sub = point.spectrum_subtracted
    f_mhz = sub.frequencies / 1e6
    axes[0].plot(
        f_mhz[1:60],
        sub.values[1:60] * 1e12,
        color=color,
        lw=1,
        label=f"{point.temperature * 1e3:.0f} mK",
    )
    axes[0].plot(f_mhz[1:60], point.spectrum_analytic.values[1:60] * 1e12, "--",
                 color=color, lw=0.8)
axes[0].set_xlabel("frequency (MHz)")
axes[0].set_ylabel("PSD (pV$^2$/Hz)")
axes[0].set_title("subtracted spectra (dashed: closed form)")
axes[0].legend(fontsize=8)

temps_mk = np.array([row["temperature_K"] for row in sweep.rows]) * 1e3
rho_fit = np.array([row["rho_fitted"] for row in sweep.rows])
rho_err = np.array([row["rho_uncertainty"] for row in sweep.rows])
rho_model = np.array([row["rho_model"] for row in sweep.rows])
dense_t = np.linspace(0.015, 0.210, 100)
dense_model = []
from thermospec import QubitRates, effective_photon_number, steady_state

for t in dense_t:
    env = config.environment.at_base_temperature(t)
    dense_model.append(
        steady_state(QubitRates(config.gamma_intrinsic, effective_photon_number(env))).rho_ee
    )
axes[1].errorbar(temps_mk, rho_fit * 100, yerr=rho_err * 100, fmt="o", label="fitted")
axes[1].plot(dense_t * 1e3, np.array(dense_model) * 100, "r--", label="thermal model")
axes[1].set_xlabel("base temperature (mK)")
axes[1].set_ylabel("excited population (%)")
axes[1].set_title("population vs temperature")
axes[1].legend()

t1_fit = np.array([row["t1_fitted_ns"] for row in sweep.rows])
t1_model = np.array([row["t1_model_ns"] for row in sweep.rows])
axes[2].plot(temps_mk, t1_fit, "o", label="1/Gamma1 from fits")
axes[2].plot(temps_mk, t1_model, "r--", label="model 1/(gamma(1+2n_th))")
axes[2].set_xlabel("base temperature (mK)")
axes[2].set_ylabel("relaxation time (ns)")
axes[2].set_title("fluctuation time vs temperature")
axes[2].legend()

fig.tight_layout()
fig.savefig("demo_03_temperature_sweep.png", dpi=120)
print("wrote demo_03_temperature_sweep.png")
for row in sweep.rows:
    print(
        f"T={row['temperature_K'] * 1e3:5.0f} mK  "
        f"rho {row['rho_fitted'] * 100:6.2f} % (model {row['rho_model'] * 100:5.2f} %)  "
        f"T1 {row['t1_fitted_ns']:6.1f} ns (model {row['t1_model_ns']:6.1f} ns)"
    )
