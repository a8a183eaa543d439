"""
From quadrature records to the Lorentzian noise spectrum
========================================================

The acquisition chain in one picture: the telegraph signal rides on the I/Q
quadratures under amplifier noise, the tone is chopped ON/OFF, 1024-point
periodograms are averaged per chop state, and the OFF background is
subtracted.  What remains is the Lorentzian 4 A Gamma1 / (Gamma1^2 + w^2)
whose amplitude encodes the excited-state population and whose half-width is
the total fluctuation rate.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from thermospec import ExperimentConfig, population_from_amplitude, run_point

config = ExperimentConfig(n_averages=8_000, master_seed=4)
point = run_point(config, temperature=0.020)
row = point.row

print(f"fit status: {point.status}")
print(f"population: fitted {row['rho_fitted'] * 100:.2f} % "
      f"(model {row['rho_model'] * 100:.2f} %)")
print(f"relaxation time from width: {row['t1_fitted_ns']:.0f} ns "
      f"(model {row['t1_model_ns']:.0f} ns)")

fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.5))

f_mhz = point.spectrum_on.frequencies / 1e6
left.semilogy(f_mhz[1:], point.spectrum_on.values[1:], label="ON")
left.semilogy(f_mhz[1:], point.spectrum_off.values[1:], label="OFF (background)")
left.set_xlabel("frequency (MHz)")
left.set_ylabel("PSD (V$^2$/Hz)")
left.set_title(f"averaged periodograms ({point.spectrum_on.n_averages} segments)")
left.legend()

sub = point.spectrum_subtracted
model = point.spectrum_analytic
fit = point.fit
lorentz = (
    4 * fit.amplitude * fit.gamma1 / (fit.gamma1**2 + (2 * np.pi * sub.frequencies) ** 2)
    + fit.baseline
)
right.plot(f_mhz[1:80], sub.values[1:80], ".", ms=4, label="ON - OFF")
right.plot(f_mhz[1:80], model.values[1:80], "k--", lw=1, label="closed form")
right.plot(f_mhz[1:80], lorentz[1:80], "r-", lw=1, label="Lorentzian fit")
right.set_xlabel("frequency (MHz)")
right.set_ylabel("PSD (V$^2$/Hz)")
right.set_title("background-subtracted spectrum")
right.legend()

fig.tight_layout()
fig.savefig("demo_02_spectrum_estimation.png", dpi=120)
print("wrote demo_02_spectrum_estimation.png")

# the amplitude-to-population inversion in one line
dv = config.detector.delta_v
print(f"population from amplitude directly: "
      f"{population_from_amplitude(fit.amplitude, dv) * 100:.2f} %")
