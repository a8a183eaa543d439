import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermospec.thermal import (
    PopulationInversionError,
    QubitRates,
    RadiationStage,
    ThermalEnvironment,
    bose_einstein_occupation,
    effective_photon_number,
    effective_temperature,
    steady_state,
)

F_QUBIT = 5.304e9

# frozen from 30-digit evaluation of 1/(exp(h f / k T) - 1) with exact-SI h, k
N_TH_55MK = 0.00986861994121142878
N_TH_600MK = 1.89233242990221376
N_TH_20MK = 2.96809666988093469e-06
N_EFF_STILL = 0.0119427785451184033  # 20 mK base + 600 mK through 22 dB
RHO_EFF_STILL = 0.0116641732686008242
T_EFF_RHO_1PC = 0.0553961291355411794  # K


class TestBoseEinsteinOccupation:
    def test_zero_temperature_limit(self):
        assert bose_einstein_occupation(F_QUBIT, 0.0) == 0.0

    def test_55mk_value(self):
        n = bose_einstein_occupation(F_QUBIT, 0.055)
        assert n == pytest.approx(N_TH_55MK, rel=1e-12)
        # the corresponding population is the reported ~1 %
        assert steady_state(QubitRates(1.0, n)).rho_ee == pytest.approx(0.01, abs=0.5e-2)

    def test_600mk_value(self):
        assert bose_einstein_occupation(F_QUBIT, 0.600) == pytest.approx(
            N_TH_600MK, rel=1e-12
        )
        assert bose_einstein_occupation(F_QUBIT, 0.600) == pytest.approx(1.89, abs=5e-3)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            bose_einstein_occupation(0.0, 0.1)
        with pytest.raises(ValueError):
            bose_einstein_occupation(F_QUBIT, -0.1)

    @given(
        t1=st.floats(0.01, 10.0),
        t2=st.floats(0.01, 10.0),
        f=st.floats(1e8, 2e10),
    )
    @settings(deadline=None, max_examples=200)
    def test_strict_monotonicity_in_temperature(self, t1, t2, f):
        # domain kept above the double-precision underflow of the occupation;
        # near-identical temperatures are skipped (the occupations round equal)
        lo, hi = sorted((t1, t2))
        if hi / lo < 1 + 1e-9:
            return
        assert bose_einstein_occupation(f, lo) < bose_einstein_occupation(f, hi)

    def test_deep_cryogenic_underflow_is_graceful(self):
        assert bose_einstein_occupation(1e11, 1e-3) == 0.0


class TestEffectivePhotonNumber:
    def test_empty_cold_environment(self):
        env = ThermalEnvironment(F_QUBIT, 0.0)
        assert effective_photon_number(env) == 0.0

    def test_still_stage_anchor(self):
        env = ThermalEnvironment(F_QUBIT, 0.020, (RadiationStage(0.600, 22.0),))
        n = effective_photon_number(env)
        assert n == pytest.approx(N_EFF_STILL, rel=1e-12)
        # base-stage contribution is negligible at 20 mK
        assert bose_einstein_occupation(F_QUBIT, 0.020) == pytest.approx(
            N_TH_20MK, rel=1e-9
        )
        rho = steady_state(QubitRates(1.0, n)).rho_ee
        assert rho == pytest.approx(RHO_EFF_STILL, rel=1e-12)
        assert rho == pytest.approx(0.012, abs=1e-3)

    def test_monotone_in_base_temperature(self):
        stages = (RadiationStage(0.600, 22.0),)
        cold = effective_photon_number(ThermalEnvironment(F_QUBIT, 0.020, stages))
        warm = effective_photon_number(ThermalEnvironment(F_QUBIT, 0.100, stages))
        assert warm > cold

    def test_stage_validation(self):
        with pytest.raises(ValueError):
            RadiationStage(-1.0, 20.0)
        with pytest.raises(ValueError):
            RadiationStage(0.6, -3.0)


class TestSteadyState:
    def test_zero_occupation(self):
        ss = steady_state(QubitRates(1.0, 0.0))
        assert ss.rho_ee == 0.0
        assert ss.z_mean == -1.0

    def test_infinite_temperature_limit(self):
        ss = steady_state(QubitRates(1.0, 1e12))
        assert ss.rho_ee == pytest.approx(0.5, abs=1e-12)

    def test_anchor_occupation(self):
        # 0.012 / 1.024 is exact in decimal
        ss = steady_state(QubitRates(1.0, 0.012))
        assert ss.rho_ee == pytest.approx(0.01171875, rel=1e-12)
        assert ss.z_mean == pytest.approx(2 * 0.01171875 - 1, rel=1e-12)

    def test_rate_relations(self):
        rates = QubitRates(2.5e6, 0.3)
        assert rates.up_rate == pytest.approx(2.5e6 * 0.3, rel=1e-15)
        assert rates.down_rate == pytest.approx(2.5e6 * 1.3, rel=1e-15)
        assert rates.total_rate == pytest.approx(2.5e6 * 1.6, rel=1e-15)
        assert rates.total_rate == pytest.approx(rates.up_rate + rates.down_rate, rel=1e-15)

    @given(n=st.floats(0.0, 1e6))
    @settings(deadline=None, max_examples=200)
    def test_population_stays_thermal(self, n):
        rates = QubitRates(1.0, n)
        ss = steady_state(rates)
        assert 0.0 <= ss.rho_ee < 0.5
        assert rates.total_rate >= rates.gamma_intrinsic
        if n == 0:
            assert rates.total_rate == rates.gamma_intrinsic

    @given(n1=st.floats(1e-6, 1e3), n2=st.floats(1e-6, 1e3))
    @settings(deadline=None, max_examples=200)
    def test_variance_factor_increasing(self, n1, n2):
        lo, hi = sorted((n1, n2))
        if hi / lo < 1 + 1e-9:  # below rounding resolution of the map
            return
        def var(n):
            rho = steady_state(QubitRates(1.0, n)).rho_ee
            return rho * (1 - rho)
        assert var(lo) < var(hi)


class TestEffectiveTemperature:
    def test_roundtrip_55mk(self):
        n = bose_einstein_occupation(F_QUBIT, 0.055)
        rho = steady_state(QubitRates(1.0, n)).rho_ee
        assert effective_temperature(rho, F_QUBIT) == pytest.approx(0.055, rel=1e-12)

    def test_one_percent_anchor(self):
        t = effective_temperature(0.01, F_QUBIT)
        assert t == pytest.approx(T_EFF_RHO_1PC, rel=1e-12)
        assert t == pytest.approx(0.055, abs=1e-3)

    def test_population_inversion_rejected(self):
        with pytest.raises(PopulationInversionError):
            effective_temperature(0.5, F_QUBIT)
        with pytest.raises(PopulationInversionError):
            effective_temperature(0.7, F_QUBIT)

    @given(t=st.floats(5e-3, 5.0), f=st.floats(1e8, 5e10))
    @settings(deadline=None, max_examples=300)
    def test_roundtrip_identity(self, t, f):
        n = bose_einstein_occupation(f, t)
        if n == 0.0:  # below double-precision support of expm1 inverse
            return
        rho = steady_state(QubitRates(1.0, n)).rho_ee
        assert effective_temperature(rho, f) == pytest.approx(t, rel=1e-9)
