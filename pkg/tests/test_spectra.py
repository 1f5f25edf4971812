"""Noise-spectrum models: frozen hand-computed values and invariants."""

import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tfqkd
from tfqkd import (
    CavityParams,
    DomainError,
    FiberParams,
    LaserFreeParams,
    LaserSpec,
    LoopParams,
    TopologyConfig,
    TopologyKind,
    interference_spectrum,
    loop_gain,
    psd_cavity,
    psd_fiber,
    psd_interference,
    psd_laser_free,
    psd_laser_stabilized,
)

LASER = LaserFreeParams()
CAVITY = CavityParams()
LOOP = LoopParams()
FIBER = FiberParams()


class TestLaserFree:
    def test_value_at_1hz(self):
        # oracle: independent hand arithmetic with the table coefficients
        expected = 3e6 / 1.0 + (3e2 / 1.0) * (2e6 / (1.0 + 2e6)) ** 2
        assert psd_laser_free(1.0, LASER) == pytest.approx(expected, rel=1e-15)
        assert psd_laser_free(1.0, LASER) == pytest.approx(3.0003e6, rel=1e-4)

    def test_value_at_cutoff(self):
        # r3/f^3 = 3.75e-13, r2/f^2 * (1/2)^2 = 1.875e-11
        assert psd_laser_free(2e6, LASER) == pytest.approx(1.9125e-11, rel=1e-6)

    def test_monotone_decay_at_high_f(self):
        f = np.geomspace(2e6, 1e10, 50)
        vals = psd_laser_free(f, LASER)
        assert np.all(np.diff(vals) < 0)
        assert vals[-1] < 1e-20

    def test_rejects_nonpositive_frequency(self):
        for bad in (0.0, -1.0):
            with pytest.raises(DomainError):
                psd_laser_free(bad, LASER)

    def test_rejects_bad_params(self):
        with pytest.raises(DomainError):
            LaserFreeParams(r3=-1.0)
        with pytest.raises(DomainError):
            LaserFreeParams(f_c=0.0)


class TestCavity:
    def test_value_at_1hz(self):
        assert psd_cavity(1.0, CAVITY) == pytest.approx(0.502, rel=1e-12)

    def test_value_at_10hz(self):
        assert psd_cavity(10.0, CAVITY) == pytest.approx(7e-5, rel=1e-12)

    def test_zero_coefficients(self):
        p = CavityParams(c4=0.0, c3=0.0, c2=0.0)
        assert np.all(psd_cavity(np.geomspace(1e-3, 1e9, 20), p) == 0.0)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(DomainError):
            psd_cavity(-2.0, CAVITY)


class TestLoopGain:
    def test_diverges_at_low_f(self):
        assert abs(loop_gain(1e-3, LOOP)) > abs(loop_gain(1.0, LOOP)) > 1e6

    def test_suppression_factor_at_bandwidth(self):
        g = loop_gain(LOOP.bandwidth, LOOP)
        s = abs(1.0 / (1.0 + g)) ** 2
        assert 0.0 < s < 1.0

    def test_high_f_asymptote(self):
        # far above the pole the zero/pole ratio tends to 1
        f = 1e9
        expected = LOOP.g0 / (2 * np.pi * f) ** 2
        assert abs(loop_gain(f, LOOP)) == pytest.approx(expected, rel=1e-2)

    def test_g0_derived(self):
        assert LOOP.g0 == pytest.approx((2 * np.pi * 3e5) ** 2 * 11.0 / 1.1, rel=1e-12)

    def test_rejects_bad_shape(self):
        with pytest.raises(DomainError):
            LoopParams(gamma=1.5)
        with pytest.raises(DomainError):
            LoopParams(delta=0.5)


class TestLaserStabilized:
    def test_low_f_follows_cavity(self):
        f = 10.0
        val = psd_laser_stabilized(f, LASER, CAVITY, LOOP)
        assert val == pytest.approx(psd_cavity(f, CAVITY), rel=1e-3)

    def test_high_f_cavity_plus_free(self):
        f = 1e9
        val = psd_laser_stabilized(f, LASER, CAVITY, LOOP)
        expected = psd_cavity(f, CAVITY) + psd_laser_free(f, LASER)
        assert val == pytest.approx(expected, rel=1e-3)

    def test_brute_force_complex_arithmetic(self):
        # oracle: scalar cmath evaluation, independent of the vectorized path
        f = 1e3
        g0 = (2 * cmath.pi * 3e5) ** 2 * (1 + 10.0) / (1 + 0.1)
        g = g0 / (2 * cmath.pi * f) ** 2 * (1j * f + 3e5 * 0.1) / (1j * f + 3e5 * 10.0)
        supp = abs(1.0 / (1.0 + g)) ** 2
        free = 3e6 / f**3 + 3e2 / f**2 * (2e6 / (f + 2e6)) ** 2
        cav = 0.5 / f**4 + 2e-3 / f**2
        assert psd_laser_stabilized(f, LASER, CAVITY, LOOP) == pytest.approx(
            cav + supp * free, rel=1e-12)

    def test_never_below_cavity(self):
        f = np.geomspace(1e-2, 1e9, 200)
        assert np.all(psd_laser_stabilized(f, LASER, CAVITY, LOOP)
                      >= psd_cavity(f, CAVITY))


class TestFiber:
    def test_free_value(self):
        expected = 44.0 * 100.0 * (100.0 / 101.0) ** 2
        got = psd_fiber(1.0, 100.0, FIBER, stabilized=False)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(4313.3, rel=1e-4)

    def test_zero_length_free(self):
        f = np.geomspace(1e-3, 1e9, 30)
        assert np.all(psd_fiber(f, 0.0, FIBER, stabilized=False) == 0.0)

    def test_suppression_factor(self):
        assert FIBER.stabilization_suppression == pytest.approx(
            (1.19 / 1543.33) ** 2, rel=1e-9)
        assert FIBER.stabilization_suppression == pytest.approx(5.95e-7, rel=1e-2)

    @given(st.floats(0.1, 1e3), st.floats(1e-2, 1e8), st.floats(0.1, 10.0))
    @settings(max_examples=60, deadline=None)
    def test_linear_in_length(self, length, f, a):
        base = psd_fiber(f, length, FIBER, stabilized=False)
        assert psd_fiber(f, a * length, FIBER, stabilized=False) == pytest.approx(
            a * base, rel=1e-12)
        # stabilized case: the length-dependent part scales, the floor does not
        from tfqkd.spectra import psd_fiber_linear
        lin = psd_fiber_linear(f, length, FIBER, stabilized=True)
        lin_a = psd_fiber_linear(f, a * length, FIBER, stabilized=True)
        assert lin_a == pytest.approx(a * lin, rel=1e-12)
        floor = psd_fiber(f, 0.0, FIBER, stabilized=True)
        assert psd_fiber(f, length, FIBER, stabilized=True) == pytest.approx(
            lin + floor, rel=1e-12)

    def test_rejects_negative_length(self):
        with pytest.raises(DomainError):
            psd_fiber(1.0, -1.0, FIBER, stabilized=False)


class TestInterference:
    def test_common_zero_mismatch_is_fiber_only(self):
        topo = TopologyConfig(kind=TopologyKind.COMMON_LASER, l_a=100.0, l_b=100.0)
        f = np.geomspace(1.0, 1e7, 50)
        got = psd_interference(f, topo)
        fiber_only = 4.0 * 2.0 * psd_fiber(f, 100.0, FIBER, stabilized=False)
        assert got == pytest.approx(fiber_only, rel=1e-12)

    def test_common_periodic_zeros(self):
        topo = TopologyConfig(l_a=114.0, l_b=111.5)
        dl_m = 2.5e3
        spec = interference_spectrum(topo)
        fiber_only = 4.0 * (psd_fiber(1.0, 114.0, FIBER, False)
                            + psd_fiber(1.0, 111.5, FIBER, False))
        for k in (1, 2, 5):
            f0 = k * topo.light_speed / (2 * topo.refractive_index * dl_m)
            fib = 4.0 * (psd_fiber(f0, 114.0, FIBER, False)
                         + psd_fiber(f0, 111.5, FIBER, False))
            # at the sine zeros only the fiber term survives
            assert spec(f0) == pytest.approx(fib, rel=1e-6)
        assert spec.oscillation_period == pytest.approx(
            topo.light_speed / (2 * topo.refractive_index * dl_m), rel=1e-12)

    def test_independent_identical_arms(self):
        topo = TopologyConfig(kind=TopologyKind.INDEPENDENT_LASERS,
                              laser_stabilized=True, l_a=80.0, l_b=80.0)
        laser = LaserSpec()
        f = np.geomspace(1.0, 1e7, 40)
        got = psd_interference(f, topo, laser)
        expected = (2.0 * psd_laser_stabilized(f, laser.free, laser.cavity, laser.loop)
                    + 2.0 * psd_fiber(f, 80.0, FIBER, False))
        assert got == pytest.approx(expected, rel=1e-12)

    def test_common_laser_term_bounded(self):
        topo = TopologyConfig(l_a=114.0, l_b=100.0)
        f = np.geomspace(1.0, 1e8, 300)
        laser = LaserSpec()
        composite = psd_interference(f, topo, laser)
        fiber_part = 4.0 * (psd_fiber(f, 114.0, FIBER, False)
                            + psd_fiber(f, 100.0, FIBER, False))
        assert np.all(composite - fiber_part <= 4.0 * psd_laser_free(f, laser.free) + 1e-30)

    def test_floor_added_once_when_stabilized(self):
        topo = TopologyConfig(fiber_stabilized=True, l_a=114.0, l_b=114.0)
        f = 1e6
        got = psd_interference(f, topo)
        lin = FIBER.stabilization_suppression * 44.0 * 114.0 / f**2
        floor = 1e-8 * (2e5 / (f + 2e5)) ** 2
        assert got == pytest.approx(4.0 * 2.0 * lin + floor, rel=1e-12)

    def test_roundtrip_factor_configurable(self):
        t4 = TopologyConfig(l_a=100.0, l_b=100.0)
        t2 = TopologyConfig(l_a=100.0, l_b=100.0, fiber_roundtrip_factor=2.0)
        f = 123.0
        assert psd_interference(f, t2) == pytest.approx(
            psd_interference(f, t4) / 2.0, rel=1e-12)

    def test_all_models_positive_and_finite(self):
        f = np.geomspace(1e-6, 1e9, 400)
        fns = [
            psd_laser_free(f, LASER),
            psd_cavity(f, CAVITY),
            psd_laser_stabilized(f, LASER, CAVITY, LOOP),
            psd_fiber(f, 114.0, FIBER, False),
            psd_fiber(f, 114.0, FIBER, True),
        ]
        for p in tfqkd.builtin_scenarios():
            fns.append(psd_interference(f, p.topology))
        for vals in fns:
            assert np.all(vals >= 0.0)
            assert np.all(np.isfinite(vals))

    def test_common_converges_to_fiber_as_mismatch_vanishes(self):
        f = np.geomspace(1.0, 1e7, 50)
        fiber_only = 8.0 * psd_fiber(f, 114.0, FIBER, False)
        topo = TopologyConfig(l_a=114.0, l_b=114.0 - 1e-9)
        near = psd_interference(f, topo)
        # l_b barely differs, compare against equal-arm fiber term
        assert near == pytest.approx(fiber_only, rel=1e-4)

    def test_rejects_inverted_arms(self):
        with pytest.raises(DomainError):
            TopologyConfig(l_a=10.0, l_b=20.0)
