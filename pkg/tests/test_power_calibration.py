import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infrcs.calibration import Link, forward_radar_power, free_space_power, rcs_from_power, system_factor
from infrcs.model import CirRecord, Frequency, Geometry, Kind, RcsError
from infrcs.power import cir_power, mean_reference_power, target_power
from infrcs.units import SPEED_OF_LIGHT


def rec(taps, kind=Kind.REFERENCE, snap=0, freq=28):
    return CirRecord(Frequency(freq), kind, taps, target="t" if kind is Kind.TARGET else None, snapshot=snap)


class TestCirPower:
    @pytest.mark.parametrize(
        "taps, expected",
        [([0, 0, 0], 0.0), ([1 + 0j, 1j], 2.0), ([3 + 4j], 25.0)],
    )
    def test_examples(self, taps, expected):
        assert cir_power(rec(taps)) == expected

    @given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False), min_size=1, max_size=40), st.randoms())
    def test_permutation_invariant(self, taps, rnd):
        shuffled = list(taps)
        rnd.shuffle(shuffled)
        assert cir_power(rec(taps)) == pytest.approx(cir_power(rec(shuffled)), rel=1e-12, abs=1e-300)


class TestReferencePower:
    def test_singleton(self):
        assert mean_reference_power([rec([math.sqrt(2)])]) == pytest.approx(2.0)

    def test_mean(self):
        assert mean_reference_power([rec([1.0], snap=0), rec([math.sqrt(3)], snap=1)]) == pytest.approx(2.0)

    def test_constant(self):
        refs = [rec([math.sqrt(5)], snap=i) for i in range(3)]
        assert mean_reference_power(refs) == pytest.approx(5.0)

    def test_empty(self):
        with pytest.raises(RcsError):
            mean_reference_power([])

    def test_mixed_frequencies(self):
        with pytest.raises(RcsError):
            mean_reference_power([rec([1.0], freq=27), rec([1.0], freq=28)])

    def test_wrong_kind(self):
        with pytest.raises(RcsError):
            mean_reference_power([rec([1.0], kind=Kind.TARGET)])


class TestTargetPower:
    def test_subtraction(self):
        assert target_power(10.0, 4.0) == 6.0

    def test_negative_rejected(self):
        assert target_power(4.0, 10.0) is None

    def test_below_floor_rejected(self):
        assert target_power(4.0 + 1e-15, 4.0) is None
        # relative floor: 1e-6 * p_ref
        assert target_power(4.0 + 3.9e-6, 4.0) is None
        assert target_power(4.0 + 4.1e-6, 4.0) == pytest.approx(4.1e-6, rel=1e-6)

    @given(st.floats(min_value=0, max_value=1e12))
    def test_equal_powers_always_rejected(self, p):
        assert target_power(p, p) is None

    @given(st.floats(min_value=1e-6, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3))
    def test_injected_power_recovered(self, p_ref, ratio):
        delta = p_ref * ratio
        assert target_power(p_ref + delta, p_ref) == pytest.approx(delta, rel=1e-9)

    def test_negative_inputs(self):
        with pytest.raises(RcsError):
            target_power(-1.0, 1.0)


LINK = Link(p_t=0.01, g_t=100.0, g_r=100.0, loss=0.25)


class TestCalibration:
    def test_system_factor_examples(self):
        assert system_factor(1.0, 3.0).k_cal == pytest.approx(1 / (36 * math.pi))
        assert system_factor(1.0, 3.0).k_cal == pytest.approx(8.8419e-3, rel=1e-4)
        assert system_factor(4 * math.pi, 1.0).k_cal == pytest.approx(1.0)

    def test_system_factor_from_free_space(self):
        f = Frequency(27)
        lam = SPEED_OF_LIGHT / 27e9
        p_r = free_space_power(f, 3.0, LINK)
        expected_p_r = 0.01 * 100 * 100 * lam**2 * 0.25 / ((4 * math.pi) ** 2 * 9)
        assert p_r == pytest.approx(expected_p_r, rel=1e-14)
        assert system_factor(p_r, 3.0).k_cal == pytest.approx(expected_p_r / (4 * math.pi * 9), rel=1e-14)

    @pytest.mark.parametrize("p_r, d", [(0.0, 3.0), (-1.0, 3.0), (1.0, 0.0), (1.0, -2.0)])
    def test_system_factor_domain(self, p_r, d):
        with pytest.raises(RcsError):
            system_factor(p_r, d)

    def test_rcs_from_power(self):
        k = system_factor(1.0, 3.0)
        assert rcs_from_power(k.k_cal, k) == pytest.approx(1.0)
        assert rcs_from_power(2 * k.k_cal, k) == pytest.approx(2.0)
        with pytest.raises(RcsError):
            rcs_from_power(0.0, k)

    def test_forward_unit_plug_in(self):
        # lambda = 1 m
        f = Frequency(SPEED_OF_LIGHT / 1e9)
        geom = Geometry(1.0, 1.0, 0.1)
        assert forward_radar_power(1.0, f, geom, Link()) == pytest.approx(1 / (4 * math.pi) ** 3)
        assert 1 / (4 * math.pi) ** 3 == pytest.approx(5.0393e-4, rel=1e-4)

    def test_forward_d4_law(self):
        f = Frequency(28)
        p1 = forward_radar_power(0.1, f, Geometry(3.0, 3.0, 0.55), LINK)
        p2 = forward_radar_power(0.1, f, Geometry(6.0, 6.0, 0.55), LINK)
        assert p1 / p2 == pytest.approx(16.0, rel=1e-14)

    def test_forward_rejects_unequal_distances(self):
        with pytest.raises(RcsError):
            forward_radar_power(0.1, Frequency(28), Geometry(3.0, 3.5, 0.55), LINK)

    def test_forward_is_k_times_sigma(self):
        f, geom = Frequency(25), Geometry()
        k = system_factor(free_space_power(f, 3.0, LINK), 3.0)
        assert forward_radar_power(0.37, f, geom, LINK) / 0.37 == pytest.approx(k.k_cal, rel=1e-13)

    def test_synthetic_end_to_end_005(self):
        f, geom = Frequency(28), Geometry()
        k = system_factor(free_space_power(f, 3.0, LINK), 3.0)
        assert rcs_from_power(forward_radar_power(0.05, f, geom, LINK), k) == pytest.approx(0.05, abs=1e-6)

    @settings(max_examples=200)
    @given(
        st.floats(min_value=1e-4, max_value=1e2),
        st.sampled_from([25, 26, 27, 28]),
        st.floats(min_value=1e-3, max_value=10.0),
        st.floats(min_value=1.0, max_value=1e4),
        st.floats(min_value=1e-3, max_value=1.0),
        st.floats(min_value=0.5, max_value=20.0),
    )
    def test_calibration_identity(self, sigma, ghz, p_t, gain, loss, d):
        f, geom, link = Frequency(ghz), Geometry(d, d, 0.55), Link(p_t, gain, gain, loss)
        k = system_factor(free_space_power(f, d, link), d)
        assert rcs_from_power(forward_radar_power(sigma, f, geom, link), k) == pytest.approx(sigma, rel=1e-9)

    @given(st.floats(min_value=1e-3, max_value=10), st.floats(min_value=1e-3, max_value=10))
    def test_forward_linear(self, a, b):
        f, geom = Frequency(26), Geometry()
        base = forward_radar_power(1.0, f, geom, LINK)
        assert forward_radar_power(a, f, geom, LINK) == pytest.approx(a * base, rel=1e-12)
        scaled = Link(LINK.p_t * a, LINK.g_t, LINK.g_r, LINK.loss * b)
        assert forward_radar_power(1.0, f, geom, scaled) == pytest.approx(a * b * base, rel=1e-12)
