import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stft_pr.model import (
    MeasurementSet,
    ProblemConfig,
    add_noise,
    custom_window,
    distance,
    fix_global_phase,
    gaussian_window,
    measurements_from_json,
    measurements_to_json,
    random_signal,
    rectangular_window,
    relative_error,
    signal_from_json,
    signal_to_json,
)

from oracles import phase_grid_distance


def _complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


class TestDistance:
    def test_global_phase_gives_zero(self):
        rng = np.random.default_rng(0)
        x = _complex(rng, 6)
        d, phi = distance(x * np.exp(1j * np.pi / 3), x)
        assert d < 1e-12
        assert abs(phi - np.pi / 3) < 1e-9

    def test_negation_gives_zero(self):
        rng = np.random.default_rng(1)
        x = _complex(rng, 5)
        d, phi = distance(-x, x)
        assert d < 1e-12
        assert abs(phi - np.pi) < 1e-9

    def test_orthogonal_pair(self):
        # grid-search oracle agrees: d = sqrt(2) for e_0 vs e_1
        x = np.array([1.0, 0.0])
        z = np.array([0.0, 1.0])
        d, _ = distance(z, x)
        assert abs(d - math.sqrt(2)) < 1e-12
        assert abs(d - phase_grid_distance(z + 0j, x + 0j, grid=10**6)) < 1e-6

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            distance(np.ones(3), np.ones(4))

    def test_zero_inner_product_phi_zero(self):
        d, phi = distance(np.array([0.0, 1.0 + 0j]), np.array([1.0 + 0j, 0.0]))
        assert phi == 0.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 16))
    def test_matches_phase_grid_oracle(self, seed, n):
        rng = np.random.default_rng(seed)
        z, x = _complex(rng, n), _complex(rng, n)
        d, _ = distance(z, x)
        assert abs(d - phase_grid_distance(z, x, grid=200_000)) < 1e-6

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 16))
    def test_closed_form_and_symmetry(self, seed, n):
        rng = np.random.default_rng(seed)
        z, x = _complex(rng, n), _complex(rng, n)
        d, _ = distance(z, x)
        closed = np.linalg.norm(z) ** 2 + np.linalg.norm(x) ** 2 - 2 * abs(np.vdot(x, z))
        assert abs(d**2 - closed) < 1e-8
        assert abs(d - distance(x, z)[0]) < 1e-10

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 12))
    def test_minimizer_attains(self, seed, n):
        rng = np.random.default_rng(seed)
        z, x = _complex(rng, n), _complex(rng, n)
        d, phi = distance(z, x)
        assert abs(np.linalg.norm(z - x * np.exp(1j * phi)) - d) < 1e-10


class TestRelativeError:
    def test_exact(self):
        x = np.arange(1.0, 6.0)
        assert relative_error(x, x) == 0.0

    def test_colinear_scaling(self):
        x = np.arange(1.0, 6.0)
        assert abs(relative_error(2 * x, x) - 1.0) < 1e-12

    def test_zero_truth_rejected(self):
        with pytest.raises(ValueError):
            relative_error(np.ones(4), np.zeros(4))

    def test_matches_grid_oracle(self):
        rng = np.random.default_rng(3)
        z, x = _complex(rng, 8), _complex(rng, 8)
        val = relative_error(z, x)
        oracle = phase_grid_distance(z, x, grid=10**6) / np.linalg.norm(x)
        assert abs(val - oracle) < 1e-8


class TestWindows:
    def test_rectangular(self):
        w = rectangular_window(8, 3)
        assert list(w.values) == [1, 1, 1, 0, 0, 0, 0, 0]
        assert w.W == 3

    def test_gaussian_support(self):
        w = gaussian_window(50, sigma=2.5)
        assert w.W == math.ceil(7.5)
        assert w.values[0] == 1.0
        assert np.all(w.values[w.W :] == 0)
        n = np.arange(w.W)
        assert np.allclose(w.values[: w.W], np.exp(-(n**2) / (2 * 2.5**2)))

    def test_custom_infers_support(self):
        w = custom_window([1.0, 0.5, 0.25, 0.0, 0.0])
        assert w.W == 3

    def test_bad_width_rejected(self):
        with pytest.raises(ValueError):
            rectangular_window(8, 1)
        with pytest.raises(ValueError):
            rectangular_window(8, 9)


class TestProblemConfig:
    def test_frames_divide(self):
        cfg = ProblemConfig(N=12, window=rectangular_window(12, 4), L=3)
        assert cfg.n_frames == 4
        assert list(cfg.frame_positions) == [0, 3, 6, 9]

    def test_frames_non_dividing_hop(self):
        cfg = ProblemConfig(N=43, window=rectangular_window(43, 7), L=4)
        assert cfg.n_frames == 11
        assert cfg.frame_positions[-1] == 40

    def test_hop_bounds(self):
        with pytest.raises(ValueError):
            ProblemConfig(N=8, window=rectangular_window(8, 3), L=0)
        with pytest.raises(ValueError):
            ProblemConfig(N=8, window=rectangular_window(8, 3), L=9)


class TestNoise:
    def _meas(self, seed=0, shape=(27, 53)):
        rng = np.random.default_rng(seed)
        return MeasurementSet.from_intensity(rng.random(shape) * 3.0)

    def test_infinite_snr_is_noop(self):
        meas = self._meas()
        out = add_noise(meas, math.inf, seed=1)
        assert out is meas

    def test_empirical_snr(self):
        meas = self._meas()
        for snr in (0.0, 10.0, 30.0):
            noisy = add_noise(meas, snr, seed=7)
            noise = noisy.Z - meas.Z
            emp = 10 * np.log10(np.linalg.norm(meas.Z) ** 2 / np.linalg.norm(noise) ** 2)
            assert abs(emp - snr) < 0.5

    def test_empirical_snr_concentrates_at_scale(self):
        # >= 1e4 entries: concentration well inside half a decibel
        meas = self._meas(seed=1, shape=(100, 101))
        noisy = add_noise(meas, 15.0, seed=2)
        noise = noisy.Z - meas.Z
        emp = 10 * np.log10(np.linalg.norm(meas.Z) ** 2 / np.linalg.norm(noise) ** 2)
        assert abs(emp - 15.0) < 0.5

    def test_deterministic(self):
        meas = self._meas()
        a = add_noise(meas, 10.0, seed=3)
        b = add_noise(meas, 10.0, seed=3)
        assert np.array_equal(a.Z, b.Z)
        assert not np.array_equal(a.Z, add_noise(meas, 10.0, seed=4).Z)

    def test_y_recomputed(self):
        meas = self._meas()
        noisy = add_noise(meas, 5.0, seed=2)
        assert np.allclose(noisy.Y, np.fft.fft(noisy.Z, axis=1) / noisy.N)

    def test_clip_flag(self):
        meas = self._meas()
        clipped = add_noise(meas, -10.0, seed=5, clip=True)
        assert clipped.Z.min() >= 0.0


class TestMeasurementSet:
    def test_dc_column_real_nonnegative(self):
        rng = np.random.default_rng(11)
        meas = MeasurementSet.from_intensity(rng.random((4, 9)))
        assert np.all(meas.Y[:, 0].imag == 0)
        assert np.all(meas.Y[:, 0].real >= 0)


class TestGaugeAndSignals:
    def test_fix_global_phase(self):
        rng = np.random.default_rng(5)
        x = _complex(rng, 7)
        y = fix_global_phase(x)
        idx = np.argmax(np.abs(y))
        assert y[idx].imag == pytest.approx(0.0, abs=1e-12)
        assert y[idx].real > 0
        assert distance(y, x)[0] < 1e-12

    def test_random_signal_kinds(self):
        assert np.isrealobj(random_signal(9, "real", 0))
        um = random_signal(9, "unit-modulus", 0)
        assert np.allclose(np.abs(um), 1 / 3.0)
        sign = random_signal(9, "sign", 0)
        assert set(np.round(sign * 3.0)) <= {-1.0, 1.0}
        nv = random_signal(9, "nonvanishing", 0)
        assert np.abs(nv).min() > 0.5
        with pytest.raises(ValueError):
            random_signal(9, "bogus", 0)

    def test_random_signal_deterministic(self):
        assert np.array_equal(random_signal(16, "complex", 42), random_signal(16, "complex", 42))


class TestJson:
    def test_signal_roundtrip_complex(self):
        rng = np.random.default_rng(8)
        x = _complex(rng, 6)
        doc = signal_to_json(x)
        json.dumps(doc)
        assert np.array_equal(signal_from_json(doc), x)

    def test_signal_roundtrip_real(self):
        x = np.arange(4.0)
        back = signal_from_json(signal_to_json(x))
        assert np.isrealobj(back)
        assert np.array_equal(back, x)

    def test_measurements_roundtrip(self):
        rng = np.random.default_rng(9)
        meas = MeasurementSet.from_intensity(rng.random((3, 7)))
        doc = measurements_to_json(meas)
        json.dumps(doc)
        back = measurements_from_json(doc)
        assert np.allclose(back.Z, meas.Z)
        assert np.allclose(back.Y, meas.Y)
