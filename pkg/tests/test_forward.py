import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stft_pr.forward import (
    adjoint_diagonal_system,
    apply_diagonal_system,
    correlation_transform,
    diagonal_system,
    is_admissible,
    measure,
    measurement_form,
    solve_diagonal_system,
    stft,
)
from stft_pr.model import ProblemConfig, custom_window, rectangular_window

from oracles import (
    correlation_direct,
    dense_g_matrix,
    dense_h_matrix,
    dft_oracle,
    is_prime,
    stft_direct,
)


def _cfg(N, W, L=1, kind="rect"):
    return ProblemConfig(N=N, window=rectangular_window(N, W), L=L)


def _cplx(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


class TestStft:
    def test_delta_signal(self):
        N = 9
        cfg = _cfg(N, 4, L=3)
        e0 = np.zeros(N, dtype=complex)
        e0[0] = 1.0
        X = stft(e0, cfg)
        g = cfg.window.values
        for m in range(cfg.n_frames):
            assert np.allclose(X[m], g[(m * 3) % N], atol=1e-12)

    def test_full_window_single_frame_is_dft(self):
        N = 8
        cfg = _cfg(N, N, L=N)
        rng = np.random.default_rng(0)
        x = _cplx(rng, N)
        X = stft(x, cfg)
        assert X.shape == (1, N)
        assert np.abs(X[0] - np.fft.fft(x)).max() < 1e-10

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_matches_direct_sum(self, seed):
        rng = np.random.default_rng(seed)
        N, W, L = 12, 5, 3
        cfg = _cfg(N, W, L)
        x = _cplx(rng, N)
        assert (
            np.abs(stft(x, cfg) - stft_direct(x, cfg.window.values, L, cfg.n_frames)).max()
            < 1e-10
        )

    def test_non_dividing_hop_direct_sum(self):
        rng = np.random.default_rng(5)
        N, W, L = 13, 5, 3
        cfg = _cfg(N, W, L)
        assert cfg.n_frames == 5
        x = _cplx(rng, N)
        assert (
            np.abs(stft(x, cfg) - stft_direct(x, cfg.window.values, L, cfg.n_frames)).max()
            < 1e-10
        )


class TestMeasure:
    def test_zero_signal(self):
        cfg = _cfg(6, 3)
        meas = measure(np.zeros(6, dtype=complex), cfg)
        assert np.all(meas.Z == 0)
        assert np.all(meas.Y == 0)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(1)
        cfg = _cfg(10, 4, L=2)
        x = _cplx(rng, 10)
        a = measure(x, cfg)
        b = measure(x * np.exp(1j * 0.77), cfg)
        assert np.abs(a.Z - b.Z).max() < 1e-10

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_intensities_match_direct(self, seed):
        rng = np.random.default_rng(seed)
        N, W, L = 12, 4, 2
        cfg = _cfg(N, W, L)
        x = _cplx(rng, N)
        meas = measure(x, cfg)
        Xd = stft_direct(x, cfg.window.values, L, cfg.n_frames)
        assert np.abs(meas.Z - np.abs(Xd) ** 2).max() < 1e-10


class TestCorrelationTransform:
    def test_delta_autocorrelation(self):
        N = 8
        cfg = _cfg(N, 3)
        e0 = np.zeros(N, dtype=complex)
        e0[0] = 1.0
        meas = measure(e0, cfg)
        g = cfg.window.values
        for m in range(N):
            expected = np.zeros(N, dtype=complex)
            expected[0] = g[m] ** 2
            assert np.abs(meas.Y[m] - expected).max() < 1e-12

    def test_bandlimited_rows(self):
        rng = np.random.default_rng(2)
        N, W = 12, 4
        cfg = _cfg(N, W)
        meas = measure(_cplx(rng, N), cfg)
        assert np.abs(meas.Y[:, W : N - W + 1]).max() < 1e-12

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_matches_autocorrelation_form(self, seed):
        rng = np.random.default_rng(seed)
        N, W, L = 12, 4, 2
        cfg = _cfg(N, W, L)
        x = _cplx(rng, N)
        meas = measure(x, cfg)
        Yd = correlation_direct(x, cfg.window.values, L, cfg.n_frames)
        assert np.abs(meas.Y - Yd).max() < 1e-10

    def test_dft_convention_against_oracle(self):
        rng = np.random.default_rng(3)
        Z = rng.random((2, 7))
        Y = correlation_transform(Z)
        for m in range(2):
            assert np.abs(Y[m] - dft_oracle(Z[m]) / 7).max() < 1e-10

    def test_parseval_per_frame(self):
        rng = np.random.default_rng(4)
        N, W = 11, 5
        cfg = _cfg(N, W)
        meas = measure(_cplx(rng, N), cfg)
        for m in range(N):
            lhs = (np.abs(meas.Y[m]) ** 2).sum()
            rhs = (meas.Z[m] ** 2).sum() / N
            assert abs(lhs - rhs) < 1e-10 * max(rhs, 1.0)


class TestMeasurementForm:
    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_matches_dense_matrix(self, seed):
        rng = np.random.default_rng(seed)
        N, W, L = 10, 4, 2
        cfg = _cfg(N, W, L)
        z = _cplx(rng, N)
        for m in range(cfg.n_frames):
            for ell in range(-(W - 1), W):
                H = dense_h_matrix(cfg.window.values, m, ell, L)
                direct = np.conj(z) @ H @ z
                assert abs(measurement_form(z, m, ell, cfg) - direct) < 1e-12

    def test_equals_measurements_on_truth(self):
        rng = np.random.default_rng(6)
        N, W, L = 12, 5, 3
        cfg = _cfg(N, W, L)
        x = _cplx(rng, N)
        meas = measure(x, cfg)
        for m in range(cfg.n_frames):
            for ell in range(-(W - 1), W):
                assert abs(measurement_form(x, m, ell, cfg) - meas.Y[m, ell % N]) < 1e-10

    def test_offset_out_of_range(self):
        cfg = _cfg(8, 3)
        with pytest.raises(ValueError):
            measurement_form(np.ones(8), 0, 3, cfg)


class TestDiagonalSystem:
    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(1, 3))
    def test_matches_dense_and_data(self, seed, L):
        rng = np.random.default_rng(seed)
        N, W = 12, 4
        cfg = _cfg(N, W, L)
        x = _cplx(rng, N)
        meas = measure(x, cfg)
        for ell in range(-(W - 1), W):
            sys = diagonal_system(ell, cfg)
            G = dense_g_matrix(cfg.window.values, ell, L, cfg.n_frames)
            assert np.abs(sys.dense() - G).max() < 1e-12
            x_ell = x * np.conj(np.roll(x, -ell))
            assert np.abs(apply_diagonal_system(sys, x_ell) - meas.Y[:, ell % N]).max() < 1e-10
            w = _cplx(rng, cfg.n_frames)
            assert np.abs(adjoint_diagonal_system(sys, w) - G.T @ w).max() < 1e-10

    def test_rectangular_kernel_is_shifted_rectangle(self):
        N, W = 16, 6
        cfg = _cfg(N, W)
        for ell in range(-(W - 1), W):
            c = diagonal_system(ell, cfg).first_column
            assert int((c != 0).sum()) == W - abs(ell)
            assert set(np.unique(c)) <= {0.0, 1.0}

    def test_offset_zero_kernel(self):
        N, W = 10, 4
        cfg = _cfg(N, W)
        sys = diagonal_system(0, cfg)
        assert np.allclose(sys.first_column, cfg.window.values**2)
        assert sys.spectrum[0].real == pytest.approx(float((cfg.window.values**2).sum()))

    def test_operator_vanishes_outside_band(self):
        # the quadratic-form operator is identically zero for W <= l <= N - W,
        # since the kernel g[n] g[n-l] has empty support there
        from stft_pr.forward import shifted_window_product

        N, W = 12, 4
        g = rectangular_window(N, W).values
        for ell in range(W, N - W + 1):
            assert np.all(shifted_window_product(g, ell) == 0)

    def test_solve_requires_unit_hop(self):
        cfg = _cfg(12, 4, L=2)
        sys = diagonal_system(0, cfg)
        with pytest.raises(ValueError):
            solve_diagonal_system(sys, np.ones(sys.rows))


class TestAdmissibility:
    def test_prime_length_rectangle(self):
        ok, margin = is_admissible(rectangular_window(5, 2))
        assert ok
        assert margin > 0

    def test_even_length_rectangle_fails(self):
        # the offset-0 spectrum of a length-2 rectangle at N=4 has an exact null
        ok, margin = is_admissible(rectangular_window(4, 2))
        assert not ok
        assert margin < 1e-12

    def test_outermost_offset_is_single_tap(self):
        win = custom_window([0.5, 1.2, 0.8, 0.0, 0.0, 0.0], W=3)
        cfg = ProblemConfig(N=6, window=win, L=1)
        sys = diagonal_system(2, cfg)
        assert int((sys.first_column != 0).sum()) == 1
        mags = np.abs(sys.spectrum)
        assert mags.max() - mags.min() < 1e-12
        assert mags.min() > 0

    def test_coprime_claim_over_small_lengths(self):
        # rectangular windows are admissible whenever 2..W are all coprime to N
        for N in range(4, 51):
            for W in range(2, N // 2 + 1):
                if all(math.gcd(a, N) == 1 for a in range(2, W + 1)):
                    ok, _ = is_admissible(rectangular_window(N, W))
                    assert ok, (N, W)

    def test_prime_lengths_always_admissible(self):
        for N in (5, 7, 11, 13, 17):
            assert is_prime(N)
            for W in range(2, N // 2 + 1):
                ok, _ = is_admissible(rectangular_window(N, W))
                assert ok, (N, W)
