import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stft_pr.circulant import CirculantOperator, apply, pinv_solve

from oracles import dense_circulant


def _op(rng, n, complex_col=False):
    c = rng.standard_normal(n)
    if complex_col:
        c = c + 1j * rng.standard_normal(n)
    return CirculantOperator.from_first_column(c)


class TestApply:
    def test_identity_first_column(self):
        e0 = np.zeros(5)
        e0[0] = 1.0
        op = CirculantOperator.from_first_column(e0)
        v = np.arange(5.0)
        assert np.allclose(apply(op, v), v)

    def test_shift_first_column(self):
        e1 = np.zeros(5)
        e1[1] = 1.0
        op = CirculantOperator.from_first_column(e1)
        v = np.arange(5.0)
        assert np.allclose(apply(op, v), np.roll(v, 1), atol=1e-12)

    def test_apply_to_e0_returns_first_column(self):
        rng = np.random.default_rng(0)
        op = _op(rng, 8, complex_col=True)
        e0 = np.zeros(8)
        e0[0] = 1.0
        assert np.allclose(apply(op, e0), op.first_column, atol=1e-12)

    def test_spectrum_cache_consistent(self):
        rng = np.random.default_rng(1)
        op = _op(rng, 16)
        assert np.allclose(op.spectrum, np.fft.fft(op.first_column), atol=1e-12)

    def test_length_mismatch(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            apply(_op(rng, 4), np.ones(5))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 16), st.booleans())
    def test_matches_dense_product(self, seed, n, complex_col):
        rng = np.random.default_rng(seed)
        op = _op(rng, n, complex_col)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        dense = dense_circulant(op.first_column)
        assert np.abs(apply(op, v) - dense @ v).max() < 1e-10


class TestPinvSolve:
    def test_inverse_identity_on_invertible(self):
        rng = np.random.default_rng(3)
        op = _op(rng, 16)
        v = rng.standard_normal(16)
        assert np.abs(pinv_solve(op, apply(op, v)) - v).max() < 1e-10

    def test_rank_one_all_ones(self):
        # dense pseudo-inverse oracle: pinv of the all-ones circulant at N=4
        op = CirculantOperator.from_first_column(np.ones(4))
        y = np.array([1.0, 2.0, 3.0, 4.0])
        expected = np.linalg.pinv(dense_circulant(np.ones(4))) @ y
        got = pinv_solve(op, y)
        assert np.abs(got - expected).max() < 1e-12
        assert np.allclose(got, np.full(4, y.mean() / 4.0))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 16))
    def test_matches_dense_least_squares(self, seed, n):
        rng = np.random.default_rng(seed)
        op = _op(rng, n)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        expected = np.linalg.pinv(dense_circulant(op.first_column)) @ y
        assert np.abs(pinv_solve(op, y) - expected).max() < 1e-9

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(3, 12))
    def test_moore_penrose_identities_on_singular(self, seed, n):
        rng = np.random.default_rng(seed)
        # make a singular circulant by zeroing one spectral mode
        spec = np.fft.fft(rng.standard_normal(n))
        spec[rng.integers(0, n)] = 0.0
        c = np.fft.ifft(spec)
        op = CirculantOperator.from_first_column(c)
        dense = dense_circulant(c)
        pinv = np.linalg.pinv(dense)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert np.abs(pinv_solve(op, y) - pinv @ y).max() < 1e-9
        # projector property: A A^+ A = A, applied to a vector
        v = rng.standard_normal(n)
        assert np.abs(apply(op, pinv_solve(op, apply(op, v))) - apply(op, v)).max() < 1e-9

    def test_negative_tol_rejected(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ValueError):
            pinv_solve(_op(rng, 4), np.ones(4), tol=-1.0)


@pytest.mark.slow
def test_fft_beats_dense_by_20x():
    n = 4096
    rng = np.random.default_rng(0)
    op = _op(rng, n)
    y = rng.standard_normal(n)
    dense = dense_circulant(op.first_column)

    t0 = time.perf_counter()
    x_dense = np.linalg.solve(dense, y)
    t_dense = time.perf_counter() - t0

    t0 = time.perf_counter()
    reps = 5
    for _ in range(reps):
        x_fft = pinv_solve(op, y)
    t_fft = (time.perf_counter() - t0) / reps

    assert np.abs(x_fft - x_dense).max() < 1e-8
    assert t_dense > 20 * t_fft, f"dense {t_dense:.4f}s vs fft {t_fft:.6f}s"
