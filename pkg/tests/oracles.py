"""Independent brute-force oracles: literal O(N^2)-style evaluation of the
measurement definitions and dense linear algebra.  Nothing here shares code
with the library paths it checks."""

import numpy as np


def stft_direct(x, g, L, n_frames):
    """X[m, k] = sum_n x[n] g[mL - n] e^{-2 pi j k n / N}, term by term."""
    N = len(x)
    X = np.zeros((n_frames, N), dtype=complex)
    for m in range(n_frames):
        for k in range(N):
            acc = 0.0 + 0.0j
            for n in range(N):
                acc += x[n] * g[(m * L - n) % N] * np.exp(-2j * np.pi * k * n / N)
            X[m, k] = acc
    return X


def correlation_direct(x, g, L, n_frames):
    """Y[m, l] = sum_n x[n] conj(x[n+l]) g[mL - n] g[mL - n - l]."""
    N = len(x)
    Y = np.zeros((n_frames, N), dtype=complex)
    for m in range(n_frames):
        for ell in range(N):
            acc = 0.0 + 0.0j
            for n in range(N):
                acc += (
                    x[n]
                    * np.conj(x[(n + ell) % N])
                    * g[(m * L - n) % N]
                    * g[(m * L - n - ell) % N]
                )
            Y[m, ell] = acc
    return Y


def dft_oracle(row):
    """Unnormalized DFT by direct summation."""
    N = len(row)
    return np.array(
        [sum(row[k] * np.exp(-2j * np.pi * k * ell / N) for k in range(N)) for ell in range(N)]
    )


def dense_h_matrix(g, m, ell, L):
    """H_{m,l} = P_{-l} D_{mL} D_{mL-l} built from explicit matrices."""
    N = len(g)
    P = np.zeros((N, N))
    for n in range(N):
        P[n, (n - ell) % N] = 1.0  # (P_{-l} v)[n] = v[n - l]
    D1 = np.diag([g[(m * L - n) % N] for n in range(N)])
    D2 = np.diag([g[(m * L - ell - n) % N] for n in range(N)])
    return P @ D1 @ D2


def dense_g_matrix(g, ell, L, n_frames):
    """G_l with entries g[mL - n] g[mL - n - l]."""
    N = len(g)
    G = np.zeros((n_frames, N))
    for m in range(n_frames):
        for n in range(N):
            G[m, n] = g[(m * L - n) % N] * g[(m * L - n - ell) % N]
    return G


def dense_circulant(first_column):
    c = np.asarray(first_column)
    N = len(c)
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return c[idx]


def phase_grid_distance(z, x, grid=1_000_000):
    """min over a phi grid of ||z - x e^{j phi}||."""
    phis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    best = np.inf
    # chunked to keep memory sane
    for chunk in np.array_split(phis, 100):
        diffs = z[None, :] - x[None, :] * np.exp(1j * chunk)[:, None]
        best = min(best, np.sqrt((np.abs(diffs) ** 2).sum(axis=1)).min())
    return best


def loss_direct(z, Y, g, L, n_frames, W):
    """Loss by dense quadratic forms."""
    N = len(z)
    total = 0.0
    for m in range(n_frames):
        for ell in range(-(W - 1), W):
            H = dense_h_matrix(g, m, ell, L)
            q = np.conj(z) @ H @ z
            total += abs(q - Y[m, ell % N]) ** 2
    return 0.5 * total


def is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))
