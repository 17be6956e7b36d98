"""Centered Fourier-coefficient helpers shared across modules.

Conventions: a band-limited 2pi-periodic function is stored as a complex
array of length 2N+1 holding the coefficients of e^{ikx}, k = -N..N, in
ascending k order. Grids are uniform, x_j = 2pi j / n.
"""

import numpy as np
from scipy.fft import next_fast_len
from scipy.linalg import toeplitz


def nodes(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def to_grid(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Evaluate sum_k c_k e^{ikx} on the n-point uniform grid."""
    N = (len(coeffs) - 1) // 2
    if n < 2 * N + 1:
        raise ValueError("grid too small for the coefficient band")
    spec = np.zeros(n, complex)
    k = np.arange(-N, N + 1)
    spec[k % n] = coeffs
    return np.fft.ifft(spec) * n


def from_grid(values: np.ndarray, N: int) -> np.ndarray:
    """Centered coefficients k = -N..N of grid samples (band must fit)."""
    n = len(values)
    spec = np.fft.fft(values) / n
    k = np.arange(-N, N + 1)
    return spec[k % n]


def grid_size(band: int) -> int:
    # 2x padding over the retained band keeps quadratic products alias-free
    return next_fast_len(max(4 * band + 1, 16))


def mult_matrix(coeffs: np.ndarray, N: int) -> np.ndarray:
    """Matrix of pointwise multiplication by f on the basis e^{i(k+mu)x}.

    T[p, q] = fhat(p - q), p, q = -N..N; independent of the Bloch shift mu.
    The input band must reach 2N (pad otherwise).
    """
    Nf = (len(coeffs) - 1) // 2
    if Nf < 2 * N:
        pad = np.zeros(2 * (2 * N) + 1, complex)
        pad[2 * N - Nf:2 * N + Nf + 1] = coeffs
        coeffs = pad
        Nf = 2 * N
    mid = Nf
    col = coeffs[mid:mid + 2 * N + 1]          # fhat(0), fhat(1), ...
    row = coeffs[mid::-1][:2 * N + 1]          # fhat(0), fhat(-1), ...
    return toeplitz(col, row)


def coeff_pow(coeffs: np.ndarray, n: int, band: int) -> np.ndarray:
    """Coefficients of f^n, exact convolution, cropped to |k| <= band."""
    Nf = (len(coeffs) - 1) // 2
    out = np.zeros(1, complex)
    out[0] = 1.0
    for _ in range(n):
        out = np.convolve(out, coeffs)
    No = (len(out) - 1) // 2
    if No <= band:
        pad = np.zeros(2 * band + 1, complex)
        pad[band - No:band + No + 1] = out
        return pad
    return out[No - band:No + band + 1]


def derivative(coeffs: np.ndarray) -> np.ndarray:
    N = (len(coeffs) - 1) // 2
    return coeffs * (1j * np.arange(-N, N + 1))


def real_grid_product(*factors: np.ndarray) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out
