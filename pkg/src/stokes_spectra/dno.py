"""Dirichlet-to-Neumann operator of the free surface, in graph-expansion
form, on periodic functions and as Bloch-shifted dense matrices.

The expansion writes G(eta) = sum_m G_m(eta) with G_m homogeneous of
degree m in eta. Writing u for the flat-level trace and A_n for the
multiplier that realizes the n-th vertical derivative at the flat level,

    A_{2m} = D^{2m},   A_{2m+1} = D^{2m} G0,   D = -i d/dx,

the trace condition psi = sum_n (eta^n/n!) A_n u inverts order by order
and the normal derivative sums the same data. Everything here follows
from the harmonicity of the bulk potential and the flat-bottom condition;
the recursion is classical and re-derived in tests/oracle_dno.py by an
independent boundary-perturbation argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

from . import _fourier as fr
from .dispersion import INFINITE_DEPTH, symbol_g0


class DnoDivergenceError(RuntimeError):
    """Raised when the expansion terms grow for two consecutive orders."""

    def __init__(self, orders, norms):
        self.orders = orders
        self.norms = norms
        super().__init__(
            f"graph expansion divergence: term norms rose at orders {orders}"
            f" (norms {norms[0]:.3e} -> {norms[1]:.3e} -> {norms[2]:.3e})")


@dataclass
class PeriodicFunction:
    """Band-limited 2pi-periodic function, coefficients of e^{ikx} for
    k = -N..N in ascending order.

    Real-valued unless allow_complex is set; parity_tag ("even"/"odd")
    is validated against the coefficients when present.
    """

    coefficients: np.ndarray
    truncation: int
    parity_tag: str | None = None
    allow_complex: bool = False

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, complex)
        if len(self.coefficients) != 2 * self.truncation + 1:
            raise ValueError("coefficient array must have length 2N+1")
        scale = max(1.0, float(np.abs(self.coefficients).max(initial=0.0)))
        if not self.allow_complex:
            defect = np.abs(self.coefficients[::-1].conj()
                            - self.coefficients).max()
            if defect > 1e-14 * scale:
                raise ValueError(
                    f"coefficients violate reality by {defect:.2e}")
        if self.parity_tag is not None:
            sign = {"even": 1.0, "odd": -1.0}[self.parity_tag]
            defect = np.abs(self.coefficients[::-1]
                            - sign * self.coefficients).max()
            if defect > 1e-12 * scale:
                raise ValueError(
                    f"{self.parity_tag} parity violated by {defect:.2e}")

    @classmethod
    def zeros(cls, N: int, parity_tag=None):
        return cls(np.zeros(2 * N + 1, complex), N, parity_tag)

    @classmethod
    def from_cos_sin(cls, cos_amps, sin_amps, N: int, parity_tag=None):
        """Build sum_k a_k cos(kx) + b_k sin(kx); amplitude arrays are
        indexed from k = 1."""
        c = np.zeros(2 * N + 1, complex)
        for k, a in enumerate(np.atleast_1d(cos_amps), start=1):
            c[N + k] += 0.5 * a
            c[N - k] += 0.5 * a
        for k, b in enumerate(np.atleast_1d(sin_amps), start=1):
            c[N + k] += -0.5j * b
            c[N - k] += 0.5j * b
        return cls(c, N, parity_tag)

    @classmethod
    def from_grid_values(cls, values, N: int, parity_tag=None):
        return cls(fr.from_grid(np.asarray(values), N), N, parity_tag)

    def grid_values(self, n: int) -> np.ndarray:
        vals = fr.to_grid(self.coefficients, n)
        return vals if self.allow_complex else vals.real

    def derivative(self) -> "PeriodicFunction":
        flip = {"even": "odd", "odd": "even", None: None}[self.parity_tag]
        return PeriodicFunction(fr.derivative(self.coefficients),
                                self.truncation, flip, self.allow_complex)

    @property
    def mean(self) -> complex:
        return complex(self.coefficients[self.truncation])

    def cos_coefficient(self, k: int) -> float:
        if k == 0:
            return float(self.coefficients[self.truncation].real)
        return float(2.0 * self.coefficients[self.truncation + k].real)

    def sin_coefficient(self, k: int) -> float:
        return float(-2.0 * self.coefficients[self.truncation + k].imag)

    def norm_l2(self) -> float:
        return float(np.sqrt(2.0 * np.pi * np.sum(
            np.abs(self.coefficients) ** 2)))


@dataclass
class ComplexMatrixOp:
    """Dense matrix of an operator on Fourier exponentials e^{i(k+mu)x},
    k = -N..N, possibly stacked in two components."""

    entries: np.ndarray
    dimension: int
    basis_descriptor: str

    def __post_init__(self):
        self.entries = np.asarray(self.entries, complex)
        if self.entries.shape != (self.dimension, self.dimension):
            raise ValueError("entries must be square of the stated dimension")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("matrix entries must be finite")


def _a_diag(n: int, xi: np.ndarray, g0: np.ndarray) -> np.ndarray:
    # multiplier of A_n on modes with symbol argument xi
    if n % 2 == 0:
        return xi ** n
    return xi ** (n - 1) * g0


def _check_eta(eta: PeriodicFunction):
    if eta.allow_complex:
        raise ValueError("surface elevation must be real")
    scale = max(1.0, float(np.abs(eta.coefficients).max(initial=0.0)))
    if abs(eta.mean) > 1e-13 * scale:
        raise ValueError("surface elevation must have zero mean")


def apply_on_grid(eta_grid: np.ndarray, psi_grid: np.ndarray, depth,
                  order: int) -> np.ndarray:
    """Graph-expansion sum on a shared real grid; internal workhorse."""
    n = len(eta_grid)
    k = np.fft.rfftfreq(n, d=1.0 / n)        # 0..n/2
    g0 = symbol_g0(k, depth)

    def mult(diag, f):
        return np.fft.irfft(diag * np.fft.rfft(f), n)

    eta_pow = [np.ones(n)]
    fact = [1.0]
    for m in range(1, order + 1):
        fact.append(fact[-1] * m)
        eta_pow.append(eta_pow[-1] * eta_grid)
    eta_over_fact = [eta_pow[m] / fact[m] for m in range(order + 1)]

    eta_x = mult(1j * k, eta_grid)

    u = [psi_grid]
    for m in range(1, order + 1):
        acc = np.zeros(n)
        for i in range(1, m + 1):
            acc += eta_over_fact[i] * mult(_a_diag(i, k, g0), u[m - i])
        u.append(-acc)

    total = np.zeros(n)
    norms = []
    rising = 0
    for m in range(order + 1):
        term = np.zeros(n)
        for i in range(m + 1):
            term += eta_over_fact[i] * mult(_a_diag(i + 1, k, g0), u[m - i])
        for i in range(m):
            term -= eta_x * eta_over_fact[i] * mult(
                (1j * k) * _a_diag(i, k, g0), u[m - 1 - i])
        norms.append(float(np.linalg.norm(term)))
        if m >= 1 and norms[-1] > norms[-2] and norms[-2] > 0:
            rising += 1
            if rising >= 2:
                raise DnoDivergenceError((m - 1, m), norms[-3:])
        else:
            rising = 0
        total += term
    return total - total.mean()


def dno_apply(eta: PeriodicFunction, psi: PeriodicFunction,
              order: int = 8, depth=INFINITE_DEPTH) -> PeriodicFunction:
    """Apply the truncated operator sum_{m<=order} G_m(eta) to psi.

    Parameters
    ----------
    eta : PeriodicFunction
        Real zero-mean surface elevation.
    psi : PeriodicFunction
        Real surface trace.
    order : int
        Highest homogeneity degree retained (default 8).
    depth : float
        Fluid depth, INFINITE_DEPTH for deep water.

    Returns
    -------
    PeriodicFunction
        Real, zero-mean, truncated like the wider of the inputs.
    """
    _check_eta(eta)
    N = max(eta.truncation, psi.truncation)
    n = next_fast_len(max(4 * N + 8, 64))
    out = apply_on_grid(eta.grid_values(n), psi.grid_values(n), depth, order)
    parity = None
    if eta.parity_tag == "even" and psi.parity_tag in ("even", "odd"):
        parity = psi.parity_tag   # reflection commutes with G at even eta
    return PeriodicFunction.from_grid_values(out, N, parity)


def _buffer_band(eta: PeriodicFunction) -> int:
    """Extra modes kept internally so cropped entries are converged."""
    mags = np.abs(eta.coefficients)
    top = float(mags.max(initial=0.0))
    if top == 0.0:
        return 4
    N = eta.truncation
    n_eff = 0
    for k in range(N, -1, -1):
        if max(mags[N + k], mags[N - k]) > 1e-14 * top:
            n_eff = k
            break
    return max(2 * n_eff + 4, 12)


def dno_matrix(eta: PeriodicFunction, mu: float, N: int, order: int = 8,
               depth=INFINITE_DEPTH) -> ComplexMatrixOp:
    """Dense matrix of the Bloch-shifted operator G_mu(eta) on the basis
    e^{i(k+mu)x}, k = -N..N.

    The shift replaces every multiplier argument k by k + mu and leaves
    the multiplication operators alone. Assembly runs on an enlarged band
    K = N + buffer and crops the center block, so retained entries do not
    see the truncation boundary.
    """
    _check_eta(eta)
    if not np.isfinite(mu):
        raise ValueError("mu must be finite")
    K = N + _buffer_band(eta)
    dim = 2 * K + 1
    xi = np.arange(-K, K + 1) + mu
    g0 = symbol_g0(xi, depth)
    dx = 1j * xi

    fact = [1.0]
    for m in range(1, order + 1):
        fact.append(fact[-1] * m)
    t_pow = [np.eye(dim, dtype=complex)]
    for m in range(1, order + 1):
        t_pow.append(fr.mult_matrix(
            fr.coeff_pow(eta.coefficients, m, 2 * K) / fact[m], K))
    t_eta_x = fr.mult_matrix(fr.derivative(eta.coefficients), K)

    b = [np.eye(dim, dtype=complex)]
    for m in range(1, order + 1):
        acc = np.zeros((dim, dim), complex)
        for i in range(1, m + 1):
            acc += t_pow[i] @ (_a_diag(i, xi, g0)[:, None] * b[m - i])
        b.append(-acc)

    total = np.zeros((dim, dim), complex)
    norms = []
    rising = 0
    for m in range(order + 1):
        term = np.zeros((dim, dim), complex)
        for i in range(m + 1):
            term += t_pow[i] @ (_a_diag(i + 1, xi, g0)[:, None] * b[m - i])
        inner = np.zeros((dim, dim), complex)
        for i in range(m):
            inner += t_pow[i] @ ((dx * _a_diag(i, xi, g0))[:, None]
                                 * b[m - 1 - i])
        if m:
            term -= t_eta_x @ inner
        norms.append(float(np.linalg.norm(term)))
        if m >= 1 and norms[-1] > norms[-2] and norms[-2] > 0:
            rising += 1
            if rising >= 2:
                raise DnoDivergenceError((m - 1, m), norms[-3:])
        else:
            rising = 0
        total += term

    crop = total[K - N:K + N + 1, K - N:K + N + 1]
    return ComplexMatrixOp(
        crop, 2 * N + 1,
        f"exp(i(k+mu)x), k=-{N}..{N}, mu={float(mu)!r}")
