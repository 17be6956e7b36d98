"""Shared linearization of the traveling-frame evolution about a wave
profile.

The quasi-linear system in the frame moving at speed c reads

    eta_t = c eta_x + G(eta) psi + gamma eta eta_x
    psi_t = c psi_x - g eta - psi_x^2/2 + S^2/(2(1+eta_x^2))
            + kappa d_x(eta_x / sqrt(1+eta_x^2))
            + gamma eta psi_x + gamma dxinv G(eta) psi,
    S = eta_x psi_x + G(eta) psi.

Its exact derivative about (eta, psi) — using the shape derivative
G'(eta)[m] f = -G(eta)(B m) - d_x(V m) with the surface traces
B = (G psi + eta_x psi_x)/(1+eta_x^2), V = psi_x - B eta_x — collapses,
after the first-order transport terms cancel, to the four blocks built
here. The same blocks serve the traveling-wave Newton solve (mu = 0) and
the Bloch-Floquet eigenvalue problem (d_x shifted to d_x + i mu).
"""

from __future__ import annotations

import numpy as np
from scipy.fft import next_fast_len

from . import _fourier as fr
from .dispersion import INFINITE_DEPTH
from .dno import apply_on_grid, dno_matrix


def surface_fields(eta_grid: np.ndarray, psi_grid: np.ndarray, params,
                   order: int) -> dict:
    """Pointwise fields entering the system and its linearization, all on
    the given real grid."""
    n = len(eta_grid)
    k = np.fft.rfftfreq(n, d=1.0 / n)

    def ddx(f):
        return np.fft.irfft(1j * k * np.fft.rfft(f), n)

    def dxinv(f):
        spec = np.fft.rfft(f)
        spec[0] = 0.0
        spec[1:] /= 1j * k[1:]
        return np.fft.irfft(spec, n)

    eta_x = ddx(eta_grid)
    psi_x = ddx(psi_grid)
    gpsi = apply_on_grid(eta_grid, psi_grid, params.depth, order)
    slope_sq = 1.0 + eta_x ** 2
    b = (gpsi + eta_x * psi_x) / slope_sq
    v = psi_x - b * eta_x
    return {
        "eta": eta_grid, "eta_x": eta_x, "psi": psi_grid, "psi_x": psi_x,
        "gpsi": gpsi, "B": b, "V": v, "V_x": ddx(v),
        "curv_factor": slope_sq ** -1.5,
        "ddx": ddx, "dxinv": dxinv,
    }


def traveling_residual(eta_grid, psi_grid, speed, params, order):
    """Residual grids (R1, R2) of the traveling system; R2 is reported
    modulo its mean, the Bernoulli constant of the zero-mean gauge."""
    f = surface_fields(eta_grid, psi_grid, params, order)
    g, kap, gam = params.gravity, params.surface_tension, params.vorticity
    r1 = speed * f["eta_x"] + f["gpsi"] + gam * f["eta"] * f["eta_x"]
    s = f["eta_x"] * f["psi_x"] + f["gpsi"]
    r2 = (speed * f["psi_x"] - g * f["eta"] - 0.5 * f["psi_x"] ** 2
          + 0.5 * s ** 2 / (1.0 + f["eta_x"] ** 2)
          + gam * f["eta"] * f["psi_x"])
    if kap:
        r2 = r2 + kap * f["ddx"](f["eta_x"]
                                 / np.sqrt(1.0 + f["eta_x"] ** 2))
    if gam:
        r2 = r2 + gam * f["dxinv"](f["gpsi"] - f["gpsi"].mean())
    return r1, r2 - r2.mean()


def linearization_blocks(eta, psi, speed, params, N: int, mu: float,
                         order: int = 8):
    """Dense blocks (L11, L12, L21, L22) of the linearized traveling-frame
    system on the Bloch basis e^{i(k+mu)x}, k = -N..N.

    eta and psi are PeriodicFunction profiles; speed is the wave speed of
    the background. Returns the four (2N+1) x (2N+1) complex matrices.
    """
    g, kap, gam = params.gravity, params.surface_tension, params.vorticity
    ngrid = next_fast_len(8 * N + 16)
    f = surface_fields(eta.grid_values(ngrid), psi.grid_values(ngrid),
                       params, order)

    def toep(values):
        return fr.mult_matrix(fr.from_grid(values, 2 * N), N)

    gmat = dno_matrix(eta, mu, N, order, params.depth).entries
    xi = np.arange(-N, N + 1) + mu
    dx = 1j * xi
    dxinv = np.zeros(2 * N + 1, complex)
    live = np.abs(xi) >= 1e-12
    dxinv[live] = 1.0 / (1j * xi[live])

    t_b = toep(f["B"])
    t_v = toep(f["V"])
    g_tb = gmat @ t_b

    l11 = (speed * np.diag(dx).astype(complex)
           - dx[:, None] * t_v - g_tb)
    l12 = gmat.copy()
    zero_order = -g - f["B"] * f["V_x"]
    if gam:
        zero_order = zero_order + gam * (f["psi_x"] - f["V"])
    l21 = toep(zero_order) - t_b @ g_tb
    if kap:
        l21 = l21 + kap * (dx[:, None] * (toep(f["curv_factor"])
                                          * dx[None, :]))
    l22 = (speed * np.diag(dx).astype(complex)
           - t_v * dx[None, :] + t_b @ gmat)
    if gam:
        t_eta = toep(f["eta"])
        l11 = l11 + gam * (dx[:, None] * t_eta)
        l21 = l21 - gam * (dxinv[:, None] * g_tb)
        l22 = l22 + gam * (t_eta * dx[None, :]
                           + dxinv[:, None] * gmat)
    return l11, l12, l21, l22
