"""Traveling periodic water waves by Newton continuation in amplitude.

The wave is sought as a zero of the traveling-frame system (time
derivative replaced by -c d_x), posed on even elevation / odd trace
profiles

    eta = sum_k a_k cos(kx),    psi = sum_k b_k sin(kx),

with the k=1 cosine mode of eta pinned to the amplitude parameter. The
parity ansatz is consistent for every vorticity: both residual
components preserve it, which halves the unknown count and removes the
translation degeneracy. The mean of the second residual is a gauge
quantity (Bernoulli constant of the zero-mean trace gauge) and is not an
equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

from . import _fourier as fr
from ._linearize import linearization_blocks, traveling_residual
from .dispersion import PhysicalParams, omega_j
from .dno import PeriodicFunction, apply_on_grid


class SingularJacobianError(RuntimeError):
    """Newton matrix numerically singular — resonant capillarity."""

    def __init__(self, kappa, cond):
        self.kappa = kappa
        self.cond = cond
        super().__init__(
            f"traveling-wave Jacobian is numerically singular "
            f"(condition {cond:.2e}); surface tension kappa={kappa!r} "
            f"sits at a harmonic resonance (Wilton ripple)")


class ContinuationError(RuntimeError):
    """A continuation step failed to converge."""

    def __init__(self, epsilon, residual):
        self.epsilon = epsilon
        self.residual = residual
        super().__init__(
            f"amplitude step epsilon={epsilon!r} failed to converge "
            f"(best residual {residual:.3e})")


@dataclass
class StokesWave:
    """A converged traveling wave: profiles, speed, and solve metadata."""

    amplitude: float
    eta: PeriodicFunction
    psi: PeriodicFunction
    speed: float
    params: PhysicalParams
    residual_norm: float
    converged: bool = True
    newton_iterations: int = 0


@dataclass
class SurfaceVelocity:
    """Horizontal and vertical fluid velocity traces on the free surface."""

    V: PeriodicFunction
    B: PeriodicFunction


def _grid_size(n_modes: int) -> int:
    return next_fast_len(max(8 * n_modes + 16, 64))


def _profiles(a, b, n_modes):
    eta = PeriodicFunction.from_cos_sin(a, [], n_modes, "even")
    psi = PeriodicFunction.from_cos_sin([], b, n_modes, "odd")
    return eta, psi


def _residual_vector(a, b, speed, params, n_modes, order):
    """Projected residual (sin rows of R1, cos rows of R2) plus the grid
    sup norm of both components."""
    ngrid = _grid_size(n_modes)
    eta, psi = _profiles(a, b, n_modes)
    r1, r2 = traveling_residual(eta.grid_values(ngrid),
                                psi.grid_values(ngrid), speed, params, order)
    c1 = fr.from_grid(r1, n_modes)
    c2 = fr.from_grid(r2, n_modes)
    rows = np.concatenate([
        -2.0 * c1[n_modes + 1:].imag,     # sin components of R1
        2.0 * c2[n_modes + 1:].real,      # cos components of R2
    ])
    sup = max(np.abs(r1).max(), np.abs(r2).max())
    return rows, sup


def _jacobian(a, b, speed, epsilon, params, n_modes, order):
    """Analytic Newton matrix on (a_1..a_N, b_1..b_N, c) built from the
    linearization blocks at Bloch shift zero."""
    eta, psi = _profiles(a, b, n_modes)
    l11, l12, l21, l22 = linearization_blocks(eta, psi, speed, params,
                                              n_modes, 0.0, order)
    dim = 2 * n_modes + 1
    # complex coefficient columns of cos(kx) and sin(kx), k = 1..N
    cos_cols = np.zeros((dim, n_modes), complex)
    sin_cols = np.zeros((dim, n_modes), complex)
    for k in range(1, n_modes + 1):
        cos_cols[n_modes + k, k - 1] = 0.5
        cos_cols[n_modes - k, k - 1] = 0.5
        sin_cols[n_modes + k, k - 1] = -0.5j
        sin_cols[n_modes - k, k - 1] = 0.5j

    def sin_rows(block):
        return -2.0 * block[n_modes + 1:, :].imag

    def cos_rows(block):
        return 2.0 * block[n_modes + 1:, :].real

    size = 2 * n_modes + 1
    jac = np.zeros((size, size))
    jac[:n_modes, :n_modes] = sin_rows(l11 @ cos_cols)
    jac[:n_modes, n_modes:2 * n_modes] = sin_rows(l12 @ sin_cols)
    jac[n_modes:2 * n_modes, :n_modes] = cos_rows(l21 @ cos_cols)
    jac[n_modes:2 * n_modes, n_modes:2 * n_modes] = cos_rows(l22 @ sin_cols)
    ks = np.arange(1, n_modes + 1)
    jac[:n_modes, -1] = -ks * a            # d(R1)/dc = eta_x
    jac[n_modes:2 * n_modes, -1] = ks * b  # d(R2)/dc = psi_x
    jac[-1, 0] = 1.0                       # normalization a_1 = epsilon
    return jac


def _flat_resonance_guard(params, n_modes, order):
    """Detect a singular traveling-wave Jacobian at the flat state.

    The flat Newton matrix decouples into 2x2 mode blocks whose k=1 block
    vanishes by the choice of speed; a vanishing determinant at some
    k >= 2 is a harmonic resonance (Wilton ripple) and makes the
    amplitude family non-unique at this surface tension."""
    c0 = omega_j(1, params)
    jac = _jacobian(np.zeros(n_modes), np.zeros(n_modes), c0, 0.0, params,
                    n_modes, order)
    for k in range(2, n_modes + 1):
        d11 = jac[k - 1, k - 1]
        d12 = jac[k - 1, n_modes + k - 1]
        d21 = jac[n_modes + k - 1, k - 1]
        d22 = jac[n_modes + k - 1, n_modes + k - 1]
        det = d11 * d22 - d12 * d21
        scale = abs(d11 * d22) + abs(d12 * d21)
        if abs(det) <= 1e-10 * scale:
            raise SingularJacobianError(params.surface_tension,
                                        np.inf if det == 0 else scale / abs(det))


def _newton(a, b, speed, epsilon, params, n_modes, tol, max_iterations,
            order):
    a, b = a.copy(), b.copy()
    best = None
    for it in range(max_iterations + 1):
        rows, sup = _residual_vector(a, b, speed, params, n_modes, order)
        sup = max(sup, abs(a[0] - epsilon))
        if best is None or sup < best[0]:
            best = (sup, a.copy(), b.copy(), speed)
        if sup <= tol:
            return a, b, speed, sup, it, True
        if it == max_iterations:
            break
        jac = _jacobian(a, b, speed, epsilon, params, n_modes, order)
        cond = np.linalg.cond(jac)
        if not np.isfinite(cond) or cond > 1e12:
            raise SingularJacobianError(params.surface_tension, cond)
        full = np.concatenate([rows, [a[0] - epsilon]])
        step = np.linalg.solve(jac, -full)
        if np.abs(step).max() > 1.0:   # hopeless for |eps| <= 0.1 profiles
            break
        a += step[:n_modes]
        b += step[n_modes:2 * n_modes]
        speed += step[-1]
    sup, a, b, speed = best
    return a, b, speed, sup, max_iterations, False


def _linear_guess(epsilon, params, n_modes):
    c0 = omega_j(1, params)
    t1 = float(np.tanh(params.depth)) if np.isfinite(params.depth) else 1.0
    a = np.zeros(n_modes)
    b = np.zeros(n_modes)
    a[0] = epsilon
    b[0] = c0 * epsilon / t1
    return a, b, c0


def _finalize(a, b, speed, epsilon, params, n_modes, sup, iters, converged):
    a = a.copy()
    a[0] = epsilon   # normalization holds exactly, not merely to roundoff
    eta, psi = _profiles(a, b, n_modes)
    return StokesWave(amplitude=epsilon, eta=eta, psi=psi, speed=speed,
                      params=params, residual_norm=sup, converged=converged,
                      newton_iterations=iters)


def solve_stokes(epsilon: float, params: PhysicalParams, N: int = 32,
                 tol: float = 1e-11, max_iterations: int = 50,
                 dno_order: int = 8) -> StokesWave:
    """Newton-solve the traveling wave of amplitude epsilon from the
    linear-wave initial guess.

    Requires |epsilon| <= 0.1 (small-amplitude regime). Non-convergence
    returns the best iterate with converged=False; a numerically singular
    Newton matrix raises SingularJacobianError naming the surface tension.
    """
    if abs(epsilon) > 0.1:
        raise ValueError("amplitude must satisfy |epsilon| <= 0.1")
    a, b, c0 = _linear_guess(epsilon, params, N)
    if epsilon == 0.0:
        return _finalize(a, b, c0, 0.0, params, N, 0.0, 0, True)
    _flat_resonance_guard(params, N, dno_order)
    a, b, speed, sup, iters, ok = _newton(a, b, c0, epsilon, params, N, tol,
                                          max_iterations, dno_order)
    return _finalize(a, b, speed, epsilon, params, N, sup, iters, ok)


def continue_in_amplitude(eps_grid, params: PhysicalParams, N: int = 32,
                          tol: float = 1e-11, max_iterations: int = 50,
                          dno_order: int = 8) -> list:
    """Solve along an ascending amplitude grid starting at 0, each solve
    warm-started from the previous wave. Raises ContinuationError with
    the failing amplitude if a step does not converge."""
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid or eps_grid[0] != 0.0:
        raise ValueError("amplitude grid must start at 0")
    if any(e1 >= e2 for e1, e2 in zip(eps_grid, eps_grid[1:])):
        raise ValueError("amplitude grid must be strictly ascending")
    if abs(eps_grid[-1]) > 0.1:
        raise ValueError("amplitude must satisfy |epsilon| <= 0.1")

    if len(eps_grid) > 1:
        _flat_resonance_guard(params, N, dno_order)
    waves = [solve_stokes(0.0, params, N, tol, max_iterations, dno_order)]
    a, b, speed = _linear_guess(0.0, params, N)[:2] + (waves[0].speed,)
    for eps in eps_grid[1:]:
        if waves[-1].amplitude == 0.0:
            a, b, speed = _linear_guess(eps, params, N)
        a, b, speed, sup, iters, ok = _newton(a, b, speed, eps, params, N,
                                              tol, max_iterations, dno_order)
        if not ok:
            raise ContinuationError(eps, sup)
        waves.append(_finalize(a, b, speed, eps, params, N, sup, iters, ok))
    return waves


def velocity_trace(wave: StokesWave, dno_order: int = 8) -> SurfaceVelocity:
    """Surface velocity components B (vertical) and V (horizontal) of a
    converged wave: B = (G(eta)psi + eta_x psi_x)/(1+eta_x^2),
    V = psi_x - B eta_x."""
    if not wave.converged:
        raise ValueError("velocity trace requires a converged wave")
    n_modes = wave.eta.truncation
    ngrid = _grid_size(n_modes)
    eta_g = wave.eta.grid_values(ngrid)
    psi_g = wave.psi.grid_values(ngrid)
    eta_x = wave.eta.derivative().grid_values(ngrid)
    psi_x = wave.psi.derivative().grid_values(ngrid)
    gpsi = apply_on_grid(eta_g, psi_g, wave.params.depth, dno_order)
    b = (gpsi + eta_x * psi_x) / (1.0 + eta_x ** 2)
    v = psi_x - b * eta_x
    return SurfaceVelocity(
        V=PeriodicFunction.from_grid_values(v, n_modes, "even"),
        B=PeriodicFunction.from_grid_values(b, n_modes, "odd"))
