"""Closed-form linear theory of small-amplitude periodic water waves.

Multiplier symbols of the flat-surface operator, the normal-mode
frequencies Omega(j), the two-branch shifted dispersion omega^sigma, and
a collision finder for the double eigenvalues that seed the instability
isolas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

# Tagged deep-water depth. The deep symbol |xi| is exact, never a large-h
# limit, so the tag is the IEEE infinity and every user branches on it.
INFINITE_DEPTH = math.inf


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants of one run: gravity g, surface tension kappa,
    constant vorticity gamma, and depth h (INFINITE_DEPTH for deep water).
    """

    gravity: float = 1.0
    surface_tension: float = 0.0
    vorticity: float = 0.0
    depth: float = INFINITE_DEPTH

    def __post_init__(self):
        if not self.gravity > 0:
            raise ValueError("gravity must be positive")
        if self.surface_tension < 0:
            raise ValueError("surface tension must be nonnegative")
        if not self.depth > 0:   # inf passes
            raise ValueError("depth must be positive or INFINITE_DEPTH")

    @property
    def c_h(self) -> float:
        """Linear speed sqrt(tanh h) of the k=1 carrier; 1 in deep water."""
        if self.depth == INFINITE_DEPTH:
            return 1.0
        return math.sqrt(math.tanh(self.depth))


def symbol_g0(xi, depth):
    """Flat-surface Dirichlet-to-Neumann symbol.

    xi*tanh(h*xi) at finite depth, |xi| at INFINITE_DEPTH. Even in xi and
    nonnegative. Accepts scalars or arrays.
    """
    xi_arr = np.asarray(xi, float)
    if depth == INFINITE_DEPTH:
        out = np.abs(xi_arr)
    else:
        hxi = depth * xi_arr
        # tanh saturates to +-1 beyond |hxi| ~ 40 in double precision
        t = np.where(np.abs(hxi) > 40.0, np.sign(xi_arr), np.tanh(hxi))
        out = xi_arr * t
    return out if out.ndim else float(out)


def omega_j(j, params: PhysicalParams):
    """Normal-mode frequency Omega(j) of the linearized system, j != 0.

    Omega(j) = sqrt(G0(j)(g + kappa j^2 + (gamma^2/4) G0(j)/j^2))
               + (gamma/2) G0(j)/j.
    """
    j_arr = np.asarray(j)
    if np.any(j_arr == 0):
        raise ValueError("zero mode is excluded from the phase space")
    g0 = symbol_g0(j_arr.astype(float), params.depth)
    gam = params.vorticity
    jf = j_arr.astype(float)
    core = params.gravity + params.surface_tension * jf ** 2 \
        + 0.25 * gam * gam * g0 / jf ** 2
    out = np.sqrt(g0 * core) + 0.5 * gam * g0 / jf
    return out if out.ndim else float(out)


def omega_sigma(phi, sigma: int, depth):
    """Two-branch flat dispersion c_h phi - sigma sqrt(G0(phi)).

    Unit gravity, no surface tension, no vorticity; the eigenvalues of the
    flat Bloch operator are i*omega_sigma(j + mu, h). Accepts arrays.
    """
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    ch = 1.0 if depth == INFINITE_DEPTH else math.sqrt(math.tanh(depth))
    phi_arr = np.asarray(phi, float)
    out = ch * phi_arr - sigma * np.sqrt(symbol_g0(phi_arr, depth))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CollisionPoint:
    """A double eigenvalue i*omega_star at Floquet parameter mu, where the
    branches (j, +) and (j', -) cross; p = j - j' indexes the isola it
    seeds."""

    p: int
    mu: float
    omega_star: float
    branch_ids: tuple

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("isola index p must be >= 2")
        if not 0.0 <= self.mu < 1.0:
            raise ValueError("mu must lie in [0, 1)")
        if not self.omega_star > 0:
            raise ValueError("omega_star must be positive")


@dataclass
class CollisionReport:
    """Collision points sorted by omega_star, the degenerate quadruple
    zero at mu = 0, and any requested p whose collision fell outside the
    search window (reported, never silently dropped)."""

    points: list
    quadruple_zero: dict
    missing: list

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def _pair_gap(mu, j, jp, depth):
    return omega_sigma(j + mu, 1, depth) - omega_sigma(jp + mu, -1, depth)


def find_collisions(p_max: int, depth, search_window: int = 64,
                    grid_points: int = 10_000) -> CollisionReport:
    """Locate the double eigenvalues (mu, omega_star) for p = 2..p_max.

    Scans every branch pair (j, +), (j - p, -) with |j|, |j - p| inside the
    window on a uniform mu grid, then refines each sign change by bisection
    to |delta| <= 1e-12. Points are deduplicated modulo the lattice shift
    (j, mu) ~ (j + 1, mu - 1) and sorted by omega_star.
    """
    if p_max < 2:
        raise ValueError("p_max must be >= 2")
    J = int(search_window)
    mu_grid = np.arange(grid_points) / grid_points

    candidates = []
    for p in range(2, p_max + 1):
        for j in range(-J + p, J + 1):
            jp = j - p
            gaps = _pair_gap(mu_grid, j, jp, depth)
            exact = np.nonzero(np.abs(gaps) <= 1e-13)[0]
            roots = [mu_grid[i] for i in exact]
            sign_flip = np.nonzero((gaps[:-1] * gaps[1:] < 0.0))[0]
            for i in sign_flip:
                roots.append(brentq(_pair_gap, mu_grid[i], mu_grid[i + 1],
                                    args=(j, jp, depth), xtol=1e-15))
            for mu in roots:
                res = abs(_pair_gap(mu, j, jp, depth))
                if res > 1e-12:
                    continue
                w = omega_sigma(j + mu, 1, depth)
                if w <= 1e-9:
                    continue
                candidates.append((p, float(mu), float(w),
                                   ((j, 1), (jp, -1))))

    # lattice duplicates share (p, omega_star); keep the smallest mu
    best = {}
    for p, mu, w, pair in sorted(candidates, key=lambda c: (c[0], c[1])):
        key = (p, round(w, 9))
        if key not in best:
            best[key] = (p, mu, w, pair)

    per_p = {}
    for (p, _), cand in best.items():
        if p not in per_p or cand[2] < per_p[p][2]:
            per_p[p] = cand

    points = [CollisionPoint(p=c[0], mu=c[1], omega_star=c[2],
                             branch_ids=c[3])
              for c in sorted(per_p.values(), key=lambda c: c[2])]
    missing = [p for p in range(2, p_max + 1) if p not in per_p]

    # the quadruple zero: (0, +-) and (+-1, -+) all vanish at mu = 0
    qa = [omega_sigma(0.0, s, depth) for s in (1, -1)]
    qb = [omega_sigma(1.0, 1, depth), omega_sigma(-1.0, -1, depth)]
    quad = {
        "mu": 0.0,
        "omega": 0.0,
        "branches": ((0, 1), (0, -1), (1, 1), (-1, -1)),
        "max_defect": float(max(abs(v) for v in qa + qb)),
    }
    return CollisionReport(points=points, quadruple_zero=quad,
                           missing=missing)
