"""Spectral diagnostics built on Floquet slices: band atlases over mu,
the near-origin instability lobe (its apex and re-collision point), the
depth scan for the instability threshold, high-frequency instability
isolas with ellipse fits, and the contour-projector reduction to the
4x4 matrix governing the near-zero eigenvalue quartet.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .bloch import INSTABILITY_CUTOFF_SCALE, assemble, eigenvalues
from .dispersion import PhysicalParams, find_collisions
from .stokes import StokesWave, solve_stokes


def _pmap(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- bands

@dataclass
class BandAtlas:
    """Eigenvalue slices on a mu grid plus matched band polylines."""

    wave: StokesWave
    mu_grid: np.ndarray
    slices: list
    tracked_bands: list   # per band: (mu_grid, lambda polyline)


def _match(prev: np.ndarray, cur: np.ndarray):
    cost = np.abs(prev[:, None] - cur[None, :])
    rows, cols = linear_sum_assignment(cost)
    order = np.empty_like(cols)
    order[rows] = cols
    displacement = float(cost[rows, order[rows]].max())
    return order, displacement


def trace_bands(wave: StokesWave, mu_grid, N: int = 64, dno_order: int = 8,
                jobs: int = 1, max_extra_points: int = 64) -> BandAtlas:
    """Slices on the grid, refined where the unstable count jumps or the
    matcher displacement exceeds the local eigenvalue spacing, then bands
    matched pairwise by optimal assignment."""
    mu = np.asarray(sorted(float(m) for m in mu_grid))
    if mu.size < 2:
        raise ValueError("mu grid needs at least two points")
    if mu.min() < -0.5 or mu.max() >= 0.5:
        raise ValueError("mu grid must lie inside [-1/2, 1/2)")

    def slice_at(m):
        return eigenvalues(assemble(wave, m, N, dno_order))

    slices = _pmap(slice_at, mu, jobs)

    def needs_refine(a, b):
        if a.unstable_count != b.unstable_count:
            return True
        order, disp = _match(a.eigenvalues, b.eigenvalues)
        lam = b.eigenvalues
        spacing = np.abs(lam[:, None] - lam[None, :])
        np.fill_diagonal(spacing, np.inf)
        local = spacing.min(axis=1)[order]
        # ambiguous when an eigenvalue moved beyond its neighbor distance
        return bool(np.any(disp > np.maximum(local, 1e-9)))

    added = 0
    i = 0
    mu = list(mu)
    while i + 1 < len(mu) and added < max_extra_points:
        if mu[i + 1] - mu[i] > 1e-4 and needs_refine(slices[i],
                                                     slices[i + 1]):
            mid = 0.5 * (mu[i] + mu[i + 1])
            mu.insert(i + 1, mid)
            slices.insert(i + 1, slice_at(mid))
            added += 1
        else:
            i += 1

    bands = []
    count = len(slices[0].eigenvalues)
    paths = np.empty((count, len(mu)), complex)
    paths[:, 0] = slices[0].eigenvalues
    index = np.arange(count)
    for j in range(1, len(mu)):
        order, _ = _match(paths[:, j - 1], slices[j].eigenvalues)
        paths[:, j] = slices[j].eigenvalues[order]
    mu_arr = np.asarray(mu)
    for k in range(count):
        bands.append((mu_arr, paths[k]))
    return BandAtlas(wave=wave, mu_grid=mu_arr, slices=slices,
                     tracked_bands=bands)


# -------------------------------------------------------------- figure 8

@dataclass
class Figure8Report:
    """The near-origin instability lobe of one wave: its apex (largest
    real part over mu), the re-collision exponent mu_bar, and the traced
    unstable branch."""

    epsilon: float
    apex_real: float
    apex_lambda: complex
    apex_mu: float
    mu_bar: float
    exists: bool
    samples: list = field(default_factory=list)   # (mu, lambda) rows
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.exists:
            if not self.apex_real > 0:
                raise ValueError("existing lobe must have positive apex")
            if not 0.0 < self.mu_bar < 0.5:
                raise ValueError("mu_bar must lie in (0, 1/2)")


def _near_origin_max_real(slc, im_window: float) -> float:
    lam = slc.eigenvalues
    keep = np.abs(lam.imag) < im_window
    if not np.any(keep):
        return 0.0
    return float(lam.real[keep].max())


def _near_origin_unstable(slc, im_window: float):
    lam = slc.eigenvalues
    keep = (np.abs(lam.imag) < im_window) & (
        lam.real > INSTABILITY_CUTOFF_SCALE * (1.0 + np.abs(lam)))
    return lam[keep]


def extract_figure8(wave: StokesWave, mu_max: float | None = None,
                    grid0: int = 32, N: int = 64, dno_order: int = 8,
                    im_window: float = 0.3, refine: bool = True,
                    n_samples: int = 48, jobs: int = 1) -> Figure8Report:
    """Trace the instability lobe through the origin.

    Detection scans a geometric mu grid (narrow lobes near the threshold
    depth stay visible); mu_bar is then bisected on the presence of a
    near-origin unstable eigenvalue to 1e-6, and the apex located by
    golden-section on the near-origin max real part to 1e-8 in mu.
    """
    eps = wave.amplitude
    if not 0.0 < eps <= 0.08:
        raise ValueError("lobe extraction expects amplitude in (0, 0.08]")
    if mu_max is None:
        mu_max = min(0.45, 5.0 * eps)

    cache: dict[float, object] = {}

    def probe(m: float):
        if m not in cache:
            cache[m] = eigenvalues(assemble(wave, m, N, dno_order))
        return cache[m]

    grid = np.geomspace(eps / 20.0, mu_max, grid0)
    _pmap(probe, grid, jobs)
    flags = np.array([len(_near_origin_unstable(probe(m), im_window)) > 0
                      for m in grid])

    if not flags.any():
        max_real = max(_near_origin_max_real(probe(m), im_window)
                       for m in grid)
        return Figure8Report(
            epsilon=eps, apex_real=max_real, apex_lambda=0.0j, apex_mu=0.0,
            mu_bar=0.0, exists=False,
            diagnostics={"mu_max": mu_max, "grid_points": int(grid0),
                         "max_near_origin_real": max_real,
                         "reason": "no near-origin unstable eigenvalue"})

    # rightmost re-entry to the imaginary axis
    last = int(np.nonzero(flags)[0][-1])
    if last == len(grid) - 1:
        lo, hi = float(grid[-1]), min(0.499, 2.0 * mu_max)
    else:
        lo, hi = float(grid[last]), float(grid[last + 1])
    if refine:
        while hi - lo > 1e-6:
            mid = 0.5 * (lo + hi)
            if len(_near_origin_unstable(probe(mid), im_window)) > 0:
                lo = mid
            else:
                hi = mid
    mu_bar = 0.5 * (lo + hi)

    def growth(m: float) -> float:
        return _near_origin_max_real(probe(m), im_window)

    apex_grid = np.linspace(mu_bar / 25.0, mu_bar * (1 - 1e-9), 25)
    vals = [growth(m) for m in apex_grid]
    i = int(np.argmax(vals))
    if refine and 0 < i < len(apex_grid) - 1:
        res = minimize_scalar(
            lambda m: -growth(float(m)),
            bracket=(apex_grid[i - 1], apex_grid[i], apex_grid[i + 1]),
            method="golden", options={"xtol": 1e-8})
        apex_mu = float(res.x)
    else:
        apex_mu = float(apex_grid[i])
    slc = probe(apex_mu)
    unstable = _near_origin_unstable(slc, im_window)
    apex_lambda = complex(unstable[np.argmax(unstable.real)]) \
        if len(unstable) else 0.0j
    apex_real = growth(apex_mu)

    samples = []
    for m in np.linspace(mu_bar / n_samples, mu_bar * (1 - 1e-9), n_samples):
        lam = _near_origin_unstable(probe(m), im_window)
        mirrored = np.concatenate([lam, -lam.conj()]) if len(lam) else lam
        for z in mirrored:
            samples.append((float(m), complex(z)))

    return Figure8Report(epsilon=eps, apex_real=apex_real,
                         apex_lambda=apex_lambda, apex_mu=apex_mu,
                         mu_bar=mu_bar, exists=True, samples=samples,
                         diagnostics={"mu_max": mu_max,
                                      "slices_used": len(cache)})


# -------------------------------------------------------------- WB scan

@dataclass
class WBScanReport:
    """Depth scan of the near-origin instability: existence and scaled
    apex per depth, and the bisected threshold when bracketed."""

    epsilon: float
    rows: list                 # (h, apex_real/eps^2, exists)
    threshold: float | None
    bracketed: bool
    bracket: tuple | None


def scan_wb_threshold(h_grid, epsilon: float, N: int = 64,
                      tol_h: float = 0.01, probe_grid0: int = 24,
                      stokes_modes: int = 32, dno_order: int = 8,
                      jobs: int = 1) -> WBScanReport:
    """Bisect the depth at which the near-origin lobe appears.

    Each probe solves the wave at depth h and runs lobe detection without
    the expensive refinements; rows report apex_real/eps^2 per grid depth
    so the vanishing proportionality factor is observable.
    """
    h_grid = sorted(float(h) for h in h_grid)
    if len(h_grid) < 2:
        raise ValueError("depth grid needs at least two points")

    def probe(h: float):
        wave = solve_stokes(epsilon, PhysicalParams(depth=h),
                            N=stokes_modes, dno_order=dno_order)
        rep = extract_figure8(wave, grid0=probe_grid0, N=N,
                              dno_order=dno_order, refine=False,
                              n_samples=2, jobs=jobs)
        apex = rep.apex_real if rep.exists else rep.diagnostics[
            "max_near_origin_real"]
        return rep.exists, apex / epsilon ** 2

    results = _pmap(probe, h_grid, jobs)
    rows = [(h, scaled, exists)
            for h, (exists, scaled) in zip(h_grid, results)]

    flags = [r[2] for r in rows]
    if all(flags) or not any(flags):
        return WBScanReport(epsilon=epsilon, rows=rows, threshold=None,
                            bracketed=False, bracket=None)
    # first transition from absent to present along ascending depth
    k = next(i for i in range(len(flags) - 1) if flags[i] != flags[i + 1])
    lo, hi = h_grid[k], h_grid[k + 1]
    lo_exists = flags[k]
    while hi - lo > tol_h:
        mid = 0.5 * (lo + hi)
        mid_exists = probe(mid)[0]
        if mid_exists == lo_exists:
            lo = mid
        else:
            hi = mid
    return WBScanReport(epsilon=epsilon, rows=rows,
                        threshold=0.5 * (lo + hi), bracketed=True,
                        bracket=(lo, hi))


# --------------------------------------------------------------- isolas

@dataclass
class Isola:
    """One high-frequency instability bubble and its ellipse fit
    x^2 + E^2 (y - y0)^2 = R^2 over the unstable eigenvalues
    lambda = x + iy collected across the mu window."""

    p: int
    found: bool
    center_imag: float
    semiaxis_real: float
    semiaxis_imag: float
    mu_window: tuple
    ellipse_residual: float
    omega_star: float
    mu_star: float
    samples: list = field(default_factory=list)   # (mu, lambda) rows
    fit: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.found:
            if not (self.semiaxis_real > 0 and self.semiaxis_imag > 0):
                raise ValueError("found isola must have positive semiaxes")


@dataclass
class IsolaSearch:
    """Tunables of the adaptive isola scan."""

    samples: int = 24
    coarse: int = 17
    zoom_rounds: int = 6
    window: float | None = None
    N: int = 64
    dno_order: int = 8
    jobs: int = 1


def _band_radius(omega_star: float, mu_star: float, depth, N: int) -> float:
    from .dispersion import omega_sigma
    js = np.arange(-N, N + 1)
    freqs = np.concatenate([omega_sigma(js + mu_star, 1, depth),
                            omega_sigma(js + mu_star, -1, depth)])
    gaps = np.sort(np.abs(freqs - omega_star))
    return max(0.25 * gaps[2], 1e-6)   # gaps[0:2] are the colliding pair


def _isola_points(slc, omega_star: float, radius: float):
    lam = slc.eigenvalues
    keep = (np.abs(lam - 1j * omega_star) < radius) & (
        lam.real > INSTABILITY_CUTOFF_SCALE * (1.0 + np.abs(lam)))
    return lam[keep]


def _pair_gap(slc, omega_star: float) -> float:
    lam = slc.eigenvalues
    near = lam[np.argsort(np.abs(lam - 1j * omega_star))[:2]]
    return float(np.abs(near[0] - near[1]))


def _fit_ellipse(points: np.ndarray):
    """Least squares for x^2 = alpha + beta y + delta y^2; returns the
    geometry (E, y0, R) and the radial rms residual."""
    x, y = points.real, points.imag
    design = np.column_stack([np.ones_like(y), y, y * y])
    coef, *_ = np.linalg.lstsq(design, x ** 2, rcond=None)
    alpha, beta, delta = coef
    if delta >= 0:
        return None
    E = np.sqrt(-delta)
    y0 = beta / (2.0 * E * E)
    r_sq = alpha + E * E * y0 * y0
    if r_sq <= 0:
        return None
    R = np.sqrt(r_sq)
    radial = np.sqrt(x ** 2 + E ** 2 * (y - y0) ** 2)
    residual = float(np.sqrt(np.mean((radial - R) ** 2)))
    return {"E": float(E), "y0": float(y0), "R": float(R),
            "residual": residual}


def extract_isola(wave: StokesWave, p: int,
                  search: IsolaSearch | None = None) -> Isola:
    """Locate the instability bubble seeded by the order-p collision and
    fit its ellipse.

    The scan window starts proportional to eps^p around the collision
    mu; when no unstable point is visible the window zooms toward the
    minimizer of the colliding-pair gap (the bubble drifts O(eps^2) from
    the linear collision). An empty result is returned as found=False,
    never as a fabricated fit.
    """
    search = search or IsolaSearch()
    eps = wave.amplitude
    params = wave.params
    report = find_collisions(p, params.depth)
    match = [c for c in report.points if c.p == p]
    if not match:
        raise ValueError(f"no order-{p} collision found for this depth")
    coll = match[0]
    mu_star, omega_star = coll.mu, coll.omega_star
    radius = _band_radius(omega_star, mu_star, params.depth, search.N)

    cache: dict[float, object] = {}

    def probe(m: float):
        if m not in cache:
            cache[m] = eigenvalues(assemble(wave, m, search.N,
                                            search.dno_order))
        return cache[m]

    width = search.window or max(10.0 * eps ** p, 0.5 * eps)
    center = mu_star
    found_mus = []
    for _ in range(search.zoom_rounds):
        grid = center + np.linspace(-0.5, 0.5, search.coarse) * width
        grid = grid[(grid > -0.5) & (grid < 0.5)]
        _pmap(probe, grid, search.jobs)
        hits = [m for m in grid
                if len(_isola_points(probe(m), omega_star, radius))]
        if hits:
            found_mus = hits
            break
        gaps = [_pair_gap(probe(m), omega_star) for m in grid]
        center = float(grid[int(np.argmin(gaps))])
        width /= 8.0
    if not found_mus:
        return Isola(p=p, found=False, center_imag=0.0, semiaxis_real=0.0,
                     semiaxis_imag=0.0, mu_window=(center - width / 2,
                                                   center + width / 2),
                     ellipse_residual=np.inf, omega_star=omega_star,
                     mu_star=mu_star,
                     fit={"reason": "no unstable point in window"})

    # bisect the window edges where instability switches off
    spacing = width / (search.coarse - 1)
    lo, hi = min(found_mus), max(found_mus)

    def has_points(m: float) -> bool:
        return len(_isola_points(probe(m), omega_star, radius)) > 0

    a, b = lo - spacing, lo
    for _ in range(20):
        mid = 0.5 * (a + b)
        if has_points(mid):
            b = mid
        else:
            a = mid
    left = b
    a, b = hi, hi + spacing
    for _ in range(20):
        mid = 0.5 * (a + b)
        if has_points(mid):
            a = mid
        else:
            b = mid
    right = a

    mus = np.linspace(left, right, search.samples)
    pts, samples = [], []
    for m in mus:
        lam = _isola_points(probe(m), omega_star, radius)
        for z in lam:
            pts.append(z)
            samples.append((float(m), complex(z)))
            samples.append((float(m), complex(-z.conjugate())))
    pts = np.asarray(pts)
    fit = _fit_ellipse(pts) if len(pts) >= 5 else None
    if fit is None:
        return Isola(p=p, found=False, center_imag=0.0, semiaxis_real=0.0,
                     semiaxis_imag=0.0, mu_window=(left, right),
                     ellipse_residual=np.inf, omega_star=omega_star,
                     mu_star=mu_star, samples=samples,
                     fit={"reason": "degenerate ellipse fit"})
    return Isola(p=p, found=True, center_imag=fit["y0"],
                 semiaxis_real=fit["R"],
                 semiaxis_imag=fit["R"] / fit["E"],
                 mu_window=(float(left), float(right)),
                 ellipse_residual=fit["residual"], omega_star=omega_star,
                 mu_star=mu_star, samples=samples, fit=fit)


# ----------------------------------------------------------------- kato

@dataclass
class ReducedMatrix4:
    """The 4x4 matrix of the linearized flow on the spectral subspace of
    the four near-zero eigenvalues, in a symplectic reversible basis:
    entries = J4 @ B with B Hermitian, blocks E, F, G of B."""

    entries: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    basis_defects: dict
    projector_defects: dict
    eigenvalues: np.ndarray
    matched_eigenvalues: np.ndarray
    contour: dict


class ContourError(RuntimeError):
    """Contour does not isolate exactly the four target eigenvalues."""


def _symplectic_j(N: int, mu: float, gamma: float) -> np.ndarray:
    dim = 2 * N + 1
    xi = np.arange(-N, N + 1) + mu
    dxinv = np.zeros(dim, complex)
    live = np.abs(xi) >= 1e-12
    dxinv[live] = 1.0 / (1j * xi[live])
    eye = np.eye(dim)
    zero = np.zeros((dim, dim))
    return np.block([[zero, eye], [-eye, gamma * np.diag(dxinv)]])


def kato_reduce(wave: StokesWave, mu: float,
                contour_center: complex | None = None,
                contour_radius: float | None = None,
                quadrature_points: int = 64, N: int = 64,
                dno_order: int = 8) -> ReducedMatrix4:
    """Riesz-project onto the four eigenvalues nearest zero and compress
    the operator to their invariant subspace.

    The projector is the trapezoid quadrature of -(1/2pi i) times the
    resolvent around a circle separating the quartet (node count doubles
    until entries stabilize to 1e-9). The basis of the range is
    orthonormalized, then normalized symplectically so the compressed
    matrix is J4 @ (Hermitian).
    """
    op = assemble(wave, mu, N, dno_order)
    L = op.matrix.entries
    lam = eigenvalues(op).eigenvalues
    order = np.argsort(np.abs(lam))
    quartet = lam[order[:4]]

    center = complex(np.mean(quartet)) if contour_center is None \
        else complex(contour_center)
    by_dist = lam[np.argsort(np.abs(lam - center))]
    if contour_radius is None:
        radius = 0.5 * float(np.abs(by_dist[4] - center))
    else:
        radius = float(contour_radius)
    inside = int(np.sum(np.abs(lam - center) < radius))
    if inside != 4:
        raise ContourError(
            f"contour encloses {inside} eigenvalues, need exactly 4 "
            f"(center {center:.3e}, radius {radius:.3e})")

    def quadrature(n: int) -> np.ndarray:
        theta = (np.arange(n) + 0.5) * (2.0 * np.pi / n)
        nodes = center + radius * np.exp(1j * theta)
        total = np.zeros_like(L)
        eye = np.eye(L.shape[0])
        for z, ph in zip(nodes, np.exp(1j * theta)):
            total += ph * np.linalg.solve(L - z * eye, eye)
        return -(radius / n) * total

    n = quadrature_points
    proj = quadrature(n)
    change = np.inf
    while n < 1024:
        nxt = quadrature(2 * n)
        change = float(np.abs(nxt - proj).max())
        proj, n = nxt, 2 * n
        if change <= 1e-9:
            break
    if change > 1e-8:
        raise RuntimeError(
            f"projector quadrature did not converge: entry change "
            f"{change:.2e} at {n} nodes")

    rank_trace = float(np.trace(proj).real)
    if round(rank_trace) != 4:
        raise ContourError(
            f"projector rank {rank_trace:.6f} (expected 4); contour "
            f"encloses the wrong eigenvalue count")

    norm_l = np.linalg.norm(L, 2)
    norm_p = np.linalg.norm(proj, 2)
    jmat = _symplectic_j(N, mu, wave.params.vorticity)
    dim = 2 * N + 1
    r_sign = np.concatenate([np.ones(dim), -np.ones(dim)])
    projector_defects = {
        "idempotency": float(np.linalg.norm(proj @ proj - proj, 2)),
        "commutator": float(np.linalg.norm(proj @ L - L @ proj, 2))
        / norm_l,
        "skew_hamiltonian": float(np.linalg.norm(
            (jmat @ proj).conj().T + jmat @ proj, 2)) / norm_p,
        "reversibility": float(np.linalg.norm(
            r_sign[:, None] * proj.conj() - proj * r_sign[None, :], 2))
        / norm_p,
        "quadrature_change": change,
        "rank_trace": rank_trace,
    }

    # orthonormal basis of the range, then symplectic normalization
    u, s, _ = np.linalg.svd(proj)
    q = u[:, :4]
    w = q.conj().T @ jmat @ q            # skew-Hermitian Gram matrix
    herm = 1j * w
    d, vec = np.linalg.eigh(herm)
    if int(np.sum(d > 0)) != 2 or int(np.sum(d < 0)) != 2:
        raise ContourError(
            "symplectic form on the subspace is not of signature (2,2)")
    scaled = vec / np.sqrt(np.abs(d))[None, :]
    pos = scaled[:, d > 0][:, ::-1]      # pair largest |d| first
    neg = scaled[:, d < 0]
    pairs = []
    for i in range(2):
        t1 = (pos[:, i] + neg[:, i]) / np.sqrt(2.0)
        t2 = 1j * (pos[:, i] - neg[:, i]) / np.sqrt(2.0)
        pairs.extend([t1, t2])
    basis = q @ np.column_stack(pairs)

    j4 = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    gram = basis.conj().T @ jmat @ basis
    b_herm = -(basis.conj().T @ jmat @ (L @ basis))
    reduced = j4 @ b_herm
    eig4 = np.linalg.eigvals(reduced)
    eig4 = eig4[np.lexsort((eig4.real, eig4.imag))]
    quartet_sorted = quartet[np.lexsort((quartet.real, quartet.imag))]

    basis_defects = {
        "symplectic": float(np.linalg.norm(gram - j4, 2)),
        "reversibility": projector_defects["reversibility"],
        "hermitian_E": float(np.linalg.norm(
            b_herm[:2, :2] - b_herm[:2, :2].conj().T, 2)),
        "hermitian_G": float(np.linalg.norm(
            b_herm[2:, 2:] - b_herm[2:, 2:].conj().T, 2)),
    }
    return ReducedMatrix4(
        entries=reduced, E=b_herm[:2, :2], F=b_herm[:2, 2:],
        G=b_herm[2:, 2:], basis_defects=basis_defects,
        projector_defects=projector_defects, eigenvalues=eig4,
        matched_eigenvalues=quartet_sorted,
        contour={"center": center, "radius": radius, "nodes": n})
