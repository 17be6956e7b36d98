"""Numerical checks of the non-resonance conditions.

Small divisors of N-wave interactions, exhaustive scans with the
equal-multiset exclusion rule, the quantitative Diophantine/Melnikov
inequalities, and the Wilton-ripple root in surface tension.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dispersion import PhysicalParams, omega_j


@dataclass(frozen=True)
class ResonanceQuery:
    """One signed frequency combination sum_k signs_k Omega(j_k)."""

    signs: tuple
    wavevectors: tuple
    params: PhysicalParams

    def __post_init__(self):
        if len(self.signs) != len(self.wavevectors):
            raise ValueError("signs and wavevectors must have equal length")
        if len(self.signs) < 2:
            raise ValueError("need at least two waves")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +-1")
        if any(j == 0 for j in self.wavevectors):
            raise ValueError("wavevectors must be nonzero")


@dataclass(frozen=True)
class MelnikovBudget:
    """Constants (upsilon, tau, d) of the non-resonance inequalities."""

    upsilon: float
    tau: float
    d: float = 0.0

    def __post_init__(self):
        if not self.upsilon > 0:
            raise ValueError("upsilon must be positive")


def small_divisor(query: ResonanceQuery) -> float:
    """Signed combination sum_k signs_k Omega(j_k); no absolute value."""
    total = 0.0
    for s, j in zip(query.signs, query.wavevectors):
        total += s * omega_j(j, query.params)
    return total


@dataclass
class NWaveReport:
    minimum: float                 # min of |divisor| * max|j|^tau, excluded cases skipped
    argmin: tuple                  # (signs, wavevectors) attaining it
    near_resonances: list          # (scaled, signs, wavevectors, divisor) below threshold
    excluded_count: int
    scanned_count: int


def scan_nwave(N: int, p: int, J_max: int, tau: float,
               params: PhysicalParams, threshold: float = 1e-6,
               enumeration_budget: int = 20_000_000) -> NWaveReport:
    """Exhaustive N-wave scan with signs (+1)*p, (-1)*(N-p).

    Enumerates all wavevector tuples with 0 < |j_i| <= J_max in
    lexicographic order, skips tuples whose plus-side and minus-side
    absolute values agree as multisets (there the divisor may vanish
    identically), and minimizes |divisor| * max|j|^tau.
    """
    if not 1 <= p <= N:
        raise ValueError("need 1 <= p <= N")
    if J_max < 1:
        raise ValueError("J_max must be >= 1")
    count = (2 * J_max) ** N
    if count > enumeration_budget:
        raise ValueError(
            f"enumeration of {count} tuples exceeds the budget "
            f"{enumeration_budget}; lower N or J_max")

    signs = (1,) * p + (-1,) * (N - p)
    j_range = np.array([j for j in range(-J_max, J_max + 1) if j != 0])
    omega_table = omega_j(j_range, params)

    shape = (len(j_range),) * N
    divisor = np.zeros(shape)
    for axis, s in enumerate(signs):
        view = [None] * N
        view[axis] = slice(None)
        divisor = divisor + s * omega_table[tuple(view)]

    abs_j = np.abs(j_range)
    maxj = np.zeros(shape)
    for axis in range(N):
        view = [None] * N
        view[axis] = slice(None)
        maxj = np.maximum(maxj, abs_j[tuple(view)].astype(float))

    # multiset comparison of |j| between the plus and minus sides; sides
    # of different cardinality can never agree
    if p == N - p:
        plus = np.sort(np.stack(np.meshgrid(
            *([abs_j] * p), indexing="ij"), axis=-1), axis=-1)
        minus = np.sort(np.stack(np.meshgrid(
            *([abs_j] * (N - p)), indexing="ij"), axis=-1), axis=-1)
        eq = np.ones(shape, bool)
        for i in range(p):
            a = [None] * N
            a[:p] = [slice(None)] * p
            b = [None] * N
            b[p:] = [slice(None)] * (N - p)
            eq &= plus[..., i][tuple(a)] == minus[..., i][tuple(b)]
        excluded = eq
    else:
        excluded = np.zeros(shape, bool)

    scaled = np.abs(divisor) * maxj ** tau
    scaled_masked = np.where(excluded, np.inf, scaled)
    flat_idx = int(np.argmin(scaled_masked))   # first minimizer in C order = lexicographic
    idx = np.unravel_index(flat_idx, shape)
    arg = tuple(int(j_range[i]) for i in idx)

    near = []
    near_idx = np.nonzero(~excluded & (scaled <= threshold))
    for tup in zip(*near_idx):
        js = tuple(int(j_range[i]) for i in tup)
        near.append((float(scaled[tup]), signs, js, float(divisor[tup])))
    near.sort()

    return NWaveReport(
        minimum=float(scaled_masked[idx]),
        argmin=(signs, arg),
        near_resonances=near,
        excluded_count=int(np.count_nonzero(excluded)),
        scanned_count=count,
    )


def check_melnikov(omega_vec, ell, j: int | None = None,
                   j_prime: int | None = None, mu_j: float | None = None,
                   mu_jp: float | None = None,
                   budget: MelnikovBudget = MelnikovBudget(0.01, 2.5)) -> bool:
    """Test one of the three non-resonance inequalities.

    With j None: diophantine |omega.ell| >= upsilon |ell|^-tau (ell != 0).
    With j only: first condition |omega.ell + mu_j| >= upsilon j^(1/2) <ell>^-tau.
    With j and j_prime: second condition
    |omega.ell + mu_j - mu_j'| >= upsilon j^-d j'^-d <ell>^-tau,
    rejecting the forbidden combination (ell, j, j') = (0, j, j).

    Both |ell| and <ell> := max(1, |ell|) use the sup norm.
    """
    ell_arr = np.asarray(ell, float)
    dot = float(np.dot(np.asarray(omega_vec, float), ell_arr))
    sup = float(np.max(np.abs(ell_arr))) if ell_arr.size else 0.0
    ell_w = max(1.0, sup)

    if j is None:
        if sup == 0:
            raise ValueError("ell must be nonzero for the diophantine test")
        return abs(dot) >= budget.upsilon * sup ** (-budget.tau)
    if j_prime is None:
        return abs(dot + mu_j) >= \
            budget.upsilon * j ** 0.5 * ell_w ** (-budget.tau)
    if sup == 0 and j == j_prime:
        raise ValueError("(ell, j, j') = (0, j, j) is excluded")
    return abs(dot + mu_j - mu_jp) >= \
        budget.upsilon * j ** (-budget.d) * j_prime ** (-budget.d) \
        * ell_w ** (-budget.tau)


def wilton_kappa(signs, wavevectors, params: PhysicalParams,
                 bracket=(1e-6, 2.0)) -> float:
    """Surface tension at which the given combination resonates exactly.

    Solves small_divisor = 0 for kappa by bisection inside the bracket;
    for (+,+,-) on (1,1,2) in deep water the root is 1/2.
    """
    def f(kappa):
        q = ResonanceQuery(tuple(signs), tuple(wavevectors),
                           dataclasses.replace(params, surface_tension=kappa))
        return small_divisor(q)

    return float(brentq(f, *bracket, xtol=1e-14))
