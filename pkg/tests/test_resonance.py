import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stokes_spectra import (
    INFINITE_DEPTH,
    MelnikovBudget,
    PhysicalParams,
    ResonanceQuery,
    check_melnikov,
    scan_nwave,
    small_divisor,
    wilton_kappa,
)

# frozen from tests/oracle_resonance.py (50-digit mpmath evaluation)
DIVISOR_2345 = -3.34799144140263698113688485942


def test_small_divisor_cancellation():
    q = ResonanceQuery((1, -1), (5, 5), PhysicalParams(depth=2.0))
    assert small_divisor(q) == 0.0


def test_small_divisor_wilton_zero():
    q = ResonanceQuery((1, 1, -1), (1, 1, 2),
                       PhysicalParams(surface_tension=0.5))
    assert small_divisor(q) == pytest.approx(0.0, abs=1e-15)


def test_small_divisor_frozen_value():
    q = ResonanceQuery((1, 1, -1, -1), (2, 3, 4, 5),
                       PhysicalParams(surface_tension=0.1, depth=2.0))
    assert small_divisor(q) == pytest.approx(DIVISOR_2345, rel=1e-13)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.sampled_from([1, -1]),
                          st.integers(min_value=-8, max_value=8).filter(bool)),
                min_size=2, max_size=5))
def test_small_divisor_sign_flip_and_permutation(pairs):
    p = PhysicalParams(surface_tension=0.3, depth=1.5, vorticity=0.2)
    signs = tuple(s for s, _ in pairs)
    js = tuple(j for _, j in pairs)
    v = small_divisor(ResonanceQuery(signs, js, p))
    flipped = small_divisor(ResonanceQuery(tuple(-s for s in signs), js, p))
    assert flipped == pytest.approx(-v, rel=1e-14, abs=1e-14)
    v2 = small_divisor(ResonanceQuery(signs[::-1], js[::-1], p))
    assert v2 == pytest.approx(v, rel=1e-14, abs=1e-14)


def test_query_validation():
    p = PhysicalParams()
    with pytest.raises(ValueError):
        ResonanceQuery((1,), (1,), p)
    with pytest.raises(ValueError):
        ResonanceQuery((1, 2), (1, 2), p)
    with pytest.raises(ValueError):
        ResonanceQuery((1, -1), (1, 0), p)


def test_scan_two_wave_minimum_positive():
    for params in (PhysicalParams(),
                   PhysicalParams(surface_tension=0.1, depth=2.0),
                   PhysicalParams(vorticity=0.5, depth=1.0)):
        rep = scan_nwave(2, 1, 16, 2.0, params)
        assert rep.minimum > 0
        # |j1| = |j2| happens for 4 sign combinations at each of 16 sizes
        assert rep.excluded_count == 4 * 16
        assert rep.scanned_count == 32 ** 2


def test_scan_finds_wilton_triple():
    rep = scan_nwave(3, 2, 4, 1.0, PhysicalParams(surface_tension=0.5),
                     threshold=1e-9)
    resonant = [entry for entry in rep.near_resonances
                if sorted(abs(j) for j in entry[2]) == [1, 1, 2]]
    assert resonant
    assert min(abs(e[3]) for e in resonant) <= 1e-12


def test_scan_exclusion_rule():
    rep = scan_nwave(4, 2, 6, 1.5, PhysicalParams(depth=2.0))
    assert rep.excluded_count > 0
    # excluded tuples are exactly those with equal |j| multisets; the
    # reported minimum must come from a non-excluded tuple
    signs, js = rep.argmin
    assert sorted(abs(j) for j in js[:2]) != sorted(abs(j) for j in js[2:])
    assert rep.minimum > 0


def test_scan_budget_guard():
    with pytest.raises(ValueError):
        scan_nwave(6, 3, 64, 2.0, PhysicalParams(), enumeration_budget=10**6)


def test_melnikov_trivial_true():
    b = MelnikovBudget(0.5, 2.0)
    assert check_melnikov((1.0, np.sqrt(2.0)), (1, 0), budget=b)


def test_melnikov_resonant_false():
    b = MelnikovBudget(1e-8, 2.0)
    assert not check_melnikov((1.0, 1.0), (1, -1), budget=b)


def test_melnikov_rejects_forbidden():
    b = MelnikovBudget(0.1, 2.0, 1.0)
    with pytest.raises(ValueError):
        check_melnikov((1.0,), (0,), j=3, j_prime=3, mu_j=0.5, mu_jp=0.5,
                       budget=b)
    with pytest.raises(ValueError):
        check_melnikov((1.0,), (0,), budget=b)


def test_melnikov_matches_direct_reference():
    # literal transcription of the three inequalities, kept separate from
    # the implementation on purpose
    def reference(omega, ell, j, jp, mu_j, mu_jp, ups, tau, d):
        dot = sum(w * l for w, l in zip(omega, ell))
        sup = max(abs(l) for l in ell)
        bracket = max(1.0, sup)
        if j is None:
            return abs(dot) >= ups * sup ** (-tau)
        if jp is None:
            return abs(dot + mu_j) >= ups * j ** 0.5 * bracket ** (-tau)
        return abs(dot + mu_j - mu_jp) >= \
            ups * j ** (-d) * jp ** (-d) * bracket ** (-tau)

    rng = np.random.default_rng(20260822)
    agree = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 4))
        omega = tuple(rng.normal(size=n))
        ell = tuple(int(v) for v in rng.integers(-6, 7, size=n))
        ups = float(rng.uniform(1e-4, 1.0))
        tau = float(rng.uniform(1.0, 4.0))
        d = float(rng.uniform(0.0, 2.0))
        b = MelnikovBudget(ups, tau, d)
        mode = int(rng.integers(0, 3))
        if mode == 0:
            if max(abs(l) for l in ell) == 0:
                continue
            got = check_melnikov(omega, ell, budget=b)
            want = reference(omega, ell, None, None, None, None, ups, tau, d)
        elif mode == 1:
            j = int(rng.integers(1, 50))
            mu_j = float(rng.normal())
            got = check_melnikov(omega, ell, j=j, mu_j=mu_j, budget=b)
            want = reference(omega, ell, j, None, mu_j, None, ups, tau, d)
        else:
            j = int(rng.integers(1, 50))
            jp = int(rng.integers(1, 50))
            if max(abs(l) for l in ell) == 0 and j == jp:
                continue
            mu_j = float(rng.normal())
            mu_jp = float(rng.normal())
            got = check_melnikov(omega, ell, j=j, j_prime=jp, mu_j=mu_j,
                                 mu_jp=mu_jp, budget=b)
            want = reference(omega, ell, j, jp, mu_j, mu_jp, ups, tau, d)
        assert got == want
        agree += 1
    assert agree > 9000


def test_wilton_root_exact():
    kap = wilton_kappa((1, 1, -1), (1, 1, 2), PhysicalParams())
    assert abs(kap - 0.5) <= 1e-12


def test_budget_validation():
    with pytest.raises(ValueError):
        MelnikovBudget(0.0, 2.0)
