"""Tests for the Floquet slices: flat-state exactness against the
closed-form dispersion, structural symmetry defects, instability window
membership, and lattice/conjugation symmetries in mu."""

import numpy as np
import pytest

from stokes_spectra import INFINITE_DEPTH, PhysicalParams
from stokes_spectra.bloch import assemble, check_symmetries, eigenvalues
from stokes_spectra.dispersion import omega_j, omega_sigma
from stokes_spectra.stokes import solve_stokes


def lex(lam):
    return lam[np.lexsort((lam.real, lam.imag))]


@pytest.fixture(scope="module")
def deep_wave():
    return solve_stokes(0.04, PhysicalParams(depth=INFINITE_DEPTH))


@pytest.fixture(scope="module")
def finite_wave():
    return solve_stokes(0.02, PhysicalParams(depth=2.0))


class TestFlatState:
    @pytest.mark.parametrize("depth", [0.5, 2.0, INFINITE_DEPTH])
    def test_eigenvalues_exact_on_mu_grid(self, depth):
        N = 32
        flat = solve_stokes(0.0, PhysicalParams(depth=depth), N=16)
        js = np.arange(-N, N + 1)
        for mu in np.linspace(-0.5, 0.5, 20, endpoint=False):
            got = eigenvalues(assemble(flat, mu, N=N)).eigenvalues
            want = np.concatenate([
                1j * omega_sigma(js + mu, 1, depth),
                1j * omega_sigma(js + mu, -1, depth)])
            want = lex(want)
            # every retained mode is an exact multiplier here, so compare
            # the full sorted lists
            err = np.abs(got - want) / (1.0 + np.abs(want))
            assert err.max() <= 1e-10

    def test_quadruple_zero_at_origin(self):
        flat = solve_stokes(0.0, PhysicalParams(depth=1.5), N=16)
        lam = eigenvalues(assemble(flat, 0.0, N=24)).eigenvalues
        assert np.sum(np.abs(lam) < 1e-10) == 4

    def test_symmetry_defects_vanish(self):
        flat = solve_stokes(0.0, PhysicalParams(depth=2.0), N=16)
        rep = check_symmetries(assemble(flat, 0.3, N=32))
        assert rep.hamiltonian_defect <= 1e-12
        assert rep.reversibility_defect <= 1e-12
        assert rep.pairing_defect <= 1e-12

    def test_flat_spectrum_imaginary(self):
        flat = solve_stokes(0.0, PhysicalParams(depth=2.0), N=16)
        sl = eigenvalues(assemble(flat, 0.17, N=32))
        assert sl.max_real_part <= 1e-10
        assert sl.unstable_count == 0

    def test_vorticity_flat_matches_mode_frequencies(self):
        params = PhysicalParams(depth=1.5, vorticity=0.7)
        flat = solve_stokes(0.0, params, N=12)
        N = 20
        lam = eigenvalues(assemble(flat, 0.0, N=N)).eigenvalues
        c = flat.speed
        want = [0.0, 0.0]   # zero mode of each component
        for j in range(1, N + 1):
            for jj in (j, -j):
                want.append(c * jj - omega_j(jj, params))
                want.append(c * jj + omega_j(-jj, params))
        want = lex(1j * np.asarray(sorted(want)))
        err = np.abs(lex(lam) - want) / (1.0 + np.abs(want))
        assert err.max() <= 1e-10


class TestAssembleContracts:
    def test_requires_converged_wave(self):
        params = PhysicalParams(depth=INFINITE_DEPTH)
        bad = solve_stokes(0.04, params, max_iterations=1)
        with pytest.raises(ValueError, match="converged"):
            assemble(bad, 0.1, N=40)

    def test_requires_enough_modes(self, deep_wave):
        with pytest.raises(ValueError, match="truncation"):
            assemble(deep_wave, 0.1, N=16)

    def test_deterministic(self, deep_wave):
        a = assemble(deep_wave, 0.07, N=40).matrix.entries
        b = assemble(deep_wave, 0.07, N=40).matrix.entries
        assert np.array_equal(a, b)

    def test_dimension_and_descriptor(self, deep_wave):
        op = assemble(deep_wave, 0.07, N=40)
        assert op.matrix.dimension == 2 * (2 * 40 + 1)
        assert "mu=0.07" in op.matrix.basis_descriptor


class TestInstabilityWindow:
    def test_unstable_inside_figure8_window(self, deep_wave):
        # mu < 2*sqrt(2)*eps: the slice carries the unstable member of the
        # pair {x+iy, -x+iy}; the complex-Hamiltonian pairing lambda ->
        # -conj(lambda) puts exactly one of the two in the right half plane
        sl = eigenvalues(assemble(deep_wave, 0.05, N=64))
        assert sl.unstable_count == 1
        assert sl.max_real_part > 1e-4
        lam = sl.eigenvalues
        partner = lam[np.abs(lam - (-np.conj(lam[np.argmax(lam.real)]))) <
                      1e-10]
        assert len(partner) == 1   # the reflected partner is present

    def test_stable_outside_window(self, deep_wave):
        sl = eigenvalues(assemble(deep_wave, 0.3, N=64))
        lam = sl.eigenvalues
        cutoff = lam.real > 1e-8 * (1.0 + np.abs(lam))
        near_origin = cutoff & (np.abs(lam.imag) < 0.5)
        assert near_origin.sum() == 0

    def test_pairing_defect_small_at_amplitude(self, deep_wave):
        rep = check_symmetries(assemble(deep_wave, 0.05, N=64))
        assert rep.pairing_defect <= 1e-8
        assert rep.hamiltonian_defect <= 1e-12
        assert rep.reversibility_defect <= 1e-12

    def test_truncation_convergence(self, deep_wave):
        a = eigenvalues(assemble(deep_wave, 0.05, N=48)).max_real_part
        b = eigenvalues(assemble(deep_wave, 0.05, N=64)).max_real_part
        assert abs(a - b) / b <= 1e-6


class TestMuSymmetries:
    def test_conjugation_under_mu_flip(self, finite_wave):
        a = eigenvalues(assemble(finite_wave, 0.3, N=48)).eigenvalues
        b = eigenvalues(assemble(finite_wave, -0.3, N=48)).eigenvalues
        err = np.abs(lex(a) - lex(np.conj(b))).max()
        assert err <= 1e-10 * np.abs(a).max()

    def test_unit_periodicity_on_interior(self, finite_wave):
        a = eigenvalues(assemble(finite_wave, -0.3, N=48)).eigenvalues
        b = eigenvalues(assemble(finite_wave, 0.7, N=48)).eigenvalues
        interior = a[np.abs(a.imag) < 30.0]
        assert len(interior) > 100
        worst = max(float(np.abs(b - lam).min()) for lam in interior)
        assert worst <= 1e-8

    def test_slice_sorted_and_counts_consistent(self, finite_wave):
        sl = eigenvalues(assemble(finite_wave, 0.21, N=48))
        assert np.all(np.diff(sl.eigenvalues.imag) >= -1e-12)
        lam = sl.eigenvalues
        expect = int((lam.real > 1e-8 * (1 + np.abs(lam))).sum())
        assert sl.unstable_count == expect
        assert sl.max_real_part == lam.real.max()
