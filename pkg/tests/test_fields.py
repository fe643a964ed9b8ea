import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.signal import convolve2d

from qpbo.fields import (
    FrequencyVector,
    Lattice,
    SpectralField,
    golden_omega,
    make_field_from_modes,
    pointwise_multiply,
    random_field,
    smooth_random_field,
    to_physical,
    to_spectral,
)


def dft_synthesis(field):
    """Independent oracle: evaluate the Fourier sum directly at grid points."""
    lat = field.lattice
    G = lat.grid_size
    x = np.arange(G) / G
    modes = np.arange(-lat.nmax, lat.nmax + 1)
    e1 = np.exp(2j * np.pi * np.outer(x, modes))          # (G, block)
    return np.einsum("xa,ab,yb->xy", e1, field.coeffs, e1)


class TestFrequencyVector:
    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            FrequencyVector((0.0, 0.0))

    def test_perp_orthogonal_exactly(self):
        fv = FrequencyVector((0.3, -1.7))
        w, wp = fv.omega, fv.omega_perp
        assert w[0] * wp[0] + w[1] * wp[1] == 0.0

    def test_golden_is_unit_and_incommensurable(self):
        fv = golden_omega()
        assert fv.norm == pytest.approx(1.0, abs=1e-15)
        assert not fv.commensurability_flag()

    def test_commensurable_flagged(self):
        assert FrequencyVector((1.0, 0.5)).commensurability_flag()


class TestLattice:
    def test_grid_size_validation(self, omega):
        with pytest.raises(ValueError):
            Lattice(8, 15, omega)   # odd
        with pytest.raises(ValueError):
            Lattice(8, 16, omega)   # < 2*nmax+1

    def test_xi_linear_and_odd(self, lat8):
        k = lat8.nmax
        assert lat8.xi1[k + 3, k + 2] == pytest.approx(-lat8.xi1[k - 3, k - 2])
        w = lat8.freq.omega
        assert lat8.xi1[k + 1, k] == pytest.approx(w[0])
        assert lat8.xi2[k + 1, k] == pytest.approx(w[1])

    def test_degenerate_constant_lattice(self, omega):
        lat = Lattice(0, 2, omega)
        f = make_field_from_modes(lat, [((0, 0), 2.5)])
        assert np.allclose(to_physical(f), 2.5)


class TestMakeField:
    def test_empty_is_zero_and_real(self, lat4):
        f = make_field_from_modes(lat4, [])
        assert f.l2() == 0.0
        assert f.is_real

    def test_hermitian_pair_is_real_cosine(self, lat4):
        f = make_field_from_modes(lat4, [((1, 0), 1.0), ((-1, 0), 1.0)])
        assert f.is_real
        grid = to_physical(f)
        x = np.arange(lat4.grid_size) / lat4.grid_size
        assert np.allclose(grid.real, 2 * np.cos(2 * np.pi * x)[:, None], atol=1e-13)

    def test_unpaired_mode_not_real(self, lat4):
        f = make_field_from_modes(lat4, [((1, 0), 1.0)])
        assert not f.is_real

    def test_out_of_block_mode_rejected(self, lat4):
        with pytest.raises(IndexError):
            make_field_from_modes(lat4, [((5, 0), 1.0)])


class TestTransforms:
    def test_zero_round_trip(self, lat4):
        f = make_field_from_modes(lat4, [])
        assert np.all(to_physical(f) == 0)

    def test_round_trip_matches_direct_sum(self, lat8, rng):
        f = random_field(lat8, rng, alpha=1.0, real=True)
        grid = to_physical(f)
        assert np.max(np.abs(grid - dft_synthesis(f))) <= 1e-12 * f.l2()
        back = to_spectral(grid, lat8)
        assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-13 * np.max(np.abs(f.coeffs))

    def test_parseval(self, lat8, rng):
        f = random_field(lat8, rng, alpha=1.0, real=False)
        grid = to_physical(f)
        lhs = np.sum(np.abs(f.coeffs) ** 2)
        rhs = np.mean(np.abs(grid) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_dimension_mismatch(self, lat8):
        with pytest.raises(ValueError):
            to_spectral(np.zeros((8, 8)), lat8)

    @given(a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_linearity(self, a, b):
        lat = Lattice(4, 10, golden_omega())
        rng = np.random.default_rng(5)
        f = random_field(lat, rng, 1.0)
        g = random_field(lat, rng, 1.0)
        combo = to_physical(SpectralField(lat, a * f.coeffs + b * g.coeffs))
        assert np.allclose(combo, a * to_physical(f) + b * to_physical(g), atol=1e-10)


class TestProducts:
    def test_exponential_algebra(self, lat4):
        f = make_field_from_modes(lat4, [((1, 2), 1.0)])
        g = make_field_from_modes(lat4, [((2, -1), 1.0)])
        h = pointwise_multiply(f, g)
        assert h.coeff(3, 1) == pytest.approx(1.0)
        assert h.l2() == pytest.approx(1.0)
        # sum outside the block is dropped
        g2 = make_field_from_modes(lat4, [((4, 0), 1.0)])
        assert pointwise_multiply(f, g2).l2() == pytest.approx(0.0, abs=1e-15)

    def test_matches_convolution_oracle(self, lat4, rng):
        f = random_field(lat4, rng, alpha=0.5, real=True)
        g = random_field(lat4, rng, alpha=0.5, real=True)
        prod = pointwise_multiply(f, g)
        # exact linear convolution; the block sits at offset nmax in the
        # (4*nmax+1)^2 full product
        full = convolve2d(f.coeffs, g.coeffs)
        off = lat4.nmax
        expected = full[off:off + lat4.block_size, off:off + lat4.block_size]
        assert np.max(np.abs(prod.coeffs - expected)) <= 1e-12

    def test_zero_absorbs(self, lat4, rng):
        f = random_field(lat4, rng, alpha=0.5)
        z = make_field_from_modes(lat4, [])
        assert pointwise_multiply(f, z).l2() == 0.0

    def test_real_times_real_is_real(self, lat4, rng):
        f = random_field(lat4, rng, alpha=0.5, real=True)
        g = random_field(lat4, rng, alpha=0.5, real=True)
        assert pointwise_multiply(f, g).is_real

    def test_lattice_mismatch(self, lat4, lat8, rng):
        f = random_field(lat4, rng, alpha=0.5)
        g = random_field(lat8, rng, alpha=0.5)
        with pytest.raises(ValueError):
            pointwise_multiply(f, g)


class TestRandomFields:
    def test_seeded_reproducibility(self, lat4):
        a = random_field(lat4, np.random.default_rng(1), alpha=2.0)
        b = random_field(lat4, np.random.default_rng(1), alpha=2.0)
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_real_and_zero_mean_flags(self, lat4, rng):
        f = smooth_random_field(lat4, rng, real=True, zero_mean=True)
        assert f.is_real
        assert f.mean == 0.0
