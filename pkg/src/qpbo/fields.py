"""Spectral representation of functions on the 2-torus.

A function is stored by its Fourier coefficients on the symmetric mode
block [-nmax, nmax]^2, with the convention

    u(x) = sum_n  c(n) exp(2*pi*i n.x),      c(n) = uhat(n),

so the forward transform carries the 1/G^2 factor and coefficients equal
the analytic Fourier coefficients of the trigonometric interpolant.
Frequencies are measured in the direction of a fixed vector omega:
xi1 = omega.n (tangential) and xi2 = omega_perp.n (normal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FrequencyVector",
    "Lattice",
    "SpectralField",
    "golden_omega",
    "make_field_from_modes",
    "to_physical",
    "to_spectral",
    "pointwise_multiply",
    "random_field",
    "smooth_random_field",
]

#: Tolerance (relative to coefficient scale) for Hermitian-symmetry detection.
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyVector:
    """Direction vector omega on R^2 defining tangential/normal frequencies."""

    omega: tuple[float, float]

    def __post_init__(self):
        w1, w2 = self.omega
        if w1 == 0.0 and w2 == 0.0:
            raise ValueError("frequency vector must be nonzero")

    @property
    def omega_perp(self) -> tuple[float, float]:
        w1, w2 = self.omega
        return (w2, -w1)

    @property
    def norm(self) -> float:
        return math.hypot(*self.omega)

    def xi1(self, n1: int, n2: int) -> float:
        """Tangential frequency omega.n of a mode."""
        return self.omega[0] * n1 + self.omega[1] * n2

    def xi2(self, n1: int, n2: int) -> float:
        """Normal frequency omega_perp.n of a mode."""
        return self.omega[1] * n1 - self.omega[0] * n2

    def commensurability_flag(self, max_denominator: int = 1 << 16,
                              tol: float = 1e-12) -> bool:
        """True when omega1/omega2 is (numerically) a small rational.

        Advisory only: incommensurable entries are the intended regime,
        commensurable vectors are accepted but flagged in run manifests.
        """
        from fractions import Fraction

        w1, w2 = self.omega
        if w1 == 0.0 or w2 == 0.0:
            return True
        ratio = w1 / w2
        approx = Fraction(ratio).limit_denominator(max_denominator)
        return abs(ratio - float(approx)) <= tol * max(1.0, abs(ratio))


def golden_omega() -> FrequencyVector:
    """Default unit frequency vector (1, 1/phi)/|(1, 1/phi)|.

    The ratio of the entries is the golden ratio, the badly approximable
    number par excellence, and |omega| = 1 so that the isotropic bracket
    coincides with the Euclidean one.
    """
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    v = np.array([1.0, 1.0 / phi])
    v = v / np.linalg.norm(v)
    return FrequencyVector((float(v[0]), float(v[1])))


@dataclass(frozen=True)
class Lattice:
    """Mode block [-nmax, nmax]^2 plus the physical grid used for FFTs."""

    nmax: int
    grid_size: int
    freq: FrequencyVector
    # derived mode/frequency tables, excluded from comparison
    n1: np.ndarray = field(init=False, repr=False, compare=False)
    n2: np.ndarray = field(init=False, repr=False, compare=False)
    xi1: np.ndarray = field(init=False, repr=False, compare=False)
    xi2: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.nmax < 0:
            raise ValueError("nmax must be >= 0")
        if self.grid_size % 2 != 0 or self.grid_size < 2 * self.nmax + 1:
            raise ValueError(
                f"grid_size must be even and >= 2*nmax+1, got {self.grid_size}")
        m = np.arange(-self.nmax, self.nmax + 1)
        n1, n2 = np.meshgrid(m, m, indexing="ij")
        w1, w2 = self.freq.omega
        object.__setattr__(self, "n1", n1)
        object.__setattr__(self, "n2", n2)
        object.__setattr__(self, "xi1", w1 * n1 + w2 * n2)
        object.__setattr__(self, "xi2", w2 * n1 - w1 * n2)

    @property
    def block_size(self) -> int:
        return 2 * self.nmax + 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.block_size, self.block_size)

    @property
    def modes_abs(self) -> np.ndarray:
        """Euclidean mode magnitudes |n| over the block."""
        return np.hypot(self.n1, self.n2)

    def box_capacity(self) -> float:
        """Largest q such that the frequency box {|xi1|,|xi2| <= q} fits."""
        return self.nmax * self.freq.norm / math.sqrt(2.0)

    def dealias_grid_size(self) -> int:
        """Smallest even grid holding a quadratic product exactly."""
        m = 4 * self.nmax + 2
        return m + (m % 2)

    def wrapped_index(self, size: int) -> np.ndarray:
        """FFT indices of block modes on a size**2 grid (must not collide)."""
        if size < self.block_size:
            raise ValueError("grid too small for the mode block")
        return np.arange(-self.nmax, self.nmax + 1) % size

    def contains(self, n1: int, n2: int) -> bool:
        return abs(n1) <= self.nmax and abs(n2) <= self.nmax


def _is_hermitian(coeffs: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(coeffs))) if coeffs.size else 1.0)
    flipped = np.conj(coeffs[::-1, ::-1])
    return bool(np.max(np.abs(coeffs - flipped)) <= HERMITIAN_TOL * scale)


@dataclass(frozen=True)
class SpectralField:
    """Immutable complex coefficient array over a lattice block."""

    lattice: Lattice
    coeffs: np.ndarray = field(repr=False, compare=False)
    is_real: bool = field(default=False, compare=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.lattice.shape:
            raise ValueError(
                f"coefficient shape {c.shape} does not match block {self.lattice.shape}")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "is_real", _is_hermitian(c))

    def coeff(self, n1: int, n2: int) -> complex:
        if not self.lattice.contains(n1, n2):
            raise IndexError(f"mode ({n1}, {n2}) outside block")
        k = self.lattice.nmax
        return complex(self.coeffs[n1 + k, n2 + k])

    @property
    def mean(self) -> complex:
        k = self.lattice.nmax
        return complex(self.coeffs[k, k])

    def l2(self) -> float:
        """Coefficient l2 norm, equal to the L2(T^2) norm by Parseval."""
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _require_same_lattice(self, other)
        return SpectralField(self.lattice, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _require_same_lattice(self, other)
        return SpectralField(self.lattice, self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "SpectralField":
        return SpectralField(self.lattice, self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.lattice, -self.coeffs)


def _require_same_lattice(f: SpectralField, g: SpectralField) -> None:
    if f.lattice != g.lattice:
        raise ValueError("fields live on different lattices")


def zero_field(lattice: Lattice) -> SpectralField:
    return SpectralField(lattice, np.zeros(lattice.shape, dtype=np.complex128))


def make_field_from_modes(lattice: Lattice,
                          modes: "list[tuple[tuple[int, int], complex]]") -> SpectralField:
    """Build a field from explicit (mode, amplitude) pairs.

    Raises IndexError for a mode outside the block.  The reality flag is
    set from the Hermitian symmetry of the resulting coefficients.
    """
    c = np.zeros(lattice.shape, dtype=np.complex128)
    k = lattice.nmax
    for (n1, n2), amp in modes:
        if not lattice.contains(n1, n2):
            raise IndexError(f"mode ({n1}, {n2}) outside block [-{k}, {k}]^2")
        c[n1 + k, n2 + k] += amp
    return SpectralField(lattice, c)


def _embed(coeffs: np.ndarray, lattice: Lattice, size: int) -> np.ndarray:
    grid = np.zeros((size, size), dtype=np.complex128)
    idx = lattice.wrapped_index(size)
    grid[np.ix_(idx, idx)] = coeffs
    return grid


def _extract(fullspec: np.ndarray, lattice: Lattice) -> np.ndarray:
    idx = lattice.wrapped_index(fullspec.shape[0])
    return fullspec[np.ix_(idx, idx)]


def synthesize(f: SpectralField, size: int | None = None) -> np.ndarray:
    """Samples of the trigonometric interpolant on a size**2 uniform grid."""
    size = size or f.lattice.grid_size
    return np.fft.ifft2(_embed(f.coeffs, f.lattice, size)) * size ** 2


def to_physical(f: SpectralField) -> np.ndarray:
    """Physical grid samples on the lattice's own grid."""
    return synthesize(f, f.lattice.grid_size)


def to_spectral(grid: np.ndarray, lattice: Lattice) -> SpectralField:
    """Coefficients of the grid samples, restricted to the block."""
    grid = np.asarray(grid)
    if grid.shape != (lattice.grid_size, lattice.grid_size):
        raise ValueError(
            f"grid shape {grid.shape} does not match ({lattice.grid_size},)*2")
    spec = np.fft.fft2(grid) / grid.size
    return SpectralField(lattice, _extract(spec, lattice))


def analyze(grid: np.ndarray, lattice: Lattice) -> SpectralField:
    """Like to_spectral but for an arbitrary square grid >= the block."""
    spec = np.fft.fft2(grid) / grid.size
    return SpectralField(lattice, _extract(spec, lattice))


def pointwise_multiply(f: SpectralField, g: SpectralField,
                       dealias: bool = True) -> SpectralField:
    """Coefficients of the pointwise product f*g restricted to the block.

    With dealias=True the product is evaluated on a grid large enough to
    hold every quadratic interaction, so retained modes carry no aliased
    contamination; with dealias=False the native grid is used.
    """
    _require_same_lattice(f, g)
    size = f.lattice.dealias_grid_size() if dealias else f.lattice.grid_size
    size = max(size, f.lattice.grid_size) if dealias else size
    fa = synthesize(f, size)
    gb = synthesize(g, size)
    spec = np.fft.fft2(fa * gb) / size ** 2
    return SpectralField(f.lattice, _extract(spec, f.lattice))


def random_field(lattice: Lattice, rng: np.random.Generator, alpha: float,
                 real: bool = True, zero_mean: bool = False,
                 amplitude: float = 1.0) -> SpectralField:
    """Random field with polynomially decaying coefficient envelope.

    Coefficient magnitudes follow amplitude * (1+|n|)^(-alpha) * |N(0,1)|
    with independent uniform phases; Hermitian symmetrization is applied
    when a real field is requested.
    """
    env = amplitude * (1.0 + lattice.modes_abs) ** (-alpha)
    return _randomize(lattice, rng, env, real, zero_mean)


def smooth_random_field(lattice: Lattice, rng: np.random.Generator,
                        decay: float = 0.7, real: bool = True,
                        zero_mean: bool = False,
                        amplitude: float = 1.0) -> SpectralField:
    """Random field with exponentially decaying coefficient envelope."""
    env = amplitude * np.exp(-decay * lattice.modes_abs)
    return _randomize(lattice, rng, env, real, zero_mean)


def _randomize(lattice: Lattice, rng: np.random.Generator, envelope: np.ndarray,
               real: bool, zero_mean: bool) -> SpectralField:
    mags = envelope * np.abs(rng.standard_normal(lattice.shape))
    phases = rng.uniform(0.0, 2.0 * np.pi, lattice.shape)
    c = mags * np.exp(1j * phases)
    if real:
        c = 0.5 * (c + np.conj(c[::-1, ::-1]))
    if zero_mean:
        c[lattice.nmax, lattice.nmax] = 0.0
    return SpectralField(lattice, c)
