"""Directional Fourier multiplier operators.

Every operator here is diagonal on the mode block: it multiplies the
coefficient at mode n by a symbol evaluated at the directional
frequencies (xi1, xi2) = (omega.n, omega_perp.n).  Symbols are taken in
these coordinates throughout, so the derivative along omega is i*xi1,
the smooth cutoffs live on the xi1 axis, and all operators commute.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .fields import Lattice, SpectralField

__all__ = [
    "CutoffProfile",
    "SymbolTable",
    "apply_multiplier",
    "d_x",
    "d_y",
    "d_x_inverse",
    "bracket_dx",
    "bracket_dy",
    "bracket_nabla",
    "hilbert",
    "project",
    "project_box",
    "schrodinger_propagator",
    "dispersion_propagator",
]

log = logging.getLogger(__name__)

#: |xi1| below this triggers a small-divisor warning in d_x_inverse.
SMALL_DIVISOR_WARN = 1e-8

PROJECTION_KINDS = ("+hi", "-hi", "lo", "+HI", "-HI", "LO", "+", "-")


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t<=0, 1 for t>=1, strictly monotone between."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(1.0 - t > 0.0,
                     np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    out = np.zeros_like(t)
    interior = (t > 0.0) & (t < 1.0)
    out[interior] = a[interior] / (a[interior] + b[interior])
    out[t >= 1.0] = 1.0
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """Smooth monotone profile rho with rho=0 on (-inf,1/2], rho=1 on [2,inf).

    The default maps x through the standard smooth step on (1/2, 2); the
    support endpoints are met exactly, which makes the support statements
    of the smooth projections exact rather than approximate.
    """

    lo: float = 0.5
    hi: float = 2.0
    step: Callable[[np.ndarray], np.ndarray] = dc_field(default=_smooth_step)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.step((x - self.lo) / (self.hi - self.lo))


@dataclass(frozen=True)
class SymbolTable:
    """Named symbols for the directional cutoff family on a lattice.

    The small family (+hi, lo, -hi) cuts at tangential frequency scales
    1/2 and 2; the capital family (+HI, LO, -HI) is the same profile
    dilated by 4.  Both families form exact partitions of unity.
    """

    profile: CutoffProfile = dc_field(default_factory=CutoffProfile)

    def psi(self, kind: str, xi1: np.ndarray) -> np.ndarray:
        rho = self.profile
        if kind == "+hi":
            return rho(xi1)
        if kind == "-hi":
            return rho(-xi1)
        if kind == "lo":
            return 1.0 - rho(xi1) - rho(-xi1)
        if kind == "+HI":
            return rho(xi1 / 4.0)
        if kind == "-HI":
            return rho(-xi1 / 4.0)
        if kind == "LO":
            return 1.0 - rho(xi1 / 4.0) - rho(-xi1 / 4.0)
        if kind == "+":
            return (xi1 > 0.0).astype(float)
        if kind == "-":
            return (xi1 < 0.0).astype(float)
        raise ValueError(f"unknown projection kind {kind!r}")

    def dump_rows(self, lattice: Lattice) -> list[tuple]:
        """Audit rows (n1, n2, xi1, xi2, psi_+hi, psi_lo, psi_-hi, psi_+HI, psi_LO, psi_-HI)."""
        rows = []
        kinds = ("+hi", "lo", "-hi", "+HI", "LO", "-HI")
        tables = [self.psi(k, lattice.xi1) for k in kinds]
        k = lattice.nmax
        for i in range(lattice.block_size):
            for j in range(lattice.block_size):
                rows.append((i - k, j - k,
                             float(lattice.xi1[i, j]), float(lattice.xi2[i, j]),
                             *(float(t[i, j]) for t in tables)))
        return rows


DEFAULT_SYMBOLS = SymbolTable()


def apply_multiplier(f: SpectralField, symbol) -> SpectralField:
    """Multiply coefficients by a symbol (array over the block, or callable
    of the integer mode (n1, n2))."""
    if callable(symbol):
        lat = f.lattice
        table = np.empty(lat.shape, dtype=np.complex128)
        for i in range(lat.block_size):
            for j in range(lat.block_size):
                table[i, j] = symbol(i - lat.nmax, j - lat.nmax)
    else:
        table = np.asarray(symbol)
        if table.shape != f.lattice.shape:
            raise ValueError("symbol table shape does not match the block")
    return SpectralField(f.lattice, f.coeffs * table)


def d_x(f: SpectralField) -> SpectralField:
    """Tangential derivative, symbol i*xi1."""
    return apply_multiplier(f, 1j * f.lattice.xi1)


def d_y(f: SpectralField) -> SpectralField:
    """Normal derivative, symbol i*xi2."""
    return apply_multiplier(f, 1j * f.lattice.xi2)


def d_x_inverse(f: SpectralField) -> SpectralField:
    """Mean-zero tangential primitive, symbol 1/(i*xi1) away from n=0.

    The mean is annihilated (documented behaviour, not an error).  Modes
    with a tiny but nonzero tangential frequency are inverted exactly;
    a warning is logged when |xi1| < 1e-8 since the small-divisor growth
    is then significant.
    """
    lat = f.lattice
    xi1 = lat.xi1
    nonzero_mode = (lat.n1 != 0) | (lat.n2 != 0)
    tiny = nonzero_mode & (np.abs(xi1) < SMALL_DIVISOR_WARN)
    if np.any(tiny & (np.abs(f.coeffs) > 0)):
        log.warning("d_x_inverse hit %d modes with |xi1| < %.1e",
                    int(np.count_nonzero(tiny)), SMALL_DIVISOR_WARN)
    sym = np.zeros(lat.shape, dtype=np.complex128)
    np.divide(1.0, 1j * xi1, out=sym, where=nonzero_mode & (xi1 != 0.0))
    return apply_multiplier(f, sym)


def _require_nonneg(order: float, name: str) -> None:
    if order < 0:
        raise ValueError(f"{name} must be >= 0, got {order}")


def bracket_dx(f: SpectralField, s: float) -> SpectralField:
    """Inhomogeneous tangential bracket, symbol (1+xi1^2)^(s/2)."""
    _require_nonneg(s, "order s")
    return apply_multiplier(f, (1.0 + f.lattice.xi1 ** 2) ** (s / 2.0))


def bracket_dy(f: SpectralField, s: float) -> SpectralField:
    """Inhomogeneous normal bracket, symbol (1+xi2^2)^(s/2)."""
    _require_nonneg(s, "order s")
    return apply_multiplier(f, (1.0 + f.lattice.xi2 ** 2) ** (s / 2.0))


def bracket_nabla(f: SpectralField, sigma: float) -> SpectralField:
    """Isotropic bracket, symbol (1+xi1^2+xi2^2)^(sigma/2)."""
    _require_nonneg(sigma, "order sigma")
    lat = f.lattice
    return apply_multiplier(f, (1.0 + lat.xi1 ** 2 + lat.xi2 ** 2) ** (sigma / 2.0))


def abs_dx(f: SpectralField, s: float) -> SpectralField:
    """Homogeneous tangential derivative |xi1|^s."""
    _require_nonneg(s, "order s")
    return apply_multiplier(f, np.abs(f.lattice.xi1) ** s)


def abs_nabla(f: SpectralField, s: float) -> SpectralField:
    """Homogeneous isotropic derivative (xi1^2+xi2^2)^(s/2)."""
    _require_nonneg(s, "order s")
    lat = f.lattice
    return apply_multiplier(f, (lat.xi1 ** 2 + lat.xi2 ** 2) ** (s / 2.0))


def hilbert(f: SpectralField) -> SpectralField:
    """Directional Hilbert transform, symbol -i*sign(xi1), sign(0) = 0.

    Equivalently -i*(P+ - P-); the xi1 = 0 fiber is annihilated.
    """
    return apply_multiplier(f, -1j * np.sign(f.lattice.xi1))


def project(f: SpectralField, kind: str,
            symbols: SymbolTable = DEFAULT_SYMBOLS) -> SpectralField:
    """Directional cutoff projection; kind in {+hi,-hi,lo,+HI,-HI,LO,+,-}."""
    return apply_multiplier(f, symbols.psi(kind, f.lattice.xi1))


def project_box(f: SpectralField, q: float, r: float) -> SpectralField:
    """Sharp projection to the frequency box {|xi1| <= q, |xi2| <= r}."""
    if q < 0 or r < 0:
        raise ValueError("box thresholds must be >= 0")
    lat = f.lattice
    keep = (np.abs(lat.xi1) <= q) & (np.abs(lat.xi2) <= r)
    return apply_multiplier(f, keep.astype(float))


def box_mask(lattice: Lattice, q: float, r: float | None = None) -> np.ndarray:
    """Boolean mask of the frequency box {|xi1| <= q, |xi2| <= r}."""
    r = q if r is None else r
    return (np.abs(lattice.xi1) <= q) & (np.abs(lattice.xi2) <= r)


def schrodinger_propagator(f: SpectralField, t: float) -> SpectralField:
    """Free propagator of the tangential Schroedinger flow, symbol
    exp(-i t xi1^2); an isometry on the coefficient l2 norm."""
    if not math.isfinite(t):
        raise ValueError("propagation time must be finite")
    return apply_multiplier(f, np.exp(-1j * t * f.lattice.xi1 ** 2))


def dispersion_symbol(lattice: Lattice, model: str) -> np.ndarray:
    """Diagonal generator L(n) of the linear flow u_t + L u = 0.

    BO:   L = i*xi1*|xi1|   (from the composition of the Hilbert transform
                             with the second tangential derivative)
    KdV:  L = -i*xi1^3      (third tangential derivative)
    dNLS: L = i*xi1^2       (the linear part is the Schroedinger flow, so
                             the propagator is exp(-i t xi1^2))
    """
    xi1 = lattice.xi1
    if model == "BO":
        return 1j * xi1 * np.abs(xi1)
    if model == "KdV":
        return -1j * xi1 ** 3
    if model == "dNLS":
        return 1j * xi1 ** 2
    raise ValueError(f"unknown model {model!r}")


def dispersion_propagator(f: SpectralField, t: float, model: str = "BO") -> SpectralField:
    """Exact linear flow exp(-t L) for the chosen model; an l2 isometry."""
    if not math.isfinite(t):
        raise ValueError("propagation time must be finite")
    return apply_multiplier(f, np.exp(-t * dispersion_symbol(f.lattice, model)))
