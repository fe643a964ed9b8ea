"""Norms measured in the lab: Lp on the torus, anisotropic Sobolev,
data-space and solution-space norms, and mixed spacetime norms.

L-infinity is the grid maximum of the trigonometric interpolant samples,
not a certified supremum; for rough fields this is a (documented)
underestimate.  Time integrals use the composite trapezoid rule, matching
the second-order accuracy of the time-series diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import SpectralField, synthesize
from .multipliers import (
    apply_multiplier,
    bracket_dx,
    bracket_dy,
    bracket_nabla,
    d_x,
    d_x_inverse,
    d_y,
)

__all__ = [
    "NormSpec",
    "lp_norm",
    "anisotropic_norm",
    "y_norm",
    "x_norm",
    "sobolev_norm",
    "grad_sup",
    "mixed_spacetime_norm",
    "strichartz_norm",
]


def lp_norm(f: SpectralField, p: float) -> float:
    """Lp(T^2) norm by uniform-grid quadrature; p = inf is the grid max."""
    if p != math.inf and p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    vals = np.abs(synthesize(f))
    if p == math.inf:
        return float(vals.max(initial=0.0))
    if p == 2:
        # quadrature is exact for band-limited fields; use the stable form
        return float(np.sqrt(np.mean(vals ** 2)))
    return float(np.mean(vals ** p) ** (1.0 / p))


def anisotropic_norm(f: SpectralField, s1: float, s2: float, p: float = 2) -> float:
    """|<dx>^s1 u|_Lp + |<dy>^s2 u|_Lp."""
    return lp_norm(bracket_dx(f, s1), p) + lp_norm(bracket_dy(f, s2), p)


def y_norm(f: SpectralField, sigma: float) -> float:
    """|<grad>^sigma <dx> u|_L2 + |<grad>^sigma dx^{-1} u|_L2.

    The mean is annihilated by the tangential antiderivative, per the
    multiplier convention.
    """
    a = bracket_nabla(bracket_dx(f, 1.0), sigma)
    b = bracket_nabla(d_x_inverse(f), sigma)
    return a.l2() + b.l2()


def x_norm(f: SpectralField, s1: float, s2: float) -> float:
    """|(<dx>^s1 + <dy>^s2) u|_L2 + |<dy>^s2 dx^{-1} u|_L2.

    Note the first part applies the sum of the two bracket symbols as a
    single multiplier (not a sum of two norms).
    """
    lat = f.lattice
    sym = (1.0 + lat.xi1 ** 2) ** (s1 / 2.0) + (1.0 + lat.xi2 ** 2) ** (s2 / 2.0)
    return apply_multiplier(f, sym).l2() + bracket_dy(d_x_inverse(f), s2).l2()


def sobolev_norm(f: SpectralField, s: float) -> float:
    """Symmetric Sobolev norm in the anisotropic form |<dx>^s u| + |<dy>^s u|."""
    return anisotropic_norm(f, s, s, 2)


def grad_sup(f: SpectralField) -> float:
    """Grid maximum of |grad u| = sqrt(|du/dx|^2 + |du/dy|^2)."""
    gx = np.abs(synthesize(d_x(f)))
    gy = np.abs(synthesize(d_y(f)))
    return float(np.sqrt(gx ** 2 + gy ** 2).max(initial=0.0))


def _series(traj) -> tuple[np.ndarray, list]:
    """Accept a Trajectory-like object or a (times, fields) pair."""
    if hasattr(traj, "times") and hasattr(traj, "states"):
        return np.asarray(traj.times, dtype=float), list(traj.states)
    times, fields = traj
    return np.asarray(times, dtype=float), list(fields)


def time_lp(times: np.ndarray, values: np.ndarray, p: float) -> float:
    """Trapezoid Lp norm in time of per-slice nonnegative values."""
    if p == math.inf:
        return float(np.max(values, initial=0.0))
    return float(np.trapezoid(np.asarray(values, float) ** p, times) ** (1.0 / p))


def mixed_spacetime_norm(traj, p: float, q: float) -> float:
    """Mixed norm: Lp in time of the spatial Lq norms of the slices."""
    times, fields = _series(traj)
    if len(fields) < 2:
        raise ValueError("trajectory must carry at least 2 samples")
    vals = np.array([lp_norm(f, q) for f in fields])
    return time_lp(times, vals, p)


def strichartz_norm(traj) -> float:
    """L4-in-time of the sup norm plus sup-in-time of the L2 norm."""
    return (mixed_spacetime_norm(traj, 4, math.inf)
            + mixed_spacetime_norm(traj, math.inf, 2))


_KINDS = ("Lp", "Hs1s2p", "Y", "X", "mixed_spacetime", "strichartz")


@dataclass(frozen=True)
class NormSpec:
    """Declarative norm selector used by the command-line `norms` table."""

    kind: str
    p: float = 2.0
    q: float = 2.0
    s1: float = 0.0
    s2: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        for name in ("s1", "s2", "sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("p", "q"):
            v = getattr(self, name)
            if v != math.inf and v < 1:
                raise ValueError(f"{name} must lie in [1, inf]")

    def evaluate(self, target) -> float:
        if self.kind == "Lp":
            return lp_norm(target, self.p)
        if self.kind == "Hs1s2p":
            return anisotropic_norm(target, self.s1, self.s2, self.p)
        if self.kind == "Y":
            return y_norm(target, self.sigma)
        if self.kind == "X":
            return x_norm(target, self.s1, self.s2)
        if self.kind == "mixed_spacetime":
            return mixed_spacetime_norm(target, self.p, self.q)
        return strichartz_norm(target)
