"""Time evolution of the frequency-truncated model equations.

The evolved system is the projection of the dispersive equation to the
frequency box {|xi1|, |xi2| <= n}:

    BO:    u_t = -P_n H d_xx u + P_n d_x(P_n u * P_n u)
    KdV:   u_t = -P_n d_x^3 u  + P_n(P_n u * d_x P_n u)
    dNLS:  u_t =  i P_n d_xx u + P_n(P_n u * d_x P_n u)

a finite system of coupled mode ODEs.  The BO and KdV nonlinearities
differ by a factor-2 normalization (d_x(u^2) = 2 u u_x); cross-model
comparisons must not assume a shared normalization.  The linear part is
diagonal and unimodular, and the integrators treat it exactly.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field, replace

import numpy as np

from .fields import (
    FrequencyVector,
    Lattice,
    SpectralField,
    golden_omega,
)
from .multipliers import box_mask, dispersion_symbol
from .norms import grad_sup, lp_norm, sobolev_norm, x_norm, y_norm, anisotropic_norm

__all__ = [
    "SimulationConfig",
    "Trajectory",
    "ObservableSeries",
    "DivergedError",
    "rhs",
    "integrate",
    "observables",
    "observable_series",
    "regularize_initial_data",
    "default_delta",
    "galilean_normalize",
    "galilean_compare",
    "cauchy_study",
    "norm_growth_check",
    "convergence_study",
]

MODELS = ("BO", "KdV", "dNLS")
INTEGRATORS = ("IFRK4", "ETDRK4")

# Envelope constants for the norm-growth diagnostics, calibrated once over
# a held-out smooth ensemble (scripts/calibrate_growth_constant.py) and
# frozen here; see norm_growth_check.
GROWTH_C_X = 1.2638
GROWTH_C_SOBOLEV = 0.4324


class DivergedError(RuntimeError):
    """Raised when the state stops being finite; carries the last good slice."""

    def __init__(self, t: float, last_good: SpectralField):
        super().__init__(f"non-finite state at t = {t:.6g}")
        self.t = t
        self.last_good = last_good


@dataclass(frozen=True)
class SimulationConfig:
    model: str = "BO"
    nmax: int = 8
    grid_size: int = 32
    omega: FrequencyVector = field(default_factory=golden_omega)
    truncation: float | None = None      # frequency-box radius; None = capacity
    delta: float | None = None           # initial-data regularization scale
    s1: float = 5.0
    s2: float = 0.75
    sigma: float = 0.9
    t_end: float = 1.0
    dt: float = 1e-3
    integrator: str = "IFRK4"
    observable_cadence: int = 10
    seed: int = 0
    nonlinearity: bool = True

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.t_end <= 0:
            raise ValueError("t_end must be > 0")
        if self.observable_cadence < 1:
            raise ValueError("observable_cadence must be >= 1")
        lat = self.lattice
        if self.truncation is not None and self.truncation > lat.box_capacity() + 1e-12:
            raise ValueError(
                f"truncation {self.truncation} exceeds box capacity {lat.box_capacity():.6g}")
        if self.delta is not None and self.delta > self.box_radius + 1e-12:
            raise ValueError("data regularization delta must not exceed truncation")

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.nmax, self.grid_size, self.omega)

    @property
    def box_radius(self) -> float:
        if self.truncation is not None:
            return self.truncation
        return self.lattice.box_capacity()


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: list[SpectralField]
    config: SimulationConfig
    manifest: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states lengths differ")

    @property
    def initial(self) -> SpectralField:
        return self.states[0]


@dataclass(frozen=True)
class ObservableSeries:
    times: np.ndarray
    values: dict[str, np.ndarray]

    def column(self, name: str) -> np.ndarray:
        return self.values[name]


# ---------------------------------------------------------------------------
# right-hand side

def _synth(coeffs: np.ndarray, lattice: Lattice, size: int) -> np.ndarray:
    grid = np.zeros((size, size), dtype=np.complex128)
    idx = lattice.wrapped_index(size)
    grid[np.ix_(idx, idx)] = coeffs
    return np.fft.ifft2(grid) * size ** 2


def _crop(grid_spec: np.ndarray, lattice: Lattice) -> np.ndarray:
    idx = lattice.wrapped_index(grid_spec.shape[0])
    return grid_spec[np.ix_(idx, idx)]


def _nonlinear_term(model: str, lattice: Lattice, mask: np.ndarray):
    """Nonlinearity as a closure on raw coefficient arrays (box-projected
    inputs and output, dealiased product)."""
    size = max(lattice.dealias_grid_size(), lattice.grid_size)
    ixi1 = 1j * lattice.xi1

    if model == "BO":
        def nonlin(c: np.ndarray) -> np.ndarray:
            v = c * mask
            grid = _synth(v, lattice, size)
            spec = _crop(np.fft.fft2(grid * grid) / size ** 2, lattice)
            return mask * (ixi1 * spec)
    else:
        def nonlin(c: np.ndarray) -> np.ndarray:
            v = c * mask
            gv = _synth(v, lattice, size)
            gvx = _synth(ixi1 * v, lattice, size)
            spec = _crop(np.fft.fft2(gv * gvx) / size ** 2, lattice)
            return mask * spec
    return nonlin


def rhs(u: SpectralField, config: SimulationConfig) -> SpectralField:
    """Full right-hand side of the truncated equation at a state."""
    lat = u.lattice
    mask = box_mask(lat, config.box_radius)
    lam = -dispersion_symbol(lat, config.model)      # u_t = lam*u + N(u)
    linear = mask * (lam * u.coeffs)
    if not config.nonlinearity:
        return SpectralField(lat, linear)
    nonlin = _nonlinear_term(config.model, lat, mask)
    return SpectralField(lat, linear + nonlin(u.coeffs))


# ---------------------------------------------------------------------------
# integrators

def _etdrk4_coefficients(lam_dt: np.ndarray, n_contour: int = 32):
    """Contour-averaged coefficients; stable for symbols near zero."""
    r = np.exp(2j * np.pi * (np.arange(n_contour) + 0.5) / n_contour)
    z = lam_dt[..., None] + r
    ez = np.exp(z)
    q = ((np.exp(z / 2.0) - 1.0) / z).mean(axis=-1)
    f1 = ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z ** 3).mean(axis=-1)
    f2 = ((2.0 + z + ez * (-2.0 + z)) / z ** 3).mean(axis=-1)
    f3 = ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z ** 3).mean(axis=-1)
    return q, f1, f2, f3


def integrate(u0: SpectralField, config: SimulationConfig) -> Trajectory:
    """Fixed-step exponential integration of the truncated flow.

    The initial state is projected to the frequency box, where the flow
    is invariant; states are recorded every `observable_cadence` steps
    (the final time is always recorded).
    """
    if config.model in ("BO", "KdV") and not u0.is_real:
        raise ValueError(f"{config.model} evolves real fields; initial data is not real")
    lat = config.lattice
    if u0.lattice != lat:
        raise ValueError("initial data lattice does not match the configuration")

    mask = box_mask(lat, config.box_radius).astype(float)
    lam = -dispersion_symbol(lat, config.model)
    dt = config.dt
    n_steps = max(1, round(config.t_end / dt))
    nonlin = _nonlinear_term(config.model, lat, mask) if config.nonlinearity else None

    e_full = np.exp(lam * dt)
    e_half = np.exp(lam * dt / 2.0)
    if config.integrator == "ETDRK4" and nonlin is not None:
        q, f1, f2, f3 = _etdrk4_coefficients(lam * dt)
        q, f1, f2, f3 = (dt * q, dt * f1, dt * f2, dt * f3)

    c = u0.coeffs * mask
    times = [0.0]
    states = [SpectralField(lat, c.copy())]
    wall0 = _time.perf_counter()

    for k in range(1, n_steps + 1):
        if nonlin is None:
            c = e_full * c
        elif config.integrator == "IFRK4":
            a = nonlin(c)
            u1 = e_half * (c + (dt / 2.0) * a)
            b = nonlin(u1)
            u2 = e_half * c + (dt / 2.0) * b
            g = nonlin(u2)
            u3 = e_full * c + dt * (e_half * g)
            d = nonlin(u3)
            c = e_full * c + (dt / 6.0) * (e_full * a + 2.0 * e_half * (b + g) + d)
        else:
            nu = nonlin(c)
            a = e_half * c + q * nu
            na = nonlin(a)
            b = e_half * c + q * na
            nb = nonlin(b)
            g = e_half * a + q * (2.0 * nb - nu)
            ng = nonlin(g)
            c = e_full * c + f1 * nu + 2.0 * f2 * (na + nb) + f3 * ng

        if not np.all(np.isfinite(c)):
            raise DivergedError(k * dt, states[-1])
        if k % config.observable_cadence == 0 or k == n_steps:
            times.append(k * dt)
            states.append(SpectralField(lat, c.copy()))

    manifest = {
        "model": config.model,
        "integrator": config.integrator,
        "steps": n_steps,
        "dt": dt,
        "box_radius": config.box_radius,
        "wall_seconds": _time.perf_counter() - wall0,
        "commensurable_omega": config.omega.commensurability_flag(),
    }
    return Trajectory(np.array(times), states, config, manifest)


# ---------------------------------------------------------------------------
# conserved observables

def _square_coeffs(u: SpectralField, out_halfwidth: int) -> np.ndarray:
    """Exact coefficients of u^2 on the block [-out_halfwidth, out_halfwidth]^2."""
    lat = u.lattice
    m = 4 * lat.nmax + 2
    size = m + (m % 2)
    grid = _synth(u.coeffs, lat, size)
    spec = np.fft.fft2(grid * grid) / size ** 2
    idx = np.arange(-out_halfwidth, out_halfwidth + 1) % size
    return spec[np.ix_(idx, idx)]


def observables(u: SpectralField, truncation: float | None = None) -> dict[str, float]:
    """Conserved-quantity record {I1, I2, I3, I4, H_trunc} of a real field.

    All five are exact spectral quadratures of the torus integrals:

        I1 = int u
        I2 = int u^2
        I3 = int -1/2 u H u_x + 1/3 u^3
        I4 = int u^4 - 3 u^2 H u_x + 2 (u_x)^2
        H_trunc = I3 evaluated on the box projection of u

    The coefficients in I3 and I4 are the ones conserved by the flow
    u_t + H u_xx = d_x(u^2) with the sign convention H = -i(P+ - P-)
    (I3 is the generator of the truncated dynamics); H_trunc is the
    frequency-truncated version of I3.
    """
    if not u.is_real:
        raise ValueError("observables are defined for real fields")
    lat = u.lattice
    c = u.coeffs
    xi1 = lat.xi1

    i1 = float(u.mean.real)
    i2 = float(np.sum(np.abs(c) ** 2))

    sq_big = _square_coeffs(u, 2 * lat.nmax)           # full square support
    sq = _square_coeffs(u, lat.nmax)                   # block part, for cubics
    cubic = float(np.sum(sq * np.conj(c)).real)
    quad_momentum = float(np.sum(np.abs(xi1) * np.abs(c) ** 2))
    i3 = -0.5 * quad_momentum + cubic / 3.0

    quartic = float(np.sum(np.abs(sq_big) ** 2))
    hux = -1j * np.sign(xi1) * (1j * xi1) * c          # H u_x, symbol |xi1|
    cross = float(np.sum(sq * np.conj(hux)).real)
    ux_sq = float(np.sum(xi1 ** 2 * np.abs(c) ** 2))
    i4 = quartic - 3.0 * cross + 2.0 * ux_sq

    if truncation is None:
        h_trunc = i3
    else:
        v = SpectralField(lat, c * box_mask(lat, truncation))
        vsq = _square_coeffs(v, lat.nmax)
        h_trunc = (-0.5 * float(np.sum(np.abs(xi1) * np.abs(v.coeffs) ** 2))
                   + float(np.sum(vsq * np.conj(v.coeffs)).real) / 3.0)

    return {"I1": i1, "I2": i2, "I3": i3, "I4": i4, "H_trunc": h_trunc}


def observable_series(traj: Trajectory) -> ObservableSeries:
    """Per-slice conserved quantities and diagnostic norms."""
    cfg = traj.config
    names = ("I1", "I2", "I3", "I4", "H_trunc", "L2", "Linf", "Hs1s2", "X", "Y")
    cols: dict[str, list[float]] = {k: [] for k in names}
    for u in traj.states:
        obs = observables(u, cfg.box_radius)
        for k in ("I1", "I2", "I3", "I4", "H_trunc"):
            cols[k].append(obs[k])
        cols["L2"].append(u.l2())
        cols["Linf"].append(lp_norm(u, math.inf))
        cols["Hs1s2"].append(anisotropic_norm(u, cfg.s1, cfg.s2, 2))
        cols["X"].append(x_norm(u, cfg.s1, cfg.s2))
        cols["Y"].append(y_norm(u, cfg.sigma))
    return ObservableSeries(traj.times, {k: np.array(v) for k, v in cols.items()})


# ---------------------------------------------------------------------------
# initial data handling

def default_delta(n: float, beta: float = 0.5) -> float:
    """Data-regularization schedule delta(n) = n^beta (beta = 1/2 default)."""
    return float(n) ** beta


def regularize_initial_data(u0: SpectralField, delta: float,
                            s1: float, s2: float) -> SpectralField:
    """Sharp box projection with thresholds (delta^(1/s1), delta^(1/s2))."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    from .multipliers import project_box
    q = delta ** (1.0 / s1) if delta > 0 else 0.0
    r = delta ** (1.0 / s2) if delta > 0 else 0.0
    return project_box(u0, q, r)


def galilean_normalize(u0: SpectralField) -> tuple[SpectralField, float]:
    """Split off the mean: returns (u0 - a, a) with a the real mean."""
    if not u0.is_real:
        raise ValueError("mean removal is defined for real fields")
    a = float(u0.mean.real)
    c = u0.coeffs.copy()
    c[u0.lattice.nmax, u0.lattice.nmax] -= a
    return SpectralField(u0.lattice, c), a


def _boost_speed(model: str, a: float) -> float:
    # d_x(u^2) = 2 u u_x, so the BO mean travels twice as fast as for the
    # u u_x-normalized models.
    return 2.0 * a if model == "BO" else a


def galilean_compare(traj_u: Trajectory, traj_v: Trajectory, a: float) -> float:
    """Max L2 deviation between the boosted mean-a run and the mean-zero run.

    Applies to each slice of traj_u the tangential translation by the
    boost displacement (phase exp(-i*speed*t*xi1) per mode) and the -a
    shift, then measures the L2 distance to the matching slice of traj_v.
    """
    if len(traj_u.times) != len(traj_v.times) or not np.allclose(
            traj_u.times, traj_v.times):
        raise ValueError("trajectories must share their sample times")
    lat = traj_u.config.lattice
    speed = _boost_speed(traj_u.config.model, a)
    k = lat.nmax
    worst = 0.0
    for t, su, sv in zip(traj_u.times, traj_u.states, traj_v.states):
        shifted = su.coeffs * np.exp(-1j * speed * t * lat.xi1)
        shifted[k, k] -= a
        worst = max(worst, float(np.linalg.norm(shifted - sv.coeffs)))
    return worst


# ---------------------------------------------------------------------------
# studies

@dataclass(frozen=True)
class CauchyPair:
    n_fine: float
    n_coarse: float
    times: np.ndarray
    l2: np.ndarray
    hs: np.ndarray


@dataclass(frozen=True)
class CauchyStudy:
    pairs: list[CauchyPair]

    @property
    def max_l2(self) -> list[float]:
        return [float(p.l2.max()) for p in self.pairs]

    @property
    def monotone(self) -> bool:
        m = self.max_l2
        return all(b < a for a, b in zip(m, m[1:]))


def cauchy_study(u0: SpectralField, truncations: list[float], t_end: float,
                 config: SimulationConfig, beta: float = 0.5) -> CauchyStudy:
    """Pairwise distances between runs at increasing truncation radii.

    Each run starts from the box-regularized data with delta(n) = n^beta
    and evolves under the same lattice and step; distances are reported
    for consecutive pairs in both L2 and the anisotropic norm.
    """
    if any(b <= a for a, b in zip(truncations, truncations[1:])):
        raise ValueError("truncations must be strictly increasing")
    trajs = {}
    for n in truncations:
        cfg = replace(config, truncation=float(n), delta=default_delta(n, beta),
                      t_end=t_end)
        data = regularize_initial_data(u0, cfg.delta, cfg.s1, cfg.s2)
        trajs[n] = integrate(data, cfg)
    pairs = []
    for m, n in zip(truncations, truncations[1:]):
        tm, tn = trajs[m], trajs[n]
        l2 = np.array([(fn - fm).l2() for fn, fm in zip(tn.states, tm.states)])
        hs = np.array([anisotropic_norm(fn - fm, config.s1, config.s2, 2)
                       for fn, fm in zip(tn.states, tm.states)])
        pairs.append(CauchyPair(n, m, tn.times, l2, hs))
    return CauchyStudy(pairs)


def growth_envelope_ratios(traj: Trajectory, norm_fn, weight_fn, c: float) -> np.ndarray:
    """ratio(t) = N(u(t)) / (N(u0) * exp(c * int_0^t weight(u))).

    Zero initial data yields an identically-zero ratio series (the bound
    0 <= anything holds trivially).
    """
    norms = np.array([norm_fn(u) for u in traj.states])
    if norms[0] == 0.0:
        return np.zeros_like(norms)
    w = np.array([weight_fn(u) for u in traj.states])
    integral = np.concatenate(
        ([0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(traj.times))))
    return norms / (norms[0] * np.exp(c * integral))


def norm_growth_check(traj: Trajectory, s1: float, s2: float,
                      c: float = GROWTH_C_X) -> tuple[np.ndarray, bool]:
    """Solution-norm growth against the exponential envelope
    exp(c * int (|u|_inf + |u_x|_inf)); flags ratios above 1 + 1e-6."""
    from .multipliers import d_x

    def xnorm(u):
        return x_norm(u, s1, s2)

    def weight(u):
        return lp_norm(u, math.inf) + lp_norm(d_x(u), math.inf)

    ratios = growth_envelope_ratios(traj, xnorm, weight, c)
    return ratios, bool(np.all(ratios <= 1.0 + 1e-6))


def sobolev_growth_check(traj: Trajectory, s: float,
                         c: float = GROWTH_C_SOBOLEV) -> tuple[np.ndarray, bool]:
    """Symmetric-Sobolev variant with |grad u|_inf in the exponent."""
    ratios = growth_envelope_ratios(
        traj, lambda u: sobolev_norm(u, s), grad_sup, c)
    return ratios, bool(np.all(ratios <= 1.0 + 1e-6))


def convergence_study(u0: SpectralField, config: SimulationConfig,
                      dts: list[float]) -> list[float]:
    """Self-convergence ratios |u_dt - u_dt/2| / |u_dt/2 - u_dt/4| at t_end.

    Fourth-order stepping gives ratios near 16 per halving.
    """
    finals = []
    for dt in dts:
        traj = integrate(u0, replace(config, dt=dt))
        finals.append(traj.states[-1])
    diffs = [(a - b).l2() for a, b in zip(finals, finals[1:])]
    return [d1 / d2 for d1, d2 in zip(diffs, diffs[1:])]
