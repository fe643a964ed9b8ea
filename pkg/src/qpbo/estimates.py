"""Randomized verification of the inequality arsenal as ratio statistics.

Each check draws an ensemble of random fields, evaluates the left and
right sides of one inequality, and reports the per-sample ratio together
with summary statistics.  Nothing is proven: for inequalities with an
unspecified constant the useful signal is stability of the max ratio
under grid refinement; for the two paraproduct bounds the constant is
one and the max ratio must stay within discretization slack of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .fields import Lattice, SpectralField, analyze, random_field, synthesize
from .multipliers import (
    abs_dx,
    abs_nabla,
    apply_multiplier,
    bracket_dx,
    bracket_dy,
    bracket_nabla,
    d_x,
    project,
    schrodinger_propagator,
)
from .norms import anisotropic_norm, lp_norm, time_lp

__all__ = [
    "EnsembleSpec",
    "RatioReport",
    "embedding_ratio",
    "crucial_ratio",
    "kato_ponce_ratio",
    "kpv_ratio",
    "paraproduct1_ratio",
    "paraproduct2_ratio",
    "chain_rule_ratio",
    "strichartz_ratio",
    "growth_bound_check",
    "refinement_pair",
    "INEQUALITIES",
]

#: Samples whose denominator falls below this times the data scale are
#: skipped and counted rather than producing spurious ratios.
DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class EnsembleSpec:
    """Reproducible random-field ensemble over a lattice.

    Coefficient magnitudes decay like (1+|n|)^(-alpha) with Gaussian
    amplitudes and uniform phases; reality requests Hermitian symmetry.
    """

    count: int
    alpha: float
    lattice: Lattice
    seed: int = 0
    real: bool = True
    zero_mean: bool = False

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("ensemble count must be >= 1")

    def rng(self) -> np.random.Generator:
        # the lattice size participates so a refinement pair gets its own
        # well-defined stream at each resolution
        return np.random.default_rng(
            np.random.SeedSequence([self.seed, self.lattice.nmax]))

    def fields(self):
        rng = self.rng()
        for _ in range(self.count):
            yield random_field(self.lattice, rng, self.alpha,
                               real=self.real, zero_mean=self.zero_mean)


@dataclass(frozen=True)
class RatioReport:
    inequality: str
    params: dict
    nmax: int
    ratios: np.ndarray
    skipped: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        r = np.asarray(self.ratios, dtype=float)
        if r.size and (not np.all(np.isfinite(r)) or np.any(r < 0)):
            raise ValueError("ratios must be finite and nonnegative")
        object.__setattr__(self, "ratios", r)

    @property
    def max(self) -> float:
        return float(self.ratios.max(initial=0.0))

    @property
    def mean(self) -> float:
        return float(self.ratios.mean()) if self.ratios.size else 0.0

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.ratios, q)) if self.ratios.size else 0.0

    def summary(self) -> dict:
        return {
            "inequality": self.inequality,
            "params": dict(self.params),
            "nmax": self.nmax,
            "count": int(self.ratios.size),
            "skipped": self.skipped,
            "max": self.max,
            "mean": self.mean,
            "q50": self.quantile(0.5),
            "q90": self.quantile(0.9),
            **self.extra,
        }


def _collect(spec: EnsembleSpec, name: str, params: dict, pair_fn,
             extra: dict | None = None) -> RatioReport:
    ratios, skipped = [], 0
    for f in spec.fields():
        num, den, scale = pair_fn(f)
        if den <= DENOM_FLOOR * max(1.0, scale):
            skipped += 1
            continue
        ratios.append(num / den)
    return RatioReport(name, params, spec.lattice.nmax, np.array(ratios),
                       skipped, extra or {})


# ---------------------------------------------------------------------------
# embeddings (sup-norm against anisotropic regularity)

def embedding_ratio(spec: EnsembleSpec, s1: float, s2: float) -> RatioReport:
    """|u|_inf / |u|_{H^{s1,s2}}; bounded when s1,s2 > 1/2, 1/s1+1/s2 < 2."""
    def pair(f):
        den = anisotropic_norm(f, s1, s2, 2)
        return lp_norm(f, math.inf), den, f.l2()
    return _collect(spec, "embedding", {"s1": s1, "s2": s2}, pair)


def crucial_ratio(spec: EnsembleSpec, s1: float, s2: float) -> RatioReport:
    """|u_x|_inf / |u|_{H^{s1,s2}}; bounded when s2 > 1/2, s1 > 3s2/(2s2-1)."""
    def pair(f):
        den = anisotropic_norm(f, s1, s2, 2)
        return lp_norm(d_x(f), math.inf), den, f.l2()
    return _collect(spec, "crucial", {"s1": s1, "s2": s2}, pair)


# ---------------------------------------------------------------------------
# commutators

def _pair_fields(spec: EnsembleSpec):
    rng = spec.rng()
    for _ in range(spec.count):
        f = random_field(spec.lattice, rng, spec.alpha, real=spec.real)
        g = random_field(spec.lattice, rng, spec.alpha, real=spec.real)
        yield f, g


def _commutator(f: SpectralField, g: SpectralField, bracket) -> SpectralField:
    from .fields import pointwise_multiply
    return bracket(pointwise_multiply(f, g)) - pointwise_multiply(f, bracket(g))


def kato_ponce_ratio(spec: EnsembleSpec, s1: float, p: float) -> RatioReport:
    """Tangential commutator bound, s1 >= 1 and 2 <= p < inf:

    |[<dx>^s1, f]g|_p <= |<dx>^s1 f|_p |g|_inf + |f_x|_inf |<dx>^{s1-1} g|_p.
    """
    if s1 < 1:
        raise ValueError("s1 must be >= 1")
    if not (2 <= p < math.inf):
        raise ValueError("p must lie in [2, inf)")
    ratios, skipped = [], 0
    for f, g in _pair_fields(spec):
        num = lp_norm(_commutator(f, g, lambda h: bracket_dx(h, s1)), p)
        den = (lp_norm(bracket_dx(f, s1), p) * lp_norm(g, math.inf)
               + lp_norm(d_x(f), math.inf) * lp_norm(bracket_dx(g, s1 - 1), p))
        if den <= DENOM_FLOOR * max(1.0, f.l2() * g.l2()):
            skipped += 1
            continue
        ratios.append(num / den)
    return RatioReport("kato_ponce", {"s1": s1, "p": p}, spec.lattice.nmax,
                       np.array(ratios), skipped)


def kpv_ratio(spec: EnsembleSpec, s2: float, p: float) -> RatioReport:
    """Normal commutator bound, 0 <= s2 <= 1, p in [1, inf]:

    |[<dy>^s2, f]g|_p <= |<dy>^s2 f|_p |g|_inf.
    """
    if not (0 <= s2 <= 1):
        raise ValueError("s2 must lie in [0, 1]")
    ratios, skipped = [], 0
    for f, g in _pair_fields(spec):
        num = lp_norm(_commutator(f, g, lambda h: bracket_dy(h, s2)), p)
        den = lp_norm(bracket_dy(f, s2), p) * lp_norm(g, math.inf)
        if den <= DENOM_FLOOR * max(1.0, f.l2() * g.l2()):
            skipped += 1
            continue
        ratios.append(num / den)
    return RatioReport("kpv", {"s2": s2, "p": p}, spec.lattice.nmax,
                       np.array(ratios), skipped)


# ---------------------------------------------------------------------------
# paraproducts (constant-one bounds)

def _tangential_power(f: SpectralField, s: float, integer_variant: bool) -> SpectralField:
    if integer_variant and float(s).is_integer():
        return apply_multiplier(f, (1j * f.lattice.xi1) ** int(s))
    return abs_dx(f, s)


def paraproduct1_ratio(spec: EnsembleSpec, s: float,
                       integer_variant: bool = False) -> RatioReport:
    """|d_x^s P_+hi(P_-(f) g)|_2 / (|P_-(f)|_inf |d_x^s g|_2), constant one.

    Fractional s uses the |xi1|^s symbol; integer_variant applies
    (i xi1)^s instead, which leaves both L2 norms unchanged mode-by-mode.
    """
    ratios, skipped = [], 0
    for f, g in _pair_fields(spec):
        from .fields import pointwise_multiply
        fm = project(f, "-")
        num = _tangential_power(
            project(pointwise_multiply(fm, g), "+hi"), s, integer_variant).l2()
        den = lp_norm(fm, math.inf) * _tangential_power(g, s, integer_variant).l2()
        if den <= DENOM_FLOOR * max(1.0, f.l2() * g.l2()):
            skipped += 1
            continue
        ratios.append(num / den)
    return RatioReport("paraproduct1", {"s": s, "integer_variant": integer_variant},
                       spec.lattice.nmax, np.array(ratios), skipped)


def paraproduct2_ratio(spec: EnsembleSpec, s: float,
                       integer_variant: bool = False) -> RatioReport:
    """||d_x|^s P_+hi(P_-(f) g)|_2 / (|P_-(f)|_2 ||d_x|^s g|_inf), constant one."""
    ratios, skipped = [], 0
    for f, g in _pair_fields(spec):
        from .fields import pointwise_multiply
        fm = project(f, "-")
        num = _tangential_power(
            project(pointwise_multiply(fm, g), "+hi"), s, integer_variant).l2()
        den = fm.l2() * lp_norm(_tangential_power(g, s, integer_variant), math.inf)
        if den <= DENOM_FLOOR * max(1.0, f.l2() * g.l2()):
            skipped += 1
            continue
        ratios.append(num / den)
    return RatioReport("paraproduct2", {"s": s, "integer_variant": integer_variant},
                       spec.lattice.nmax, np.array(ratios), skipped)


# ---------------------------------------------------------------------------
# chain rule for the unimodular exponential

def chain_rule_ratio(spec: EnsembleSpec, s: float, p: float,
                     amplitude: float = 1.0, pad_factor: int = 2) -> RatioReport:
    """||grad|^s e^{iF}|_p / (||grad|^s F|_p |e^{iF}|_inf), s in (0,1), 1<p<inf.

    The exponential is evaluated pointwise on a padded grid and measured
    on an enlarged block so its spectral tail is represented.
    """
    if not (0 < s < 1):
        raise ValueError("s must lie in (0, 1)")
    if not (1 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    lat = spec.lattice
    big = Lattice(pad_factor * lat.nmax,
                  max(2 * pad_factor * lat.nmax + 2, pad_factor * lat.grid_size),
                  lat.freq)

    def embed_big(f: SpectralField) -> SpectralField:
        c = np.zeros(big.shape, dtype=np.complex128)
        k, kb = lat.nmax, big.nmax
        c[kb - k:kb + k + 1, kb - k:kb + k + 1] = f.coeffs
        return SpectralField(big, c)

    ratios, skipped = [], 0
    for f in spec.fields():
        f = amplitude * f
        phase = np.exp(1j * synthesize(embed_big(f), big.grid_size).real)
        expf = analyze(phase, big)
        num = lp_norm(abs_nabla(expf, s), p)
        den = lp_norm(abs_nabla(embed_big(f), s), p)  # |e^{iF}|_inf = 1
        if den <= DENOM_FLOOR * max(1.0, f.l2()):
            skipped += 1
            continue
        ratios.append(num / den)
    return RatioReport("chain_rule", {"s": s, "p": p, "amplitude": amplitude},
                       spec.lattice.nmax, np.array(ratios), skipped)


# ---------------------------------------------------------------------------
# dispersive smoothing of the free flow

def strichartz_ratio(spec: EnsembleSpec, kappa: float, T: float,
                     n_times: int = 33) -> RatioReport:
    """|e^{it dxx} u0|_{L4([0,T],L4)} / (T^{1/8} |<grad>^kappa u0|_2)."""
    if not (0 < T <= 1):
        raise ValueError("T must lie in (0, 1]")
    times = np.linspace(0.0, T, n_times)

    def pair(f):
        vals = np.array([lp_norm(schrodinger_propagator(f, t), 4) for t in times])
        num = time_lp(times, vals, 4)
        den = T ** 0.125 * bracket_nabla(f, kappa).l2()
        return num, den, f.l2()
    return _collect(spec, "strichartz", {"kappa": kappa, "T": T}, pair)


# ---------------------------------------------------------------------------
# growth along simulated trajectories

def growth_bound_check(traj, s: float, c: float | None = None):
    """Symmetric-Sobolev growth-envelope ratios of a trajectory."""
    from .dynamics import GROWTH_C_SOBOLEV, sobolev_growth_check
    return sobolev_growth_check(traj, s, GROWTH_C_SOBOLEV if c is None else c)


# ---------------------------------------------------------------------------
# refinement stability

def refinement_pair(spec: EnsembleSpec, runner) -> tuple[RatioReport, RatioReport, float]:
    """Run a ratio check at nmax and 2*nmax; returns both reports and the
    stability factor max_fine / max_coarse."""
    lat = spec.lattice
    fine = Lattice(2 * lat.nmax, 2 * lat.grid_size, lat.freq)
    coarse_report = runner(spec)
    fine_report = runner(replace(spec, lattice=fine))
    factor = (fine_report.max / coarse_report.max
              if coarse_report.max > 0 else math.inf)
    return coarse_report, fine_report, factor


#: Registry used by the command line: id -> (runner factory, default params).
INEQUALITIES = {
    "embedding": (embedding_ratio, {"s1": 1.25, "s2": 1.25}),
    "crucial": (crucial_ratio, {"s1": 5.0, "s2": 0.75}),
    "kato_ponce": (kato_ponce_ratio, {"s1": 2.0, "p": 2.0}),
    "kpv": (kpv_ratio, {"s2": 0.75, "p": 2.0}),
    "paraproduct1": (paraproduct1_ratio, {"s": 1.0}),
    "paraproduct2": (paraproduct2_ratio, {"s": 1.0}),
    "chain_rule": (chain_rule_ratio, {"s": 0.5, "p": 4.0}),
    "strichartz": (strichartz_ratio, {"kappa": 0.3, "T": 1.0}),
}

#: Ensemble decay defaults keeping the right-hand sides finite-looking.
DEFAULT_ALPHA = {
    "embedding": 2.25,
    "crucial": 6.0,
    "kato_ponce": 3.0,
    "kpv": 1.75,
    "paraproduct1": 2.5,
    "paraproduct2": 2.5,
    "chain_rule": 2.5,
    "strichartz": 2.3,
}
