"""Continued fractions, small-divisor statistics and embedding thresholds.

Partial quotients are computed in extended precision (mpmath) and the
convergents by exact integer recurrences, so the classical identities
hold exactly as stated.  The irrationality measure itself is never
estimated from finite data; callers supply mu and get thresholds back,
while the scans report growth evidence (slope fits, quotient sizes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

__all__ = [
    "ContinuedFraction",
    "continued_fraction",
    "is_badly_approximable",
    "small_divisor_scan",
    "SmallDivisorScan",
    "embedding_threshold",
    "embedding_constant_scan",
]

#: Working precision (decimal digits) for quotient extraction.
PRECISION_DPS = 60


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients and exact convergents of a real number."""

    alpha: float
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    exact: bool       # expansion terminated (rational input)
    truncated: bool   # precision budget exhausted before requested depth
    alpha_hp: str = ""  # working-precision decimal form of the input

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def max_quotient(self, skip_first: bool = True) -> int:
        qs = self.quotients[1:] if skip_first else self.quotients
        return max(qs) if qs else 0

    def convergent_error(self, k: int) -> float:
        """|alpha - p_k/q_k| evaluated at working precision."""
        p, q = self.convergents[k]
        with mp.workdps(PRECISION_DPS):
            return float(abs(mpf(self.alpha_hp) - mpf(p) / q))


def continued_fraction(alpha, depth: int) -> ContinuedFraction:
    """Expand alpha = [a0; a1, a2, ...] to the requested depth.

    alpha may be a float, a decimal string, or an mpmath number; strings
    and mpmath inputs are taken at the full working precision, while a
    plain float only determines quotients up to its own 53-bit budget.
    Rational inputs terminate exactly; otherwise the expansion stops
    early with the truncated flag set once the convergent denominators
    outgrow the precision budget (never silently wrong digits).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    with mp.workdps(PRECISION_DPS):
        x = mpf(alpha)
        if isinstance(alpha, (float, int)):
            eps = mpf(2) ** -52          # the input only carries 53 bits
        else:
            eps = mpf(10) ** -(PRECISION_DPS - 5)
        if not mp.isfinite(x):
            raise ValueError("alpha must be finite")
        alpha_float = float(x)
        alpha_hp = mp.nstr(x, PRECISION_DPS, strip_zeros=False)
        eps_abs = eps * max(mpf(1), abs(x))
        budget = 1 / eps                 # largest q^2 the precision supports
        small_rational = mpf(2) ** 26    # q^2 cap for honest exact termination
        quotients: list[int] = []
        convergents: list[tuple[int, int]] = []
        p_prev, p_curr = 0, 1            # p_{-2}, p_{-1}
        q_prev, q_curr = 1, 0
        exact = False
        truncated = False
        for step in range(depth):
            a = int(mp.floor(x))
            q_next = a * q_curr + q_prev
            if step > 0 and mpf(q_next) ** 2 > budget:
                truncated = True
                break
            p_prev, p_curr = p_curr, a * p_curr + p_prev
            q_prev, q_curr = q_curr, q_next
            quotients.append(a)
            convergents.append((p_curr, q_curr))
            frac = x - a
            if frac == 0:
                exact = True
                break
            if frac <= 4 * mpf(q_curr) ** 2 * eps_abs:
                # remainder indistinguishable from the current convergent
                if mpf(q_curr) ** 2 <= small_rational:
                    exact = True
                else:
                    truncated = True
                break
            x = 1 / frac
    return ContinuedFraction(alpha_float, tuple(quotients),
                             tuple(convergents), exact, truncated, alpha_hp)


def is_badly_approximable(alpha: float, depth: int, bound: int) -> tuple[bool, int]:
    """Finite-depth advisory test: all quotients a_1.. <= bound.

    Returns (verdict, max quotient seen).  A rational input (terminating
    expansion) is reported as not badly approximable.
    """
    cf = continued_fraction(alpha, depth)
    if cf.exact:
        return False, cf.max_quotient()
    m = cf.max_quotient()
    return m <= bound, m


@dataclass(frozen=True)
class SmallDivisorScan:
    radii: np.ndarray
    m_values: np.ndarray          # m(R) = max over 0 < |n| <= R of 1/|omega.n|
    slope: float                  # log-log fit of m against R
    zero_divisors: list[tuple[int, int]]
    argmax_modes: list[tuple[int, int]]   # mode achieving each m(R)

    @property
    def flagged_commensurable(self) -> bool:
        return bool(self.zero_divisors)


def small_divisor_scan(omega, N: int, fit_from: int = 8) -> SmallDivisorScan:
    """Brute-force scan of the inverse tangential frequency over |n| <= N.

    Exact zero divisors (commensurable omega) are excluded from the max
    and returned as flagged modes.  The slope is the least-squares fit of
    log m(R) against log R over radii >= fit_from.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    w1, w2 = (omega.omega if hasattr(omega, "omega") else omega)
    m = np.arange(-N, N + 1)
    n1, n2 = np.meshgrid(m, m, indexing="ij")
    n1 = n1.ravel()
    n2 = n2.ravel()
    keep = (n1 != 0) | (n2 != 0)
    n1, n2 = n1[keep], n2[keep]
    radius = np.hypot(n1, n2)
    inside = radius <= N
    n1, n2, radius = n1[inside], n2[inside], radius[inside]
    div = np.abs(w1 * n1 + w2 * n2)

    zero = div == 0.0
    zero_divisors = [(int(a), int(b)) for a, b in zip(n1[zero], n2[zero])]
    n1, n2, radius, div = n1[~zero], n2[~zero], radius[~zero], div[~zero]

    order = np.argsort(radius, kind="stable")
    n1, n2, radius, div = n1[order], n2[order], radius[order], div[order]
    inv = 1.0 / div
    cummax = np.maximum.accumulate(inv)
    # running argmax: keep the index wherever a new maximum is attained
    cumarg = np.maximum.accumulate(
        np.where(inv >= cummax, np.arange(len(inv)), 0))

    radii = np.arange(1, N + 1, dtype=float)
    idx = np.searchsorted(radius, radii, side="right") - 1
    valid = idx >= 0
    m_values = np.where(valid, cummax[np.maximum(idx, 0)], 0.0)
    argmax_modes = [
        (int(n1[cumarg[i]]), int(n2[cumarg[i]])) if v else (0, 0)
        for i, v in zip(np.maximum(idx, 0), valid)
    ]

    mask = (radii >= fit_from) & (m_values > 0)
    if np.count_nonzero(mask) >= 2:
        slope = float(np.polyfit(np.log(radii[mask]), np.log(m_values[mask]), 1)[0])
    else:
        slope = float("nan")
    return SmallDivisorScan(radii, m_values, slope, zero_divisors, argmax_modes)


def embedding_threshold(mu: float, s: float) -> dict:
    """Admissible isotropic-order interval [0, s - mu + 1) for the data-space
    embedding, plus its intersection with the solvable regime sigma > 7/8.

    mu is the caller-supplied irrationality measure (mu >= 1 required,
    mu = 2 for badly approximable ratios); the upper endpoint is strict
    because of the epsilon loss in the small-divisor bound (the
    badly-approximable case admits the endpoint itself; see `strict`).
    """
    if mu < 1:
        raise ValueError("mu must be >= 1")
    if s < 0:
        raise ValueError("s must be >= 0")
    upper = s - mu + 1.0
    interval = (0.0, upper) if upper > 0 else None
    lower_solvable = 7.0 / 8.0
    solvable = None
    if interval is not None and upper > lower_solvable:
        solvable = (lower_solvable, upper)
    return {
        "mu": mu,
        "s": s,
        "interval": interval,
        "solvable_interval": solvable,
        "strict": True,
    }


def embedding_constant_scan(omega, s: float, sigma: float, N: int) -> dict:
    """Max over 0 < |n| <= N of the single-mode data-to-Sobolev norm ratio.

    Single-mode norms: data-space |e_n|_Y = <xi>^sigma (<xi1> + 1/|xi1|)
    and isotropic Sobolev |e_n|_{H^s} = <xi>^s (unit omega assumed for
    the isotropic bracket).  The growth trend compares the max at N with
    the max at N/2; a trend well above 1 is the empirical signature of a
    failing embedding.
    """
    def max_at(radius: int):
        w1, w2 = (omega.omega if hasattr(omega, "omega") else omega)
        m = np.arange(-radius, radius + 1)
        n1, n2 = np.meshgrid(m, m, indexing="ij")
        keep = ((n1 != 0) | (n2 != 0)) & (np.hypot(n1, n2) <= radius)
        n1, n2 = n1[keep], n2[keep]
        xi1 = w1 * n1 + w2 * n2
        xi2 = w2 * n1 - w1 * n2
        xi_sq = xi1 ** 2 + xi2 ** 2
        nonzero = xi1 != 0.0
        inv = np.zeros(len(n1))
        np.divide(1.0, np.abs(xi1), out=inv, where=nonzero)
        y = (1.0 + xi_sq) ** (sigma / 2.0) * (np.sqrt(1.0 + xi1 ** 2) + inv)
        hs = (1.0 + xi_sq) ** (s / 2.0)
        vals = np.where(nonzero, y / hs, -np.inf)
        i = int(np.argmax(vals))
        return float(vals[i]), (int(n1[i]), int(n2[i])), int(np.count_nonzero(~nonzero))

    best, argmax, zeros = max_at(N)
    half_best, _, _ = max_at(max(1, N // 2))
    return {
        "max_ratio": best,
        "argmax_mode": argmax,
        "zero_divisors": zeros,
        "growth_trend": best / half_best if half_best > 0 else float("inf"),
    }
