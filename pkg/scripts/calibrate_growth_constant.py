"""Calibrate the growth-envelope constants and print the values to freeze.

For each trajectory in a held-out smooth ensemble this computes the
minimal constant c making

    N(u(t)) <= N(u0) * exp(c * int_0^t weight(u(s)) ds)

hold along the whole run, for both envelope flavours:

  * solution-space norm with weight |u|_inf + |u_x|_inf
  * symmetric Sobolev norm with weight |grad u|_inf

The frozen constants in qpbo.dynamics are the ensemble maxima times a
1.25 safety margin.  Rerun after changing the integrator, the ensemble
class, or the norm parameters.
"""

import math

import numpy as np

from qpbo.dynamics import SimulationConfig, integrate
from qpbo.fields import Lattice, golden_omega, smooth_random_field
from qpbo.multipliers import d_x
from qpbo.norms import grad_sup, lp_norm, sobolev_norm, x_norm

SEEDS = range(5000, 5040)
MARGIN = 1.25
S1, S2, S_SOB = 5.0, 0.75, 2.0


def minimal_constant(traj, norm_fn, weight_fn) -> float:
    norms = np.array([norm_fn(u) for u in traj.states])
    weights = np.array([weight_fn(u) for u in traj.states])
    integral = np.concatenate(
        ([0.0], np.cumsum(0.5 * (weights[1:] + weights[:-1]) * np.diff(traj.times))))
    c = 0.0
    for k in range(1, len(norms)):
        growth = math.log(norms[k] / norms[0])
        if growth > 0 and integral[k] > 0:
            c = max(c, growth / integral[k])
    return c


def main() -> None:
    lat = Lattice(8, 32, golden_omega())
    cfg = SimulationConfig(model="BO", nmax=8, grid_size=32,
                           t_end=1.0, dt=2e-3, observable_cadence=20)
    c_x = 0.0
    c_sob = 0.0
    for seed in SEEDS:
        rng = np.random.default_rng(seed)
        u0 = smooth_random_field(lat, rng, decay=0.7, real=True)
        u0 = u0 * (1.0 / u0.l2())
        traj = integrate(u0, cfg)
        c_x = max(c_x, minimal_constant(
            traj, lambda u: x_norm(u, S1, S2),
            lambda u: lp_norm(u, math.inf) + lp_norm(d_x(u), math.inf)))
        c_sob = max(c_sob, minimal_constant(
            traj, lambda u: sobolev_norm(u, S_SOB), grad_sup))
    print(f"ensemble max c (solution norm): {c_x:.6f}")
    print(f"ensemble max c (sobolev norm):  {c_sob:.6f}")
    print(f"freeze GROWTH_C_X       = {MARGIN * c_x:.4f}")
    print(f"freeze GROWTH_C_SOBOLEV = {MARGIN * c_sob:.4f}")


if __name__ == "__main__":
    main()
