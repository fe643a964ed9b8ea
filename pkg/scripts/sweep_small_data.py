"""Small-data sweep of the bootstrap quantities.

Scales one smooth mean-zero profile to data-space sizes rho in
{1e-2, 1e-3, 1e-4}, evolves each, and prints the two bootstrap scalars
at a few horizons together with their ratio to sqrt(rho) and rho.
"""

import sys

import numpy as np

from qpbo.dynamics import SimulationConfig, integrate
from qpbo.fields import Lattice, golden_omega, smooth_random_field
from qpbo.gauge import bootstrap_quantities
from qpbo.norms import y_norm

RHOS = (1e-2, 1e-3, 1e-4)
HORIZONS = (0.1, 0.175, 0.25)
SIGMA = 0.9


def main() -> int:
    lat = Lattice(8, 18, golden_omega())
    rng = np.random.default_rng(9)
    base = smooth_random_field(lat, rng, decay=0.9, real=True, zero_mean=True)
    config = SimulationConfig(model="BO", nmax=8, grid_size=18,
                              t_end=max(HORIZONS), dt=1e-3,
                              observable_cadence=25)
    print(f"{'rho':>8s} {'T':>6s} {'I':>12s} {'II':>12s} "
          f"{'I/sqrt(rho)':>12s} {'II/rho':>12s}")
    for rho in RHOS:
        u0 = base * (rho / y_norm(base, SIGMA))
        traj = integrate(u0, config)
        for horizon in HORIZONS:
            i_val, ii_val = bootstrap_quantities(traj, t_prime=horizon,
                                                 sigma=SIGMA)
            print(f"{rho:8.0e} {horizon:6.3f} {i_val:12.4e} {ii_val:12.4e} "
                  f"{i_val / np.sqrt(rho):12.4e} {ii_val / rho:12.4e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
