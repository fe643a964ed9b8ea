"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with `pytest -s` to see them on
success).  Tolerances are pinned here, not configurable.
"""

import math
import time

import numpy as np

from qpbo.diophantine import continued_fraction, embedding_threshold, small_divisor_scan
from qpbo.dynamics import (
    GROWTH_C_X,
    SimulationConfig,
    cauchy_study,
    convergence_study,
    galilean_compare,
    galilean_normalize,
    integrate,
    norm_growth_check,
    observable_series,
)
from qpbo.estimates import (
    EnsembleSpec,
    chain_rule_ratio,
    crucial_ratio,
    embedding_ratio,
    kato_ponce_ratio,
    kpv_ratio,
    paraproduct1_ratio,
    paraproduct2_ratio,
    refinement_pair,
    strichartz_ratio,
)
from qpbo.fields import Lattice, SpectralField, golden_omega, smooth_random_field
from qpbo.gauge import GaugeState, bootstrap_quantities, gauge_residual, reconstruct_Fx, reconstruct_Fxx
from qpbo.norms import y_norm

OMEGA = golden_omega()


def report(num, name, ok, detail):
    line = f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def unit_smooth(lat, seed, decay=0.7, zero_mean=False, scale=1.0):
    rng = np.random.default_rng(seed)
    u = smooth_random_field(lat, rng, decay=decay, real=True, zero_mean=zero_mean)
    return u * (scale / u.l2())


def embed(f, lat_big):
    c = np.zeros(lat_big.shape, complex)
    k, kb = f.lattice.nmax, lat_big.nmax
    c[kb - k:kb + k + 1, kb - k:kb + k + 1] = f.coeffs
    return SpectralField(lat_big, c)


class Series:
    def __init__(self, times, states):
        self.times = times
        self.states = states


def test_01_conservation():
    lat = Lattice(8, 32, OMEGA)
    u0 = unit_smooth(lat, seed=2026)
    config = SimulationConfig(model="BO", nmax=8, grid_size=32, omega=OMEGA,
                              t_end=1.0, dt=5e-4, observable_cadence=50)
    start = time.perf_counter()
    traj = integrate(u0, config)
    series = observable_series(traj)
    wall = time.perf_counter() - start
    i1 = series.values["I1"]
    i2 = series.values["I2"]
    h = series.values["H_trunc"]
    d1 = float(np.max(np.abs(i1 - i1[0])))
    d2 = float(np.max(np.abs(i2 - i2[0])) / abs(i2[0]))
    dh = float(np.max(np.abs(h - h[0])) / abs(h[0]))
    ok = d1 <= 1e-12 and d2 <= 1e-10 and dh <= 1e-8 and wall < 120.0
    report(1, "conservation", ok,
           f"I1 abs {d1:.1e} <= 1e-12, I2 rel {d2:.1e} <= 1e-10, "
           f"H rel {dh:.1e} <= 1e-8, wall {wall:.1f}s < 120s")


def test_02_galilean_symmetry():
    lat = Lattice(8, 32, OMEGA)
    u0 = unit_smooth(lat, seed=2026)
    assert abs(u0.mean) > 0.01   # the pairing is nontrivial
    v0, a = galilean_normalize(u0)
    config = SimulationConfig(model="BO", nmax=8, grid_size=32, omega=OMEGA,
                              t_end=0.5, dt=5e-4, observable_cadence=100)
    dev = galilean_compare(integrate(u0, config), integrate(v0, config), a)
    ok = dev <= 1e-8
    report(2, "galilean symmetry", ok, f"max L2 deviation {dev:.2e} <= 1e-8")


def test_03_integrator_order():
    lat = Lattice(8, 32, OMEGA)
    u0 = unit_smooth(lat, seed=2026)
    config = SimulationConfig(model="BO", nmax=8, grid_size=32, omega=OMEGA,
                              t_end=0.1, dt=1e-3)
    ratios = convergence_study(u0, config, [4e-3, 2e-3, 1e-3, 5e-4])
    ok = all(12.0 <= r <= 20.0 for r in ratios)
    report(3, "integrator order", ok,
           "halving ratios " + ", ".join(f"{r:.2f}" for r in ratios) + " in [12, 20]")


def test_04_gauge_identity_exactness():
    lat8 = Lattice(8, 18, OMEGA)
    rng = np.random.default_rng(42)
    F8 = smooth_random_field(lat8, rng, decay=1.8, real=True, zero_mean=True,
                             amplitude=0.1)
    gs8 = GaugeState.from_phase(F8, pad_factor=4)
    fx8 = reconstruct_Fx(gs8).mismatch
    fxx8 = reconstruct_Fxx(gs8).mismatch
    lat16 = Lattice(16, 34, OMEGA)
    gs16 = GaugeState.from_phase(embed(F8, lat16), pad_factor=4)
    fx16 = reconstruct_Fx(gs16).mismatch
    fxx16 = reconstruct_Fxx(gs16).mismatch
    ok = (fx8 <= 1e-8 and fxx8 <= 1e-8 and fx16 < fx8 and fxx16 < fxx8)
    report(4, "gauge identity exactness", ok,
           f"mismatch@8 {fx8:.1e}/{fxx8:.1e} <= 1e-8, "
           f"@16 {fx16:.1e}/{fxx16:.1e} decreasing")


def test_05_gauge_residual_slope():
    lat = Lattice(12, 26, OMEGA)
    u0 = unit_smooth(lat, seed=77, decay=1.2, zero_mean=True, scale=0.05)
    config = SimulationConfig(model="BO", nmax=12, grid_size=26, omega=OMEGA,
                              t_end=0.32, dt=5e-4, observable_cadence=10)
    traj = integrate(u0, config)
    rms = {}
    for c in (1, 2, 4):
        sub = Series(traj.times[::c], traj.states[::c])
        _, res = gauge_residual(sub)
        rms[c] = float(np.sqrt(np.mean(res[1:-1] ** 2)))
    slope = float(np.polyfit([math.log(c) for c in sorted(rms)],
                             [math.log(rms[c]) for c in sorted(rms)], 1)[0])
    ok = 1.7 <= slope <= 2.3
    report(5, "gauge residual slope", ok, f"slope {slope:.3f} in [1.7, 2.3]")


def test_06_cauchy_decay():
    lat = Lattice(24, 50, OMEGA)
    u0 = unit_smooth(lat, seed=5, decay=0.8)
    config = SimulationConfig(model="BO", nmax=24, grid_size=50, omega=OMEGA,
                              t_end=0.25, dt=1e-3, observable_cadence=25)
    study = cauchy_study(u0, [4.0, 8.0, 16.0], 0.25, config, beta=0.5)
    m = study.max_l2
    ok = m[1] < m[0]
    report(6, "cauchy decay", ok,
           f"max|u16-u8| {m[1]:.3e} < max|u8-u4| {m[0]:.3e} with delta(n)=sqrt(n)")


def test_07_paraproduct_constants():
    lat = Lattice(8, 18, OMEGA)
    worst = 0.0
    for s in (0.0, 1.0, 2.0):
        spec = EnsembleSpec(count=200, alpha=2.5, lattice=lat, seed=1234)
        worst = max(worst, paraproduct1_ratio(spec, s).max,
                    paraproduct2_ratio(spec, s).max)
    ok = worst <= 1.05
    report(7, "paraproduct constants", ok,
           f"max ratio {worst:.4f} <= 1.05 over 200 samples, s in {{0,1,2}}")


def test_08_refinement_stability():
    lat = Lattice(8, 18, OMEGA)
    checks = [
        ("embedding", 2.25, lambda s: embedding_ratio(s, 1.25, 1.25), True),
        ("crucial", 6.0, lambda s: crucial_ratio(s, 5.0, 0.75), True),
        ("kato_ponce", 3.0, lambda s: kato_ponce_ratio(s, 2.0, 2.0), True),
        ("kpv", 1.75, lambda s: kpv_ratio(s, 0.75, 2.0), True),
        ("chain_rule", 2.5, lambda s: chain_rule_ratio(s, 0.5, 4.0), True),
        ("strichartz", 2.3, lambda s: strichartz_ratio(s, 0.3, 1.0), False),
    ]
    factors = {}
    for name, alpha, fn, real in checks:
        spec = EnsembleSpec(count=200, alpha=alpha, lattice=lat, seed=1234,
                            real=real)
        _, _, factor = refinement_pair(spec, fn)
        factors[name] = factor
    ok = all(f <= 1.5 for f in factors.values())
    report(8, "refinement stability", ok,
           "factors " + ", ".join(f"{k}={v:.2f}" for k, v in factors.items())
           + " all <= 1.5")


def test_09_strichartz_scaling():
    lat = Lattice(8, 18, OMEGA)
    maxes = []
    for T in (0.25, 0.5, 1.0):
        spec = EnsembleSpec(count=200, alpha=2.3, lattice=lat, seed=1234,
                            real=False)
        maxes.append(strichartz_ratio(spec, 0.3, T).max)
    variation = max(maxes) / min(maxes)
    ok = variation <= 2.0
    report(9, "strichartz scaling", ok,
           f"normalized max ratios {', '.join(f'{m:.3f}' for m in maxes)}; "
           f"variation {variation:.2f}x <= 2x")


def test_10_diophantine_thresholds():
    from mpmath import mp
    with mp.workdps(60):
        golden = (1 + mp.sqrt(5)) / 2
        root2 = mp.sqrt(2)
    cf_golden = continued_fraction(golden, 30)
    cf_root2 = continued_fraction(root2, 30)
    golden_ok = cf_golden.quotients == tuple([1] * 30)
    root2_ok = (cf_root2.quotients[0] == 1
                and set(cf_root2.quotients[1:]) == {2})
    scan = small_divisor_scan(OMEGA, 512)
    slope_ok = 0.8 <= scan.slope <= 1.2
    thr = embedding_threshold(2.0, 2.0)
    thr_ok = (thr["interval"] == (0.0, 1.0)
              and thr["solvable_interval"] == (0.875, 1.0))
    ok = golden_ok and root2_ok and slope_ok and thr_ok
    report(10, "diophantine thresholds", ok,
           f"golden all-1s {golden_ok}, sqrt2 all-2s {root2_ok}, "
           f"slope {scan.slope:.3f} in [0.8,1.2], interval (7/8, 1) {thr_ok}")


def test_11_growth_bounds():
    lat = Lattice(8, 32, OMEGA)
    config = SimulationConfig(model="BO", nmax=8, grid_size=32, omega=OMEGA,
                              t_end=1.0, dt=2e-3, observable_cadence=20)
    worst = 0.0
    for seed in range(6000, 6050):
        u0 = unit_smooth(lat, seed=seed)
        traj = integrate(u0, config)
        ratios, _ = norm_growth_check(traj, config.s1, config.s2, c=GROWTH_C_X)
        worst = max(worst, float(ratios.max()))
    ok = worst <= 1.0 + 1e-6
    report(11, "growth bounds", ok,
           f"50-run ensemble max ratio {worst:.8f} <= 1 + 1e-6 with frozen "
           f"c = {GROWTH_C_X}")


def test_12_bootstrap_quantities():
    lat = Lattice(8, 18, OMEGA)
    rng = np.random.default_rng(9)
    base = smooth_random_field(lat, rng, decay=0.9, real=True, zero_mean=True)
    config = SimulationConfig(model="BO", nmax=8, grid_size=18, omega=OMEGA,
                              t_end=0.25, dt=1e-3, observable_cadence=25)
    monotone = True
    sweep = []
    for rho in (1e-2, 1e-3, 1e-4):
        u0 = base * (rho / y_norm(base, 0.9))
        traj = integrate(u0, config)
        vals = [bootstrap_quantities(traj, t_prime=tp)
                for tp in (0.1, 0.175, 0.25)]
        for (a1, b1), (a2, b2) in zip(vals, vals[1:]):
            monotone &= a1 <= a2 + 1e-12 and b1 <= b2 + 1e-12
        sweep.append(vals[-1])
    decreasing = all(a[0] > b[0] and a[1] > b[1] for a, b in zip(sweep, sweep[1:]))
    ok = monotone and decreasing
    report(12, "bootstrap quantities", ok,
           f"monotone in T' {monotone}; small-data sweep decreasing {decreasing} "
           f"(I: {', '.join(f'{v[0]:.1e}' for v in sweep)})")


def test_13_determinism(tmp_path):
    from qpbo.cli import main

    sim = """
[run]
outdir = {out}
seed = 11

[lattice]
nmax = 6
grid_size = 14

[dynamics]
model = BO
t_end = 0.05
dt = 1e-3
observable_cadence = 10
initial_data = random
decay = 0.8
normalize_l2 = true
"""
    est = """
[run]
outdir = {out}
seed = 11

[lattice]
nmax = 6
grid_size = 14

[estimates]
inequalities = embedding,strichartz
count = 20
"""
    same = []
    for label, template, cmd, artifact in (
            ("simulate", sim, "simulate", "observables.csv"),
            ("estimates", est, "estimates", "ratios_embedding.csv")):
        bodies = []
        for run_id in ("a", "b"):
            out = tmp_path / f"{label}_{run_id}"
            cfg = tmp_path / f"{label}_{run_id}.ini"
            cfg.write_text(template.format(out=out))
            assert main([cmd, str(cfg)]) == 0
            bodies.append((out / artifact).read_bytes())
        same.append(bodies[0] == bodies[1])
    ok = all(same)
    report(13, "determinism", ok,
           f"byte-identical CSV bodies: simulate {same[0]}, estimates {same[1]}")
