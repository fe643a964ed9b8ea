"""Command-line front end: config parsing, run manifests, output emission.

One run per invocation.  A run reads a single INI-style config file whose
sections mirror the library modules, writes its artifacts atomically
(temp file + rename, data files first, manifest last) and exits with

    0  success
    1  tolerance failure in a check mode
    2  usage or config error
    3  numerical divergence

The only environment override is QPBO_OUTDIR for the output directory.
CSV bodies are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import configparser
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .diophantine import (
    continued_fraction,
    embedding_constant_scan,
    embedding_threshold,
    is_badly_approximable,
    small_divisor_scan,
)
from .dynamics import (
    DivergedError,
    SimulationConfig,
    cauchy_study,
    galilean_normalize,
    integrate,
    observable_series,
    regularize_initial_data,
)
from .estimates import DEFAULT_ALPHA, INEQUALITIES, EnsembleSpec, refinement_pair
from .fields import (
    FrequencyVector,
    Lattice,
    SpectralField,
    golden_omega,
    random_field,
    smooth_random_field,
)
from .gauge import GaugeState, bootstrap_quantities, gauge_residual, reconstruct_Fx, reconstruct_Fxx
from .norms import NormSpec
from .storage import (
    atomic_write_text,
    load_field,
    load_trajectory_data,
    save_trajectory,
    sha256_file,
    write_csv,
)

SUBCOMMANDS = ("simulate", "gauge-check", "estimates", "cauchy", "dioph", "norms")

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


class ConfigError(Exception):
    """Schema violation; the message names the offending key."""


# ---------------------------------------------------------------------------
# config access

def _load_config(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} is missing or unreadable")
    return cp


def _get(cp, section, key, default=None):
    if cp.has_option(section, key):
        return cp.get(section, key).strip()
    return default


def _get_float(cp, section, key, default=None, minimum=None, maximum=None,
               strict_min=False):
    raw = _get(cp, section, key)
    if raw is None:
        val = default
    else:
        try:
            val = float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not a number: {raw!r}")
    if val is None:
        raise ConfigError(f"[{section}] {key}: required")
    if minimum is not None and (val <= minimum if strict_min else val < minimum):
        op = ">" if strict_min else ">="
        raise ConfigError(f"[{section}] {key}: must be {op} {minimum}, got {val}")
    if maximum is not None and val > maximum:
        raise ConfigError(f"[{section}] {key}: must be <= {maximum}, got {val}")
    return val


def _get_optional_float(cp, section, key):
    raw = _get(cp, section, key)
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: not a number: {raw!r}")


def _get_int(cp, section, key, default=None, minimum=None):
    val = _get_float(cp, section, key, default=default, minimum=minimum)
    if val != int(val):
        raise ConfigError(f"[{section}] {key}: must be an integer, got {val}")
    return int(val)


def _get_bool(cp, section, key, default=False):
    raw = _get(cp, section, key)
    if raw is None:
        return default
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"[{section}] {key}: not a boolean: {raw!r}")


def _parse_omega(text: str | None) -> FrequencyVector:
    if text is None or text.lower() == "golden":
        return golden_omega()
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise ConfigError(f"[lattice] omega: expected 'golden' or two numbers, got {text!r}")
    try:
        return FrequencyVector((float(parts[0]), float(parts[1])))
    except ValueError:
        raise ConfigError(f"[lattice] omega: not numeric: {text!r}")


def _build_lattice(cp) -> Lattice:
    nmax = _get_int(cp, "lattice", "nmax", default=8, minimum=0)
    grid = _get_int(cp, "lattice", "grid_size", default=max(2 * nmax + 2, 16))
    omega = _parse_omega(_get(cp, "lattice", "omega"))
    try:
        return Lattice(nmax, grid, omega)
    except ValueError as exc:
        raise ConfigError(f"[lattice] grid_size: {exc}")


# ---------------------------------------------------------------------------
# run bookkeeping

class Run:
    """Output directory plus manifest accumulation; manifest is written last."""

    def __init__(self, cp, subcommand: str, config_path: str):
        outdir = os.environ.get("QPBO_OUTDIR") or _get(cp, "run", "outdir", "out")
        self.dir = Path(outdir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.seed = _get_int(cp, "run", "seed", default=0)
        self.subcommand = subcommand
        self.started = _dt.datetime.now(_dt.timezone.utc).isoformat()
        self.config_echo = {s: dict(cp.items(s)) for s in cp.sections()}
        self.config_path = config_path
        self.outputs: dict[str, str] = {}
        self.warnings: list[str] = []
        self.lattice_echo: dict | None = None

    def path(self, name: str) -> Path:
        return self.dir / name

    def register(self, name: str) -> None:
        self.outputs[name] = sha256_file(self.path(name))

    def set_lattice(self, lattice) -> None:
        self.lattice_echo = {
            "nmax": lattice.nmax,
            "grid_size": lattice.grid_size,
            "omega": list(lattice.freq.omega),
        }

    def write_manifest(self, exit_status: int, extra: dict | None = None) -> None:
        doc = {
            "tool": f"qpbo {__version__}",
            "subcommand": self.subcommand,
            "config_path": str(self.config_path),
            "config": self.config_echo,
            "lattice": self.lattice_echo,
            "seed": self.seed,
            "started_utc": self.started,
            "finished_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "outputs": self.outputs,
            "warnings": self.warnings,
            "exit_status": exit_status,
        }
        if extra:
            doc.update(extra)
        atomic_write_text(self.path("manifest.json"),
                          json.dumps(doc, indent=2, sort_keys=True))


def _gnuplot_stub(run: Run, name: str, csv_name: str, ylabel: str, columns: list[int]) -> None:
    using = ", ".join(f'"{csv_name}" using 1:{c} with lines title columnheader({c})'
                      for c in columns)
    text = (f"set datafile separator ','\nset key autotitle columnhead\n"
            f"set xlabel 'time'\nset ylabel '{ylabel}'\nplot {using}\n")
    atomic_write_text(run.path(name), text)
    run.register(name)


# ---------------------------------------------------------------------------
# simulate

def _initial_data(cp, lattice: Lattice, seed: int) -> SpectralField:
    source = _get(cp, "dynamics", "initial_data", "random")
    amplitude = _get_float(cp, "dynamics", "amplitude", default=1.0)
    if source == "random":
        decay = _get_float(cp, "dynamics", "decay", default=0.7, minimum=0.0)
        rng = np.random.default_rng(seed)
        u0 = smooth_random_field(lattice, rng, decay=decay, real=True,
                                 zero_mean=_get_bool(cp, "dynamics", "zero_mean", False),
                                 amplitude=amplitude)
    else:
        u0 = load_field(source)
        if u0.lattice != lattice:
            raise ConfigError("[dynamics] initial_data: field lattice does not "
                              "match the [lattice] section")
    if _get_bool(cp, "dynamics", "normalize_l2", False):
        n = u0.l2()
        if n == 0:
            raise ConfigError("[dynamics] normalize_l2: zero field cannot be normalized")
        u0 = u0 * (1.0 / n)
    l2_target = _get_optional_float(cp, "dynamics", "l2_target")
    if l2_target is not None:
        n = u0.l2()
        if n == 0:
            raise ConfigError("[dynamics] l2_target: zero field cannot be scaled")
        u0 = u0 * (l2_target / n)
    target = _get_optional_float(cp, "dynamics", "y_norm_target")
    if target is not None:
        from .norms import y_norm
        sigma = _get_float(cp, "dynamics", "sigma", default=0.9, minimum=0.0)
        u0, _ = galilean_normalize(u0)
        cur = y_norm(u0, sigma)
        if cur == 0:
            raise ConfigError("[dynamics] y_norm_target: zero field")
        u0 = u0 * (target / cur)
    return u0


def _sim_config(cp, lattice: Lattice, seed: int) -> SimulationConfig:
    model = _get(cp, "dynamics", "model", "BO")
    trunc_raw = _get(cp, "dynamics", "truncation", "capacity")
    truncation = None if trunc_raw == "capacity" else _get_float(
        cp, "dynamics", "truncation", minimum=0.0)
    delta_raw = _get(cp, "dynamics", "delta", "none")
    kwargs = dict(
        model=model,
        nmax=lattice.nmax,
        grid_size=lattice.grid_size,
        omega=lattice.freq,
        truncation=truncation,
        s1=_get_float(cp, "dynamics", "s1", default=5.0, minimum=0.0),
        s2=_get_float(cp, "dynamics", "s2", default=0.75, minimum=0.0),
        sigma=_get_float(cp, "dynamics", "sigma", default=0.9, minimum=0.0),
        t_end=_get_float(cp, "dynamics", "t_end", default=1.0, minimum=0.0,
                         strict_min=True),
        dt=_get_float(cp, "dynamics", "dt", default=1e-3, minimum=0.0,
                      strict_min=True),
        integrator=_get(cp, "dynamics", "integrator", "IFRK4"),
        observable_cadence=_get_int(cp, "dynamics", "observable_cadence",
                                    default=10, minimum=1),
        seed=seed,
        nonlinearity=_get_bool(cp, "dynamics", "nonlinearity", True),
    )
    if delta_raw not in ("none", None):
        if delta_raw == "auto":
            base = truncation if truncation is not None else lattice.box_capacity()
            kwargs["delta"] = math.sqrt(base)
        else:
            kwargs["delta"] = _get_float(cp, "dynamics", "delta", minimum=0.0)
    try:
        return SimulationConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[dynamics] {exc}")


def cmd_simulate(cp, run: Run) -> int:
    lattice = _build_lattice(cp)
    run.set_lattice(lattice)
    config = _sim_config(cp, lattice, run.seed)
    u0 = _initial_data(cp, lattice, run.seed)
    if config.delta is not None:
        u0 = regularize_initial_data(u0, config.delta, config.s1, config.s2)
    if lattice.freq.commensurability_flag():
        run.warnings.append("omega entries appear commensurable")

    try:
        traj = integrate(u0, config)
    except DivergedError as exc:
        run.warnings.append(str(exc))
        run.write_manifest(EXIT_DIVERGED, {"diverged_at": exc.t})
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED

    series = observable_series(traj)
    header = ["time"] + list(series.values.keys())
    rows = [[t] + [series.values[k][i] for k in series.values]
            for i, t in enumerate(series.times)]
    write_csv(run.path("observables.csv"), header, rows)
    run.register("observables.csv")

    save_trajectory(run.path("trajectory.qpt"), traj.times, traj.states,
                    metadata={"model": config.model, "seed": run.seed})
    run.register("trajectory.qpt")
    run.register("trajectory.qpt.json")
    _gnuplot_stub(run, "observables.gnuplot", "observables.csv",
                  "conserved quantities", [2, 3, 6])

    run.write_manifest(EXIT_OK, {"integration": traj.manifest})
    return EXIT_OK


# ---------------------------------------------------------------------------
# gauge-check

def cmd_gauge_check(cp, run: Run) -> int:
    traj_path = _get(cp, "gauge", "trajectory")
    if traj_path is None:
        raise ConfigError("[gauge] trajectory: required (produce one with `simulate`)")
    if not Path(traj_path).exists():
        raise ConfigError(f"[gauge] trajectory: file not found: {traj_path}")
    times, states = load_trajectory_data(traj_path)

    class _T:
        pass

    traj = _T()
    traj.times = times
    traj.states = states

    pad = _get_int(cp, "gauge", "pad_factor", default=4, minimum=2)
    failures = []

    # residual of the gauged evolution, with a cadence-refinement slope
    cadences = [1, 2, 4]
    rows = []
    rms = {}
    for c in cadences:
        if (len(times) - 1) % c or len(times[::c]) < 3:
            continue
        sub = _T()
        sub.times = times[::c]
        sub.states = states[::c]
        ts, res = gauge_residual(sub, pad_factor=pad)
        interior = res[1:-1]
        rms[c] = float(np.sqrt(np.mean(interior ** 2)))
        if c == 1:
            rows = [[t, r] for t, r in zip(ts, res)]
    write_csv(run.path("residual.csv"), ["time", "residual_l2"], rows)
    run.register("residual.csv")

    slope = None
    if len(rms) >= 2:
        cs = sorted(rms)
        spacing = [np.log(c * (times[1] - times[0])) for c in cs]
        slope = float(np.polyfit(spacing, [np.log(rms[c]) for c in cs], 1)[0])
        lo = _get_optional_float(cp, "gauge", "slope_min")
        hi = _get_optional_float(cp, "gauge", "slope_max")
        if lo is not None and slope < lo:
            failures.append(f"residual slope {slope:.3f} < {lo}")
        if hi is not None and slope > hi:
            failures.append(f"residual slope {slope:.3f} > {hi}")

    # reconstruction identities on a middle slice
    u_norm0_sq = float(np.sum(np.abs(states[0].coeffs) ** 2))
    mid = len(states) // 2
    gs = GaugeState.from_state(states[mid], float(times[mid]), u_norm0_sq, pad)
    fx = reconstruct_Fx(gs)
    fxx = reconstruct_Fxx(gs)
    write_csv(run.path("reconstruction.csv"),
              ["time", "fx_mismatch", "fxx_mismatch"],
              [[float(times[mid]), fx.mismatch, fxx.mismatch]])
    run.register("reconstruction.csv")
    for key, value in (("max_fx_mismatch", fx.mismatch),
                       ("max_fxx_mismatch", fxx.mismatch)):
        limit = _get_optional_float(cp, "gauge", key)
        if limit is not None and value > limit:
            failures.append(f"{key}: {value:.3e} > {limit}")

    # bootstrap quantities over prefixes
    eta = _get_float(cp, "gauge", "eta", default=0.01, minimum=0.0)
    r = _get_float(cp, "gauge", "r", default=0.8)
    p = _get_float(cp, "gauge", "p", default=64.0, minimum=1.0)
    sigma = _get_float(cp, "gauge", "sigma", default=0.9, minimum=0.0)
    prefix_idx = sorted(set([max(2, len(times) // 4), max(3, len(times) // 2),
                             len(times) - 1]))
    brows = []
    prev = (0.0, 0.0)
    monotone = True
    for i in prefix_idx:
        vals = bootstrap_quantities(traj, eta=eta, r=r, p=p,
                                    t_prime=float(times[i]), sigma=sigma,
                                    pad_factor=pad)
        if vals[0] < prev[0] - 1e-12 or vals[1] < prev[1] - 1e-12:
            monotone = False
        prev = vals
        brows.append([float(times[i]), vals[0], vals[1]])
    write_csv(run.path("bootstrap.csv"), ["t_prime", "part1", "part2"], brows)
    run.register("bootstrap.csv")
    if _get_bool(cp, "gauge", "require_monotone", True) and not monotone:
        failures.append("bootstrap quantities not monotone in T'")

    summary = {
        "residual_slope": slope,
        "residual_rms_by_cadence": {str(k): v for k, v in rms.items()},
        "fx_mismatch": fx.mismatch,
        "fxx_mismatch": fxx.mismatch,
        "bootstrap_monotone": monotone,
        "failures": failures,
    }
    atomic_write_text(run.path("summary.json"),
                      json.dumps(summary, indent=2, sort_keys=True))
    run.register("summary.json")

    status = EXIT_TOLERANCE if failures else EXIT_OK
    run.write_manifest(status)
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    return status


# ---------------------------------------------------------------------------
# estimates

def cmd_estimates(cp, run: Run) -> int:
    lattice = _build_lattice(cp)
    run.set_lattice(lattice)
    requested = _get(cp, "estimates", "inequalities", ",".join(INEQUALITIES))
    ids = [s.strip() for s in requested.split(",") if s.strip()]
    unknown = [i for i in ids if i not in INEQUALITIES]
    if unknown:
        raise ConfigError(f"[estimates] inequalities: unknown ids {unknown}")
    count = _get_int(cp, "estimates", "count", default=100, minimum=1)
    refine = _get_bool(cp, "estimates", "refine", False)
    failures = []
    summaries = {}

    for ident in ids:
        runner_fn, defaults = INEQUALITIES[ident]
        params = dict(defaults)
        for key in list(params):
            override = _get_optional_float(cp, "estimates", f"{ident}.{key}")
            if override is not None:
                params[key] = override
        alpha = _get_optional_float(cp, "estimates", f"{ident}.alpha")
        if alpha is None:
            alpha = DEFAULT_ALPHA[ident]
        spec = EnsembleSpec(count=count, alpha=alpha, lattice=lattice,
                            seed=run.seed, real=ident != "strichartz")

        def runner(s, _fn=runner_fn, _p=params):
            return _fn(s, **_p)

        if refine:
            coarse, fine, factor = refinement_pair(spec, runner)
            summaries[ident] = {"coarse": coarse.summary(), "fine": fine.summary(),
                                "refinement_factor": factor}
            limit = _get_optional_float(cp, "estimates", "refine_factor_max")
            if limit is not None and factor > limit:
                failures.append(f"{ident}: refinement factor {factor:.3f} > {limit}")
            report = coarse
        else:
            report = runner(spec)
            summaries[ident] = report.summary()

        write_csv(run.path(f"ratios_{ident}.csv"), ["sample", "ratio"],
                  [[i, r] for i, r in enumerate(report.ratios)])
        run.register(f"ratios_{ident}.csv")
        atomic_write_text(run.path(f"ratios_{ident}.gnuplot"),
                          "set datafile separator ','\n"
                          f"set ylabel 'ratio'\nset xlabel 'sample'\n"
                          f"plot 'ratios_{ident}.csv' using 1:2 with points "
                          f"title '{ident}'\n")
        run.register(f"ratios_{ident}.gnuplot")

        limit = _get_optional_float(cp, "estimates", f"{ident}.max_ratio")
        if limit is not None and report.max > limit:
            failures.append(f"{ident}: max ratio {report.max:.4f} > {limit}")

    atomic_write_text(run.path("summary.json"),
                      json.dumps({"summaries": summaries, "failures": failures},
                                 indent=2, sort_keys=True))
    run.register("summary.json")
    status = EXIT_TOLERANCE if failures else EXIT_OK
    run.write_manifest(status)
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    return status


# ---------------------------------------------------------------------------
# cauchy

def cmd_cauchy(cp, run: Run) -> int:
    lattice = _build_lattice(cp)
    run.set_lattice(lattice)
    config = _sim_config(cp, lattice, run.seed)
    u0 = _initial_data(cp, lattice, run.seed)
    raw = _get(cp, "cauchy", "truncations", "4 8 16")
    try:
        truncations = [float(x) for x in raw.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"[cauchy] truncations: not numeric: {raw!r}")
    cap = lattice.box_capacity()
    if truncations and truncations[-1] > cap + 1e-12:
        raise ConfigError(f"[cauchy] truncations: {truncations[-1]} exceeds "
                          f"box capacity {cap:.4g}")
    t_end = _get_float(cp, "cauchy", "t_end", default=0.5, minimum=0.0,
                       strict_min=True)
    beta = _get_float(cp, "cauchy", "beta", default=0.5, minimum=0.0)

    study = cauchy_study(u0, truncations, t_end, config, beta=beta)
    rows = []
    for pair in study.pairs:
        for t, a, b in zip(pair.times, pair.l2, pair.hs):
            rows.append([pair.n_fine, pair.n_coarse, t, a, b])
    write_csv(run.path("cauchy.csv"),
              ["n_fine", "n_coarse", "time", "l2_diff", "hs_diff"], rows)
    run.register("cauchy.csv")

    summary = {
        "max_l2_per_pair": study.max_l2,
        "monotone_decay": study.monotone,
    }
    atomic_write_text(run.path("summary.json"),
                      json.dumps(summary, indent=2, sort_keys=True))
    run.register("summary.json")
    failures = []
    if _get_bool(cp, "cauchy", "require_monotone", False) and not study.monotone:
        failures.append("pairwise distances do not decay monotonically")
    status = EXIT_TOLERANCE if failures else EXIT_OK
    run.write_manifest(status)
    return status


# ---------------------------------------------------------------------------
# dioph

def _parse_alpha(text: str):
    from mpmath import mp
    with mp.workdps(60):
        if text == "golden":
            return (1 + mp.sqrt(5)) / 2
        if text == "sqrt2":
            return mp.sqrt(2)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"[dioph] alpha: expected 'golden', 'sqrt2' or a number, got {text!r}")


def cmd_dioph(cp, run: Run) -> int:
    alpha = _parse_alpha(_get(cp, "dioph", "alpha", "golden"))
    depth = _get_int(cp, "dioph", "depth", default=30, minimum=1)
    bound = _get_int(cp, "dioph", "bound", default=10, minimum=1)

    cf = continued_fraction(alpha, depth)
    alpha_f = cf.alpha
    rows = []
    for k, (a, (p, q)) in enumerate(zip(cf.quotients, cf.convergents)):
        err = abs(alpha_f - p / q) if q else float("nan")
        rows.append([k, a, p, q, err * q * q])
    write_csv(run.path("quotients.csv"),
              ["k", "quotient", "p", "q", "err_times_q_sq"], rows)
    run.register("quotients.csv")

    bad, max_q = is_badly_approximable(alpha, depth, bound)

    scan_summary = None
    if _get_bool(cp, "dioph", "scan", True):
        omega = _parse_omega(_get(cp, "lattice", "omega")) if cp.has_section(
            "lattice") else golden_omega()
        N = _get_int(cp, "dioph", "scan_n", default=512, minimum=2)
        scan = small_divisor_scan(omega, N)
        write_csv(run.path("smalldivisors.csv"), ["R", "m"],
                  [[r, v] for r, v in zip(scan.radii, scan.m_values)])
        run.register("smalldivisors.csv")
        atomic_write_text(run.path("smalldivisors.gnuplot"),
                          "set datafile separator ','\nset logscale xy\n"
                          "set xlabel 'R'\nset ylabel 'm(R)'\n"
                          "plot 'smalldivisors.csv' using 1:2 with linespoints "
                          "title 'worst inverse divisor'\n")
        run.register("smalldivisors.gnuplot")
        scan_summary = {
            "slope": scan.slope,
            "commensurable": scan.flagged_commensurable,
            "zero_divisors": scan.zero_divisors[:8],
        }
        if scan.flagged_commensurable:
            run.warnings.append("exact zero divisors found: omega is commensurable")

    mu = _get_float(cp, "dioph", "mu", default=2.0, minimum=1.0)
    s = _get_float(cp, "dioph", "s", default=2.0, minimum=0.0)
    threshold = embedding_threshold(mu, s)
    scan_sigma = _get_float(cp, "dioph", "sigma", default=0.9, minimum=0.0)

    summary = {
        "alpha": cf.alpha,
        "quotients": list(cf.quotients),
        "exact": cf.exact,
        "truncated": cf.truncated,
        "badly_approximable_advisory": bad,
        "max_quotient": max_q,
        "embedding_threshold": {
            "mu": mu, "s": s,
            "interval": threshold["interval"],
            "solvable_interval": threshold["solvable_interval"],
        },
        "small_divisor_scan": scan_summary,
    }
    if _get_bool(cp, "dioph", "constant_scan", False):
        omega = _parse_omega(_get(cp, "lattice", "omega")) if cp.has_section(
            "lattice") else golden_omega()
        N = _get_int(cp, "dioph", "scan_n", default=512, minimum=2)
        summary["embedding_constant_scan"] = embedding_constant_scan(
            omega, s, scan_sigma, N)
    atomic_write_text(run.path("summary.json"),
                      json.dumps(summary, indent=2, sort_keys=True))
    run.register("summary.json")
    run.write_manifest(EXIT_OK)
    return EXIT_OK


# ---------------------------------------------------------------------------
# norms

def _parse_norm_spec(text: str) -> NormSpec:
    parts = text.split()
    if not parts:
        raise ConfigError("[norms] empty norm spec")
    kind = parts[0]
    kwargs = {}
    for item in parts[1:]:
        if "=" not in item:
            raise ConfigError(f"[norms] bad parameter {item!r} (expected key=value)")
        key, val = item.split("=", 1)
        kwargs[key] = math.inf if val.lower() in ("inf", "infinity") else float(val)
    try:
        return NormSpec(kind=kind, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[norms] {text!r}: {exc}")


def cmd_norms(cp, run: Run) -> int:
    lattice = _build_lattice(cp)
    run.set_lattice(lattice)
    source = _get(cp, "norms", "field", "random")
    if source == "random":
        rng = np.random.default_rng(run.seed)
        alpha = _get_float(cp, "norms", "alpha", default=2.0)
        target = random_field(lattice, rng, alpha, real=True)
    else:
        target = load_field(source)
    specs = []
    if cp.has_section("norms"):
        for key, val in cp.items("norms"):
            if key.startswith("measure"):
                specs.append((key, _parse_norm_spec(val)))
    if not specs:
        specs = [("measure_l2", NormSpec("Lp", p=2)),
                 ("measure_linf", NormSpec("Lp", p=math.inf))]
    rows = []
    for name, spec in specs:
        rows.append([name, spec.kind, spec.evaluate(target)])
    write_csv(run.path("norms.csv"), ["name", "kind", "value"], rows)
    run.register("norms.csv")
    if _get_bool(cp, "norms", "dump_symbols", False):
        from .multipliers import DEFAULT_SYMBOLS
        write_csv(run.path("symbols.csv"),
                  ["n1", "n2", "xi1", "xi2", "psi_pos_hi", "psi_lo",
                   "psi_neg_hi", "psi_pos_HI", "psi_LO", "psi_neg_HI"],
                  DEFAULT_SYMBOLS.dump_rows(lattice))
        run.register("symbols.csv")
    run.write_manifest(EXIT_OK)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

_DRIVERS = {
    "simulate": cmd_simulate,
    "gauge-check": cmd_gauge_check,
    "estimates": cmd_estimates,
    "cauchy": cmd_cauchy,
    "dioph": cmd_dioph,
    "norms": cmd_norms,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qpbo",
        description="Spectral laboratory for quasi-periodic dispersive flows")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("config", help="path to the INI config file")
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return EXIT_CONFIG

    try:
        cp = _load_config(args.config)
        run = Run(cp, args.subcommand, args.config)
        return _DRIVERS[args.subcommand](cp, run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergedError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
