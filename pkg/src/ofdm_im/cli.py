"""Command-line front-end.

Subcommands reproduce the standard result set as CSV files: index detection
error curves, single-cell rates, SINR distribution, the interference
density with its mixture fit, the sum-rate bound sweep, and a kernel
benchmark.  Every command is deterministic given (config, seed): rerunning
writes byte-identical files at any worker count.

Configuration is a flat key-value text file (namespaced keys, '#' comments):

    multicell.alpha = 3
    mc.trials = 100000

CLI flags override config values, which override built-in defaults.  Exit
codes: 0 success, 2 invalid arguments or config, 3 runtime or convergence
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import available_backends, backend_name, get_kernels
from .curves import CurveTable, column, write_csv
from .geometry import (HexScenario, PathlossModel, interferer_distances,
                       received_power)
from .mc import (TrialPlan, derive_seed, empirical_cdf, sample_noise_plus_ici,
                 simulate_index_error, simulate_sinr)
from .mog import (EmSettings, MoGDist, em_fit, exact_mog_enumeration,
                  mog_pdf_real, mog_to_json)
from .multicell import (MultiCellConfig, analytic_sinr_cdf,
                        run_sum_rate_pipeline, sinr_cdf_curve)
from .singlecell import (SingleCellConfig, index_error_prob, rate_index,
                         rate_total)
from .units import db_grid, db_to_linear

_DEFAULT_DENSITY = 1e-4
_DEFAULT_ALPHA = 3.0
_DEFAULT_TX_POWER = 40.0
_DEFAULT_DISTANCE = 50.0
_DEFAULT_NOISE_VAR = 7.5e-11


def _parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


class Settings:
    """Layered lookup: CLI flag, then config file entry, then default."""

    def __init__(self, config: dict[str, str]):
        self._config = config

    def _raw(self, key: str, override):
        if override is not None:
            return override
        return self._config.get(key)

    def get_int(self, key: str, default: int, override=None) -> int:
        raw = self._raw(key, override)
        if raw is None:
            return default
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise ValueError(f"config key {key}: expected integer, got {raw!r}")

    def get_float(self, key: str, default: float, override=None) -> float:
        raw = self._raw(key, override)
        if raw is None:
            return default
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ValueError(f"config key {key}: expected number, got {raw!r}")

    def get_bool(self, key: str, default: bool, override=None) -> bool:
        raw = self._raw(key, override)
        if raw is None:
            return default
        if isinstance(raw, bool):
            return raw
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"config key {key}: expected boolean, got {raw!r}")

    def get_int_list(self, key: str, default: tuple[int, ...],
                     override=None) -> tuple[int, ...]:
        raw = self._raw(key, override)
        if raw is None:
            return default
        # flag values arrive pre-split from argparse, config values as text
        parts = raw if isinstance(raw, (tuple, list)) else str(raw).split(",")
        try:
            return tuple(int(part) for part in parts)
        except ValueError:
            raise ValueError(f"config key {key}: expected comma-separated "
                             f"integers, got {raw!r}")

    def get_db_grid(self, key: str, default: tuple[float, ...],
                    override=None) -> tuple[float, ...]:
        raw = self._raw(key, override)
        if raw is None:
            return default
        return _parse_db_spec(str(raw))


def _parse_db_spec(spec: str) -> tuple[float, ...]:
    """'start:stop:step' range, or a comma-separated list of dB values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"dB range must be start:stop:step, got {spec!r}")
        return db_grid(float(parts[0]), float(parts[1]), float(parts[2]))
    return tuple(float(p) for p in spec.split(","))


def _common_meta(command: str, seed: int) -> dict[str, object]:
    return {"command": command, "seed": seed, "artifact_version": __version__}


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _positive_trials(trials: int) -> int:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    return trials


def cmd_index_error(args, cfg: Settings) -> int:
    out = _out_dir(args)
    seed = cfg.get_int("mc.seed", 20250801, args.seed)
    trials = _positive_trials(cfg.get_int("mc.trials", 100_000, args.trials))
    workers = cfg.get_int("mc.workers", 1, args.workers)
    nf_list = cfg.get_int_list("singlecell.nf_list", (2, 4, 8, 16), args.nf)
    grid = cfg.get_db_grid("singlecell.snr_db", db_grid(-10, 30, 5),
                           args.snr_db)
    meta = _common_meta("index-error", seed)
    meta.update({"trials": trials})
    combined: dict[str, list[float]] = {
        "nf": [], "x_db": [], "analytic": [], "simulated": [], "stderr": []}
    counter = 0
    for n_f in nf_list:
        analytic = [index_error_prob(db_to_linear(x), n_f) for x in grid]
        sims, errs = [], []
        for x in grid:
            plan = TrialPlan(trials, derive_seed(seed, counter))
            counter += 1
            est = simulate_index_error(db_to_linear(x), n_f, plan, workers)
            sims.append(est.estimate)
            errs.append(est.stderr)
        write_csv(CurveTable(f"index_error_nf{n_f}",
                             {"x_db": column(grid), "p_err": column(analytic)},
                             "analytic", {"n_f": n_f}),
                  out / f"index_error_nf{n_f}_analytic.csv", meta)
        write_csv(CurveTable(f"index_error_nf{n_f}",
                             {"x_db": column(grid), "p_err": column(sims),
                              "stderr": column(errs)},
                             "simulated", {"n_f": n_f}),
                  out / f"index_error_nf{n_f}_simulated.csv", meta)
        combined["nf"].extend(float(n_f) for _ in grid)
        combined["x_db"].extend(grid)
        combined["analytic"].extend(analytic)
        combined["simulated"].extend(sims)
        combined["stderr"].extend(errs)
    write_csv(CurveTable("index_error_combined",
                         {k: column(v) for k, v in combined.items()},
                         "simulated"),
              out / "index_error_combined.csv", meta)
    print(f"wrote index error curves for n_f in {list(nf_list)} to {out}")
    return 0


def cmd_single_cell_rates(args, cfg: Settings) -> int:
    out = _out_dir(args)
    seed = cfg.get_int("mc.seed", 20250801, args.seed)
    nf_list = cfg.get_int_list("singlecell.nf_list", (2, 4, 8, 16), args.nf)
    grid = cfg.get_db_grid("singlecell.snr_db", db_grid(-10, 40, 1),
                           args.snr_db)
    fixed = cfg.get_db_grid("singlecell.fixed_snr_db", (0.0, 10.0, 20.0, 30.0),
                            args.fixed_snr_db)
    nf_max = cfg.get_int("singlecell.nf_max", 64, args.nf_max)
    meta = _common_meta("single-cell-rates", seed)
    for n_f in nf_list:
        points = rate_total(SingleCellConfig(
            n_f, tuple(db_to_linear(x) for x in grid)))
        write_csv(CurveTable(f"single_cell_rates_nf{n_f}",
                             {"x_db": column(grid),
                              "r1": column(p.r1 for p in points),
                              "p_err": column(p.p_err for p in points),
                              "r2": column(p.r2 for p in points),
                              "r_total": column(p.r_total for p in points)},
                             "analytic", {"n_f": n_f}),
                  out / f"single_cell_rates_nf{n_f}.csv", meta)
    rows: dict[str, list[float]] = {"snr_db": [], "nf": [], "r2": [],
                                    "is_optimal": []}
    for snr_db in fixed:
        rho = db_to_linear(snr_db)
        r2s = [rate_index(rho, n) for n in range(2, nf_max + 1)]
        best = int(np.argmax(r2s))
        for j, n in enumerate(range(2, nf_max + 1)):
            rows["snr_db"].append(snr_db)
            rows["nf"].append(float(n))
            rows["r2"].append(r2s[j])
            rows["is_optimal"].append(1.0 if j == best else 0.0)
    write_csv(CurveTable("index_rate_vs_nf",
                         {k: column(v) for k, v in rows.items()}, "analytic",
                         {"nf_max": nf_max}),
              out / "index_rate_vs_nf.csv", meta)
    print(f"wrote rate curves for n_f in {list(nf_list)} to {out}")
    return 0


def cmd_sinr_cdf(args, cfg: Settings) -> int:
    out = _out_dir(args)
    seed = cfg.get_int("mc.seed", 20250801, args.seed)
    trials = _positive_trials(cfg.get_int("mc.trials", 100_000, args.trials))
    workers = cfg.get_int("mc.workers", 1, args.workers)
    nf_list = cfg.get_int_list("multicell.nf_list", (1, 2, 4, 8), args.nf)
    grid = cfg.get_db_grid("multicell.snr_db", db_grid(-10, 40, 1),
                           args.snr_db)
    density = cfg.get_float("multicell.density", _DEFAULT_DENSITY)
    alpha = cfg.get_float("multicell.alpha", _DEFAULT_ALPHA)
    tx_power = cfg.get_float("multicell.tx_power", _DEFAULT_TX_POWER)
    distance = cfg.get_float("multicell.serving_distance", _DEFAULT_DISTANCE)
    noise_var = cfg.get_float("multicell.noise_var", _DEFAULT_NOISE_VAR)
    meta = _common_meta("sinr-cdf", seed)
    meta.update({"trials": trials})
    for i, n_f in enumerate(nf_list):
        mc_cfg = MultiCellConfig(density, n_f, alpha, tx_power, distance,
                                 noise_var)
        analytic = sinr_cdf_curve(mc_cfg, grid)
        draws = simulate_sinr(mc_cfg, TrialPlan(trials, derive_seed(seed, i)),
                              workers)
        empirical = empirical_cdf(draws, np.array([db_to_linear(x)
                                                   for x in grid]))
        table = CurveTable(f"sinr_cdf_nf{n_f}",
                           {"x_db": column(grid),
                            "analytic": analytic.columns["cdf"],
                            "empirical": column(empirical)},
                           "simulated", analytic.meta)
        write_csv(table, out / f"sinr_cdf_nf{n_f}.csv", meta)
    print(f"wrote SINR CDF curves for n_f in {list(nf_list)} to {out}")
    return 0


def cmd_ici_pdf(args, cfg: Settings) -> int:
    out = _out_dir(args)
    seed = cfg.get_int("mc.seed", 20250801, args.seed)
    trials = _positive_trials(cfg.get_int("mc.trials", 200_000, args.trials))
    workers = cfg.get_int("mc.workers", 1, args.workers)
    n_f = cfg.get_int("multicell.n_f", 4, args.nf[0] if args.nf else None)
    scenario = HexScenario(cfg.get_int("hex.n_b", 19),
                           cfg.get_float("hex.isd", 100.0),
                           cfg.get_float("hex.serving_distance", _DEFAULT_DISTANCE))
    model = PathlossModel(cfg.get_float("multicell.alpha", _DEFAULT_ALPHA),
                          cfg.get_float("multicell.tx_power", _DEFAULT_TX_POWER))
    noise_var = cfg.get_float("multicell.noise_var", _DEFAULT_NOISE_VAR)
    qam_order = cfg.get_int("qam.order", 4, args.qam_order)
    bins = cfg.get_int("ici.bins", 201, args.bins)
    settings = EmSettings(
        q_prime=cfg.get_int("em.q_prime", 4, args.q_prime),
        max_iters=cfg.get_int("em.max_iters", 500),
        loglik_tol=cfg.get_float("em.loglik_tol", 1e-8),
        restarts=cfg.get_int("em.restarts", 5, args.restarts))
    exact_mode = cfg.get_bool("ici.exact_enum", False, args.exact_enum or None)
    meta = _common_meta("ici-pdf", seed)
    meta.update({"trials": trials, "n_f": n_f, "qam_order": qam_order})

    plan = TrialPlan(trials, seed)
    samples = sample_noise_plus_ici(scenario, model, n_f, qam_order,
                                    noise_var, plan, workers)
    if args.dump_samples:
        samples.write_csv(out / "ici_samples.csv")
    re_part = samples.samples.real
    spread = float(np.std(re_part))
    # +-6 spreads: the heavy mixture components leave < 1e-4 mass outside,
    # so the emitted histogram still integrates to 1 within 1e-3
    edges = np.linspace(-6.0 * spread, 6.0 * spread, bins + 1)
    hist, _ = np.histogram(re_part, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])

    fit = em_fit(samples, settings,
                 np.random.Generator(np.random.Philox(
                     np.random.SeedSequence(seed, spawn_key=(97,)))))
    mean_power = float(np.mean(np.abs(samples.samples) ** 2))
    gaussian = MoGDist((1.0,), (mean_power,))
    columns = {"x": column(centers),
               "histogram": column(hist),
               "mog_fit": column(mog_pdf_real(fit.dist, centers)),
               "gaussian_baseline": column(mog_pdf_real(gaussian, centers))}
    if exact_mode:
        powers = [received_power(model, d)
                  for d in interferer_distances(scenario)]
        exact = exact_mog_enumeration(powers, n_f, noise_var)
        columns["exact"] = column(mog_pdf_real(exact, centers))
    write_csv(CurveTable("ici_pdf_real_part", columns, "simulated",
                         {"n_b": scenario.n_b, "isd": scenario.isd}),
              out / "ici_pdf.csv", meta)
    (out / "ici_fit.json").write_text(
        mog_to_json(fit.dist, {"scenario": "hex_noise_plus_ici",
                               "convention": "complex_total_variance",
                               "n_f": n_f, "qam_order": qam_order,
                               "seed": seed, "trials": trials}) + "\n")
    print(f"wrote interference density and mixture fit to {out}")
    return 0


def cmd_sum_rate(args, cfg: Settings) -> int:
    out = _out_dir(args)
    seed = cfg.get_int("mc.seed", 20250801, args.seed)
    trials = _positive_trials(cfg.get_int("mc.trials", 50_000, args.trials))
    workers = cfg.get_int("mc.workers", 1, args.workers)
    n_f = cfg.get_int("multicell.n_f", 4, args.nf[0] if args.nf else None)
    sweep = cfg.get_db_grid("sumrate.snr_db", db_grid(0, 30, 5), args.snr_db)
    scenario = HexScenario(cfg.get_int("hex.n_b", 19),
                           cfg.get_float("hex.isd", 100.0),
                           cfg.get_float("hex.serving_distance", _DEFAULT_DISTANCE))
    model = PathlossModel(cfg.get_float("multicell.alpha", _DEFAULT_ALPHA),
                          cfg.get_float("multicell.tx_power", _DEFAULT_TX_POWER))
    qam_order = cfg.get_int("qam.order", 4, args.qam_order)
    settings = EmSettings(
        q_prime=cfg.get_int("em.q_prime", 4, args.q_prime),
        max_iters=cfg.get_int("em.max_iters", 500),
        loglik_tol=cfg.get_float("em.loglik_tol", 1e-8),
        restarts=cfg.get_int("em.restarts", 3, args.restarts))
    meta = _common_meta("sum-rate", seed)
    meta.update({"trials": trials, "n_f": n_f, "qam_order": qam_order,
                 "q_prime": settings.q_prime})

    plan = TrialPlan(trials, seed)
    results = run_sum_rate_pipeline(scenario, model, n_f, qam_order, sweep,
                                    plan, settings, workers)
    reference = rate_total(SingleCellConfig(
        n_f, tuple(db_to_linear(x) for x in sweep)))
    table = CurveTable(
        "sum_rate_bound",
        {"x_db": column(sweep),
         "r3_upper": column(r.r3_upper for r in results),
         "r3_upper_printed": column(r.r3_upper_printed for r in results),
         "mi_estimate": column(r.mi_estimate for r in results),
         "mi_stderr": column(r.mi_stderr for r in results),
         "single_cell_r1": column(p.r1 for p in reference),
         "single_cell_r2": column(p.r2 for p in reference),
         "single_cell_r_total": column(p.r_total for p in reference)},
        "fitted", {"n_b": scenario.n_b, "n_f": n_f})
    write_csv(table, out / "sum_rate.csv", meta)
    fits = [{"snr_db": r.snr_db, "noise_var": r.noise_var,
             "noise_ici": json.loads(mog_to_json(r.fitted_noise_ici)),
             "received": json.loads(mog_to_json(r.fitted_received))}
            for r in results]
    (out / "sum_rate_fits.json").write_text(
        json.dumps(fits, sort_keys=True, indent=2) + "\n")
    print(f"wrote sum-rate bound sweep ({len(sweep)} points) to {out}")
    return 0


def _bench_inputs(trials: int, seed: int):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    nf = 8
    y_re = rng.standard_normal((trials, nf))
    y_im = rng.standard_normal((trials, nf))
    true_idx = rng.integers(0, nf, trials)
    seg = np.sort(rng.integers(0, trials // 4 + 1, trials))
    values = rng.standard_normal(trials)
    m = 18
    active = (rng.random((trials // 10 + 1, m)) < 0.25).astype(np.float64)
    h_re = rng.standard_normal(active.shape)
    h_im = rng.standard_normal(active.shape)
    x_re = rng.standard_normal(active.shape)
    x_im = rng.standard_normal(active.shape)
    amps = rng.random(m) + 0.5
    u = rng.standard_exponential(trials)
    w = np.full(4, 0.25)
    s2 = np.array([0.5, 1.0, 2.0, 4.0])
    return {
        "detect_confusion": (y_re, y_im, true_idx, nf),
        "segment_sum": (values, seg, trials // 4 + 1),
        "ici_accumulate": (active, h_re, h_im, x_re, x_im, amps),
        "em_pass": (u, w, s2),
    }


def cmd_bench(args, cfg: Settings) -> int:
    out = _out_dir(args)
    seed = cfg.get_int("mc.seed", 20250801, args.seed)
    trials = _positive_trials(cfg.get_int("mc.trials", 200_000, args.trials))
    repeats = 5
    inputs = _bench_inputs(trials, seed)
    rows: dict[str, list] = {"kernel": [], "backend": [], "trials": [],
                             "best_seconds": []}
    timings: dict[tuple[str, str], float] = {}
    for backend in available_backends():
        kernels = get_kernels(backend)
        for name, arg_tuple in inputs.items():
            fn = getattr(kernels, name)
            best = min(_time_once(fn, arg_tuple) for _ in range(repeats))
            timings[(name, backend)] = best
            rows["kernel"].append(name)
            rows["backend"].append(backend)
            rows["trials"].append(trials)
            rows["best_seconds"].append(best)
    print(f"kernel benchmark, {trials} trials, best of {repeats} "
          f"(active backend: {backend_name()})")
    for name in inputs:
        line = f"  {name:18s}"
        for backend in available_backends():
            line += f" {backend}: {timings[(name, backend)]:.6f}s"
        if ("python" in available_backends()
                and "compiled" in available_backends()):
            ratio = timings[(name, "python")] / timings[(name, "compiled")]
            line += f"  speedup: {ratio:.2f}x"
        print(line)
    lines = ["kernel,backend,trials,best_seconds"]
    for i in range(len(rows["kernel"])):
        lines.append(f'{rows["kernel"][i]},{rows["backend"][i]},'
                     f'{rows["trials"][i]},{rows["best_seconds"][i]!r}')
    (out / "bench.csv").write_text("\n".join(lines) + "\n")
    return 0


def _time_once(fn, args_tuple) -> float:
    start = time.perf_counter()
    fn(*args_tuple)
    return time.perf_counter() - start


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ofdm-im",
        description="OFDM index modulation performance analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key-value config file")
        p.add_argument("--seed", type=int, help="64-bit master seed")
        p.add_argument("--trials", type=int, help="Monte Carlo trials")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--workers", type=int, help="parallel chunk workers")
        p.add_argument("--nf", type=lambda s: tuple(int(x) for x in s.split(",")),
                       help="comma-separated subcarrier counts")
        p.add_argument("--snr-db", help="dB grid start:stop:step or list")

    p = sub.add_parser("index-error",
                       help="index detection error, analytic vs simulated")
    add_common(p)
    p.set_defaults(func=cmd_index_error)

    p = sub.add_parser("single-cell-rates",
                       help="closed-form single-cell rate curves")
    add_common(p)
    p.add_argument("--fixed-snr-db",
                   help="dB list for the rate-vs-subcarrier-count table")
    p.add_argument("--nf-max", type=int,
                   help="largest subcarrier count in the sweep")
    p.set_defaults(func=cmd_single_cell_rates)

    p = sub.add_parser("sinr-cdf",
                       help="SINR distribution, analytic vs simulated")
    add_common(p)
    p.set_defaults(func=cmd_sinr_cdf)

    p = sub.add_parser("ici-pdf",
                       help="interference density: histogram, fit, baselines")
    add_common(p)
    p.add_argument("--qam-order", type=int, help="4, 16, or 64")
    p.add_argument("--q-prime", type=int, help="fitted component count")
    p.add_argument("--restarts", type=int, help="EM restarts")
    p.add_argument("--bins", type=int, help="histogram bin count")
    p.add_argument("--exact-enum", action="store_true",
                   help="also emit the exact enumeration density")
    p.add_argument("--dump-samples", action="store_true",
                   help="also write the raw complex samples as CSV")
    p.set_defaults(func=cmd_ici_pdf)

    p = sub.add_parser("sum-rate", help="multi-cell rate bound sweep")
    add_common(p)
    p.add_argument("--qam-order", type=int, help="4, 16, or 64")
    p.add_argument("--q-prime", type=int, help="fitted component count")
    p.add_argument("--restarts", type=int, help="EM restarts")
    p.set_defaults(func=cmd_sum_rate)

    p = sub.add_parser("bench", help="time the hot kernels on each backend")
    add_common(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _parse_config_file(args.config) if args.config else {}
        cfg = Settings(config)
        return args.func(args, cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
