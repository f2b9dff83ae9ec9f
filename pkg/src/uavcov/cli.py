"""Command-line front end: parameter sweeps, design optimization, and
analytic-vs-Monte-Carlo validation, emitting CSV.

Units at the boundary are engineering units (dB thresholds and SNR, km^-2
densities, meters); each is converted to the internal linear/SI form exactly
once at parse time, and swept axis values are printed back in the units they
were given in. CSV cells carry 17 significant digits so downstream diffs are
exact; identical config + seed reproduces identical bytes.

Exit codes: 0 success, 1 validation failure, 2 bad config, 3 a sweep or
optimize run finished but some points failed numerically (their cells are
left empty).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from types import SimpleNamespace

import numpy as np

from .analytic import (
    coverage_no_noise,
    coverage_noise_limited,
    coverage_rayleigh,
    coverage_rayleigh_n4_closed,
    rho,
    rho_closed_n4,
)
from .channel import (
    DeploymentParams,
    EnvironmentParams,
    FadingModel,
    RadioParams,
    ple,
)
from .errors import DivergenceError, DomainError, QuadratureError
from .montecarlo import (
    McConfig,
    coverage_nakagami_semianalytic,
    sample_sinr_components,
    simulate_coverage,
    wilson_interval,
)
from .optimize import (
    coverage_density_approx,
    density_coeffs,
    height_objective_fn,
    optimal_density_closed,
    optimal_density_numeric,
    optimal_height,
)

AXES = ("theta_db", "z", "ple", "lambda", "snr_db")
SWEEP_METHODS = (
    "exact-quadrature",
    "closed-n4",
    "no-noise",
    "noise-limited",
    "density-approx",
    "monte-carlo",
    "nakagami-semianalytic",
)

_DEFAULTS = {
    "snr_db": 20.0,
    "theta_db": 0.0,
    "height_m": 100.0,
    "density_per_km2": 1.0,
    "ple": None,          # None -> height-dependent SUI exponent
    "sui": False,
    "terrain": "4.6,0.0075,12.6",
    "d0": 100.0,
    "fading": "rayleigh",
    "trials": 100_000,
    "seed": 0,
    "out": None,
    "axis": None,
    "from": None,
    "to": None,
    "step": None,
    "method": None,
    "target": None,
    "evaluator": "analytic",
    "l_min": 20.0,
    "l_max": 600.0,
    "perturb_rho": 1.0,
}

# config-file key -> argparse dest, where they differ ("from" is a keyword)
_FLAG_DEST = {"from": "from_"}


class ConfigError(Exception):
    """Bad flag/file configuration; maps to exit code 2."""


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def per_km2_to_per_m2(lam: float) -> float:
    return lam * 1e-6


def per_m2_to_per_km2(lam: float) -> float:
    return lam * 1e6


def parse_fading(spec: str) -> FadingModel:
    """'rayleigh', 'nakagami:m', or 'rician:k' (k a linear power ratio)."""
    parts = str(spec).split(":")
    kind = parts[0].strip().lower()
    try:
        if kind == "rayleigh" and len(parts) == 1:
            return FadingModel.rayleigh()
        if kind == "nakagami" and len(parts) == 2:
            return FadingModel.nakagami(float(parts[1]))
        if kind == "rician" and len(parts) == 2:
            return FadingModel.rician(float(parts[1]))
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"bad fading spec {spec!r}: {exc}") from exc
    raise ConfigError(f"bad fading spec {spec!r} (want rayleigh | nakagami:m | rician:k)")


def _load_file_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    for key in data:
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown config key: {key!r}")
    return data


def merge_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_load_file_config(args.config))
    for key in cfg:
        flag = getattr(args, _FLAG_DEST.get(key, key), None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _scenario(cfg: dict) -> SimpleNamespace:
    """Resolve a merged config into model objects (single point of unit
    conversion)."""
    if cfg["ple"] is not None and cfg["sui"]:
        raise ConfigError("--ple and --sui are mutually exclusive")
    try:
        a, b, c = (float(x) for x in str(cfg["terrain"]).split(","))
    except ValueError as exc:
        raise ConfigError(f"bad --terrain (want a,b,c): {cfg['terrain']!r}") from exc
    try:
        env = EnvironmentParams(a, b, c, d0=float(cfg["d0"]))
        fading = parse_fading(cfg["fading"])
        radio = RadioParams(
            theta=db_to_linear(float(cfg["theta_db"])),
            beta0=db_to_linear(-float(cfg["snr_db"])),
            fading=fading,
        )
        z = float(cfg["height_m"])
        dep = DeploymentParams(
            density=per_km2_to_per_m2(float(cfg["density_per_km2"])),
            z=z,
            l_min=min(float(cfg["l_min"]), z),
            l_max=max(float(cfg["l_max"]), z),
        )
        mc = McConfig(trials=int(cfg["trials"]), seed=int(cfg["seed"]))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    n = float(cfg["ple"]) if cfg["ple"] is not None else None
    return SimpleNamespace(env=env, radio=radio, dep=dep, mc=mc, n=n)


def _fmt_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(cell) for cell in row])


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ConfigError("--step must be positive")
    if hi < lo:
        raise ConfigError("--to must be >= --from")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def _point_scenario(sc: SimpleNamespace, axis: str, v: float) -> SimpleNamespace:
    """Scenario with one coordinate replaced by a grid value (grid values in
    CLI units)."""
    out = SimpleNamespace(**vars(sc))
    if axis == "theta_db":
        out.radio = replace(sc.radio, theta=db_to_linear(v))
    elif axis == "snr_db":
        out.radio = replace(sc.radio, beta0=db_to_linear(-v))
    elif axis == "z":
        out.dep = DeploymentParams(
            density=sc.dep.density, z=v,
            l_min=min(sc.dep.l_min, v), l_max=max(sc.dep.l_max, v),
        )
    elif axis == "lambda":
        out.dep = replace(sc.dep, density=per_km2_to_per_m2(v))
    elif axis == "ple":
        out.n = v
    else:
        raise ConfigError(f"unknown axis {axis!r}")
    return out


def _eval_method(method: str, sc: SimpleNamespace) -> tuple[float, float]:
    """One (coverage, error_bound) cell pair; raises on numeric failure."""
    if method == "exact-quadrature":
        est = coverage_rayleigh(sc.dep, sc.radio, sc.env, n=sc.n)
        return est.value, est.error_bound
    if method == "closed-n4":
        if sc.n != 4.0:
            raise DomainError("closed-n4 requires a fixed exponent of 4 (--ple 4)")
        est = coverage_rayleigh_n4_closed(sc.dep, sc.radio, sc.env)
        return est.value, est.error_bound
    if method == "no-noise":
        if sc.n is not None:
            est = coverage_no_noise(sc.dep, sc.radio, n=sc.n)
        else:
            est = coverage_no_noise(sc.dep, sc.radio, sc.env)
        return est.value, est.error_bound
    if method == "noise-limited":
        est = coverage_noise_limited(sc.dep, sc.radio, sc.env, n=sc.n)
        return est.value, est.error_bound
    if method == "density-approx":
        n_eff = sc.n if sc.n is not None else ple(sc.dep.z, sc.env)
        r = rho_closed_n4(sc.radio.theta) if n_eff == 4.0 else rho(sc.radio.theta, n_eff)
        coeffs = density_coeffs(sc.dep.z, sc.radio.theta, sc.radio.beta0, sc.env.d0, r)
        approx = coverage_density_approx(sc.dep.density, coeffs)
        # reported raw (approximation, no bound claimed); validity is the
        # caller's concern
        return approx.value, float("nan")
    if method == "monte-carlo":
        res = simulate_coverage(sc.dep, sc.radio, sc.env, sc.mc, n=sc.n)
        return res.estimate, res.ci_half_width
    if method == "nakagami-semianalytic":
        res = coverage_nakagami_semianalytic(sc.dep, sc.radio, sc.env, sc.mc, n=sc.n)
        return res.estimate, res.ci_half_width
    raise ConfigError(f"unknown method {method!r}")


def cmd_sweep(cfg: dict) -> int:
    axis = cfg["axis"]
    if axis not in AXES:
        raise ConfigError(f"--axis must be one of {', '.join(AXES)}")
    if cfg["from"] is None or cfg["to"] is None or cfg["step"] is None:
        raise ConfigError("sweep needs --from, --to and --step")
    if not cfg["out"]:
        raise ConfigError("sweep needs --out")
    methods = list(cfg["method"] or ["exact-quadrature"])
    for m in methods:
        if m not in SWEEP_METHODS:
            raise ConfigError(f"unknown method {m!r}")
    sc = _scenario(cfg)
    values = _grid(float(cfg["from"]), float(cfg["to"]), float(cfg["step"]))

    # On threshold/noise axes the point process and fading do not change, so
    # one sampled batch serves every Monte Carlo cell.
    mc_fast = None
    if "monte-carlo" in methods and axis in ("theta_db", "snr_db"):
        signal, intf, _ = sample_sinr_components(sc.dep, sc.env, sc.mc, sc.radio.fading, sc.n)

        def mc_fast(point: SimpleNamespace) -> tuple[float, float]:
            covered = int(np.count_nonzero(
                signal > point.radio.theta * (point.radio.beta0 + intf)
            ))
            lo, hi = wilson_interval(covered, sc.mc.trials, sc.mc.confidence_level)
            return covered / sc.mc.trials, 0.5 * (hi - lo)

    rows: list[list] = []
    any_failed = False
    for v in values:
        point = _point_scenario(sc, axis, v)
        row: list = [v]
        for m in methods:
            try:
                if m == "monte-carlo" and mc_fast is not None:
                    val, bound = mc_fast(point)
                else:
                    val, bound = _eval_method(m, point)
                row.extend([val, bound])
            except (DomainError, DivergenceError, QuadratureError):
                row.extend([None, None])
                any_failed = True
        rows.append(row)

    header = [axis]
    for m in methods:
        header.extend([f"coverage_{m}", f"error_bound_{m}"])
    _write_csv(cfg["out"], header, rows)
    print(f"sweep: wrote {len(rows)} rows over axis {axis} to {cfg['out']}")
    if any_failed:
        print("sweep: some points failed numerically (empty cells)")
        return 3
    return 0


def _optimize_height(cfg: dict, sc: SimpleNamespace) -> int:
    lo = float(cfg["from"]) if cfg["from"] is not None else sc.dep.l_min
    hi = float(cfg["to"]) if cfg["to"] is not None else sc.dep.l_max
    step = float(cfg["step"]) if cfg["step"] is not None else 5.0
    evaluator = cfg["evaluator"]
    if lo == hi:
        opt = optimal_height(sc.dep, sc.radio, sc.env, evaluator=evaluator,
                             bounds=(lo, hi), mc=sc.mc)
        _write_csv(cfg["out"], ["z", "coverage", "flag"],
                   [[opt.argument, opt.value, "optimum"]])
        print(f"optimize: degenerate bounds, optimum at z = {opt.argument:.17g} m, "
              f"coverage {opt.value:.17g}")
        return 0
    objective = height_objective_fn(sc.dep, sc.radio, sc.env, evaluator=evaluator,
                                    bounds=(lo, hi), mc=sc.mc)
    opt = optimal_height(sc.dep, sc.radio, sc.env, evaluator=evaluator,
                         bounds=(lo, hi), mc=sc.mc, grid_step=step)
    entries = [(z, objective(z), "") for z in _grid(lo, hi, step)]
    entries.append((opt.argument, opt.value, "optimum"))
    entries.sort(key=lambda e: e[0])
    _write_csv(cfg["out"], ["z", "coverage", "flag"], [list(e) for e in entries])
    print(f"optimize: optimal height {opt.argument:.17g} m, "
          f"coverage {opt.value:.17g}, method {opt.method}")
    return 0


def _optimize_density(cfg: dict, sc: SimpleNamespace) -> int:
    if sc.n != 4.0:
        raise ConfigError("density design assumes a fixed exponent of 4; pass --ple 4")
    lo = float(cfg["from"]) if cfg["from"] is not None else 0.01   # per km^2
    hi = float(cfg["to"]) if cfg["to"] is not None else 100.0
    if lo <= 0:
        raise ConfigError("density bounds must be positive")
    if lo == hi:
        est = coverage_rayleigh_n4_closed(
            replace(sc.dep, density=per_km2_to_per_m2(lo)), sc.radio, sc.env)
        _write_csv(cfg["out"], ["lambda_per_km2", "coverage_exact", "flag"],
                   [[lo, est.value, "optimum"]])
        print(f"optimize: degenerate bounds, optimum at lambda = {lo:.17g} per km^2, "
              f"coverage {est.value:.17g}")
        return 0
    if hi < lo:
        raise ConfigError("--to must be >= --from")

    coeffs = density_coeffs(sc.dep.z, sc.radio.theta, sc.radio.beta0, sc.env.d0,
                            rho_closed_n4(sc.radio.theta))
    closed = optimal_density_closed(coeffs)
    numeric = optimal_density_numeric(
        sc.dep, sc.radio, sc.env,
        bounds=(per_km2_to_per_m2(lo), per_km2_to_per_m2(hi)),
    )

    def row_at(lam_km2: float, flag: str) -> list:
        lam = per_km2_to_per_m2(lam_km2)
        exact = coverage_rayleigh_n4_closed(replace(sc.dep, density=lam), sc.radio, sc.env)
        return [lam_km2, exact.value, coverage_density_approx(lam, coeffs).value, flag]

    entries = [row_at(lam_km2, "") for lam_km2 in np.geomspace(lo, hi, 65)]
    entries.append(row_at(per_m2_to_per_km2(closed.argument), "optimum-closed"))
    entries.append(row_at(per_m2_to_per_km2(numeric.argument), "optimum-numeric"))
    entries.sort(key=lambda e: e[0])
    _write_csv(cfg["out"],
               ["lambda_per_km2", "coverage_exact", "coverage_approx", "flag"],
               entries)
    gap = abs(closed.argument - numeric.argument) / numeric.argument
    print(f"optimize: closed-form optimal density "
          f"{per_m2_to_per_km2(closed.argument):.17g} per km^2 "
          f"(approx coverage {closed.value:.17g})")
    print(f"optimize: numeric optimal density "
          f"{per_m2_to_per_km2(numeric.argument):.17g} per km^2 "
          f"(exact coverage {numeric.value:.17g}, method {numeric.method})")
    print(f"optimize: relative argument gap {gap:.17g}")
    return 0


def cmd_optimize(cfg: dict) -> int:
    if cfg["target"] not in ("height", "density"):
        raise ConfigError("--target must be height or density")
    if not cfg["out"]:
        raise ConfigError("optimize needs --out")
    if cfg["evaluator"] not in ("analytic", "mc"):
        raise ConfigError("--evaluator must be analytic or mc")
    sc = _scenario(cfg)
    try:
        if cfg["target"] == "height":
            return _optimize_height(cfg, sc)
        return _optimize_density(cfg, sc)
    except (DomainError, DivergenceError, QuadratureError) as exc:
        print(f"optimize: numeric failure: {exc}", file=sys.stderr)
        return 3


def _check_line(name: str, ok: bool, observed: float, tol: float) -> str:
    return (f"check={name} status={'pass' if ok else 'fail'} "
            f"observed={observed:.6e} tol={tol:.6e}")


def cmd_validate(cfg: dict) -> int:
    sc = _scenario(cfg)
    perturb = float(cfg["perturb_rho"])
    lines: list[str] = []
    all_ok = True

    # interference-factor identity: quadrature vs arctan closed form at n = 4
    worst = 0.0
    for theta in np.geomspace(1e-3, 1e3, 61):
        worst = max(worst, abs(perturb * rho(float(theta), 4.0) - rho_closed_n4(float(theta))))
    ok = worst <= 1e-8
    all_ok &= ok
    lines.append(_check_line("rho-identity", ok, worst, 1e-8))

    # exact quadrature vs closed form at n = 4 over a small scenario grid
    worst = 0.0
    for theta_db in (-10.0, 0.0, 10.0):
        for z in (50.0, 150.0):
            for lam_km2 in (0.5, 2.0):
                dep = DeploymentParams(per_km2_to_per_m2(lam_km2), z, min(20.0, z), 600.0)
                radio = replace(sc.radio, theta=db_to_linear(theta_db),
                                beta0=db_to_linear(-30.0))
                quad_est = coverage_rayleigh(dep, radio, sc.env, n=4.0)
                closed_est = coverage_rayleigh_n4_closed(dep, radio, sc.env)
                worst = max(worst, abs(quad_est.value - closed_est.value) / closed_est.value)
    ok = worst <= 1e-6
    all_ok &= ok
    lines.append(_check_line("closed-form-identity", ok, worst, 1e-6))

    # noise -> 0 convergence onto the interference-only expression
    dep = DeploymentParams(per_km2_to_per_m2(1.0), 100.0, 20.0, 600.0)
    base = replace(sc.radio, theta=1.0)
    limit = coverage_no_noise(dep, base, n=4.0).value
    gaps = [abs(coverage_rayleigh(dep, replace(base, beta0=b), sc.env, n=4.0).value - limit)
            for b in (1e-3, 1e-5, 1e-7)]
    ok = gaps[0] > gaps[1] > gaps[2] and gaps[2] <= 1e-4
    all_ok &= ok
    lines.append(_check_line("no-noise-limit", ok, gaps[2], 1e-4))

    # analytic vs Monte Carlo at the default scenario point
    point = replace(sc.radio, fading=FadingModel.rayleigh())
    analytic = coverage_rayleigh(sc.dep, point, sc.env, n=4.0)
    mc_res = simulate_coverage(sc.dep, point, sc.env, sc.mc, n=4.0)
    diff = abs(analytic.value - mc_res.estimate)
    tol = max(0.01, mc_res.ci_half_width)
    ok = diff <= tol
    all_ok &= ok
    lines.append(_check_line("mc-agreement", ok, diff, tol))

    for line in lines:
        print(line)
    n_pass = sum(1 for line in lines if "status=pass" in line)
    print(f"validate: {n_pass}/{len(lines)} checks passed")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavcov",
        description="Downlink coverage probability for a UAV aerial base "
                    "station network: sweeps, design optimization, validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--config", help="JSON config file; explicit flags override it")
        sp.add_argument("--snr-db", type=float, dest="snr_db",
                        help="reference SNR in dB (noise level is 10^(-SNR/10))")
        sp.add_argument("--theta-db", type=float, dest="theta_db",
                        help="SINR threshold in dB")
        sp.add_argument("--height-m", type=float, dest="height_m", help="altitude in m")
        sp.add_argument("--density-per-km2", type=float, dest="density_per_km2",
                        help="station density per km^2")
        sp.add_argument("--ple", type=float,
                        help="fixed path loss exponent (default: height-dependent)")
        sp.add_argument("--sui", action="store_const", const=True,
                        help="height-dependent terrain exponent (the default; "
                             "conflicts with --ple)")
        sp.add_argument("--terrain", help="terrain constants a,b,c (default SUI suburban)")
        sp.add_argument("--d0", type=float, help="reference distance in m")
        sp.add_argument("--fading", help="rayleigh | nakagami:m | rician:k (k linear)")
        sp.add_argument("--trials", type=int, help="Monte Carlo trials")
        sp.add_argument("--seed", type=int, help="Monte Carlo seed")
        sp.add_argument("--l-min", type=float, dest="l_min", help="lowest altitude in m")
        sp.add_argument("--l-max", type=float, dest="l_max", help="highest altitude in m")
        sp.add_argument("--out", help="CSV output path")

    sweep = sub.add_parser("sweep", help="coverage over a parameter grid, to CSV")
    add_common(sweep)
    sweep.add_argument("--axis", choices=AXES)
    sweep.add_argument("--from", type=float, dest="from_", help="grid start (axis units)")
    sweep.add_argument("--to", type=float, help="grid end (axis units)")
    sweep.add_argument("--step", type=float, help="grid step (axis units)")
    sweep.add_argument("--method", action="append", choices=SWEEP_METHODS,
                       help="coverage method column; repeatable")

    opt = sub.add_parser("optimize", help="optimal altitude or density, curve to CSV")
    add_common(opt)
    opt.add_argument("--target", choices=("height", "density"))
    opt.add_argument("--from", type=float, dest="from_",
                     help="search lower bound (m or per-km^2)")
    opt.add_argument("--to", type=float, help="search upper bound")
    opt.add_argument("--step", type=float, help="curve/grid step (height target)")
    opt.add_argument("--evaluator", choices=("analytic", "mc"),
                     help="objective evaluator for the height target")

    val = sub.add_parser("validate",
                         help="cross-method identity and simulation agreement checks")
    add_common(val)
    val.add_argument("--perturb-rho", type=float, dest="perturb_rho",
                     help="fault injection: scale the interference factor in the "
                          "identity check by this constant")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = merge_config(args)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "optimize":
            return cmd_optimize(cfg)
        return cmd_validate(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
