"""Batch front door: sample generation, estimation, rate experiments, checks.

Subcommands: ``simulate`` (emit raw samples), ``estimate`` (run the pipeline
on a sample file), ``rates`` (Monte Carlo rate experiment), ``check``
(constants / ongle / moment / deviation / oracle verification).

Sample files hold one observation per line: "x" for the density model,
"x,y" for regression. Config files are flat "key = value" lines with '#'
comments; every key is also a command-line flag and the flag wins.

Exit codes: 0 ok, 1 config error, 2 data error, 3 failed acceptance check.
All CSV output uses a header row, comma separators, '.' decimals and 17
significant digits, and is byte-stable for a fixed config and seed (wall
times are deliberately kept out of the CSV).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .aggregation import (
    LossSpec,
    beta_constants,
    multi_threshold_estimate,
    theory_constants,
)
from .coefficients import DensitySample, RegressionSample, min_rho
from .evaluate import (
    ExperimentResult,
    MonteCarloConfig,
    check_deviation,
    check_moment,
    mean_risk_by_n,
    monte_carlo,
    oracle_report,
    rate_slope,
)
from .simulate import get_target, sample_density, sample_regression
from .thresholding import ThresholdRule, verify_ongle
from .wavelets import build_family, midpoint_grid


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


class CheckFailure(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key = value lines; '#' starts a comment; later keys win."""
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _merge_config(args: argparse.Namespace, keys: dict[str, type]) -> dict:
    """Config-file values overridden by any explicitly set flags."""
    merged: dict = {}
    file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}
    for key, cast in keys.items():
        if key in file_values:
            try:
                merged[key] = _cast(file_values[key], cast)
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from exc
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _cast(text: str, cast: type):
    if cast is bool:
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    return cast(text)


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"invalid sample-size list {text!r}") from exc


def read_sample_file(path: str, model: str):
    """Parse "x" or "x,y" lines into the matching sample type."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read sample file {path}: {exc}") from exc
    xs, ys = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        parts = stripped.split(",")
        try:
            if model == "density":
                if len(parts) != 1:
                    raise ValueError("expected a single value")
                xs.append(float(parts[0]))
            else:
                if len(parts) != 2:
                    raise ValueError("expected 'x,y'")
                xs.append(float(parts[0]))
                ys.append(float(parts[1]))
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}: {line!r}") from exc
    try:
        if model == "density":
            return DensitySample(np.asarray(xs))
        return RegressionSample(np.asarray(xs), np.asarray(ys))
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def write_sample_file(path: Path, sample) -> None:
    if isinstance(sample, DensitySample):
        lines = [_fmt(float(v)) for v in sample.x]
    else:
        lines = [f"{_fmt(float(x))},{_fmt(float(y))}" for x, y in zip(sample.x, sample.y)]
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

_COMMON_KEYS = {
    "model": str, "target": str, "family": str, "cascade_depth": int,
    "rule": str, "scheme": str, "rho": str, "n": str, "reps": int,
    "seed": int, "grid_size": int, "noise": str, "B": float,
}


def _resolve_rho(text: str | None) -> float | None:
    if text is None or text == "theory":
        return None  # the pipeline substitutes the smallest deviation-valid constant
    try:
        value = float(text)
    except ValueError as exc:
        raise ConfigError(f"rho must be 'theory' or a number, got {text!r}") from exc
    if value <= 0:
        raise ConfigError("rho must be positive")
    return value


def cmd_simulate(args) -> int:
    cfg = _merge_config(args, _COMMON_KEYS)
    model = cfg.get("model", "density")
    try:
        target = get_target(cfg.get("target", "uniform"), model)
        n = int(cfg.get("n", 1024))
        seed = int(cfg.get("seed", 42))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if model == "density":
        sample = sample_density(target, n, seed)
    else:
        sample = sample_regression(target, n, cfg.get("noise", "bernoulli"), seed)
    write_sample_file(Path(args.out), sample)
    print(f"wrote {n} observations ({model}, {target.name}) to {args.out}")
    return 0


def cmd_estimate(args) -> int:
    cfg = _merge_config(args, _COMMON_KEYS)
    model = cfg.get("model", "density")
    if model not in ("density", "regression"):
        raise ConfigError(f"unknown model {model!r}")
    family = build_family(cfg.get("family", "Haar"), int(cfg.get("cascade_depth", 12)))
    rule = ThresholdRule(cfg.get("rule", "hard"))
    grid_size = int(cfg.get("grid_size", 2 ** 14))
    B = float(cfg.get("B", 2.0))
    loss = LossSpec.regression(grid_size) if model == "regression" \
        else LossSpec.density(B, grid_size)
    scheme = cfg.get("scheme", "AEW")
    sample = read_sample_file(args.input, model)
    rho = _resolve_rho(cfg.get("rho"))
    try:
        estimator, diag = multi_threshold_estimate(
            sample, family, rule, loss, rho=rho, scheme=scheme
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    grid = midpoint_grid(grid_size)
    header = ["x", "f_tilde"]
    columns = [grid, estimator.grid_values if hasattr(estimator, "grid_values")
               else estimator(grid)]
    if args.per_candidate:
        candidates = getattr(estimator, "candidates", None)
        if candidates is not None:
            for cand in candidates:
                header.append(f"candidate_u{cand.u}")
                columns.append(cand.grid_values)
    rows = [[col[i] for col in columns] for i in range(grid_size)]
    out = Path(args.out)
    _write_csv(out, header, rows)

    diag_path = out.with_suffix(out.suffix + ".diag.txt")
    lines = [
        f"model = {model}",
        f"scheme = {scheme}",
        f"rho = {_fmt(diag.rho)}",
        f"j1 = {diag.j1}",
        f"m = {diag.m}",
        f"l = {diag.l}",
        f"M = {diag.M}",
        f"chosen_u = {diag.chosen_u}",
        "u_grid = " + ",".join(str(u) for u in diag.u_grid),
        "empirical_risks = " + ",".join(_fmt(float(r)) for r in diag.risks),
        "weights = " + ",".join(_fmt(float(w)) for w in diag.weights),
    ]
    diag_path.write_text("\n".join(lines) + "\n")
    print(f"wrote estimate to {out} and diagnostics to {diag_path}")
    return 0


_ROW_HEADER = [
    "model", "target", "scheme", "rule", "rho", "n", "rep", "root_seed",
    "m", "l", "j1", "M", "u", "candidate_risk", "weight",
    "aggregate_risk", "erm_risk", "chosen_u", "universal_risk",
]


def results_to_rows(results: list[ExperimentResult], scheme: str, rule: str) -> list[list]:
    rows = []
    for r in results:
        for i, (risk, weight) in enumerate(zip(r.candidate_risks, r.weights)):
            rows.append([
                r.model, r.target, scheme, rule, r.rho, r.n, r.rep, r.root_seed,
                r.m, r.l, r.j1, r.M, i, risk, weight,
                r.aggregate_risk, r.erm_risk, r.chosen_u,
                r.universal_risk if r.universal_risk is not None else "",
            ])
    return rows


def rows_to_results(path: str) -> list[ExperimentResult]:
    """Rebuild experiment results from a rates CSV (inverse of results_to_rows)."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise DataError(f"{path}: empty file")
    header = lines[0].split(",")
    idx = {name: i for i, name in enumerate(header)}
    missing = [c for c in _ROW_HEADER if c not in idx]
    if missing:
        raise DataError(f"{path}: missing columns {missing}")
    grouped: dict[tuple, dict] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            key = (parts[idx["model"]], parts[idx["target"]],
                   int(parts[idx["n"]]), int(parts[idx["rep"]]))
            entry = grouped.setdefault(key, {
                "risks": {}, "weights": {},
                "meta": parts,
            })
            u = int(parts[idx["u"]])
            entry["risks"][u] = float(parts[idx["candidate_risk"]])
            entry["weights"][u] = float(parts[idx["weight"]])
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}:{lineno}: malformed row: {exc}") from exc
    results = []
    for (model, target, n, rep), entry in sorted(grouped.items()):
        parts = entry["meta"]
        us = sorted(entry["risks"])
        universal_text = parts[idx["universal_risk"]]
        results.append(ExperimentResult(
            model=model, target=target, n=n, rep=rep,
            root_seed=int(parts[idx["root_seed"]]),
            candidate_risks=tuple(entry["risks"][u] for u in us),
            aggregate_risk=float(parts[idx["aggregate_risk"]]),
            erm_risk=float(parts[idx["erm_risk"]]),
            weights=tuple(entry["weights"][u] for u in us),
            chosen_u=int(parts[idx["chosen_u"]]),
            universal_risk=float(universal_text) if universal_text else None,
            m=int(parts[idx["m"]]), l=int(parts[idx["l"]]),
            j1=int(parts[idx["j1"]]), rho=float(parts[idx["rho"]]),
            wall_time=0.0,
        ))
    return results


def cmd_rates(args) -> int:
    cfg = _merge_config(args, {**_COMMON_KEYS, "universal": bool, "universal_c": float})
    model = cfg.get("model", "density")
    target_name = cfg.get("target", "triangle")
    ns = _parse_n_list(cfg.get("n", "512,1024,2048,4096,8192"))
    if len(ns) < 3:
        raise ConfigError("rates needs at least three sample sizes")
    reps = int(cfg.get("reps", 100))
    if reps < 1:
        raise ConfigError("reps must be at least 1")
    rho = _resolve_rho(cfg.get("rho"))
    try:
        config = MonteCarloConfig(
            model=model,
            target=target_name,
            ns=ns,
            reps=reps,
            root_seed=int(cfg.get("seed", 42)),
            family=cfg.get("family", "Haar"),
            cascade_depth=int(cfg.get("cascade_depth", 12)),
            rule=cfg.get("rule", "hard"),
            scheme=cfg.get("scheme", "AEW"),
            rho=rho,
            grid_size=int(cfg.get("grid_size", 2 ** 14)),
            noise=cfg.get("noise", "bernoulli"),
            include_universal=bool(cfg.get("universal", False)),
            universal_c=float(cfg.get("universal_c", 1.0)),
        )
        target = get_target(target_name, model)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    results = monte_carlo(config)
    out = Path(args.out)
    _write_csv(out, _ROW_HEADER, results_to_rows(results, config.scheme, config.rule))

    risk_column = "aggregate_risk" if config.scheme == "AEW" else "erm_risk"
    ns_sorted, means, _ = mean_risk_by_n(results, risk_column)
    slope, stderr = rate_slope(ns_sorted, means)
    s = target.smoothness[0]
    expected = -1.0 if math.isinf(s) else -2.0 * s / (2.0 * s + 1.0)
    summary_header = ["model", "target", "scheme", "rule", "rho_mode", "reps",
                      "n_values", "slope", "slope_stderr", "expected_slope"]
    summary_row = [
        config.model, config.target, config.scheme, config.rule,
        "theory" if config.rho is None else _fmt(config.rho),
        reps, ";".join(str(n) for n in ns_sorted), slope, stderr, expected,
    ]
    if config.include_universal:
        _, u_means, _ = mean_risk_by_n(results, "universal_risk")
        u_slope, u_stderr = rate_slope(ns_sorted, u_means)
        summary_header += ["universal_slope", "universal_slope_stderr"]
        summary_row += [u_slope, u_stderr]
    summary_path = out.with_suffix(".summary.csv")
    _write_csv(summary_path, summary_header, [summary_row])
    print(f"slope = {slope:.4f} +/- {stderr:.4f} (expected {expected:.4f})")
    print(f"wrote rows to {out} and summary to {summary_path}")
    return 0


def cmd_check(args) -> int:
    what = args.what
    if what == "constants":
        c = float(args.c if args.c is not None else 16.0)
        K = float(args.K if args.K is not None else 1.0)
        beta1, beta2 = beta_constants(c, K)
        print(f"beta1 = {_fmt(beta1)}")
        print(f"beta2 = {_fmt(beta2)}")
        return 0

    if what == "ongle":
        rule = ThresholdRule(
            args.rule or "hard",
            c1=float(args.c1) if args.c1 is not None else None,
            c2=float(args.c2) if args.c2 is not None else None,
        )
        report = verify_ongle(rule, (0.1, 0.5, 1.0, 2.0), 0.01, 10.0)
        print(f"rule = {report.rule_kind}, c1 = {_fmt(report.c1)}, c2 = {_fmt(report.c2)}")
        print(f"points checked = {report.points_checked}")
        if report.passed:
            print("pass")
            return 0
        x, y, u, lhs, rhs = report.witness
        print(f"FAIL at x={x} y={y} u={u}: lhs={lhs} > rhs={rhs}")
        raise CheckFailure("stability condition violated")

    if what == "moment":
        family = build_family(args.family or "Haar")
        target = get_target(args.target or "uniform", "density")
        ns = _parse_n_list(args.n or "256,1024,4096")
        reps = int(args.reps or 10000)
        report = check_moment(
            family, target, [(2, 0), (3, 1)], ns, reps, int(args.seed or 42)
        )
        for n, m4 in zip(report.ns, report.fourth_moments):
            print(f"n = {n}: E|beta_hat - beta|^4 = {_fmt(m4)}")
        print(f"slope = {report.slope:.4f} +/- {report.stderr:.4f}, band {report.band}")
        if report.passed:
            print("pass")
            return 0
        raise CheckFailure("moment slope outside band")

    if what == "deviation":
        family = build_family(args.family or "Haar")
        target = get_target(args.target or "uniform", "density")
        n = int(args.n or 1024)
        reps = int(args.reps or 100000)
        rho = float(args.rho) if args.rho not in (None, "theory") \
            else min_rho(max(1.0, target.bound), family.psi_sup, "density")
        a_values = tuple(float(a) for a in (args.a or "1,2,3,4").split(","))
        report = check_deviation(family, target, rho, a_values, n, reps,
                                 int(args.seed or 42))
        for a, f, b, t in zip(report.a_values, report.frequencies,
                              report.bounds, report.tolerances):
            print(f"a = {a}: frequency = {_fmt(f)}, bound = {_fmt(b)} (+3se {_fmt(t)})")
        if report.passed:
            print("pass")
            return 0
        raise CheckFailure("deviation frequency above bound")

    if what == "oracle":
        if not args.input:
            raise ConfigError("check oracle requires --input rows.csv")
        results = rows_to_results(args.input)
        keys = {(r.model, r.target, r.n) for r in results}
        if len(keys) > 1:
            # keep only the largest n by default; the user can pre-filter
            n_pick = max(k[2] for k in keys)
            results = [r for r in results if r.n == n_pick]
        model = results[0].model
        target = get_target(results[0].target, model)
        constants = theory_constants(model, max(1.0, target.bound))
        report = oracle_report(results, constants, float(args.epsilon or 1.0))
        print(f"model = {report.model}, target = {report.target}, n = {report.n}, "
              f"reps = {report.n_reps}, M = {report.M}, l = {report.l}")
        print(f"LHS (mean aggregate risk)     = {_fmt(report.lhs)}")
        print(f"min candidate mean risk       = {_fmt(report.min_candidate_mean)}")
        print(f"residual 4 log M/(eps b2 l)   = {_fmt(report.residual)}")
        print(f"RHS                           = {_fmt(report.rhs)}")
        print(f"ratio LHS / min-candidate     = {_fmt(report.ratio)}")
        print(f"best epsilon on grid          = {_fmt(report.best_epsilon)} "
              f"(RHS {_fmt(report.best_rhs)})")
        if report.passed_formal:
            print("bound satisfied (non-sharp at this scale)")
            return 0
        raise CheckFailure("oracle bound violated")

    raise ConfigError(f"unknown check {what!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multithresh",
        description="Adaptive wavelet estimation by aggregation of thresholded estimators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--model", choices=["density", "regression"])
        p.add_argument("--target")
        p.add_argument("--family")
        p.add_argument("--cascade-depth", dest="cascade_depth", type=int)
        p.add_argument("--rule", choices=["hard", "soft", "garrote"])
        p.add_argument("--scheme", choices=["AEW", "ERM"])
        p.add_argument("--rho", help="'theory' or a positive number")
        p.add_argument("--n", help="sample size, or comma list for rates")
        p.add_argument("--reps", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--grid-size", dest="grid_size", type=int)
        p.add_argument("--noise", choices=["bernoulli", "uniform"])
        p.add_argument("--B", type=float, help="density bound (clip ceiling)")

    p_sim = sub.add_parser("simulate", help="emit a raw sample file")
    add_common(p_sim)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_est = sub.add_parser("estimate", help="run the estimator on a sample file")
    add_common(p_est)
    p_est.add_argument("--input", required=True)
    p_est.add_argument("--out", required=True)
    p_est.add_argument("--per-candidate", action="store_true",
                       help="also write every candidate's grid values")
    p_est.set_defaults(func=cmd_estimate)

    p_rates = sub.add_parser("rates", help="Monte Carlo rate experiment")
    add_common(p_rates)
    p_rates.add_argument("--out", required=True)
    p_rates.add_argument("--universal", action="store_true", default=None,
                         help="also run the universal-threshold baseline")
    p_rates.add_argument("--universal-c", dest="universal_c", type=float)
    p_rates.set_defaults(func=cmd_rates)

    p_check = sub.add_parser("check", help="verification reports")
    p_check.add_argument("what", choices=["constants", "ongle", "moment",
                                          "deviation", "oracle"])
    add_common(p_check)
    p_check.add_argument("--c", type=float, help="margin constant")
    p_check.add_argument("--K", type=float, help="loss-difference bound")
    p_check.add_argument("--c1", type=float)
    p_check.add_argument("--c2", type=float)
    p_check.add_argument("--a", help="comma list of deviation sizes")
    p_check.add_argument("--input", help="rates rows CSV (check oracle)")
    p_check.add_argument("--epsilon", type=float)
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
