"""Command-line surface: one subcommand per capability, CSV + JSON artifacts.

Every run resolves its configuration from four layers (later wins):
built-in defaults, a ``key = value`` config file (``--config``), environment
variables prefixed ``EASTMODEL_``, and explicit flags.  Unknown config-file
keys are rejected.  The resolved configuration, embedded in the JSON summary
under ``config``, reproduces the run when fed back as flags.

Artifacts land in the ``--out`` directory as ``<subcommand>.csv`` (RFC-4180
style: header row, UTF-8, '.' decimal, CRLF records) and ``<subcommand>.json``
(top-level keys config / results / verdicts / meta).  Floats are serialized
via ``repr``, the shortest round-trip form, so output is byte-stable for a
fixed (config, seed, version).

Exit codes: 0 success, 1 at least one verdict failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__, exact, limits, reach
from .core import Interval, ModelParams, RenewalLaw, TimeScale
from .experiments import (
    ExperimentReport,
    Verdict,
    aging_experiment,
    convergence_experiment,
    domain_length_experiment,
    plateau_experiment,
    renewal_vacancy_profile,
)
from .simulate import SimMode, measure_activity, measure_persistence

__all__ = ["main"]

ENV_PREFIX = "EASTMODEL_"


class ConfigError(ValueError):
    """Bad flag, file key, or environment override; maps to exit code 2.

    Subclasses ValueError so argparse turns a failing ``type=`` callback
    into its own usage error instead of a traceback.
    """


# --------------------------------------------------------------------------
# option specs: one table drives argparse, the config file, and the env vars
# --------------------------------------------------------------------------

def _parse_float_list(text: str) -> list:
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as err:
        raise ConfigError(f"expected comma-separated floats, got {text!r}") from err


def _parse_pairs(text: str) -> list:
    out = []
    for tok in str(text).split(","):
        if not tok.strip():
            continue
        try:
            m, n = tok.split(":")
            out.append([int(m), int(n)])
        except ValueError as err:
            raise ConfigError(f"expected m:n pairs, got {tok!r}") from err
    return out


def _parse_mu(text: str) -> RenewalLaw:
    """Gap-law spec: geometric:R | pointmass:D | pareto:ALPHA | table:W1,W2,..."""
    kind, _, arg = str(text).partition(":")
    try:
        if kind == "geometric":
            return RenewalLaw.geometric(float(arg))
        if kind == "pointmass":
            return RenewalLaw.point_mass(int(arg))
        if kind == "pareto":
            return RenewalLaw.pareto_tail(float(arg))
        if kind == "table":
            return RenewalLaw.table_pmf([float(w) for w in arg.split(",")])
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigError(f"bad gap-law spec {text!r}: {err}") from err
    raise ConfigError(
        f"unknown gap law {kind!r}; use geometric:R, pointmass:D, "
        "pareto:ALPHA, or table:W1,W2,..."
    )


def _validate_mu(text: str) -> str:
    _parse_mu(text)  # reject bad specs at resolve time
    return str(text)


def _unparse(value):
    """Back to the flag syntax, for the round-trippable embedded config."""
    if isinstance(value, list):
        return ",".join(
            ":".join(str(x) for x in v) if isinstance(v, list) else repr(float(v))
            for v in value
        )
    return value


@dataclass(frozen=True)
class Opt:
    name: str  # flag --name; config key name; env EASTMODEL_NAME
    parse: object  # str -> value
    default: object
    help: str

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


_COMMON = [
    Opt("seed", int, 0, "base seed for every random stream"),
    Opt("out", str, ".", "output directory for the CSV and JSON artifacts"),
    Opt("format", str, "both", "artifacts to write: csv, json, or both"),
    Opt("threads", int, 0, "cap on internal worker threads (0 = leave as is)"),
]

_SPECS = {
    "gap": [
        Opt("q", float, 0.5, "vacancy probability"),
        Opt("L", int, 10, "largest window length; rows cover L = 1..L"),
    ],
    "lsi": [
        Opt("q", float, 0.5, "vacancy probability"),
        Opt("levels", int, 16, "xi levels; bounds at levels and levels/2"),
        Opt("alpha", float, 2.0, "log-Sobolev exponent in (1, 2]"),
    ],
    "persistence": [
        Opt("q", float, 0.3, "vacancy probability"),
        Opt("L", int, 12, "window length (exact gap computed at the same L)"),
        Opt("horizon", float, 30.0, "largest sample time"),
        Opt("points", int, 10, "log-grid sample times up to the horizon"),
        Opt("replicas", int, 10000, "Monte Carlo replicas"),
        Opt("mode", str, "faithful", "scheduler: faithful or rejection-free"),
    ],
    "activity": [
        Opt("q", float, 0.5, "vacancy probability"),
        Opt("N", int, 64, "window length for the Monte Carlo rate"),
        Opt("horizon", float, 200.0, "time horizon of the flip count"),
        Opt("replicas", int, 2000, "Monte Carlo replicas"),
        Opt("exact_N", int, 12, "window for the exact tilted-eigenvalue checks"),
        Opt("mode", str, "faithful", "scheduler: faithful or rejection-free"),
    ],
    "reach": [
        Opt("n", int, 4, "vacancy budget; rows cover 1..n"),
    ],
    "quench-plateau": [
        Opt("q", float, 0.05, "vacancy probability (q <= 0.1)"),
        Opt("mu", _validate_mu, "geometric:0.5", "gap law of the renewal start"),
        Opt("epsilon", float, 0.1, "window-edge exponent of the time ladder"),
        Opt("n_max", int, 2, "deepest stalling period measured"),
        Opt("replicas", int, 20000, "Monte Carlo replicas"),
        Opt("window", int, 0, "window length (0 = default max(96, 4/q))"),
        Opt("mode", str, "rejection-free", "scheduler"),
    ],
    "quench-aging": [
        Opt("q", float, 0.05, "vacancy probability (q <= 0.1)"),
        Opt("mu", _validate_mu, "geometric:0.5", "gap law of the renewal start"),
        Opt("epsilon", float, 0.1, "window-edge exponent of the time ladder"),
        Opt("pairs", _parse_pairs, "1:2,1:3", "stalling-period pairs m:n"),
        Opt("site", int, 1, "probe site (>= 1)"),
        Opt("replicas", int, 4000, "Monte Carlo replicas"),
        Opt("window", int, 0, "window length (0 = default max(96, 4/q))"),
        Opt("mode", str, "rejection-free", "scheduler"),
    ],
    "quench-domains": [
        Opt("q", float, 0.05, "vacancy probability (q <= 0.1)"),
        Opt("mu", _validate_mu, "geometric:0.5", "gap law of the renewal start"),
        Opt("n", int, 2, "stalling period of the measurement"),
        Opt("epsilon", float, 0.02, "ladder exponent; small = late measurement"),
        Opt("s_grid", _parse_float_list, "0.5,1,2", "Laplace evaluation points"),
        Opt("replicas", int, 20000, "Monte Carlo replicas"),
        Opt("window", int, 0, "window length (0 = 128, or 4096 heavy-tail)"),
        Opt("t_measure", float, 0.0, "measurement time (0 = t_{n+1}^{1-eps})"),
        Opt("confirm", float, 0.0, "wall confirmation span (0 = 1/q)"),
    ],
    "converge": [
        Opt("alpha", float, 0.9, "Bernoulli density of the initial law"),
        Opt("q", float, 0.3, "vacancy probability"),
        Opt("L", int, 10, "window length (exact semigroup, L <= 24)"),
        Opt(
            "convention",
            str,
            "occupancy",
            "alpha counts occupied sites (occupancy) or empty ones (vacancy)",
        ),
        Opt("t_grid", _parse_float_list, "", "times (empty = auto log grid)"),
        Opt("replicas", int, 0, "subsample Q instead of summing (0 = exact)"),
    ],
    "limits-eval": [
        Opt("c0", float, 1.0, "universality exponent of the gap law"),
        Opt("s_min", float, 0.25, "left end of the uniform Laplace grid"),
        Opt("s_max", float, 4.0, "right end of the uniform Laplace grid"),
        Opt("s_points", int, 16, "grid size (uniform, for the sign checks)"),
        Opt("density_x", _parse_float_list, "1.5,2.5,5", "density eval points"),
    ],
    "selftest": [],
}


# --------------------------------------------------------------------------
# config resolution
# --------------------------------------------------------------------------

def _opts_for(sub: str) -> list:
    return _SPECS[sub] + _COMMON


def _apply(opt: Opt, raw, where: str):
    try:
        return opt.parse(raw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad value for {opt.name} ({where}): {err}") from err


def _read_config_file(path: str) -> dict:
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, raw = line.partition("=")
        out[key.strip().replace("-", "_")] = raw.strip()
    return out


def _resolve_config(sub: str, ns: argparse.Namespace) -> dict:
    opts = {o.name: o for o in _opts_for(sub)}
    cfg = {name: o.default for name, o in opts.items()}
    # parse string defaults (mu, grids) through the same path as user input
    for name, o in opts.items():
        if callable(o.parse) and o.parse not in (int, float, str):
            cfg[name] = _apply(o, cfg[name], "default")

    config_path = getattr(ns, "config", None)
    if config_path:
        for key, raw in _read_config_file(config_path).items():
            if key not in opts:
                raise ConfigError(
                    f"unknown key {key!r} in {config_path} for '{sub}'"
                )
            cfg[key] = _apply(opts[key], raw, config_path)

    # env keys arrive uppercased (EASTMODEL_EXACT_N); match names caselessly
    local = {name.lower(): name for name in opts}
    every_key = {o.name.lower() for spec in _SPECS.values() for o in spec} | {
        o.name.lower() for o in _COMMON
    }
    for var, raw in sorted(os.environ.items()):
        if not var.startswith(ENV_PREFIX):
            continue
        key = var[len(ENV_PREFIX) :].lower()
        if key in local:
            name = local[key]
            cfg[name] = _apply(opts[name], raw, var)
        elif key not in every_key:
            raise ConfigError(f"unknown environment override {var}")
        # keys valid for other subcommands are ignored here

    for name in opts:
        if hasattr(ns, name):
            cfg[name] = getattr(ns, name)

    if cfg["format"] not in ("csv", "json", "both"):
        raise ConfigError("format must be csv, json, or both")
    return cfg


def _flag_parser(o: Opt):
    def parse(raw):
        return _apply(o, raw, "flag")

    parse.__name__ = o.name  # argparse quotes this name in usage errors
    return parse


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="east",
        description="East-model toolkit: exact spectra, kinetic Monte Carlo, "
        "constrained reachability, and quench experiments.",
        epilog="Configuration precedence: flags > environment variables "
        f"({ENV_PREFIX}<KEY>, e.g. {ENV_PREFIX}Q=0.4, {ENV_PREFIX}S_GRID="
        "'0.5,1') > --config file (key = value lines) > defaults. "
        "Unknown config keys are rejected.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for sub, spec in _SPECS.items():
        sp = subs.add_parser(
            sub,
            help=_SUMMARIES[sub],
            description=_SUMMARIES[sub],
            epilog=parser.epilog,
        )
        for o in spec + _COMMON:
            sp.add_argument(
                o.flag,
                dest=o.name,
                default=argparse.SUPPRESS,
                type=_flag_parser(o),
                help=f"{o.help} (default: {o.default})",
                metavar="V",
            )
        sp.add_argument(
            "--config",
            dest="config",
            default=None,
            metavar="PATH",
            help="key = value config file, overridden by env vars and flags",
        )
    return parser


_SUMMARIES = {
    "gap": "spectral gap with certified residual for L = 1..L",
    "lsi": "log-Sobolev bounds at two window scales",
    "persistence": "Monte Carlo persistence against the spectral bound",
    "activity": "flip-rate law of large numbers and tilted-eigenvalue checks",
    "reach": "constrained-reachability range and state counts",
    "quench-plateau": "stalling plateaus of the vacancy and never-flipped curves",
    "quench-aging": "two-time vacancy covariance across stalling periods",
    "quench-domains": "rescaled domain lengths against the limit law",
    "converge": "relaxation from a Bernoulli product measure",
    "limits-eval": "limit-law transforms, densities, and sign checks",
    "selftest": "fast structural checks of every module",
}


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def _fmt_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _write_outputs(report: ExperimentReport, cfg: dict, sub: str) -> list:
    payload = report.to_payload()
    payload["meta"]["library_config"] = payload["config"]
    payload["config"] = {
        "subcommand": sub,
        **{o.name: _jsonable(_unparse(cfg[o.name])) for o in _opts_for(sub)},
    }
    payload["meta"]["versions"] = {
        "eastmodel": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }
    payload["meta"]["seed"] = int(cfg["seed"])
    payload["meta"].setdefault("wall_time_s", 0.0)

    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if cfg["format"] in ("csv", "both"):
        path = outdir / f"{sub}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            header = list(report.rows[0].keys()) if report.rows else []
            writer.writerow(header)
            for row in report.rows:
                writer.writerow([_fmt_cell(row[k]) for k in header])
        written.append(path)
    if cfg["format"] in ("json", "both"):
        path = outdir / f"{sub}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(payload), fh, indent=2)
            fh.write("\n")
        written.append(path)
    return written


# --------------------------------------------------------------------------
# runners
# --------------------------------------------------------------------------

def _run_gap(cfg: dict) -> ExperimentReport:
    started = time.perf_counter()
    params = ModelParams(cfg["q"])
    rows, gaps = [], []
    for L in range(1, cfg["L"] + 1):
        res = exact.spectral_gap(L, params)
        rows.append(
            {"L": L, "q": cfg["q"], "gap": res.gap, "residual": res.residual}
        )
        gaps.append(res.gap)
    worst = max(
        (b - a for a, b in zip(gaps[:-1], gaps[1:])), default=0.0
    )
    verdicts = [
        Verdict(
            name="gap-monotone",
            passed=worst <= 1e-8,
            observed=worst,
            target=0.0,
            tolerance="gap(L+1) - gap(L) <= 1e-8 (solver tolerance)",
        )
    ]
    return ExperimentReport(
        "gap",
        {"q": cfg["q"], "L": cfg["L"]},
        rows,
        verdicts,
        seed=cfg["seed"],
        meta={"wall_time_s": round(time.perf_counter() - started, 3)},
    )


def _run_lsi(cfg: dict) -> ExperimentReport:
    started = time.perf_counter()
    params = ModelParams(cfg["q"])
    if cfg["levels"] < 6:
        raise ConfigError("levels must be >= 6 so that levels/2 >= 3")
    rows = []
    by_levels = {}
    for lv in (cfg["levels"] // 2, cfg["levels"]):
        b = exact.lsi_bounds(lv, params, cfg["alpha"])
        by_levels[lv] = b
        rows.append(
            {
                "levels": lv,
                "q": cfg["q"],
                "alpha": cfg["alpha"],
                "lower": b.lower,
                "lower_lambda": b.lower_lambda,
                "upper": b.upper,
                "gap": b.gap,
            }
        )
    small, big = by_levels[cfg["levels"] // 2], by_levels[cfg["levels"]]
    ratio = big.lower / small.lower
    verdicts = [
        Verdict(
            name="lsi-doubling",
            passed=ratio >= 1.5,
            observed=ratio,
            target=1.5,
            tolerance="lower(2L)/lower(L) >= 1.5: the constant grows with "
            "the scale, no uniform log-Sobolev inequality",
        ),
        Verdict(
            name="lsi-order",
            passed=all(b.upper >= b.lower for b in by_levels.values()),
            observed=min(b.upper - b.lower for b in by_levels.values()),
            target=0.0,
            tolerance="upper bound >= lower bound at every scale",
        ),
    ]
    return ExperimentReport(
        "lsi",
        {"q": cfg["q"], "levels": cfg["levels"], "alpha": cfg["alpha"]},
        rows,
        verdicts,
        seed=cfg["seed"],
        meta={"wall_time_s": round(time.perf_counter() - started, 3)},
    )


def _run_persistence(cfg: dict) -> ExperimentReport:
    started = time.perf_counter()
    params = ModelParams(cfg["q"])
    L, horizon = cfg["L"], cfg["horizon"]
    t_grid = np.geomspace(horizon / 30.0, horizon, cfg["points"])
    curve = measure_persistence(
        params,
        L,
        horizon,
        t_grid,
        cfg["replicas"],
        seed=cfg["seed"],
        mode=SimMode(cfg["mode"]),
    )
    gap = exact.spectral_gap(L, params).gap
    rate = gap * min(params.p, params.q) / 4.0
    rows = []
    margin = -math.inf
    for t, f, se in zip(curve.times, curve.fraction, curve.stderr):
        bound = 2.0 * math.exp(-rate * t)
        rows.append(
            {
                "t": float(t),
                "fraction": float(f),
                "stderr": float(se),
                "bound": bound,
            }
        )
        margin = max(margin, f - 3.0 * se - bound)
    lam = gap / 2.0
    beta = float(exact.persistence_exponent(L, params, [lam])[0])
    fk_cap = params.p * params.q / (1.0 + params.p) + params.p
    verdicts = [
        Verdict(
            name="persistence-upper-bound",
            passed=margin <= 0.0,
            observed=margin,
            target=0.0,
            tolerance="F(t) <= 2 exp(-gap min(p,q) t / 4) + 3 * stderr "
            "at every grid time",
        ),
        Verdict(
            name="feynman-kac-slope",
            passed=beta / lam <= fk_cap + 1e-8,
            observed=beta / lam,
            target=fk_cap,
            tolerance="beta(gap/2)/(gap/2) <= pq/(1+p) + p + 1e-8",
        ),
    ]
    return ExperimentReport(
        "persistence",
        {
            "q": cfg["q"],
            "L": L,
            "horizon": horizon,
            "points": cfg["points"],
            "replicas": cfg["replicas"],
            "mode": cfg["mode"],
        },
        rows,
        verdicts,
        seed=cfg["seed"],
        meta={
            "gap": gap,
            "beta_half_gap": beta,
            "boundary_margin_ok": curve.boundary_margin_ok,
            "wall_time_s": round(time.perf_counter() - started, 3),
        },
    )


def _run_activity(cfg: dict) -> ExperimentReport:
    started = time.perf_counter()
    params = ModelParams(cfg["q"])
    est = measure_activity(
        params,
        cfg["N"],
        cfg["horizon"],
        cfg["replicas"],
        seed=cfg["seed"],
        mode=SimMode(cfg["mode"]),
    )
    exact_rates = exact.stationary_activity_rate(cfg["N"], params)
    Ne = cfg["exact_N"]
    psi0 = float(exact.activity_scgf(Ne, params, [0.0])[0])
    h = 1e-4
    psi_pm = exact.activity_scgf(Ne, params, [-h, h])
    fd_slope = float((psi_pm[1] - psi_pm[0]) / (2.0 * h))
    phi = exact.activity_phi(Ne, params, [-40.0, -60.0])
    rows = [
        {
            "quantity": "rate_bulk",
            "value": est.rate_bulk,
            "stderr": est.stderr_bulk,
            "target": exact_rates["bulk"],
        },
        {
            "quantity": "rate_total",
            "value": est.rate_total,
            "stderr": est.stderr_total,
            "target": exact_rates["total"],
        },
        {
            "quantity": "psi_at_zero",
            "value": psi0,
            "stderr": 0.0,
            "target": 0.0,
        },
        {
            "quantity": "psi_slope_at_zero",
            "value": fd_slope,
            "stderr": 0.0,
            "target": float(
                exact.stationary_activity_rate(Ne, params)["total"]
            ),
        },
        {
            "quantity": "phi_at_-40",
            "value": float(phi[0]),
            "stderr": 0.0,
            "target": float(phi[1]),
        },
        {
            "quantity": "phi_at_-60",
            "value": float(phi[1]),
            "stderr": 0.0,
            "target": float(phi[1]),
        },
    ]
    verdicts = [
        Verdict(
            name="activity-bulk-lln",
            passed=abs(est.rate_bulk - exact_rates["bulk"])
            <= 3.0 * est.stderr_bulk,
            observed=est.rate_bulk,
            target=exact_rates["bulk"],
            tolerance="|empirical bulk rate - 2 p q^2| <= 3 * stderr",
        ),
        Verdict(
            name="activity-scgf-origin",
            passed=abs(psi0) <= 1e-10,
            observed=psi0,
            target=0.0,
            tolerance="|psi_N(0)| <= 1e-10",
        ),
        Verdict(
            name="activity-fd-slope",
            passed=abs(fd_slope - est.rate_total)
            <= 3.0 * est.stderr_total + 0.02,
            observed=fd_slope,
            target=est.rate_total,
            tolerance="|psi_N'(0) - Monte Carlo total rate| <= 3 * stderr "
            "+ 0.02 window-size slack",
        ),
        Verdict(
            name="activity-phi-flattening",
            passed=abs(float(phi[0]) - float(phi[1]))
            <= 0.05 * abs(float(phi[0])),
            observed=float(phi[1]),
            target=float(phi[0]),
            tolerance="|phi(-40) - phi(-60)| <= 5% of |phi(-40)|: the "
            "inactive plateau has set in",
        ),
    ]
    return ExperimentReport(
        "activity",
        {
            "q": cfg["q"],
            "N": cfg["N"],
            "horizon": cfg["horizon"],
            "replicas": cfg["replicas"],
            "exact_N": Ne,
            "mode": cfg["mode"],
        },
        rows,
        verdicts,
        seed=cfg["seed"],
        meta={"wall_time_s": round(time.perf_counter() - started, 3)},
    )


def _run_reach(cfg: dict) -> ExperimentReport:
    started = time.perf_counter()
    if not 1 <= cfg["n"] <= reach.MAX_BUDGET:
        raise ConfigError(f"n must lie in 1..{reach.MAX_BUDGET}")
    rows = []
    ok = True
    for k in range(1, cfg["n"] + 1):
        res = reach.enumerate_reachable(k)
        ok &= res.ell == 2 ** k - 1
        rows.append(
            {
                "n": k,
                "ell": res.ell,
                "states": res.total,
                "bfs_depth": res.bfs_depth,
                "count_bound": res.bound_value,
                "count_bound_holds": res.bound_holds,
            }
        )
    verdicts = [
        Verdict(
            name="reach-range-formula",
            passed=ok,
            observed=rows[-1]["ell"],
            target=2 ** cfg["n"] - 1,
            tolerance="ell(n) = 2^n - 1 exactly for every n",
        )
    ]
    return ExperimentReport(
        "reach",
        {"n": cfg["n"]},
        rows,
        verdicts,
        seed=cfg["seed"],
        meta={"wall_time_s": round(time.perf_counter() - started, 3)},
    )


def _mu_of(cfg: dict) -> RenewalLaw:
    return _parse_mu(cfg["mu"])


def _window_of(cfg: dict) -> Interval | None:
    return Interval(0, cfg["window"] - 1) if cfg["window"] else None


def _run_quench_plateau(cfg: dict) -> ExperimentReport:
    return plateau_experiment(
        _mu_of(cfg),
        ModelParams(cfg["q"]),
        epsilon=cfg["epsilon"],
        n_max=cfg["n_max"],
        replicas=cfg["replicas"],
        window=_window_of(cfg),
        seed=cfg["seed"],
        mode=SimMode(cfg["mode"]),
    )


def _run_quench_aging(cfg: dict) -> ExperimentReport:
    return aging_experiment(
        _mu_of(cfg),
        ModelParams(cfg["q"]),
        epsilon=cfg["epsilon"],
        pairs=tuple(tuple(p) for p in cfg["pairs"]),
        site=cfg["site"],
        replicas=cfg["replicas"],
        window=_window_of(cfg),
        seed=cfg["seed"],
        mode=SimMode(cfg["mode"]),
    )


def _run_quench_domains(cfg: dict) -> ExperimentReport:
    return domain_length_experiment(
        _mu_of(cfg),
        ModelParams(cfg["q"]),
        n=cfg["n"],
        epsilon=cfg["epsilon"],
        s_grid=tuple(cfg["s_grid"]),
        replicas=cfg["replicas"],
        window=_window_of(cfg),
        seed=cfg["seed"],
        t_measure=cfg["t_measure"] or None,
        confirm=cfg["confirm"] or None,
    )


def _run_converge(cfg: dict) -> ExperimentReport:
    return convergence_experiment(
        cfg["alpha"],
        ModelParams(cfg["q"]),
        L=cfg["L"],
        t_grid=cfg["t_grid"] or None,
        convention=cfg["convention"],
        replicas=cfg["replicas"] or None,
        seed=cfg["seed"],
    )


def _run_limits(cfg: dict) -> ExperimentReport:
    started = time.perf_counter()
    c0 = cfg["c0"]
    if cfg["s_points"] < 4:
        raise ConfigError("s_points must be >= 4 for the sign checks")
    s_grid = np.linspace(cfg["s_min"], cfg["s_max"], cfg["s_points"])
    lap = np.array([limits.laplace_X(float(s), c0) for s in s_grid])
    rows = [{"quantity": "laplace_at_0", "arg": 0.0, "value": 1.0}]
    for s, v in zip(s_grid, lap):
        rows.append(
            {
                "quantity": "exp_integral_E1",
                "arg": float(s),
                "value": limits.exp_integral_E1(float(s)),
            }
        )
        rows.append(
            {"quantity": "laplace_domain_length", "arg": float(s), "value": float(v)}
        )
    for x in cfg["density_x"]:
        rows.append(
            {
                "quantity": "density",
                "arg": float(x),
                "value": limits.density_p(float(x), c0),
            }
        )
    law = limits.LimitLaw(c0, limits.LimitKind.DOMAIN_LENGTH)
    rows.append({"quantity": "mean", "arg": 0.0, "value": law.mean()})
    cm_ok = limits.alternating_differences_ok(lap)
    verdicts = [
        Verdict(
            name="laplace-at-zero",
            passed=limits.laplace_X(0.0, c0) == 1.0,
            observed=limits.laplace_X(0.0, c0),
            target=1.0,
            tolerance="exact equality at s = 0 (a Laplace transform of a "
            "probability law)",
        ),
        Verdict(
            name="laplace-alternating-differences",
            passed=cm_ok,
            observed=float(cm_ok),
            target=1.0,
            tolerance="finite differences alternate in sign through order 4 "
            "on the uniform grid (complete monotonicity signature)",
        ),
    ]
    return ExperimentReport(
        "limits-eval",
        {
            "c0": c0,
            "s_min": cfg["s_min"],
            "s_max": cfg["s_max"],
            "s_points": cfg["s_points"],
            "density_x": list(cfg["density_x"]),
        },
        rows,
        verdicts,
        seed=cfg["seed"],
        meta={"wall_time_s": round(time.perf_counter() - started, 3)},
    )


def _run_selftest(cfg: dict) -> ExperimentReport:
    started = time.perf_counter()
    rng = np.random.default_rng(cfg["seed"])
    checks = []

    ells = [reach.enumerate_reachable(k).ell for k in range(1, 5)]
    checks.append(
        (
            "reach-range-small-n",
            ells == [2 ** k - 1 for k in range(1, 5)],
            float(ells[-1]),
            15.0,
            "ell(n) = 2^n - 1 for n = 1..4, exact",
        )
    )

    for q in (0.3, 0.5):
        params = ModelParams(q)
        K = exact.build_generator(6, params)
        pi = exact.stationary_vector(6, params)
        row_sums = float(np.abs(K @ np.ones(64)).max())
        M = K.multiply(pi[:, None])
        db = float(np.abs((M - M.T)).max())
        checks.append(
            (
                f"generator-row-sums-q{q}",
                row_sums <= 1e-12,
                row_sums,
                0.0,
                "max |sum_eta K(sigma, eta)| <= 1e-12",
            )
        )
        checks.append(
            (
                f"detailed-balance-q{q}",
                db <= 1e-12,
                db,
                0.0,
                "max |pi K - (pi K)^T| <= 1e-12",
            )
        )

    params = ModelParams(0.3)
    ok = True
    for _ in range(20):
        f = rng.standard_normal(64)
        exact.dirichlet_form(6, params, f)  # raises if the two forms disagree
    checks.append(
        (
            "dirichlet-identity",
            ok,
            0.0,
            0.0,
            "site-sum Dirichlet form equals -<f, L f>_pi within 1e-12, "
            "20 random f",
        )
    )

    blk = exact.block_dynamics_spectrum(2, 2, 1, ModelParams(0.5))
    dist = float(np.abs(blk.eigenvalues - blk.predicted_slow_mode).min())
    checks.append(
        (
            "block-slow-mode",
            dist <= 1e-10,
            dist,
            0.0,
            "spectrum contains -1 + sqrt(p) within 1e-10",
        )
    )

    g1 = exact.spectral_gap(1, ModelParams(0.4)).gap
    checks.append(
        (
            "single-site-gap",
            abs(g1 - 1.0) <= 1e-12,
            g1,
            1.0,
            "one unconstrained site refreshes at rate 1: gap = 1",
        )
    )

    checks.append(
        (
            "laplace-at-zero",
            limits.laplace_X(0.0, 1.0) == 1.0,
            limits.laplace_X(0.0, 1.0),
            1.0,
            "exact equality at s = 0",
        )
    )

    prof = renewal_vacancy_profile(RenewalLaw.geometric(0.5), 8)
    dev = float(np.abs(prof[1:] - 0.5).max())
    checks.append(
        (
            "renewal-profile-geometric-half",
            dev <= 1e-12,
            dev,
            0.0,
            "geometric(1/2) renewal density is 1/2 at every site >= 1",
        )
    )

    checks.append(
        (
            "time-ladder-ordering",
            TimeScale(0.05, 0.1).ordered_up_to(3),
            1.0,
            1.0,
            "t_n^- < t_n < t_n^+ < t_{n+1}^- through n = 3 at eps = 0.1",
        )
    )

    rows = [
        {"check": name, "passed": passed, "observed": obs, "target": tgt}
        for name, passed, obs, tgt, _ in checks
    ]
    verdicts = [
        Verdict(name=name, passed=passed, observed=obs, target=tgt, tolerance=tol)
        for name, passed, obs, tgt, tol in checks
    ]
    return ExperimentReport(
        "selftest",
        {},
        rows,
        verdicts,
        seed=cfg["seed"],
        meta={"wall_time_s": round(time.perf_counter() - started, 3)},
    )


_RUNNERS = {
    "gap": _run_gap,
    "lsi": _run_lsi,
    "persistence": _run_persistence,
    "activity": _run_activity,
    "reach": _run_reach,
    "quench-plateau": _run_quench_plateau,
    "quench-aging": _run_quench_aging,
    "quench-domains": _run_quench_domains,
    "converge": _run_converge,
    "limits-eval": _run_limits,
    "selftest": _run_selftest,
}


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exit_:  # argparse printed the message already
        return int(exit_.code or 0)
    if ns.subcommand is None:
        parser.print_help()
        return 2
    try:
        cfg = _resolve_config(ns.subcommand, ns)
        if cfg["threads"] > 0:
            import numba

            numba.set_num_threads(cfg["threads"])
        report = _RUNNERS[ns.subcommand](cfg)
        written = _write_outputs(report, cfg, ns.subcommand)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except RuntimeError as err:
        print(f"failed: {err}", file=sys.stderr)
        return 1

    for v in report.verdicts:
        mark = "ok" if v.passed else "FAIL"
        print(
            f"{mark:4s} {v.name}: observed {_fmt_cell(v.observed)} "
            f"(target {_fmt_cell(v.target)}; {v.tolerance})"
        )
    for path in written:
        print(f"wrote {path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
