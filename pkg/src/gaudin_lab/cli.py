"""Command-line entry point: verify, spectrum, dynamics."""
from __future__ import annotations

import argparse
import configparser
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace

import numpy as np

from .calogero import CollisionError, check_lax_operator, check_tau_operator, write_invariants_csv, \
    write_trajectory_csv, zero_dynamics
from .gaudin import GaudinModel, TimeSpec
from .kp_verifier import CHECK_FAMILIES, FLOAT_TOL, run_suite
from .spectrum import check_sector, classical_solve, direct_spectrum, match_spectra, moment_defects

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3
OPERATOR_FAMILIES = ("tau_operator", "lax_operator")
MOMENT_TOL = 1e-8


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    N: int = 2
    n: int = 2
    twist: tuple = (Fraction(2), Fraction(-1))
    sites: tuple = (Fraction(0), Fraction(1))
    K: int = 2
    D: int = 3
    tol: float = FLOAT_TOL
    seed: int = 0
    samples: int = 2
    out: str = "out"
    checks: list = field(default_factory=list)
    sector: tuple = ()
    eigenstate: int = 0
    window: tuple = (Fraction(0), Fraction(1, 10))
    steps: int = 100

    def model(self) -> GaudinModel:
        return GaudinModel(self.N, self.n, self.twist, self.sites)


def _scalar(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not an exact scalar: {text.strip()!r}") from None


def _array(text: str) -> list:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"expected an array [a, b, ...], got {text!r}")
    body = text[1:-1].strip()
    return [v.strip() for v in body.split(",")] if body else []


def _int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"not an integer: {text.strip()!r}") from None


_FIELDS = {
    "N": _int, "n": _int, "K": _int, "D": _int, "seed": _int, "samples": _int,
    "eigenstate": _int, "steps": _int,
    "tol": lambda s: float(s),
    "out": lambda s: s.strip().strip('"'),
    "twist": lambda s: tuple(_scalar(v) for v in _array(s)),
    "sites": lambda s: tuple(_scalar(v) for v in _array(s)),
    "window": lambda s: tuple(_scalar(v) for v in _array(s)),
    "sector": lambda s: tuple(_int(v) for v in _array(s)),
    "checks": lambda s: [v.strip('"') for v in _array(s)],
}


def parse_config(text: str, source: str = "config") -> RunConfig:
    """Flat ``key = value`` lines; arrays as [a, b]; exact scalars as p/q; # comments."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text, source)
    except configparser.DuplicateOptionError as e:
        raise ConfigError(f"{source}:{e.lineno - 1}: duplicate key {e.option!r}") from None
    except configparser.Error as e:
        line = getattr(e, "lineno", None) or (e.errors[0][0] if getattr(e, "errors", None) else 1)
        raise ConfigError(f"{source}:{line - 1}: malformed line") from None
    lines = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        key = raw.split("=", 1)[0].strip()
        if "=" in raw and key not in lines:
            lines[key] = no
    cfg = RunConfig()
    for key, value in cp["run"].items():
        where = f"{source}:{lines.get(key, 0)}"
        if key not in _FIELDS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        try:
            setattr(cfg, key, _FIELDS[key](value))
        except ValueError as e:
            raise ConfigError(f"{where}: {key}: {e}") from None
    validate(cfg, lambda key: f"{source}:{lines.get(key, 0)}")
    return cfg


def validate(cfg: RunConfig, where=lambda key: "config"):
    def fail(key, msg):
        raise ConfigError(f"{where(key)}: {key}: {msg}")
    if cfg.N < 1:
        fail("N", "must be at least 1")
    if cfg.n < 0:
        fail("n", "must be nonnegative")
    if len(cfg.twist) != cfg.N:
        fail("twist", f"expected {cfg.N} values, got {len(cfg.twist)}")
    if len(cfg.sites) != cfg.n:
        fail("sites", f"expected {cfg.n} values, got {len(cfg.sites)}")
    if len(set(cfg.sites)) != len(cfg.sites):
        fail("sites", "sites must be pairwise distinct")
    if cfg.tol <= 0:
        fail("tol", "must be positive")
    if cfg.K < 1 or cfg.D < 0 or cfg.samples < 1:
        fail("K" if cfg.K < 1 else "D" if cfg.D < 0 else "samples", "out of range")
    if cfg.steps < 0:
        fail("steps", "must be nonnegative")
    if len(cfg.window) != 2 or cfg.window[0] != 0 or cfg.window[1] < 0:
        fail("window", "expected [0, t_end] with t_end >= 0")
    unknown = [c for c in cfg.checks if c not in CHECK_FAMILIES + OPERATOR_FAMILIES]
    if unknown:
        fail("checks", f"unknown checks {unknown}")


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    return parse_config(text, path)


# ---------------------------------------------------------------- commands

def _write_json(path: str, obj):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        f.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _config_json(cfg: RunConfig) -> dict:
    return {"N": cfg.N, "n": cfg.n, "twist": [str(v) for v in cfg.twist],
            "sites": [str(v) for v in cfg.sites], "seed": cfg.seed}


def cmd_verify(cfg: RunConfig, float_mode: bool = False) -> tuple:
    model = cfg.model()
    selected = cfg.checks or list(CHECK_FAMILIES + OPERATOR_FAMILIES)
    suite = [c for c in selected if c in CHECK_FAMILIES]
    results = run_suite(model, cfg.seed, suite, cfg.samples, cfg.K, cfg.D, float_mode, cfg.tol) if suite else []
    rng = random.Random(cfg.seed + 1)
    avoid = set(model.sites) | set(model.twist)

    def point():
        while True:
            v = Fraction(rng.randint(-12, 12), rng.randint(1, 7))
            if v not in avoid:
                return v
    for s in range(cfg.samples):
        if "tau_operator" in selected:
            t = TimeSpec.of({k: Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for k in range(1, cfg.K + 1)})
            results.append(check_tau_operator(model, point(), t))
        if "lax_operator" in selected:
            results.append(check_lax_operator(model, point()))
    report = {"config": _config_json(cfg), "float_mode": float_mode,
              "checks": [r.to_json() for r in results],
              "total": len(results), "failed": sum(not r.passed for r in results)}
    report["passed"] = report["failed"] == 0
    return report, EXIT_OK if report["passed"] else EXIT_FAIL


def _sector(model: GaudinModel, sector) -> tuple:
    try:
        return check_sector(model, sector)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def cmd_spectrum(cfg: RunConfig, sector) -> tuple:
    model = cfg.model()
    sector = _sector(model, sector)
    direct = direct_spectrum(model, sector, cfg.seed)
    classical = classical_solve(model, sector, cfg.seed)
    match = match_spectra(direct, classical.solutions, cfg.tol) if classical.solutions else None
    moments = max((abs(v) for t in direct for v in moment_defects(model, sector, t.H)), default=0.0)
    passed = bool(match and match.passed and moments <= MOMENT_TOL and not classical.anomalies)
    report = {"config": _config_json(cfg), "sector": list(sector),
              "direct": [t.to_json() for t in direct],
              "classical": [t.to_json() for t in classical.solutions],
              "rejected": [t.to_json() for t in classical.rejected],
              "anomalies": classical.anomalies,
              "match": match.to_json() if match else None,
              "max_deviation": match.to_json()["max_deviation"] if match else None,
              "max_moment_defect": float(f"{moments:.3e}"),
              "passed": passed}
    return report, EXIT_OK if passed else EXIT_FAIL


def cmd_dynamics(cfg: RunConfig, sector, eigenstate: int, t_end, steps: int) -> tuple:
    model = cfg.model()
    sector = _sector(model, sector)
    tuples = direct_spectrum(model, sector, cfg.seed)
    if not 0 <= eigenstate < len(tuples):
        raise ConfigError(f"eigenstate {eigenstate} outside sector dimension {len(tuples)}")
    H = tuples[eigenstate].H
    if t_end == 0:
        steps = 0
    dyn = zero_dynamics([float(s) for s in model.sites], H, float(t_end), steps)
    summary = {"config": _config_json(cfg), "sector": list(sector), "eigenstate": eigenstate,
               "H": tuples[eigenstate].to_json()["H"], "window": [0, str(t_end)], "steps": steps,
               "max_deviation": float(f"{dyn.deviation:.3e}"),
               "velocity_error": float(f"{dyn.velocity_error:.3e}"),
               "acceleration_error": float(f"{dyn.acceleration_error:.3e}"),
               "drift": float(f"{dyn.drift:.3e}"),
               "rows": len(dyn.times)}
    summary["passed"] = dyn.deviation < 1e-6 and dyn.velocity_error < 1e-8
    return dyn, summary, EXIT_OK if summary["passed"] else EXIT_FAIL


# ---------------------------------------------------------------- entry point

def _csv_list(text: str) -> list:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaudin-lab")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("verify", "spectrum", "dynamics"):
        s = sub.add_parser(name)
        s.add_argument("--config")
        s.add_argument("--seed", type=int)
        s.add_argument("--out")
        if name == "verify":
            s.add_argument("--check")
            s.add_argument("--float", action="store_true", dest="float_mode")
        else:
            s.add_argument("--sector")
        if name == "dynamics":
            s.add_argument("--eigenstate", type=int)
            s.add_argument("--window", help="t_end, or 0,t_end")
            s.add_argument("--steps", type=int)
    return p


def _apply_flags(cfg: RunConfig, args):
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if getattr(args, "check", None):
        cfg.checks = _csv_list(args.check)
    try:
        if getattr(args, "sector", None):
            cfg.sector = tuple(int(v) for v in _csv_list(args.sector))
        if getattr(args, "window", None):
            w = [Fraction(v) for v in _csv_list(args.window)]
            cfg.window = tuple(w) if len(w) == 2 else (Fraction(0), w[0])
    except (ValueError, ZeroDivisionError, IndexError) as e:
        raise ConfigError(f"command line: {e}") from None
    if getattr(args, "eigenstate", None) is not None:
        cfg.eigenstate = args.eigenstate
    if getattr(args, "steps", None) is not None:
        cfg.steps = args.steps
    validate(cfg, lambda key: "command line")


def _default_sector(cfg: RunConfig) -> tuple:
    # every site in the first basis vector: one state, no collision for small t_2
    return (cfg.n,) + (0,) * (cfg.N - 1)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        _apply_flags(cfg, args)
        sector = cfg.sector or _default_sector(cfg)
        if args.command == "verify":
            report, code = cmd_verify(cfg, args.float_mode)
            _write_json(os.path.join(cfg.out, "verify.json"), report)
            print(f"verify: {report['total'] - report['failed']}/{report['total']} checks passed")
            return code
        if args.command == "spectrum":
            report, code = cmd_spectrum(cfg, sector)
            _write_json(os.path.join(cfg.out, "spectrum.json"), report)
            print(f"spectrum {list(report['sector'])}: {len(report['direct'])} direct, "
                  f"{len(report['classical'])} classical, max deviation {report['max_deviation']}")
            return code
        os.makedirs(cfg.out, exist_ok=True)
        try:
            dyn, summary, code = cmd_dynamics(cfg, sector, cfg.eigenstate, cfg.window[1], cfg.steps)
        except CollisionError as e:
            rows = [(r[0], np.asarray(r[1], dtype=complex)) for r in e.partial]
            partial = SimpleNamespace(times=[t for t, _ in rows], roots=[r for _, r in rows])
            write_trajectory_csv(os.path.join(cfg.out, "trajectory.csv"), partial)
            print(f"dynamics aborted: {e}; wrote {len(rows)} rows", file=sys.stderr)
            return EXIT_ABORT
        write_trajectory_csv(os.path.join(cfg.out, "trajectory.csv"), dyn)
        write_invariants_csv(os.path.join(cfg.out, "invariants.csv"), dyn)
        _write_json(os.path.join(cfg.out, "dynamics.json"), summary)
        print(f"dynamics: {summary['rows']} rows, max deviation {summary['max_deviation']}")
        return code
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, ValueError) as e:
        print(f"aborted: {e}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
