"""Command line interface: ``gaphilbert <subcommand> [--config PATH] [--out DIR] ...``.

Exit status is 0 on success, 1 on a numerical failure and 2 on a configuration
error. Every subcommand writes one CSV into the output directory; ``all`` also
writes ``summary.json`` with one entry per acceptance criterion.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import CRITERIA, asymptotic_table, instability, stability
from .continuation import recover_roi
from .pipeline import ConfigError, Pipeline, RunConfig, parse_config, write_csv
from .spectral import SpectralError
from .surface import SurfaceError
from .theta import ThetaError

log = logging.getLogger("gaphilbert")

SUBCOMMANDS = ("surface", "theta", "spectrum", "asymptotics", "continue", "instability", "stability", "all")


class NumericalFailure(RuntimeError):
    pass


def cmd_surface(p: Pipeline, out: Path) -> dict:
    s = p.surface
    rows = []
    for i in range(s.g):
        for j in range(s.g):
            rows.append(("A", i, j, float(s.A[i, j]), 0.0))
            rows.append(("tau", i, j, float(s.tau[i, j].real), float(s.tau[i, j].imag)))
    for i in range(s.g):
        rows.append(("u_infinity", i, 0, float(s.u_infinity[i]), 0.0))
        rows.append(("delta", i, 0, float(s.delta[i]), 0.0))
        rows.append(("Omega", i, 0, float(s.Omega[i]), 0.0))
    rows.append(("eigenvalue_slope", 0, 0, float(np.pi / s.tau11.imag), 0.0))
    write_csv(out / "surface.csv", ["quantity", "i", "j", "real", "imag"], rows)
    return s.summary()


def cmd_theta(p: Pipeline, out: Path) -> dict:
    scan = p.scan
    write_csv(out / "theta_scan.csv", ["kappa", "|Theta|", "is_root"], scan.rows())
    if scan.flagged:
        log.warning("ambiguous minima flagged at kappa = %s", scan.flagged)
    return {"roots": scan.roots.tolist(), "flagged": scan.flagged}


def cmd_spectrum(p: Pipeline, out: Path) -> dict:
    rows = p.spectral.summary_rows(p.scan.roots, p.nmax)
    write_csv(out / "spectrum.csv", ["n", "lambda", "kappa", "sign_changes", "kappa_tilde", "|kappa-kappa_tilde|"], rows)
    return {"n_resolved": p.spectral.n_resolved}


def cmd_asymptotics(p: Pipeline, out: Path) -> dict:
    rows = asymptotic_table(p)
    write_csv(out / "asymptotics.csv", ["n", "kappa_tilde", "lambda_tilde", "norm_f_tilde", "l2_gap_to_nystrom"],
              [(r["n"], r["kappa_tilde"], r["lambda_tilde"], r["norm"], r["l2_gap"]) for r in rows])
    return {"rows": len(rows)}


def cmd_continue(p: Pipeline, out: Path) -> dict:
    coeffs = np.zeros(p.cfg.phantom_degree + 1)
    coeffs[0] = 1.0
    if p.cfg.phantom_degree:
        coeffs[-1] = 0.5
    z = p.gap_points(inner=1.0)
    res = recover_roi(p.spectral, p.surface, coeffs, z, p.nmax)
    write_csv(out / "continue.csv", ["z", "recovered", "truth", "abs_err", "tail_bound"], res.rows())
    if not np.all(np.isfinite(res.recovered)):
        raise NumericalFailure("non-finite continuation values")
    return {"max_abs_err": float(res.abs_err.max())}


def cmd_instability(p: Pipeline, out: Path) -> dict:
    res = instability(p)
    write_csv(out / "instability.csv", ["n", "pos_norm", "neg_norm_lb", "ratio", "kappa_n"], res.rows())
    if not np.all(np.isfinite(res.ratio)):
        raise NumericalFailure("instability ratios are not finite")
    return {"predicted_rate": res.predicted_rate}


def cmd_stability(p: Pipeline, out: Path) -> dict:
    res = stability(p)
    write_csv(out / "stability.csv", ["n_max", "empirical_C", "analytic_C"], res.rows())
    return {"c_J": res.c_J}


COMMANDS = {
    "surface": cmd_surface,
    "theta": cmd_theta,
    "spectrum": cmd_spectrum,
    "asymptotics": cmd_asymptotics,
    "continue": cmd_continue,
    "instability": cmd_instability,
    "stability": cmd_stability,
}


def cmd_all(p: Pipeline, out: Path) -> dict:
    for name, fn in COMMANDS.items():
        log.info("running %s", name)
        fn(p, out)
    summary = {"provenance": {"version": __version__, "config_hash": p.cfg.digest(),
                              "config": p.cfg.to_dict()}}
    for key, fn in CRITERIA.items():
        log.info("checking %s", key)
        summary[key] = fn(p)
    summary["all_pass"] = all(summary[k]["pass"] for k in CRITERIA)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return summary


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaphilbert", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", type=Path, help="key = value configuration file")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    ap.add_argument("--seed", type=int, help="seed for randomized checks")
    ap.add_argument("--nmax", type=int, help="number of singular triples used")
    ap.add_argument("--phantom-degree", type=int, help="degree of the phantom polynomial (continue)")
    ap.add_argument("--omega", type=float, help="endpoint margin as a fraction of the shortest gap")
    ap.add_argument("--points", type=int, help="continuation points per gap")
    ap.add_argument("--verbose", "-v", action="store_true")
    return ap


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
        cfg = parse_config(text, cfg, str(args.config))
    overrides = {"seed": args.seed, "nmax": args.nmax, "phantom_degree": args.phantom_degree,
                 "omega": args.omega, "points": args.points}
    cfg = dataclasses.replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        p = Pipeline(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    args.out.mkdir(parents=True, exist_ok=True)
    fn = cmd_all if args.subcommand == "all" else COMMANDS[args.subcommand]
    try:
        with np.errstate(all="ignore"):
            fn(p, args.out)
    except (NumericalFailure, SurfaceError, ThetaError, SpectralError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
