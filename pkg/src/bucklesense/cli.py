"""Command-line entry point.

    bucklesense curve    --config run.cfg [--out DIR]
    bucklesense simulate --config run.cfg [--out DIR] [--seed N]
    bucklesense estimate --config run.cfg [--out DIR] TRACE.csv ...

Exit codes: 0 success, 1 usage/config/parse error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import elastica, fbg, io
from .config import RunConfig
from .errors import BucklesenseError, ConfigError, NumericalError, TraceParseError
from .estimator import estimate_stiffness, summarize_batch
from .trials import simulate_trial

log = logging.getLogger("bucklesense")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


def length_tag(length: float) -> str:
    return f"{length * 1e3:g}"


def cmd_curve(cfg: RunConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for L in cfg.lengths:
        beam = cfg.beam.with_length(L)
        curve = elastica.force_displacement_curve(beam, cfg.kappa_grid, cfg.solver)
        for kappa, msg in curve.failures:
            print(f"curve L={length_tag(L)} mm: kappa={kappa:.6g} skipped ({msg})", file=sys.stderr)
        if len(curve) == 0:
            status = EXIT_NUMERIC
            continue
        io.write_curve_csv(out / f"curve_{length_tag(L)}.csv", curve)
        eps = np.array([fbg.peak_strains(elastica.solve(beam, k, cfg.solver), cfg.layout) for k in curve.kappa])
        io.write_strain_csv(out / f"strain_{length_tag(L)}.csv", curve.end_shortening, eps,
                            fbg.wavelength_shift(eps, cfg.layout))
    return status


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    if not cfg.tissues:
        log.warning("no tissues configured; nothing to simulate")
        return EXIT_OK
    out.mkdir(parents=True, exist_ok=True)
    for ti, tissue in enumerate(cfg.tissues):
        for li, L in enumerate(cfg.lengths):
            trace = simulate_trial(cfg.beam.with_length(L), tissue, cfg.layout, cfg.protocol,
                                   seed=[cfg.seed, ti, li], cfg=cfg.solver)
            io.write_trace(out / f"trial_{tissue.name}_{length_tag(L)}.csv", trace)
    return EXIT_OK


def cmd_estimate(cfg: RunConfig, out: Path, traces: List[str]) -> int:
    if not traces:
        raise ConfigError("traces", "no trace files given")
    parsed = [(Path(p).stem, io.read_trace(p, None)) for p in traces]
    out.mkdir(parents=True, exist_ok=True)
    curves: Dict[float, elastica.ForceCurve] = {}
    rows, status = [], EXIT_OK
    groups: Dict[str, List[float]] = {}
    actual: Dict[str, float] = {}
    for trace_id, trace in parsed:
        nu = cfg.nu_override
        if nu is None:
            if "tissue.nu" not in trace.meta:
                raise ConfigError("estimator.nu", f"no Poisson ratio for {trace_id} (set estimator.nu)")
            nu = float(trace.meta["tissue.nu"])
        est_cfg = cfg.estimator_config(nu)
        base = cfg.beam.with_length(trace.beam_length)
        if trace.beam_length not in curves:
            curves[trace.beam_length] = elastica.force_displacement_curve(base, cfg.kappa_grid, cfg.solver)
        try:
            est = estimate_stiffness(trace, base, cfg.layout, est_cfg, curves[trace.beam_length])
        except NumericalError as exc:
            print(f"{trace_id}: {type(exc).__name__}: {exc}", file=sys.stderr)
            status = EXIT_NUMERIC
            continue
        rows.append((trace_id, est))
        group = str(trace.meta.get("tissue.name", trace_id))
        if "tissue.E_t" in trace.meta:
            groups.setdefault(group, []).append(est.E_t)
            actual[group] = float(trace.meta["tissue.E_t"])
    io.write_report(out / "estimates.csv", rows)
    cap = cfg.estimator_config(0.0).outlier_cap
    summary = summarize_batch(groups, actual, cap)
    (out / "summary.txt").write_text(summary.format())
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bucklesense", description="Buckling-beam tissue stiffness pipeline")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("curve", "force-displacement and peak-strain curves"),
                        ("simulate", "synthetic indentation traces"),
                        ("estimate", "tissue modulus from trace files")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", type=Path, default=None)
        sp.add_argument("--seed", type=int, default=None)
        if name == "estimate":
            sp.add_argument("traces", nargs="*")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = RunConfig.from_file(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed", "must be an unsigned 64-bit integer")
            cfg.seed = args.seed
        out = args.out if args.out is not None else cfg.out_dir
        if args.command == "curve":
            return cmd_curve(cfg, out)
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        return cmd_estimate(cfg, out, args.traces)
    except (ConfigError, TraceParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BucklesenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
