"""Command-line front end.

Subcommands: analyze, analyze-from-R, simulate, reconstruct, montecarlo,
family-scan.  Every command that writes files also writes a JSON manifest
next to them.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidArgument, TomofreeError
from .fileio import (
    fmt6,
    format_record,
    load_state,
    read_measured,
    read_six_records,
    write_coincidences,
    write_measured,
    write_ml_result,
    write_table,
)
from .mle import LikelihoodProblem, ml_reconstruct
from .montecarlo import detection_counts, detects, family_curve, scatter, thresholds
from .states import RandomStateMeasure
from .swap import PROJECTOR_ORDER, estimate_R, simulate_counts
from .witnesses import bell_B, bell_M, chsh_max, entropic_E_equal_purity, fef_F, r_eigs, report

log = logging.getLogger("tomofree")


def _write_manifest(target: Path, command: str, params: dict, seed, inputs, outputs, started: float) -> None:
    manifest = {
        "command": command,
        "parameters": params,
        "seed": seed,
        "version": __version__,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "duration_s": round(time.perf_counter() - started, 6),
    }
    target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _emit(record: dict, kind: str, args, header: dict | None = None) -> list[Path]:
    """Print the record at 6 significant digits; write it at full precision if --out is given."""
    sys.stdout.write(format_record(record, kind, args.format, precise=False))
    if args.out is None:
        return []
    out = Path(args.out)
    out.write_text(format_record(record, kind, args.format, precise=True, header=header))
    return [out]


def _manifest_for(outputs: list[Path], args, command: str, params: dict, inputs, started) -> None:
    if not outputs:
        return
    first = outputs[0]
    target = first / "manifest.json" if first.is_dir() else first.with_name(first.name + ".manifest.json")
    _write_manifest(target, command, params, args.seed, inputs, outputs, started)


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    rho = load_state(args.state)
    rep = report(rho, oracle=args.oracle)
    outputs = _emit(rep.as_record(), "witness-report", args)
    _manifest_for(outputs, args, "analyze", {"state": args.state, "oracle": args.oracle},
                  [args.state], started)
    return 0


def cmd_analyze_from_r(args) -> int:
    started = time.perf_counter()
    R, _, _ = read_six_records(args.rfile, require_sigma=False)
    eigs = r_eigs(R)
    if eigs[-1] < -1e-9 or eigs[0] > 1 + 1e-9:
        log.warning("R spectrum %s lies outside [0, 1]; run 'reconstruct' first", np.round(eigs, 6))
    M = float(bell_M(R))
    record = {
        "M": M,
        "B": float(bell_B(M)),
        "chsh_max": float(chsh_max(R)),
        "F": float(fef_F(R)),
        "E_equal_purity": float(entropic_E_equal_purity(R)),
        "r1": float(eigs[0]),
        "r2": float(eigs[1]),
        "r3": float(eigs[2]),
    }
    outputs = _emit(record, "r-witness-report", args, header={"E": "equal-marginal-purity reduction (Tr R - 1)/2"})
    _manifest_for(outputs, args, "analyze-from-R", {"rfile": str(args.rfile)}, [args.rfile], started)
    return 0


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    if args.shots < 1:
        raise InvalidArgument(f"--shots must be >= 1, got {args.shots}")
    rho = load_state(args.state)
    seed = 0 if args.seed is None else args.seed
    table = simulate_counts(rho, args.r, args.shots, seed)
    measured = estimate_R(table, args.r)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    coinc, mfile = out / "coincidences.csv", out / "measured_r.csv"
    write_coincidences(coinc, table)
    write_measured(mfile, measured, {"r": repr(float(args.r)), "shots": args.shots, "seed": seed,
                                     "projector_order": PROJECTOR_ORDER})
    for i, row in enumerate(measured.R):
        print(" ".join(f"{fmt6(v)}+-{fmt6(e)}" for v, e in zip(row, measured.dR[i])))
    _write_manifest(out / "manifest.json", "simulate",
                    {"state": args.state, "r": args.r, "shots": args.shots}, seed, [args.state],
                    [coinc, mfile], started)
    return 0


def cmd_reconstruct(args) -> int:
    started = time.perf_counter()
    measured = read_measured(args.rfile)
    result = ml_reconstruct(LikelihoodProblem.from_measured(measured))
    print("R_phys:")
    for row in result.R_phys:
        print("  " + " ".join(fmt6(v) for v in row))
    print("eigs: " + " ".join(fmt6(v) for v in result.eigs))
    print(f"logL: {fmt6(result.logL)}")
    print(f"shift_fraction: {fmt6(result.shift_fraction)}")
    if args.out is None:
        return 0
    out = Path(args.out)
    write_ml_result(out, result, measured.dR)
    _manifest_for([out], args, "reconstruct", {"rfile": str(args.rfile)}, [args.rfile], started)
    return 0


def cmd_montecarlo(args) -> int:
    started = time.perf_counter()
    measure = RandomStateMeasure.parse(args.measure)
    seed = 0 if args.seed is None else args.seed
    data = scatter(args.samples, measure, seed, workers=args.workers)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    sfile, tfile = out / "scatter.csv", out / "thresholds.txt"
    write_table(sfile, {
        "N": data.N, "M": data.M, "E": data.E, "F": data.F,
        "detM": data.detected("M").astype(int), "detE": data.detected("E").astype(int),
        "detF": data.detected("F").astype(int),
    }, "scatter", {"measure": str(measure), "seed": seed, "samples": args.samples})
    rep = thresholds(data)
    record = rep.as_record()
    record.update({f"count_{k}": v for k, v in detection_counts(data).items()})
    sys.stdout.write(format_record(record, "thresholds", args.format, precise=False))
    tfile.write_text(format_record(record, "thresholds", args.format, precise=True))
    _write_manifest(out / "manifest.json", "montecarlo",
                    {"samples": args.samples, "measure": str(measure), "workers": args.workers},
                    seed, [], [sfile, tfile], started)
    return 0


def cmd_family_scan(args) -> int:
    started = time.perf_counter()
    curve = family_curve(args.family, args.steps, args.p_from, args.p_to)
    columns = {k: curve[k] for k in ("p", "N", "M", "E", "F")}
    crossings = {}
    for w in ("M", "E", "F"):
        det = detects(curve[w])
        flips = np.nonzero(det[1:] != det[:-1])[0]
        crossings[w] = [f"{fmt6(curve['p'][k])}..{fmt6(curve['p'][k + 1])}" for k in flips]
        print(f"{w} detection changes: {', '.join(crossings[w]) or 'none'}")
    if args.out is None:
        print("p,N,M,E,F")
        for row in zip(*columns.values()):
            print(",".join(fmt6(v) for v in row))
        return 0
    out = Path(args.out)
    write_table(out, columns, "family-curve", {"family": args.family})
    _manifest_for([out], args, "family-scan",
                  {"family": args.family, "from": args.p_from, "to": args.p_to, "steps": args.steps},
                  [], started)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master random seed (u64)")
    common.add_argument("--out", default=None, help="output file (directory for simulate/montecarlo)")
    common.add_argument("--format", choices=("csv", "kv"), default="kv", help="record output style")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tomofree", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="witnesses of a density matrix")
    p.add_argument("state", help="state file or family literal such as werner:p=0.8")
    p.add_argument("--oracle", action="store_true", help="also maximize the fully-entangled fraction directly")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("analyze-from-R", parents=[common], help="witnesses computable from R alone")
    p.add_argument("rfile", help="six-record R file (measured or reconstructed)")
    p.set_defaults(func=cmd_analyze_from_r)

    p = sub.add_parser("simulate", parents=[common], help="simulate the two-copy swapping measurement")
    p.add_argument("state")
    p.add_argument("--r", type=float, default=0.0, help="fraction of non-interfering photon pairs")
    p.add_argument("--shots", type=int, default=100_000, help="trials per (setting, mode)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", parents=[common], help="maximum-likelihood physical R")
    p.add_argument("rfile", help="measured six-record R file with sigma column")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("montecarlo", parents=[common], help="random-state witness scatter and thresholds")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--measure", default="hilbert-schmidt", help="haar, hilbert-schmidt or induced:K=<int>")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("family-scan", parents=[common], help="witnesses along a reference family")
    p.add_argument("--family", choices=("werner", "horodecki", "pure"), required=True)
    p.add_argument("--from", dest="p_from", type=float, default=0.0)
    p.add_argument("--to", dest="p_to", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_family_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except TomofreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
