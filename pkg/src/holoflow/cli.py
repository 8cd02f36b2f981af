"""``holoflow`` command line interface.

    holoflow synth PROBLEM.json [--output RESULT.json] [--pivot P]
    holoflow verify DOC_WITH_H.json [--output REPORT.json]
    holoflow simulate PROBLEM.json --output TRAJ.csv [--steps N] [--stride S]
                      [--exact | --rk4] [--retraction] [--pivot P]
    holoflow expm MATRIX.json [--output OUT.json]

Exit status: 0 success, 1 error or failed check, 2 (synth only) a valid
generator whose loop is constant.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from decimal import Decimal

from . import __version__
from .errors import HoloflowError
from .flow import CLOSURE_TOL, exact_trajectory, integrate_rk4, sample_drifts, trajectory_stats
from .io import (
    DocumentError,
    decode_matrix,
    dump_json,
    encode_matrix,
    load_json,
    parse_problem,
    report_to_dict,
    result_to_dict,
)
from .linalg import dagger, expm, expm_spectral, fro, spectral_from_generator
from .synth import synthesize, verify_monodromy

log = logging.getLogger("holoflow")

RESIDUAL_TOL = 1e-8
EXIT_OK, EXIT_FAIL, EXIT_TRIVIAL = 0, 1, 2
CSV_HEADER = "t,dist_to_start,idempotency_drift,hermiticity_drift,trace"


def fmt(x: float) -> str:
    """17 significant digits, positional notation, locale independent."""
    return format(Decimal(f"{float(x):.16e}"), "f")


def _emit(doc: dict, output) -> None:
    text = dump_json(doc, output)
    if output is None:
        sys.stdout.write(text)


def _load(args):
    doc = load_json(args.input)
    if getattr(args, "pivot", None) is not None:
        doc["pivot"] = args.pivot
    return doc


def cmd_synth(args) -> int:
    parsed = parse_problem(_load(args))
    result = synthesize(parsed.problem, parsed.params)
    _emit(result_to_dict(result), args.output)
    r = result.report
    worst = max(r.proj_residual, r.restriction_residual, r.skew_residual)
    if worst > RESIDUAL_TOL:
        log.error("synthesized generator fails its own check (max residual %.3e)", worst)
        return EXIT_FAIL
    if not r.nontrivial:
        log.warning("generator commutes with P0: the loop is constant")
        return EXIT_TRIVIAL
    return EXIT_OK


def cmd_verify(args) -> int:
    doc = _load(args)
    if "H" not in doc:
        raise DocumentError("H", "missing field")
    parsed = parse_problem(doc, require_params=False)
    report = verify_monodromy(parsed.H, parsed.problem)
    _emit({"version": __version__, "report": report_to_dict(report)}, args.output)
    ok = max(report.proj_residual, report.restriction_residual, report.skew_residual) <= RESIDUAL_TOL
    return EXIT_OK if ok else EXIT_FAIL


def cmd_simulate(args) -> int:
    doc = _load(args)
    parsed = parse_problem(doc, require_params="H" not in doc)
    cfg = parsed.flow
    overrides = {}
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.stride is not None:
        overrides["stride"] = args.stride
    if args.retraction:
        overrides["retraction"] = True
    if overrides:
        try:
            cfg = dataclasses.replace(cfg, **overrides)
        except ValueError as exc:
            raise DocumentError("flags", str(exc)) from None
    h = parsed.H if parsed.H is not None else synthesize(parsed.problem, parsed.params).H
    p0 = parsed.problem.p0
    traj = integrate_rk4(h, p0, cfg) if args.rk4 else exact_trajectory(h, p0, cfg)
    idem, herm, trace, _ = sample_drifts(traj)
    lines = [CSV_HEADER]
    for row in zip(traj.times, traj.distances, idem, herm, trace.real):
        lines.append(",".join(fmt(x) for x in row))
    try:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise DocumentError("output", f"cannot write {args.output}: {exc.strerror}") from None
    stats = trajectory_stats(traj)
    log.info("closure %.3e, max distance %.6f", stats.closure, stats.max_distance)
    return EXIT_OK if stats.closure <= CLOSURE_TOL else EXIT_FAIL


def cmd_expm(args) -> int:
    doc = load_json(args.input)
    if "M" not in doc:
        raise DocumentError("M", "missing field")
    m = decode_matrix(doc["M"], "M")
    if m.shape[0] != m.shape[1]:
        raise DocumentError("M", f"expected a square matrix, got shape {m.shape}")
    taylor = expm(m)
    out = {"version": __version__, "expm": encode_matrix(taylor), "expm_spectral": None, "disagreement": None}
    if fro(m + dagger(m)) <= 1e-12 * max(1.0, fro(m)):
        spectral = expm_spectral(spectral_from_generator(m), 1.0)
        out["expm_spectral"] = encode_matrix(spectral)
        out["disagreement"] = fro(taylor - spectral)
    _emit(out, args.output)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; status 2 means "trivial loop"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="holoflow", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="build H for a problem document")
    p.add_argument("input")
    p.add_argument("--output")
    p.add_argument("--pivot", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check a document's H against its frame and g0")
    p.add_argument("input")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="write the projector trajectory as CSV")
    p.add_argument("input")
    p.add_argument("--output", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--stride", type=int)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="conjugation by exp(tH) (default)")
    mode.add_argument("--rk4", action="store_true", help="integrate dP/dt = [H, P] with RK4")
    p.add_argument("--retraction", action="store_true")
    p.add_argument("--pivot", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("expm", help="exponentiate the matrix M by both routines")
    p.add_argument("input")
    p.add_argument("--output")
    p.set_defaults(func=cmd_expm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="holoflow: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        log.error("input: %s not found", exc.filename)
    except HoloflowError as exc:
        log.error("%s", exc)
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
