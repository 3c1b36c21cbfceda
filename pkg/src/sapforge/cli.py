"""Command-line front end: ``sapforge <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 a verification failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, analysis, madras, verify
from .enumerate import (
    MODELS,
    EnumerationError,
    EnumerationPlan,
    closing_probability,
    count,
    sap_counts,
    saw_statistics,
    stream,
)
from .lattice import LatticeError, Plaquette
from .plot import line_chart
from .polygon import Polygon, PolygonError

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def write_atomic(path: str | Path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _read_polygon(arg: str) -> Polygon:
    """A polygon record given inline as JSON or as @path to a file."""
    text = Path(arg[1:]).read_text() if arg.startswith("@") else arg
    try:
        return Polygon.from_json(text.strip().splitlines()[0])
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise UsageError(f"cannot read polygon from {arg!r}: {exc}") from None


def _point(text: str) -> tuple[int, int]:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return x, y


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


# -- subcommands --------------------------------------------------------------

def cmd_enumerate(args) -> int:
    plan = EnumerationPlan(args.model, args.dim, args.max_len, args.threads, bool(args.stream))
    table = count(plan)
    _emit(table.csv_text(), args.out)
    if args.stream:
        lines = [p.to_json() + "\n" for p in stream(plan)]
        write_atomic(args.stream, "".join(lines))
    return EXIT_OK


def cmd_join(args) -> int:
    tau, sigma = _read_polygon(args.tau), _read_polygon(args.sigma)
    if args.step_a:
        chi, plaq = madras.step_a_join(tau, sigma)
        record = {"joined": chi.to_record(), "junction": list(plaq.anchor)}
        text = json.dumps(record, separators=(",", ":"))
    else:
        if not madras.intervals_meet(tau, sigma):
            raise UsageError("the vertical extents of the two polygons are too far apart")
        text = madras.madras_join(tau, sigma).to_json()
    _emit(text + "\n", args.out)
    return EXIT_OK


def cmd_unjoin(args) -> int:
    chi = _read_polygon(args.joined)
    try:
        tau, sigma = madras.madras_unjoin(chi, Plaquette(args.junction))
    except madras.MadrasError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_FAILED
    _emit(tau.to_json() + "\n" + sigma.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = []
    for item in args.suite or ["all"]:
        names += [s for s in item.split(",") if s]
    if "all" in names:
        names = list(verify.SUITES)
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}")
    report = verify.run_suites(names, args.max_len, args.seed, args.threads)
    report["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    report["version"] = __version__
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    for suite in report["suites"]:
        status = "ok  " if suite["passed"] else "FAIL"
        sys.stderr.write(f"{status} {suite['suite']:<18} {suite['checks']:>8} checks\n")
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_analyze(args) -> int:
    out_dir = Path(args.out_dir)
    p = sap_counts(args.max_len, args.threads)
    stats = saw_statistics(args.max_len, args.threads)
    mu_lower = analysis.mu_lower_bound(p)
    if args.mu_ref is None:
        mu_ref, provenance = float(mu_lower), "certified lower bound from the polygon table"
    else:
        mu_ref, provenance = args.mu_ref, "user-supplied"
    table = analysis.exponent_tables(p, stats.count, mu_ref, provenance=provenance,
                                     mu_upper=args.mu_upper, sum_sq=stats.sum_sq)
    write_atomic(out_dir / "exponents.csv", table.csv_text())
    hist = {n: dict(analysis.gj_histogram(n)) for n in range(4, min(args.max_len, args.gj_max_len) + 1, 2)}
    write_atomic(out_dir / "gj_hist.csv", analysis.gj_hist_csv(hist))
    report = analysis.propagation_report(p, args.delta, args.a, args.i, mu_ref=mu_lower)
    report["mu_ref_provenance"] = provenance
    write_atomic(out_dir / "propagation.json", analysis.propagation_json(report) + "\n")
    if args.plot:
        thetas = [(n, r.theta) for n, r in sorted(table.rows.items()) if r.theta is not None]
        lowers = [(n, float(v)) for n, v in analysis.running_mu_lower(p).items()]
        write_atomic(out_dir / "theta.svg", line_chart(thetas, f"theta_n (mu_ref = {mu_ref:.6g})", "n", "theta_n"))
        write_atomic(out_dir / "mu_lower.svg", line_chart(lowers, "certified lower bound for mu", "n", "bound"))
    sys.stdout.write(f"mu lower bound {float(mu_lower):.12f} ({mu_lower})\n")
    return EXIT_OK


def cmd_closing(args) -> int:
    result = closing_probability(args.n, args.threads)
    sys.stdout.write(f"{result.direct}\n")
    if not result.agrees:
        sys.stderr.write(f"census {result.direct} differs from formula {result.formula}\n")
        return EXIT_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sapforge", description="Exact enumeration and polygon surgery.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, threads=True):
        if threads:
            p.add_argument("--threads", type=_positive, default=os.cpu_count() or 1)
        return p

    p = common(sub.add_parser("enumerate", help="exact counts as CSV"))
    p.add_argument("--model", choices=MODELS, default="sap")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--stream", help="also write every polygon as JSONL to this path")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("join", help="Madras join (or corner join) of two polygons")
    p.add_argument("--tau", required=True, help="polygon record as JSON, or @file")
    p.add_argument("--sigma", required=True, help="polygon record as JSON, or @file")
    p.add_argument("--step-a", action="store_true", help="use the corner join instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_join)

    p = sub.add_parser("unjoin", help="recover the pair behind a joined polygon")
    p.add_argument("--joined", required=True, help="polygon record as JSON, or @file")
    p.add_argument("--junction", required=True, type=_point, help="plaquette anchor x,y")
    p.add_argument("--out")
    p.set_defaults(func=cmd_unjoin)

    p = common(sub.add_parser("verify", help="run verification suites"))
    p.add_argument("--suite", action="append",
                   help=f"suite name, comma list, or 'all'; one of {', '.join(verify.SUITES)}")
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("analyze", help="exponent tables and reports"))
    p.add_argument("--max-len", type=int, default=14)
    p.add_argument("--mu-ref", type=float)
    p.add_argument("--mu-upper", type=float)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--i", type=int, default=3)
    p.add_argument("--gj-max-len", type=int, default=14)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--plot", action="store_true", help="also write SVG trend charts")
    p.set_defaults(func=cmd_analyze)

    p = common(sub.add_parser("closing", help="closing probability for odd n"))
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_closing)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, EnumerationError, LatticeError, PolygonError, analysis.AnalysisError,
            madras.MadrasError, OSError) as exc:
        sys.stderr.write(f"sapforge: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
