"""Command-line front end.

Subcommands:
  verify   full pipeline at a single t (report in text or structured form)
  scan     condition values over a t-grid (text, structured, or CSV)
  certify  rigorous interval certificate for a t-range
  cake     combinatorial audit dump

Exit codes: 0 all verdicts pass, 1 verification failure, 2 usage or
domain error.
"""

from __future__ import annotations

import argparse
import sys

from .numerics import DEFAULT_ZERO_TOL, DomainError, IndeterminateError
from .hermitian import GeometryError
from .construction import (
    ParameterDomainError,
    build_configuration,
    mirror_construction,
)
from .verification import (
    PUBLISHED_MATCH_RTOL,
    SignVerdict,
    VerificationError,
    certificate_lines,
    certify_range,
    render_report_structured,
    render_report_text,
    scan,
    scan_to_csv,
    verify_all,
)
from . import cake as cake_mod

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def build_parser():
    p = argparse.ArgumentParser(
        prog="cakecheck",
        description="verify the triangle-of-bisectors configuration and its invariants",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scan_like=False):
        sp.add_argument("--backend", choices=("fast", "rigorous"), default="fast")
        sp.add_argument("--format", choices=("text", "structured", "csv"), default="text")
        sp.add_argument("--tol-abs", type=float, default=DEFAULT_ZERO_TOL,
                        help="zero-snap tolerance for approximate sign decisions")
        sp.add_argument("--tol-rel", type=float, default=PUBLISHED_MATCH_RTOL,
                        help="relative tolerance for published-value matching")
        sp.add_argument("--out", help="also write the output to this file")
        if scan_like:
            sp.add_argument("--lo", type=float, default=2.13)
            sp.add_argument("--hi", type=float, default=2.34)

    sp = sub.add_parser("verify", help="full verification at one t")
    sp.add_argument("--t", type=float, default=2.22)
    common(sp)

    sp = sub.add_parser("scan", help="grid scan of condition values")
    common(sp, scan_like=True)
    sp.add_argument("--steps", type=int, default=22)

    sp = sub.add_parser("certify", help="rigorous interval certificate")
    common(sp, scan_like=True)
    sp.add_argument("--max-depth", type=int, default=40)

    sp = sub.add_parser("cake", help="combinatorial audit dump")
    sp.add_argument("--t", type=float, default=2.22)
    common(sp)
    return p


def _emit(text: str, out_path):
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)


def cmd_verify(args) -> int:
    report = verify_all(args.t, backend_name=args.backend,
                        zero_tol=args.tol_abs, rtol=args.tol_rel)
    if args.format == "csv":
        rows = scan(args.t, args.t, 1, args.backend, args.tol_abs)
        _emit(scan_to_csv(rows), args.out)
    elif args.format == "structured":
        _emit(render_report_structured(report), args.out)
    else:
        _emit(render_report_text(report), args.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_scan(args) -> int:
    rows = scan(args.lo, args.hi, args.steps, args.backend, args.tol_abs)
    # a scan is tabular by nature; all formats emit the CSV table
    _emit(scan_to_csv(rows), args.out)
    ok = all(
        row["status"] == "ok"
        and row["report"] is not None
        and row["report"].complete
        and all(v is SignVerdict.POSITIVE for v in row["report"].verdicts.values())
        for row in rows
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_certify(args) -> int:
    cert = certify_range(args.lo, args.hi, args.max_depth)
    text = "\n".join(certificate_lines(cert)) + "\n"
    _emit(text, args.out)
    return EXIT_OK if cert.certified else EXIT_FAIL


def cmd_cake(args) -> int:
    cfg = build_configuration(args.t)
    mirror_construction(cfg)
    text = cake_mod.dump(cfg)
    tables = cake_mod.verify_mapping_tables(cfg)
    idents = cake_mod.verify_identifications(cfg)
    h5 = cake_mod.h5_presentation_check(cfg)
    ok = (
        all(expected == observed for _, expected, observed in tables)
        and all(row["ok"] for row in idents)
        and h5["ok"]
    )
    text += f"[verdicts] mapping_tables={'ok' if ok else 'FAIL'}\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "scan":
            return cmd_scan(args)
        if args.command == "certify":
            return cmd_certify(args)
        if args.command == "cake":
            return cmd_cake(args)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (DomainError, GeometryError, ParameterDomainError, IndeterminateError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
