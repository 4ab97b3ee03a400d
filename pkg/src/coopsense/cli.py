"""``coopsense`` command line: roc, utilization, snr-req, validate, selftest.

Exit codes: 0 success, 1 validation/self-test failure, 2 configuration error
(including infeasible targets and out-of-domain inputs).
"""
import argparse
import csv
import io
import math
import sys

from . import sweeps
from .config import SCHEMES, load_config
from .errors import ConfigError, DomainError, InfeasibleError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".9g")
    return str(value)


def rows_to_csv(rows, columns):
    """Render rows as CSV text (LF line endings, 9 significant digits)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _config(args):
    overrides = {"seed": args.seed, "trials": args.trials, "scheme": args.scheme,
                 "workers": args.workers}
    return load_config(args.config, **overrides)


def _cmd_roc(args):
    rows = sweeps.roc_rows(_config(args))
    _emit(rows_to_csv(rows, sweeps.ROC_COLUMNS), args.out)
    return EXIT_OK


def _cmd_utilization(args):
    rows = sweeps.utilization_rows(_config(args))
    _emit(rows_to_csv(rows, sweeps.UTILIZATION_COLUMNS), args.out)
    return EXIT_OK


def _cmd_snr_req(args):
    rows = sweeps.snr_requirement_rows(_config(args))
    _emit(rows_to_csv(rows, sweeps.SNR_COLUMNS), args.out)
    return EXIT_OK


def _cmd_validate(args):
    rows = sweeps.validate_rows(_config(args))
    _emit(rows_to_csv(rows, sweeps.VALIDATE_COLUMNS), args.out)
    counts = {s: sum(r["status"] == s for r in rows) for s in ("pass", "fail", "informational")}
    print(f"validate: {counts['pass']} pass, {counts['fail']} fail, "
          f"{counts['informational']} informational", file=sys.stderr)
    return EXIT_FAIL if counts["fail"] else EXIT_OK


def _cmd_selftest(args):
    from .selftest import run_selftest

    report = run_selftest()
    text = report.summary()
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        _emit(text, args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coopsense",
        description="Cooperative energy-detection spectrum sensing: closed forms and Monte Carlo.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: standard output)")
    common.add_argument("--seed", type=int, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per hypothesis")
    common.add_argument("--scheme", choices=SCHEMES, help="combining scheme")
    common.add_argument("--workers", type=int, help="worker threads for grid evaluation")

    commands = {
        "roc": (_cmd_roc, "complementary ROC (psi_m against psi_f) per scheme and n"),
        "utilization": (_cmd_utilization, "spectrum utilization 1 - psi_f at a target psi_d"),
        "snr-req": (_cmd_snr_req, "mean SNR needed to reach target (psi_d, psi_f)"),
        "validate": (_cmd_validate, "closed forms against Monte Carlo, 3-sigma test"),
        "selftest": (_cmd_selftest, "built-in checks of the special functions and identities"),
    }
    for name, (func, help_text) in commands.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except sweeps.CurveCheckError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
