"""Command-line front end: ``ringspdc {modes,spectrum,design,validate}``.

Exit codes: 0 success, 1 a validation check failed, 2 invalid configuration,
3 computation error (for example a requested mode is not guided).
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config, reference_config_path
from .io import write_report, write_table

log = logging.getLogger("ringspdc")

MODE_COLUMNS = ("lambda_um", "n", "m", "family", "parity", "beta_rad_per_um", "n_eff", "l",
                "handedness")
DB_COLUMNS = ("lambda_s_um", "process", "delta_beta_rad_per_um")
DENSITY_COLUMNS = ("lambda_s_um", "mode_label", "density_per_s_per_rad_s",
                   "density_per_s_per_nm")


def cmd_modes(cfg, args):
    from .pipeline import mode_rows
    rows, notes = mode_rows(cfg)
    for n in notes:
        log.warning(n)
    digest = cfg.digest()
    write_table(args.out_dir, "modes", rows, MODE_COLUMNS, digest, args.format)
    write_report(args.out_dir, "modes_summary", {"count": len(rows), "warnings": notes}, digest)
    print(f"{len(rows)} mode rows written to {args.out_dir}")
    return 0


def cmd_spectrum(cfg, args):
    from .pipeline import build_setup, density_rows, spectrum_run
    setup = build_setup(cfg, args.threads)
    db_rows, densities, report = spectrum_run(setup)
    digest = cfg.digest()
    write_table(args.out_dir, "delta_beta", db_rows, DB_COLUMNS, digest, args.format)
    write_table(args.out_dir, "density", density_rows(densities), DENSITY_COLUMNS, digest,
                args.format)
    write_report(args.out_dir, "report", report, digest)
    for w in report.get("warnings", []):
        log.warning(w)
    print(f"peak {report['peak_lambda_um']:.5f} um, FWHM {report['fwhm_nm']:.4f} nm, "
          f"{report['pairs_per_s']:.4g} pairs/s")
    return 0


def cmd_design(cfg, args):
    from .pipeline import build_setup, design_run
    setup = build_setup(cfg, args.threads)
    result = design_run(setup)
    write_report(args.out_dir, "design", result, cfg.digest())
    print(f"Lambda = {result['Lambda_um']:.4f} um for {result['process']}")
    return 0


def cmd_validate(cfg, args):
    from .validate import CHECK_COLUMNS, run_checks
    rows = run_checks(cfg, args.only)
    width = max(len(r["check"]) for r in rows)
    for r in rows:
        status = "PASS" if r["passed"] else "FAIL"
        extra = f"  ({r['error']})" if "error" in r else ""
        print(f"{r['check']:<{width}}  {r['computed']:.3e}  tol {r['tolerance']:.1e}  "
              f"{status}{extra}")
    write_table(args.out_dir, "validate", rows, CHECK_COLUMNS, cfg.digest(), args.format)
    return 0 if all(r["passed"] for r in rows) else 1


COMMANDS = {
    "modes": cmd_modes,
    "spectrum": cmd_spectrum,
    "design": cmd_design,
    "validate": cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="ringspdc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ringspdc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("modes", "guided-mode table at the configured wavelengths"),
        ("spectrum", "phase mismatch, signal densities and pair-rate report"),
        ("design", "poling period for the design process"),
        ("validate", "run the numerical cross-checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None,
                       help="INI run configuration (default: bundled reference fiber)")
        p.add_argument("--out-dir", type=Path, default=Path("."))
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "validate":
            from .validate import CHECK_GROUPS
            p.add_argument("--only", action="append", choices=CHECK_GROUPS,
                           help="run only this check group (repeatable)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    try:
        cfg = load_config(args.config or reference_config_path())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        with warnings.catch_warnings():
            if not args.verbose:
                warnings.simplefilter("default")
            return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
