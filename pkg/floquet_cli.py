#!/usr/bin/env python3
"""
Command-line front end for the Floquet spectrum toolkit.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 numerical failure.
"""

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from coefficient_generator import CoefficientGenerator
from coefficients import load_any_coefficients
from companion import companion_trace_integral
from config import OUTPUT_FORMATS, RunConfig
from eigensolve import determinant
from floquet_errors import (
    ContourFailureError,
    FloquetInputError,
    FloquetNumericalError,
    ParameterError,
)
from spectrum import (
    dimension_split,
    multiplier_frame,
    multipliers,
    quasimomenta,
    scan_real,
    scan_region,
    spectral_curves,
    tt_eigenvalues,
)
from verify import CHECK_NAMES, reports_to_frame, reports_to_json, run_verification_suite, suite_passed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def status(message: str):
    """Human-facing progress goes to stderr so payloads stay byte-identical."""
    print(message, file=sys.stderr)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParameterError(f"Cannot parse {text!r} as a complex number (use e.g. 1.5-0.2j)")


def _pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def emit(config: RunConfig, payload: str):
    if config.output_path:
        with open(config.output_path, "w") as f:
            f.write(payload)
        status(f"✅ Wrote {config.output_path}")
    else:
        sys.stdout.write(payload)


def emit_frame(config: RunConfig, frame: pd.DataFrame, extra: Optional[Dict[str, Any]] = None):
    if config.output_format == "csv":
        emit(config, frame.to_csv(index=False, float_format="%.17g"))
        return
    payload = dict(extra or {})
    payload["rows"] = frame.to_dict(orient="records")
    emit(config, json.dumps(payload, indent=2) + "\n")


def save_plot(config: RunConfig, build: Callable):
    """build receives a SpectrumVisualizer; plotly is imported only when --plot is given."""
    if config.plot_path:
        from spectrum_plots import SpectrumVisualizer

        visualizer = SpectrumVisualizer()
        visualizer.save_figure(build(visualizer), str(config.plot_path))
        status(f"📊 Figure spec written to {config.plot_path}")


def load_set(config: RunConfig):
    config.validate()
    coefficients = load_any_coefficients(config.coefficients_path)
    status(f"🔄 Loaded n={coefficients.n}, m={coefficients.m} from {config.coefficients_path}")
    return coefficients


# Subcommands ------------------------------------------------------------------------------

def cmd_multipliers(args, config: RunConfig) -> int:
    coefficients = load_set(config)
    lam = parse_complex(args.lam)
    ms = multipliers(coefficients, lam, config.settings)
    split = dimension_split(ms, config.tol_circle)
    det = determinant(ms.monodromy.X1)
    expected = complex(np.exp(companion_trace_integral(coefficients, lam)))
    liouville = abs(det - expected) / abs(expected)
    if liouville > 1e-8:
        status(f"⚠️  Liouville residual {liouville:.3e} exceeds 1e-8; consider tighter tolerances")

    if config.output_format == "csv":
        frame = multiplier_frame(ms, config.tol_circle)
        frame["liouville_residual"] = liouville
        emit(config, frame.to_csv(index=False, float_format="%.17g"))
    else:
        record = {
            "lambda": _pair(ms.lam),
            "multipliers": [_pair(mu) for mu in ms.multipliers],
            "moduli": [float(r) for r in ms.moduli],
            "quasimomenta": quasimomenta(ms, config.tol_circle),
            "dimension_split": {"inside": split.inside, "on": split.on, "outside": split.outside},
            "det_monodromy": _pair(det),
            "liouville_residual": liouville,
        }
        emit(config, json.dumps(record, indent=2) + "\n")
    save_plot(config, lambda viz: viz.create_multiplier_chart(ms))
    status(f"✅ {len(ms)} multipliers, split inside/on/outside = {split.inside}/{split.on}/{split.outside}")
    return EXIT_OK


def _report_scan(scan) -> None:
    if scan.errors:
        status(f"⚠️  {len(scan.errors)} of {scan.points.size} points failed and are reported as NaN")
    status(f"✅ {int(scan.flags.sum())} of {scan.points.size} points lie in the spectrum")


def cmd_scan_real(args, config: RunConfig) -> int:
    coefficients = load_set(config)
    status(f"🔄 Scanning {args.N} real points in [{args.min}, {args.max}]...")
    scan = scan_real(coefficients, args.min, args.max, args.N, config.tol_circle, config.settings, config.workers)
    emit_frame(config, scan.to_frame(), {"mode": "real", "tol_circle": config.tol_circle})
    save_plot(config, lambda viz: viz.create_band_chart(scan))
    _report_scan(scan)
    return EXIT_OK


def cmd_scan_region(args, config: RunConfig) -> int:
    coefficients = load_set(config)
    status(f"🔄 Scanning a {args.n_re}x{args.n_im} grid...")
    scan = scan_region(coefficients, (args.re_min, args.re_max), (args.im_min, args.im_max),
                       args.n_re, args.n_im, config.tol_circle, config.settings, config.workers)
    emit_frame(config, scan.to_frame(), {"mode": "region", "shape": list(scan.shape), "tol_circle": config.tol_circle})
    save_plot(config, lambda viz: viz.create_region_heatmap(scan))
    _report_scan(scan)
    return EXIT_OK


def _roots_frame(t: float, roots) -> pd.DataFrame:
    return pd.DataFrame(
        [{"t": t, "re_lambda": r.value.real, "im_lambda": r.value.imag, "residual": r.residual,
          "refined": r.refined, "multiplicity": r.multiplicity} for r in roots],
        columns=["t", "re_lambda", "im_lambda", "residual", "refined", "multiplicity"],
    )


def cmd_eigs_t(args, config: RunConfig) -> int:
    coefficients = load_set(config)
    status(f"🔄 Locating eigenvalues of T_t at t={args.t}...")
    result = tt_eigenvalues(coefficients, args.t, (args.re_min, args.re_max), (args.im_min, args.im_max),
                            config.settings)
    frame = _roots_frame(args.t, result.roots)
    if config.output_format == "csv":
        emit(config, frame.to_csv(index=False, float_format="%.17g"))
    else:
        emit(config, json.dumps(result.to_dict(), indent=2) + "\n")
    save_plot(config, lambda viz: viz.create_curve_chart(frame, f"Eigenvalues of T_t, t = {args.t:.6g}"))
    if result.perturbed:
        status(f"⚠️  D_t vanished on the requested boundary; searched the grown contour {result.contour.to_dict()} "
               f"({len(result.attempts)} attempts)")
    unrefined = sum(not r.refined for r in result.roots)
    if unrefined:
        status(f"⚠️  {unrefined} roots did not reach the residual tolerance")
    status(f"✅ {len(result.roots)} roots, winding number {result.winding_number}")
    return EXIT_OK


def cmd_curves(args, config: RunConfig) -> int:
    coefficients = load_set(config)
    if args.t_count < 1:
        raise ParameterError(f"--t-count must be >= 1, got {args.t_count}")
    ts = np.linspace(0.0, 2.0 * np.pi, args.t_count, endpoint=False)
    status(f"🔄 Tracing spectral curves over {args.t_count} values of t...")
    curves = spectral_curves(coefficients, ts, (args.re_min, args.re_max), (args.im_min, args.im_max),
                             config.settings, workers=config.workers)
    errors = curves.attrs.get("errors", {})
    emit_frame(config, curves, {"t_count": args.t_count, "failed_t": sorted(errors)})
    save_plot(config, lambda viz: viz.create_curve_chart(curves))
    if errors:
        status(f"⚠️  {len(errors)} values of t failed: {sorted(errors)}")
    status(f"✅ {len(curves)} curve points")
    return EXIT_OK


def cmd_verify(args, config: RunConfig) -> int:
    if args.list:
        sys.stdout.write("\n".join(CHECK_NAMES) + "\n")
        return EXIT_OK

    cases = None
    if config.coefficients_path is not None:
        coefficients = load_set(config)
        cases = [(config.coefficients_path.stem, coefficients)]
    else:
        config.validate(require_coefficients=False)

    label = "negative-control " if args.break_pt else ""
    status(f"🔄 Running the {label}verification suite (seed {config.seed})...")
    reports = run_verification_suite(seed=config.seed, settings=config.settings, cases=cases,
                                     break_pt=args.break_pt, tol_circle=config.tol_circle)
    if config.output_format == "csv":
        emit(config, reports_to_frame(reports).to_csv(index=False, float_format="%.17g"))
    else:
        emit(config, reports_to_json(reports) + "\n")

    failed = [r for r in reports if not r.passed]
    for r in failed:
        status(f"❌ {r.name} [{r.case}] residual {r.worst_residual:.3e} > {r.tol:.1e}")
    if not suite_passed(reports):
        status(f"❌ {len(failed)} of {len(reports)} checks failed")
        return EXIT_VERIFICATION_FAILED
    status(f"✅ All {len(reports)} checks passed")
    return EXIT_OK


def cmd_generate(args, config: RunConfig) -> int:
    config.validate(require_coefficients=False)
    generator = CoefficientGenerator(seed=config.seed, amplitude=args.amplitude, degree=args.degree)
    coefficients = generator.random_set(args.n, args.m)
    emit(config, json.dumps(coefficients.to_dict(), indent=2) + "\n")
    summary = generator.get_set_summary(coefficients)
    status(f"✅ Generated a random PT set: n={summary['n']}, m={summary['m']}, degree={summary['fourier_degree']}")
    return EXIT_OK


# Parser -----------------------------------------------------------------------------------

def _add_rectangle(parser: argparse.ArgumentParser):
    parser.add_argument('--re-min', type=float, required=True)
    parser.add_argument('--re-max', type=float, required=True)
    parser.add_argument('--im-min', type=float, required=True)
    parser.add_argument('--im-max', type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', metavar='PATH', help='Coefficient file (JSON)')
    common.add_argument('--tol-circle', type=float, help='Unit-circle tolerance (default 1e-6)')
    common.add_argument('--rel-tol', type=float, help='Integrator relative tolerance (default 1e-10)')
    common.add_argument('--abs-tol', type=float, help='Integrator absolute tolerance (default 1e-10)')
    common.add_argument('--seed', type=int, help='Seed for generated cases (default 42)')
    common.add_argument('--format', dest='output_format', choices=OUTPUT_FORMATS, help='Output format')
    common.add_argument('--out', metavar='PATH', help='Write the result here instead of stdout')
    common.add_argument('--plot', metavar='PATH', help='Also write a Plotly figure spec (JSON)')
    common.add_argument('--workers', type=int, help='Processes for scans and curve sweeps')
    common.add_argument('--verbose', action='store_true', help='Debug logging on stderr')

    parser = argparse.ArgumentParser(description="Floquet multipliers and spectra of PT-symmetric periodic operators")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('multipliers', parents=[common], help='Multipliers of X(1, lambda)')
    p.add_argument('--lambda', dest='lam', required=True, metavar='Z', help='Spectral parameter, e.g. 1.5 or 1-0.5j')
    p.set_defaults(handler=cmd_multipliers)

    p = sub.add_parser('scan-real', parents=[common], help='Spectral distance along the real axis')
    p.add_argument('--min', type=float, required=True)
    p.add_argument('--max', type=float, required=True)
    p.add_argument('--N', type=int, required=True)
    p.set_defaults(handler=cmd_scan_real)

    p = sub.add_parser('scan-region', parents=[common], help='Spectral distance over a complex rectangle')
    _add_rectangle(p)
    p.add_argument('--n-re', type=int, required=True)
    p.add_argument('--n-im', type=int, required=True)
    p.set_defaults(handler=cmd_scan_region)

    p = sub.add_parser('eigs-t', parents=[common], help='Eigenvalues of T_t inside a rectangle')
    p.add_argument('--t', type=float, required=True)
    _add_rectangle(p)
    p.set_defaults(handler=cmd_eigs_t)

    p = sub.add_parser('curves', parents=[common], help='Spectral curves from a sweep over t')
    p.add_argument('--t-count', type=int, default=16)
    _add_rectangle(p)
    p.set_defaults(handler=cmd_curves)

    p = sub.add_parser('verify', parents=[common], help='Run the verification suite')
    p.add_argument('--list', action='store_true', help='List check names and exit')
    p.add_argument('--break-pt', action='store_true', help='Negative control: break PT symmetry in every case')
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('generate', parents=[common], help='Write a seeded random PT coefficient file')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--degree', type=int, default=2)
    p.add_argument('--amplitude', type=float, default=0.5)
    p.set_defaults(handler=cmd_generate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = RunConfig.from_args(args)
        return args.handler(args, config)
    except FloquetInputError as e:
        status(f"❌ {e}")
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError) as e:
        status(f"❌ Cannot read {e.filename}: {e.strerror}")
        return EXIT_USAGE
    except ContourFailureError as e:
        status(f"❌ {e}")
        for attempt in e.attempts:
            status(f"   {attempt}")
        return EXIT_NUMERICAL
    except FloquetNumericalError as e:
        status(f"❌ Numerical failure: {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
