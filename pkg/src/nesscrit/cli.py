"""Command-line front end.

Exit codes: 0 success, 2 invalid input (model file, arguments, unsupported
generator, empty fit window), 3 numerical failure (tolerance not met,
singular steady state, integration failure).  Errors are written to stderr
as one JSON record ``{"error": ..., "message": ..., "exit_code": ...}``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import criticality as crit
from .errors import ModelValidationError, NessError, NumericalError, QuadratureToleranceError
from .io import dump_model, dumps, format_csv, load_model, model_to_dict, read_csv, write_csv
from .model import LatticeModel, LindbladGenerator, build_damping_matrices
from .ness import (
    bulk_profile,
    correlations_quadrature,
    degenerate_even_sector,
    lyapunov_residual,
    model_symbol,
    occupation,
    solve_lyapunov_finite,
)
from .tolerances import TOL, check_environment, overridden

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
SPECIES = {"odd": 0, "even": 1}


class CliError(ModelValidationError):
    """Bad combination of command-line options."""


class _Parser(argparse.ArgumentParser):
    """Report usage errors as exceptions so they share the JSON error record."""

    def error(self, message):
        raise CliError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# argument helpers


def _complex(text: str) -> complex:
    """``re,im`` or a Python complex literal such as ``-1`` or ``0.5+1j``."""
    try:
        if "," in text:
            re_, im_ = text.split(",")
            return complex(float(re_), float(im_))
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _window(text: str) -> tuple:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'lo,hi', got {text!r}") from None
    return lo, hi


def _entry(text: str) -> tuple:
    try:
        a, b = text.split(",")
        return SPECIES[a], SPECIES[b]
    except (ValueError, KeyError):
        raise argparse.ArgumentTypeError(f"entry must be e.g. 'odd,odd' or 'odd,even', got {text!r}") from None


def _tolerance(text: str) -> tuple:
    name, _, value = text.partition("=")
    try:
        return name.strip().upper(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance must be NAME=VALUE, got {text!r}") from None


def _fixed(text: str) -> tuple:
    k, _, v = text.partition("=")
    try:
        return int(k), _complex(v)
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"fixed coupling must be K=re,im, got {text!r}") from None


def _emit(args, text: str):
    if getattr(args, "output", None):
        Path(args.output).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


def _metadata(args, **extra) -> dict | None:
    if args.no_metadata:
        return None
    meta = {"nesscrit": __version__}
    meta.update({f"tol.{k}": v for k, v in sorted(TOL.items())})
    meta.update(extra)
    return meta


def _report(args, payload: dict, **extra):
    meta = _metadata(args, **extra)
    if meta is not None:
        payload = dict(payload, metadata=meta)
    _emit(args, dumps(payload))


def _odd_generator(model: LatticeModel, index: int) -> LindbladGenerator:
    if not 0 <= index < len(model.generators):
        raise CliError(f"model has {len(model.generators)} generators; no index {index}")
    return model.generators[index]


def _finite(model: LatticeModel, L: int | None, periodic: bool | None = None) -> LatticeModel:
    if L is not None:
        return model.finite(L, True if periodic is None else periodic)
    if not model.is_finite:
        raise CliError("this method needs a finite chain: give --L or a finite model file")
    return model


# ---------------------------------------------------------------------------
# subcommands


def cmd_model_validate(args):
    model = load_model(args.model)
    _emit(args, dump_model(model))


def cmd_ness_correlations(args):
    model = load_model(args.model)
    entry = args.entry
    if args.method == "residue":
        if not model.is_odd_only:
            raise CliError("residue method needs odd-only generators; use --method quadrature")
        if entry[0] != entry[1] and degenerate_even_sector(model.infinite()):
            raise CliError("odd-only symbol is diagonal; use a diagonal --entry")
        frac = crit.model_symbol_fraction(model)
        prof = crit.residue_correlations(frac, args.dmax, entry=entry)
        achieved = 0.0
    elif args.method == "quadrature":
        prof = correlations_quadrature(model_symbol(model.infinite()), args.dmax, entry=entry, atol=args.atol)
        achieved = prof.achieved_error
    else:
        fin = _finite(model, args.L)
        dm = build_damping_matrices(fin)
        degenerate = degenerate_even_sector(fin)
        gamma = solve_lyapunov_finite(dm, degenerate="zero" if degenerate else "raise")
        if args.gamma_output:
            n = gamma.gamma.shape[0]
            write_csv(args.gamma_output, [f"c{k}" for k in range(n)], gamma.gamma.tolist())
        prof = bulk_profile(gamma, args.dmax, entry)
        achieved = lyapunov_residual(dm, gamma.gamma)
    meta = _metadata(args, method=args.method, entry=f"{entry[0]},{entry[1]}", achieved_error=achieved)
    _emit(args, format_csv(("d", "re", "im"), prof.rows(), meta))


def cmd_ness_occupation(args):
    model = load_model(args.model)
    if args.method == "finite":
        fin = _finite(model, args.L)
        degenerate = degenerate_even_sector(fin)
        gamma = solve_lyapunov_finite(build_damping_matrices(fin), degenerate="zero" if degenerate else "raise")
        value = occupation(gamma)
    else:
        value = occupation(model_symbol(model.infinite()))
    _report(args, {"occupation": value, "method": args.method})


def cmd_gap(args):
    model = load_model(args.model)
    if args.method == "finite":
        fin = _finite(model, args.L)
        value = crit.damping_gap_finite(build_damping_matrices(fin))
        _report(args, {"gap": value, "method": "finite", "L": fin.chain.L})
        return
    inf = model.infinite()
    if inf.is_odd_only:
        value = crit.damping_gap(crit.model_symbol_fraction(inf), samples=args.samples)
    else:
        value = crit.damping_gap_model(inf, samples=args.samples)
    if args.spectrum_output:
        if not inf.is_odd_only:
            raise CliError("--spectrum-output needs odd-only generators")
        phi = 2 * np.pi * np.arange(args.samples) / args.samples
        rate = sum(crit.damping_spectrum(g, phi) for g in inf.generators)
        write_csv(args.spectrum_output, ("phi", "rate"), zip(phi, rate))
    _report(args, {"gap": value, "method": "symbol", "samples": args.samples})


def cmd_critical_check(args):
    model = load_model(args.model)
    gen = _odd_generator(model, args.generator)
    z0 = complex(args.z0)
    if abs(abs(z0) - 1) > TOL["CIRCLE"]:
        raise CliError(f"--z0 must lie on the unit circle (|z0| = {abs(z0)})")
    c1, c2 = crit.criticality_conditions(gen, z0)
    critical = max(abs(c1), abs(c2)) < 1e-10 * max(1.0, float(np.abs(gen.odd_values).sum()))
    payload = {"z0": z0, "conditions": [c1, c2], "critical": bool(critical)}
    if critical:
        M = crit.moment_order(gen, z0)
        payload["momentOrder"] = M
        payload["moments"] = [list(pair) for pair in crit.moment_conditions(gen, z0, min(M, gen.span - 1))]
    _report(args, payload)


def cmd_critical_solve(args):
    fixed = dict(args.fix or [])
    fam = crit.solve_critical_parameters(args.sites, args.order, complex(args.z0), fixed)
    gen = fam.generator()
    payload = {
        "sites": fam.span,
        "order": fam.order,
        "z0": fam.z0,
        "particular": fam.particular,
        "basis": fam.basis,
        "free_real_dimension": fam.free_dimension,
        "residual": fam.residual,
        "model": model_to_dict(LatticeModel((gen,))),
        "report": crit.predict_exponents(gen).to_json(),
    }
    _report(args, payload)


def cmd_critical_predict(args):
    model = load_model(args.model)
    gen = _odd_generator(model, args.generator)
    report = crit.predict_exponents(gen)
    normalized, _ = gen.normalize()
    roots = crit.denominator_roots(crit.to_symbol_fraction(normalized))
    payload = {"report": report.to_json(), "roots": roots.to_json()}
    if args.dimension and report.critical:
        payload["manifold"] = crit.empirical_manifold_dimension(gen).to_json()
    _report(args, payload)


def cmd_sweep(args):
    from .experiments.sweep import Grid, ParameterPath, SweepSpec, sweep

    grid = Grid(args.start, args.stop, args.count, args.spacing, args.side)
    if args.kind == "quantum-optical":
        spec = SweepSpec(grid, kind="quantum-optical", critical=args.critical,
                         qo_params=(args.chi, args.nu, args.g), qo_field=args.field)
    else:
        if not args.model:
            raise CliError("generator sweeps need a model file")
        path = ParameterPath(args.generator, args.index, args.field, args.species, args.mode)
        spec = SweepSpec(grid, model=load_model(args.model).infinite(), path=path, critical=args.critical)
    result = sweep(spec, workers=args.workers)
    rows = [(pt.p, pt.xi_inv, pt.gap, pt.root_mod) for pt in result.points]
    meta = _metadata(args, kind=args.kind, failures=len(result.failures))
    _emit(args, format_csv(("g", "xi_inv", "gap", "root_mod"), rows, meta))
    for pt in result.failures:
        sys.stderr.write(json.dumps({"warning": "sweep point failed", "p": pt.p, "message": pt.error}) + "\n")


def cmd_fit(args):
    from .experiments.fitting import fit_dynamical_exponent, fit_static_exponent

    rows = read_csv(args.sweep)
    if not rows:
        raise CliError(f"{args.sweep} has no data rows")

    class _Table:
        p = np.array([r["g"] for r in rows])
        xi_inv = np.array([r["xi_inv"] for r in rows])
        gap = np.array([r["gap"] for r in rows])

    if args.kind == "static":
        fit = fit_static_exponent(_Table, args.critical, args.window)
    else:
        if args.lam is None:
            raise CliError("dynamical fits need --lambda")
        fit = fit_dynamical_exponent(_Table, args.critical, args.lam, args.window)
    _report(args, fit.to_json())


def cmd_figure(args):
    from .experiments.figures import reproduce_figure_data

    bundle = reproduce_figure_data(args.id, args.outdir, points=args.points, dmax=args.dmax, workers=args.workers)
    _report(args, bundle.to_json())


def cmd_oracle(args):
    from .experiments.crosscheck import exact_vs_gaussian

    model = _finite(load_model(args.model), args.L)
    two, four = exact_vs_gaussian(model, tolerance=args.tolerance)
    payload = {"L": model.chain.L, "checks": [two.to_json(), four.to_json()],
               "passed": two.passed and four.passed}
    _report(args, payload)
    if not payload["passed"]:
        raise NumericalError("exact and Gaussian correlators disagree beyond tolerance")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--no-metadata", action="store_true", help="omit the metadata header/record")
    common.add_argument("--tol", action="append", type=_tolerance, default=[], metavar="NAME=VALUE",
                        help="override a default tolerance (also settable as NESS_TOL_NAME)")
    workers = argparse.ArgumentParser(add_help=False)
    workers.add_argument("--workers", type=int, default=None,
                         help="parallel worker processes (default: all cores)")

    p = _Parser(prog="nesscrit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    model = sub.add_parser("model", help="model-file utilities").add_subparsers(dest="action", required=True)
    v = model.add_parser("validate", parents=[common], help="check a model file and print its canonical form")
    v.add_argument("model")
    v.set_defaults(func=cmd_model_validate)

    ness = sub.add_parser("ness", help="steady-state correlations").add_subparsers(dest="action", required=True)
    c = ness.add_parser("correlations", parents=[common], help="<w_(0,a) w_(d,b)> for d = 0..dmax as CSV")
    c.add_argument("model")
    c.add_argument("--method", choices=("residue", "quadrature", "finite"), default="quadrature")
    c.add_argument("--dmax", type=int, default=20)
    c.add_argument("--entry", type=_entry, default=(0, 0), help="species pair, e.g. odd,odd (default)")
    c.add_argument("--L", type=int, help="site count for --method finite (periodic)")
    c.add_argument("--atol", type=float, default=None, help="quadrature target accuracy")
    c.add_argument("--gamma-output", help="also write the finite correlation matrix as CSV")
    c.set_defaults(func=cmd_ness_correlations)
    o = ness.add_parser("occupation", parents=[common], help="mean <c^dag c> per site")
    o.add_argument("model")
    o.add_argument("--method", choices=("symbol", "finite"), default="symbol")
    o.add_argument("--L", type=int)
    o.set_defaults(func=cmd_ness_occupation)

    g = sub.add_parser("gap", parents=[common], help="damping gap")
    g.add_argument("model")
    g.add_argument("--method", choices=("symbol", "finite"), default="symbol")
    g.add_argument("--L", type=int)
    g.add_argument("--samples", type=int, default=4096)
    g.add_argument("--spectrum-output", help="write the band -r(phi)-r(-phi) as phi,rate CSV")
    g.set_defaults(func=cmd_gap)

    cr = sub.add_parser("critical", help="criticality analysis").add_subparsers(dest="action", required=True)
    ck = cr.add_parser("check", parents=[common], help="criticality conditions at z0")
    ck.add_argument("model")
    ck.add_argument("--z0", type=_complex, required=True, help="point on the unit circle, 're,im'")
    ck.add_argument("--generator", type=int, default=0)
    ck.set_defaults(func=cmd_critical_check)
    cs = cr.add_parser("solve", parents=[common], help="couplings critical at z0 with a given moment order")
    cs.add_argument("--sites", type=int, required=True)
    cs.add_argument("--order", type=int, required=True)
    cs.add_argument("--z0", type=_complex, required=True)
    cs.add_argument("--fix", type=_fixed, action="append", metavar="K=re,im", help="prescribe s_K")
    cs.set_defaults(func=cmd_critical_solve)
    cp = cr.add_parser("predict", parents=[common], help="predicted exponents from the symbol's roots")
    cp.add_argument("model")
    cp.add_argument("--generator", type=int, default=0)
    cp.add_argument("--dimension", action="store_true", help="also measure the critical-manifold dimension")
    cp.set_defaults(func=cmd_critical_predict)

    sw = sub.add_parser("sweep", parents=[common, workers], help="sweep one parameter; CSV g,xi_inv,gap,root_mod")
    sw.add_argument("model", nargs="?")
    sw.add_argument("--kind", choices=("generator", "quantum-optical"), default="generator")
    sw.add_argument("--generator", type=int, default=0)
    sw.add_argument("--index", type=int, default=1)
    sw.add_argument("--field", choices=("nu", "g"), default="g")
    sw.add_argument("--species", choices=("odd", "even", "both"), default="odd")
    sw.add_argument("--mode", choices=("set", "shift"), default="set")
    sw.add_argument("--start", type=float, required=True)
    sw.add_argument("--stop", type=float, required=True)
    sw.add_argument("--count", type=int, default=25)
    sw.add_argument("--spacing", choices=("linear", "log"), default="linear")
    sw.add_argument("--side", type=int, choices=(1, -1), default=1)
    sw.add_argument("--critical", type=float)
    sw.add_argument("--chi", type=float, default=1.0)
    sw.add_argument("--nu", type=float, default=1.0)
    sw.add_argument("--g", type=float, default=0.0)
    sw.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fit", parents=[common], help="power-law fit of a sweep CSV")
    f.add_argument("sweep")
    f.add_argument("--kind", choices=("static", "dynamical"), default="static")
    f.add_argument("--critical", type=float, required=True)
    f.add_argument("--lambda", dest="lam", type=float)
    f.add_argument("--window", type=_window, default=(1e-4, 1e-2))
    f.set_defaults(func=cmd_fit)

    fg = sub.add_parser("figure", parents=[common, workers], help="emit figure data as CSV plus gnuplot stub")
    fg.add_argument("--id", choices=("fig2", "fig4"), required=True)
    fg.add_argument("--outdir", default=".")
    fg.add_argument("--points", type=int, default=101)
    fg.add_argument("--dmax", type=int, default=30)
    fg.set_defaults(func=cmd_figure)

    orc = sub.add_parser("oracle", parents=[common], help="exact Liouvillian vs Gaussian solver (L <= 4)")
    orc.add_argument("model")
    orc.add_argument("--L", type=int)
    orc.add_argument("--tolerance", type=float, default=1e-8)
    orc.set_defaults(func=cmd_oracle)
    return p


def _error(exc: BaseException, code: int) -> int:
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    achieved = getattr(exc, "achieved", None)
    if achieved is not None:
        record["achieved"] = achieved if math.isfinite(achieved) else None
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        return _error(exc, EXIT_INVALID)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if getattr(args, "workers", 1) is not None and getattr(args, "workers", 1) < 1:
        return _error(CliError("--workers must be at least 1"), EXIT_INVALID)
    try:
        check_environment()
        with overridden(**dict(args.tol)):
            args.func(args)
    except (NumericalError, QuadratureToleranceError) as exc:
        return _error(exc, EXIT_NUMERICAL)
    except (NessError, ValueError) as exc:
        return _error(exc, EXIT_INVALID)
    except OSError as exc:
        return _error(exc, EXIT_INVALID)
    return EXIT_OK


def main() -> None:  # pragma: no cover - console-script shim
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
