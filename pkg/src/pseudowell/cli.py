"""``pseudowell`` command line: sweep, figure, check, bound, scatter.

Exit codes: 0 ok, 1 check failure (or a solver that did not converge), 2 usage.
Data goes to stdout or ``-o``; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

import numpy as np

from . import bound, checks, scattering, sweep
from .potentials import PotentialSpec, decompose
from .transfer import DegenerateSystemError, oracle_amplitudes, oracle_real_bound_states

log = logging.getLogger("pseudowell")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _add_potential(p, need_k=False):
    p.add_argument("--family", required=True, help="I or II")
    p.add_argument("--v0", type=float, required=True, help="well depth (model I) or central spike depth (model II)")
    p.add_argument("--a", type=float, required=True, help="width")
    p.add_argument("--lam", type=float, default=0.0, help="imaginary delta strength")
    p.add_argument("--variant", choices=("resolved", "printed"), default="resolved",
                   help="reading of the model II formulas")
    p.add_argument("--oracle", action="store_true", help="use the transfer-matrix oracle")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    if need_k:
        p.add_argument("--k", type=float, nargs="+", required=True, help="wavenumber(s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudowell", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    p.add_argument("config", nargs="?", help="key = value config file; flags override it")
    p.add_argument("--family")
    p.add_argument("--swept", choices=sweep.PARAMETERS)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--outputs", help="comma separated: " + ",".join(sweep.OUTPUTS))
    for name in ("v0", "a", "lam", "k"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--geometric", dest="linear", action="store_const", const=False, default=None)
    p.add_argument("--oracle", action="store_const", const=True, default=None)
    p.add_argument("--variant", choices=("resolved", "printed"))
    p.add_argument("-o", "--output")

    p = sub.add_parser("figure", help="regenerate one figure panel as CSV")
    p.add_argument("name", help="one of " + ", ".join(sweep.preset_names()))
    p.add_argument("--oracle", action="store_true")
    p.add_argument("-o", "--output")

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--inject", choices=checks.FAULTS, help="deliberately break one ingredient")
    p.add_argument("--model2-variant", choices=("resolved", "printed"), default="resolved")
    p.add_argument("--perturbative-series", choices=("printed", "rederived"), default="printed")

    p = sub.add_parser("bound", help="bound states of one potential")
    _add_potential(p)
    p.add_argument("--complex", action="store_true", help="look for the complex pair instead")
    p.add_argument("--seed", type=complex, help="Newton seed for --complex, e.g. 0.01+0.07j")
    p.add_argument("--tol", type=float, default=bound.DEFAULT_TOL)

    p = sub.add_parser("scatter", help="amplitudes of one potential at given k")
    _add_potential(p, need_k=True)
    return parser


def _cmd_sweep(args) -> int:
    mapping = {}
    if args.config:
        try:
            with open(args.config) as fh:
                mapping = sweep.parse_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for key in ("family", "swept", "start", "stop", "count", "outputs", "v0", "a", "lam", "k",
                "linear", "oracle", "variant"):
        value = getattr(args, key)
        if value is not None:
            mapping[key] = value
    spec = sweep.sweep_from_mapping(mapping)
    log.info("sweep %s over %d points", spec.swept, spec.count)
    table = sweep.run_sweep(spec)
    with _output(args.output) as fh:
        sweep.write_csv(table, fh)
    return EXIT_OK


def _cmd_figure(args) -> int:
    if args.name not in sweep.PRESETS:
        raise UsageError(f"unknown preset {args.name!r}; choose from {', '.join(sweep.preset_names())}")
    text = sweep.emit_figure(args.name, oracle=args.oracle)
    with _output(args.output) as fh:
        fh.write(text)
    return EXIT_OK


def _cmd_check(args) -> int:
    report = checks.run_check(args.inject, args.model2_variant, args.perturbative_series)
    print(report.render(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _spec(args) -> PotentialSpec:
    return PotentialSpec(args.family, args.v0, args.a, args.lam)


def _cmd_bound(args) -> int:
    spec = _spec(args)
    header = ["beta_re", "beta_im", "energy_re", "energy_im", "residual"]
    rows = []
    if args.complex:
        pair = bound.find_complex_pair(spec, tol=args.tol, seed=args.seed, variant=args.variant)
        states = list(pair)
    elif args.oracle:
        eps, beta_max = bound.search_window(spec)
        system = decompose(spec)
        roots = oracle_real_bound_states(system, beta_max, beta_min=eps, n=bound.GRID_POINTS)
        states = [bound.BoundState(complex(b), complex(-b * b), bound.Kind.REAL,
                                   scattering.transmission_pole_residual(spec, b)) for b in roots]
    else:
        states = bound.find_real_bound_states(spec, tol=args.tol, variant=args.variant)
    if not states:
        log.warning("no real bound state for %s", spec)
    for s in states:
        rows.append([s.beta.real, s.beta.imag, s.energy.real, s.energy.imag, s.residual])
    with _output(args.output) as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(sweep.format_cell(v) for v in row) + "\n")
    return EXIT_OK


def _cmd_scatter(args) -> int:
    spec = _spec(args)
    k = np.asarray(args.k, dtype=float)
    data = (oracle_amplitudes(decompose(spec), k) if args.oracle
            else scattering.amplitudes(spec, k, args.variant))
    header = ["k"] + [f"{n}_{part}" for n in ("tL", "tR", "rL", "rR") for part in ("re", "im")]
    with _output(args.output) as fh:
        fh.write(",".join(header) + "\n")
        for i, kv in enumerate(k):
            cells = [kv]
            for n in ("tL", "tR", "rL", "rR"):
                z = complex(np.broadcast_to(getattr(data, n), k.shape)[i])
                cells += [z.real, z.imag]
            fh.write(",".join(sweep.format_cell(v) for v in cells) + "\n")
    return EXIT_OK


COMMANDS = {"sweep": _cmd_sweep, "figure": _cmd_figure, "check": _cmd_check,
            "bound": _cmd_bound, "scatter": _cmd_scatter}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for bad usage
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"pseudowell {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (bound.ConvergenceError, DegenerateSystemError) as exc:
        print(f"pseudowell {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
