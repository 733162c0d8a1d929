"""Command line interface: ``ropelength {generate,evaluate,minimize,profile,clasp,probe}``.

Exit status is 0 on success, 1 for invalid input, 2 for a singular configuration
and 3 when the polygon is too coarse for the requested computation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import _parallel
from .energy import clasp_divergence_series, loglog_slope, rp_energy, rp_gradient
from .exceptions import ResolutionError, RopelengthError, SingularConfigurationError
from .io import EnergyReport, emit_profile_csv, read_knot, serialize_knot, serialize_report
from .knot import (
    SymmetryGroup222,
    curvature_torsion_profile,
    generate_circle,
    generate_perturbed_circle,
    generate_stadium,
    generate_torus_knot,
)
from .optimize import OptimizerConfig, default_schedule, run_continuation, stability_probe
from .thickness import thickness
from .validation import parse_exponent_list, parse_schedule

EXIT_OK, EXIT_INVALID, EXIT_SINGULAR, EXIT_RESOLUTION = 0, 1, 2, 3


def _write(data: bytes, path):
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _json(doc) -> bytes:
    return (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode("utf-8")


def energy_report(K, exponents, threads=None, trajectory=None) -> EnergyReport:
    rep = thickness(K, threads)
    energies, grads = {}, {}
    for p in exponents:
        energies[p] = rp_energy(K, p, threads).value
        grads[p] = rp_gradient(K, p, threads).norm if p < 8192 else None
    return EnergyReport(K.length, rep.tau, rep.ropelength, energies, grads, trajectory)


# -- commands ---------------------------------------------------------------------


def cmd_generate(args):
    if args.torus:
        K = generate_torus_knot(args.torus[0], args.torus[1], args.major, args.minor, args.n)
    elif args.stadium:
        K = generate_stadium(args.n, args.radius, args.straight)
    elif args.perturbed:
        K = generate_perturbed_circle(args.n, args.amplitude, seed=args.seed if args.seed is not None else 0)
    else:
        K = generate_circle(args.n, args.radius)
    _write(serialize_knot(K), args.output)


def cmd_evaluate(args):
    K = read_knot(args.knot)
    _write(serialize_report(energy_report(K, args.p, args.threads)), args.output)


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(
        max_iter=args.max_iter,
        tol=args.tol,
        resample_every=args.resample_every,
        symmetry=SymmetryGroup222() if args.symmetry == "222" else None,
        threads=args.threads,
    )


def cmd_minimize(args):
    K = read_knot(args.knot)
    lo, hi = parse_schedule(args.schedule)
    run = run_continuation(K, default_schedule(lo, hi), _config(args))
    if run.failure:
        logging.getLogger(__name__).error("continuation stopped early: %s", run.failure)
    trajectory = [s.summary() for s in run.stages]
    out = run.knot
    if args.symmetry == "222":
        out = type(out)(out.vertices, {**out.metadata, "symmetry": "222"})
    exps = [s.p for s in run.stages[-1:]]
    report = energy_report(out, exps, args.threads, trajectory)
    knot_path = args.knot_output
    if knot_path is None and args.output not in (None, "-"):
        knot_path = str(Path(args.output).with_suffix("")) + ".knot.json"
    if knot_path:
        _write(serialize_knot(out), knot_path)
    _write(serialize_report(report), args.output)
    if run.failure:
        raise SingularConfigurationError(run.failure)


def cmd_profile(args):
    K = read_knot(args.knot)
    _write(emit_profile_csv(curvature_torsion_profile(K)), args.output)


def cmd_clasp(args):
    gaps = [args.gap_max / 2**k for k in range(args.octaves + 1)]
    rows = []
    for p in args.p:
        series = clasp_divergence_series(p, gaps, args.n, threads=args.threads)
        values = [e.value for e in series]
        rows.append({
            "p": p,
            "energies": values,
            "ratios": [b / a for a, b in zip(values, values[1:])],
            "slope": loglog_slope(gaps, series),
        })
    _write(_json({"gaps": gaps, "n": args.n, "series": rows}), args.output)


def cmd_probe(args):
    K = read_knot(args.knot)
    cfg = _config(args)
    v = stability_probe(K, args.p[0], args.epsilon, args.trials, cfg, seed=args.seed,
                        critical_tol=args.critical_tol)
    _write(_json({
        "classification": v.classification,
        "escape_gap": v.escape_gap,
        "trials": v.trials,
        "p": args.p[0],
        "epsilon": args.epsilon,
        "energy": v.energy,
        "trial_energies": list(v.trial_energies),
        "seed": v.seed,
    }), args.output)


# -- parser -------------------------------------------------------------------------


def _add_common(sp, exponents=None):
    sp.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
    sp.add_argument("--threads", type=int, default=None, help="worker threads for energy evaluation")
    if exponents is not None:
        sp.add_argument("-p", type=parse_exponent_list, default=parse_exponent_list(exponents),
                        help=f"comma-separated exponents (default {exponents})")


def _add_optimizer(sp):
    sp.add_argument("--max-iter", type=int, default=300, help="iterations per stage")
    sp.add_argument("--tol", type=float, default=1e-6, help="gradient-norm tolerance")
    sp.add_argument("--resample-every", type=int, default=50)
    sp.add_argument("--symmetry", choices=["222"], default=None)


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 1, keeping 2 for singular configurations."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ropelength", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a knot file")
    kind = g.add_mutually_exclusive_group()
    kind.add_argument("--circle", action="store_true", help="regular polygon (default)")
    kind.add_argument("--torus", type=int, nargs=2, metavar=("P", "Q"))
    kind.add_argument("--stadium", action="store_true")
    kind.add_argument("--perturbed", action="store_true", help="randomly perturbed circle")
    g.add_argument("-n", type=int, default=200)
    g.add_argument("--major", type=float, default=2.0)
    g.add_argument("--minor", type=float, default=1.0)
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--straight", type=float, default=2.0)
    g.add_argument("--amplitude", type=float, default=0.05)
    g.add_argument("--seed", type=int, default=None)
    _add_common(g)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("evaluate", help="length, thickness, ropelength and energies")
    e.add_argument("knot")
    _add_common(e, "2,16,256")
    e.set_defaults(func=cmd_evaluate)

    m = sub.add_parser("minimize", help="p-continuation minimization")
    m.add_argument("knot")
    m.add_argument("--schedule", default="2:256", help="lo:hi, powers of two (default 2:256)")
    m.add_argument("--knot-output", default=None, help="where to write the minimized knot")
    _add_optimizer(m)
    _add_common(m)
    m.set_defaults(func=cmd_minimize)

    pr = sub.add_parser("profile", help="curvature and torsion CSV")
    pr.add_argument("knot")
    _add_common(pr)
    pr.set_defaults(func=cmd_profile)

    c = sub.add_parser("clasp", help="energy of two strands crossing at shrinking gaps")
    c.add_argument("-n", type=int, default=2048)
    c.add_argument("--gap-max", type=float, default=0.2)
    c.add_argument("--octaves", type=int, default=4)
    _add_common(c, "1,4")
    c.set_defaults(func=cmd_clasp)

    s = sub.add_parser("probe", help="saddle or minimum test by perturb-and-reminimize")
    s.add_argument("knot")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--epsilon", type=float, default=0.02, help="perturbation size relative to length")
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--critical-tol", type=float, default=0.05)
    _add_optimizer(s)
    _add_common(s, "64")
    s.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", None) is not None:
        _parallel.set_num_threads(args.threads)
    try:
        args.func(args)
    except ResolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (SingularConfigurationError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (RopelengthError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
