"""Command-line front end: ``siep solve | wsp-check | tower | verify | families``.

Exit codes: 0 success, 1 a check failed, 2 bad input or usage, 3 solver error.
"""
import argparse
import os
import sys
from pathlib import Path

from . import __version__, coo
from .artifacts import save_solution, save_tower, verify
from .errors import FormatError, SiepError
from .finite import SolveOptions, solve_finite
from .graph import FAMILIES, LowerAdjacencyStream, read_graph_json, read_ladj
from .infinite import SEQUENCE_FAMILIES, DenseSequenceSpec, build_tower, certify_spectrum, fingerprint
from .newton import METHODS
from .oracle import MAX_CHARPOLY_ORDER, charpoly_spectrum_check
from .wsp import has_wsp, witness_residual

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def read_spectrum(path):
    """Whitespace-separated decimals, one or more per line."""
    text = Path(path).read_text()
    try:
        return [float(t) for t in text.split()]
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SIEP_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise FormatError(f"SIEP_SEED must be an integer, got {env!r}") from exc


def _solve_options(args):
    return SolveOptions(
        epsilon=args.epsilon,
        edge_floor=args.edge_floor,
        tol=args.tol,
        wsp_tol=args.wsp_tol,
        spectrum_tol=args.spectrum_tol,
        method=args.method,
    )


def cmd_solve(args):
    try:
        graph = read_graph_json(args.graph)
        lambdas = read_spectrum(args.spectrum)
        seed = _seed(args)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if len(lambdas) != graph.n:
        print(f"error: {len(lambdas)} eigenvalues for a graph on {graph.n} vertices", file=sys.stderr)
        return EXIT_INPUT
    opts = _solve_options(args)
    try:
        sol = solve_finite(graph, lambdas, opts)
    except SiepError as exc:
        print(f"solver error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if graph.n <= MAX_CHARPOLY_ORDER and graph.n > 1:
        spread = max(lambdas) - min(lambdas)
        if not charpoly_spectrum_check(sol.matrix, lambdas, tol=2.0 * opts.spectrum_tol * max(1.0, spread) / spread):
            print("solver error: characteristic polynomial check rejected the solution", file=sys.stderr)
            return EXIT_SOLVER
    run = {"command": "solve", "seed": seed, "graph": str(args.graph), "spectrum": str(args.spectrum)}
    save_solution(sol, args.out, run)
    print(f"order {graph.n}, {len(graph.edges)} edges, spectrum error {sol.spectrum_error():.3g}")
    for rec in sol.per_step:
        print(f"  step {rec.step_index}: delta {rec.achieved_norm_delta:.3e} < budget {rec.budget:.3e}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_wsp_check(args):
    try:
        a = coo.read(args.matrix)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        cert = has_wsp(a, args.tol, exact=args.exact)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    mode = "exact" if cert.exact else f"numeric, tol {args.tol:g}"
    print(f"WSP {'holds' if cert.holds else 'fails'} ({mode})")
    print(f"kernel dimension: {cert.kernel_dimension}")
    print(f"smallest kept singular value: {cert.smallest_kept_singular_value!r}")
    print(f"largest dropped singular value: {cert.largest_dropped_singular_value!r}")
    if cert.witness is not None:
        print(f"witness commutator residual: {witness_residual(cert, a)!r}")
        print("witness (COO-SYM):")
        sys.stdout.write(coo.dumps(cert.witness))
    return EXIT_OK if cert.holds else EXIT_FAIL


def _sequence(args):
    fam = args.seq
    if fam == "dyadic":
        return DenseSequenceSpec("dyadic", a=args.a, b=args.b)
    if fam == "clusters":
        if not args.limits:
            raise FormatError("--seq clusters needs --limits")
        return DenseSequenceSpec("clusters", limits=tuple(args.limits), width=args.width)
    if fam == "file":
        if not args.seq_file:
            raise FormatError("--seq file needs --seq-file")
        return DenseSequenceSpec("file", values=tuple(read_spectrum(args.seq_file)))
    return DenseSequenceSpec(fam)


def cmd_tower(args):
    try:
        seed = _seed(args)
        stream = read_ladj(args.graph_file) if args.graph_file else LowerAdjacencyStream(args.graph, p=args.p, seed=seed)
        seq = _sequence(args)
    except (OSError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    opts = _solve_options(args)
    try:
        tower = build_tower(stream, seq, args.levels, opts)
    except SiepError as exc:
        level = f" at level {exc.step + 1}" if exc.step is not None else ""
        print(f"solver error{level} ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_SOLVER
    cert = certify_spectrum(tower, args.tail)
    fp = fingerprint(tower, args.delta, certificate=cert)
    run = {"command": "tower", "seed": seed, "levels": args.levels, "tail": len(cert.tail), "delta": fp.delta}
    if args.out:
        save_tower(tower, args.out, cert, fp, run)

    print(f"{'level':>5}  {'delta':>10}  {'budget':>10}  check")
    passed = 0
    for rec in tower.records:
        ok = rec.achieved_norm_delta < rec.budget and rec.wsp.holds
        passed += ok
        print(f"{rec.step_index:>5}  {rec.achieved_norm_delta:10.3e}  {rec.budget:10.3e}  {'pass' if ok else 'FAIL'}")
    print(f"budget checks: {passed}/{len(tower.records)} pass")
    print(f"tail bound: {cert.tail_bound!r} ({len(cert.tail)} tail terms sampled)")
    print(f"essential spectrum estimate: {[float(f'{x:.6g}') for x in fp.essential_spectrum_estimate]}")
    mults = sorted({m for _, m in fp.isolated_points})
    print(f"isolated points: {len(fp.isolated_points)} (multiplicities {mults}), unresolved: {fp.unresolved}")
    if fp.compact_tail:
        print(f"tail is a compact perturbation of {fp.essential_spectrum_estimate[0]:.6g}*I")
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK if passed == len(tower.records) else EXIT_FAIL


def cmd_verify(args):
    try:
        report = verify(args.path)
    except (OSError, FormatError, ValueError, KeyError) as exc:
        print(f"error: cannot read artifact: {exc}", file=sys.stderr)
        return EXIT_INPUT
    lines = report.lines() if args.verbose else report.grouped_lines()
    print("\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_families(args):
    print("graph families: " + ", ".join(FAMILIES))
    print("sequence families: " + ", ".join(SEQUENCE_FAMILIES))
    return EXIT_OK


def _add_solver_flags(p):
    p.add_argument("--epsilon", type=_positive, default=None, help="cap on every step budget")
    p.add_argument("--edge-floor", type=_positive, default=1e-10)
    p.add_argument("--tol", type=_positive, default=1e-12, help="Newton residual tolerance")
    p.add_argument("--wsp-tol", type=_positive, default=1e-9)
    p.add_argument("--spectrum-tol", type=_positive, default=1e-8)
    p.add_argument("--method", choices=METHODS, default="spectral")
    p.add_argument("--seed", type=int, default=None, help="overrides SIEP_SEED")


def build_parser():
    parser = argparse.ArgumentParser(prog="siep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="finite graph + spectrum -> matrix")
    p.add_argument("graph", help="graph JSON {\"n\": ..., \"edges\": [[i, j], ...]}")
    p.add_argument("spectrum", help="text file of eigenvalues")
    p.add_argument("--out", required=True, help="output directory")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("wsp-check", help="test a COO-SYM matrix for the weak spectral property")
    p.add_argument("matrix")
    p.add_argument("--exact", action="store_true", help="rational elimination (order <= 8)")
    p.add_argument("--tol", type=_positive, default=1e-9)
    p.set_defaults(func=cmd_wsp_check)

    p = sub.add_parser("tower", help="truncation tower for a countable graph")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--graph", choices=FAMILIES, default="path")
    g.add_argument("--graph-file", help="LADJ file")
    p.add_argument("--p", type=float, default=0.5, help="edge probability of the random family")
    p.add_argument("--seq", choices=SEQUENCE_FAMILIES, default="harmonic")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--limits", type=float, nargs="+")
    p.add_argument("--width", type=_positive, default=0.1)
    p.add_argument("--seq-file")
    p.add_argument("--levels", type=_positive_int, required=True)
    p.add_argument("--tail", type=_positive_int, default=None, help="tail sample size (default 10*levels)")
    p.add_argument("--delta", type=_positive, default=None, help="resolution (default 2*tail bound)")
    p.add_argument("--out", help="output directory")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("verify", help="re-check a solve or tower directory")
    p.add_argument("path")
    p.add_argument("-v", "--verbose", action="store_true", help="list passing checks too")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("families", help="list built-in graph and sequence families")
    p.set_defaults(func=cmd_families)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
