"""
Command-line entry point for the cluster braiding verifier.
Dispatches the cluster, braid, qtorus, opcalc, rk, phi, volume and checkall
subcommands, reads the JSON input schemas and prints JSON results.
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from analytic import (
    DilogParams,
    faddeev_phi,
    five_term_check,
    flip_dihedral_check,
    fourier_transform_check,
    inversion_check,
    octahedron_volume,
    shift_check,
)
from braid_classical import (
    build_braid_matrix,
    evaluate_braid_word,
    parse_braid_word,
    verify_braid_relations,
    verify_definition_consistency,
)
from check_report import CheckReport
from check_suite import LEVELS, run_check_suite
from cluster_core import generic_x_seed, generic_y_seed, mutate_sequence, verify_mutation_properties
from config import VerifierSettings, configure_logging, load_settings
from operator_calculus import replay_braid_proof, verify_adjoint
from quantum_torus import verify_heisenberg_realisation, verify_quantum_braid, verify_Rq_equals_mutations
from root_of_unity import (
    build_RK,
    delta_limit_study,
    fourier_w_check,
    verify_braid_matrix,
    verify_rk,
)
from seed_loader import (
    complex_to_json,
    load_matrix,
    load_seed,
    load_y_values,
    matrix_to_dict,
    parse_complex,
    save_matrix,
    seed_summary,
    seed_to_dict,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
Result = Union[CheckReport, Dict]


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


class _UsageError(Exception):
    def __init__(self, code: int):
        self.code = code


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors instead of exiting."""

    def exit(self, status=0, message=None):
        if message:
            self._print_message(message, sys.stderr)
        raise _UsageError(status)


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with one subparser per module."""
    pretty = _Parser(add_help=False)
    pretty.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS,
                        help="human-readable output instead of JSON")
    rng = _Parser(add_help=False)
    rng.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    rng.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="concurrent check tasks")

    parser = _Parser(prog="main_verifier.py", description="Cluster braiding verifier",
                     parents=[pretty, rng])
    parser.add_argument("--log-level", default=None, help="override VERIFIER_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cluster = commands.add_parser("cluster", help="seeds and mutations").add_subparsers(dest="action", required=True)
    p = cluster.add_parser("mutate", parents=[pretty], help="mutate a seed file")
    p.add_argument("--input", required=True, help="seed JSON")
    p.add_argument("--ks", type=_int_list, required=True, help="mutation sequence, e.g. 1,3,2")
    p = cluster.add_parser("summary", parents=[pretty], help="describe a seed file")
    p.add_argument("--input", required=True)
    p = cluster.add_parser("check", parents=[pretty, rng], help="mutation properties on random seeds")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--size", type=int, default=4)

    braid = commands.add_parser("braid", help="classical braiding operators").add_subparsers(dest="action", required=True)
    p = braid.add_parser("eval", parents=[pretty], help="apply a braid word")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--word", required=True, help='e.g. "s1 s2^-1 s1"')
    p.add_argument("--seed", dest="seed_file", default=None, help="seed JSON (default: generic seed)")
    p.add_argument("--mode", choices=("x", "y"), default="y")
    p = braid.add_parser("verify", parents=[pretty], help="braid relations on a generic seed")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--mode", choices=("x", "y"), default="y")
    p.add_argument("--definition", action="store_true", help="also compare with the mutation word")

    qtorus = commands.add_parser("qtorus", help="quantum torus checks").add_subparsers(dest="action", required=True)
    p = qtorus.add_parser("verify-rq", parents=[pretty, rng], help="closed form versus quantum mutations")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--mode", choices=("complex", "cyclotomic"), default="complex")
    p = qtorus.add_parser("braid", parents=[pretty, rng], help="quantum braid relations")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--mode", choices=("complex", "cyclotomic"), default="complex")
    p = qtorus.add_parser("heisenberg", parents=[pretty], help="x/p realisation of the torus")
    p.add_argument("--n", type=int, default=3)

    opcalc = commands.add_parser("opcalc", help="operator calculus").add_subparsers(dest="action", required=True)
    p = opcalc.add_parser("adjoint", parents=[pretty, rng], help="adjoint action of the dilogarithm word")
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--Ns", type=_int_list, default=[3, 5])
    p.add_argument("--literal-phase", action="store_true")
    p = opcalc.add_parser("replay", parents=[pretty], help="replay the braid relation proof script")
    p.add_argument("--script", default=None)

    rk = commands.add_parser("rk", help="root-of-unity R-matrices").add_subparsers(dest="action", required=True)
    p = rk.add_parser("build", parents=[pretty], help="build the Kashaev matrix")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("complex", "cyclotomic"), default="complex")
    p.add_argument("--out", default=None, help="matrix JSON output path")
    p = rk.add_parser("braid-check", parents=[pretty], help="braid relation of R^K or a matrix file")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("complex", "cyclotomic"), default="complex")
    p.add_argument("--input", default=None, help="matrix JSON to check instead of R^K")
    p = rk.add_parser("limit", parents=[pretty], help="delta -> 0 study of the generic R-matrix")
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--deltas", type=_float_list, default=[1e-1, 1e-2, 1e-3])
    p.add_argument("--k2", type=float, default=0.4)
    p.add_argument("--k6", type=float, default=0.3)
    p = rk.add_parser("fourier", parents=[pretty, rng], help="cyclic dilogarithm identities")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)

    phi = commands.add_parser("phi", help="quantum dilogarithm").add_subparsers(dest="action", required=True)
    p = phi.add_parser("eval", parents=[pretty], help="evaluate Phi(z)")
    p.add_argument("--z", type=_complex_arg, required=True)
    p.add_argument("--b", type=_complex_arg, required=True)
    p.add_argument("--mode", choices=("product", "integral"), default="product")
    p = phi.add_parser("check", parents=[pretty], help="shift and inversion relations")
    p.add_argument("--b", type=_complex_arg, default=complex(0.8 * np.exp(1j * np.pi / 8)))
    p = phi.add_parser("fourier", parents=[pretty], help="Fourier transform by contour quadrature")
    p.add_argument("--w", type=_complex_arg, action="append", required=True)
    p.add_argument("--b", type=_complex_arg, default=complex(0.8 * np.exp(1j * np.pi / 8)))

    volume = commands.add_parser("volume", help="Bloch-Wigner volumes").add_subparsers(dest="action", required=True)
    p = volume.add_parser("octa", parents=[pretty], help="octahedron volume of a y-tuple")
    p.add_argument("--y", required=True, help="y-values JSON or CSV")
    p.add_argument("--i", type=int, default=1)
    p = volume.add_parser("flip", parents=[pretty], help="flip mutation as a glued tetrahedron")
    p.add_argument("--y", required=True, help="five y-values")
    p = volume.add_parser("five-term", parents=[pretty, rng], help="five-term relation of D")
    p.add_argument("--samples", type=int, default=100)

    p = commands.add_parser("checkall", parents=[pretty, rng], help="run the verification suite")
    p.add_argument("--level", choices=LEVELS, default=None)
    return parser


# ---------------------------------------------------------------------------
# handlers


def _cluster(args, settings: VerifierSettings) -> Result:
    if args.action == "check":
        return verify_mutation_properties(samples=args.samples, size=args.size, seed=settings.seed)
    seed = load_seed(args.input)
    if args.action == "summary":
        return seed_summary(seed)
    return seed_to_dict(mutate_sequence(seed, args.ks))


def _braid(args, settings: VerifierSettings) -> Result:
    if args.action == "verify":
        report = verify_braid_relations(args.n, args.mode)
        if args.definition:
            report.extend(verify_definition_consistency(args.n, args.mode))
        return report
    word = parse_braid_word(args.word, args.n)
    if args.seed_file:
        seed = load_seed(args.seed_file)
    else:
        B = build_braid_matrix(args.n)
        seed = generic_x_seed(B) if args.mode == "x" else generic_y_seed(B)
    return seed_to_dict(evaluate_braid_word(word, seed))


def _qtorus(args, settings: VerifierSettings) -> Result:
    if args.action == "heisenberg":
        return verify_heisenberg_realisation(args.n)
    if args.action == "braid":
        return verify_quantum_braid(n=args.n, N=args.N, mode=args.mode, seed=settings.seed)
    return verify_Rq_equals_mutations(N=args.N, n=args.n, mode=args.mode, seed=settings.seed)


def _opcalc(args, settings: VerifierSettings) -> Result:
    if args.action == "replay":
        return replay_braid_proof(args.script)
    return verify_adjoint(args.i, Ns=tuple(args.Ns), seed=settings.seed, literal_phase=args.literal_phase)


def _check_dim(N: int, settings: VerifierSettings):
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    if N * N > settings.max_dim:
        raise ValueError(f"Matrix dimension {N * N} exceeds VERIFIER_MAX_DIM={settings.max_dim}")


def _rk(args, settings: VerifierSettings) -> Result:
    _check_dim(args.N, settings)
    if args.action == "build":
        M = build_RK(args.N, args.mode)
        if args.out:
            path = save_matrix(args.out, M, args.N)
            return {"N": args.N, "dim": args.N * args.N, "out": path}
        return matrix_to_dict(M, args.N)
    if args.action == "braid-check":
        if args.input:
            return verify_braid_matrix(load_matrix(args.input), args.N, label="input")
        return verify_rk(args.N, args.mode)
    if args.action == "limit":
        return delta_limit_study(args.N, deltas=tuple(args.deltas), k2=args.k2, k6=args.k6)
    return fourier_w_check(args.N, samples=args.samples, seed=settings.seed)


def _phi(args, settings: VerifierSettings) -> Result:
    if args.action == "eval":
        p = DilogParams(args.b, args.mode)
        return {"value": complex_to_json(faddeev_phi(args.z, p))}
    p = DilogParams(args.b)
    if args.action == "check":
        report = shift_check(p)
        report.extend(inversion_check(p))
        return report
    return fourier_transform_check(ws=args.w, p=p)


def _volume(args, settings: VerifierSettings) -> Result:
    if args.action == "five-term":
        return five_term_check(samples=args.samples, seed=settings.seed)
    y = load_y_values(args.y)
    if args.action == "flip":
        return flip_dihedral_check(y)
    return {"value": octahedron_volume(y, args.i)}


def _checkall(args, settings: VerifierSettings) -> Result:
    return run_check_suite(args.level or settings.level, seed=settings.seed, jobs=settings.jobs)


HANDLERS = {
    "cluster": _cluster,
    "braid": _braid,
    "qtorus": _qtorus,
    "opcalc": _opcalc,
    "rk": _rk,
    "phi": _phi,
    "volume": _volume,
    "checkall": _checkall,
}


def _emit(result: Result, pretty: bool):
    if isinstance(result, CheckReport):
        if pretty:
            badge = "✅ PASS" if result.is_pass else "❌ FAIL"
            print(f"{badge}  {result.title}")
            print(result.to_frame().to_string(index=False))
        else:
            print(result.to_json())
        return
    print(json.dumps(result, indent=2 if pretty else None, sort_keys=True))


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        int: 0 on success or PASS, 1 on a failed check, 2 on usage or input errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        settings = load_settings()
    except ValueError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    overrides = {key: getattr(args, key) for key in ("seed", "jobs") if hasattr(args, key)}
    if args.log_level:
        overrides["log_level"] = args.log_level.upper()
    settings = VerifierSettings(**{**settings.to_dict(), **overrides})
    configure_logging(settings.log_level)

    try:
        result = HANDLERS[args.command](args, settings)
    except (FileNotFoundError, ValueError) as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as e:
        logger.exception("Unexpected error in %s", args.command)
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE

    _emit(result, getattr(args, "pretty", False))
    if isinstance(result, CheckReport) and not result.is_pass:
        return EXIT_FAIL
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
