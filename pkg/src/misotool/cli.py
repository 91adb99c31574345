"""Command-line entry point.

Every subcommand except ``generate`` prints one JSON ``RunReport`` on
stdout and a short human summary on stderr. ``generate`` prints a matrix
document. Exit codes: 0 pass, 1 a mathematical check failed, 2 bad input,
3 numerical non-convergence.
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from . import analysis, generators, jsonio, lifting, spectral, suite
from .config import default_tol
from .errors import (ClassificationError, ConvergenceError, DomainError,
                     ExactPathError, ParseError, PreconditionError)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_SEED = 42


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on its own; raise instead so main() owns exit codes
    def error(self, message):
        raise _ArgumentError(message)


def _residual(name, value, tol):
    return {"name": name, "value": float(value), "tol": float(tol),
            "ok": bool(float(value) <= tol)}


def _report(command, inputs, results, residuals, t0, verdict=None):
    if verdict is None:
        verdict = "pass" if all(r["ok"] for r in residuals) else "fail"
    return {
        "command": command,
        "inputs": inputs,
        "results": results,
        "residuals": residuals,
        "verdict": verdict,
        "elapsed_ms": (time.perf_counter() - t0) * 1e3,
    }


def _tol(args):
    return args.tol if getattr(args, "tol", None) is not None else default_tol()


def cmd_analyze(args, t0):
    t = jsonio.parse_matrix(args.matrix, exact=args.exact)
    tol = _tol(args)
    rep = analysis.strict_order(t, args.max_order, tol)
    residuals = []
    if rep.strict_order is not None:
        m, d, s = rep.tested_orders[-1]
        residuals.append(_residual(f"relative_defect_m{m}", d / s if s else 0.0, tol))
        summary = f"strict {rep.strict_order}-isometry"
    else:
        if rep.invertible:
            summary = f"not an m-isometry for any m <= {rep.tested_orders[-1][0]}"
        else:
            summary = "singular, so not an m-isometry for any m"
    results = rep.to_dict()
    results["summary"] = summary
    inputs = {"matrix": args.matrix, "max_order": args.max_order, "tol": tol,
              "exact": args.exact}
    return _report("analyze", inputs, results, residuals, t0), summary


def cmd_decompose(args, t0):
    if args.exact:
        raise ExactPathError("decompose depends on eigenvalues and has no exact path")
    t = jsonio.parse_matrix(args.matrix)
    tol = _tol(args)
    dec = spectral.jordan_decompose(t, tol)
    scale = max(1.0, float(np.linalg.norm(dec.A)) * float(np.linalg.norm(dec.Q)))
    residuals = [
        _residual("unitarity_defect", dec.unitarity_defect, tol * t.shape[0]),
        _residual("relative_commutator", dec.commutator_norm / scale, tol),
        _residual("orthogonality_defect", dec.orthogonality_defect, tol),
        _residual("reconstruction_error",
                  float(np.linalg.norm(t - dec.A - dec.Q)), tol),
    ]
    results = {
        "A": dec.A, "Q": dec.Q,
        "nilpotency_order": dec.nilpotency_order,
        "strict_order": dec.strict_order,
        "clusters": dec.clusters,
    }
    summary = (f"T = A + Q with Q nilpotent of order {dec.nilpotency_order}, "
               f"strict order {dec.strict_order}")
    inputs = {"matrix": args.matrix, "tol": tol}
    return _report("decompose", inputs, results, residuals, t0), summary


def cmd_generate(args):
    kind, exact = args.kind, args.exact
    if kind in ("rotation", "reflection"):
        if exact:
            q = args.theta / (math.pi / 2)
            if abs(q - round(q)) > 1e-12:
                raise ExactPathError("exact rotations need theta a multiple of pi/2")
            fn = generators.rotation_exact if kind == "rotation" else generators.reflection_exact
            return fn(round(q))
        fn = generators.rotation if kind == "rotation" else generators.reflection
        return fn(args.theta)
    if kind == "nilpotent":
        return generators.nilpotent_r2(args.nil_kind, complex(args.lam), args.k_param,
                                       exact=exact)
    if kind == "paper-an-qj":
        a, q = generators.paper_example_AQ(args.n, args.j, exact=exact)
        return a + q
    if kind == "counterexample":
        return generators.counterexample_3x3(exact=exact)
    # builder
    if args.blocks:
        blocks = []
        for item in args.blocks.split(","):
            angle, _, size = item.partition(":")
            blocks.append((float(angle), int(size)))
    else:
        blocks = [(0.0, args.n)]
    n = sum(s for _, s in blocks)
    spec = generators.BuilderSpec(n, tuple(blocks), args.k, seed=args.seed,
                                  real=args.real, mix=args.mix)
    return generators.strict_isometry_builder(spec, exact=exact)


def cmd_lift(args, t0):
    t = jsonio.parse_matrix(args.matrix, exact=args.exact)
    x0 = jsonio.parse_vector(args.x0, exact=args.exact)
    ctx = lifting.LiftContext(t, args.k, x0, tol=getattr(args, "tol", None))
    rep = lifting.lift_check(ctx, args.m, args.max_degree, args.trials, seed=args.seed,
                             require_strict=not args.no_strict)
    residuals = [_residual("max_lifted_beta_residual", rep.max_residual, ctx.tol)]
    if not args.no_strict:
        residuals.append({"name": "strictness_witness", "value": rep.strictness_witness,
                          "tol": ctx.tol, "ok": rep.strict})
    verdict = "pass" if rep.passed else "fail"
    inputs = {"matrix": args.matrix, "x0": args.x0, "k": args.k, "m": args.m,
              "max_degree": args.max_degree, "trials": args.trials, "seed": args.seed,
              "exact": args.exact, "tol": ctx.tol, "require_strict": not args.no_strict}
    summary = (f"M_z^{args.k} is {'a strict ' if rep.strict else 'an '}"
               f"{args.m + 1}-isometry on the sampled polynomials"
               if rep.passed else "lifting check failed")
    return _report("lift", inputs, rep.to_dict(), residuals, t0, verdict), summary


def cmd_volume(args, t0):
    t = jsonio.parse_matrix(args.matrix)
    chk = spectral.volume_preservation_check(t, args.k, args.trials, args.tol, seed=args.seed)
    residuals = [_residual("worst_ratio_deviation", abs(chk.worst_ratio - 1.0), args.tol)]
    if chk.det_abs is not None:
        residuals.append(_residual("abs_det_deviation", abs(chk.det_abs - 1.0), args.tol))
    results = chk._asdict()
    inputs = {"matrix": args.matrix, "k": args.k, "trials": args.trials,
              "seed": args.seed, "tol": args.tol}
    word = "preserved" if chk.preserved else "not preserved"
    summary = f"{args.k}-volume {word} (worst ratio {chk.worst_ratio:.12g})"
    return _report("volume", inputs, results, residuals, t0), summary


def cmd_suite(args, t0):
    only = set(args.only) if args.only else None
    results = suite.run_suite(args.seed, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    residuals = [{"name": f"criterion_{r.number}", "value": 0.0 if r.passed else 1.0,
                  "tol": 0.0, "ok": r.passed} for r in results]
    passed = sum(r.passed for r in results)
    summary = f"{passed}/{len(results)} criteria passed"
    inputs = {"seed": args.seed, "only": sorted(only) if only else None}
    return _report("suite", inputs, [r.to_dict() for r in results], residuals, t0), summary


def build_parser():
    p = _Parser(prog="misotool", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="find the strict m-isometry order")
    a.add_argument("--matrix", required=True, help="matrix JSON file or inline JSON")
    a.add_argument("--max-order", type=int, default=None)
    a.add_argument("--tol", type=float, default=None)
    a.add_argument("--exact", action="store_true", help="rational arithmetic")

    d = sub.add_parser("decompose", help="split T into A + Q")
    d.add_argument("--matrix", required=True)
    d.add_argument("--tol", type=float, default=None)
    d.add_argument("--exact", action="store_true", help=argparse.SUPPRESS)

    g = sub.add_parser("generate", help="print a generated matrix")
    g.add_argument("--kind", required=True, choices=[
        "rotation", "reflection", "nilpotent", "builder", "paper-an-qj", "counterexample"])
    g.add_argument("--theta", type=float, default=0.0)
    g.add_argument("--nil-kind", choices=["M", "N", "Qk"], default="M")
    g.add_argument("--lam", type=complex, default=1.0)
    g.add_argument("--k-param", type=float, default=1.0)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--j", type=int, default=2)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--blocks", default=None,
                   help="comma-separated angle:size pairs, e.g. 0:2,3.14159:1")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g.add_argument("--real", action="store_true")
    g.add_argument("--mix", action="store_true")
    g.add_argument("--exact", action="store_true")

    lf = sub.add_parser("lift", help="check the polynomial lifting of an m-isometry")
    lf.add_argument("--matrix", required=True)
    lf.add_argument("--x0", required=True, help="vector JSON file or inline JSON")
    lf.add_argument("--k", type=int, required=True)
    lf.add_argument("--m", type=int, required=True)
    lf.add_argument("--max-degree", type=int, default=8)
    lf.add_argument("--trials", type=int, default=50)
    lf.add_argument("--seed", type=int, default=DEFAULT_SEED)
    lf.add_argument("--tol", type=float, default=None)
    lf.add_argument("--exact", action="store_true")
    lf.add_argument("--no-strict", action="store_true",
                    help="do not require the lift to be strict")

    v = sub.add_parser("volume", help="sample k-volume preservation")
    v.add_argument("--matrix", required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--tol", type=float, default=1e-9)

    s = sub.add_parser("suite", help="run the acceptance battery")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--only", type=int, nargs="+", default=None, metavar="N")
    return p


_COMMANDS = {"analyze": cmd_analyze, "decompose": cmd_decompose, "lift": cmd_lift,
             "volume": cmd_volume, "suite": cmd_suite}


def _error_report(command, kind, exc, t0):
    rep = _report(command, {}, {"error": kind, "message": str(exc)}, [], t0, "error")
    if isinstance(exc, PreconditionError):
        rep["results"]["quantity"] = exc.quantity
        rep["results"]["value"] = exc.value
    return rep


def _emit(doc):
    sys.stdout.write(json.dumps(jsonio.to_jsonable(doc), sort_keys=True) + "\n")


def main(argv=None) -> int:
    t0 = time.perf_counter()
    command = "?"
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        if command == "generate":
            sys.stdout.write(jsonio.emit_matrix(cmd_generate(args)))
            return EXIT_PASS
        doc, summary = _COMMANDS[command](args, t0)
        _emit(doc)
        print(f"{command}: {summary} [{doc['verdict']}]", file=sys.stderr)
        return EXIT_PASS if doc["verdict"] == "pass" else EXIT_FAIL
    except _ArgumentError as exc:
        print(f"misotool: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ClassificationError, PreconditionError) as exc:
        return _fail(command, exc, EXIT_FAIL, t0)
    except (ParseError, DomainError, ValueError) as exc:
        return _fail(command, exc, EXIT_INPUT, t0)
    except (ConvergenceError, np.linalg.LinAlgError) as exc:
        return _fail(command, exc, EXIT_NUMERIC, t0)


def _fail(command, exc, code, t0):
    kind = type(exc).__name__
    _emit(_error_report(command, kind, exc, t0))
    print(f"{command}: {kind}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
