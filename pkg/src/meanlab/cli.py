"""Command-line front end: JSON matrices in, one JSON report out.

Exit codes: 0 success / property holds, 1 property violated or hypothesis
rejected (the full report is still printed), 2 input error.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .errors import (
    DomainError,
    HypothesisViolated,
    InvalidInput,
    MeanLabError,
    NumericalFailure,
    ParseError,
    ValidationError,
)
from .inverse import (
    chain_solve_global,
    explore_open_problem,
    solve_arith_power_local,
    solve_arith_quadratic,
    solve_geom_power,
    solve_sqrt_arith,
)
from .linalg import ScalarFunction, max_abs
from .means import MeanSpec, matrix_mean
from .verify import (
    Hypothesis,
    check_mean_inequalities,
    prop31_counterexample,
    test_characterization,
    test_monotonicity,
)

MATRIX_SYMMETRY_RTOL = 1e-10


# --------------------------------------------------------------------------
# matrix files
# --------------------------------------------------------------------------


def parse_matrix_file(source: str | Path) -> np.ndarray:
    """Read a ``{"dim": n, "rows": [[...], ...]}`` document from a path or inline JSON.

    Returns the symmetrized matrix ``(M + M^T) / 2``.

    Raises
    ------
    ParseError
        Unreadable file, malformed JSON, or a document not matching the schema.
    ValidationError
        Non-finite entries or asymmetry beyond ``1e-10 * (1 + max|M|)``.
    """
    text = str(source)
    if text.lstrip().startswith("{"):
        raw = text
    else:
        try:
            raw = Path(text).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read matrix file {text!r}: {exc.strerror}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict) or "dim" not in doc or "rows" not in doc:
        raise ParseError('matrix document needs "dim" and "rows"')
    dim, rows = doc["dim"], doc["rows"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError('"dim" must be a positive integer')
    if not isinstance(rows, list) or len(rows) != dim:
        raise ParseError(f'"rows" must hold {dim} rows')
    for row in rows:
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"every row must hold {dim} numbers")
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ParseError(f"non-numeric entry {x!r}")
    M = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has NaN or infinite entries")
    if max_abs(M - M.T) > MATRIX_SYMMETRY_RTOL * (1.0 + max_abs(M)):
        raise ValidationError("matrix is not symmetric")
    return 0.5 * (M + M.T)


def matrix_doc(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    return {"dim": int(M.shape[0]), "rows": M.tolist()}


def to_jsonable(obj):
    """Recursively convert dataclasses, arrays and numpy scalars for ``json.dumps``.

    Square 2-D arrays become matrix documents so they re-parse with
    :func:`parse_matrix_file`.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and obj.shape[0] == obj.shape[1]:
            return matrix_doc(obj)
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="meanlab", description="Matrix power means, inverse mean problems, monotonicity lab.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mean", help="evaluate a matrix mean")
    p.add_argument("--kind", required=True, choices=["ka", "naive", "geom", "arith", "min"])
    p.add_argument("--p", type=float)
    p.add_argument("-A", required=True, dest="A")
    p.add_argument("-B", required=True, dest="B")

    p = sub.add_parser("inverse", help="solve an inverse mean problem")
    p.add_argument(
        "--problem", required=True, choices=["geom-power", "arith-power", "sqrt-arith", "arith-quadratic"]
    )
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("-X", required=True, dest="X")
    p.add_argument("-Y", required=True, dest="Y")

    p = sub.add_parser("chain", help="chain decomposition solved link by link")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--gamma0", type=float)
    p.add_argument("-X", required=True, dest="X")
    p.add_argument("-Y", required=True, dest="Y")

    p = sub.add_parser("verify", help="randomized verification suites")
    p.add_argument("--suite", required=True, choices=["means", "characterization", "prop31"])
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--r", type=float, help="prop31 exponent (default min(2, q))")
    p.add_argument("--function", default="sqrt", help="characterization: function name[:param]")
    p.add_argument("--hypothesis", help="characterization: kind[:param] (default geom-vs-power:<p>)")
    _add_sampling(p)

    p = sub.add_parser("falsify", help="search for an operator-monotonicity violation")
    p.add_argument("--function", required=True, help="name[:param], e.g. power:2")
    _add_sampling(p)

    p = sub.add_parser("explore", help="numerical attempt at the naive p/q inverse problem")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("-X", required=True, dest="X")
    p.add_argument("-Y", required=True, dest="Y")
    p.add_argument("--iters", type=int, default=500)
    return parser


def _add_sampling(p):
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)


# --------------------------------------------------------------------------
# commands; each returns (exit_code, inputs, outputs)
# --------------------------------------------------------------------------


def _need(value, flag):
    if value is None:
        raise InvalidInput(f"{flag} is required here")
    return value


def _cmd_mean(args):
    A, B = parse_matrix_file(args.A), parse_matrix_file(args.B)
    spec = {
        "ka": lambda: MeanSpec.kubo_ando(_need(args.p, "--p")),
        "naive": lambda: MeanSpec.naive(_need(args.p, "--p")),
        "geom": MeanSpec.geometric,
        "arith": MeanSpec.arithmetic,
        "min": MeanSpec.min,
    }[args.kind]()
    inputs = {"kind": args.kind, "p": args.p, "A": A, "B": B}
    return 0, inputs, {"spec": spec.label(), "mean": matrix_mean(spec, A, B)}


def _solution_out(sol):
    out = to_jsonable(sol)
    out["certified"] = sol.certified
    return out


def _cmd_inverse(args):
    X, Y = parse_matrix_file(args.X), parse_matrix_file(args.Y)
    inputs = {"problem": args.problem, "p": args.p, "q": args.q, "X": X, "Y": Y}
    if args.problem == "geom-power":
        run = lambda: solve_geom_power(_need(args.p, "--p"), X, Y)
    elif args.problem == "arith-power":
        if (args.p is None) == (args.q is None):
            raise InvalidInput("arith-power needs exactly one of --p or --q")
        r = args.q if args.q is not None else args.p
        run = lambda: solve_arith_power_local(r, X, Y)
    elif args.problem == "sqrt-arith":
        run = lambda: solve_sqrt_arith(X, Y)
    else:
        run = lambda: solve_arith_quadratic(X, Y)
    try:
        sol = run()
    except (HypothesisViolated, NumericalFailure) as exc:
        return 1, inputs, {"status": "rejected", "reason": type(exc).__name__, "message": str(exc)}
    out = _solution_out(sol)
    out["status"] = "solved" if sol.certified else "uncertified"
    return (0 if sol.certified else 1), inputs, out


def _cmd_chain(args):
    X, Y = parse_matrix_file(args.X), parse_matrix_file(args.Y)
    inputs = {"q": args.q, "gamma0": args.gamma0, "X": X, "Y": Y}
    try:
        w = chain_solve_global(args.q, X, Y, args.gamma0)
    except (HypothesisViolated, NumericalFailure) as exc:
        return 1, inputs, {"status": "rejected", "reason": type(exc).__name__, "message": str(exc)}
    links = [
        {"ratio_ok": link.ratio_ok, "solution": _solution_out(link.solution) if link.solution else None}
        for link in w.links
    ]
    ok = w.ratios_ok and w.solved
    out = {
        "status": "solved" if ok else "failed",
        "gamma0": w.gamma0,
        "length": len(w),
        "levels": w.levels,
        "Zs": w.Zs,
        "links": links,
        "majorant": w.majorant,
    }
    return (0 if ok else 1), inputs, out


def _sampling_inputs(args):
    return {"dim": args.dim, "samples": args.samples, "seed": args.seed}


def _cmd_verify(args):
    inputs = {"suite": args.suite, "p": args.p, "q": args.q, **_sampling_inputs(args)}
    if args.suite == "means":
        v = check_mean_inequalities(args.p, args.q, args.dim, args.samples, args.seed)
        return (1 if v.violated else 0), inputs, {"verdict": to_jsonable(v)}
    if args.suite == "characterization":
        f = ScalarFunction.parse(args.function)
        hyp = Hypothesis.parse(args.hypothesis) if args.hypothesis else Hypothesis("geom-vs-power", args.p)
        inputs.update(function=f.label(), hypothesis=hyp.label())
        rep = test_characterization(f, hyp, args.dim, args.samples, args.seed)
        return (0 if rep.consistent else 1), inputs, to_jsonable(rep)
    r = args.r if args.r is not None else min(2.0, args.q)
    inputs["r"] = r
    rep = prop31_counterexample(args.q, r, args.dim, args.samples, args.seed)
    out = to_jsonable(rep)
    out["demonstrated"] = rep.demonstrated
    return (0 if rep.demonstrated else 1), inputs, out


def _cmd_falsify(args):
    f = ScalarFunction.parse(args.function)
    inputs = {"function": f.label(), **_sampling_inputs(args)}
    v = test_monotonicity(f, args.dim, args.samples, args.seed)
    return (1 if v.violated else 0), inputs, {"verdict": to_jsonable(v)}


def _cmd_explore(args):
    X, Y = parse_matrix_file(args.X), parse_matrix_file(args.Y)
    inputs = {"p": args.p, "q": args.q, "iters": args.iters, "X": X, "Y": Y}
    res = explore_open_problem(args.p, args.q, X, Y, args.iters)
    return (0 if res.solved else 1), inputs, to_jsonable(res)


COMMANDS = {
    "mean": _cmd_mean,
    "inverse": _cmd_inverse,
    "chain": _cmd_chain,
    "verify": _cmd_verify,
    "falsify": _cmd_falsify,
    "explore": _cmd_explore,
}


def _digest(inputs: dict) -> str:
    blob = json.dumps(to_jsonable(inputs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def run_command(argv: list[str]) -> tuple[int, dict | None]:
    """Parse ``argv``, run the subcommand and build its report.

    Returns ``(exit_code, report)``; ``report`` is ``None`` only for usage
    errors, where argparse has already printed the usage text.
    """
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2, None
    except SystemExit as exc:  # --help
        return int(exc.code or 0), None
    try:
        code, inputs, outputs = COMMANDS[args.command](args)
        digest = _digest(inputs)
    except (ParseError, ValidationError, InvalidInput, DomainError) as exc:
        code, digest = 2, None
        outputs = {"status": "input-error", "reason": type(exc).__name__, "message": str(exc)}
    except MeanLabError as exc:
        code, digest = 1, None
        outputs = {"status": "failed", "reason": type(exc).__name__, "message": str(exc)}
    report = {
        "command": args.command,
        "inputs-digest": digest,
        "outputs": to_jsonable(outputs),
        "elapsed_ms": int(round(1000 * (time.perf_counter() - start))),
    }
    return code, report


def main(argv: list[str] | None = None) -> int:
    code, report = run_command(sys.argv[1:] if argv is None else argv)
    if report is not None:
        if code == 2:
            print(f"meanlab: {report['outputs'].get('message', 'input error')}", file=sys.stderr)
        json.dump(report, sys.stdout)
        sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
