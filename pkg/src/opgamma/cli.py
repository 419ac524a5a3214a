"""``opgamma`` command line.

Exit codes: 0 success, 1 verification failure, 2 unreadable or malformed
input, 3 validation error, 4 precondition error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from . import lazy_ops as lz
from . import matrix_ops as mo
from . import metrics as me
from . import opfile
from .core import InvariantError, PreconditionError, ValidationError, default_context
from .lazy_ops import ConstantTail, FormulaTail, LazyOperator, ZeroTail
from .theorems import CHECKS, run_all

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_VALIDATION, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


class _Out:
    def __init__(self, args):
        self.digits = args.digits
        self.json = args.format == "json"

    def num(self, x) -> str:
        if isinstance(x, complex):
            if x.imag == 0:
                return self.num(x.real)
            return f"{self.num(x.real)}{'+' if x.imag >= 0 else '-'}{self.num(abs(x.imag))}j"
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x == 0:
            return "0"
        return f"{x:.{self.digits}g}"

    def emit(self, payload: dict, lines: list[str]) -> None:
        if self.json:
            print(json.dumps(payload, indent=2))
        else:
            print("\n".join(lines))


def _flag(b: bool) -> str:
    return "true" if b else "false"


def _context(args):
    ctx = default_context()
    changes = {}
    if args.tol is not None:
        changes["check_tol"] = args.tol
    if args.rank_tol is not None:
        changes["rank_rel_tol"] = args.rank_tol
    if args.trunc_dim is not None:
        changes["truncation_dim"] = args.trunc_dim
    return ctx.with_(**changes) if changes else ctx


def _load(path: str):
    try:
        return opfile.load(path)
    except OSError as exc:
        raise opfile.ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _describe_tail(t, out: _Out) -> str:
    if isinstance(t, ZeroTail):
        return "0"
    if isinstance(t, ConstantTail):
        return f"constant {out.num(t.value)}"
    assert isinstance(t, FormulaTail)
    desc = f"num={list(t.num)} den={list(t.den)} limit={out.num(t.limit)} ({t.direction})"
    return desc + (f" maps={[list(m) for m in t.maps]}" if t.maps else "")


def _describe(op, out: _Out) -> list[str]:
    if isinstance(op, LazyOperator):
        prefix = ", ".join(out.num(w) for w in op.weights.prefix)
        return [f"{op.kind.value}", f"prefix = [{prefix}]", f"tail = {_describe_tail(op.weights.tail, out)}"]
    return ["[" + ", ".join(out.num(complex(z)) for z in row) + "]" for row in op]


# ---------------------------------------------------------------------------
# subcommands


def _analysis(op, ctx):
    if isinstance(op, LazyOperator):
        return lz.moduli(op.validate(ctx), ctx)
    return mo.moduli(op, ctx)


def _witness_text(w, out: _Out) -> str:
    if w is None:
        return "none"
    if isinstance(w, (int, np.integer)):
        return f"e_{int(w)}"
    return "[" + ", ".join(out.num(complex(z)) for z in w) + "]"


def cmd_analyze(args, ctx, out: _Out) -> int:
    f = _load(args.path)
    rep = _analysis(f.operator, ctx)
    attained = lambda b: "attained" if b else "not attained"  # noqa: E731
    lines = [
        f"m = {out.num(rep.m)} ({attained(rep.attains_min)})",
        f"gamma = {out.num(rep.gamma)} ({attained(rep.attains_reduced_min)})",
        f"closed_range = {_flag(rep.closed_range)}",
        f"bounded = {_flag(rep.bounded)}",
        f"pinv_norm = {out.num(rep.pinv_norm)}",
    ]
    if args.witness:
        lines += [f"min_witness = {_witness_text(rep.min_witness, out)}",
                  f"gamma_witness = {_witness_text(rep.gamma_witness, out)}"]
    if f.name:
        lines.insert(0, f"# {f.name}")
    out.emit({"name": f.name, **rep.to_dict()}, lines)
    return EXIT_OK


def cmd_pinv(args, ctx, out: _Out) -> int:
    f = _load(args.path)
    op = f.operator
    P = lz.pinv_lazy(op.validate(ctx), ctx) if isinstance(op, LazyOperator) else mo.pinv(op, ctx)
    name = f"pinv({f.name})" if f.name else "pinv"
    if args.out:
        opfile.save(args.out, P, name)
    out.emit(opfile.operator_to_dict(P, name), _describe(P, out))
    return EXIT_OK


def _parse_vector(text: str) -> np.ndarray:
    try:
        raw = json.loads(text) if text.lstrip().startswith("[") else [float(x) for x in text.split(",")]
        return np.array([opfile._parse_cx(v) for v in raw], dtype=complex)
    except (ValueError, opfile.ParseError) as exc:
        raise opfile.ParseError(f"bad vector {text!r}: {exc}") from exc


def cmd_lstsq(args, ctx, out: _Out) -> int:
    f = _load(args.path)
    if not f.is_matrix:
        raise PreconditionError("lstsq is implemented for matrix files only")
    y = _parse_vector(args.vector)
    x = mo.least_squares_min_norm(f.operator, y, ctx)
    residual = float(np.linalg.norm(f.operator @ x - y))
    out.emit(
        {"solution": [[z.real, z.imag] for z in x], "residual_norm": residual},
        ["x = [" + ", ".join(out.num(complex(z)) for z in x) + "]", f"residual_norm = {out.num(residual)}"],
    )
    return EXIT_OK


def cmd_gap(args, ctx, out: _Out) -> int:
    a, b = _load(args.path_a), _load(args.path_b)
    if a.is_matrix and b.is_matrix:
        rep = me.carrier_gap(a.operator, b.operator, ctx)
        d = rep.to_dict()
        out.emit(d, [f"{k} = {out.num(v)}" for k, v in d.items() if v is not None])
        return EXIT_OK
    if a.is_matrix or b.is_matrix:
        raise ValidationError("gap needs two matrices or two lazy diagonal operators")
    theta = lz.gap_lazy_diag(a.operator.validate(ctx), b.operator.validate(ctx), ctx)
    out.emit({"theta": theta}, [f"theta = {out.num(theta)}"])
    return EXIT_OK


def cmd_theta_ni(args, ctx, out: _Out) -> int:
    f = _load(args.path)
    n = args.n
    if f.is_matrix:
        direct, corrected = me.theta_nI_matrix(f.operator, n, ctx)
        out.emit({"n": n, "direct": direct, "corrected": corrected},
                 [f"direct = {out.num(direct)}", f"corrected = {out.num(corrected)}"])
        return EXIT_OK
    L = f.operator.validate(ctx)
    closed = lz.theta_nI_lazy(L, n, ctx)
    N = ctx.truncation_dim
    trunc = me.gap_by_definition(lz.truncate(L, N), n * np.eye(N), ctx)
    out.emit(
        {"n": n, "theta": closed, "truncation_dim": N, "truncation": trunc},
        [f"theta = {out.num(closed)}", f"truncation (N={N}) = {out.num(trunc)}"],
    )
    return EXIT_OK


def cmd_perturb(args, ctx, out: _Out) -> int:
    f = _load(args.path)
    if f.is_matrix:
        raise PreconditionError("perturb works on lazy diagonal operators; every matrix already attains")
    S, Lp, cert = lz.perturb_to_attain(f.operator.validate(ctx), args.eps, ctx)
    if args.out:
        opfile.save(args.out, S, f"S({f.name})" if f.name else "S")
    if args.out_perturbed:
        opfile.save(args.out_perturbed, Lp, f"{f.name}+S" if f.name else "T+S")
    lines = [
        f"branch = {cert.branch}",
        f"s_norm = {out.num(cert.s_norm)}",
        f"new_gamma = {out.num(cert.new_gamma)} (attained)",
        f"witness_index = {cert.witness_index}",
        f"rank_one = {_flag(cert.rank_one)}",
        "S:",
    ] + ["  " + s for s in _describe(S, out)]
    out.emit(
        {"certificate": cert.to_dict(), "S": opfile.operator_to_dict(S), "perturbed": opfile.operator_to_dict(Lp)},
        lines,
    )
    return EXIT_OK


def cmd_verify(args, ctx, out: _Out) -> int:
    if args.suite == "all":
        ids = list(CHECKS)
    else:
        ids = [s.strip().upper() for s in args.suite.split(",") if s.strip()]
        unknown = [i for i in ids if i not in CHECKS]
        if unknown:
            raise ValidationError(f"unknown check ids: {', '.join(unknown)}")
    report = run_all(ctx, seed=args.seed, trials=args.trials, max_dim=args.dim, ids=ids, workers=args.workers)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
    lines = []
    for r in report.results:
        status = "pass" if r.passed else "FAIL"
        line = f"{r.id:>4} {status}  worst={out.num(r.worst_residual)}  {r.description}"
        if not r.passed:
            line += f"\n       {r.message}"
        lines.append(line)
    lines.append(f"{report.pass_count}/{len(report.results)} pass ({report.wall_time:.1f} s)")
    out.emit(report.to_dict(), lines)
    return EXIT_OK if report.all_passed else EXIT_VERIFY


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="check tolerance (overrides OPGAMMA_CHECK_TOL)")
    common.add_argument("--rank-tol", type=float, help="relative singular-value cutoff for rank decisions")
    common.add_argument("--trunc-dim", type=int, help="truncation dimension for lazy operators")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--digits", type=_positive(int), default=9, help="significant digits in text output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the resulting operator or report to this file")

    p = _Parser(prog="opgamma", description="Minimum and reduced minimum modulus toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("analyze", parents=[common], help="moduli, attainment and pinv norm")
    s.add_argument("path")
    s.add_argument("--witness", action="store_true", help="also print witness vectors")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("pinv", parents=[common], help="Moore-Penrose pseudoinverse")
    s.add_argument("path")
    s.set_defaults(func=cmd_pinv)

    s = sub.add_parser("lstsq", parents=[common], help="least-squares solution of minimal norm")
    s.add_argument("path")
    s.add_argument("vector", help="right-hand side: JSON list or comma-separated reals")
    s.set_defaults(func=cmd_lstsq)

    s = sub.add_parser("gap", parents=[common], help="gap and carrier-graph metrics")
    s.add_argument("path_a")
    s.add_argument("path_b")
    s.set_defaults(func=cmd_gap)

    s = sub.add_parser("theta-ni", parents=[common], help="gap between a self-adjoint operator and nI")
    s.add_argument("path")
    s.add_argument("n", type=_positive(int))
    s.set_defaults(func=cmd_theta_ni)

    s = sub.add_parser("perturb", parents=[common], help="small perturbation attaining the reduced minimum")
    s.add_argument("path")
    s.add_argument("eps", type=_positive(float))
    s.add_argument("--out-perturbed", help="write T + S to this file")
    s.set_defaults(func=cmd_perturb)

    s = sub.add_parser("verify", parents=[common], help="run the seeded verification suite")
    s.add_argument("--suite", default="all", help="'all' or a comma list such as T1,T5")
    s.add_argument("--trials", type=_positive(int))
    s.add_argument("--dim", type=int, help="largest matrix dimension (1..16)")
    s.add_argument("--workers", type=_positive(int), default=1)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ctx = _context(args)
        return args.func(args, ctx, _Out(args))
    except opfile.ParseError as exc:
        code, msg = EXIT_PARSE, f"parse error: {exc}"
    except PreconditionError as exc:
        code, msg = EXIT_PRECONDITION, f"precondition error: {exc}"
    except ValidationError as exc:
        code, msg = EXIT_VALIDATION, f"validation error: {exc}"
    except InvariantError as exc:
        code, msg = EXIT_VERIFY, f"invariant violated: {exc}"
    except ValueError as exc:  # CheckSpec rejects out-of-range dims this way
        code, msg = EXIT_VALIDATION, f"validation error: {exc}"
    print(f"opgamma: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
