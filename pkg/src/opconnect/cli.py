"""Command-line front end.

Problem files are JSON:

    {
      "family": {"name": "jacobi", "alpha": 1, "gamma": 0},
      "divisor": {"kind": "linear", "D": -1, "C": "auto"},
      "backend": "float",
      "precision_bits": 128
    }

Instead of "family" a raw recurrence {"beta": [...], "beta_hat": [...]} is
accepted (no measure, so quadrature-backed features need explicit C).
Divisors: linear {D, C}, quadratic {D, E, C}, the preset
{"preset": "kesten-mckay", "rho": .., "y": ..}, and for the oracle command a
monic polynomial {"kind": "poly", "coeffs": [c0, .., 1]}.  Numbers may be
JSON numbers or strings like "5/2" (required for exact rational runs).

Exit codes: 0 success, 1 verification failure, 2 input error, 3 transform
breakdown, 4 oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import List, Optional

from .catalog import (FamilySpec, family_measure, family_recurrence,
                      reference_normalization)
from .connection import AUTO, ConnectionCoefficients, DivisorSpec
from .errors import (BackendUnsupported, EigenFailure, FactorizationUnavailable,
                     InsufficientCoefficients, IntegrandSingular, InvalidDivisor,
                     InvalidFamily, NoClosedForm, NotSymmetric, OpconnectError,
                     OracleSingular, PositivityViolation, PrecisionExhausted,
                     QuadratureDivergent, RegularityBreakdown)
from .expansion import evaluate_partial_sum, fourier_coefficients, parseval_residual
from .linear import (apply_connection, check_divisor_validity, kappa_sequence,
                     normalization_constant, resolve_divisor, transformed_recurrence)
from .measures import MeasureSpec
from .numerics import Context, Scalar
from .oracle import direct_connection
from .quadratic import (general_quadratic_sequence, symmetric_lambda_sequence,
                        symmetric_transformed_recurrence)
from .recurrence import RecurrenceCoefficients
from .verify import (CheckResult, VerificationReport, conserved_quantity_residual,
                     kappa_bounds_ok, oracle_agreement, orthogonality_residuals,
                     s_system_residuals, sign_coherence)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_BREAKDOWN = 3
EXIT_ORACLE = 4

_BREAKDOWN_ERRORS = (RegularityBreakdown, PositivityViolation, InvalidDivisor,
                     NotSymmetric, FactorizationUnavailable, PrecisionExhausted,
                     QuadratureDivergent, EigenFailure, IntegrandSingular)
_INPUT_ERRORS = (InvalidFamily, BackendUnsupported, InsufficientCoefficients, NoClosedForm)


class InputError(OpconnectError):
    """Problem file violates the schema."""


@dataclass
class Problem:
    ctx: Context
    rc: RecurrenceCoefficients
    divisor: object
    family: Optional[FamilySpec] = None
    measure: Optional[MeasureSpec] = None
    poly_coeffs: Optional[list] = None  # generic divisor for the oracle command


def _parse_family(data) -> FamilySpec:
    if not isinstance(data, dict) or "name" not in data:
        raise InputError("family must be an object with a name")
    name = data["name"]
    try:
        if name == "jacobi":
            return FamilySpec.jacobi(data["alpha"], data["gamma"])
        if name == "legendre":
            return FamilySpec.legendre()
        if name == "chebyshev_u":
            return FamilySpec.chebyshev_u()
        if name == "charlier":
            return FamilySpec.charlier(data.get("lambda", data.get("lam")))
        if name == "semicircle":
            return FamilySpec.semicircle()
    except KeyError as exc:
        raise InputError(f"family {name} missing parameter {exc}") from exc
    raise InputError(f"unknown family {name!r}")


def _parse_divisor(data, problem_kind: str):
    if not isinstance(data, dict):
        raise InputError("divisor must be an object")
    if data.get("preset") == "kesten-mckay":
        try:
            return DivisorSpec.kesten_mckay(data["rho"], data["y"])
        except KeyError as exc:
            raise InputError(f"kesten-mckay preset missing {exc}") from exc
    kind = data.get("kind")
    if kind == "linear":
        if "D" not in data:
            raise InputError("linear divisor needs D")
        return DivisorSpec.linear(data["D"], data.get("C", AUTO))
    if kind == "quadratic":
        if "D" not in data or "E" not in data:
            raise InputError("quadratic divisor needs D and E")
        return DivisorSpec.quadratic(data["D"], data["E"], data.get("C", AUTO))
    if kind == "poly":
        coeffs = data.get("coeffs")
        if not isinstance(coeffs, list) or len(coeffs) < 2:
            raise InputError("poly divisor needs a coefficient list [c0, .., 1]")
        if problem_kind != "oracle":
            raise InputError("poly divisors are supported by the oracle command only")
        return list(coeffs)
    raise InputError(f"unknown divisor kind {kind!r}")


def load_problem(path: str, args, command: str) -> Problem:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("problem file must hold a JSON object")

    backend = args.backend or data.get("backend", "float")
    prec = args.precision or data.get("precision_bits", 128)
    if backend not in ("rational", "float"):
        raise InputError(f"unknown backend {backend!r}")
    if not isinstance(prec, int) or prec < 8:
        raise InputError("precision_bits must be an integer >= 8")
    ctx = Context(backend=backend, prec=prec)

    family = None
    measure = None
    if "family" in data:
        family = _parse_family(data["family"])
        rc = family_recurrence(family)
        measure = family_measure(family)
    elif "recurrence" in data:
        raw = data["recurrence"]
        try:
            beta = [_number_token(v) for v in raw["beta"]]
            beta_hat = [_number_token(v) for v in raw["beta_hat"]]
        except (KeyError, TypeError) as exc:
            raise InputError("recurrence needs beta and beta_hat arrays") from exc
        try:
            rc = RecurrenceCoefficients.from_arrays(beta, beta_hat, name="custom")
        except PositivityViolation as exc:
            raise InputError(str(exc)) from exc
    else:
        raise InputError("problem needs a family or a recurrence")

    if "divisor" not in data:
        raise InputError("problem needs a divisor")
    divisor = _parse_divisor(data["divisor"], command)
    poly = divisor if isinstance(divisor, list) else None
    return Problem(ctx=ctx, rc=rc, divisor=divisor, family=family,
                   measure=measure, poly_coeffs=poly)


def _number_token(v):
    from fractions import Fraction
    if isinstance(v, (int, float)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise InputError(f"not a number: {v!r}")


def _resolve_linear_constant(problem: Problem, tol=None):
    div = problem.divisor
    if div.resolved:
        return div
    if problem.family is not None:
        try:
            return div.with_constant(
                reference_normalization(problem.family, div, problem.ctx))
        except (NoClosedForm, BackendUnsupported):
            pass
    if problem.measure is None:
        raise InputError("cannot resolve C=auto without a catalog family or measure")
    if problem.ctx.rational:
        raise InputError("C=auto needs the float backend (quadrature) or a catalog family")
    return div.with_constant(
        normalization_constant(problem.rc, problem.measure, div.D, problem.ctx, tol))


def _run_transform(problem: Problem, N: int):
    """Returns (cc, rc_new, resolved_divisor)."""
    div = problem.divisor
    if isinstance(div, list):
        raise InputError("transform does not accept poly divisors")
    if div.kind == "linear":
        div = _resolve_linear_constant(problem)
        cc = kappa_sequence(problem.rc, div, N + 1, problem.ctx)
        rc_new = transformed_recurrence(problem.rc, cc, problem.ctx)
        return cc, rc_new, div
    if problem.measure is not None:
        if problem.ctx.rational:
            raise InputError("quadratic transforms need the float backend")
        cc, rc_new = general_quadratic_sequence(problem.rc, problem.measure, div, N, problem.ctx)
        return cc, rc_new, div
    # raw recurrence: the symmetric closed path is the only quadrature-free route
    if not div.resolved:
        raise InputError("quadratic divisor on a raw recurrence needs explicit C")
    if _number_is_zero(div.D):
        cc = symmetric_lambda_sequence(problem.rc, div.C, div.E, N, problem.ctx)
        rc_new = symmetric_transformed_recurrence(problem.rc, cc, problem.ctx)
        return cc, rc_new, div
    raise InputError("non-symmetric quadratic transforms need a measure (use a catalog family)")


def _number_is_zero(v) -> bool:
    from fractions import Fraction
    try:
        return Fraction(str(v)) == 0
    except (ValueError, ZeroDivisionError):
        return False


def _fmt(ctx: Context, value) -> str:
    return ctx.format_full(value)


def _display(ctx: Context, value) -> str:
    return f"{ctx.to_float(value):.12g}"


def _transform_rows(problem: Problem, cc, rc_new, N: int):
    ctx = problem.ctx
    rows = []
    for n in range(0, N + 1):
        row = {"n": n}
        if 1 <= n <= cc.max_index:
            row["kappa"] = _fmt(ctx, cc.kappa(n))
            row["kappa_display"] = _display(ctx, cc.kappa(n))
            if cc.order == 2:
                row["lambda"] = _fmt(ctx, cc.lam(n))
                row["lambda_display"] = _display(ctx, cc.lam(n))
        try:
            row["alpha"] = _fmt(ctx, rc_new.beta(n))
            row["alpha_display"] = _display(ctx, rc_new.beta(n))
        except InsufficientCoefficients:
            pass
        if n >= 1:
            try:
                row["alpha_hat"] = _fmt(ctx, rc_new.beta_hat(n - 1))
                row["alpha_hat_display"] = _display(ctx, rc_new.beta_hat(n - 1))
            except InsufficientCoefficients:
                pass
        rows.append(row)
    return rows


def _emit(rows, fieldnames, args, payload_json=None):
    if args.format == "json":
        text = json.dumps(payload_json if payload_json is not None else rows, indent=2)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fieldnames, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_transform(args) -> int:
    problem = load_problem(args.input, args, "transform")
    cc, rc_new, _ = _run_transform(problem, args.n)
    rows = _transform_rows(problem, cc, rc_new, args.n)
    fields = ["n", "kappa", "kappa_display", "lambda", "lambda_display",
              "alpha", "alpha_display", "alpha_hat", "alpha_hat_display"]
    _emit(rows, fields, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    problem = load_problem(args.input, args, "verify")
    ctx = problem.ctx
    if ctx.rational:
        raise InputError("verification uses quadrature; run with the float backend")
    N = args.n
    cc, rc_new, div = _run_transform(problem, N)
    tol = args.tol
    checks = []

    def add(name, value, tol_value):
        v = ctx.to_float(value)
        checks.append(CheckResult(name=name, value=v, tol=tol_value, passed=v <= tol_value))

    if div.kind == "linear":
        add("conserved_quantity", conserved_quantity_residual(problem.rc, div, cc, ctx), tol)
        ok, idx = sign_coherence(cc, ctx)
        checks.append(CheckResult("sign_coherence", 0.0 if ok else 1.0, 0.5, ok))
        ok, idx = kappa_bounds_ok(problem.rc, div, cc, ctx)
        checks.append(CheckResult("kappa_bounds", 0.0 if ok else 1.0, 0.5, ok))
    else:
        add("s_system_residuals", s_system_residuals(problem.rc, cc, rc_new, ctx), tol)
    if problem.measure is not None:
        upto = min(N, 10)
        add("orthogonality", orthogonality_residuals(problem.rc, problem.measure, div, cc,
                                                     upto, ctx), tol)
        add("oracle_agreement", oracle_agreement(problem.rc, problem.measure, div, cc,
                                                 min(N, 8), ctx), tol)
    report = VerificationReport(checks=tuple(checks))
    rows = [{"check": c.name, "value": f"{c.value:.6e}", "tol": f"{c.tol:.6e}",
             "passed": str(c.passed).lower()} for c in checks]
    payload = [{"check": c.name, "value": c.value, "tol": c.tol, "passed": c.passed}
               for c in checks]
    _emit(rows, ["check", "value", "tol", "passed"], args, payload_json=payload)
    return EXIT_OK if report.all_passed else EXIT_VERIFY_FAILED


def cmd_expand(args) -> int:
    problem = load_problem(args.input, args, "expand")
    ctx = problem.ctx
    div = problem.divisor
    if isinstance(div, list) or div.kind != "linear":
        raise InputError("expansion applies to linear divisors")
    div = _resolve_linear_constant(problem)
    N = args.n
    cc = kappa_sequence(problem.rc, div, max(N, 1), ctx)
    coeffs = fourier_coefficients(cc, problem.rc, N, ctx)

    parseval = None
    parseval_note = None
    if problem.measure is not None and not ctx.rational:
        try:
            parseval = parseval_residual(problem.rc, cc, div, problem.measure, N, ctx)
        except QuadratureDivergent as exc:
            parseval_note = f"second-moment integral divergent; parseval column omitted ({exc})"

    if args.points:
        points = [p.strip() for p in args.points.split(",") if p.strip()]
    elif problem.measure is not None and problem.measure.continuous:
        lo, hi = problem.measure.support
        points = [str(lo + (hi - lo) * frac) for frac in
                  (0.125, 0.25, 0.5, 0.75, 0.875)]
    else:
        points = [str(k) for k in range(6)]

    rows = []
    for n in range(N + 1):
        row = {"table": "fourier", "index": n, "value": _fmt(ctx, coeffs[n]),
               "display": _display(ctx, coeffs[n])}
        if parseval is not None:
            row["parseval_partial"] = _fmt(ctx, parseval.partial_sums[n])
        rows.append(row)
    for p in points:
        x = ctx.number(p)
        s = evaluate_partial_sum(problem.rc, coeffs, N, x, ctx)
        rows.append({"table": "partial_sum", "index": _fmt(ctx, x), "value": _fmt(ctx, s),
                     "display": _display(ctx, s)})
    payload = {
        "fourier": [r for r in rows if r["table"] == "fourier"],
        "partial_sums": [r for r in rows if r["table"] == "partial_sum"],
        "parseval_rhs": _fmt(ctx, parseval.rhs) if parseval is not None else None,
        "parseval_note": parseval_note,
        "summability_convergent": parseval.summability_convergent if parseval else None,
    }
    if args.format == "json":
        _emit(rows, [], args, payload_json=payload)
    else:
        buf = io.StringIO()
        if parseval_note:
            buf.write(f"# warning: {parseval_note}\n")
        if parseval is not None:
            buf.write(f"# parseval_rhs,{_fmt(ctx, parseval.rhs)}\n")
            buf.write(f"# summability_convergent,{parseval.summability_convergent}\n")
        writer = csv.DictWriter(buf, fieldnames=["table", "index", "value", "display",
                                                 "parseval_partial"], extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        text = buf.getvalue()
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    problem = load_problem(args.input, args, "oracle")
    ctx = problem.ctx
    if ctx.rational:
        raise InputError("the oracle integrates by quadrature; use the float backend")
    if problem.measure is None:
        raise InputError("the oracle needs a catalog family (its measure)")
    div = problem.poly_coeffs if problem.poly_coeffs is not None else problem.divisor
    r = args.r
    if r is None:
        r = len(div) - 1 if isinstance(div, list) else div.degree
    values = direct_connection(problem.rc, problem.measure, div, r, args.n, ctx)
    rows = [{"j": j + 1, "coefficient": _fmt(ctx, v), "display": _display(ctx, v)}
            for j, v in enumerate(values)]
    _emit(rows, ["j", "coefficient", "display"], args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opconnect",
        description="Connection coefficients and recurrences for measures "
                    "modified by a reciprocal polynomial factor.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="JSON problem file")
        p.add_argument("--n", type=int, default=10, help="number of coefficients")
        p.add_argument("--tol", type=float, default=1e-8, help="verification tolerance")
        p.add_argument("--precision", type=int, default=None, help="float precision in bits")
        p.add_argument("--backend", choices=["rational", "float"], default=None)
        p.add_argument("--output", default=None, help="write output to a file")
        p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("transform", help="kappa/lambda and the transformed recurrence")
    common(p)
    p = sub.add_parser("verify", help="invariant and oracle checks")
    common(p)
    p = sub.add_parser("expand", help="density-ratio expansion tables")
    common(p)
    p.add_argument("--points", default=None, help="comma-separated evaluation points")
    p = sub.add_parser("oracle", help="direct Gram-system connection coefficients")
    common(p)
    p.add_argument("--r", type=int, default=None, help="divisor degree (quasi-orthogonality order)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    handlers = {"transform": cmd_transform, "verify": cmd_verify,
                "expand": cmd_expand, "oracle": cmd_oracle}
    try:
        return handlers[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleSingular as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except _BREAKDOWN_ERRORS as exc:
        index = getattr(exc, "index", None)
        suffix = f" (index {index})" if index is not None else ""
        print(f"transform breakdown: {exc}{suffix}", file=sys.stderr)
        return EXIT_BREAKDOWN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
