"""Command-line front end: evaluate operators, run identity suites, explore.

Exit codes: 0 success, 1 identity failure (check), 2 numeric failure
(non-convergence or pole), 3 usage error (bad flags, malformed expression,
domain violations).  Reports are byte-reproducible for a fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Iterator

from . import checks
from .core import QParams, Truncation, count_terms
from .errors import DomainError, NonConvergence, PoleError, QCalculusError
from .expr import ExprError, compile_expr
from .fractional import (
    left_caputo,
    left_frac_integral,
    left_riemann_deriv,
    right_caputo,
    right_frac_integral,
    right_riemann_deriv,
)
from .ivp import MLParams, q_mittag_leffler
from .special import q_exp_E, q_exp_e, q_factorial_power, q_gamma

ENV_REL_TOL = "QFRAC_REL_TOL"
ENV_MAX_TERMS = "QFRAC_MAX_TERMS"

EVAL_COLUMNS = [
    "target", "q", "alpha", "beta", "lambda", "a", "b", "s", "t", "z", "z0",
    "f", "value",
]
EXPLORE_COLUMNS = [
    "identity_id", "q", "alpha", "beta", "a", "b", "t", "value_lhs",
    "value_rhs", "rel_err", "terms", "status", "error",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _float_env(name: str) -> float | None:
    raw = os.environ.get(name)
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"environment variable {name}={raw!r} is not a number")


def _resolve_truncation(args: argparse.Namespace) -> Truncation:
    # Precedence: flag, then environment, then library default.
    rel_tol = args.rel_tol if args.rel_tol is not None else _float_env(ENV_REL_TOL)
    max_terms = args.max_terms
    if max_terms is None:
        env_terms = _float_env(ENV_MAX_TERMS)
        max_terms = int(env_terms) if env_terms is not None else None
    default = Truncation()
    try:
        return Truncation(
            rel_tol=rel_tol if rel_tol is not None else default.rel_tol,
            max_terms=max_terms if max_terms is not None else default.max_terms,
        )
    except DomainError as exc:
        raise UsageError(str(exc))


def _float_list(raw: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise UsageError(f"{flag} expects a number or comma-separated numbers, got {raw!r}")


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"eval {args.target} requires --{name.replace('_', '-')}")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _grid_member_exponent(value: float, q: float, what: str) -> int:
    d = math.log(value) / math.log(q) if value > 0 else None
    if d is None or abs(d - round(d)) > 1e-9:
        raise UsageError(f"{what}={value} must be an integer power of q={q}")
    return int(round(d))


# ---------------------------------------------------------------------------
# eval

def _eval_rows(args: argparse.Namespace, p: QParams) -> Iterator[dict]:
    target = args.target
    base = {key: "" for key in EVAL_COLUMNS}
    base["target"] = target
    base["q"] = repr(p.q)

    def row(value_fn, **fields) -> dict:
        out = dict(base)
        for key, val in fields.items():
            out[key] = repr(val) if isinstance(val, float) else str(val)
        with count_terms() as counter:
            out["value"] = repr(value_fn())
        out["terms"] = counter.total
        return out

    if target == "gamma":
        _require(args, "alpha")
        yield row(lambda: q_gamma(args.alpha, p), alpha=args.alpha)
    elif target == "qfact":
        _require(args, "t", "s", "alpha")
        for t in _float_list(args.t, "--t"):
            yield row(
                lambda t=t: q_factorial_power(t, args.s, args.alpha, p),
                t=t, s=args.s, alpha=args.alpha,
            )
    elif target == "ml":
        _require(args, "alpha", "z")
        params = MLParams(args.alpha, args.beta, args.lam, args.z0)
        for z in _float_list(args.z, "--z"):
            yield row(
                lambda z=z: q_mittag_leffler(params, z, p),
                alpha=args.alpha, beta=args.beta, z=z, z0=args.z0,
                **{"lambda": args.lam},
            )
    elif target in ("eq", "Eq"):
        _require(args, "t")
        func = q_exp_e if target == "eq" else q_exp_E
        for t in _float_list(args.t, "--t"):
            yield row(lambda t=t: func(t, p), t=t)
    elif target in ("fracint", "fracder", "caputo"):
        _require(args, "alpha", "t", "f")
        expr = compile_expr(args.f)
        for t in _float_list(args.t, "--t"):
            f = lambda s, t=t: expr(s, t)
            if args.side == "left":
                a = args.a if args.a is not None else 0.0
                op = {
                    "fracint": left_frac_integral,
                    "fracder": left_riemann_deriv,
                    "caputo": left_caputo,
                }[target]
                yield row(
                    lambda op=op, f=f, a=a, t=t: op(f, a, args.alpha, t, p),
                    alpha=args.alpha, a=a, t=t, f=args.f,
                )
            else:
                b = args.b if args.b is not None else math.inf
                op = {
                    "fracint": right_frac_integral,
                    "fracder": right_riemann_deriv,
                    "caputo": right_caputo,
                }[target]
                yield row(
                    lambda op=op, f=f, b=b, t=t: op(f, b, args.alpha, t, p),
                    alpha=args.alpha, b=b, t=t, f=args.f,
                )
    else:  # pragma: no cover - argparse choices guard this
        raise UsageError(f"unknown eval target {target!r}")


def _cmd_eval(args: argparse.Namespace) -> int:
    if args.q is None:
        raise UsageError("eval requires --q")
    p = QParams(args.q, _resolve_truncation(args))
    columns = list(EVAL_COLUMNS)
    if args.verbose:
        columns.append("terms")
    # Materialise before writing so failures do not leave partial output.
    rows = list(_eval_rows(args, p))
    stream, owned = _open_out(args.out)
    try:
        writer = csv.DictWriter(stream, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if owned:
            stream.close()
    return 0


# ---------------------------------------------------------------------------
# check

def _cmd_check(args: argparse.Namespace) -> int:
    trunc = _resolve_truncation(args)
    report = checks.run_suite(args.suite, seed=args.seed, trunc=trunc)
    payload = json.dumps(report.to_json_obj(), sort_keys=True, indent=2) + "\n"
    stream, owned = _open_out(args.out)
    try:
        stream.write(payload)
    finally:
        if owned:
            stream.close()
    if args.verbose:
        for rec in report.records:
            state = "pass" if rec.passed else "FAIL"
            print(
                f"[{state}] {rec.identity} {rec.params} rel_err={rec.rel_err:.3e}",
                file=sys.stderr,
            )
    print(
        f"suite={report.suite} records={len(report.records)} "
        f"failed={report.n_failed} duration={report.duration:.2f}s",
        file=sys.stderr,
    )
    if report.has_errors:
        return 2
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# explore

def _parse_grid(raw: str | None) -> list[tuple[float, float]]:
    if raw is None:
        return checks.default_explore_grid()
    pairs = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise UsageError(f"--grid pairs must look like 'alpha,beta', got {chunk!r}")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise UsageError(f"--grid pair {chunk!r} is not numeric")
    return pairs


def _cmd_explore(args: argparse.Namespace) -> int:
    trunc = _resolve_truncation(args)
    q = args.q if args.q is not None else 0.5
    if not (0.0 < q < 1.0):
        raise UsageError(f"--q must lie in (0, 1), got {q}")
    b = args.b if args.b is not None else 1.0
    if not (math.isfinite(b) and b > 0):
        raise UsageError(f"explore requires a finite positive --b, got {b}")
    _grid_member_exponent(b, q, "--b")
    t = args.t if args.t is not None else b * q * q
    m = _grid_member_exponent(t / b, q, "--t relative to --b")
    if m <= 0:
        raise UsageError(f"--t must lie strictly below --b on the grid, got t={t}, b={b}")
    expr = compile_expr(args.f if args.f is not None else "1")
    f = lambda s: expr(s, t)
    pairs = _parse_grid(args.grid)
    records = checks.explore_finite_right_semigroup(pairs, q, b, f, t, trunc)
    stream, owned = _open_out(args.out)
    try:
        writer = csv.DictWriter(stream, fieldnames=EXPLORE_COLUMNS)
        writer.writeheader()
        for rec in records:
            writer.writerow(
                {
                    "identity_id": "right_semigroup_finite",
                    "q": repr(rec.q),
                    "alpha": repr(rec.alpha),
                    "beta": repr(rec.beta),
                    "a": "",
                    "b": repr(rec.b),
                    "t": repr(rec.t),
                    "value_lhs": "" if math.isnan(rec.lhs) else repr(rec.lhs),
                    "value_rhs": "" if math.isnan(rec.rhs) else repr(rec.rhs),
                    "rel_err": "" if math.isnan(rec.rel_err) else repr(rec.rel_err),
                    "terms": rec.terms,
                    "status": rec.status,
                    "error": rec.error,
                }
            )
    finally:
        if owned:
            stream.close()
    if records and all(rec.status == "error" for rec in records):
        return 2
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    parser.add_argument("--max-terms", dest="max_terms", type=int, default=None)
    parser.add_argument("--out", default=None, help="output path, '-' for stdout")
    parser.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfrac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate one operator at given points")
    ev.add_argument(
        "target",
        choices=["gamma", "qfact", "ml", "eq", "Eq", "fracint", "fracder", "caputo"],
    )
    ev.add_argument("--q", type=float, default=None)
    ev.add_argument("--alpha", type=float, default=None)
    ev.add_argument("--beta", type=float, default=1.0)
    ev.add_argument("--lambda", dest="lam", type=float, default=0.0)
    ev.add_argument("--a", type=float, default=None)
    ev.add_argument("--b", type=float, default=None)
    ev.add_argument("--s", type=float, default=None)
    ev.add_argument("--t", default=None, help="evaluation point(s), comma separated")
    ev.add_argument("--z", default=None, help="evaluation point(s), comma separated")
    ev.add_argument("--z0", type=float, default=0.0)
    ev.add_argument("--f", default=None, help="integrand expression in s (and t)")
    ev.add_argument("--side", choices=["left", "right"], default="left")
    _add_common_flags(ev)
    ev.set_defaults(func=_cmd_eval)

    ck = sub.add_parser("check", help="run an identity suite and emit a JSON report")
    ck.add_argument("suite", choices=list(checks.SUITE_NAMES) + ["all"])
    ck.add_argument("--seed", type=int, default=0)
    _add_common_flags(ck)
    ck.set_defaults(func=_cmd_check)

    ex = sub.add_parser(
        "explore",
        help="measure finite-endpoint right-integral composition residuals",
    )
    ex.add_argument("--q", type=float, default=None)
    ex.add_argument("--b", type=float, default=None)
    ex.add_argument("--t", type=float, default=None)
    ex.add_argument("--f", default=None, help="test function expression, default 1")
    ex.add_argument("--grid", default=None, help="pairs 'alpha,beta;alpha,beta;...'")
    _add_common_flags(ex)
    ex.set_defaults(func=_cmd_explore)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"qfrac: error: {exc}", file=sys.stderr)
        return 3
    try:
        return args.func(args)
    except (UsageError, ExprError, DomainError) as exc:
        print(f"qfrac: error: {exc}", file=sys.stderr)
        return 3
    except (NonConvergence, PoleError) as exc:
        print(f"qfrac: numeric failure: {exc}", file=sys.stderr)
        return 2
    except QCalculusError as exc:  # pragma: no cover - defensive
        print(f"qfrac: numeric failure: {exc}", file=sys.stderr)
        return 2
    except ZeroDivisionError as exc:
        print(f"qfrac: numeric failure: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())
