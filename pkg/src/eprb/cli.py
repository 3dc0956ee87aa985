"""Command-line front end.

Subcommands map one-to-one onto the library operations:

    box <name>            construct a canonical behavior (JSON to stdout)
    check <path>          validate a behavior file; locality and witness
                          analysis when the constraints pass
    chsh <path>           correlations and the CHSH sum
    solve <path>          complete a free-set file and check feasibility
    hardy <path>          witness analysis for all eight sets
    rank                  rank of the constraint system
    optimize <target>     extremal searches (chsh | hardy | ghz)
    scan theta            sweep the Schmidt angle, CSV or table output

Exit codes: 0 success, 1 usage or I/O error, 2 constraint or feasibility
violation, 3 optimizer non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .behavior import (
    Behavior,
    BehaviorFormatError,
    ConstraintReport,
    CorrelationVector,
    chsh_delta,
)
from .behavior import validate as validate_behavior
from .boxes import (
    DeterministicAssignment,
    deterministic_box,
    is_local,
    pr_box,
    quantum_extremal_box,
    uniform_box,
)
from .hardy import analyze_all
from .linsys import FreeSet, build_matrix, check_feasible, rank, solve_dependent
from .optimizer import (
    OptimizationConfig,
    OptimizationResult,
    SCHMIDT_ANGLE_MAX,
    ghz_impossibility,
    hardy_theta_scan,
    maximize_chsh,
    maximize_hardy,
    maximize_hardy_maxent,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSTRAINT = 2
EXIT_NO_CONVERGENCE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc


def _load_behavior(path: str) -> Behavior:
    return Behavior.from_json(_read_text(path))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        try:
            Path(out).write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            raise _UsageError(f"cannot write {out}: {exc}") from exc


def _report_lines(report: ConstraintReport) -> list[str]:
    lines = [f"{'check':<24} {'status':<6} {'residual':>12}  tolerance"]
    for c in report.checks:
        lines.append(f"{c.name:<24} {c.status:<6} {c.residual:>12.3e}  {c.tolerance:.1e}")
    return lines


def cmd_box(args) -> int:
    name = args.name
    variant = 1
    if ":" in name:
        name, suffix = name.split(":", 1)
        if name in ("pr", "qextremal"):
            if suffix not in ("1", "2"):
                raise _UsageError(f"variant must be 1 or 2, got {suffix!r}")
            variant = int(suffix)
        elif name == "det":
            signs = {"+": 1, "-": -1}
            if len(suffix) != 4 or any(ch not in signs for ch in suffix):
                raise _UsageError("deterministic box needs four +/- signs, e.g. det:++--")
            behavior = deterministic_box(
                DeterministicAssignment(*(signs[ch] for ch in suffix))
            )
            _emit(behavior.to_json(), args.out)
            return EXIT_OK
        else:
            raise _UsageError(f"unknown box {args.name!r}")
    if name == "pr":
        behavior = pr_box(variant)
    elif name == "qextremal":
        behavior = quantum_extremal_box(variant)
    elif name == "uniform":
        behavior = uniform_box()
    elif name == "det":
        raise _UsageError("deterministic box needs four +/- signs, e.g. det:++--")
    else:
        raise _UsageError(f"unknown box {args.name!r}")
    _emit(behavior.to_json(), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    behavior = _load_behavior(args.path)
    report = validate_behavior(behavior, args.tol)
    locality = None
    hardy_reports = ()
    if report.all_passed:
        locality = is_local(behavior, args.tol)
        hardy_reports = analyze_all(behavior, args.tol)
    if args.json:
        payload = {
            "validate": report.to_dict(),
            "locality": locality.to_dict() if locality else None,
            "hardy": [r.to_dict() for r in hardy_reports],
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        lines = _report_lines(report)
        if locality is not None:
            verdict = "local" if locality.is_local else "NON-LOCAL"
            lines.append(
                f"locality: {verdict} (distance {locality.distance:.3e}, "
                f"witness {locality.witness_expression} = {locality.witness_value:.7f})"
            )
            for r in hardy_reports:
                premises = "zeros ok" if r.premises_ok else "premises not satisfied"
                lines.append(
                    f"witness {r.set_id}: value={r.witness:.7f} ({premises}) "
                    f"|CHSH|={r.delta_abs:.7f} sigma={r.sigma:.7f} -> {r.classification}"
                )
        else:
            lines.append("constraint violation: locality and witness analysis skipped")
        _emit("\n".join(lines), args.out)
    return EXIT_OK if report.all_passed else EXIT_CONSTRAINT


def cmd_chsh(args) -> int:
    behavior = _load_behavior(args.path)
    try:
        delta = chsh_delta(behavior)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    c = CorrelationVector.from_behavior(behavior)
    if args.json:
        _emit(json.dumps({"delta": delta, "correlations": c.to_dict()}, indent=2), args.out)
    else:
        _emit(
            "\n".join(
                [
                    f"c(a1,b1) = {c.c11:+.10f}",
                    f"c(a1,b2) = {c.c12:+.10f}",
                    f"c(a2,b1) = {c.c21:+.10f}",
                    f"c(a2,b2) = {c.c22:+.10f}",
                    f"CHSH sum = {delta:+.10f}",
                ]
            ),
            args.out,
        )
    return EXIT_OK


def cmd_solve(args) -> int:
    free = FreeSet.from_json(_read_text(args.path))
    try:
        report = check_feasible(free, args.tol, all_subset_sums=args.all_subset_sums)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    dependent = solve_dependent(free)
    if args.json:
        payload = {"dependent": dependent.to_dict(), "feasibility": report.to_dict()}
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        lines = [f"{k} = {v!r}" for k, v in dependent.to_dict().items()]
        lines += _report_lines(report)
        _emit("\n".join(lines), args.out)
    return EXIT_OK if report.all_passed else EXIT_CONSTRAINT


def cmd_hardy(args) -> int:
    behavior = _load_behavior(args.path)
    try:
        reports = analyze_all(behavior, args.tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    if args.json:
        _emit(json.dumps([r.to_dict() for r in reports], indent=2), args.out)
    else:
        lines = []
        for r in reports:
            premises = "zeros ok" if r.premises_ok else "premises not satisfied"
            lines.append(
                f"witness {r.set_id}: value={r.witness:.7f} zero_residual={r.zero_residual:.3e} "
                f"({premises}) |CHSH|={r.delta_abs:.7f} sigma={r.sigma:.7f} -> {r.classification}"
            )
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_rank(args) -> int:
    print(rank(build_matrix()))
    return EXIT_OK


def _config_from_args(args, default_restarts: int | None = None) -> OptimizationConfig:
    data = {}
    if default_restarts is not None:
        data["restarts"] = default_restarts
    if args.config is not None:
        try:
            loaded = json.loads(_read_text(args.config))
        except json.JSONDecodeError as exc:
            raise _UsageError(f"invalid config JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise _UsageError("config JSON must be an object")
        data.update(loaded)
    for key, value in (
        ("restarts", args.restarts),
        ("max_iters", args.max_iters),
        ("tol", args.tol),
        ("seed", args.seed),
    ):
        if value is not None:
            data[key] = value
    try:
        return OptimizationConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise _UsageError(f"invalid config: {exc}") from exc


def _optimize_summary(result: OptimizationResult) -> list[str]:
    lines = [
        f"objective  = {result.objective!r}",
        f"converged  = {result.converged}",
        f"restarts   = {result.restarts} (best: {result.best_restart})",
        f"evaluations = {result.evaluations}",
    ]
    for name, value in result.constraint_residuals.items():
        lines.append(f"residual {name} = {value:.3e}")
    return lines


def cmd_optimize(args) -> int:
    cfg = _config_from_args(args)
    if args.target == "chsh":
        result = maximize_chsh(args.state_class, cfg)
    elif args.target == "hardy":
        if args.state_class == "any":
            result = maximize_hardy(cfg)
        elif args.state_class == "maximally_entangled":
            result = maximize_hardy_maxent(cfg)
        else:
            raise _UsageError("hardy search supports state classes any|maximally_entangled")
    elif args.target == "ghz":
        if args.state_class != "any":
            raise _UsageError("ghz search does not take a state class")
        result = ghz_impossibility(cfg)
    else:  # unreachable behind argparse choices
        raise _UsageError(f"unknown optimization target {args.target!r}")
    extras = {}
    if args.target == "hardy":
        b = result.behavior
        extras["delta_abs"] = abs(chsh_delta(b))
        extras["sigma"] = sum(b.p(i) for i in (1, 8, 12, 14, 15))
    if args.json:
        payload = result.to_dict()
        payload.update(extras)
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        lines = _optimize_summary(result)
        for key, value in extras.items():
            lines.append(f"{key} = {value!r}")
        _emit("\n".join(lines), args.out)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_scan(args) -> int:
    if args.parameter != "theta":
        raise _UsageError(f"unknown scan parameter {args.parameter!r}")
    cfg = _config_from_args(args, default_restarts=8)
    try:
        rows = hardy_theta_scan(args.min, args.max, args.steps, cfg)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    if args.csv:
        lines = ["theta,p13,delta,sigma,status"]
        for r in rows:
            lines.append(f"{r.theta!r},{r.p13!r},{r.delta!r},{r.sigma!r},{r.status}")
        _emit("\n".join(lines), args.out)
    else:
        lines = [f"{'theta':>10} {'p13':>12} {'delta':>12} {'sigma':>12}  status"]
        for r in rows:
            lines.append(
                f"{r.theta:>10.6f} {r.p13:>12.7f} {r.delta:>12.7f} {r.sigma:>12.7f}  {r.status}"
            )
        _emit("\n".join(lines), args.out)
    if any(r.status != "ok" for r in rows):
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _add_output_flags(sub, json_flag: bool = True) -> None:
    if json_flag:
        sub.add_argument("--json", action="store_true", help="machine-readable output")
    sub.add_argument("--out", metavar="PATH", default=None, help="write output to a file")


def _add_config_flags(sub) -> None:
    sub.add_argument("--config", metavar="PATH", help="optimizer config JSON")
    sub.add_argument("--restarts", type=int, default=None)
    sub.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    sub.add_argument("--tol", type=float, default=None, help="objective tolerance")
    sub.add_argument("--seed", type=int, default=None)


def _build_parser() -> _Parser:
    parser = _Parser(prog="eprb", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command")

    sub = subs.add_parser("box", help="construct a canonical behavior")
    sub.add_argument("name", help="pr[:1|2], uniform, det:<++-->, qextremal[:1|2]")
    _add_output_flags(sub, json_flag=False)
    sub.set_defaults(func=cmd_box)

    sub = subs.add_parser("check", help="validate a behavior file")
    sub.add_argument("path")
    sub.add_argument("--tol", type=float, default=1e-9)
    _add_output_flags(sub)
    sub.set_defaults(func=cmd_check)

    sub = subs.add_parser("chsh", help="correlations and CHSH sum")
    sub.add_argument("path")
    _add_output_flags(sub)
    sub.set_defaults(func=cmd_chsh)

    sub = subs.add_parser("solve", help="complete a free-set file")
    sub.add_argument("path")
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument(
        "--all-subset-sums",
        action="store_true",
        help="also check every subset sum of the dependent entries",
    )
    _add_output_flags(sub)
    sub.set_defaults(func=cmd_solve)

    sub = subs.add_parser("hardy", help="witness analysis for all eight sets")
    sub.add_argument("path")
    sub.add_argument("--tol", type=float, default=1e-9)
    _add_output_flags(sub)
    sub.set_defaults(func=cmd_hardy)

    sub = subs.add_parser("rank", help="rank of the constraint system")
    sub.set_defaults(func=cmd_rank)

    sub = subs.add_parser("optimize", help="extremal searches")
    sub.add_argument("target", choices=("chsh", "hardy", "ghz"))
    sub.add_argument(
        "--state-class",
        dest="state_class",
        choices=("any", "product", "maximally_entangled"),
        default="any",
    )
    _add_config_flags(sub)
    _add_output_flags(sub)
    sub.set_defaults(func=cmd_optimize)

    sub = subs.add_parser("scan", help="sweep the Schmidt angle")
    sub.add_argument("parameter", help="only 'theta' is supported")
    sub.add_argument("--steps", type=int, default=9)
    sub.add_argument("--min", type=float, default=0.0)
    sub.add_argument("--max", type=float, default=SCHMIDT_ANGLE_MAX)
    sub.add_argument("--csv", action="store_true", help="CSV output")
    _add_config_flags(sub)
    _add_output_flags(sub, json_flag=False)
    sub.set_defaults(func=cmd_scan)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "func", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BehaviorFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
