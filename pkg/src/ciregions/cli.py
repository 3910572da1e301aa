"""Command-line front end: ``ciregions {info,region,bound,verify}``.

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 optimizer
failure, 4 no usable target constraints.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .channel import OptimizerConfig
from .common import (
    corner_rate_1,
    corner_rate_2,
    g_rates,
    gk_common_information,
    residual_info_zero,
    wyner_common_information,
)
from .crypto.bitot import bit_ot_sup_oracle
from .crypto.bounds import (
    EXACT,
    TargetConstraint,
    aci_efficiency_bound,
    analytic_source_points,
    axis_intercepts,
    bit_ot_pair_constraints,
    bit_ot_pair_intercepts,
    string_ot_pair,
    string_ot_source_points,
    ww_bound,
)
from .crypto.ot import make_bit_ot, paper_channel, string_length
from .errors import (
    CIRegionsError,
    NoPositiveConstraint,
    OptimizerDidNotConverge,
    OracleNotRun,
    ValidationError,
    ZeroTargetIntercept,
)
from .pmf import JointPMF, entropy, load_pmf, mutual_information
from .regions import simplex_weight_grid, trace_region
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_OPTIMIZER, EXIT_CONSTRAINTS = 0, 1, 2, 3, 4
BUILTINS = ("ot:L", "bitot", "bitot-pair")


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def resolve_pmf(spec: str) -> tuple:
    """(pmf, kind) for a builtin name or a JSON file path."""
    if spec == "bitot":
        return make_bit_ot(), "bitot"
    if spec == "bitot-pair":
        return string_ot_pair(1), "bitot-pair"
    if spec.startswith("ot:"):
        try:
            L = int(spec[3:])
        except ValueError:
            raise CLIError(f"bad builtin {spec!r}; expected ot:L with integer L", EXIT_INPUT) from None
        if L < 1:
            raise CLIError("ot:L needs L >= 1", EXIT_INPUT)
        return string_ot_pair(L), "ot"
    path = Path(spec)
    if not path.is_file():
        raise CLIError(f"{spec}: no such file (builtins: {', '.join(BUILTINS)})", EXIT_INPUT)
    try:
        return load_pmf(path), "file"
    except (ValueError, KeyError, TypeError) as exc:
        raise CLIError(f"{spec}: cannot parse pmf ({exc})", EXIT_INPUT) from exc


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=args.restarts,
        tolerance=args.tol,
        seed=args.seed,
        u_size=args.u_size,
        max_iters=args.max_iters,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# ---- info


def cmd_info(args) -> int:
    pmf, _ = resolve_pmf(args.pmf)
    config = _config(args)
    c1, c2 = corner_rate_1(pmf, config), corner_rate_2(pmf, config)
    g1, g2 = g_rates(pmf, config, corners=(c1, c2))
    rows = [
        ("H(X)", entropy(pmf, [0]), EXACT),
        ("H(Y)", entropy(pmf, [1]), EXACT),
        ("H(X,Y)", entropy(pmf, [0, 1]), EXACT),
        ("I(X;Y)", mutual_information(pmf, 0, 1), EXACT),
    ]
    for name, rep in (
        ("C_GK", gk_common_information(pmf)),
        ("R_RD-0", residual_info_zero(pmf)),
        ("C_Wyner", wyner_common_information(pmf, config)),
        ("R_1-0", c1),
        ("R_2-0", c2),
        ("G(Y->X)", g1),
        ("G(X->Y)", g2),
    ):
        rows.append((name, rep.value, rep.certified))
    if args.format == "json":
        data = {name: {"value": v, "certified": c} for name, v, c in rows}
        data["config_hash"] = config.config_hash()
        _emit(_dumps(data), args.out)
    else:
        width = max(len(r[0]) for r in rows)
        _emit("".join(f"{n:<{width}}  {v:.9f}  {c}\n" for n, v, c in rows), args.out)
    return EXIT_OK


# ---- region


def cmd_region(args) -> int:
    pmf, kind = resolve_pmf(args.pmf)
    extra = []
    if args.inject_paper_channel:
        if kind not in ("ot", "bitot-pair"):
            raise CLIError("--inject-paper-channel needs a string-OT source (ot:L or bitot-pair)", EXIT_INPUT)
        extra.append(("paper Q", paper_channel(pmf)))
    if args.grid < 1:
        raise CLIError("--grid must be >= 1", EXIT_INPUT)
    region = trace_region(
        pmf, args.tag, simplex_weight_grid(args.grid), _config(args), extra_channels=extra, search=not args.no_search
    )
    if args.format == "json":
        data = region.to_json(pmf)
        data["thm1_max_deviation"] = region.theorem1_deviation()
        _emit(_dumps(data), args.out)
    else:
        _emit(region.to_csv(check_column=True), args.out)
    return EXIT_OK


# ---- bound


def _source_points(pmf: JointPMF, kind: str, args) -> list:
    if kind in ("ot", "bitot-pair"):
        pts = string_ot_source_points(pmf, include_paper_channel=True)
    else:
        pts = analytic_source_points(pmf)
    out = [(label, tuple(v)) for label, v, _ in pts]
    if kind in ("file", "bitot") and not args.no_search:
        region = trace_region(pmf, "aci", simplex_weight_grid(args.grid), _config(args))
        out.extend((p.label, p.aci.values) for p in region.points)
    return out


def _axis_constraints(intercepts) -> list:
    """Exact intercepts give valid outer inequalities on the coordinate axes."""
    faces = ((1, 2), (0, 2), (0, 1))
    out = []
    for i, (rep, face) in enumerate(zip(intercepts, faces)):
        if rep.certified == EXACT and rep.value > 0:
            w = [0.0, 0.0, 0.0]
            w[i] = 1.0
            out.append(TargetConstraint(tuple(w), rep.value, face, rep.note or "exact axis intercept"))
    return out


def _target(pmf: JointPMF, kind: str, args) -> tuple:
    """(intercepts, constraints) of the target region."""
    if kind == "bitot-pair":
        oracle = bit_ot_sup_oracle(args.oracle_step, args.refine_step)
        return bit_ot_pair_intercepts(oracle), bit_ot_pair_constraints(oracle)
    intercepts = axis_intercepts(pmf, _config(args))
    constraints = _axis_constraints(intercepts)
    if args.constraints:
        try:
            data = json.loads(Path(args.constraints).read_text())
            constraints += [TargetConstraint.from_json(c) for c in data]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CLIError(f"{args.constraints}: cannot read constraints ({exc})", EXIT_INPUT) from exc
    return intercepts, constraints


def cmd_bound(args) -> int:
    src, src_kind = resolve_pmf(args.source)
    tgt, tgt_kind = resolve_pmf(args.target)
    intercepts, constraints = _target(tgt, tgt_kind, args)
    if not any(c.h > 0 for c in constraints):
        raise CLIError("no valid target constraints; supply --constraints", EXIT_CONSTRAINTS)
    aci = aci_efficiency_bound(_source_points(src, src_kind, args), constraints)
    src_int = axis_intercepts(src, _config(args))
    data = {"source": args.source, "target": args.target, "aci": aci.to_json()}
    try:
        data["ww"] = ww_bound(src_int, intercepts).to_json()
    except ZeroTargetIntercept as exc:
        data["ww"] = {"bound": None, "error": str(exc)}
    if src_kind == "ot":
        data["string_length"] = string_length(src)
    _emit(_dumps(data), args.out)
    return EXIT_OK


# ---- verify


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise CLIError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", EXIT_INPUT)
    lines = run_suite(args.suite, args.seed, args.trials)
    ok = all(line.passed for line in lines)
    text = "".join(line.text() + "\n" for line in lines)
    text += f"{'PASS' if ok else 'FAIL'} suite {args.suite} (seed {args.seed})\n"
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=32, help="optimizer restarts")
    common.add_argument("--tol", type=float, default=1e-9, help="optimizer stopping tolerance")
    common.add_argument("--max-iters", type=int, default=2000)
    common.add_argument("--u-size", type=int, default=None, help="auxiliary alphabet size (default |X||Y|+2)")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    parser = argparse.ArgumentParser(prog="ciregions", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="scalar quantities of a pmf")
    p.add_argument("pmf", help="pmf JSON path or builtin (ot:L, bitot, bitot-pair)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("region", parents=[common], help="trace an inner region approximation")
    p.add_argument("pmf")
    p.add_argument("--tag", choices=("aci", "gw"), default="aci")
    p.add_argument("--grid", type=int, default=8, help="weight grid resolution (weights in multiples of 1/grid)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--inject-paper-channel", action="store_true", help="add the OT example channel Q")
    p.add_argument("--no-search", action="store_true", help="only the analytic channels")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("bound", parents=[common], help="secure-sampling efficiency bounds")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--constraints", default=None, help="JSON list of target constraints {w, h, face, source}")
    p.add_argument("--grid", type=int, default=4, help="weight grid for tracing file sources")
    p.add_argument("--no-search", action="store_true", help="use analytic source points only")
    p.add_argument("--oracle-step", type=float, default=0.05)
    p.add_argument("--refine-step", type=float, default=0.01)
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--trials", type=int, default=None, help="trials (draws for bitot-lemma)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OptimizerDidNotConverge as exc:
        print(f"optimizer failure: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except (NoPositiveConstraint, ZeroTargetIntercept) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINTS
    except OracleNotRun as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValidationError, CIRegionsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
