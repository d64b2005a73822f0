"""Command-line interface.

Every command reads a polynomial (or matrix) JSON document, runs one library
entry point, and prints a JSON report to stdout:

    {"schema": "polycap/1", "command": ..., "inputs": ..., "result": ..., "meta": ...}

Exit codes: 0 success, 1 check-suite failure (or a failed diagnostic with
--strict), 2 invalid input, 3 resource limit refused.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .acceptance import run_all
from .approx import estimate_mixed_partial
from .bounds import rank_ladder_bound, sparse_permanent_bound
from .capacity import capacity_minimize, sinkhorn_scale
from .errors import InputError, NotHyperbolicError, ResourceLimitError
from .hyperbolicity import half_plane_sample_check, real_rootedness_check
from .io import SCHEMA, format_scalar, load_polynomial
from .oracles import exact_mixed_partial, mixed_discriminant, permanent_ryser
from .polynomials import DeterminantalPolynomial, ProductFormPolynomial

_EQUALITY_TOL = 1e-9


@dataclass
class RunConfig:
    """Validated bundle of the options shared by the CLI commands."""

    command: str
    input_path: str | None = None
    mode: str = "float"
    tol: float = 1e-10
    max_iter: int = 200
    seed: int = 0
    k: int = 0
    ordering: str = "as-given"
    output: str | None = None
    threads: int | None = None
    no_meta: bool = False

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise InputError(f"unknown mode {self.mode!r}")
        if not self.tol > 0:
            raise InputError("tol must be positive")
        if self.max_iter < 1:
            raise InputError("max-iter must be >= 1")
        if self.k < 0:
            raise InputError("k must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        fields = {f for f in cls.__dataclass_fields__}  # noqa: C416
        unknown = set(obj) - fields
        if unknown:
            raise InputError(f"unknown config fields: {sorted(unknown)}")
        return cls(**obj)


def _emit(config: RunConfig, inputs: dict, result: dict) -> str:
    report = {
        "schema": SCHEMA,
        "command": config.command,
        "inputs": inputs,
        "result": result,
    }
    if not config.no_meta:
        report["meta"] = {
            "tool": "polycap",
            "version": __version__,
            "mode": config.mode,
        }
    text = json.dumps(report, indent=2, sort_keys=True)
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return text


def _config_from_args(args, command: str) -> RunConfig:
    return RunConfig(
        command=command,
        input_path=getattr(args, "input", None),
        mode=getattr(args, "mode", "float"),
        tol=getattr(args, "tol", 1e-10),
        max_iter=getattr(args, "max_iter", 200),
        seed=getattr(args, "seed", 0),
        k=getattr(args, "k", 0),
        ordering=getattr(args, "ordering", "as-given"),
        output=getattr(args, "output", None),
        threads=getattr(args, "threads", None),
        no_meta=getattr(args, "no_meta", False),
    )


def _apply_threads(config: RunConfig):
    if config.threads is not None:
        import os

        if config.threads < 1:
            raise InputError("threads must be >= 1")
        os.environ["POLYCAP_THREADS"] = str(config.threads)


def _load(config: RunConfig):
    if not config.input_path:
        raise InputError("an input file is required")
    return load_polynomial(config.input_path, mode=config.mode)


def _cmd_capacity(args) -> int:
    config = _config_from_args(args, "capacity")
    poly = _load(config)
    res = capacity_minimize(poly, tol=config.tol, max_iter=config.max_iter)
    _emit(config, {"path": config.input_path, "n_vars": poly.n_vars,
                   "degree": poly.degree}, res.to_dict())
    return 0


def _cmd_permanent(args) -> int:
    config = _config_from_args(args, "permanent")
    _apply_threads(config)
    poly = _load(config)
    if not isinstance(poly, ProductFormPolynomial):
        raise InputError(
            "permanent needs a 'product' document (the matrix rows)")
    value = permanent_ryser(poly.rows, mode=config.mode)
    _emit(config, {"path": config.input_path, "n": poly.n_vars},
          {"permanent": format_scalar(value)})
    return 0


def _cmd_mixed_disc(args) -> int:
    config = _config_from_args(args, "mixed-disc")
    _apply_threads(config)
    poly = _load(config)
    if not isinstance(poly, DeterminantalPolynomial):
        raise InputError(
            "mixed-disc needs a 'determinantal' document (the PSD tuple)")
    value = mixed_discriminant(poly.matrices, mode=config.mode)
    _emit(config, {"path": config.input_path, "n": poly.n_vars},
          {"mixed_discriminant": format_scalar(value)})
    return 0


def _cmd_bound(args) -> int:
    config = _config_from_args(args, "bound")
    _apply_threads(config)
    poly = _load(config)
    ordering = config.ordering
    if ordering not in ("as-given", "greedy"):
        try:
            ordering = tuple(int(s) for s in ordering.split(","))
        except ValueError:
            raise InputError(
                "ordering must be 'as-given', 'greedy', or a comma-separated "
                "permutation of 0..n-1") from None
    report = rank_ladder_bound(poly, ordering=ordering,
                               include_exact="auto", tol=config.tol,
                               max_iter=config.max_iter)
    result = report.to_dict()
    if report.exact_value is not None:
        scale = max(1.0, abs(report.exact_value))
        result["equality_vdw"] = bool(
            abs(report.exact_value - report.lower_bound_vdw) <= _EQUALITY_TOL * scale)
        result["equality_rank"] = bool(
            abs(report.exact_value - report.lower_bound_rank) <= _EQUALITY_TOL * scale)
    _emit(config, {"path": config.input_path, "n_vars": poly.n_vars,
                   "degree": poly.degree}, result)
    return 0


def _cmd_approx(args) -> int:
    config = _config_from_args(args, "approx")
    poly = _load(config)
    res = estimate_mixed_partial(poly, k=config.k, tol=config.tol,
                                 max_iter=config.max_iter)
    _emit(config, {"path": config.input_path, "n_vars": poly.n_vars,
                   "degree": poly.degree, "k": config.k}, res.to_dict())
    return 0


def _cmd_check_hyperbolic(args) -> int:
    config = _config_from_args(args, "check-hyperbolic")
    poly = _load(config)
    checks = []
    ok_root, worst = real_rootedness_check(
        poly, trials=args.trials, seed=config.seed)
    checks.append({
        "check": "real-rootedness",
        "passed": bool(ok_root),
        "trials": args.trials,
        "worst_profile": worst.to_dict() if worst is not None else None,
    })
    ok_half, stats = half_plane_sample_check(
        poly, samples=args.samples, seed=config.seed)
    checks.append({
        "check": "half-plane",
        "passed": bool(ok_half),
        "samples": stats["samples"],
        "worst_margin": stats["worst_margin"],
        "witness": stats["witness"],
    })
    passed = bool(ok_root and ok_half)
    _emit(config, {"path": config.input_path, "n_vars": poly.n_vars,
                   "degree": poly.degree},
          {"passed": passed, "checks": checks,
           "oracle_calls": poly.calls})
    if args.strict and not passed:
        return 1
    return 0


def _cmd_scale(args) -> int:
    config = _config_from_args(args, "scale")
    poly = _load(config)
    if not isinstance(poly, ProductFormPolynomial):
        raise InputError("scale needs a 'product' document (the matrix rows)")
    res = sinkhorn_scale(poly.rows, tol=config.tol,
                         max_iter=max(config.max_iter, 10000))
    _emit(config, {"path": config.input_path, "n": poly.n_vars},
          res.to_dict())
    return 0


def _cmd_sparse_bound(args) -> int:
    config = _config_from_args(args, "sparse-bound")
    poly = _load(config)
    if not isinstance(poly, ProductFormPolynomial):
        raise InputError(
            "sparse-bound needs a 'product' document (the matrix rows)")
    bound = sparse_permanent_bound(poly.rows, k=config.k,
                                   transpose=args.transpose)
    result = {"bound": bound, "k": config.k, "transpose": bool(args.transpose)}
    if poly.n_vars <= 14:
        result["permanent"] = float(permanent_ryser(poly.rows, mode="float"))
    _emit(config, {"path": config.input_path, "n": poly.n_vars}, result)
    return 0


def _cmd_suite(args) -> int:
    _config_from_args(args, "suite")
    only = None
    if args.only is not None:
        try:
            only = [int(s) for s in args.only.split(",")]
        except ValueError:
            raise InputError(
                f"--only expects comma-separated integers, got {args.only!r}")
    results = run_all(only)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    summary = f"{len(results) - len(failed)}/{len(results)} criteria passed"
    print(summary)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polycap",
        description=(
            "Capacity bounds for homogeneous polynomials with nonnegative "
            "coefficients: permanents, mixed discriminants, and certified "
            "approximation of mixed partial derivatives."),
    )
    parser.add_argument("--version", action="version",
                        version=f"polycap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="polynomial JSON file")
        p.add_argument("--mode", choices=("exact", "float"), default="float",
                       help="arithmetic mode (default float)")
        p.add_argument("--tol", type=float, default=1e-10,
                       help="convergence tolerance (default 1e-10)")
        p.add_argument("--max-iter", dest="max_iter", type=int, default=200,
                       help="iteration cap (default 200)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for sampled checks (default 0)")
        p.add_argument("--output", help="write the JSON report here instead of stdout")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for signed-average sums")
        p.add_argument("--no-meta", dest="no_meta", action="store_true",
                       help="omit the meta block (byte-stable reports)")

    p = sub.add_parser("capacity", help="minimize p over the slice prod(x)=1")
    common(p)
    p.set_defaults(fn=_cmd_capacity)

    p = sub.add_parser("permanent", help="exact/float permanent of a product matrix")
    common(p)
    p.set_defaults(fn=_cmd_permanent)

    p = sub.add_parser("mixed-disc", help="mixed discriminant of a PSD tuple")
    common(p)
    p.set_defaults(fn=_cmd_mixed_disc)

    p = sub.add_parser("bound",
                       help="capacity lower bounds on the full mixed partial")
    common(p)
    p.add_argument("--ordering", default="as-given",
                   help="'as-given', 'greedy', or comma-separated permutation")
    p.set_defaults(fn=_cmd_bound)

    p = sub.add_parser("approx",
                       help="estimate the mixed partial with a guarantee factor")
    common(p)
    p.add_argument("--k", type=int, default=0,
                   help="head variables to differentiate out (default 0)")
    p.set_defaults(fn=_cmd_approx)

    p = sub.add_parser("check-hyperbolic",
                       help="real-rootedness and half-plane diagnostics")
    common(p)
    p.add_argument("--trials", type=int, default=50,
                   help="random slice directions (default 50)")
    p.add_argument("--samples", type=int, default=500,
                   help="half-plane sample points (default 500)")
    p.add_argument("--strict", action="store_true",
                   help="exit 1 when a diagnostic fails")
    p.set_defaults(fn=_cmd_check_hyperbolic)

    p = sub.add_parser("scale", help="Sinkhorn-balance a product matrix")
    common(p)
    p.set_defaults(fn=_cmd_scale)

    p = sub.add_parser("sparse-bound",
                       help="support-sparsity permanent lower bound")
    common(p)
    p.add_argument("--k", type=int, required=True,
                   help="support size (nonzeros per column among the first n-k)")
    p.add_argument("--transpose", action="store_true",
                   help="apply the row-wise variant")
    p.set_defaults(fn=_cmd_sparse_bound)

    p = sub.add_parser("suite", help="run the built-in check suite")
    common(p, needs_input=False)
    p.add_argument("--only", default=None,
                   help="comma-separated criterion numbers (1..10)")
    p.set_defaults(fn=_cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotHyperbolicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
