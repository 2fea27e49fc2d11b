"""Batch front-end: ingest a constellation file, run the analytics,
verification, probe, or allocation machinery, and emit JSON/CSV reports.

All numerics live in the library modules; this module only parses flags,
builds configurations, and serializes results. Exit codes: 0 success,
2 validation failure, 3 integration budget not met, 4 self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import allocate, analytics, inequalities, probes
from .constellation import (
    ChannelModel,
    Constellation,
    MatrixScaling,
    ScalingVector,
    ValidationError,
    load_constellation,
)
from .integrate import IntegratorConfig

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_SELF_CHECK = 4

SEED_ENV_VAR = "ENTPOW_SEED"


@dataclass(frozen=True)
class RunConfig:
    """One resolved CLI invocation: the command, its validated inputs, and
    the integrator settings shared by every expectation it computes."""

    command: str
    constellation: Constellation | None
    lam: np.ndarray | None
    matrix: np.ndarray | None
    integrator: IntegratorConfig
    output: str | None
    csv_path: str | None

    def model(self) -> ChannelModel:
        if self.lam is not None:
            return ChannelModel(self.constellation, ScalingVector(self.lam))
        if self.matrix is not None:
            return ChannelModel(self.constellation, MatrixScaling.from_matrix(self.matrix))
        raise ValidationError("a scaling is required (--lambda or --t-file)")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def _parse_lambda(arg: str | None, path: str | None):
    if arg is not None and path is not None:
        raise ValidationError("give the powers inline or via file, not both")
    if arg is not None:
        try:
            return np.array([float(tok) for tok in arg.split(",") if tok.strip() != ""])
        except ValueError as exc:
            raise ValidationError(f"cannot parse powers {arg!r}") from exc
    if path is not None:
        raw = _load_json(path)
        if isinstance(raw, dict):
            raw = raw.get("lambda")
        if raw is None:
            raise ValidationError(f"no powers found in {path}")
        return np.asarray(raw, dtype=float)
    return None


def _load_json(path: str):
    if not os.path.exists(path):
        raise ValidationError(f"file not found: {path}")
    with open(path) as fh:
        return json.load(fh)


def _load_matrix(path: str):
    raw = _load_json(path)
    if isinstance(raw, dict):
        raw = raw.get("t")
    if raw is None:
        raise ValidationError(f"no scaling matrix found in {path}")
    return np.asarray(raw, dtype=float)


def _integrator_from(args, dimension: int | None) -> IntegratorConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    kwargs = dict(seed=seed, target_tolerance=args.tol)
    if args.order is not None:
        kwargs["order"] = args.order
    if args.samples is not None:
        kwargs["samples"] = args.samples
    if args.method is not None:
        kwargs["method"] = args.method.replace("-", "_")
        return IntegratorConfig(**kwargs)
    if dimension is None:
        return IntegratorConfig(**kwargs)
    return IntegratorConfig.for_dimension(dimension, **kwargs)


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):  # before int: bool subclasses int
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _emit_json(payload, output: str | None):
    text = json.dumps(_jsonify(payload), indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json_lines(rows, output: str | None):
    text = "".join(json.dumps(_jsonify(row), sort_keys=True) + "\n" for row in rows)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, fieldnames, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _integrator_payload(cfg: IntegratorConfig) -> dict:
    return {
        "method": cfg.method,
        "order": cfg.order,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "target_tolerance": cfg.target_tolerance,
    }


def _resolve_run(args, command: str) -> RunConfig:
    con = load_constellation(args.constellation)
    lam = _parse_lambda(args.lam, args.lambda_file)
    matrix = _load_matrix(args.t_file) if getattr(args, "t_file", None) else None
    if lam is not None and matrix is not None:
        raise ValidationError("give per-component powers or a scaling matrix, not both")
    if lam is None and matrix is None:
        raise ValidationError("a scaling is required (--lambda or --t-file)")
    if lam is not None and lam.shape[0] != con.dimension:
        raise ValidationError(
            f"powers have length {lam.shape[0]} but the constellation "
            f"has dimension {con.dimension}"
        )
    return RunConfig(
        command=command,
        constellation=con,
        lam=lam,
        matrix=matrix,
        integrator=_integrator_from(args, con.dimension),
        output=args.output,
        csv_path=getattr(args, "csv", None),
    )


def cmd_entropy(args) -> int:
    run = _resolve_run(args, "entropy")
    con, model, cfg = run.constellation, run.model(), run.integrator
    report = analytics.differential_entropy(model, cfg)
    payload = {
        "command": "entropy",
        "dimension": con.dimension,
        "integrator": _integrator_payload(cfg),
        "entropy": report.entropy,
        "entropy_power": report.entropy_power,
        "mutual_information": report.mutual_information,
        "error_estimate": report.error_estimate,
        "tolerance_met": report.tolerance_met,
    }
    if model.is_diagonal:
        payload["lambda"] = model.scaling.lam
    else:
        payload["scaling_matrix"] = model.scaling.t

    if args.sweep_to is not None:
        if not model.is_diagonal:
            raise ValidationError("sweeps are defined for per-component powers only")
        if run.csv_path is None:
            raise ValidationError("--sweep-to needs --csv for the row output")
        lam_b = np.array([float(tok) for tok in args.sweep_to.split(",")])
        if lam_b.shape[0] != con.dimension:
            raise ValidationError("sweep endpoint dimension mismatch")
        ts = np.linspace(0.0, 1.0, args.sweep_points)
        grid = [(1 - t) * model.scaling.lam + t * lam_b for t in ts]
        rows = analytics.lambda_sweep(con, grid, cfg)
        _write_csv(run.csv_path, list(rows[0].keys()), rows)
        payload["sweep_csv"] = run.csv_path
        payload["sweep_points"] = args.sweep_points

    _emit_json(payload, run.output)
    return EXIT_OK if report.tolerance_met else EXIT_BUDGET


def cmd_hessian(args) -> int:
    run = _resolve_run(args, "hessian")
    con, model, cfg = run.constellation, run.model(), run.integrator
    if not model.is_diagonal:
        raise ValidationError("hessian reports are defined for per-component powers")
    report = analytics.entropy_power_hessian(model, cfg)
    fd_block = analytics.fd_residual_block(model, cfg) if args.check_fd else None
    payload = {
        "command": "hessian",
        "dimension": con.dimension,
        "lambda": model.scaling.lam,
        "integrator": _integrator_payload(cfg),
        "entropy": report.entropy,
        "entropy_power": report.entropy_power,
        "gradient_h": report.gradient_h,
        "hessian_h": report.hessian_h,
        "hessian_n": report.hessian_n,
        "max_eigenvalue_h": report.max_eigenvalue_h,
        "max_eigenvalue_n": report.max_eigenvalue_n,
        "error_estimate": report.error_estimate,
        "tolerance_met": report.tolerance_met,
        "fd_residuals": fd_block,
    }
    _emit_json(payload, run.output)
    if fd_block is not None and not fd_block["passed"]:
        return EXIT_SELF_CHECK
    return EXIT_OK if report.tolerance_met else EXIT_BUDGET


def cmd_verify_lemmas(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    rows = inequalities.verify_claims(trials=args.trials, seed=seed, max_dim=args.max_dim)
    _emit_json_lines(rows, args.output)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_SELF_CHECK


def _probe_payload(probe: probes.SegmentProbe) -> dict:
    return {
        "mode": probe.kind,
        "grid": int(probe.ts.shape[0]),
        "t_start": float(probe.ts[0]),
        "t_end": float(probe.ts[-1]),
        "min_second_difference": probe.min_second_difference,
        "max_second_difference": probe.max_second_difference,
        "violation": probe.violation,
        "violation_index": probe.violation_index,
    }


def _probe_csv_rows(probe: probes.SegmentProbe):
    rows = []
    sd = [""] + [f"{v!r}" for v in probe.second_differences] + [""]
    for i, t in enumerate(probe.ts):
        rows.append(
            {
                "t": repr(float(t)),
                "entropy_power": repr(float(probe.values[i])),
                "second_difference": sd[i],
            }
        )
    return rows


def cmd_probe(args) -> int:
    con = load_constellation(args.constellation)
    cfg = _integrator_from(args, con.dimension)

    if args.mode == "diagonal":
        lam_a = _parse_lambda(args.lambda_a, None)
        lam_b = _parse_lambda(args.lambda_b, None)
        if lam_a is None or lam_b is None:
            raise ValidationError("diagonal mode needs --lambda-a and --lambda-b")
        probe = probes.probe_diagonal_segment(con, lam_a, lam_b, args.grid, cfg)
    elif args.mode in ("scalar-signal", "scalar-noise"):
        lam0 = _parse_lambda(args.lam, args.lambda_file)
        if lam0 is None:
            raise ValidationError("scalar modes need --lambda for the base powers")
        mode = args.mode.split("-")[1]
        t_min = args.t_min if args.t_min is not None else (0.1 if mode == "noise" else 0.0)
        probe = probes.probe_scalar_costa(con, lam0, mode, args.t_max, args.grid, cfg, t_min)
    elif args.mode == "matrix":
        if args.t_file_a and args.t_file_b:
            probe = probes.probe_matrix_segment(
                con, _load_matrix(args.t_file_a), _load_matrix(args.t_file_b), args.grid, cfg
            )
        else:
            seed = args.seed if args.seed is not None else _default_seed()
            pair_probes, findings = probes.search_matrix_counterexample(
                con, args.pairs, args.grid, cfg, seed=seed
            )
            payload = {
                "command": "probe",
                "mode": "matrix-search",
                "pairs": [
                    dict(_probe_payload(p), pair=i) for i, p in enumerate(pair_probes)
                ],
                "findings": findings,
                "integrator": _integrator_payload(cfg),
            }
            _emit_json(payload, args.output)
            return EXIT_OK
    else:
        raise ValidationError(f"unknown probe mode: {args.mode!r}")

    payload = dict(_probe_payload(probe), command="probe", integrator=_integrator_payload(cfg))
    if args.csv:
        _write_csv(args.csv, ["t", "entropy_power", "second_difference"], _probe_csv_rows(probe))
        payload["csv"] = args.csv
    _emit_json(payload, args.output)
    if probe.violation and args.mode != "matrix":
        # a violation along a per-component path contradicts the concavity
        # certificate, so it is a self-check failure rather than a finding
        return EXIT_SELF_CHECK
    return EXIT_OK


def cmd_optimize(args) -> int:
    con = load_constellation(args.constellation)
    cfg = _integrator_from(args, con.dimension)
    result = allocate.optimize_power_allocation(
        con, args.power, cfg, tol=args.opt_tol, max_iter=args.max_iter, newton=args.newton
    )
    payload = {
        "command": "optimize",
        "power": args.power,
        "lambda_star": result.lam,
        "mutual_information": result.mutual_information,
        "iterations": result.iterations,
        "kkt_residual": result.kkt_residual,
        "gradient": result.gradient,
        "converged": result.converged,
        "integrator": _integrator_payload(cfg),
    }
    _emit_json(payload, args.output)
    return EXIT_OK


def _add_integrator_flags(sub):
    sub.add_argument("--method", choices=["quadrature", "monte-carlo"], default=None)
    sub.add_argument("--order", type=int, default=None, help="quadrature nodes per axis")
    sub.add_argument("--samples", type=int, default=None, help="Monte Carlo draws")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--tol", type=float, default=1e-3, help="target absolute tolerance")


def _add_scaling_flags(sub, with_matrix=True):
    sub.add_argument("--lambda", dest="lam", default=None, help="powers, e.g. 0.7,1.3")
    sub.add_argument("--lambda-file", default=None, help="JSON file with the powers")
    if with_matrix:
        sub.add_argument("--t-file", default=None, help="JSON file with a scaling matrix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entpow",
        description="Entropy-power analytics for finite-alphabet signals in white Gaussian noise.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("entropy", help="entropy / entropy power / mutual information report")
    p.add_argument("--constellation", required=True)
    _add_scaling_flags(p)
    _add_integrator_flags(p)
    p.add_argument("--output", default=None)
    p.add_argument("--sweep-to", default=None, help="sweep endpoint powers, e.g. 4,4")
    p.add_argument("--sweep-points", type=int, default=17)
    p.add_argument("--csv", default=None, help="CSV path for the sweep rows")
    p.set_defaults(func=cmd_entropy)

    p = subs.add_parser("hessian", help="gradient/Hessian report with definiteness certificates")
    p.add_argument("--constellation", required=True)
    _add_scaling_flags(p, with_matrix=False)
    _add_integrator_flags(p)
    p.add_argument("--check-fd", action="store_true", help="add finite-difference residuals")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_hessian, t_file=None)

    p = subs.add_parser("verify-lemmas", help="randomized matrix-inequality suite")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-dim", type=int, default=8)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_verify_lemmas)

    p = subs.add_parser("probe", help="concavity probes along scaling paths")
    p.add_argument("--constellation", required=True)
    p.add_argument(
        "--mode",
        required=True,
        choices=["diagonal", "scalar-signal", "scalar-noise", "matrix"],
    )
    _add_scaling_flags(p, with_matrix=False)
    p.add_argument("--lambda-a", default=None)
    p.add_argument("--lambda-b", default=None)
    p.add_argument("--t-file-a", default=None)
    p.add_argument("--t-file-b", default=None)
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=4.0)
    p.add_argument("--grid", type=int, default=17)
    p.add_argument("--pairs", type=int, default=8, help="random pairs for the matrix search")
    _add_integrator_flags(p)
    p.add_argument("--csv", default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_probe)

    p = subs.add_parser("optimize", help="concave power allocation under a total budget")
    p.add_argument("--constellation", required=True)
    p.add_argument("--power", type=float, required=True)
    p.add_argument("--opt-tol", type=float, default=1e-6, help="KKT residual target")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--newton", action="store_true")
    _add_integrator_flags(p)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_optimize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def console_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    console_entry()
