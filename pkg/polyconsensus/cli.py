"""Command-line entry point: certify, verify, simulate, example, schema, serve."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from polyconsensus.core.config import settings
from polyconsensus.core.errors import PolyConsensusError
from polyconsensus.core.logging import configure_logging
from polyconsensus.core.schemas import ModelConfig
from polyconsensus import pipeline
from polyconsensus.sdp import SolverOptions

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 2
EXIT_DIVERGED = 3


def _write_json(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_certify(args: argparse.Namespace) -> int:
    config = pipeline.load_config(args.config)
    defaults = config.method
    model = pipeline.build_model(config)
    options = SolverOptions(
        method=args.solver,
        max_iters=args.max_iters,
        seed=args.seed,
        export_path=Path(args.export) if args.export else None,
    )
    outcome = pipeline.certify(
        model,
        method=args.method or defaults.method,
        l=args.l or defaults.l,
        epsilon=defaults.epsilon if args.epsilon is None else args.epsilon,
        margin=defaults.margin if args.margin is None else args.margin,
        margin_neg=defaults.margin_neg if args.margin_neg is None else args.margin_neg,
        tol_verify=defaults.tol_verify if args.tol_verify is None else args.tol_verify,
        options=options,
        model_hash=config.content_hash(),
    )
    _write_json(outcome.certificate.model_dump_json(indent=2), args.out)

    if outcome.status == "certified":
        print(f"✅ certified and verified: margin {outcome.result.margin:.3g} ({outcome.result.solver})", file=sys.stderr)
        return EXIT_OK
    detail = outcome.result.message or outcome.result.solver
    if outcome.report is not None and not outcome.report.passed:
        detail += f"; verification worst violation {outcome.report.worst_violation:.3g}"
    print(f"⚠️ {outcome.status}: {detail}", file=sys.stderr)
    return EXIT_NOT_CERTIFIED


def cmd_verify(args: argparse.Namespace) -> int:
    config = pipeline.load_config(args.config)
    certificate = pipeline.load_certificate(args.cert)
    model = pipeline.build_model(config)
    tol = config.method.tol_verify if args.tol_verify is None else args.tol_verify
    report, mismatch = pipeline.verify(model, certificate, tol, config.content_hash())
    _write_json(report.model_dump_json(indent=2), args.out)

    if mismatch:
        print("⚠️ certificate model hash does not match this config", file=sys.stderr)
    print(
        f"positivity worst min-eig {report.worst_positivity_min:.6g}, dissipation worst max-eig {report.worst_dissipation_max:.6g}",
        file=sys.stderr,
    )
    if report.passed:
        print("✅ verification passed", file=sys.stderr)
        return EXIT_OK
    print(f"❌ verification failed: worst violation {report.worst_violation:.3g}", file=sys.stderr)
    return EXIT_NOT_CERTIFIED


def cmd_simulate(args: argparse.Namespace) -> int:
    config = pipeline.load_config(args.config)
    model = pipeline.build_model(config)
    certificate = pipeline.load_certificate(args.cert) if args.cert else None
    trace, metadata = pipeline.simulate(
        model,
        certificate,
        dt=args.dt,
        t_final=args.t_final,
        seed=args.seed,
        amplitude=args.amplitude,
        witness_stride=args.witness_stride,
        model_hash=config.content_hash(),
    )
    pipeline.write_trace(trace, metadata, args.out)

    summary = (
        f"disagreement {metadata.initial_disagreement:.4g} -> {metadata.final_disagreement:.4g}"
    )
    if metadata.v_ratio is not None:
        summary += f", V(t_final)/V(0) = {metadata.v_ratio:.3g}"
    if metadata.witness_fraction is not None:
        summary += f", witness {100 * metadata.witness_fraction:.1f}%"
    if metadata.diverged:
        print(f"❌ diverged after {metadata.steps} steps; partial trace in {args.out}", file=sys.stderr)
        return EXIT_DIVERGED
    print(f"✅ {summary}", file=sys.stderr)
    return EXIT_OK


def cmd_example(args: argparse.Namespace) -> int:
    config = pipeline.example_config(args.name, classical=args.classical)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{config.name}.json"
    path.write_text(config.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8")
    print(f"✅ wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_schema(args: argparse.Namespace) -> int:
    _write_json(json.dumps(ModelConfig.model_json_schema(), indent=2), args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("polyconsensus.main:app", host=args.host, port=args.port, log_level=settings.log_level.lower())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyconsensus",
        description="Consensus certificates for networks of polynomial agents",
    )
    parser.add_argument("--log-level", default=None, help="overrides POLYCONSENSUS_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="search for and verify a consensus certificate")
    p.add_argument("--config", required=True)
    p.add_argument("--method", choices=["theorem1", "theorem2"], default=None)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--margin", type=float, default=None)
    p.add_argument("--margin-neg", type=float, default=None)
    p.add_argument("--solver", choices=["cvxpy", "builtin", "sdpa-export"], default=settings.default_solver)
    p.add_argument("--tol-verify", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--export", default=None, help="SDPA .dat-s path for --solver sdpa-export")
    p.add_argument("--out", default=None, help="certificate JSON path (stdout if omitted)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="recheck a certificate against a model")
    p.add_argument("--config", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--tol-verify", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="integrate the network with RK4")
    p.add_argument("--config", required=True)
    p.add_argument("--cert", default=None)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-final", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=2.0)
    p.add_argument("--witness-stride", type=int, default=10)
    p.add_argument("--out", required=True, help="trace CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("example", help="write a built-in model config")
    p.add_argument("name", choices=["vdp", "lorenz"])
    p.add_argument("--out", default=".")
    p.add_argument("--classical", action="store_true", help="Van der Pol with mu (1 - x^2) y")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("schema", help="print the model config JSON schema")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_schema)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except PolyConsensusError as exc:
        print(f"❌ {exc.kind} error: {exc.message}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
