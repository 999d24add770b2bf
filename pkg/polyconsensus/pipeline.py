"""Orchestration shared by the command line and the HTTP routers."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from polyconsensus.core.config import settings
from polyconsensus.core.errors import ConfigError, InputError
from polyconsensus.core.schemas import (
    Certificate,
    MethodDefaults,
    ModelConfig,
    PatternSpec,
    TermSpec,
    TraceMetadata,
    VerificationReport,
)
from polyconsensus.dynamics import (
    FormationModel,
    PolynomialTerm,
    PolynomialVectorField,
    SimulationTrace,
    oscillator_network,
    disagreement,
    field_from_terms,
    infer_degree,
    random_initial_state,
    rk4_simulate,
    witness_fraction,
)
from polyconsensus.lmi import assemble_theorem1, assemble_theorem2
from polyconsensus.pattern import PatternMatrix, cycle_laplacian, from_edge_list
from polyconsensus.polybasis import build_slack_basis
from polyconsensus.sdp import (
    FeasibilityProblem,
    SolveResult,
    SolverOptions,
    certificate_from_solution,
    solve,
    verify_certificate,
)

logger = logging.getLogger(__name__)


# ==================================================================
# CONFIG LOADING
# ==================================================================

def _validation_message(exc: ValidationError, source: str) -> str:
    lines = [f"{source}: {exc.error_count()} schema error(s)"]
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<root>"
        lines.append(f"  {location}: {error['msg']}")
    return "\n".join(lines)


def parse_config(data: Union[str, dict], source: str = "<config>") -> ModelConfig:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
    try:
        return ModelConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_validation_message(exc, source), detail=exc.errors()) from exc


def load_config(path: Union[str, Path]) -> ModelConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))


def load_certificate(path: Union[str, Path]) -> Certificate:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read certificate {path}: {exc}") from exc
    try:
        return Certificate.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(_validation_message(exc, str(path)), detail=exc.errors()) from exc


# ==================================================================
# MODEL CONSTRUCTION
# ==================================================================

def build_pattern(spec: PatternSpec, N: int) -> PatternMatrix:
    if spec.matrix is not None:
        return PatternMatrix(np.array(spec.matrix, dtype=float))
    if spec.edges is not None:
        return from_edge_list(N, spec.edges)
    return cycle_laplacian(N, spec.weight)


def build_model(config: ModelConfig, zero_tol: Optional[float] = None) -> FormationModel:
    agent = [PolynomialTerm(t.row, t.coeff, tuple(t.powers)) for t in config.agent_terms]
    coupling = [PolynomialTerm(t.row, config.c * t.coeff, tuple(t.powers)) for t in config.coupling_terms]
    d = infer_degree(agent, coupling)
    pattern = build_pattern(config.pattern, config.N)
    model = FormationModel.build(
        field_from_terms(config.n, agent, d),
        field_from_terms(config.n, coupling, d),
        pattern,
        next(tol for tol in (zero_tol, config.method.zero_tol, settings.zero_tol) if tol is not None),
    )
    logger.info(
        "model %s: n=%d, N=%d, d=%d, rho=%d, eigenvalues %s",
        config.name or "<unnamed>", model.n, model.N, d, model.basis.rho,
        np.round(model.spectral.nonzero, 9).tolist(),
    )
    return model


def _terms_from_field(field: PolynomialVectorField, scale: float = 1.0) -> List[TermSpec]:
    terms = []
    for row, col in zip(*np.nonzero(field.A)):
        terms.append(TermSpec(
            row=int(row) + 1,
            coeff=float(field.A[row, col] / scale),
            powers=list(field.basis.exponents[col].powers),
        ))
    return terms


def example_config(name: str, classical: bool = False) -> ModelConfig:
    """Built-in oscillator networks with their published parameters."""
    if name == "vdp":
        c, mu, N = 15.0, 0.5, 10
        agent, coupling, _ = oscillator_network("vdp", c, N=N, mu=mu, classical=classical)
        return ModelConfig(
            name="vdp-classical" if classical else "vdp",
            n=2, N=N, variables=["x", "y"],
            agent_terms=_terms_from_field(agent),
            coupling_terms=_terms_from_field(coupling, c),
            c=c,
            pattern=PatternSpec(cycle=N),
            parameters={"mu": mu},
            method=MethodDefaults(method="theorem2", l=6),
        )
    if name == "lorenz":
        if classical:
            raise InputError("the classical variant only applies to the Van der Pol example")
        c, N = 50.0, 8
        sigma, rho_l, beta = 10.0, 28.0, 8.0 / 3.0
        agent, coupling, _ = oscillator_network(
            "lorenz", c, N=N, sigma=sigma, rho_l=rho_l, beta=beta
        )
        return ModelConfig(
            name="lorenz",
            n=3, N=N, variables=["x", "y", "z"],
            agent_terms=_terms_from_field(agent),
            coupling_terms=_terms_from_field(coupling, c),
            c=c,
            pattern=PatternSpec(cycle=N),
            parameters={"sigma": sigma, "rho": rho_l, "beta": beta},
            method=MethodDefaults(method="theorem1", l=6),
        )
    raise InputError(f"unknown example '{name}', expected 'vdp' or 'lorenz'")


# ==================================================================
# CERTIFY / VERIFY
# ==================================================================

@dataclass
class CertifyOutcome:
    status: str
    certificate: Certificate
    report: Optional[VerificationReport]
    result: SolveResult
    problem: FeasibilityProblem


def certify(
    model: FormationModel,
    *,
    method: str = "theorem1",
    l: int = 6,
    epsilon: Optional[float] = None,
    margin: Optional[float] = None,
    margin_neg: float = 0.0,
    tol_verify: Optional[float] = None,
    options: Optional[SolverOptions] = None,
    model_hash: Optional[str] = None,
) -> CertifyOutcome:
    epsilon = settings.default_epsilon if epsilon is None else epsilon
    margin = settings.default_margin if margin is None else margin
    tol_verify = settings.default_tol_verify if tol_verify is None else tol_verify
    options = options or SolverOptions(method=settings.default_solver)
    if l > model.N:
        logger.warning("⚠️ l=%d exceeds N=%d; the extra powers of the pattern add no freedom", l, model.N)

    slack = build_slack_basis(model.basis)
    spectral = model.spectral
    lambda_range = None
    if method == "theorem1":
        layout, blocks = assemble_theorem1(model.basis, slack, model.A_a, model.A_b, spectral, l, epsilon)
    elif method == "theorem2":
        lambda_range = (spectral.lambda_min, spectral.lambda_max)
        layout, blocks = assemble_theorem2(
            model.basis, slack, model.A_a, model.A_b, *lambda_range, l, epsilon
        )
    else:
        raise InputError(f"unknown method '{method}', expected theorem1 or theorem2")

    problem = FeasibilityProblem(layout, tuple(blocks), margin_pos=margin, margin_neg=margin_neg)

    def issue(result: SolveResult) -> Certificate:
        return certificate_from_solution(
            layout, problem, result,
            method=method, epsilon=epsilon,
            eigenvalues=spectral.distinct_nonzero(),
            lambda_range=lambda_range,
            model_hash=model_hash,
        )

    def recheck(certificate: Certificate) -> VerificationReport:
        return verify_certificate(certificate, model.basis, slack, model.A_a, model.A_b, spectral, tol_verify)

    result = solve(problem, options, accept=lambda candidate: recheck(issue(candidate)).passed)
    certificate = issue(result)
    report = recheck(certificate) if result.y is not None else None
    status = result.status
    if status == "certified" and not (report and report.passed):
        logger.warning(
            "⚠️ solver reported a margin of %.3g but independent verification failed; downgrading to unknown",
            result.margin,
        )
        status = "unknown"
        certificate = certificate.model_copy(update={"status": status})
    logger.info("certify %s: %s (margin %.3g, %s)", method, status, result.margin, result.solver)
    return CertifyOutcome(status=status, certificate=certificate, report=report, result=result, problem=problem)


def verify(
    model: FormationModel,
    certificate: Certificate,
    tol_verify: Optional[float] = None,
    model_hash: Optional[str] = None,
) -> Tuple[VerificationReport, bool]:
    tol_verify = settings.default_tol_verify if tol_verify is None else tol_verify
    mismatch = bool(certificate.model_hash and model_hash and certificate.model_hash != model_hash)
    if mismatch:
        logger.warning(
            "⚠️ certificate was issued for model %s…, checking it against %s…",
            certificate.model_hash[:12], model_hash[:12],
        )
    slack = build_slack_basis(model.basis)
    report = verify_certificate(
        certificate, model.basis, slack, model.A_a, model.A_b, model.spectral, tol_verify
    )
    return report, mismatch


# ==================================================================
# SIMULATION
# ==================================================================

def simulate(
    model: FormationModel,
    certificate: Optional[Certificate] = None,
    *,
    dt: float = 1e-3,
    t_final: float = 10.0,
    seed: int = 0,
    amplitude: float = 2.0,
    x0: Optional[np.ndarray] = None,
    witness_stride: int = 10,
    model_hash: Optional[str] = None,
) -> Tuple[SimulationTrace, TraceMetadata]:
    start = random_initial_state(model.n, model.N, seed, amplitude) if x0 is None else np.asarray(x0, dtype=float)
    trace = rk4_simulate(model, start, dt=dt, t_final=t_final, certificate=certificate)

    fraction = None
    if certificate is not None and not trace.diverged:
        fraction = witness_fraction(trace, model, certificate, certificate.epsilon, stride=witness_stride)
    metadata = TraceMetadata(
        seed=seed if x0 is None else None,
        dt=dt,
        t_final=t_final,
        steps=int(trace.times.size - 1),
        amplitude=amplitude if x0 is None else None,
        n=model.n,
        N=model.N,
        diverged=trace.diverged,
        model_hash=model_hash,
        certificate_hash=certificate.content_hash() if certificate is not None else None,
        initial_disagreement=float(trace.disagreement[0]),
        final_disagreement=float(trace.disagreement[-1]),
        v_ratio=trace.v_ratio,
        witness_fraction=fraction,
    )
    trace.metadata.update(metadata.model_dump())
    return trace, metadata


def trace_header(model_n: int, model_N: int, with_v: bool) -> List[str]:
    header = ["t"] + [f"x_{i}_{k}" for i in range(1, model_N + 1) for k in range(1, model_n + 1)]
    if with_v:
        header.append("V")
    header.append("disagreement")
    return header


def trace_rows(trace: SimulationTrace, stride: int = 1):
    for k in range(0, trace.times.size, max(1, stride)):
        row = [float(trace.times[k])] + trace.states[k].tolist()
        if trace.V is not None:
            row.append(float(trace.V[k]))
        row.append(float(trace.disagreement[k]))
        yield row


def write_trace(trace: SimulationTrace, metadata: TraceMetadata, csv_path: Union[str, Path]) -> Tuple[Path, Path]:
    """Trace CSV plus a `<csv>.meta.json` sidecar."""
    csv_path = Path(csv_path)
    meta_path = csv_path.with_name(csv_path.name + ".meta.json")
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(trace_header(metadata.n, metadata.N, trace.V is not None))
        for row in trace_rows(trace):
            writer.writerow(["%.17g" % value for value in row])
    meta_path.write_text(metadata.model_dump_json(indent=2), encoding="utf-8")
    logger.info("wrote trace %s (%d rows) and %s", csv_path, trace.times.size, meta_path.name)
    return csv_path, meta_path
