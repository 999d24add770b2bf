"""Max-margin LMI feasibility, SDPA sparse files, and independent certificate checks.

Every block is brought to the form sign * B(y) >= level * I, where sign is +1
for require-positive blocks and -1 for require-negative ones. Strict blocks use
level = t, the margin being maximised. Non-strict blocks use the fixed
level margin_neg. The decisions stay in the box |y_r| <= decision_bound. The
assembled pencils are homogeneous in y, so with margin_neg = 0 the box only
fixes a scale and an optimal t below the required margin means no certificate
exists. With margin_neg > 0 the box does cut the feasible set, and such an
outcome is reported as unknown.
"""
from __future__ import annotations

import logging
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Literal, Optional, Sequence, Tuple, Union

import cvxpy as cp
import numpy as np
from scipy import sparse
from scipy.optimize import minimize
from scipy.special import logsumexp

from polyconsensus.core.config import settings
from polyconsensus.core.errors import DimensionError, InputError, SolverError
from polyconsensus.core.schemas import BlockCheck, Certificate, VerificationReport
from polyconsensus.lmi import DecisionLayout, LmiBlock
from polyconsensus.pattern import SpectralData, jacobi_eigh
from polyconsensus.polybasis import MonomialBasis, SlackBasis

logger = logging.getLogger(__name__)

SolveStatus = Literal["certified", "unknown", "infeasible"]
SolverMethod = Literal["cvxpy", "builtin", "sdpa-export"]

MARGIN_CAP = 1.0

# tried in this order when no cvxpy backend is configured
BACKEND_PREFERENCE = ("CVXOPT", "CLARABEL", "SCS")

# per-backend spelling of the iteration limit
_CVXPY_ITER_KEYS = {"SCS": "max_iters", "CLARABEL": "max_iter", "CVXOPT": "max_iters", "ECOS": "max_iters"}


@dataclass(frozen=True)
class FeasibilityProblem:
    layout: DecisionLayout
    blocks: Tuple[LmiBlock, ...]
    margin_pos: float = 1e-6
    margin_neg: float = 0.0
    decision_bound: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise InputError("a feasibility problem needs at least one block")
        for block in self.blocks:
            if block.F.shape[0] != self.layout.size:
                raise DimensionError(
                    f"block {block.name} has {block.F.shape[0]} coefficients, layout has {self.layout.size} decisions"
                )
        if self.margin_pos < 0 or self.margin_neg < 0 or self.decision_bound <= 0:
            raise InputError("margins must be non-negative and the decision bound positive")

    @property
    def m(self) -> int:
        return self.layout.size

    @property
    def homogeneous(self) -> bool:
        return self.margin_neg == 0.0

    @property
    def strict_blocks(self) -> List[LmiBlock]:
        return [b for b in self.blocks if b.strict]

    @property
    def loose_blocks(self) -> List[LmiBlock]:
        return [b for b in self.blocks if not b.strict]


@dataclass(frozen=True)
class SolverOptions:
    method: SolverMethod = "cvxpy"
    max_iters: int = 2000
    tol: float = 1e-8
    seed: int = 0
    export_path: Optional[Path] = None
    cvxpy_solver: Optional[str] = None


@dataclass
class SolveResult:
    status: SolveStatus
    y: Optional[np.ndarray]
    margin: float
    iterations: Optional[int]
    solver: str
    message: str = ""
    export_path: Optional[Path] = None


Acceptance = Callable[[SolveResult], bool]


def measure(problem: FeasibilityProblem, y: np.ndarray) -> Tuple[float, float]:
    """(smallest strict eigenvalue, smallest non-strict eigenvalue) of the signed blocks at y."""
    strict, loose = MARGIN_CAP, np.inf
    for block in problem.blocks:
        smallest = float(np.linalg.eigvalsh(block.sign * block.value(y))[0])
        if block.strict:
            strict = min(strict, smallest)
        else:
            loose = min(loose, smallest)
    return strict, loose


def _classify(problem: FeasibilityProblem, y: np.ndarray, options: SolverOptions) -> Tuple[SolveStatus, float]:
    margin, loose = measure(problem, y)
    if margin >= problem.margin_pos and loose >= problem.margin_neg - options.tol:
        return "certified", margin
    return "unknown", margin


def solve(problem: FeasibilityProblem, options: Optional[SolverOptions] = None,
          accept: Optional[Acceptance] = None) -> SolveResult:
    """Run the configured solver.

    `accept` gets every certified cvxpy answer; a rejected one sends the
    problem on to the next backend in the chain.
    """
    options = options or SolverOptions()
    logger.info(
        "solving %d blocks over %d decisions with %s", len(problem.blocks), problem.m, options.method
    )
    if options.method == "cvxpy":
        return _solve_cvxpy(problem, options, accept)
    if options.method == "builtin":
        return _solve_builtin(problem, options)
    if options.method == "sdpa-export":
        return _solve_sdpa(problem, options)
    raise InputError(f"unknown solver method '{options.method}'")


# ----------------------------------------------------------------------------
# cvxpy
# ----------------------------------------------------------------------------

def _cvxpy_block(block: LmiBlock, y: cp.Variable) -> cp.Expression:
    s = block.size
    coefficients = sparse.csr_matrix(block.F.reshape(block.F.shape[0], s * s).T)
    expr = block.sign * (block.F0 + cp.reshape(coefficients @ y, (s, s), order="C"))
    return (expr + expr.T) / 2


def cvxpy_backends(options: SolverOptions) -> List[Optional[str]]:
    """Backends to try in order; a configured backend is used alone."""
    pinned = options.cvxpy_solver or settings.cvxpy_solver
    if pinned is not None:
        return [pinned]
    installed = set(cp.installed_solvers())
    chain: List[Optional[str]] = [name for name in BACKEND_PREFERENCE if name in installed]
    return chain or [None]


def _solve_with(program: cp.Problem, backend: Optional[str], options: SolverOptions) -> None:
    kwargs = {}
    if backend is not None:
        kwargs["solver"] = backend
        key = backend.upper()
        if key in _CVXPY_ITER_KEYS:
            kwargs[_CVXPY_ITER_KEYS[key]] = options.max_iters
        if key == "SCS":
            # first-order method: tight tolerances need a larger iteration budget
            kwargs.update(eps_abs=options.tol, eps_rel=options.tol, max_iters=max(options.max_iters, 100_000))
    program.solve(**kwargs)


def _backend_verdict(problem: FeasibilityProblem, options: SolverOptions, program: cp.Problem,
                     y: cp.Variable, t: cp.Variable, accept: Optional[Acceptance]) -> Tuple[SolveResult, bool]:
    """One backend's answer, and whether it settles the problem."""
    stats = program.solver_stats
    name = f"cvxpy/{stats.solver_name}" if stats is not None and stats.solver_name else "cvxpy"
    iterations = stats.num_iters if stats is not None else None
    status = program.status
    logger.info("%s finished with status %s, t=%s", name, status, t.value)

    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        if problem.homogeneous:
            result = SolveResult("infeasible", None, float("nan"), iterations, name, message=f"backend status {status}")
            return result, status == cp.INFEASIBLE
        message = f"backend status {status} at margin_neg={problem.margin_neg:g}; a larger scale may be feasible"
        return SolveResult("unknown", None, float("nan"), iterations, name, message=message), False
    if y.value is None:
        return SolveResult("unknown", None, float("nan"), iterations, name, message=f"backend status {status}"), False

    y_star = np.array(y.value, dtype=float)
    verdict, margin = _classify(problem, y_star, options)
    result = SolveResult(verdict, y_star, margin, iterations, name, message=f"backend status {status}")
    if verdict == "certified":
        if accept is not None and not accept(result):
            result.status = "unknown"
            result.message = f"backend status {status}; certificate failed independent verification"
            return result, False
        return result, True

    t_star = float(t.value) if t.value is not None else float("nan")
    if problem.homogeneous and status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) and t_star < problem.margin_pos:
        result.status = "infeasible"
        result.message = f"optimal margin t*={t_star:.3g} below the required {problem.margin_pos:.3g} (status {status})"
        return result, status == cp.OPTIMAL
    return result, False


def _solve_cvxpy(problem: FeasibilityProblem, options: SolverOptions,
                 accept: Optional[Acceptance] = None) -> SolveResult:
    y = cp.Variable(problem.m)
    t = cp.Variable()
    constraints = [cp.norm(y, "inf") <= problem.decision_bound, t <= MARGIN_CAP]
    for block in problem.blocks:
        level = t if block.strict else problem.margin_neg
        constraints.append(_cvxpy_block(block, y) - level * np.eye(block.size) >> 0)
    program = cp.Problem(cp.Maximize(t), constraints)

    backends = cvxpy_backends(options)
    pinned = options.cvxpy_solver or settings.cvxpy_solver
    answers: List[SolveResult] = []
    for position, backend in enumerate(backends, start=1):
        label = backend or "default"
        try:
            _solve_with(program, backend, options)
        except cp.error.SolverError as exc:
            logger.warning("⚠️ cvxpy backend %s failed: %s", label, exc)
            answers.append(SolveResult("unknown", None, float("nan"), None, f"cvxpy/{label}", message=str(exc)))
            continue
        except ValueError as exc:
            if pinned is not None:
                raise SolverError(f"cvxpy rejected the solver configuration: {exc}") from exc
            logger.warning("⚠️ cvxpy backend %s rejected the problem: %s", label, exc)
            answers.append(SolveResult("unknown", None, float("nan"), None, f"cvxpy/{label}", message=str(exc)))
            continue
        result, settled = _backend_verdict(problem, options, program, y, t, accept)
        if settled:
            return result
        answers.append(result)
        if position < len(backends):
            logger.info("%s left the problem open (%s), trying the next backend", result.solver, result.message)

    # nothing settled: an infeasibility report beats an open answer, a point beats none
    ranked = sorted(answers, key=lambda a: (a.status == "infeasible", a.y is not None))
    return ranked[-1]


# ----------------------------------------------------------------------------
# Built-in smoothed min-eigenvalue ascent
# ----------------------------------------------------------------------------

_SMOOTHING = (1e-1, 1e-2, 1e-3)
_PENALTY = 1e3


def _builtin_objective(problem: FeasibilityProblem, mu: float):
    def objective(y: np.ndarray) -> Tuple[float, np.ndarray]:
        strict_values, strict_grads = [], []
        penalty, penalty_grad = 0.0, np.zeros_like(y)
        for block in problem.blocks:
            values, vectors = np.linalg.eigh(block.sign * block.value(y))
            # d lambda_i / d y_r = v_i^T (sign F_r) v_i
            grads = block.sign * np.einsum("ai,rab,bi->ir", vectors, block.F, vectors, optimize=True)
            if block.strict:
                strict_values.append(values)
                strict_grads.append(grads)
            else:
                shortfall = np.maximum(0.0, problem.margin_neg - values)
                penalty += _PENALTY * float(shortfall @ shortfall)
                penalty_grad -= 2.0 * _PENALTY * shortfall @ grads
        if not strict_values:
            return penalty, penalty_grad
        values = np.concatenate(strict_values)
        grads = np.vstack(strict_grads)
        softmin = -mu * logsumexp(-values / mu)
        weights = np.exp(-values / mu - logsumexp(-values / mu))
        return -softmin + penalty, -(weights @ grads) + penalty_grad

    return objective


def _solve_builtin(problem: FeasibilityProblem, options: SolverOptions) -> SolveResult:
    rng = np.random.default_rng(options.seed)
    y = rng.uniform(-0.01, 0.01, size=problem.m) * problem.decision_bound
    bounds = [(-problem.decision_bound, problem.decision_bound)] * problem.m
    budget = max(1, options.max_iters // len(_SMOOTHING))
    iterations = 0
    for mu in _SMOOTHING:
        result = minimize(
            _builtin_objective(problem, mu), y, jac=True, method="L-BFGS-B", bounds=bounds,
            options={"maxiter": budget, "gtol": options.tol},
        )
        y = result.x
        iterations += int(result.nit)
        logger.debug("builtin mu=%g: objective %.6g after %d iterations", mu, result.fun, result.nit)

    verdict, margin = _classify(problem, y, options)
    message = "margin reached" if verdict == "certified" else "iteration budget spent without the required margin"
    return SolveResult(verdict, y, margin, iterations, "builtin", message=message)


# ----------------------------------------------------------------------------
# SDPA sparse format
# ----------------------------------------------------------------------------

@dataclass
class SdpaData:
    """Primal SDPA data: minimise c.x subject to sum_i x_i F_i - F_0 >= 0 blockwise."""
    c: np.ndarray
    block_sizes: List[int]
    F0: List[np.ndarray]
    F: List[np.ndarray] = field(default_factory=list)     # per block: (m, s, s)

    @property
    def m(self) -> int:
        return self.c.shape[0]

    def slack(self, x: np.ndarray) -> List[np.ndarray]:
        return [np.tensordot(x, Fi, axes=1) - F0 for F0, Fi in zip(self.F0, self.F)]


def to_sdpa(problem: FeasibilityProblem, with_box: bool = True) -> SdpaData:
    """Variables x = (y, t); the objective minimises -t."""
    m = problem.m + 1
    c = np.zeros(m)
    c[-1] = -1.0
    sizes, F0s, Fs = [], [], []
    for block in problem.blocks:
        s = block.size
        F = np.zeros((m, s, s))
        F[:-1] = block.sign * block.F
        if block.strict:
            F[-1] = -np.eye(s)
            F0 = -block.sign * block.F0
        else:
            F0 = -block.sign * block.F0 + problem.margin_neg * np.eye(s)
        sizes.append(s)
        F0s.append(F0)
        Fs.append(F)

    if with_box:
        # bound - y_r >= 0, y_r + bound >= 0, cap - t >= 0 on one diagonal block
        size = 2 * problem.m + 1
        F = np.zeros((m, size, size))
        for r in range(problem.m):
            F[r, r, r] = -1.0
            F[r, problem.m + r, problem.m + r] = 1.0
        F[-1, -1, -1] = -1.0
        F0 = -np.diag(np.r_[np.full(2 * problem.m, problem.decision_bound), MARGIN_CAP])
        sizes.append(-size)
        F0s.append(F0)
        Fs.append(F)
    return SdpaData(c=c, block_sizes=sizes, F0=F0s, F=Fs)


def export_sdpa(problem: FeasibilityProblem, path: Union[str, Path], with_box: bool = True) -> Path:
    data = to_sdpa(problem, with_box)
    path = Path(path)
    lines = [
        f'"polyconsensus max-margin problem: {len(problem.blocks)} LMI blocks, {problem.m} decisions + margin"',
        str(data.m),
        str(len(data.block_sizes)),
        " ".join(str(s) for s in data.block_sizes),
        " ".join("%.17g" % value for value in data.c),
    ]
    for block_no, (F0, F) in enumerate(zip(data.F0, data.F), start=1):
        for mat_no, matrix in enumerate([F0] + list(F)):
            rows, cols = np.nonzero(np.triu(matrix))
            for i, j in zip(rows, cols):
                lines.append("%d %d %d %d %.17g" % (mat_no, block_no, i + 1, j + 1, matrix[i, j]))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise SolverError(f"cannot write SDPA file {path}: {exc}") from exc
    logger.info("wrote SDPA problem to %s (%d entries)", path, len(lines) - 5)
    return path


def _numbers(line: str) -> List[float]:
    return [float(token) for token in re.split(r"[\s,{}()]+", line.strip()) if token]


def read_sdpa(path: Union[str, Path]) -> SdpaData:
    try:
        raw = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SolverError(f"cannot read SDPA file {path}: {exc}") from exc
    lines = [line for line in raw if line.strip() and line.lstrip()[0] not in '"*']
    try:
        m = int(_numbers(lines[0])[0])
        nblocks = int(_numbers(lines[1])[0])
        sizes = [int(v) for v in _numbers(lines[2])]
        c = np.array(_numbers(lines[3]))
    except (IndexError, ValueError) as exc:
        raise SolverError(f"malformed SDPA header in {path}: {exc}") from exc
    if len(sizes) != nblocks or c.shape != (m,):
        raise SolverError(f"SDPA header of {path} is inconsistent: {nblocks} blocks {sizes}, m={m}, c={c.size}")

    dims = [abs(s) for s in sizes]
    F0 = [np.zeros((s, s)) for s in dims]
    F = [np.zeros((m, s, s)) for s in dims]
    for number, line in enumerate(lines[4:], start=5):
        values = _numbers(line)
        if len(values) != 5:
            raise SolverError(f"{path}: entry line {number} has {len(values)} fields, expected 5")
        mat_no, block_no, i, j = (int(v) for v in values[:4])
        if not (0 <= mat_no <= m and 1 <= block_no <= nblocks):
            raise SolverError(f"{path}: entry line {number} references matrix {mat_no} block {block_no}")
        target = F0[block_no - 1] if mat_no == 0 else F[block_no - 1][mat_no - 1]
        target[i - 1, j - 1] = target[j - 1, i - 1] = values[4]
    return SdpaData(c=c, block_sizes=sizes, F0=F0, F=F)


def import_sdpa_solution(path: Union[str, Path], m: int) -> Tuple[np.ndarray, float]:
    """Read x = (y, t) from an SDPA (xVec) or CSDP (first line) solution file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SolverError(f"cannot read solver output {path}: {exc}") from exc
    if "xVec" in text:
        match = re.search(r"xVec\s*=\s*\{([^}]*)\}", text)
        if match is None:
            raise SolverError(f"{path}: xVec present but not followed by a {{...}} vector")
        values = _numbers(match.group(1))
    else:
        first = next((line for line in text.splitlines() if line.strip()), "")
        try:
            values = _numbers(first)
        except ValueError as exc:
            raise SolverError(f"{path}: cannot parse the solution vector: {exc}") from exc
    if len(values) != m + 1:
        raise SolverError(f"{path}: solution has {len(values)} entries, expected {m + 1}")
    x = np.array(values)
    return x[:-1], float(x[-1])


def run_external_solver(dat_path: Union[str, Path], executable: str,
                        out_path: Optional[Union[str, Path]] = None, timeout: Optional[float] = None) -> Path:
    dat_path = Path(dat_path)
    out_path = Path(out_path) if out_path is not None else dat_path.with_suffix(".out")
    try:
        completed = subprocess.run(
            [executable, str(dat_path), str(out_path)], capture_output=True, text=True, timeout=timeout
        )
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise SolverError(f"external solver {executable} failed to run: {exc}") from exc
    logger.info("external solver %s exited with code %d", executable, completed.returncode)
    if not out_path.exists():
        raise SolverError(
            f"external solver {executable} wrote no solution (exit {completed.returncode}): "
            f"{completed.stderr.strip()[:200]}"
        )
    return out_path


def _solve_sdpa(problem: FeasibilityProblem, options: SolverOptions) -> SolveResult:
    path = export_sdpa(problem, options.export_path or Path("problem.dat-s"))
    if not settings.sdpa_solver:
        return SolveResult(
            "unknown", None, float("nan"), None, "sdpa-export",
            message=f"exported to {path}; set POLYCONSENSUS_SDPA_SOLVER to run an external solver",
            export_path=path,
        )
    out = run_external_solver(path, settings.sdpa_solver)
    y, t = import_sdpa_solution(out, problem.m)
    verdict, margin = _classify(problem, y, options)
    return SolveResult(
        verdict, y, margin, None, f"sdpa:{Path(settings.sdpa_solver).name}",
        message=f"external margin t={t:.6g}, re-measured {margin:.6g}", export_path=path,
    )


# ----------------------------------------------------------------------------
# Independent verification
# ----------------------------------------------------------------------------

def _extreme(matrix: np.ndarray, which: str) -> float:
    values, _ = jacobi_eigh(0.5 * (matrix + matrix.T))
    return float(values.min() if which == "min" else values.max())


def verify_certificate(cert: Certificate, basis: MonomialBasis, slack: SlackBasis, A_a: np.ndarray,
                       A_b: np.ndarray, spectral: SpectralData, tol_verify: float = 1e-7) -> VerificationReport:
    """Recheck positivity and dissipation at every nonzero pattern eigenvalue from L_j and tau alone."""
    n, rho = basis.n, basis.rho
    Ls = cert.L_matrices()
    tau = cert.tau_vector()
    A_a = np.asarray(A_a, dtype=float)
    A_b = np.asarray(A_b, dtype=float)
    if cert.n != n or any(L.shape != (n, n) for L in Ls):
        raise DimensionError(f"certificate is for n={cert.n}, model has n={n}")
    if tau.shape != (slack.iota,):
        raise DimensionError(f"certificate carries {tau.size} slack weights, model needs {slack.iota}")
    if A_a.shape != (n, rho) or A_b.shape != (n, rho):
        raise DimensionError(f"system matrices must be {n}x{rho}")

    gamma = np.zeros((n, rho))
    for i in range(n):
        gamma[i, basis.position([int(k == i) for k in range(n)])] = 1.0
    slack_sum = np.tensordot(tau, slack.stacked(rho), axes=1) if slack.iota else np.zeros((rho, rho))

    checks: List[BlockCheck] = []
    for lam in spectral.nonzero:
        lam = float(lam)
        positivity = sum(lam ** j * L for j, L in enumerate(Ls, start=1))
        dissipation = slack_sum.copy()
        for j, L in enumerate(Ls, start=1):
            GL = gamma.T @ L
            agent = GL @ A_a + A_a.T @ GL.T + cert.epsilon * GL @ gamma
            coupling = GL @ A_b + A_b.T @ GL.T
            dissipation += lam ** j * agent + lam ** (j + 1) * coupling
        dissipation = dissipation[1:, 1:]

        threshold_pos = tol_verify * float(np.max(np.abs(positivity)))
        low = _extreme(positivity, "min")
        checks.append(BlockCheck(eigenvalue=lam, family="positivity", extremal=low, threshold=threshold_pos, ok=low > threshold_pos))
        threshold_diss = tol_verify * float(np.max(np.abs(dissipation), initial=0.0))
        high = _extreme(dissipation, "max") if dissipation.size else 0.0
        checks.append(BlockCheck(eigenvalue=lam, family="dissipation", extremal=high, threshold=threshold_diss, ok=high <= threshold_diss))

    pos_checks = [c for c in checks if c.family == "positivity"]
    diss_checks = [c for c in checks if c.family == "dissipation"]
    violations = [c.threshold - c.extremal for c in pos_checks if not c.ok]
    violations += [c.extremal - c.threshold for c in diss_checks if not c.ok]
    report = VerificationReport(
        verdict="pass" if all(c.ok for c in checks) else "fail",
        tol_verify=tol_verify,
        checks=checks,
        worst_positivity_min=min((c.extremal for c in pos_checks), default=float("nan")),
        worst_dissipation_max=max((c.extremal for c in diss_checks), default=float("nan")),
        worst_violation=max(violations, default=0.0),
    )
    logger.info(
        "verification %s: worst positivity min %.3g, worst dissipation max %.3g",
        report.verdict, report.worst_positivity_min, report.worst_dissipation_max,
    )
    return report


def certificate_from_solution(layout: DecisionLayout, problem: FeasibilityProblem, result: SolveResult, *,
                              method: str, epsilon: float, eigenvalues: Sequence[float],
                              lambda_range: Optional[Tuple[float, float]] = None,
                              model_hash: Optional[str] = None) -> Certificate:
    y = result.y if result.y is not None else np.zeros(layout.size)
    values = layout.unpack(y)
    kyp = None
    if layout.has_kyp:
        lo, hi = lambda_range if lambda_range is not None else (float("nan"), float("nan"))
        kyp = {
            "D1": values["D1"].tolist(), "G1": values["G1"].tolist(),
            "D2": values["D2"].tolist(), "G2": values["G2"].tolist(),
            "lambda_min": lo, "lambda_max": hi,
        }
    return Certificate(
        method=method,
        status=result.status,
        n=layout.n,
        l=layout.l,
        epsilon=epsilon,
        L=[values[f"L{j}"].tolist() for j in range(1, layout.l + 1)],
        tau=values["tau"].tolist(),
        kyp=kyp,
        achieved_margin=float(result.margin) if np.isfinite(result.margin) else 0.0,
        required_margin=problem.margin_pos,
        normalization={block.name: block.scale for block in problem.blocks},
        eigenvalues=list(eigenvalues),
        model_hash=model_hash,
        solver=result.solver,
        iterations=result.iterations,
    )
