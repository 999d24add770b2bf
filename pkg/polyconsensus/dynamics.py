"""Polynomial vector fields, the formation ODE, RK4 integration and Lyapunov evaluation."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.spatial.distance import pdist

from polyconsensus.core.errors import DimensionError, DynamicsError, InputError
from polyconsensus.core.schemas import Certificate
from polyconsensus.pattern import (
    PatternMatrix,
    SpectralData,
    cycle_laplacian,
    eigendecompose,
    require_assumption1,
)
from polyconsensus.polybasis import MonomialBasis, build_basis, eval_chi

logger = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e12

LyapunovSource = Union[Certificate, Sequence[np.ndarray]]


@dataclass(frozen=True)
class PolynomialTerm:
    row: int                    # 1-based output coordinate
    coeff: float
    powers: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.powers)


@dataclass(frozen=True)
class PolynomialVectorField:
    basis: MonomialBasis
    A: np.ndarray               # n x rho, columns follow basis order

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def d(self) -> int:
        return self.basis.d

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return eval_chi(self.basis, x) @ self.A.T


def _as_term(term) -> PolynomialTerm:
    if isinstance(term, PolynomialTerm):
        return term
    if isinstance(term, dict):
        return PolynomialTerm(int(term["row"]), float(term["coeff"]), tuple(int(p) for p in term["powers"]))
    return PolynomialTerm(int(term.row), float(term.coeff), tuple(int(p) for p in term.powers))


def infer_degree(*term_lists: Iterable) -> int:
    degrees = [_as_term(t).degree for terms in term_lists for t in terms]
    return max([1] + degrees)


def field_from_terms(n: int, terms: Iterable, d: Optional[int] = None) -> PolynomialVectorField:
    """Accumulate terms into the coefficient matrix over the degree-d basis.

    d defaults to the largest total degree among the terms (at least 1); pass the
    shared degree when an agent field and a coupling field must use one basis.
    """
    terms = [_as_term(t) for t in terms]
    basis = build_basis(n, d if d is not None else infer_degree(terms))
    A = np.zeros((n, basis.rho))
    for term in terms:
        if not 1 <= term.row <= n:
            raise InputError(f"term row {term.row} out of range 1..{n}")
        if len(term.powers) != n:
            raise InputError(f"term powers {term.powers} do not have length {n}")
        if term.degree > basis.d:
            raise InputError(f"term of degree {term.degree} exceeds basis degree {basis.d}")
        A[term.row - 1, basis.position(term.powers)] += term.coeff
    A.setflags(write=False)
    return PolynomialVectorField(basis=basis, A=A)


# ----------------------------------------------------------------------------
# Formation model
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class FormationModel:
    agent_field: PolynomialVectorField
    coupling_field: PolynomialVectorField
    pattern: PatternMatrix
    spectral: SpectralData

    @classmethod
    def build(cls, agent_field, coupling_field, pattern: PatternMatrix, zero_tol: float = 1e-8) -> "FormationModel":
        if agent_field.basis != coupling_field.basis:
            raise DimensionError("agent and coupling fields must share one monomial basis")
        if pattern.N < 2:
            raise InputError(f"a consensus network needs at least two agents, got N={pattern.N}")
        require_assumption1(pattern, zero_tol)
        return cls(agent_field, coupling_field, pattern, eigendecompose(pattern))

    @property
    def basis(self) -> MonomialBasis:
        return self.agent_field.basis

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def N(self) -> int:
        return self.pattern.N

    @property
    def A_a(self) -> np.ndarray:
        return self.agent_field.A

    @property
    def A_b(self) -> np.ndarray:
        return self.coupling_field.A

    @cached_property
    def sparse_pattern(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(self.pattern.entries)


def oscillator_network(
    example: Literal["vdp", "lorenz"],
    c: float,
    *,
    N: Optional[int] = None,
    mu: float = 0.5,
    sigma: float = 10.0,
    rho_l: float = 28.0,
    beta: float = 8.0 / 3.0,
    classical: bool = False,
) -> Tuple[PolynomialVectorField, PolynomialVectorField, PatternMatrix]:
    """Oscillator networks on a unit-weight ring with the gain c folded into A_b."""
    if example == "vdp":
        N = 10 if N is None else N
        cubic = (2, 1) if classical else (1, 1)
        agent = [
            PolynomialTerm(1, 1.0, (0, 1)),
            PolynomialTerm(2, mu, (0, 1)),
            PolynomialTerm(2, -mu, cubic),
            PolynomialTerm(2, -1.0, (1, 0)),
        ]
        coupling = [PolynomialTerm(2, -c, (1, 0)), PolynomialTerm(2, -c, (0, 1))]
        n = 2
    elif example == "lorenz":
        if classical:
            raise InputError("the classical variant only applies to the Van der Pol example")
        N = 8 if N is None else N
        agent = [
            PolynomialTerm(1, -sigma, (1, 0, 0)),
            PolynomialTerm(1, sigma, (0, 1, 0)),
            PolynomialTerm(2, rho_l, (1, 0, 0)),
            PolynomialTerm(2, -1.0, (1, 0, 1)),
            PolynomialTerm(2, -1.0, (0, 1, 0)),
            PolynomialTerm(3, 1.0, (1, 1, 0)),
            PolynomialTerm(3, -beta, (0, 0, 1)),
        ]
        coupling = [PolynomialTerm(k + 1, -c, tuple(int(i == k) for i in range(3))) for k in range(3)]
        n = 3
    else:
        raise InputError(f"unknown example '{example}', expected 'vdp' or 'lorenz'")

    d = infer_degree(agent, coupling)
    return (
        field_from_terms(n, agent, d),
        field_from_terms(n, coupling, d),
        cycle_laplacian(N, 1.0),
    )


# ----------------------------------------------------------------------------
# Right-hand side and integration
# ----------------------------------------------------------------------------

def rhs(model: FormationModel, x: np.ndarray) -> np.ndarray:
    """(I_N (x) A_a + P (x) A_b) chi(x), evaluated agent by agent."""
    x = np.asarray(x, dtype=float)
    if x.size != model.n * model.N:
        raise DimensionError(f"state has {x.size} entries, expected nN = {model.n * model.N}")
    if not np.all(np.isfinite(x)):
        raise DynamicsError("non-finite state passed to rhs")
    chis = eval_chi(model.basis, x.reshape(model.N, model.n))
    local = chis @ model.A_a.T
    coupled = model.sparse_pattern @ (chis @ model.A_b.T)
    return (local + coupled).ravel()


def disagreement(x: np.ndarray, n: int, N: int) -> float:
    """Largest pairwise distance between agent states."""
    if N < 2:
        return 0.0
    return float(np.max(pdist(np.asarray(x, dtype=float).reshape(N, n))))


def random_initial_state(n: int, N: int, seed: int, amplitude: float = 2.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-amplitude, amplitude, size=n * N)


def _lyapunov_matrices(source: LyapunovSource) -> List[np.ndarray]:
    if isinstance(source, Certificate):
        return source.L_matrices()
    return [np.asarray(L, dtype=float) for L in source]


def _pattern_entries(pattern) -> np.ndarray:
    return pattern.entries if isinstance(pattern, PatternMatrix) else np.asarray(pattern, dtype=float)


def _weighted_states(Ls: List[np.ndarray], P: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Rows of (sum_j P^j (x) L_j) x, reshaped to N x n."""
    if Ls and Ls[0].shape != (X.shape[1], X.shape[1]):
        raise DimensionError(f"L_j is {Ls[0].shape}, agents have {X.shape[1]} states")
    out = np.zeros_like(X)
    powered = X
    for L in Ls:
        powered = P @ powered
        out += powered @ L
    return out


def lyapunov_value(certificate: LyapunovSource, pattern, x: np.ndarray) -> float:
    """V(x) = x^T (sum_j P^j (x) L_j) x without forming the nN x nN matrix."""
    Ls = _lyapunov_matrices(certificate)
    if not Ls:
        raise DimensionError("certificate has no Lyapunov matrices")
    P = _pattern_entries(pattern)
    n = Ls[0].shape[0]
    x = np.asarray(x, dtype=float)
    if x.size != n * P.shape[0]:
        raise DimensionError(f"state has {x.size} entries, expected {n * P.shape[0]}")
    X = x.reshape(P.shape[0], n)
    return float(np.sum(X * _weighted_states(Ls, P, X)))


def lyapunov_derivative(certificate: LyapunovSource, model: FormationModel, x: np.ndarray) -> float:
    """dV/dt = 2 x^T L rhs(x) along the formation vector field."""
    Ls = _lyapunov_matrices(certificate)
    X = np.asarray(x, dtype=float).reshape(model.N, model.n)
    F = rhs(model, x).reshape(model.N, model.n)
    return float(2.0 * np.sum(_weighted_states(Ls, model.pattern.entries, X) * F))


@dataclass
class SimulationTrace:
    times: np.ndarray
    states: np.ndarray          # steps+1 x nN
    disagreement: np.ndarray
    V: Optional[np.ndarray] = None
    diverged: bool = False
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def v_ratio(self) -> Optional[float]:
        if self.V is None or self.V[0] == 0:
            return None
        return float(self.V[-1] / self.V[0])


def rk4_simulate(
    model: FormationModel,
    x0: np.ndarray,
    dt: float = 1e-3,
    t_final: float = 10.0,
    certificate: Optional[LyapunovSource] = None,
    divergence_limit: float = DIVERGENCE_LIMIT,
) -> SimulationTrace:
    if dt <= 0 or t_final <= 0:
        raise InputError(f"dt and t_final must be positive, got dt={dt}, t_final={t_final}")
    x = np.asarray(x0, dtype=float).copy()
    if x.size != model.n * model.N:
        raise DimensionError(f"initial state has {x.size} entries, expected {model.n * model.N}")

    steps = int(round(t_final / dt))
    states = np.empty((steps + 1, x.size))
    states[0] = x
    taken = steps
    diverged = False
    for k in range(steps):
        k1 = rhs(model, x)
        k2 = rhs(model, x + 0.5 * dt * k1)
        k3 = rhs(model, x + 0.5 * dt * k2)
        k4 = rhs(model, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > divergence_limit:
            logger.warning("⚠️ divergence guard tripped at t=%.6g; returning partial trace", (k + 1) * dt)
            taken = k
            diverged = True
            break
        states[k + 1] = x

    states = states[: taken + 1]
    times = dt * np.arange(taken + 1)
    spread = np.array([disagreement(s, model.n, model.N) for s in states])
    V = None
    if certificate is not None:
        V = np.array([lyapunov_value(certificate, model.pattern, s) for s in states])
    return SimulationTrace(
        times=times,
        states=states,
        disagreement=spread,
        V=V,
        diverged=diverged,
        metadata={"dt": dt, "t_final": t_final, "steps": taken},
    )


def witness_fraction(
    trace: SimulationTrace,
    model: FormationModel,
    certificate: LyapunovSource,
    epsilon: float,
    stride: int = 1,
) -> float:
    """Share of sampled trace points where dV/dt <= -eps V + 1e-6 (1 + |V|)."""
    indices = range(1, trace.states.shape[0], max(1, stride))
    hits = total = 0
    for k in indices:
        x = trace.states[k]
        V = lyapunov_value(certificate, model.pattern, x)
        dV = lyapunov_derivative(certificate, model, x)
        hits += dV <= -epsilon * V + 1e-6 * (1.0 + abs(V))
        total += 1
    return hits / total if total else 1.0
