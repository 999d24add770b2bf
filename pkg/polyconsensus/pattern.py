"""Interconnection pattern matrices: construction, structural checks, spectral data."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Literal, Tuple

import numpy as np

from polyconsensus.core.errors import AssumptionViolation, ConvergenceError, IntervalError, PatternError

logger = logging.getLogger(__name__)

ViolationKind = Literal["asymmetric", "row-sum", "zero-multiplicity"]


@dataclass(frozen=True)
class PatternMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise PatternError(f"pattern matrix must be square and non-empty, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise PatternError("pattern matrix has non-finite entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def N(self) -> int:
        return self.entries.shape[0]


def cycle_laplacian(N: int, weight: float = 1.0) -> PatternMatrix:
    if N < 3:
        raise PatternError(f"a cycle needs N >= 3 agents, got {N}")
    edges = [(i + 1, (i + 1) % N + 1, weight) for i in range(N)]
    return from_edge_list(N, edges)


def from_edge_list(N: int, edges: Iterable[Tuple[int, int, float]]) -> PatternMatrix:
    """Generalised Laplacian from 1-based (i, j, weight) edges."""
    if N < 1:
        raise PatternError(f"N must be positive, got {N}")
    P = np.zeros((N, N))
    for i, j, weight in edges:
        if not (1 <= i <= N and 1 <= j <= N):
            raise PatternError(f"edge ({i}, {j}) out of range 1..{N}")
        if i == j:
            raise PatternError(f"self-loop at node {i}")
        a, b = i - 1, j - 1
        P[a, b] -= weight
        P[b, a] -= weight
        P[a, a] += weight
        P[b, b] += weight
    return PatternMatrix(P)


# ----------------------------------------------------------------------------
# Symmetric eigensolver
# ----------------------------------------------------------------------------

def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations. Returns (eigenvalues, orthonormal eigenvectors), unsorted."""
    a = np.array(matrix, dtype=float)
    size = a.shape[0]
    v = np.eye(size)
    scale = np.linalg.norm(a)
    if size == 1 or scale == 0.0:
        return np.diag(a).copy(), v

    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            return np.diag(a).copy(), v
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (size {size})")


# ----------------------------------------------------------------------------
# Structural checks
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str


@dataclass(frozen=True)
class Assumption1Report:
    violations: Tuple[Violation, ...] = ()
    zero_count: int = 1

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def kinds(self) -> List[str]:
        return [v.kind for v in self.violations]

    def message(self) -> str:
        if self.ok:
            return "pattern is symmetric, sums to zero by rows and has a simple zero eigenvalue"
        return "; ".join(f"{v.kind}: {v.detail}" for v in self.violations)


def check_assumption1(P: PatternMatrix, tol: float = 1e-8) -> Assumption1Report:
    if tol <= 0:
        raise PatternError(f"tolerance must be positive, got {tol}")
    entries = P.entries
    if not np.array_equal(entries, entries.T):
        worst = float(np.max(np.abs(entries - entries.T)))
        return Assumption1Report(
            violations=(Violation("asymmetric", f"max |P - P^T| = {worst:.3g}"),), zero_count=0
        )

    violations = []
    row_sums = entries.sum(axis=1)
    row_scale = np.maximum(np.max(np.abs(entries), axis=1), 1.0)
    bad_rows = np.flatnonzero(np.abs(row_sums) > tol * row_scale)
    if bad_rows.size:
        violations.append(
            Violation("row-sum", f"rows {(bad_rows + 1).tolist()} do not sum to zero")
        )

    lambdas, _ = jacobi_eigh(entries)
    norm = max(float(np.max(np.abs(lambdas))), 1e-300)
    zero_count = int(np.sum(np.abs(lambdas) <= tol * norm))
    if zero_count != 1:
        violations.append(
            Violation("zero-multiplicity", f"{zero_count} eigenvalues at zero, expected exactly 1")
        )
    return Assumption1Report(violations=tuple(violations), zero_count=zero_count)


def require_assumption1(P: PatternMatrix, tol: float = 1e-8) -> Assumption1Report:
    report = check_assumption1(P, tol)
    if not report.ok:
        raise AssumptionViolation(report.message(), detail=report)
    return report


# ----------------------------------------------------------------------------
# Spectral data
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralData:
    lambdas: np.ndarray
    S: np.ndarray

    @property
    def N(self) -> int:
        return self.lambdas.shape[0]

    @property
    def nonzero(self) -> np.ndarray:
        return self.lambdas[1:]

    def _require_nonzero(self) -> np.ndarray:
        if self.nonzero.size == 0:
            raise IntervalError(f"a pattern with N={self.N} has no nonzero eigenvalues")
        return self.nonzero

    @property
    def lambda_min(self) -> float:
        return float(np.min(self._require_nonzero()))

    @property
    def lambda_max(self) -> float:
        return float(np.max(self._require_nonzero()))

    def distinct_nonzero(self, rel_tol: float = 1e-9) -> List[float]:
        values = np.sort(self.nonzero)
        scale = max(float(np.max(np.abs(values))), 1.0) if values.size else 1.0
        distinct: List[float] = []
        for value in values:
            if not distinct or abs(value - distinct[-1]) > rel_tol * scale:
                distinct.append(float(value))
        return distinct


def eigendecompose(P: PatternMatrix, tol: float = 1e-12, max_sweeps: int = 100) -> SpectralData:
    lambdas, vectors = jacobi_eigh(P.entries, tol=tol, max_sweeps=max_sweeps)
    zero = int(np.argmin(np.abs(lambdas)))
    rest = sorted((i for i in range(lambdas.size) if i != zero), key=lambda i: lambdas[i])
    order = [zero] + rest

    lambdas = lambdas[order]
    S = vectors[:, order]
    if S[:, 0].sum() < 0:
        S[:, 0] = -S[:, 0]
    lambdas.setflags(write=False)
    S.setflags(write=False)
    logger.debug("pattern spectrum: %s", np.round(lambdas, 12).tolist())
    return SpectralData(lambdas=lambdas, S=S)
