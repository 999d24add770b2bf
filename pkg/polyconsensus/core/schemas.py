"""Pydantic schemas for every JSON artifact: model configs, certificates, reports, traces."""
import hashlib
import json
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Matrix = List[List[float]]

SCHEMA_VERSION = 1


def _digest(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ==================================================================
# MODEL CONFIG
# ==================================================================

class TermSpec(BaseModel):
    """One monomial term: d(x_row)/dt += coeff * prod x_i^powers_i."""
    model_config = ConfigDict(extra="forbid")

    row: int = Field(..., ge=1)
    coeff: float
    powers: List[int]

    @model_validator(mode="after")
    def _powers_natural(self):
        if any(p < 0 for p in self.powers):
            raise ValueError("powers must be non-negative integers")
        return self


class PatternSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: Optional[Matrix] = None
    edges: Optional[List[Tuple[int, int, float]]] = None
    cycle: Optional[int] = None
    weight: float = 1.0     # edge weight used by `cycle`

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [name for name in ("matrix", "edges", "cycle") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"pattern needs exactly one of matrix/edges/cycle, got {given or 'none'}")
        return self


class MethodDefaults(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: Literal["theorem1", "theorem2"] = "theorem1"
    l: int = Field(6, ge=1)
    epsilon: float = Field(1.0, ge=0)
    margin: float = Field(1e-6, ge=0)
    margin_neg: float = Field(0.0, ge=0)
    tol_verify: float = Field(1e-7, gt=0)
    zero_tol: Optional[float] = Field(None, gt=0)     # falls back to POLYCONSENSUS_ZERO_TOL


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: Optional[str] = None
    n: int = Field(..., ge=1)
    N: int = Field(..., ge=2)
    variables: Optional[List[str]] = None
    agent_terms: List[TermSpec] = []
    coupling_terms: List[TermSpec] = []
    c: float = 1.0
    pattern: PatternSpec
    parameters: Dict[str, float] = {}
    method: MethodDefaults = MethodDefaults()

    @model_validator(mode="after")
    def _dimensions(self):
        for family in ("agent_terms", "coupling_terms"):
            for k, term in enumerate(getattr(self, family)):
                if term.row > self.n:
                    raise ValueError(f"{family}[{k}].row={term.row} exceeds n={self.n}")
                if len(term.powers) != self.n:
                    raise ValueError(f"{family}[{k}].powers has length {len(term.powers)}, expected n={self.n}")
        if self.variables is not None and len(self.variables) != self.n:
            raise ValueError(f"variables lists {len(self.variables)} names, expected n={self.n}")

        pattern = self.pattern
        if pattern.matrix is not None:
            if len(pattern.matrix) != self.N or any(len(row) != self.N for row in pattern.matrix):
                raise ValueError(f"pattern.matrix must be {self.N}x{self.N}")
        if pattern.cycle is not None and pattern.cycle != self.N:
            raise ValueError(f"pattern.cycle={pattern.cycle} but N={self.N}")
        if pattern.edges is not None:
            for i, j, _ in pattern.edges:
                if not (1 <= i <= self.N and 1 <= j <= self.N):
                    raise ValueError(f"pattern edge ({i}, {j}) out of range 1..{self.N}")
        return self

    def content_hash(self) -> str:
        return _digest(self.model_dump(mode="json"))


# ==================================================================
# CERTIFICATE
# ==================================================================

class KypMultipliers(BaseModel):
    D1: Matrix
    G1: Matrix
    D2: Matrix
    G2: Matrix
    lambda_min: float
    lambda_max: float

    @model_validator(mode="after")
    def _structure(self):
        for name in ("D1", "D2"):
            D = np.array(getattr(self, name))
            if D.ndim != 2 or not np.allclose(D, D.T, rtol=0, atol=1e-9 * max(1.0, np.abs(D).max(initial=0))):
                raise ValueError(f"{name} must be symmetric")
        for name in ("G1", "G2"):
            G = np.array(getattr(self, name))
            if G.ndim != 2 or not np.allclose(G, -G.T, rtol=0, atol=1e-9 * max(1.0, np.abs(G).max(initial=0))):
                raise ValueError(f"{name} must be skew-symmetric")
        return self


class Certificate(BaseModel):
    schema_version: Literal[1] = SCHEMA_VERSION
    method: Literal["theorem1", "theorem2"]
    status: Literal["certified", "unknown", "infeasible"]
    n: int = Field(..., ge=1)
    l: int = Field(..., ge=1)
    epsilon: float
    L: List[Matrix]
    tau: List[float]
    kyp: Optional[KypMultipliers] = None
    achieved_margin: float
    required_margin: float
    normalization: Dict[str, float] = {}
    eigenvalues: List[float] = []
    model_hash: Optional[str] = None
    solver: str = "unknown"
    iterations: Optional[int] = None

    @model_validator(mode="after")
    def _shapes(self):
        if len(self.L) != self.l:
            raise ValueError(f"expected {self.l} matrices L_j, got {len(self.L)}")
        for j, L in enumerate(self.L, start=1):
            M = np.array(L, dtype=float)
            if M.shape != (self.n, self.n):
                raise ValueError(f"L_{j} must be {self.n}x{self.n}, got {M.shape}")
            if not np.allclose(M, M.T, rtol=0, atol=1e-9 * max(1.0, np.abs(M).max(initial=0))):
                raise ValueError(f"L_{j} must be symmetric")
        if self.method == "theorem2" and self.kyp is None:
            raise ValueError("theorem2 certificates carry KYP multipliers")
        return self

    def L_matrices(self) -> List[np.ndarray]:
        return [np.array(L, dtype=float) for L in self.L]

    def tau_vector(self) -> np.ndarray:
        return np.array(self.tau, dtype=float)

    def content_hash(self) -> str:
        return _digest(self.model_dump(mode="json", exclude={"iterations"}))


# ==================================================================
# VERIFICATION + TRACES
# ==================================================================

class BlockCheck(BaseModel):
    eigenvalue: float
    family: Literal["positivity", "dissipation"]
    extremal: float         # min-eig for positivity, max-eig for dissipation
    threshold: float
    ok: bool


class VerificationReport(BaseModel):
    verdict: Literal["pass", "fail"]
    tol_verify: float
    checks: List[BlockCheck]
    worst_positivity_min: float
    worst_dissipation_max: float
    worst_violation: float

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


class TraceMetadata(BaseModel):
    schema_version: Literal[1] = SCHEMA_VERSION
    seed: Optional[int] = None
    dt: float
    t_final: float
    steps: int
    amplitude: Optional[float] = None
    n: int
    N: int
    diverged: bool
    model_hash: Optional[str] = None
    certificate_hash: Optional[str] = None
    initial_disagreement: float
    final_disagreement: float
    v_ratio: Optional[float] = None
    witness_fraction: Optional[float] = None
