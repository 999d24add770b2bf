"""Assembly of the consensus LMIs as affine matrix pencils in one decision vector.

Two families are produced:

* per-eigenvalue blocks: for each distinct nonzero eigenvalue of the pattern,
  a positivity block sum_j lam^j L_j and a dissipation block over the reduced
  monomial vector;
* interval blocks: the same two conditions for every lam in [lam_min, lam_max],
  turned into two parameter-free LMIs with the generalised KYP lemma.

Decision entries are the independent scalars of L_j (symmetric), the slack
weights tau_k, and for the interval form the multipliers D (symmetric) and
G (skew) of each KYP block.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from polyconsensus.core.errors import DimensionError, InputError, IntervalError
from polyconsensus.pattern import SpectralData
from polyconsensus.polybasis import MonomialBasis, SlackBasis, selector_gamma, selector_pi

logger = logging.getLogger(__name__)

Orientation = Literal["positive", "negative"]


# ----------------------------------------------------------------------------
# Affine matrix-valued maps
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineMatrix:
    """X(y) = const + sum_r y_r coeffs[r]."""
    const: np.ndarray
    coeffs: np.ndarray

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    @classmethod
    def zeros(cls, m: int, rows: int, cols: Optional[int] = None) -> "AffineMatrix":
        cols = rows if cols is None else cols
        return cls(np.zeros((rows, cols)), np.zeros((m, rows, cols)))

    @classmethod
    def constant(cls, m: int, value: np.ndarray) -> "AffineMatrix":
        value = np.asarray(value, dtype=float)
        return cls(value, np.zeros((m,) + value.shape))

    @property
    def m(self) -> int:
        return self.coeffs.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.const.shape

    @property
    def T(self) -> "AffineMatrix":
        return AffineMatrix(self.const.T, self.coeffs.transpose(0, 2, 1))

    def __add__(self, other: "AffineMatrix") -> "AffineMatrix":
        return AffineMatrix(self.const + other.const, self.coeffs + other.coeffs)

    def __sub__(self, other: "AffineMatrix") -> "AffineMatrix":
        return AffineMatrix(self.const - other.const, self.coeffs - other.coeffs)

    def __neg__(self) -> "AffineMatrix":
        return AffineMatrix(-self.const, -self.coeffs)

    def __mul__(self, scalar: float) -> "AffineMatrix":
        return AffineMatrix(scalar * self.const, scalar * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "AffineMatrix":
        return self * (1.0 / scalar)

    def left(self, M: np.ndarray) -> "AffineMatrix":
        return AffineMatrix(M @ self.const, M @ self.coeffs)

    def right(self, M: np.ndarray) -> "AffineMatrix":
        return AffineMatrix(self.const @ M, self.coeffs @ M)

    def congruence(self, M: np.ndarray) -> "AffineMatrix":
        """M^T X M."""
        return self.left(M.T).right(M)

    def sym(self) -> "AffineMatrix":
        """X + X^T."""
        return self + self.T

    def evaluate(self, y: np.ndarray) -> np.ndarray:
        return self.const + np.tensordot(y, self.coeffs, axes=1)

    @staticmethod
    def block(grid: Sequence[Sequence["AffineMatrix"]]) -> "AffineMatrix":
        const = np.block([[cell.const for cell in row] for row in grid])
        coeffs = np.block([[cell.coeffs for cell in row] for row in grid])
        return AffineMatrix(const, coeffs)


# ----------------------------------------------------------------------------
# Decision layout
# ----------------------------------------------------------------------------

SegmentKind = Literal["sym", "skew", "vector"]


@dataclass(frozen=True)
class Segment:
    name: str
    kind: SegmentKind
    dim: int
    offset: int

    @property
    def size(self) -> int:
        if self.kind == "sym":
            return self.dim * (self.dim + 1) // 2
        if self.kind == "skew":
            return self.dim * (self.dim - 1) // 2
        return self.dim

    def positions(self) -> List[Tuple[int, int]]:
        if self.kind == "sym":
            return [(i, j) for i in range(self.dim) for j in range(i, self.dim)]
        if self.kind == "skew":
            return [(i, j) for i in range(self.dim) for j in range(i + 1, self.dim)]
        return [(i, 0) for i in range(self.dim)]


@dataclass(frozen=True)
class DecisionLayout:
    l: int
    n: int
    iota: int
    segments: Tuple[Segment, ...]

    @classmethod
    def create(cls, l: int, n: int, iota: int, kyp_dims: Optional[Tuple[int, int]] = None) -> "DecisionLayout":
        specs: List[Tuple[str, SegmentKind, int]] = [(f"L{j}", "sym", n) for j in range(1, l + 1)]
        specs.append(("tau", "vector", iota))
        if kyp_dims is not None:
            for k, dim in enumerate(kyp_dims, start=1):
                specs += [(f"D{k}", "sym", dim), (f"G{k}", "skew", dim)]
        segments, offset = [], 0
        for name, kind, dim in specs:
            segment = Segment(name, kind, dim, offset)
            segments.append(segment)
            offset += segment.size
        return cls(l=l, n=n, iota=iota, segments=tuple(segments))

    @property
    def size(self) -> int:
        last = self.segments[-1]
        return last.offset + last.size

    @property
    def has_kyp(self) -> bool:
        return any(s.name == "D1" for s in self.segments)

    def segment(self, name: str) -> Segment:
        for segment in self.segments:
            if segment.name == name:
                return segment
        raise KeyError(name)

    def variable(self, name: str) -> AffineMatrix:
        """The matrix-valued decision for a sym/skew segment."""
        segment = self.segment(name)
        if segment.kind == "vector":
            raise InputError(f"segment {name} is a vector, not a matrix")
        out = AffineMatrix.zeros(self.size, segment.dim)
        for k, (i, j) in enumerate(segment.positions()):
            r = segment.offset + k
            out.coeffs[r, i, j] = 1.0
            out.coeffs[r, j, i] = 1.0 if segment.kind == "sym" else -1.0
        return out

    def slack_term(self, slack: SlackBasis, rho: int) -> AffineMatrix:
        """sum_k tau_k Q_k."""
        out = AffineMatrix.zeros(self.size, rho)
        segment = self.segment("tau")
        for k, Q in enumerate(slack.Q):
            out.coeffs[segment.offset + k] = Q
        return out

    def unpack(self, y: np.ndarray) -> Dict[str, np.ndarray]:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.size,):
            raise DimensionError(f"decision vector has shape {y.shape}, layout needs ({self.size},)")
        values: Dict[str, np.ndarray] = {}
        for segment in self.segments:
            chunk = y[segment.offset: segment.offset + segment.size]
            if segment.kind == "vector":
                values[segment.name] = chunk.copy()
                continue
            M = np.zeros((segment.dim, segment.dim))
            for value, (i, j) in zip(chunk, segment.positions()):
                M[i, j] = value
                M[j, i] = value if segment.kind == "sym" else -value
            values[segment.name] = M
        return values

    def pack(self, values: Dict[str, np.ndarray]) -> np.ndarray:
        y = np.zeros(self.size)
        for segment in self.segments:
            if segment.name not in values:
                continue
            value = np.asarray(values[segment.name], dtype=float)
            if segment.kind == "vector":
                y[segment.offset: segment.offset + segment.size] = value
            else:
                y[segment.offset: segment.offset + segment.size] = [value[i, j] for i, j in segment.positions()]
        return y


# ----------------------------------------------------------------------------
# LMI blocks
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LmiBlock:
    """Normalised pencil F0 + sum_r y_r F[r]; the raw pencil is `scale` times it.

    strict blocks take part in the margin t; the others are held at the fixed
    non-strict margin of the feasibility problem.
    """
    name: str
    family: str
    orientation: Orientation
    strict: bool
    F0: np.ndarray
    F: np.ndarray
    scale: float = 1.0
    eigenvalue: Optional[float] = None

    @property
    def size(self) -> int:
        return self.F0.shape[0]

    @property
    def sign(self) -> float:
        return 1.0 if self.orientation == "positive" else -1.0

    def value(self, y: np.ndarray) -> np.ndarray:
        return self.F0 + np.tensordot(y, self.F, axes=1)


def make_block(name: str, family: str, expr: AffineMatrix, orientation: Orientation,
               strict: bool, eigenvalue: Optional[float] = None) -> LmiBlock:
    expr = expr.sym() * 0.5
    scale = max(float(np.max(np.abs(expr.const), initial=0.0)), float(np.max(np.abs(expr.coeffs), initial=0.0)))
    if scale == 0.0:
        scale = 1.0
    F0, F = expr.const / scale, expr.coeffs / scale
    F0.setflags(write=False)
    F.setflags(write=False)
    return LmiBlock(name, family, orientation, strict, F0, F, scale, eigenvalue)


def evaluate_blocks(layout: DecisionLayout, blocks: Sequence[LmiBlock], y: np.ndarray) -> List[np.ndarray]:
    y = np.asarray(y, dtype=float)
    if y.shape != (layout.size,):
        raise DimensionError(f"decision vector has shape {y.shape}, layout needs ({layout.size},)")
    return [block.value(y) for block in blocks]


# ----------------------------------------------------------------------------
# Per-eigenvalue conditions
# ----------------------------------------------------------------------------

def _check_model(basis: MonomialBasis, A_a: np.ndarray, A_b: np.ndarray, l: int, epsilon: float) -> None:
    if l < 1:
        raise InputError(f"the Lyapunov power count l must be >= 1, got {l}")
    if epsilon < 0:
        raise InputError(f"epsilon must be non-negative, got {epsilon}")
    for name, A in (("A_a", A_a), ("A_b", A_b)):
        if np.shape(A) != (basis.n, basis.rho):
            raise DimensionError(f"{name} has shape {np.shape(A)}, basis needs ({basis.n}, {basis.rho})")


class ConsensusTerms:
    """The pieces of the positivity and dissipation conditions, reusable across lam.

    dissipation(lam) = tau.Q + sum_j lam^j agent_j + sum_j lam^(j+1) coupling_j
    with agent_j = G^T L_j A_a + A_a^T L_j G + eps G^T L_j G and
    coupling_j = G^T L_j A_b + A_b^T L_j G.
    """

    def __init__(self, layout: DecisionLayout, basis: MonomialBasis, slack: SlackBasis,
                 A_a: np.ndarray, A_b: np.ndarray, epsilon: float):
        self.layout = layout
        self.basis = basis
        self.gamma = selector_gamma(basis)
        self.pi = selector_pi(basis)
        self.L = [layout.variable(f"L{j}") for j in range(1, layout.l + 1)]
        self.slack = layout.slack_term(slack, basis.rho)
        A_a = np.asarray(A_a, dtype=float)
        A_b = np.asarray(A_b, dtype=float)
        self.agent = [
            L.left(self.gamma.T).right(A_a).sym() + epsilon * L.congruence(self.gamma) for L in self.L
        ]
        self.coupling = [L.left(self.gamma.T).right(A_b).sym() for L in self.L]

    def positivity(self, lam: float) -> AffineMatrix:
        lam = float(lam)
        out = AffineMatrix.zeros(self.layout.size, self.layout.n)
        for j, L in enumerate(self.L, start=1):
            out = out + lam ** j * L
        return out

    def dissipation(self, lam: float, project: bool = True) -> AffineMatrix:
        lam = float(lam)
        out = self.slack
        for j in range(1, self.layout.l + 1):
            out = out + lam ** j * self.agent[j - 1] + lam ** (j + 1) * self.coupling[j - 1]
        return out.congruence(self.pi.T) if project else out

    def positivity_coefficients(self) -> List[AffineMatrix]:
        """theta-coefficients of -sum_j theta^j L_j."""
        return [AffineMatrix.zeros(self.layout.size, self.layout.n)] + [-L for L in self.L]

    def dissipation_coefficients(self) -> List[AffineMatrix]:
        """theta-coefficients of the projected dissipation matrix, degree l+1."""
        raw = [self.slack]
        for j in range(1, self.layout.l + 2):
            term = AffineMatrix.zeros(self.layout.size, self.basis.rho)
            if j <= self.layout.l:
                term = term + self.agent[j - 1]
            if j >= 2:
                term = term + self.coupling[j - 2]
            raw.append(term)
        return [C.congruence(self.pi.T) for C in raw]


def assemble_theorem1(basis: MonomialBasis, slack: SlackBasis, A_a: np.ndarray, A_b: np.ndarray,
                      spectral: SpectralData, l: int, epsilon: float = 1.0) -> Tuple[DecisionLayout, List[LmiBlock]]:
    _check_model(basis, A_a, A_b, l, epsilon)
    layout = DecisionLayout.create(l, basis.n, slack.iota)
    terms = ConsensusTerms(layout, basis, slack, A_a, A_b, epsilon)

    blocks: List[LmiBlock] = []
    for lam in spectral.distinct_nonzero():
        blocks.append(make_block(f"positivity@{lam:.6g}", "positivity", terms.positivity(lam), "positive", True, lam))
        blocks.append(make_block(f"dissipation@{lam:.6g}", "dissipation", terms.dissipation(lam), "negative", False, lam))
    logger.info("assembled %d per-eigenvalue blocks over %d decisions", len(blocks), layout.size)
    return layout, blocks


# ----------------------------------------------------------------------------
# Interval conditions through the generalised KYP lemma
# ----------------------------------------------------------------------------

def kyp_order(l: int) -> int:
    return math.ceil((l + 1) / 2)


@dataclass(frozen=True)
class KypRealization:
    """phi(theta) = D + C theta (I - A theta)^-1 B = [theta^m I; ...; theta I; I]."""
    nu: int
    m: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def state_dim(self) -> int:
        return self.nu * self.m

    def phi(self, theta: float) -> np.ndarray:
        eye = np.eye(self.nu)
        return np.vstack([theta ** (self.m - a) * eye for a in range(self.m + 1)])

    def transfer(self, theta: float) -> np.ndarray:
        resolvent = np.linalg.solve(np.eye(self.state_dim) - theta * self.A, self.B)
        return self.D + theta * self.C @ resolvent


def kyp_realization(nu: int, l: int) -> KypRealization:
    if nu < 1 or l < 1:
        raise InputError(f"kyp_realization needs nu >= 1 and l >= 1, got nu={nu}, l={l}")
    m = kyp_order(l)
    eye = np.eye(nu)
    shift = np.eye(m, k=1)
    last = np.zeros((m, 1))
    last[-1, 0] = 1.0
    return KypRealization(
        nu=nu,
        m=m,
        A=np.kron(shift, eye),
        B=np.kron(last, eye),
        C=np.kron(np.vstack([np.eye(m), np.zeros((1, m))]), eye),
        D=np.kron(np.vstack([np.zeros((m, 1)), np.ones((1, 1))]), eye),
    )


def polynomial_to_gram(coeffs: Sequence[Union[AffineMatrix, np.ndarray]], m: int) -> AffineMatrix:
    """Block matrix M with phi(theta)^T M phi(theta) = sum_k theta^k C_k.

    Block (a, b) multiplies theta^(2m - a - b); each C_k is split evenly over
    the anti-diagonal positions carrying its power.
    """
    degree = len(coeffs) - 1
    if degree > 2 * m:
        raise InputError(f"polynomial of degree {degree} needs m >= {math.ceil(degree / 2)}, got m={m}")
    affine = [C if isinstance(C, AffineMatrix) else AffineMatrix.constant(0, C) for C in coeffs]
    size = max(C.m for C in affine)
    affine = [C if C.m == size else AffineMatrix.constant(size, C.const) for C in affine]
    nu = affine[0].shape[0]

    grid = []
    for a in range(m + 1):
        row = []
        for b in range(m + 1):
            k = 2 * m - a - b
            if k > degree:
                row.append(AffineMatrix.zeros(size, nu))
                continue
            s = a + b
            count = min(s, 2 * m - s) + 1
            row.append(affine[k] / count)
        grid.append(row)
    return AffineMatrix.block(grid)


def kyp_pencil(M: AffineMatrix, realization: KypRealization, D: AffineMatrix, G: AffineMatrix,
               lambda_min: float, lambda_max: float) -> AffineMatrix:
    """[C D]^T M [C D] + [I 0; A B]^T Psi [I 0; A B] for the interval [lambda_min, lambda_max]."""
    r = realization
    output = np.hstack([r.C, r.D])
    state = np.block([
        [np.eye(r.state_dim), np.zeros((r.state_dim, r.nu))],
        [r.A, r.B],
    ])
    psi = AffineMatrix.block([
        [-2.0 * D, (lambda_min + lambda_max) * D + G],
        [(lambda_min + lambda_max) * D - G, -2.0 * lambda_min * lambda_max * D],
    ])
    return M.congruence(output) + psi.congruence(state)


def assemble_theorem2(basis: MonomialBasis, slack: SlackBasis, A_a: np.ndarray, A_b: np.ndarray,
                      lambda_min: float, lambda_max: float, l: int,
                      epsilon: float = 1.0) -> Tuple[DecisionLayout, List[LmiBlock]]:
    _check_model(basis, A_a, A_b, l, epsilon)
    if lambda_min > lambda_max:
        raise InputError(f"empty eigenvalue interval [{lambda_min}, {lambda_max}]")
    if lambda_min <= 0.0 <= lambda_max:
        raise IntervalError(
            f"eigenvalue interval [{lambda_min:.6g}, {lambda_max:.6g}] contains 0; "
            "the positivity condition cannot hold on it, use the per-eigenvalue method"
        )

    real1 = kyp_realization(basis.n, l)
    real2 = kyp_realization(basis.rho - 1, l)
    layout = DecisionLayout.create(l, basis.n, slack.iota, (real1.state_dim, real2.state_dim))
    terms = ConsensusTerms(layout, basis, slack, A_a, A_b, epsilon)

    M1 = polynomial_to_gram(terms.positivity_coefficients(), real1.m)
    M2 = polynomial_to_gram(terms.dissipation_coefficients(), real2.m)
    D1, G1 = layout.variable("D1"), layout.variable("G1")
    D2, G2 = layout.variable("D2"), layout.variable("G2")

    blocks = [
        make_block("kyp1", "kyp1", kyp_pencil(M1, real1, D1, G1, lambda_min, lambda_max), "negative", True),
        make_block("D1", "D1", D1, "positive", False),
        make_block("kyp2", "kyp2", kyp_pencil(M2, real2, D2, G2, lambda_min, lambda_max), "negative", False),
        make_block("D2", "D2", D2, "positive", False),
    ]
    logger.info(
        "assembled interval blocks of sizes %s over %d decisions", [b.size for b in blocks], layout.size
    )
    return layout, blocks
