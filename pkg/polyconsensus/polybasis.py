"""Monomial basis, Gram map and slack matrices for polynomials of degree <= 2d.

Monomials are ordered graded-lexicographically with x_1 ranked highest, so the
constant comes first and x_1..x_n follow it. With this order the selectors
Gamma and Pi are plain block selectors.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Dict, List, Sequence, Tuple

import numpy as np

from polyconsensus.core.errors import ConsistencyError, InputError, SizeError

INDEX_LIMIT = np.iinfo(np.int64).max


@dataclass(frozen=True)
class Exponent:
    powers: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.powers)

    def __add__(self, other: "Exponent") -> "Exponent":
        return Exponent(tuple(a + b for a, b in zip(self.powers, other.powers)))

    def label(self, names: Sequence[str] = ()) -> str:
        names = names or [f"x{i + 1}" for i in range(len(self.powers))]
        parts = []
        for name, power in zip(names, self.powers):
            if power == 1:
                parts.append(name)
            elif power > 1:
                parts.append(f"{name}^{power}")
        return "*".join(parts) or "1"


def _exponents_of_degree(n: int, degree: int) -> List[Exponent]:
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        powers = [0] * n
        for var in combo:
            powers[var] += 1
        out.append(tuple(powers))
    # descending on x_1, then x_2, ...
    return [Exponent(p) for p in sorted(out, reverse=True)]


def _check_size(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise InputError(f"basis needs n >= 1 and d >= 1, got n={n}, d={d}")
    if math.comb(n + 2 * d, 2 * d) > INDEX_LIMIT:
        raise SizeError(f"C(n+2d, 2d) overflows 64-bit indexing for n={n}, d={d}")


def count_rho(n: int, d: int) -> int:
    _check_size(n, d)
    return math.comb(n + d, n)


def count_iota(n: int, d: int) -> int:
    """Number of independent slack matrices: (rho^2 + rho)/2 - C(n+2d, 2d)."""
    rho = count_rho(n, d)
    return (rho * rho + rho) // 2 - math.comb(n + 2 * d, 2 * d)


@dataclass(frozen=True)
class MonomialBasis:
    n: int
    d: int
    exponents: Tuple[Exponent, ...]

    @property
    def rho(self) -> int:
        return len(self.exponents)

    @cached_property
    def powers(self) -> np.ndarray:
        return np.array([e.powers for e in self.exponents], dtype=np.int64)

    @cached_property
    def index(self) -> Dict[Tuple[int, ...], int]:
        return {e.powers: i for i, e in enumerate(self.exponents)}

    @cached_property
    def codomain(self) -> "MonomialBasis":
        """Exponents of degree <= 2d, indexing the output of gram_map."""
        return _raw_basis(self.n, 2 * self.d)

    @cached_property
    def product_index(self) -> np.ndarray:
        """product_index[a, b] = codomain position of exponent_a + exponent_b."""
        lookup = self.codomain.index
        table = np.empty((self.rho, self.rho), dtype=np.int64)
        for a, ea in enumerate(self.exponents):
            for b in range(a, self.rho):
                table[a, b] = table[b, a] = lookup[(ea + self.exponents[b]).powers]
        return table

    def position(self, powers: Sequence[int]) -> int:
        key = tuple(int(p) for p in powers)
        if key not in self.index:
            raise InputError(f"monomial {key} is not in the degree-{self.d} basis")
        return self.index[key]

    def labels(self, names: Sequence[str] = ()) -> List[str]:
        return [e.label(names) for e in self.exponents]


def _raw_basis(n: int, d: int) -> MonomialBasis:
    exponents: List[Exponent] = []
    for degree in range(d + 1):
        exponents.extend(_exponents_of_degree(n, degree))
    return MonomialBasis(n=n, d=d, exponents=tuple(exponents))


def build_basis(n: int, d: int) -> MonomialBasis:
    _check_size(n, d)
    basis = _raw_basis(n, d)
    if basis.rho != math.comb(n + d, n):
        raise ConsistencyError(f"basis has {basis.rho} entries, expected C({n + d},{n})")
    return basis


def eval_chi(basis: MonomialBasis, x: np.ndarray) -> np.ndarray:
    """Evaluate chi at x; a trailing axis of length n is mapped to length rho."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != basis.n:
        raise InputError(f"expected {basis.n} coordinates, got shape {x.shape}")
    return np.prod(x[..., None, :] ** basis.powers, axis=-1)


def gram_codomain(basis: MonomialBasis) -> List[Exponent]:
    return list(basis.codomain.exponents)


def gram_map(basis: MonomialBasis, X: np.ndarray) -> np.ndarray:
    """Coefficients of chi^T X chi over the degree <= 2d monomials."""
    X = np.asarray(X, dtype=float)
    if X.shape != (basis.rho, basis.rho):
        raise InputError(f"Gram matrix must be {basis.rho}x{basis.rho}, got {X.shape}")
    return np.bincount(
        basis.product_index.ravel(), weights=X.ravel(), minlength=basis.codomain.rho
    )


@dataclass(frozen=True)
class SlackBasis:
    Q: Tuple[np.ndarray, ...]

    @property
    def iota(self) -> int:
        return len(self.Q)

    def stacked(self, rho: int) -> np.ndarray:
        if not self.Q:
            return np.zeros((0, rho, rho))
        return np.stack(self.Q).astype(float)


def _representation(rho: int, a: int, b: int) -> np.ndarray:
    # twice the symmetric matrix R with chi^T R chi = chi_a chi_b
    R = np.zeros((rho, rho), dtype=np.int64)
    if a == b:
        R[a, a] = 2
    else:
        R[a, b] = R[b, a] = 1
    return R


def build_slack_basis(basis: MonomialBasis) -> SlackBasis:
    groups: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    table = basis.product_index
    for a in range(basis.rho):
        for b in range(a, basis.rho):
            groups[int(table[a, b])].append((a, b))

    matrices = []
    for target in sorted(groups):
        reps = groups[target]
        for first, second in zip(reps, reps[1:]):
            matrices.append(
                _representation(basis.rho, *first) - _representation(basis.rho, *second)
            )

    expected = count_iota(basis.n, basis.d)
    if len(matrices) != expected:
        raise ConsistencyError(
            f"slack construction produced {len(matrices)} matrices, expected {expected}"
        )
    return SlackBasis(Q=tuple(matrices))


def selector_gamma(basis: MonomialBasis) -> np.ndarray:
    """n x rho selector with Gamma @ chi(x) == x."""
    gamma = np.zeros((basis.n, basis.rho))
    for i in range(basis.n):
        unit = [0] * basis.n
        unit[i] = 1
        gamma[i, basis.position(unit)] = 1.0
    return gamma


def selector_pi(basis: MonomialBasis) -> np.ndarray:
    """(rho-1) x rho selector dropping the constant entry of chi."""
    return np.eye(basis.rho)[1:]
