"""
Polynomial candidate-function dictionary.

Terms are ordered by total degree, ties broken lexicographically on the
exponent tuple (x1 before x2). The ordering is shared by true coefficients,
learned coefficients and support comparisons.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple, List

import numpy as np
from sklearn.preprocessing import PolynomialFeatures


@dataclass(frozen=True)
class DictionarySpec:
    """Ordered monomial basis.

    Attributes:
        dim: Number of state variables n
        degree: Maximum total degree d
        terms: Exponent tuples, one per dictionary column
    """
    dim: int
    degree: int
    terms: Tuple[Tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def powers(self) -> np.ndarray:
        """Exponent matrix of shape (m, n)."""
        return np.array(self.terms, dtype=int).reshape(self.m, self.dim)

    def index(self, exponents: Tuple[int, ...]) -> int:
        return self.terms.index(tuple(exponents))


@dataclass(frozen=True)
class DictionaryMatrix:
    values: np.ndarray
    spec: DictionarySpec


@dataclass(frozen=True)
class CoefficientMatrix:
    """m x n coefficient matrix W; rows follow spec.terms, columns the state.

    spec is None only for bare regression problems without a dictionary.
    """
    values: np.ndarray
    spec: Optional[DictionarySpec] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"Coefficient matrix must be 2-D, got shape {values.shape}")
        if self.spec is not None and values.shape != (self.spec.m, self.spec.dim):
            raise ValueError(
                f"Coefficient shape {values.shape} does not match dictionary "
                f"({self.spec.m}, {self.spec.dim})"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def support(self) -> np.ndarray:
        return self.values != 0


@lru_cache(maxsize=16)
def _transformer(dim: int, degree: int) -> PolynomialFeatures:
    # PolynomialFeatures enumerates combinations with replacement per degree,
    # which is exactly degree-then-lex on the exponent tuples.
    return PolynomialFeatures(degree=degree, include_bias=True).fit(np.zeros((1, dim)))


def build_spec(n: int, d: int) -> DictionarySpec:
    """Build the canonical polynomial dictionary.

    Args:
        n: State dimension (>= 1)
        d: Maximum total degree (>= 0)

    Returns:
        DictionarySpec: C(n+d, d) terms, constant first
    """
    if n < 1:
        raise ValueError(f"Dictionary dimension must be >= 1, got {n}")
    if d < 0:
        raise ValueError(f"Dictionary degree must be >= 0, got {d}")
    terms = tuple(tuple(int(p) for p in row) for row in _transformer(n, d).powers_)
    return DictionarySpec(dim=n, degree=d, terms=terms)


def evaluate(spec: DictionarySpec, data) -> DictionaryMatrix:
    """Evaluate Theta(Y) on data snapshots.

    Args:
        spec: Dictionary specification
        data: Trajectory, or array of shape (k, n) / (n,)

    Returns:
        DictionaryMatrix: k x m monomial evaluations
    """
    states = getattr(data, "states", data)
    states = np.atleast_2d(np.asarray(states, dtype=np.float64))
    if states.shape[1] != spec.dim:
        raise ValueError(
            f"Data has {states.shape[1]} state components, dictionary expects {spec.dim}"
        )
    poly = _transformer(spec.dim, spec.degree)
    if not np.array_equal(poly.powers_, spec.powers):
        raise ValueError("Dictionary terms are not in canonical order; rebuild the spec with build_spec")
    return DictionaryMatrix(values=poly.transform(states), spec=spec)


def term_name(alpha: Tuple[int, ...]) -> str:
    factors = []
    for i, power in enumerate(alpha):
        if power == 1:
            factors.append(f"x{i + 1}")
        elif power > 1:
            factors.append(f"x{i + 1}^{power}")
    return " ".join(factors) if factors else "1"


def term_names(spec: DictionarySpec) -> List[str]:
    """Human-readable names ("1", "x1", "x1 x2", "x2^2") in spec order."""
    return [term_name(alpha) for alpha in spec.terms]
