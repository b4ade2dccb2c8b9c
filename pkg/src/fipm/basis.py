"""Orthonormal polynomial basis and Gauss quadrature for a uniform random input.

The random variable xi is uniform on [-1, 1] with probability density 1/2, so
expectations are <g> = (1/2) * int_{-1}^{1} g(xi) dxi.  Quadrature weights are
normalized to sum to one and the basis functions phi_i = sqrt(2i+1) * P_i are
orthonormal with respect to the probability measure:

    <phi_i * phi_j> = delta_ij.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


class Family(enum.Enum):
    """Classical orthogonal polynomial families."""

    LEGENDRE = "legendre"
    CHEBYSHEV = "chebyshev"
    HERMITE = "hermite"
    LAGUERRE = "laguerre"


def eigenvalue(family: Family, i: int) -> float:
    """Eigenvalue mu_i of the Sturm-Liouville operator the family diagonalizes.

    The families satisfy (1/omega) d/dxi (kappa * d phi_i/dxi) = mu_i * phi_i
    with the classical weight omega and coefficient kappa; mu_0 = 0 and
    mu_i <= 0 always.
    """
    if i < 0:
        raise ValueError(f"basis index must be nonnegative, got {i}")
    if family is Family.LEGENDRE:
        return -float(i * (i + 1))
    if family is Family.CHEBYSHEV:
        return -float(i * i)
    if family is Family.HERMITE:
        return -2.0 * i
    if family is Family.LAGUERRE:
        return -float(i)
    raise ConfigError(f"unknown polynomial family: {family!r}")


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and probability-normalized weights."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.size


def gauss_rule(n_q: int) -> QuadratureRule:
    """Gauss-Legendre rule with n_q nodes; weights sum to one.

    Exact for polynomials up to degree 2*n_q - 1 against the probability
    measure of the uniform input.
    """
    if n_q < 1:
        raise ValueError(f"need at least one quadrature node, got {n_q}")
    nodes, weights = np.polynomial.legendre.leggauss(n_q)
    return QuadratureRule(nodes=nodes, weights=weights / 2.0)


def _legendre_rows(degree: int, xi: np.ndarray) -> np.ndarray:
    """P_0..P_degree at xi via the three-term recurrence; shape (*xi.shape, degree+1)."""
    out = np.empty(xi.shape + (degree + 1,))
    out[..., 0] = 1.0
    if degree >= 1:
        out[..., 1] = xi
    for k in range(1, degree):
        out[..., k + 1] = ((2 * k + 1) * xi * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


def basis_eval(i: int, xi):
    """Evaluate phi_i = sqrt(2i+1) * P_i at xi (scalar or array), |xi| <= 1."""
    if i < 0:
        raise ValueError(f"basis index must be nonnegative, got {i}")
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(np.abs(xi_arr) > 1.0):
        raise ValueError("evaluation point outside [-1, 1]")
    val = np.sqrt(2 * i + 1) * _legendre_rows(i, xi_arr)[..., i]
    return float(val) if np.ndim(xi) == 0 else val


def vandermonde(degree: int, nodes) -> np.ndarray:
    """Matrix Phi with Phi[q, i] = phi_i(nodes[q]), i = 0..degree."""
    nodes = np.asarray(nodes, dtype=float)
    if np.any(np.abs(nodes) > 1.0):
        raise ValueError("evaluation point outside [-1, 1]")
    scale = np.sqrt(2 * np.arange(degree + 1) + 1)
    return _legendre_rows(degree, nodes) * scale


@dataclass(frozen=True)
class BasisSet:
    """Orthonormal basis of a family truncated at a polynomial degree."""

    degree: int
    family: Family = Family.LEGENDRE

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be nonnegative, got {self.degree}")

    @property
    def size(self) -> int:
        return self.degree + 1

    def eigenvalues(self) -> np.ndarray:
        return np.array([eigenvalue(self.family, i) for i in range(self.size)])

    def eval(self, i: int, xi):
        if self.family is not Family.LEGENDRE:
            raise NotImplementedError("only the Legendre basis is evaluated")
        return basis_eval(i, xi)
