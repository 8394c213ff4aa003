"""Gauss-Legendre quadrature with node-doubling stability control."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

QUAD_TOL_ENV = "BREATHINGBOX_QUAD_TOL"


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre rule parameters.

    nodes is the starting count; adaptive integration doubles it until
    the result moves by less than tolerance, up to max_nodes.
    """

    nodes: int = 16
    tolerance: float = 1e-10
    max_nodes: int = 2048

    def __post_init__(self):
        if self.nodes < 16:
            raise ValueError(f"quadrature nodes must be >= 16, got {self.nodes}")
        if self.tolerance <= 0:
            raise ValueError(f"quadrature tolerance must be > 0, got {self.tolerance}")
        if self.max_nodes < self.nodes:
            raise ValueError("quadrature max_nodes must be >= nodes")


def default_quadrature_spec() -> QuadratureSpec:
    """Default spec, honoring the BREATHINGBOX_QUAD_TOL override."""
    raw = os.environ.get(QUAD_TOL_ENV)
    if raw is None:
        return QuadratureSpec()
    try:
        tol = float(raw)
    except ValueError as exc:
        raise QuadratureError(f"quadrature: {QUAD_TOL_ENV}={raw!r} is not a number") from exc
    return QuadratureSpec(tolerance=tol)


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def nodes_weights(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights scaled to [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def fixed_quad(f, a: float, b: float, n: int) -> float:
    """n-node Gauss-Legendre integral of a vectorized integrand on [a, b]."""
    x, w = nodes_weights(a, b, n)
    return float(np.dot(w, f(x)))


def adaptive_quad(f, a: float, b: float, spec: QuadratureSpec | None = None,
                  label: str = "integrand") -> float:
    """Integrate with node doubling until successive values stabilize.

    Raises QuadratureError when max_nodes is reached without the change
    between doublings dropping below spec.tolerance.
    """
    spec = spec or default_quadrature_spec()
    n = spec.nodes
    previous = fixed_quad(f, a, b, n)
    while n < spec.max_nodes:
        n *= 2
        current = fixed_quad(f, a, b, n)
        if abs(current - previous) <= spec.tolerance:
            return current
        previous = current
    raise QuadratureError(
        f"quadrature: {label} did not stabilize to {spec.tolerance:.1e} "
        f"within {spec.max_nodes} Gauss-Legendre nodes")
