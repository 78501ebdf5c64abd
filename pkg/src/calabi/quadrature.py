"""Composite Gauss-Legendre quadrature and Richardson limit extrapolation."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NumericError

__all__ = ["gauss_legendre", "panel_nodes", "richardson_limit"]

DEFAULT_NODES = 32
DEFAULT_PANELS = 64


@lru_cache(maxsize=16)
def _reference_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def panel_nodes(a: float, b: float, nodes: int = DEFAULT_NODES, panels: int = DEFAULT_PANELS):
    """Flattened nodes and weights of the composite rule on ``[a, b]``."""
    if panels < 1 or nodes < 1:
        raise ValueError("nodes and panels must be positive")
    x, w = _reference_rule(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def gauss_legendre(f, a: float, b: float, nodes: int = DEFAULT_NODES, panels: int = DEFAULT_PANELS) -> float:
    """``int_a^b f`` with ``panels`` equal panels of ``nodes``-point Gauss-Legendre.

    ``f`` must accept a numpy array.
    """
    pts, wts = panel_nodes(a, b, nodes, panels)
    total = float(np.dot(wts, f(pts)))
    if not np.isfinite(total):
        raise NumericError(f"non-finite quadrature on [{a}, {b}]")
    return total


def richardson_limit(values, ratio: float = 0.5, first_power: int = 1) -> tuple[float, float]:
    """Limit as ``h -> 0`` of samples taken at ``h_k = h_0 * ratio**k``.

    Assumes an error expansion in integer powers ``h^first_power, h^(first_power+1), ...``.
    Returns ``(estimate, error_estimate)``; the error estimate is the gap
    between the last two diagonal entries of the tableau.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size == 0:
        raise ValueError("need a non-empty 1-D sequence")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    table = [vals.copy()]
    for j in range(1, vals.size):
        factor = ratio ** -(first_power + j - 1)
        prev = table[-1]
        table.append((factor * prev[1:] - prev[:-1]) / (factor - 1.0))
    diag = [row[-1] for row in table]
    err = abs(diag[-1] - diag[-2]) if len(diag) > 1 else float("inf")
    return float(diag[-1]), float(err)
