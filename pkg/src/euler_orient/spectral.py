"""Laplacian linear algebra: spectra, norms, condition numbers and exact determinants.

Integer matrices are kept as ``int64`` numpy arrays (entries are bounded by
``n``); determinants that must be exact go through :func:`bareiss_det`,
which works on Python ints and never rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .graph import Graph, is_connected

__all__ = [
    "SpectralSummary",
    "laplacian",
    "qhat",
    "eigenvalues",
    "spectral_summary",
    "algebraic_connectivity",
    "bareiss_det",
    "spanning_tree_count",
    "det_qhat_exact",
    "log_det_qhat",
    "spectral_norm",
    "matrix_norm",
    "condition_number",
    "truncated_logdet",
]


def laplacian(g: Graph) -> np.ndarray:
    q = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        q[u, v] = q[v, u] = -1
        q[u, u] += 1
        q[v, v] += 1
    return q


def qhat(g: Graph) -> np.ndarray:
    """``Q + J``: the Laplacian with the all-ones matrix added."""
    return laplacian(g) + 1


def eigenvalues(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending.

    Integer input must be exactly symmetric; float input symmetric to ``tol``
    relative to its largest entry.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if np.issubdtype(m.dtype, np.integer):
        if not np.array_equal(m, m.T):
            raise ValueError("matrix is not symmetric")
    else:
        scale = max(float(np.abs(m).max(initial=0.0)), 1.0)
        if np.abs(m - m.T).max(initial=0.0) > tol * scale:
            raise ValueError("matrix is not symmetric")
    try:
        return np.linalg.eigvalsh(m.astype(float))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: tuple[float, ...]
    lambda2: float
    lambda_n: float
    gamma: float


def spectral_summary(g: Graph) -> SpectralSummary:
    ev = eigenvalues(laplacian(g))
    lam2 = float(ev[1]) if g.n > 1 else 0.0
    # eigensolver noise around a zero eigenvalue; connectivity itself is decided by traversal
    if g.n > 1 and not is_connected(g):
        lam2 = 0.0
    return SpectralSummary(tuple(float(x) for x in ev), lam2, float(ev[-1]), lam2 / g.n)


def algebraic_connectivity(g: Graph) -> float:
    """Second-smallest Laplacian eigenvalue, exactly 0 for disconnected graphs."""
    return spectral_summary(g).lambda2


# -- exact determinants -----------------------------------------------------------


def bareiss_det(rows) -> int:
    """Determinant of an integer matrix by fraction-free elimination.

    Every intermediate quotient is exact, so the result is the exact integer
    determinant regardless of size.
    """
    a = [[int(x) for x in row] for row in rows]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            lead = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def spanning_tree_count(g: Graph) -> int:
    """Number of spanning trees: the Laplacian minor with row/column 0 removed."""
    if g.n == 1:
        return 1
    q = laplacian(g)
    return bareiss_det(q[1:, 1:].tolist())


def det_qhat_exact(g: Graph) -> int:
    return bareiss_det(qhat(g).tolist())


def log_det_qhat(g: Graph) -> float:
    """Natural log of ``det(Q + J)``; ``-inf`` when the graph is disconnected."""
    d = det_qhat_exact(g)
    return math.log(d) if d > 0 else -math.inf


# -- norms ------------------------------------------------------------------------


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value, as the square root of the top eigenvalue of ``M^T M``."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    top = eigenvalues(m.T @ m, tol=1e-9)[-1]
    return math.sqrt(max(float(top), 0.0))


def matrix_norm(m: np.ndarray, p) -> float:
    """Induced matrix norm for ``p`` in ``{1, 2, inf}``."""
    m = np.asarray(m, dtype=float)
    if p == 1:
        return float(np.abs(m).sum(axis=0).max())
    if p == 2:
        return spectral_norm(m)
    if p in (math.inf, "inf"):
        return float(np.abs(m).sum(axis=1).max())
    raise ValueError(f"unsupported norm p={p!r}")


def condition_number(m: np.ndarray, p) -> float:
    m = np.asarray(m, dtype=float)
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise ValueError("matrix is singular") from exc
    if not np.all(np.isfinite(inv)):
        raise ValueError("matrix is singular")
    return matrix_norm(m, p) * matrix_norm(inv, p)


def truncated_logdet(x: np.ndarray, order: int) -> tuple[float, float]:
    """Trace-series approximation of ``log det(I + X)`` and its error bound.

    Returns ``(approx, bound)`` with ``approx = sum_{r<order} (-1)^(r+1) tr(X^r)/r``
    and ``bound = (n/order) * ||X||_2^order / (1 - ||X||_2)``.
    """
    x = np.asarray(x, dtype=float)
    if order < 2:
        raise ValueError("order must be at least 2")
    n = x.shape[0]
    norm = spectral_norm(x)
    if norm >= 1:
        raise ValueError(f"||X||_2 = {norm:.6g} must be < 1")
    approx = 0.0
    power = np.eye(n)
    for r in range(1, order):
        power = power @ x
        approx += (-1) ** (r + 1) * float(np.trace(power)) / r
    bound = n / order * norm**order / (1 - norm)
    return approx, bound
