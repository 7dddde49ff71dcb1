"""Tolerance-aware dense complex linear algebra.

All "is this subspace closed / are these equal / what is the dimension"
questions in the library reduce to singular-value threshold decisions
made here.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from fredholm_lab.errors import DimensionMismatch, NonFinite, NotIdempotent, SingularPivot


@dataclass(frozen=True)
class Tolerance:
    """Thresholds for rank and subspace-equality decisions.

    Parameters
    ----------
    rank_rel : float
        Relative singular-value threshold; a singular value counts iff
        ``s > rank_rel * max(shape) * scale``.
    gap_abs : float
        Absolute threshold on projector-norm distances (containment,
        equality, unitarity, closure checks).
    """

    rank_rel: float = 1e-10
    gap_abs: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel", "gap_abs"):
            value = getattr(self, name)
            if not (np.isfinite(value) and 0.0 < value < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")


_default_tol = Tolerance()


def get_default_tol() -> Tolerance:
    return _default_tol


def set_default_tol(tol: Tolerance) -> None:
    global _default_tol
    if not isinstance(tol, Tolerance):
        raise TypeError("expected a Tolerance")
    _default_tol = tol


@contextlib.contextmanager
def default_tol(tol: Tolerance):
    """Temporarily replace the global default tolerance."""
    previous = get_default_tol()
    set_default_tol(tol)
    try:
        yield tol
    finally:
        set_default_tol(previous)


def resolve_tol(tol: Tolerance | None) -> Tolerance:
    return _default_tol if tol is None else tol


def as_matrix(m, rows: int | None = None, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex array, rejecting NaN/inf and wrong row counts."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if rows is not None and a.shape[0] != rows:
        raise DimensionMismatch(f"{name} must have {rows} rows, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains non-finite entries")
    return a


def as_square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name=name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def _threshold(s: np.ndarray, shape, tol: Tolerance, scale: float | None) -> float:
    ref = s[0] if scale is None else max(scale, s[0] if s.size else 0.0)
    return tol.rank_rel * max(shape) * ref


def numerical_rank(m, tol: Tolerance | None = None, scale: float | None = None) -> int:
    """Number of singular values above ``rank_rel * max(rows, cols) * sigma_max``.

    ``scale`` replaces ``sigma_max`` by ``max(scale, sigma_max)``; pass the
    known input norm (e.g. 1 for projected orthonormal columns) so that an
    entirely cancelled matrix still reports rank 0.
    """
    tol = resolve_tol(tol)
    a = as_matrix(m)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > _threshold(s, a.shape, tol, scale)))


def orthonormalize(m, tol: Tolerance | None = None, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column space of ``m``.

    Returns an ``rows x r`` array with ``r = numerical_rank(m)``; ``r`` may
    be zero.
    """
    tol = resolve_tol(tol)
    a = as_matrix(m)
    n, k = a.shape
    if k == 0 or n == 0:
        return np.zeros((n, 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((n, 0), dtype=complex)
    r = int(np.count_nonzero(s > _threshold(s, a.shape, tol, scale)))
    return _fix_phases(u[:, :r])


def _fix_phases(q: np.ndarray) -> np.ndarray:
    # make the largest-modulus entry of each column real positive so that
    # frames do not depend on LAPACK's arbitrary column phases
    if q.shape[1] == 0:
        return q
    idx = np.argmax(np.abs(q) > np.abs(q).max(axis=0) * (1 - 1e-6), axis=0)
    pivots = q[idx, np.arange(q.shape[1])]
    return q * (np.abs(pivots) / pivots)


def null_space(m, tol: Tolerance | None = None, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the kernel of ``m`` (complement of its row space)."""
    tol = resolve_tol(tol)
    a = as_matrix(m)
    rows, k = a.shape
    if k == 0:
        return np.zeros((0, 0), dtype=complex)
    if rows == 0:
        return np.eye(k, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > _threshold(s, a.shape, tol, scale)))
    return _fix_phases(vh[r:].conj().T)


def gram_schmidt_columns(m, tol: Tolerance | None = None) -> np.ndarray:
    """Deterministic classical Gram-Schmidt (twice) over the columns of ``m``.

    Columns whose residual norm falls below the rank threshold are skipped,
    so the result is a canonical basis determined by column order alone.
    """
    tol = resolve_tol(tol)
    a = as_matrix(m)
    n = a.shape[0]
    cut = tol.rank_rel * max(a.shape) * max(1.0, float(np.abs(a).max(initial=0.0)))
    basis = np.zeros((n, 0), dtype=complex)
    for j in range(a.shape[1]):
        v = a[:, j].copy()
        for _ in range(2):
            v -= basis @ (basis.conj().T @ v)
        norm = np.linalg.norm(v)
        if norm > cut:
            basis = np.column_stack([basis, v / norm])
    return basis


def spectral_norm(m) -> float:
    a = np.asarray(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def is_hermitian(m, tol: Tolerance | None = None) -> bool:
    tol = resolve_tol(tol)
    a = as_square(m)
    return spectral_norm(a - a.conj().T) <= tol.gap_abs


def is_unitary(m, tol: Tolerance | None = None) -> bool:
    tol = resolve_tol(tol)
    a = as_square(m)
    return spectral_norm(a.conj().T @ a - np.eye(a.shape[0])) <= tol.gap_abs


def min_singular_value(m) -> float:
    a = as_matrix(m)
    if a.size == 0:
        return np.inf
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def idempotent_to_projector(t, tol: Tolerance | None = None) -> np.ndarray:
    """Orthogonal projector onto the range of an idempotent ``t``.

    Uses the closed formula ``t (t + t^H - 1)^{-1}``; the pivot
    ``t + t^H - 1`` is invertible for every idempotent.
    """
    tol = resolve_tol(tol)
    t = as_square(t, name="idempotent")
    n = t.shape[0]
    if spectral_norm(t @ t - t) > tol.gap_abs:
        raise NotIdempotent(f"||t^2 - t|| = {spectral_norm(t @ t - t):.3e}")
    pivot = t + t.conj().T - np.eye(n)
    if n == 0:
        return t.copy()
    s = np.linalg.svd(pivot, compute_uv=False)
    if s[-1] <= tol.rank_rel * n * max(s[0], 1.0):
        raise SingularPivot("t + t^H - 1 is numerically singular")
    # right division p = t pivot^{-1}, solved as pivot^H p^H = t^H
    p = scipy.linalg.solve(pivot.conj().T, t.conj().T).conj().T
    return (p + p.conj().T) / 2
