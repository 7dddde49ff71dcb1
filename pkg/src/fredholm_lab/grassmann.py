"""Subspaces of a finite-dimensional complex inner-product space.

A :class:`Subspace` is stored as an orthonormal column frame. Sums,
intersections and complements return new frames; equality is decided by
the gap (projector-norm) metric, never by comparing frames entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fredholm_lab.errors import DimensionMismatch, SingularMap
from fredholm_lab.numeric import (
    Tolerance,
    as_matrix,
    as_square,
    min_singular_value,
    null_space,
    orthonormalize,
    resolve_tol,
    spectral_norm,
)


class Subspace:
    """Subspace of ``C^n`` held as an orthonormal ``n x k`` frame.

    Use :meth:`span` to build one from arbitrary generators; the bare
    constructor trusts that ``frame`` already has orthonormal columns.
    """

    __slots__ = ("_frame",)

    def __init__(self, frame):
        f = np.array(as_matrix(frame, name="frame"), dtype=complex)
        f.setflags(write=False)
        self._frame = f

    @classmethod
    def span(cls, generators, tol: Tolerance | None = None, ambient: int | None = None):
        g = np.asarray(generators, dtype=complex)
        if g.ndim == 1:
            g = g.reshape(-1, 1)
        if ambient is not None and g.size == 0:
            g = np.zeros((ambient, 0), dtype=complex)
        return cls(orthonormalize(g, tol))

    @classmethod
    def zero(cls, n: int):
        return cls(np.zeros((n, 0), dtype=complex))

    @classmethod
    def full(cls, n: int):
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def coordinate(cls, n: int, indices):
        """Span of the standard basis vectors ``e_i`` (0-based) in ``C^n``."""
        return cls(np.eye(n, dtype=complex)[:, list(indices)])

    @property
    def frame(self) -> np.ndarray:
        return self._frame

    @property
    def ambient_dim(self) -> int:
        return self._frame.shape[0]

    @property
    def dim(self) -> int:
        return self._frame.shape[1]

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def projector(self) -> np.ndarray:
        return projector(self)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


@dataclass(frozen=True)
class PairIndexReport:
    dim_cap: int
    codim_sum: int
    index: int
    transversal: bool

    def to_dict(self):
        return {
            "dim_cap": self.dim_cap,
            "codim_sum": self.codim_sum,
            "index": self.index,
            "transversal": self.transversal,
        }


def _same_ambient(s: Subspace, t: Subspace):
    if s.ambient_dim != t.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {s.ambient_dim} vs {t.ambient_dim}")


def projector(s: Subspace) -> np.ndarray:
    f = s.frame
    return f @ f.conj().T


def complement(s: Subspace, within: Subspace | None = None) -> Subspace:
    """Orthogonal complement of ``s`` in the ambient space (or in ``within``)."""
    if within is None:
        if s.dim == 0:
            return Subspace.full(s.ambient_dim)
        u = np.linalg.svd(s.frame, full_matrices=True)[0]
        return Subspace(u[:, s.dim:])
    # complement inside ``within``: kernel of F_s^H restricted to within's coordinates
    coeffs = null_space(s.frame.conj().T @ within.frame, scale=1.0)
    return Subspace(_orthonormal_product(within.frame, coeffs))


def _orthonormal_product(frame: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    q = frame @ coeffs
    if q.shape[1] == 0:
        return q
    # re-orthonormalize without dropping columns (coeffs already orthonormal)
    qq, r = np.linalg.qr(q)
    return qq * np.sign(np.real(np.diag(r)) + (np.real(np.diag(r)) == 0))


def principal_cosines(s: Subspace, t: Subspace) -> np.ndarray:
    """Cosines of the principal angles between ``s`` and ``t``, descending."""
    _same_ambient(s, t)
    if s.dim == 0 or t.dim == 0:
        return np.zeros(0)
    return np.clip(np.linalg.svd(s.frame.conj().T @ t.frame, compute_uv=False), 0.0, 1.0)


def intersect(s: Subspace, t: Subspace, tol: Tolerance | None = None) -> Subspace:
    """Span of the principal vectors of ``s`` whose angle cosine is >= 1 - gap_abs."""
    tol = resolve_tol(tol)
    _same_ambient(s, t)
    if s.dim == 0 or t.dim == 0:
        return Subspace.zero(s.ambient_dim)
    u, c, vh = np.linalg.svd(s.frame.conj().T @ t.frame)
    r = int(np.count_nonzero(c >= 1.0 - tol.gap_abs))
    if r == 0:
        return Subspace.zero(s.ambient_dim)
    # average the two sides' principal vectors: symmetric in (s, t)
    vs = s.frame @ u[:, :r]
    vt = t.frame @ vh.conj().T[:, :r]
    return Subspace(orthonormalize(vs + vt, tol, scale=1.0)[:, :r])


def sum(s: Subspace, t: Subspace, tol: Tolerance | None = None) -> Subspace:  # noqa: A001
    _same_ambient(s, t)
    return Subspace(orthonormalize(np.hstack([s.frame, t.frame]), tol, scale=1.0))


def direct_sum(*parts: Subspace) -> Subspace:
    """Orthogonal direct sum of mutually orthogonal subspaces (no rank decision)."""
    n = parts[0].ambient_dim
    for p in parts:
        if p.ambient_dim != n:
            raise DimensionMismatch("ambient dimensions differ")
    f = np.hstack([p.frame for p in parts])
    if f.shape[1] == 0:
        return Subspace.zero(n)
    return Subspace(_orthonormal_product(f, np.eye(f.shape[1])))


def gap_distance(s: Subspace, t: Subspace) -> float:
    _same_ambient(s, t)
    return spectral_norm(projector(s) - projector(t))


def equal(s: Subspace, t: Subspace, tol: Tolerance | None = None) -> bool:
    return gap_distance(s, t) <= resolve_tol(tol).gap_abs


def contains(big: Subspace, small: Subspace, tol: Tolerance | None = None) -> bool:
    """``small`` is a subspace of ``big`` within gap_abs."""
    _same_ambient(big, small)
    if small.dim == 0:
        return True
    residual = small.frame - projector(big) @ small.frame
    return spectral_norm(residual) <= resolve_tol(tol).gap_abs


def pair_index(s: Subspace, t: Subspace, tol: Tolerance | None = None,
               within: Subspace | None = None) -> PairIndexReport:
    """Index ``dim(s & t) - codim(s + t)`` of a pair.

    ``within`` sets the space in which the codimension is measured (both
    subspaces must lie in it); by default the ambient space.
    """
    tol = resolve_tol(tol)
    total = s.ambient_dim if within is None else within.dim
    cap = intersect(s, t, tol).dim
    codim = total - sum(s, t, tol).dim
    return PairIndexReport(dim_cap=cap, codim_sum=codim, index=cap - codim,
                           transversal=(cap == 0 and codim == 0))


def map_subspace(f, s: Subspace, tol: Tolerance | None = None) -> Subspace:
    """Image ``f(s)`` under an invertible matrix."""
    tol = resolve_tol(tol)
    f = as_square(f, name="map")
    if f.shape[0] != s.ambient_dim:
        raise DimensionMismatch("map size does not match ambient dimension")
    n = f.shape[0]
    smin = min_singular_value(f)
    smax = spectral_norm(f)
    if n and smin <= tol.rank_rel * n * smax:
        raise SingularMap(f"smallest singular value {smin:.3e} below threshold")
    if s.dim == 0:
        return Subspace.zero(n)
    img = orthonormalize(f @ s.frame, tol)
    if img.shape[1] != s.dim:
        raise SingularMap("image lost dimension")
    return Subspace(img)


def coordinates(s: Subspace, basis: Subspace) -> Subspace:
    """Express ``s`` (lying in ``basis``) in the orthonormal coordinates of ``basis``."""
    _same_ambient(s, basis)
    if s.dim == 0:
        return Subspace.zero(basis.dim)
    return Subspace(_orthonormal_product(basis.frame.conj().T @ s.frame, np.eye(s.dim)))


def embed(coords: Subspace, basis: Subspace) -> Subspace:
    """Inverse of :func:`coordinates`."""
    if coords.ambient_dim != basis.dim:
        raise DimensionMismatch("coordinate dimension does not match basis")
    if coords.dim == 0:
        return Subspace.zero(basis.ambient_dim)
    return Subspace(_orthonormal_product(basis.frame @ coords.frame, np.eye(coords.dim)))


def orthogonal_sum_ambient(s: Subspace, t: Subspace) -> Subspace:
    """``s (+) t`` inside ``C^n (+) C^m`` (block-diagonal stacking)."""
    n, m = s.ambient_dim, t.ambient_dim
    f = np.zeros((n + m, s.dim + t.dim), dtype=complex)
    f[:n, : s.dim] = s.frame
    f[n:, s.dim:] = t.frame
    return Subspace(f)
