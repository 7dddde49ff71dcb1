"""Complex symplectic structure omega(x, y) = <J x, y> and Lagrangian subspaces.

Unitary picture
---------------
``J`` is a skew-adjoint unitary, so the space splits into the two
eigenspaces of ``J``. Following the standard-space computation this
library reproduces, the *source* space is ``plus = ker(J + i)`` (for the
standard ``J`` this is ``{x (+) i x}``) and the *target* is
``minus = ker(J - i)`` (``{x (+) -i x}``). A Lagrangian ``L`` is the graph
of a unitary ``u_L : plus -> minus``. With this labelling the extended
Cayley transform of the graph of a Hermitian ``A`` is ``(A - i)(A + i)^-1``,
the horizontal subspace maps to ``-1`` and the vertical one to ``+1``.

Orthonormal bases of ``plus``/``minus`` are fixed once per space by
Gram-Schmidt on the eigen-projections of the standard basis; unitaries
are reported in those bases.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from fredholm_lab import grassmann as gr
from fredholm_lab.errors import (
    DimensionMismatch,
    NotAGraph,
    NotAnnihilator,
    NotHermitian,
    NotIsotropic,
    NotLagrangian,
    NotSymplectic,
    NotUnitary,
)
from fredholm_lab.extension import (
    NestedPair,
    OperatorPair,
    Realization,
    check_in_beta,
    graph,
    make_nested,
    pull_back,
    realization_from_graph,
)
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import (
    Tolerance,
    as_square,
    gram_schmidt_columns,
    is_hermitian,
    is_unitary,
    min_singular_value,
    resolve_tol,
    spectral_norm,
)


class SymplecticSpace:
    """Ambient ``C^d`` with a skew-adjoint unitary ``j``.

    ``standard_n`` is set for the standard space ``C^n (+) C^n`` built by
    :func:`standard_symplectic`.
    """

    def __init__(self, j, tol: Tolerance | None = None, standard_n: int | None = None):
        tol = resolve_tol(tol)
        j = as_square(j, name="j").copy()
        d = j.shape[0]
        if spectral_norm(j.conj().T + j) > tol.gap_abs:
            raise NotSymplectic("j is not skew-adjoint")
        if not is_unitary(j, tol):
            raise NotSymplectic("j is not unitary")
        j.setflags(write=False)
        self.j = j
        self.standard_n = standard_n
        eye = np.eye(d)
        self.plus_basis = gram_schmidt_columns((eye + 1j * j) / 2, tol)
        self.minus_basis = gram_schmidt_columns((eye - 1j * j) / 2, tol)
        for b in (self.plus_basis, self.minus_basis):
            b.setflags(write=False)
        if self.plus_basis.shape[1] + self.minus_basis.shape[1] != d:
            raise NotSymplectic("eigenspaces of j do not span the space")

    @property
    def ambient_dim(self) -> int:
        return self.j.shape[0]

    @property
    def plus(self) -> Subspace:
        return Subspace(self.plus_basis)

    @property
    def minus(self) -> Subspace:
        return Subspace(self.minus_basis)

    @property
    def has_lagrangians(self) -> bool:
        return self.plus_basis.shape[1] == self.minus_basis.shape[1]

    def __repr__(self):
        return f"SymplecticSpace(ambient={self.ambient_dim}, standard_n={self.standard_n})"


def standard_j(n: int) -> np.ndarray:
    z = np.zeros((n, n))
    eye = np.eye(n)
    return np.block([[z, -eye], [eye, z]]).astype(complex)


def standard_symplectic(n: int, tol: Tolerance | None = None) -> SymplecticSpace:
    return SymplecticSpace(standard_j(n), tol, standard_n=n)


def omega(sp: SymplecticSpace, xi, eta) -> complex:
    """``<J xi, eta>``, conjugate-linear in the first slot."""
    return complex(np.vdot(sp.j @ np.asarray(xi, dtype=complex), np.asarray(eta, dtype=complex)))


def annihilator(sp: SymplecticSpace, l: Subspace) -> Subspace:
    """``J (l^perp)``, the omega-annihilator of ``l``."""
    if l.ambient_dim != sp.ambient_dim:
        raise DimensionMismatch("subspace and symplectic space differ in dimension")
    return Subspace(sp.j @ gr.complement(l).frame)


def is_isotropic(sp: SymplecticSpace, l: Subspace, tol: Tolerance | None = None) -> bool:
    return gr.contains(annihilator(sp, l), l, tol)


def is_lagrangian(sp: SymplecticSpace, l: Subspace, tol: Tolerance | None = None) -> bool:
    ann = annihilator(sp, l)
    return ann.dim == l.dim and gr.gap_distance(ann, l) <= resolve_tol(tol).gap_abs


class LagrangianFrame:
    """A Lagrangian subspace with its unitary ``plus -> minus`` (in the space's bases)."""

    __slots__ = ("subspace", "unitary")

    def __init__(self, subspace: Subspace, unitary: np.ndarray):
        self.subspace = subspace
        self.unitary = unitary


def _graph_coordinates(sp: SymplecticSpace, l: Subspace, tol: Tolerance):
    x = sp.plus_basis.conj().T @ l.frame
    y = sp.minus_basis.conj().T @ l.frame
    k = x.shape[0]
    cut = tol.rank_rel * max(k, 1) * 10
    # a Lagrangian meets neither eigenspace, so both blocks are invertible
    if min_singular_value(x) <= cut or min_singular_value(y) <= cut:
        raise NotLagrangian("subspace meets an eigenspace of J")
    return x, y


def lagrangian_unitary(sp: SymplecticSpace, l: Subspace, tol: Tolerance | None = None) -> LagrangianFrame:
    tol = resolve_tol(tol)
    if not sp.has_lagrangians:
        raise NotLagrangian("eigenspaces of J have different dimensions")
    if not is_lagrangian(sp, l, tol):
        raise NotLagrangian("subspace is not Lagrangian")
    x, y = _graph_coordinates(sp, l, tol)
    u = np.linalg.solve(x.T, y.T).T
    if not is_unitary(u, tol):
        raise NotUnitary("extracted operator is not unitary")
    return LagrangianFrame(l, u)


def lagrangian_from_unitary(sp: SymplecticSpace, u) -> Subspace:
    """Graph of a unitary ``plus -> minus`` given in the space's bases."""
    u = as_square(u, name="unitary")
    if u.shape[0] != sp.plus_basis.shape[1] or not sp.has_lagrangians:
        raise DimensionMismatch("unitary does not match the eigenspace dimension")
    return Subspace((sp.plus_basis + sp.minus_basis @ u) / np.sqrt(2.0))


def cayley(a, tol: Tolerance | None = None) -> np.ndarray:
    """``(A - i)(A + i)^{-1}`` for Hermitian ``A``."""
    a = as_square(a, name="hermitian")
    if not is_hermitian(a, tol):
        raise NotHermitian("matrix is not Hermitian")
    eye = np.eye(a.shape[0])
    # (A - i) and (A + i)^{-1} commute
    return scipy.linalg.solve(a + 1j * eye, a - 1j * eye)


def kappa(sp: SymplecticSpace, l: Subspace, tol: Tolerance | None = None) -> np.ndarray:
    """Extended Cayley transform of a Lagrangian of the standard space ``H (+) H``.

    Uses the identifications ``x (+) (+-i x) -> sqrt(2) x`` directly, so the
    result is independent of the space's fixed bases.
    """
    tol = resolve_tol(tol)
    if sp.standard_n is None:
        raise DimensionMismatch("kappa needs the standard symplectic space")
    n = sp.standard_n
    if not is_lagrangian(sp, l, tol):
        raise NotLagrangian("subspace is not Lagrangian")
    eye = np.eye(n)
    plus_std = np.vstack([eye, 1j * eye]) / np.sqrt(2.0)
    minus_std = np.vstack([eye, -1j * eye]) / np.sqrt(2.0)
    x = plus_std.conj().T @ l.frame
    y = minus_std.conj().T @ l.frame
    v = np.linalg.solve(x.T, y.T).T
    return -v


def kappa_rel(sp: SymplecticSpace, l: Subspace, m: Subspace, tol: Tolerance | None = None) -> np.ndarray:
    """``u_m^{-1} u_l``, a unitary on ``plus``; equals 1 exactly when ``l = m``."""
    ul = lagrangian_unitary(sp, l, tol).unitary
    um = lagrangian_unitary(sp, m, tol).unitary
    return um.conj().T @ ul


def intersection_multiplicity(k_rel, tol: Tolerance | None = None) -> int:
    """Number of zero singular values of ``1 - k_rel`` (= ``dim(l & m)``)."""
    tol = resolve_tol(tol)
    k_rel = np.asarray(k_rel, dtype=complex)
    s = np.linalg.svd(np.eye(k_rel.shape[0]) - k_rel, compute_uv=False)
    # 1 - k_rel has norm <= 2, so the reference scale is fixed
    return int(np.count_nonzero(s <= tol.rank_rel * max(k_rel.shape[0], 1) * 2.0))


def lagrangian_transversal(sp: SymplecticSpace, l: Subspace, m: Subspace, tol: Tolerance | None = None) -> bool:
    return intersection_multiplicity(kappa_rel(sp, l, m, tol), tol) == 0


def isotropic_pair(sp: SymplecticSpace, gamma_min: Subspace, tol: Tolerance | None = None) -> NestedPair:
    """Nested pair ``(gamma, gamma^omega)`` for an isotropic ``gamma``."""
    tol = resolve_tol(tol)
    if not is_isotropic(sp, gamma_min, tol):
        raise NotIsotropic("subspace is not isotropic")
    return make_nested(gamma_min, annihilator(sp, gamma_min), tol)


def boundary_form(sp: SymplecticSpace, p: NestedPair, tol: Tolerance | None = None) -> SymplecticSpace:
    """Symplectic space on ``beta`` (in ``p.beta``'s coordinates): the compression of ``J``."""
    tol = resolve_tol(tol)
    if not is_isotropic(sp, p.gamma_min, tol):
        raise NotIsotropic("gamma_min is not isotropic")
    if gr.gap_distance(p.gamma_max, annihilator(sp, p.gamma_min)) > tol.gap_abs:
        raise NotAnnihilator("gamma_max is not the annihilator of gamma_min")
    b = p.beta.frame
    return SymplecticSpace(b.conj().T @ sp.j @ b, tol)


def to_beta(p: NestedPair, l: Subspace) -> Subspace:
    """Subspace of ``beta`` (ambient vectors) -> ``beta`` coordinates."""
    return gr.coordinates(l, p.beta)


def from_beta(p: NestedPair, coords: Subspace) -> Subspace:
    return gr.embed(coords, p.beta)


def hermitian_graph(a) -> Subspace:
    """Graph of a Hermitian matrix: a Lagrangian of the standard space."""
    a = as_square(a)
    return graph(a, Subspace.full(a.shape[0]))


def self_adjoint_realization(op: OperatorPair, l: Subspace, tol: Tolerance | None = None,
                             require_graph: bool = False) -> Realization:
    """Realization with boundary condition ``l`` (ambient vectors in ``beta``) of a symmetric operator.

    The minimal graph is that of ``op.action`` on ``op.dom_min``; the
    maximal subspace is its annihilator. A result whose graph is a linear
    relation rather than an operator is returned with ``is_graph=False``
    unless ``require_graph`` is set.
    """
    tol = resolve_tol(tol)
    n = op.space_dim
    sp = standard_symplectic(n, tol)
    g = graph(op.action, op.dom_min, tol)
    p = isotropic_pair(sp, g, tol)
    sp_beta = boundary_form(sp, p, tol)
    check_in_beta(p, l, tol)
    if not is_lagrangian(sp_beta, to_beta(p, l), tol):
        raise NotLagrangian("boundary condition is not Lagrangian in beta")
    real = realization_from_graph(pull_back(p, l, tol), tol)
    if require_graph and not real.is_graph:
        raise NotAGraph("realization is a linear relation, not an operator")
    return real
