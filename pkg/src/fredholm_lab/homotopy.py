"""Linear coordinates on the fibres of the push-forward and the canonical paths.

A subspace ``M`` transversal to ``(gamma_min, gamma_max)`` with trace ``N``
is the graph of a matrix ``mu : N (+) F -> E (+) gamma_min`` where
``E = beta - N`` and ``F`` is the complement of ``gamma_max``. Scaling
``mu`` by ``1 - t`` deforms ``M`` to ``N (+) F`` without changing the trace
or breaking transversality. In the Lagrangian case ``mu = -psi J`` with
``psi`` Hermitian and the same path stays Lagrangian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fredholm_lab import grassmann as gr
from fredholm_lab.errors import NotLagrangian, NotTransversal
from fredholm_lab.extension import NestedPair, classify_relative, index_in_beta, pull_back, push_forward
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import Tolerance, orthonormalize, resolve_tol, spectral_norm
from fredholm_lab.reports import Report
from fredholm_lab.symplectic import SymplecticSpace, boundary_form, is_lagrangian

DEFAULT_PATH_SAMPLES = 32


@dataclass(frozen=True)
class TransversalCoordinates:
    """``mu`` in the orthonormal bases ``source = [N, F]`` and ``target = [E, gamma_min]``."""

    nested: NestedPair
    n_target: Subspace
    mu: np.ndarray
    source: np.ndarray
    target: np.ndarray

    @property
    def zero_block(self) -> np.ndarray:
        """The ``N -> E`` block of ``mu``; vanishes on the fibre."""
        e = self.target.shape[1] - self.nested.gamma_min.dim
        return self.mu[:e, : self.n_target.dim]


@dataclass(frozen=True)
class LagrangianCoordinates:
    """``psi = mu J`` on ``J N (+) gamma_min``, block form ``[[0, g^H], [g, f]]``."""

    coords: TransversalCoordinates
    psi: np.ndarray
    j_block: np.ndarray

    @property
    def f(self) -> np.ndarray:
        k = self.coords.n_target.dim
        return self.psi[k:, k:]

    @property
    def g(self) -> np.ndarray:
        k = self.coords.n_target.dim
        return self.psi[k:, :k]


def _solve_coordinates(m: Subspace, source: np.ndarray, target: np.ndarray, tol: Tolerance) -> np.ndarray:
    if m.dim != source.shape[1]:
        raise NotTransversal(f"dim M = {m.dim} but the fibre needs {source.shape[1]}")
    x = source.conj().T @ m.frame
    y = target.conj().T @ m.frame
    if x.size and np.linalg.svd(x, compute_uv=False)[-1] <= tol.rank_rel * max(x.shape) * 10:
        raise NotTransversal("M is not a graph over N (+) F")
    return np.linalg.solve(x.T, y.T).T if x.size else np.zeros((target.shape[1], 0), dtype=complex)


def graph_of(c: TransversalCoordinates, mu) -> Subspace:
    g = c.source + c.target @ np.asarray(mu, dtype=complex)
    if g.shape[1] == 0:
        return Subspace.zero(c.source.shape[0])
    return Subspace(orthonormalize(g, scale=1.0))


def _checked_coordinates(p, m, n, source, target, tol) -> TransversalCoordinates:
    mu = _solve_coordinates(m, source, target, tol)
    c = TransversalCoordinates(p, n, mu, source, target)
    if spectral_norm(c.zero_block) > tol.gap_abs * max(1.0, spectral_norm(mu)):
        raise NotTransversal("push-forward of M differs from N")
    return c


def tn_coordinates(p: NestedPair, m: Subspace, tol: Tolerance | None = None) -> TransversalCoordinates:
    tol = resolve_tol(tol)
    if not classify_relative(p, m, tol).transversal:
        raise NotTransversal("M is not transversal to the nested pair")
    n = push_forward(p, m, tol)
    e = gr.complement(n, within=p.beta)
    source = np.hstack([n.frame, p.f_comp.frame])
    target = np.hstack([e.frame, p.gamma_min.frame])
    return _checked_coordinates(p, m, n, source, target, tol)


def _check_t(t):
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"path parameter must lie in [0, 1], got {t}")


def tn_path(c: TransversalCoordinates, t: float) -> Subspace:
    """Graph of ``(1 - t) mu``: ``M`` at ``t = 0`` and ``N (+) F`` at ``t = 1``."""
    _check_t(t)
    return graph_of(c, (1.0 - t) * c.mu)


def sn_coordinates(sp: SymplecticSpace, p: NestedPair, m: Subspace,
                   tol: Tolerance | None = None) -> LagrangianCoordinates:
    """Hermitian coordinates of a Lagrangian ``m`` transversal to ``(gamma, gamma^omega)``.

    Bases are chosen J-adapted: ``E = J N`` and ``F = J gamma``.
    """
    tol = resolve_tol(tol)
    boundary_form(sp, p, tol)  # validates isotropy and the annihilator
    if not is_lagrangian(sp, m, tol):
        raise NotLagrangian("M is not Lagrangian")
    if not classify_relative(p, m, tol).transversal:
        raise NotTransversal("M is not transversal to (gamma, gamma^omega)")
    n = push_forward(p, m, tol)
    j = sp.j
    source = np.hstack([n.frame, j @ p.gamma_min.frame])
    target = np.hstack([j @ n.frame, p.gamma_min.frame])
    c = _checked_coordinates(p, m, n, source, target, tol)
    j_block = source.conj().T @ j @ target
    psi = c.mu @ j_block
    k = n.dim
    if spectral_norm(psi - psi.conj().T) > tol.gap_abs * max(1.0, spectral_norm(psi)):
        raise NotLagrangian("coordinates are not Hermitian")
    if spectral_norm(psi[:k, :k]) > tol.gap_abs * max(1.0, spectral_norm(psi)):
        raise NotTransversal("upper-left block of psi does not vanish")
    return LagrangianCoordinates(c, psi, j_block)


def mu_from_psi(lc: LagrangianCoordinates, psi) -> np.ndarray:
    """``mu = -psi J`` in coordinates; ``j_block`` is unitary so its inverse is its adjoint."""
    return np.asarray(psi, dtype=complex) @ lc.j_block.conj().T


def sn_path(lc: LagrangianCoordinates, t: float) -> Subspace:
    """Graph of ``-((1 - t) psi) J``; Lagrangian for every ``t``."""
    _check_t(t)
    return graph_of(lc.coords, mu_from_psi(lc, (1.0 - t) * lc.psi))


def additivity_at_endpoint(c: TransversalCoordinates, l: Subspace, tol: Tolerance | None = None) -> Report:
    """Split ``ind(pull_back(L), N (+) F)`` as ``ind_beta(L, N) + ind(gamma_min, F)``."""
    tol = resolve_tol(tol)
    p = c.nested
    endpoint = gr.direct_sum(c.n_target, p.f_comp)
    whole = gr.pair_index(pull_back(p, l, tol), endpoint, tol).index
    small = index_in_beta(p, l, c.n_target, tol).index
    rest = gr.pair_index(p.gamma_min, p.f_comp, tol, within=gr.direct_sum(p.gamma_min, p.f_comp))
    rep = Report("additivity at endpoint")
    rep.add("ind(pull_back(L), N (+) F) = ind_beta(L, N) + ind(G, F)", whole, small + rest.index)
    rep.add("(G, F) transversal", rest.transversal, True)
    return rep


def verify_path(p: NestedPair, m: Subspace, l: Subspace, samples: int = DEFAULT_PATH_SAMPLES,
                tol: Tolerance | None = None, sp: SymplecticSpace | None = None,
                strict: bool = True) -> Report:
    """Walk the canonical path from ``m`` and check its invariants at ``samples`` points.

    With ``sp`` the Lagrangian path is used and Lagrangian-ness is checked
    too. The pair index of ``(pull_back(l), M_t)`` must not move.
    """
    tol = resolve_tol(tol)
    if sp is None:
        c = tn_coordinates(p, m, tol)
        walk = lambda t: tn_path(c, t)  # noqa: E731
    else:
        lc = sn_coordinates(sp, p, m, tol)
        c = lc.coords
        walk = lambda t: sn_path(lc, t)  # noqa: E731
    lifted = pull_back(p, l, tol)
    rep = Report("canonical path" if sp is None else "lagrangian path")
    ts = np.linspace(0.0, 1.0, samples)
    indices, worst_gap = [], 0.0
    transversal_all, lagrangian_all = True, True
    for t in ts:
        mt = walk(float(t))
        worst_gap = max(worst_gap, gr.gap_distance(push_forward(p, mt, tol), c.n_target))
        transversal_all &= classify_relative(p, mt, tol).transversal
        if sp is not None:
            lagrangian_all &= is_lagrangian(sp, mt, tol)
        indices.append(gr.pair_index(lifted, mt, tol).index)
    rep.values.update(max_trace_gap=worst_gap, indices=indices, samples=samples)
    rep.add("trace constant along path", worst_gap <= tol.gap_abs, True)
    rep.add("transversal along path", transversal_all, True)
    if sp is not None:
        rep.add("lagrangian along path", lagrangian_all, True)
    rep.add("index constant along path", len(set(indices)), 1)
    rep.add("start point is M", gr.gap_distance(walk(0.0), m) <= tol.gap_abs, True)
    rep.add("end point is N (+) F",
            gr.gap_distance(walk(1.0), gr.direct_sum(c.n_target, p.f_comp)) <= tol.gap_abs, True)
    rep.checks.extend(additivity_at_endpoint(c, l, tol).checks)
    return rep.raise_on_failure() if strict else rep
