"""Seeded random instance generators for the verification suites.

Every generator takes a ``numpy.random.Generator``; suites derive one per
trial from ``(master_seed, suite, trial)`` so results do not depend on
execution order.
"""

from __future__ import annotations

import zlib

import numpy as np
from scipy.stats import unitary_group

from fredholm_lab import grassmann as gr
from fredholm_lab import symplectic as sy
from fredholm_lab.extension import NestedPair, OperatorPair, classify_relative, make_nested, make_operator_pair
from fredholm_lab.grassmann import Subspace


def trial_rng(seed: int, trial: int, label: str = "") -> np.random.Generator:
    """Independent generator for ``(seed, label, trial)``."""
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode()), trial])


def gaussian(rng, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(n: int, rng) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def random_hermitian(n: int, rng, scale: float = 1.0) -> np.ndarray:
    a = gaussian(rng, n, n) * scale
    return (a + a.conj().T) / 2


def random_subspace(n: int, k: int, rng, within: Subspace | None = None) -> Subspace:
    """Generic ``k``-dimensional subspace of ``C^n`` (or of ``within``)."""
    if within is None:
        return Subspace.span(gaussian(rng, n, k), ambient=n) if k else Subspace.zero(n)
    if k == 0:
        return Subspace.zero(within.ambient_dim)
    coeffs = np.linalg.qr(gaussian(rng, within.dim, k))[0]
    return gr.embed(Subspace(coeffs), within)


def random_low_rank(n: int, rank: int, rng) -> np.ndarray:
    return gaussian(rng, n, rank) @ gaussian(rng, rank, n) if rank else np.zeros((n, n), dtype=complex)


def random_nested_pair(rng, ambient: int) -> NestedPair:
    k_max = int(rng.integers(0, ambient + 1))
    k_min = int(rng.integers(0, k_max + 1))
    g_max = random_subspace(ambient, k_max, rng)
    g_min = random_subspace(ambient, k_min, rng, within=g_max)
    return make_nested(g_min, g_max)


def random_beta_subspace(p: NestedPair, rng, dim: int | None = None) -> Subspace:
    k = int(rng.integers(0, p.beta.dim + 1)) if dim is None else dim
    return random_subspace(p.ambient_dim, k, rng, within=p.beta)


def random_operator_pair(rng, n: int) -> OperatorPair:
    """Random extension pair; the action is rank-deficient about a third of the time."""
    rank = n if rng.random() < 0.6 else int(rng.integers(0, n))
    action = random_low_rank(n, rank, rng)
    k_max = int(rng.integers(0, n + 1))
    k_min = int(rng.integers(0, k_max + 1))
    dom_max = random_subspace(n, k_max, rng)
    dom_min = random_subspace(n, k_min, rng, within=dom_max)
    return make_operator_pair(action, dom_max, dom_min)


def random_transversal(p: NestedPair, rng) -> Subspace:
    """Generic ``M`` with ``M & gamma_min = 0`` and ``M + gamma_max`` everything."""
    n = p.ambient_dim
    lo, hi = n - p.gamma_max.dim, n - p.gamma_min.dim
    return random_subspace(n, int(rng.integers(lo, hi + 1)), rng)


def random_non_transversal(p: NestedPair, rng) -> Subspace:
    """``M`` with a planted nonzero ``K = M & gamma_min`` and/or ``K' = (M + gamma_max)^perp``.

    Needs ``gamma_min`` nonzero or ``gamma_max`` proper.
    """
    n = p.ambient_dim
    can_k, can_kp = p.gamma_min.dim > 0, p.f_comp.dim > 0
    if not (can_k or can_kp):
        raise ValueError("every subspace is transversal to (0, whole space)")
    plant_k = can_k and (not can_kp or rng.random() < 0.6)
    plant_kp = can_kp and (not plant_k or rng.random() < 0.4)
    parts = []
    if plant_k:
        parts.append(random_subspace(n, int(rng.integers(1, p.gamma_min.dim + 1)), rng, within=p.gamma_min))
    host = Subspace.full(n)
    if plant_kp:
        # M inside W^perp for some W in F forces W into (M + gamma_max)^perp
        w = random_subspace(n, int(rng.integers(1, p.f_comp.dim + 1)), rng, within=p.f_comp)
        host = gr.complement(w)
    extra = int(rng.integers(0, host.dim + 1))
    if extra:
        parts.append(random_subspace(n, extra, rng, within=host))
    if not parts:
        return Subspace.zero(n)
    return parts[0] if len(parts) == 1 else gr.sum(parts[0], parts[1])


def random_isotropic(sp: sy.SymplecticSpace, k: int, rng) -> Subspace:
    """Random ``k``-dimensional subspace of a random Lagrangian."""
    lag = random_lagrangian(sp, rng)
    return random_subspace(sp.ambient_dim, k, rng, within=lag)


def random_lagrangian(sp: sy.SymplecticSpace, rng) -> Subspace:
    return sy.lagrangian_from_unitary(sp, random_unitary(sp.plus_basis.shape[1], rng))


def random_lagrangian_in_beta(sp_beta: sy.SymplecticSpace, p: NestedPair, rng) -> Subspace:
    return sy.from_beta(p, random_lagrangian(sp_beta, rng))


def random_lagrangian_transversal(sp: sy.SymplecticSpace, p: NestedPair, rng, attempts: int = 20) -> Subspace:
    for _ in range(attempts):
        m = random_lagrangian(sp, rng)
        if classify_relative(p, m).transversal:
            return m
    raise RuntimeError("could not draw a transversal Lagrangian")
