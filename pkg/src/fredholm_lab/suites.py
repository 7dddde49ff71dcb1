"""Randomized verification suites behind ``fredholm-lab verify``.

A trial draws its instance from ``trial_rng(seed, trial, suite)`` and
returns a :class:`Report`; nothing is shared between trials, so they can
run in any order or in parallel.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from fredholm_lab import extension as ex
from fredholm_lab import family as fa
from fredholm_lab import grassmann as gr
from fredholm_lab import homotopy as ho
from fredholm_lab import instances as ins
from fredholm_lab import symplectic as sy
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import Tolerance, idempotent_to_projector, numerical_rank, spectral_norm
from fredholm_lab.reports import Report

SUITES = ("grassmann", "extension", "symplectic", "homotopy", "family")
PATH_SAMPLES = 16
LOOP_SAMPLES = 48


def _projector_check(rep: Report, s: Subspace, tol: Tolerance, corrupt: bool, rng):
    """Rank and idempotency of ``P_s``; ``corrupt`` adds a rank-one error first."""
    p = gr.projector(s)
    if corrupt:
        v = ins.gaussian(rng, s.ambient_dim, 1)
        p = p + 0.5 * (v @ v.conj().T) / np.vdot(v, v).real
    rep.add("rank P_s = dim s", numerical_rank(p, tol, scale=1.0), s.dim)
    rep.add("P_s idempotent", spectral_norm(p @ p - p) <= tol.gap_abs, True)


def _with_shared(n: int, rng) -> tuple[Subspace, Subspace]:
    """Two random subspaces with a planted common part about half the time."""
    k1, k2 = (int(x) for x in rng.integers(0, n + 1, size=2))
    s, t = ins.random_subspace(n, k1, rng), ins.random_subspace(n, k2, rng)
    if rng.random() < 0.5 and n >= 2:
        shared = ins.random_subspace(n, int(rng.integers(1, n)), rng)
        s = gr.sum(shared, ins.random_subspace(n, int(rng.integers(0, n - shared.dim + 1)), rng))
        t = gr.sum(shared, ins.random_subspace(n, int(rng.integers(0, n - shared.dim + 1)), rng))
    return s, t


def grassmann_trial(rng, dim_max: int, tol: Tolerance, corrupt: bool) -> Report:
    n = int(rng.integers(1, dim_max + 1))
    s, t = _with_shared(n, rng)
    rep = Report("grassmann")
    rep.values["n"] = n
    _projector_check(rep, s, tol, corrupt, rng)
    r = gr.pair_index(s, t, tol)
    cap, tot = gr.intersect(s, t, tol), gr.sum(s, t, tol)
    rep.add("ind(s, t) = dim s + dim t - n", r.index, s.dim + t.dim - n)
    rep.add("dim(s & t) + dim(s + t) = dim s + dim t", cap.dim + tot.dim, s.dim + t.dim)
    rep.add("(s & t)^perp = s^perp + t^perp",
            gr.gap_distance(gr.complement(cap), gr.sum(gr.complement(s), gr.complement(t), tol)) <= tol.gap_abs, True)
    rep.add("s^perp^perp = s", gr.gap_distance(gr.complement(gr.complement(s)), s) <= tol.gap_abs, True)
    if s.dim:
        # oblique idempotent with range s -> orthogonal projector onto s
        w = s.frame @ ins.gaussian(rng, s.dim, n) * 0.3
        t_obl = gr.projector(s) + w @ gr.projector(gr.complement(s))
        rep.add("orthogonalized idempotent = P_s",
                spectral_norm(idempotent_to_projector(t_obl, tol) - gr.projector(s)) <= tol.gap_abs, True)
    return rep


def extension_trial(rng, dim_max: int, tol: Tolerance, corrupt: bool) -> Report:
    n = int(rng.integers(1, max(1, dim_max // 2) + 1))
    op = ins.random_operator_pair(rng, n)
    p = ex.graphs(op, tol)
    choice = rng.random()
    if choice < 0.15:
        l = Subspace.zero(2 * n)
    elif choice < 0.3:
        l = p.beta
    else:
        l = ins.random_beta_subspace(p, rng)
    rep = Report("extension")
    rep.values["n"] = n
    _projector_check(rep, p.gamma_max, tol, corrupt, rng)
    rep.checks.extend(ex.verify_point_index_formula(op, l, tol, strict=False, pair=p).checks)
    q = ins.random_nested_pair(rng, int(rng.integers(1, dim_max + 1)))
    lq = ins.random_beta_subspace(q, rng)
    has_room = q.gamma_min.dim > 0 or q.f_comp.dim > 0
    m = ins.random_non_transversal(q, rng) if has_room and rng.random() < 0.5 else ins.random_transversal(q, rng)
    rep.checks.extend(ex.verify_relative_calculus(q, m, lq, tol, strict=False).checks)
    rep.checks.extend(ex.kk_defect(q, m, lq, tol, strict=False).checks)
    return rep


def planted_lagrangian_pair(sp: sy.SymplecticSpace, rng, meet: int) -> tuple[Subspace, Subspace]:
    """Lagrangians ``l, m`` with ``dim(l & m) = meet``: ``u_m = u_l V`` with ``V`` fixing a ``meet``-dim space."""
    d = sp.plus_basis.shape[1]
    u_l = ins.random_unitary(d, rng)
    phases = np.ones(d, dtype=complex)
    phases[meet:] = np.exp(1j * rng.uniform(0.3, 2 * np.pi - 0.3, size=d - meet))
    q = ins.random_unitary(d, rng)
    v = q @ np.diag(phases) @ q.conj().T
    return sy.lagrangian_from_unitary(sp, u_l), sy.lagrangian_from_unitary(sp, u_l @ v)


def symplectic_trial(rng, dim_max: int, tol: Tolerance, corrupt: bool) -> Report:
    n = int(rng.integers(1, max(1, dim_max // 2) + 1))
    sp = sy.standard_symplectic(n, tol)
    rep = Report("symplectic")
    rep.values["n"] = n
    a = ins.random_hermitian(n, rng)
    rep.add("kappa(graph A) = cayley(A)",
            spectral_norm(sy.kappa(sp, sy.hermitian_graph(a), tol) - sy.cayley(a, tol)) <= 1e-10, True)
    rep.add("kappa(H (+) 0) = -1", spectral_norm(sy.kappa(sp, ex.horizontal(n), tol) + np.eye(n)) <= 1e-12, True)
    rep.add("kappa(0 (+) H) = +1", spectral_norm(sy.kappa(sp, ex.vertical(n), tol) - np.eye(n)) <= 1e-12, True)
    meet = int(rng.integers(0, n + 1))
    l, m = planted_lagrangian_pair(sp, rng, meet)
    _projector_check(rep, l, tol, corrupt, rng)
    r = gr.pair_index(l, m, tol)
    rep.add("dim(l & m) = codim(l + m)", r.dim_cap, r.codim_sum)
    rep.add("dim(l & m) = mult of 1 in kappa_rel(l; m)",
            r.dim_cap, sy.intersection_multiplicity(sy.kappa_rel(sp, l, m, tol), tol))
    rep.add("planted dim(l & m)", r.dim_cap, meet)
    # symmetric restriction of a Hermitian action: self-adjoint realizations have index 0
    k = int(rng.integers(0, n + 1))
    op = ex.make_operator_pair(a, dom_min=ins.random_subspace(n, k, rng), tol=tol)
    g = ex.graph(op.action, op.dom_min, tol)
    p = sy.isotropic_pair(sp, g, tol)
    lb = ins.random_lagrangian_in_beta(sy.boundary_form(sp, p, tol), p, rng)
    real = sy.self_adjoint_realization(op, lb, tol)
    rep.add("self-adjoint realization has index 0", real.index, 0)
    return rep


def homotopy_trial(rng, dim_max: int, tol: Tolerance, corrupt: bool) -> Report:
    q = ins.random_nested_pair(rng, int(rng.integers(1, dim_max + 1)))
    m = ins.random_transversal(q, rng)
    l = ins.random_beta_subspace(q, rng)
    rep = Report("homotopy")
    rep.values["n"] = q.ambient_dim
    _projector_check(rep, q.beta, tol, corrupt, rng)
    rep.checks.extend(ho.verify_path(q, m, l, PATH_SAMPLES, tol, strict=False).checks)
    n = int(rng.integers(1, max(1, dim_max // 2) + 1))
    sp = sy.standard_symplectic(n, tol)
    g = ins.random_isotropic(sp, int(rng.integers(0, n + 1)), rng)
    p = sy.isotropic_pair(sp, g, tol)
    ml = ins.random_lagrangian_transversal(sp, p, rng)
    ll = ins.random_lagrangian_in_beta(sy.boundary_form(sp, p, tol), p, rng)
    rep.checks.extend(ho.verify_path(p, ml, ll, PATH_SAMPLES, tol, sp=sp, strict=False).checks)
    return rep


def family_trial(rng, dim_max: int, tol: Tolerance, corrupt: bool) -> Report:
    rep = Report("family")
    # K^1: planted winding in a random isotropic instance
    n = int(rng.integers(1, max(1, dim_max // 2) + 1))
    sp = sy.standard_symplectic(n, tol)
    g = ins.random_isotropic(sp, int(rng.integers(0, n)), rng)
    p = sy.isotropic_pair(sp, g, tol)
    m = ins.random_lagrangian_transversal(sp, p, rng)
    w = int(rng.integers(-2, 3))
    loop = fa.planted_lagrangian_loop(sy.boundary_form(sp, p, tol), p, ex.push_forward(p, m, tol), w, LOOP_SAMPLES, rng)
    _projector_check(rep, p.gamma_max, tol, corrupt, rng)
    k1 = fa.verify_theorem_k1(sp, g, m, loop, tol, strict=False)
    rep.checks.extend(k1.checks)
    rep.add("boundary winding = planted winding", k1.values["winding_boundary"], w)
    rep.values.update(n=n, winding=w)
    # K^0: a path of boundary conditions l_x = exp(i x H) l_0 inside beta
    q = ins.random_nested_pair(rng, int(rng.integers(1, dim_max + 1)))
    has_room = q.gamma_min.dim > 0 or q.f_comp.dim > 0
    mq = ins.random_non_transversal(q, rng) if has_room and rng.random() < 0.5 else ins.random_transversal(q, rng)
    l0 = ins.random_beta_subspace(q, rng)
    h = ins.random_hermitian(q.beta.dim, rng)
    evals, evecs = np.linalg.eigh(h)

    def l_at(x):
        rot = q.beta.frame @ (evecs * np.exp(1j * x * evals)) @ evecs.conj().T @ q.beta.frame.conj().T
        return gr.map_subspace(rot + gr.projector(gr.complement(q.beta)), l0, tol) if l0.dim else l0

    fam = fa.SampledLoop.from_function(l_at, np.linspace(0.0, 1.0, 8), closed=False)
    k0 = fa.verify_theorem_k0(fa.NestedInstance(q, mq), fam, tol, path_samples=4, constant_defect=True, strict=False)
    rep.checks.extend(k0.checks)
    return rep


TRIALS: dict[str, Callable] = {
    "grassmann": grassmann_trial,
    "extension": extension_trial,
    "symplectic": symplectic_trial,
    "homotopy": homotopy_trial,
    "family": family_trial,
}


def run_trial(suite: str, seed: int, trial: int, dim_max: int, tol: Tolerance, corrupt: bool = False) -> Report:
    rng = ins.trial_rng(seed, trial, suite)
    return TRIALS[suite](rng, dim_max, tol, corrupt)
