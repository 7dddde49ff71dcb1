"""Sampled families over an interval or circle.

K^0 of a connected base is detected here by a constant integer index and
K^1 of the circle by the winding number of ``det`` of a unitary loop.
"""

from __future__ import annotations

import io
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from fredholm_lab import grassmann as gr
from fredholm_lab import symplectic as sy
from fredholm_lab.errors import (
    DimensionMismatch,
    InsufficientSampling,
    NonconstantDefect,
    NotClosed,
    NotTransversal,
    NotUnitary,
)
from fredholm_lab.extension import (
    NestedPair,
    OperatorPair,
    classify_relative,
    graphs,
    horizontal,
    index_in_beta,
    pull_back,
    push_forward,
    verify_point_index_formula,
)
from fredholm_lab.grassmann import Subspace
from fredholm_lab.homotopy import tn_coordinates, tn_path
from fredholm_lab.instances import random_unitary
from fredholm_lab.numeric import Tolerance, is_unitary, resolve_tol, spectral_norm
from fredholm_lab.reports import Report

MAX_STEP_PHASE = math.pi / 2
DEFAULT_REFINE_DEPTH = 12


@dataclass(frozen=True)
class SampledLoop:
    """Samples (subspaces or unitary matrices) at increasing parameters.

    For a closed loop the last sample repeats the first.
    """

    samples: tuple
    params: np.ndarray
    closed: bool = True

    def __post_init__(self):
        if len(self.samples) < 2:
            raise ValueError("a sampled family needs at least two samples")
        params = np.asarray(self.params, dtype=float)
        if params.shape != (len(self.samples),):
            raise DimensionMismatch("params and samples differ in length")
        if np.any(np.diff(params) <= 0):
            raise ValueError("params must be strictly increasing")
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "params", params)

    @classmethod
    def from_function(cls, fn: Callable[[float], object], params, closed: bool = True):
        params = np.asarray(params, dtype=float)
        return cls(tuple(fn(float(t)) for t in params), params, closed)

    @property
    def kind(self) -> str:
        return "subspace" if isinstance(self.samples[0], Subspace) else "unitary"

    def __len__(self):
        return len(self.samples)

    def reversed(self) -> SampledLoop:
        params = self.params[-1] + self.params[0] - self.params[::-1]
        return SampledLoop(self.samples[::-1], params, self.closed)

    def map(self, fn) -> SampledLoop:
        return SampledLoop(tuple(fn(s) for s in self.samples), self.params, self.closed)


def _distance(a, b) -> float:
    if isinstance(a, Subspace):
        return gr.gap_distance(a, b)
    return spectral_norm(np.asarray(a) - np.asarray(b))


def closure_gap(fam: SampledLoop) -> float:
    return _distance(fam.samples[-1], fam.samples[0])


@dataclass
class ContinuityReport:
    max_gap: float
    location: int
    budget: float
    closure_gap: float
    derived: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.budget and all(v["max_gap"] <= self.budget for v in self.derived.values())

    def to_dict(self):
        return {"max_gap": self.max_gap, "location": self.location, "budget": self.budget,
                "closure_gap": self.closure_gap, "derived": self.derived, "pass": self.passed}


def _max_step(samples) -> tuple[float, int]:
    gaps = [_distance(samples[j], samples[j + 1]) for j in range(len(samples) - 1)]
    j = int(np.argmax(gaps))
    return float(gaps[j]), j


def continuity_report(fam: SampledLoop, budget: float, against: Subspace | None = None,
                      tol: Tolerance | None = None) -> ContinuityReport:
    """Largest consecutive step of the family (a sampled diagnostic, not a proof).

    With ``against`` the derived families ``L_x & against`` and
    ``L_x + against`` are checked too; a jump there flags a change of
    relative position that the gap of ``L_x`` alone does not show.
    """
    tol = resolve_tol(tol)
    worst, where = _max_step(fam.samples)
    rep = ContinuityReport(worst, where, budget, closure_gap(fam))
    if against is not None:
        for name, op in (("intersection", gr.intersect), ("sum", gr.sum)):
            derived = [op(s, against, tol) for s in fam.samples]
            if len({d.dim for d in derived}) > 1:
                j = next(i for i in range(len(derived) - 1) if derived[i].dim != derived[i + 1].dim)
                rep.derived[name] = {"max_gap": 1.0, "location": j}
            else:
                g, j = _max_step(derived)
                rep.derived[name] = {"max_gap": g, "location": j}
    return rep


@dataclass
class WindingReport:
    winding: int
    total_phase: float
    max_step_phase: float
    refined: bool
    trace: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {"winding": self.winding, "total_phase": self.total_phase,
                "max_step_phase": self.max_step_phase, "refined": self.refined}

    def phase_csv(self) -> str:
        """``param,phase,cumulative_phase`` rows for external plotting."""
        buf = io.StringIO()
        buf.write("param,phase,cumulative_phase\n")
        for t, step, cum in self.trace:
            buf.write(f"{t:.12g},{step:.12g},{cum:.12g}\n")
        return buf.getvalue()


def _unit(z: complex) -> complex:
    return z / abs(z)


def _det_phase_walk(params, dets, refine, max_depth):
    """Accumulate ``arg(d_{j+1} / d_j)``, bisecting any step of size >= pi/2."""
    trace = [(float(params[0]), 0.0, 0.0)]
    total, worst, refined = 0.0, 0.0, False

    def walk(t0, d0, t1, d1, depth):
        nonlocal total, worst, refined
        step = float(np.angle(d1 * np.conj(d0)))
        if abs(step) >= MAX_STEP_PHASE:
            if refine is None:
                raise InsufficientSampling(f"phase step {step:.3f} >= pi/2 on [{t0:.6g}, {t1:.6g}]")
            if depth >= max_depth:
                raise InsufficientSampling(f"refinement depth {max_depth} exhausted near t={t0:.6g}")
            refined = True
            tm = (t0 + t1) / 2
            dm = _unit(refine(tm))
            walk(t0, d0, tm, dm, depth + 1)
            walk(tm, dm, t1, d1, depth + 1)
            return
        total += step
        worst = max(worst, abs(step))
        trace.append((t1, step, total))

    for j in range(len(dets) - 1):
        walk(float(params[j]), dets[j], float(params[j + 1]), dets[j + 1], 0)
    return total, worst, refined, trace


def winding_from_dets(params, dets, refine: Callable[[float], complex] | None = None,
                      max_depth: int = DEFAULT_REFINE_DEPTH, tol: Tolerance | None = None) -> WindingReport:
    """Winding number of a closed sampled curve of unit complex numbers."""
    tol = resolve_tol(tol)
    dets = [_unit(complex(d)) for d in dets]
    if abs(dets[-1] - dets[0]) > tol.gap_abs:
        raise NotClosed(f"determinant loop does not close (|d_end - d_0| = {abs(dets[-1] - dets[0]):.3e})")
    total, worst, refined, trace = _det_phase_walk(params, dets, refine, max_depth)
    winding = int(round(total / (2 * math.pi)))
    if abs(total / (2 * math.pi) - winding) > 1e-6:
        raise NotClosed("accumulated phase is not a multiple of 2 pi")
    return WindingReport(winding, total, worst, refined, trace)


def winding_number(u_loop: SampledLoop, refine: Callable[[float], np.ndarray] | None = None,
                   max_depth: int = DEFAULT_REFINE_DEPTH, tol: Tolerance | None = None) -> WindingReport:
    """Degree of ``det u(t)`` for a closed loop of unitaries.

    ``refine(t)`` evaluates the loop between samples; it is used to bisect
    intervals whose determinant phase step reaches pi/2.
    """
    tol = resolve_tol(tol)
    if not u_loop.closed:
        raise NotClosed("loop is declared open")
    for j, u in enumerate(u_loop.samples):
        if not is_unitary(u, tol):
            raise NotUnitary(f"sample {j} is not unitary")
    if closure_gap(u_loop) > tol.gap_abs:
        raise NotClosed(f"last sample differs from first by {closure_gap(u_loop):.3e}")
    dets = [np.linalg.det(u) for u in u_loop.samples]
    det_refine = None if refine is None else (lambda t: np.linalg.det(refine(t)))
    return winding_from_dets(u_loop.params, dets, det_refine, max_depth, tol)


def geodesic_refiner(u_loop: SampledLoop) -> Callable[[float], np.ndarray]:
    """Evaluate between samples along the shortest unitary path ``u_j exp(s log(u_j^H u_{j+1}))``.

    Used when only samples are available (e.g. a loop read from a file):
    every eigenphase of the step is unwrapped into (-pi, pi].
    """
    params = u_loop.params
    us = [np.asarray(u, dtype=complex) for u in u_loop.samples]

    def at(t: float) -> np.ndarray:
        j = int(np.clip(np.searchsorted(params, t, side="right") - 1, 0, len(us) - 2))
        s = (t - params[j]) / (params[j + 1] - params[j])
        # the step is normal, so its complex Schur form is diagonal
        tri, z = scipy.linalg.schur(us[j].conj().T @ us[j + 1], output="complex")
        return us[j] @ (z * np.exp(1j * s * np.angle(np.diag(tri)))) @ z.conj().T

    return at


def relative_unitary_loop(sp: sy.SymplecticSpace, l_loop: SampledLoop, m: Subspace,
                          tol: Tolerance | None = None) -> SampledLoop:
    """The unitary loop ``-kappa_rel(L_x; M)``."""
    um_inv = sy.lagrangian_unitary(sp, m, tol).unitary.conj().T
    return l_loop.map(lambda l: -um_inv @ sy.lagrangian_unitary(sp, l, tol).unitary)


def concatenate(a: SampledLoop, b: SampledLoop) -> SampledLoop:
    """``a`` followed by ``b`` (both based at the same sample); params rescaled to [0, 2]."""
    pa = (a.params - a.params[0]) / (a.params[-1] - a.params[0])
    pb = (b.params - b.params[0]) / (b.params[-1] - b.params[0]) + 1.0
    return SampledLoop(a.samples + b.samples[1:], np.concatenate([pa, pb[1:]]), a.closed and b.closed)


def k1_lagrangian_loop_index(sp: sy.SymplecticSpace, l_loop: SampledLoop, m: Subspace,
                             tol: Tolerance | None = None,
                             refine: Callable[[float], Subspace] | None = None,
                             max_depth: int = DEFAULT_REFINE_DEPTH) -> WindingReport:
    """Winding of ``det(-kappa_rel(L_x; M))`` along a closed loop of Lagrangians."""
    tol = resolve_tol(tol)
    if not l_loop.closed or closure_gap(l_loop) > tol.gap_abs:
        raise NotClosed("Lagrangian loop does not close")
    um_inv = sy.lagrangian_unitary(sp, m, tol).unitary.conj().T

    def det_of(l):
        return np.linalg.det(-um_inv @ sy.lagrangian_unitary(sp, l, tol).unitary)

    dets = [det_of(l) for l in l_loop.samples]
    det_refine = None if refine is None else (lambda t: det_of(refine(t)))
    return winding_from_dets(l_loop.params, dets, det_refine, max_depth, tol)


# -- K^0 ---------------------------------------------------------------------


@dataclass(frozen=True)
class IndexProfile:
    values: tuple
    constant: bool


def _per_sample(obj, count):
    if isinstance(obj, (list, tuple)):
        if len(obj) != count:
            raise DimensionMismatch("per-sample list length differs from the loop length")
        return list(obj)
    return [obj] * count


def index_profile(pairs: NestedPair | Sequence[NestedPair], m: Subspace | Sequence[Subspace],
                  l_fam: SampledLoop, tol: Tolerance | None = None) -> IndexProfile:
    """``ind(pull_back(L_x), M_x)`` at every sample."""
    tol = resolve_tol(tol)
    count = len(l_fam)
    ps, ms = _per_sample(pairs, count), _per_sample(m, count)
    values = tuple(gr.pair_index(pull_back(p, l, tol), mm, tol).index
                   for p, mm, l in zip(ps, ms, l_fam.samples))
    return IndexProfile(values, len(set(values)) == 1)


@dataclass(frozen=True)
class NestedInstance:
    """Fixed or per-sample nested pairs with a fixed or per-sample ``m``."""

    pairs: object
    m: object


def _tally(rep: Report, name: str, flags: list):
    rep.add(name, sum(bool(f) for f in flags), len(flags))


def verify_theorem_k0(instance, l_loop: SampledLoop, tol: Tolerance | None = None,
                      path_samples: int = 8, constant_defect: tuple | bool | None = None,
                      strict: bool = True) -> Report:
    """Pointwise index theorem plus constancy along a family.

    ``instance`` is a :class:`NestedInstance`, an :class:`OperatorPair`,
    or a list of operator pairs (one per sample). Per-identity checks are
    tallied as ``(samples passing, samples)``.
    ``constant_defect`` declares the defect ``(dim K, dim K')`` constant,
    either as ``True`` or as the expected tuple; a jump (or a mismatch)
    raises :class:`NonconstantDefect`.
    """
    tol = resolve_tol(tol)
    count = len(l_loop)
    rep = Report("K0 family theorem")
    if isinstance(instance, NestedInstance):
        ps, ms = _per_sample(instance.pairs, count), _per_sample(instance.m, count)
        big, ok_main, ok_path, defects = [], [], [], []
        for p, m, l in zip(ps, ms, l_loop.samples):
            lifted = pull_back(p, l, tol)
            ind_big = gr.pair_index(lifted, m, tol).index
            ind_small = index_in_beta(p, l, push_forward(p, m, tol), tol).index
            rel = classify_relative(p, m, tol)
            defects.append((rel.dim_cap_min, rel.def_max))
            big.append(ind_big)
            ok_main.append(ind_big == ind_small + rel.dim_cap_min - rel.def_max)
            if rel.transversal and path_samples:
                c = tn_coordinates(p, m, tol)
                ok_path.append(all(gr.pair_index(lifted, tn_path(c, float(t)), tol).index == ind_big
                                   for t in np.linspace(0.0, 1.0, path_samples)))
        if constant_defect is True and len(set(defects)) > 1:
            raise NonconstantDefect(f"defect dimensions jump along the family: {sorted(set(defects))}")
        if isinstance(constant_defect, tuple) and any(d != constant_defect for d in defects):
            raise NonconstantDefect(f"defect dimensions {sorted(set(defects))} differ from {constant_defect}")
        _tally(rep, "ind(pull_back(L), M) = ind_beta(L, push_forward(M)) + dim K - dim K'", ok_main)
        if ok_path:
            _tally(rep, "index constant along canonical path of M", ok_path)
        rep.add("index constant along family", len(set(big)), 1)
        rep.values.update(indices=big, defects=[list(d) for d in defects])
    else:
        ops = _per_sample(instance, count)
        indices, kers, cokers, by_name = [], [], [], {}
        ok_path = []
        for op, l in zip(ops, l_loop.samples):
            p = graphs(op, tol)
            sample = verify_point_index_formula(op, l, tol, strict=False, pair=p)
            for c in sample.checks:
                by_name.setdefault(c.name, []).append(c.passed)
            indices.append(sample.values["index_realization"])
            kers.append(sample.values["dim_ker_min"])
            cokers.append(sample.values["dim_coker_max"])
            h = horizontal(op.space_dim)
            if path_samples and classify_relative(p, h, tol).transversal:
                c = tn_coordinates(p, h, tol)
                lifted = pull_back(p, l, tol)
                ok_path.append(all(gr.pair_index(lifted, tn_path(c, float(t)), tol).index == indices[-1]
                                   for t in np.linspace(0.0, 1.0, path_samples)))
        for name, flags in by_name.items():
            _tally(rep, name, flags)
        if ok_path:
            _tally(rep, "index constant along canonical path of H (+) 0", ok_path)
        rep.add("index constant along family", len(set(indices)), 1)
        rep.values.update(indices=indices, dim_ker_min=kers, dim_coker_max=cokers,
                          constant_kernels=len(set(kers)) == 1 and len(set(cokers)) == 1)
    return rep.raise_on_failure() if strict else rep


# -- K^1 ---------------------------------------------------------------------


def verify_theorem_k1(sp: sy.SymplecticSpace, gamma: Subspace | Sequence[Subspace], m: Subspace,
                      l_loop: SampledLoop, tol: Tolerance | None = None,
                      max_depth: int = DEFAULT_REFINE_DEPTH, strict: bool = True) -> Report:
    """Compare the ambient winding of ``(pull_back(L_x), M)`` with the boundary winding of ``(L_x, push_forward(M))``.

    ``l_loop`` holds Lagrangians of each ``beta_x`` as ambient vectors. The
    two windings are computed in different symplectic spaces (the ambient
    one and the compressed boundary one), so agreement is a cross-check.
    """
    tol = resolve_tol(tol)
    if not l_loop.closed or closure_gap(l_loop) > tol.gap_abs:
        raise NotClosed("boundary loop does not close")
    count = len(l_loop)
    gammas = _per_sample(gamma, count)
    um_inv = sy.lagrangian_unitary(sp, m, tol).unitary.conj().T
    cache: dict = {}

    def boundary(g):
        key = id(g)
        if key not in cache:
            p = sy.isotropic_pair(sp, g, tol)
            if not classify_relative(p, m, tol).transversal:
                raise NotTransversal("M is not transversal to (gamma, gamma^omega)")
            sp_b = sy.boundary_form(sp, p, tol)
            n_b = sy.to_beta(p, push_forward(p, m, tol))
            cache[key] = (p, sp_b, sy.lagrangian_unitary(sp_b, n_b, tol).unitary.conj().T)
        return cache[key]

    big, small = [], []
    for g, l in zip(gammas, l_loop.samples):
        p, sp_b, un_inv = boundary(g)
        big.append(np.linalg.det(-um_inv @ sy.lagrangian_unitary(sp, pull_back(p, l, tol), tol).unitary))
        small.append(np.linalg.det(-un_inv @ sy.lagrangian_unitary(sp_b, sy.to_beta(p, l), tol).unitary))
    w_big = winding_from_dets(l_loop.params, big, None, max_depth, tol)
    w_small = winding_from_dets(l_loop.params, small, None, max_depth, tol)
    rep = Report("K1 loop theorem")
    rep.values.update(winding_ambient=w_big.winding, winding_boundary=w_small.winding,
                      max_step_ambient=w_big.max_step_phase, max_step_boundary=w_small.max_step_phase)
    rep.add("ind(pull_back(L), M) = ind_beta(L, push_forward(M))  [winding]", w_big.winding, w_small.winding)
    return rep.raise_on_failure() if strict else rep


def planted_lagrangian_loop(sp_beta: sy.SymplecticSpace, p: NestedPair, reference: Subspace, winding: int,
                            samples: int, rng) -> SampledLoop:
    """Closed loop ``L_x`` in ``beta`` with ``det(-kappa_rel(L_x; reference))`` of degree ``winding``.

    ``-kappa_rel(L_x; reference) = Q diag(e^{i w x}, 1, ...) Q^H`` with a
    fixed random unitary ``Q`` on the plus eigenspace of ``beta``.
    """
    d = sp_beta.plus_basis.shape[1]
    if d == 0:
        raise DimensionMismatch("boundary space is zero; no loop can wind")
    u_ref = sy.lagrangian_unitary(sp_beta, sy.to_beta(p, reference)).unitary
    q = random_unitary(d, rng)
    params = np.linspace(0.0, 1.0, samples)

    def at(x):
        phases = np.ones(d, dtype=complex)
        phases[0] = np.exp(2j * np.pi * winding * x)
        neg_k = q @ np.diag(phases) @ q.conj().T
        return sy.from_beta(p, sy.lagrangian_from_unitary(sp_beta, -u_ref @ neg_k))

    loop = SampledLoop.from_function(at, params)
    # pin the closing sample to the first one exactly
    return SampledLoop(loop.samples[:-1] + (loop.samples[0],), params)
