"""Nested pairs of subspaces and extension pairs of operators.

For ``gamma_min`` inside ``gamma_max`` the boundary space ``beta`` is
modelled as the orthogonal complement of ``gamma_min`` in ``gamma_max``,
and the trace map as orthogonal projection onto it. Subspaces of ``beta``
are ordinary :class:`Subspace` objects of the ambient space that happen
to lie in ``beta``.

Operators are finite matrices restricted to a domain subspace; their
graphs live in ``C^n (+) C^n`` with the first block the domain side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fredholm_lab import grassmann as gr
from fredholm_lab.errors import DimensionMismatch, NotInBeta, NotNested
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import Tolerance, as_square, null_space, numerical_rank, orthonormalize, resolve_tol
from fredholm_lab.reports import Report


@dataclass(frozen=True)
class NestedPair:
    gamma_min: Subspace
    gamma_max: Subspace
    beta: Subspace
    f_comp: Subspace

    @property
    def ambient_dim(self) -> int:
        return self.gamma_max.ambient_dim


def make_nested(gamma_min: Subspace, gamma_max: Subspace, tol: Tolerance | None = None) -> NestedPair:
    tol = resolve_tol(tol)
    if gamma_min.ambient_dim != gamma_max.ambient_dim:
        raise DimensionMismatch("gamma_min and gamma_max live in different spaces")
    if not gr.contains(gamma_max, gamma_min, tol):
        raise NotNested("gamma_min is not contained in gamma_max")
    beta = gr.complement(gamma_min, within=gamma_max)
    if beta.dim != gamma_max.dim - gamma_min.dim:
        raise NotNested("boundary space has inconsistent dimension")
    return NestedPair(gamma_min, gamma_max, beta, gr.complement(gamma_max))


def check_in_beta(p: NestedPair, l: Subspace, tol: Tolerance):
    if l.ambient_dim != p.ambient_dim:
        raise DimensionMismatch("boundary subspace has wrong ambient dimension")
    if not gr.contains(p.beta, l, tol):
        raise NotInBeta("subspace does not lie in the boundary space")


def gamma(p: NestedPair, vectors, tol: Tolerance | None = None) -> np.ndarray:
    """Trace map: orthogonal projection of vectors of ``gamma_max`` onto ``beta``."""
    return gr.projector(p.beta) @ np.asarray(vectors, dtype=complex)


def pull_back(p: NestedPair, l: Subspace, tol: Tolerance | None = None) -> Subspace:
    """``L (+) gamma_min``: the intermediate subspace with boundary condition ``l``."""
    tol = resolve_tol(tol)
    check_in_beta(p, l, tol)
    return gr.direct_sum(l, p.gamma_min)


def push_forward(p: NestedPair, m: Subspace, tol: Tolerance | None = None) -> Subspace:
    """Trace ``gamma(m & gamma_max)`` of an arbitrary subspace, as a subspace of ``beta``."""
    tol = resolve_tol(tol)
    cap = gr.intersect(m, p.gamma_max, tol)
    return Subspace(orthonormalize(gamma(p, cap.frame), tol, scale=1.0))


@dataclass(frozen=True)
class RelativePosition:
    """Position of ``m`` relative to the nested pair.

    ``k_space`` is ``m & gamma_min`` and ``k_prime_space`` the orthogonal
    complement of ``m + gamma_max``.
    """

    dim_cap_min: int
    def_max: int
    transversal: bool
    sum_with_min_dim: int
    k_space: Subspace = field(repr=False, compare=False)
    k_prime_space: Subspace = field(repr=False, compare=False)


def classify_relative(p: NestedPair, m: Subspace, tol: Tolerance | None = None) -> RelativePosition:
    tol = resolve_tol(tol)
    k = gr.intersect(m, p.gamma_min, tol)
    k_prime = gr.complement(gr.sum(m, p.gamma_max, tol))
    return RelativePosition(
        dim_cap_min=k.dim,
        def_max=k_prime.dim,
        transversal=(k.dim == 0 and k_prime.dim == 0),
        sum_with_min_dim=gr.sum(m, p.gamma_min, tol).dim,
        k_space=k,
        k_prime_space=k_prime,
    )


def index_in_beta(p: NestedPair, l: Subspace, n: Subspace, tol: Tolerance | None = None) -> gr.PairIndexReport:
    """Pair index of two subspaces of ``beta``, codimension measured in ``beta``."""
    return gr.pair_index(l, n, tol, within=p.beta)


def verify_relative_calculus(p: NestedPair, m: Subspace, l: Subspace,
                             tol: Tolerance | None = None, strict: bool = True) -> Report:
    """Check the push-forward/pull-back calculus for one ``(m, l)``.

    Checks: push-forward inverts pull-back, the two dimension sequences
    relating ``(pull_back(l), m)`` to ``(l, push_forward(m))``, and, when
    ``m`` is transversal to the pair, equivalence of transversality.
    """
    tol = resolve_tol(tol)
    n_amb = p.ambient_dim
    lifted = pull_back(p, l, tol)
    trace = push_forward(p, m, tol)
    rel = classify_relative(p, m, tol)
    rep = Report("relative calculus")
    round_trip = gr.gap_distance(push_forward(p, lifted, tol), l)
    rep.values["round_trip_gap"] = round_trip
    rep.add("push_forward o pull_back = id", round_trip <= tol.gap_abs, True)

    cap_big = gr.intersect(lifted, m, tol).dim
    cap_small = gr.intersect(l, trace, tol).dim
    rep.add("dim(pull_back(L) & M) = dim(M & G) + dim(L & push_forward(M))",
            cap_big, rel.dim_cap_min + cap_small)
    codim_big = n_amb - gr.sum(lifted, m, tol).dim
    codim_small = p.beta.dim - gr.sum(l, trace, tol).dim
    rep.add("codim(pull_back(L) + M) = codim(G' + M) + codim_beta(L + push_forward(M))",
            codim_big, rel.def_max + codim_small)
    if rel.transversal:
        rep.add("transversal(pull_back(L), M) <=> transversal_beta(L, push_forward(M))",
                cap_big == 0 and codim_big == 0, cap_small == 0 and codim_small == 0)
    rep.values.update(dim_cap_big=cap_big, dim_cap_small=cap_small, codim_big=codim_big,
                      codim_small=codim_small, m_transversal=rel.transversal)
    return rep.raise_on_failure() if strict else rep


def kk_defect(p: NestedPair, m: Subspace, l: Subspace, tol: Tolerance | None = None,
              strict: bool = True) -> Report:
    """Defect-corrected index identity for a possibly non-transversal ``m``.

    ``ind(pull_back(L), M) = ind_beta(L, push_forward(M)) + dim K - dim K'``
    with ``K = M & gamma_min`` and ``K' = (M + gamma_max)^perp``.
    """
    tol = resolve_tol(tol)
    big = gr.pair_index(pull_back(p, l, tol), m, tol).index
    small = index_in_beta(p, l, push_forward(p, m, tol), tol).index
    rel = classify_relative(p, m, tol)
    rep = Report("kk defect")
    rep.values.update(index_ambient=big, index_beta=small, dim_k=rel.dim_cap_min,
                      dim_k_prime=rel.def_max, transversal=rel.transversal)
    rep.add("ind(pull_back(L), M) = ind_beta(L, push_forward(M)) + dim K - dim K'",
            big, small + rel.dim_cap_min - rel.def_max)
    return rep.raise_on_failure() if strict else rep


# -- operators -------------------------------------------------------------


@dataclass(frozen=True)
class OperatorPair:
    """Extension pair ``A`` (on ``dom_min``) inside ``A'`` (on ``dom_max``).

    Both operators are restrictions of the single matrix ``action``.
    """

    action: np.ndarray
    dom_max: Subspace
    dom_min: Subspace

    @property
    def space_dim(self) -> int:
        return self.action.shape[0]


def make_operator_pair(action, dom_max: Subspace | None = None, dom_min: Subspace | None = None,
                       tol: Tolerance | None = None) -> OperatorPair:
    tol = resolve_tol(tol)
    a = as_square(action, name="action").copy()
    a.setflags(write=False)
    n = a.shape[0]
    dom_max = Subspace.full(n) if dom_max is None else dom_max
    dom_min = Subspace.zero(n) if dom_min is None else dom_min
    for name, d in (("dom_max", dom_max), ("dom_min", dom_min)):
        if d.ambient_dim != n:
            raise DimensionMismatch(f"{name} must live in C^{n}")
    if not gr.contains(dom_max, dom_min, tol):
        raise NotNested("dom_min is not contained in dom_max")
    return OperatorPair(a, dom_max, dom_min)


def graph(action, domain: Subspace, tol: Tolerance | None = None) -> Subspace:
    """``{(x, action x) : x in domain}`` inside ``C^n (+) C^n``."""
    a = np.asarray(action, dtype=complex)
    d = domain.frame
    return Subspace(orthonormalize(np.vstack([d, a @ d]), tol, scale=1.0))


def graphs(op: OperatorPair, tol: Tolerance | None = None) -> NestedPair:
    tol = resolve_tol(tol)
    return make_nested(graph(op.action, op.dom_min, tol), graph(op.action, op.dom_max, tol), tol)


def horizontal(n: int) -> Subspace:
    """``H (+) 0`` in ``C^n (+) C^n``."""
    return Subspace.coordinate(2 * n, range(n))


def vertical(n: int) -> Subspace:
    """``0 (+) H`` in ``C^n (+) C^n``."""
    return Subspace.coordinate(2 * n, range(n, 2 * n))


def kernel_on(action, domain: Subspace, tol: Tolerance | None = None) -> Subspace:
    a = np.asarray(action, dtype=complex)
    if domain.dim == 0:
        return Subspace.zero(a.shape[0])
    coeffs = null_space(a @ domain.frame, tol, scale=max(1.0, float(np.linalg.norm(a, 2))))
    return Subspace(orthonormalize(domain.frame @ coeffs, tol, scale=1.0))


def range_on(action, domain: Subspace, tol: Tolerance | None = None) -> Subspace:
    a = np.asarray(action, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a, 2))) if a.size else 1.0
    return Subspace(orthonormalize(a @ domain.frame, tol, scale=scale)) if domain.dim else Subspace.zero(a.shape[0])


def kernel_dims(op: OperatorPair, tol: Tolerance | None = None) -> dict:
    """``dim ker A``, ``dim ker A'``, ``dim coker A``, ``dim coker A'`` from the matrices."""
    tol = resolve_tol(tol)
    n = op.space_dim
    scale = max(1.0, float(np.linalg.norm(op.action, 2)))
    r_min = numerical_rank(op.action @ op.dom_min.frame, tol, scale=scale) if op.dom_min.dim else 0
    r_max = numerical_rank(op.action @ op.dom_max.frame, tol, scale=scale) if op.dom_max.dim else 0
    return {
        "ker_min": op.dom_min.dim - r_min,
        "ker_max": op.dom_max.dim - r_max,
        "coker_min": n - r_min,
        "coker_max": n - r_max,
    }


def cauchy_data(op: OperatorPair, tol: Tolerance | None = None, pair: NestedPair | None = None) -> Subspace:
    """Trace of the kernel of the maximal operator, as a subspace of ``beta``."""
    tol = resolve_tol(tol)
    p = graphs(op, tol) if pair is None else pair
    ker = kernel_on(op.action, op.dom_max, tol)
    lifted = np.vstack([ker.frame, np.zeros_like(ker.frame)])
    return Subspace(orthonormalize(gamma(p, lifted), tol, scale=1.0))


@dataclass(frozen=True)
class Realization:
    """Operator (or linear relation) with graph ``pull_back(l)``.

    ``operator`` is the matrix ``graph bottom @ pinv(graph top)`` acting on
    ``domain``; it is ``None`` when the graph is not the graph of an
    operator (``is_graph`` false).
    """

    domain: Subspace
    kernel: Subspace
    range: Subspace
    coker_dim: int
    index: int
    graph: Subspace = field(repr=False)
    is_graph: bool = True
    operator: np.ndarray | None = field(default=None, repr=False)


def realization_from_graph(g: Subspace, tol: Tolerance | None = None) -> Realization:
    tol = resolve_tol(tol)
    n = g.ambient_dim // 2
    top, bottom = g.frame[:n], g.frame[n:]
    domain = Subspace(orthonormalize(top, tol, scale=1.0))
    is_graph = domain.dim == g.dim
    # kernel: graph vectors with zero second component
    coeffs = null_space(bottom, tol, scale=1.0)
    kernel = Subspace(orthonormalize(top @ coeffs, tol, scale=1.0)) if coeffs.size else Subspace.zero(n)
    rng = Subspace(orthonormalize(bottom, tol, scale=1.0))
    coker = n - rng.dim
    operator = bottom @ np.linalg.pinv(top) if is_graph else None
    return Realization(domain, kernel, rng, coker, kernel.dim - coker, g, is_graph, operator)


def realization(op: OperatorPair, l: Subspace, tol: Tolerance | None = None,
                pair: NestedPair | None = None) -> Realization:
    """Realization ``A_L`` with domain ``{x in dom A' : gamma(x, A'x) in L}``."""
    tol = resolve_tol(tol)
    p = graphs(op, tol) if pair is None else pair
    return realization_from_graph(pull_back(p, l, tol), tol)


def verify_point_index_formula(op: OperatorPair, l: Subspace, tol: Tolerance | None = None,
                               strict: bool = True, pair: NestedPair | None = None) -> Report:
    """Check the index formula of a single realization and its two dimension sequences.

    The realization side is computed from the graph ``pull_back(l)``; the
    boundary side from the Cauchy data (built from ``ker A'``, not from a
    push-forward) and kernel/cokernel counts of the action matrix.
    """
    tol = resolve_tol(tol)
    n = op.space_dim
    p = graphs(op, tol) if pair is None else pair
    check_in_beta(p, l, tol)
    real = realization(op, l, tol, pair=p)
    c = cauchy_data(op, tol, pair=p)
    dims = kernel_dims(op, tol)
    boundary = index_in_beta(p, l, c, tol)
    rep = Report("point index formula")
    rep.values.update(
        index_realization=real.index, dim_ker_realization=real.kernel.dim,
        dim_coker_realization=real.coker_dim, index_beta=boundary.index,
        dim_l_cap_c=boundary.dim_cap, codim_l_plus_c=boundary.codim_sum,
        dim_ker_min=dims["ker_min"], dim_coker_max=dims["coker_max"],
        dim_beta=p.beta.dim, dim_cauchy=c.dim,
    )
    rep.add("ind A_L = ind_beta(L, C) + dim ker A - dim coker A'",
            real.index, boundary.index + dims["ker_min"] - dims["coker_max"])
    rep.add("dim ker A_L = dim ker A + dim(L & C)", real.kernel.dim, dims["ker_min"] + boundary.dim_cap)
    rep.add("dim coker A_L = dim coker A' + codim_beta(L + C)",
            real.coker_dim, dims["coker_max"] + boundary.codim_sum)
    rep.add("ind A_L = ind(graph A_L, H (+) 0)", real.index,
            gr.pair_index(real.graph, horizontal(n), tol).index)
    rep.add("C = push_forward(H (+) 0)", gr.gap_distance(c, push_forward(p, horizontal(n), tol)) <= tol.gap_abs, True)
    if dims["ker_min"] == 0 and dims["coker_max"] == 0:
        rep.add("A_L invertible <=> (L, C) transversal",
                real.kernel.dim == 0 and real.coker_dim == 0, boundary.transversal)
    return rep.raise_on_failure() if strict else rep
