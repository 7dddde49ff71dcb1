import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fredholm_lab import extension as ex
from fredholm_lab import grassmann as gr
from fredholm_lab import instances as ins
from fredholm_lab import symplectic as sy
from fredholm_lab.errors import NotAGraph, NotAnnihilator, NotHermitian, NotIsotropic, NotLagrangian, NotSymplectic
from fredholm_lab.grassmann import Subspace
from fredholm_lab.numeric import null_space
from fredholm_lab.suites import planted_lagrangian_pair

SEEDS = st.integers(0, 2**32 - 1)


class TestStandardSpace:
    def test_n1(self):
        assert np.array_equal(sy.standard_j(1), np.array([[0, -1], [1, 0]]))

    def test_unitary(self):
        j = sy.standard_j(3)
        assert np.allclose(j.conj().T @ j, np.eye(6))

    def test_eigenspaces(self):
        # {(e, i e)} is ker(J + i) and {(e, -i e)} is ker(J - i) for this J
        n = 3
        sp = sy.standard_symplectic(n)
        eye = np.eye(n)
        lam_plus = Subspace.span(np.vstack([eye, 1j * eye]))
        lam_minus = Subspace.span(np.vstack([eye, -1j * eye]))
        j = sp.j
        assert gr.gap_distance(lam_plus, Subspace(null_space(j + 1j * np.eye(2 * n)))) <= 1e-12
        assert gr.gap_distance(lam_minus, Subspace(null_space(j - 1j * np.eye(2 * n)))) <= 1e-12
        assert gr.gap_distance(sp.plus, lam_plus) <= 1e-12
        assert gr.gap_distance(sp.minus, lam_minus) <= 1e-12

    def test_rejects_non_symplectic(self):
        with pytest.raises(NotSymplectic):
            sy.SymplecticSpace(np.eye(2))


class TestOmega:
    def test_examples(self, rng):
        sp = sy.standard_symplectic(1)
        assert sy.omega(sp, [1, 0], [0, 1]) == pytest.approx(1)
        x = rng.standard_normal(2)
        assert sy.omega(sp, x, x) == pytest.approx(0, abs=1e-15)

    def test_skew_hermitian(self, rng):
        sp = sy.standard_symplectic(3)
        x, y = ins.gaussian(rng, 6), ins.gaussian(rng, 6)
        assert sy.omega(sp, y, x) == pytest.approx(-np.conj(sy.omega(sp, x, y)))


class TestAnnihilator:
    def test_examples(self):
        sp = sy.standard_symplectic(1)
        assert sy.annihilator(sp, Subspace.zero(2)).dim == 2
        h = Subspace.coordinate(2, [0])
        assert gr.equal(sy.annihilator(sp, h), h)

    @settings(max_examples=40, deadline=None)
    @given(SEEDS)
    def test_involution_and_duality(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(1, 5))
        sp = sy.standard_symplectic(n)
        l = ins.random_subspace(2 * n, int(r.integers(0, 2 * n + 1)), r)
        m = ins.random_subspace(2 * n, int(r.integers(0, 2 * n + 1)), r)
        assert gr.gap_distance(sy.annihilator(sp, sy.annihilator(sp, l)), l) <= 1e-10
        lhs = sy.annihilator(sp, gr.sum(l, m))
        rhs = gr.intersect(sy.annihilator(sp, l), sy.annihilator(sp, m))
        assert lhs.dim == rhs.dim and gr.gap_distance(lhs, rhs) <= 1e-8

    def test_predicates(self, rng):
        sp = sy.standard_symplectic(2)
        assert sy.is_lagrangian(sp, sy.hermitian_graph(ins.random_hermitian(2, rng)))
        e1 = Subspace.coordinate(4, [0])
        assert sy.is_isotropic(sp, e1) and not sy.is_lagrangian(sp, e1)
        assert not sy.is_isotropic(sp, Subspace.full(4))


class TestUnitaryPicture:
    @settings(max_examples=40, deadline=None)
    @given(SEEDS)
    def test_round_trip(self, seed):
        r = np.random.default_rng(seed)
        sp = sy.standard_symplectic(int(r.integers(1, 5)))
        l = ins.random_lagrangian(sp, r)
        u = sy.lagrangian_unitary(sp, l).unitary
        assert sy.is_lagrangian(sp, l)
        assert gr.gap_distance(sy.lagrangian_from_unitary(sp, u), l) <= 1e-10

    def test_rejects_non_lagrangian(self):
        with pytest.raises(NotLagrangian):
            sy.lagrangian_unitary(sy.standard_symplectic(2), Subspace.coordinate(4, [0]))

    def test_kappa_horizontal_vertical(self):
        for n in (1, 3):
            sp = sy.standard_symplectic(n)
            assert np.abs(sy.kappa(sp, ex.horizontal(n)) + np.eye(n)).max() <= 1e-12
            assert np.abs(sy.kappa(sp, ex.vertical(n)) - np.eye(n)).max() <= 1e-12

    def test_kappa_of_graph_of_one(self):
        sp = sy.standard_symplectic(1)
        assert sy.kappa(sp, sy.hermitian_graph(np.eye(1)))[0, 0] == pytest.approx(-1j)

    def test_cayley_scalars(self):
        assert sy.cayley(np.zeros((1, 1)))[0, 0] == pytest.approx(-1)
        assert sy.cayley(np.eye(1))[0, 0] == pytest.approx(-1j)

    def test_cayley_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            sy.cayley(np.array([[0, 1], [0, 0]]))

    @settings(max_examples=40, deadline=None)
    @given(SEEDS)
    def test_cayley_coherence(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(1, 9))
        a = ins.random_hermitian(n, r)
        c = sy.cayley(a)
        assert np.linalg.norm(sy.kappa(sy.standard_symplectic(n), sy.hermitian_graph(a)) - c, 2) <= 1e-10
        assert np.min(np.abs(np.linalg.eigvals(c) + 1)) > 1e-8


class TestRelativeUnitary:
    def test_self_and_complement(self, rng):
        sp = sy.standard_symplectic(3)
        m = ins.random_lagrangian(sp, rng)
        assert np.allclose(sy.kappa_rel(sp, m, m), np.eye(3))
        assert np.allclose(sy.kappa_rel(sp, gr.complement(m), m), -np.eye(3))

    @settings(max_examples=40, deadline=None)
    @given(SEEDS)
    def test_intersection_multiplicity(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(1, 5))
        sp = sy.standard_symplectic(n)
        meet = int(r.integers(0, n + 1))
        l, m = planted_lagrangian_pair(sp, r, meet)
        rep = gr.pair_index(l, m)
        assert rep.dim_cap == rep.codim_sum == meet
        assert sy.intersection_multiplicity(sy.kappa_rel(sp, l, m)) == meet
        assert sy.lagrangian_transversal(sp, l, m) == (meet == 0)


class TestBoundaryForm:
    def test_gamma_zero(self):
        sp = sy.standard_symplectic(2)
        p = sy.isotropic_pair(sp, Subspace.zero(4))
        sb = sy.boundary_form(sp, p)
        assert sb.ambient_dim == 4
        b = p.beta.frame
        assert np.allclose(b @ sb.j @ b.conj().T, sp.j)

    def test_gamma_lagrangian(self, rng):
        sp = sy.standard_symplectic(2)
        p = sy.isotropic_pair(sp, ins.random_lagrangian(sp, rng))
        assert p.beta.dim == 0

    def test_graph_of_one_on_e1(self):
        sp = sy.standard_symplectic(2)
        g = Subspace.span(np.array([1, 0, 1, 0]))
        p = sy.isotropic_pair(sp, g)
        sb = sy.boundary_form(sp, p)
        assert sb.ambient_dim == 2 and sb.has_lagrangians
        assert np.allclose(sb.j.conj().T, -sb.j) and np.allclose(sb.j.conj().T @ sb.j, np.eye(2))

    def test_errors(self, rng):
        sp = sy.standard_symplectic(2)
        with pytest.raises(NotIsotropic):
            sy.isotropic_pair(sp, Subspace.full(4))
        g = Subspace.coordinate(4, [0])
        p = ex.make_nested(g, Subspace.full(4))
        with pytest.raises(NotAnnihilator):
            sy.boundary_form(sp, p)

    def test_operator_boundary_form(self, rng):
        # for graph elements, omega = <xi, A* eta> - <A* xi, eta>: the operator
        # form up to a global sign
        n = 3
        sp = sy.standard_symplectic(n)
        a = ins.random_hermitian(n, rng)
        dom = ins.random_subspace(n, 1, rng)
        p = sy.isotropic_pair(sp, ex.graph(a, dom))
        sb = sy.boundary_form(sp, p)
        # A* of a symmetric restriction of a Hermitian matrix: (x, a x + w), w in dom^perp
        for _ in range(5):
            x, y = ins.gaussian(rng, n), ins.gaussian(rng, n)
            w1 = gr.projector(gr.complement(dom)) @ ins.gaussian(rng, n)
            w2 = gr.projector(gr.complement(dom)) @ ins.gaussian(rng, n)
            xi, eta = np.concatenate([x, a @ x + w1]), np.concatenate([y, a @ y + w2])
            assert gr.contains(p.gamma_max, Subspace.span(xi))
            gx, gy = p.beta.frame.conj().T @ xi, p.beta.frame.conj().T @ eta
            lhs = np.vdot(sb.j @ gx, gy)
            operator_form = np.vdot(a @ x + w1, y) - np.vdot(x, a @ y + w2)
            assert abs(lhs + operator_form) <= 1e-10


class TestSelfAdjointRealization:
    def test_unconstrained(self, rng):
        n = 3
        b = ins.random_hermitian(n, rng)
        op = ex.make_operator_pair(np.zeros((n, n)))
        real = sy.self_adjoint_realization(op, sy.hermitian_graph(b))
        assert real.is_graph and np.allclose(real.operator, b)

    def test_already_self_adjoint(self, rng):
        a = ins.random_hermitian(3, rng)
        op = ex.make_operator_pair(a, dom_min=Subspace.full(3))
        real = sy.self_adjoint_realization(op, Subspace.zero(6))
        assert real.is_graph and np.allclose(real.operator, a)

    def test_hermitian_extensions_of_one_on_e1(self):
        op = ex.make_operator_pair(np.eye(2), dom_min=Subspace.coordinate(2, [0]))
        sp = sy.standard_symplectic(2)
        p = sy.isotropic_pair(sp, ex.graph(op.action, op.dom_min))
        sb = sy.boundary_form(sp, p)
        graphs_seen = 0
        for theta in np.linspace(0, 2 * np.pi, 24, endpoint=False):
            l = sy.from_beta(p, sy.lagrangian_from_unitary(sb, np.array([[np.exp(1j * theta)]])))
            real = sy.self_adjoint_realization(op, l)
            assert sy.is_lagrangian(sp, real.graph)
            assert real.index == 0
            if real.is_graph:
                graphs_seen += 1
                m = real.operator
                assert np.allclose(m, m.conj().T, atol=1e-8)
                assert np.allclose(m @ [1, 0], [1, 0], atol=1e-8)
        assert graphs_seen >= 20

    def test_relation_flagged(self):
        # l containing the vertical direction (0, e2) gives a relation
        op = ex.make_operator_pair(np.eye(2), dom_min=Subspace.coordinate(2, [0]))
        sp = sy.standard_symplectic(2)
        p = sy.isotropic_pair(sp, ex.graph(op.action, op.dom_min))
        l = gr.intersect(p.beta, Subspace.coordinate(4, [3]))
        assert l.dim == 1
        real = sy.self_adjoint_realization(op, l)
        assert not real.is_graph
        with pytest.raises(NotAGraph):
            sy.self_adjoint_realization(op, l, require_graph=True)

    def test_rejects_non_lagrangian_condition(self):
        op = ex.make_operator_pair(np.eye(2), dom_min=Subspace.coordinate(2, [0]))
        sp = sy.standard_symplectic(2)
        p = sy.isotropic_pair(sp, ex.graph(op.action, op.dom_min))
        with pytest.raises(NotLagrangian):
            sy.self_adjoint_realization(op, p.beta)
