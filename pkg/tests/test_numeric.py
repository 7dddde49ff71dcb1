import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fredholm_lab import numeric as nu
from fredholm_lab.errors import NonFinite, NotIdempotent
from fredholm_lab.instances import gaussian


def column_space_gap(a, b):
    return np.linalg.norm(a @ a.conj().T - b @ b.conj().T, 2)


class TestTolerance:
    def test_defaults(self):
        tol = nu.Tolerance()
        assert tol.rank_rel == 1e-10 and tol.gap_abs == 1e-8

    @pytest.mark.parametrize("kw", [{"rank_rel": 0.0}, {"gap_abs": 1.0}, {"rank_rel": float("nan")},
                                    {"gap_abs": -1e-3}])
    def test_rejects_out_of_range(self, kw):
        with pytest.raises(ValueError):
            nu.Tolerance(**kw)

    def test_default_context_restores(self):
        before = nu.get_default_tol()
        with nu.default_tol(nu.Tolerance(1e-6, 1e-5)):
            assert nu.get_default_tol().gap_abs == 1e-5
        assert nu.get_default_tol() == before


class TestOrthonormalize:
    def test_single_column(self):
        f = nu.orthonormalize(np.array([[3.0], [4.0]]))
        assert f.shape == (2, 1)
        assert np.allclose(np.abs(f[:, 0]), [0.6, 0.8], atol=1e-14)

    def test_duplicate_column(self):
        f = nu.orthonormalize(np.array([[1.0, 1.0], [0.0, 0.0]]))
        assert f.shape == (2, 1)
        assert np.allclose(np.abs(f[:, 0]), [1.0, 0.0])

    def test_low_rank_product(self, rng):
        m = gaussian(rng, 6, 3) @ gaussian(rng, 3, 4)
        f = nu.orthonormalize(m)
        assert f.shape == (6, 3)
        u = np.linalg.svd(m)[0][:, :3]
        assert column_space_gap(f, u) <= 1e-10

    def test_non_finite(self):
        with pytest.raises(NonFinite):
            nu.orthonormalize(np.array([[1.0], [np.nan]]))

    def test_zero_columns(self):
        assert nu.orthonormalize(np.zeros((4, 0))).shape == (4, 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_frame_invariants(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(1, 9))
        m = gaussian(r, n, int(r.integers(0, n + 2)))
        f = nu.orthonormalize(m)
        assert np.linalg.norm(f.conj().T @ f - np.eye(f.shape[1]), 2) <= 1e-8 if f.size else True
        assert f.shape[1] == nu.numerical_rank(m)
        # re-orthonormalizing a frame gives the same subspace
        g = nu.orthonormalize(f)
        assert g.shape == f.shape and (f.size == 0 or column_space_gap(f, g) <= 1e-12)


class TestRank:
    def test_zero(self):
        assert nu.numerical_rank(np.zeros((3, 3))) == 0

    def test_threshold(self):
        assert nu.numerical_rank(np.diag([1.0, 1e-14])) == 1

    def test_generic_product(self, rng):
        assert nu.numerical_rank(gaussian(rng, 5, 2) @ gaussian(rng, 2, 5)) == 2

    def test_tolerance_dependent(self):
        m = np.diag([1.0, 1e-7])
        assert nu.numerical_rank(m) == 2
        assert nu.numerical_rank(m, nu.Tolerance(rank_rel=1e-5)) == 1


class TestIdempotentToProjector:
    def test_fixed_point(self, rng):
        f = nu.orthonormalize(gaussian(rng, 5, 2))
        p = f @ f.conj().T
        assert np.max(np.abs(nu.idempotent_to_projector(p) - p)) <= 1e-12

    def test_oblique(self):
        out = nu.idempotent_to_projector(np.array([[1.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-14)

    def test_zero(self):
        assert np.allclose(nu.idempotent_to_projector(np.zeros((3, 3))), 0)

    def test_not_idempotent(self):
        with pytest.raises(NotIdempotent):
            nu.idempotent_to_projector(np.array([[2.0, 0.0], [0.0, 0.0]]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_column_projector(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(1, 8))
        k = int(r.integers(0, n + 1))
        basis = gaussian(r, n, n)
        # oblique idempotent: identity on the first k basis vectors, zero on the rest
        t = basis @ np.diag([1.0] * k + [0.0] * (n - k)) @ np.linalg.inv(basis)
        p = nu.idempotent_to_projector(t)
        assert nu.is_hermitian(p) and np.linalg.norm(p @ p - p, 2) <= 1e-8
        f = nu.orthonormalize(t, scale=1.0)
        assert np.linalg.norm(p - f @ f.conj().T, 2) <= 1e-8


def test_null_space_and_unitary_checks(rng):
    m = gaussian(rng, 3, 5)
    ns = nu.null_space(m)
    assert ns.shape == (5, 2) and np.linalg.norm(m @ ns) <= 1e-10
    q = np.linalg.qr(gaussian(rng, 4, 4))[0]
    assert nu.is_unitary(q) and not nu.is_unitary(2 * q)
