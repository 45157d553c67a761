"""Polar decomposition contracts for the SVD, iterative, fixed-interval,
and canonical routes."""

import numpy as np
import pytest

from csdk.errors import ConvergenceError, DimensionError
from csdk.kernel import U_ROUNDOFF, norm_fro
from csdk.polar import (
    canonical_polar,
    polar_iterative,
    polar_modified,
    polar_svd,
)
from csdk.testgen import gen_haar_stiefel
from csdk.zolotarev import SignApproxParams, eval_sign_approx


def conditioned(m, n, kappa, seed):
    sigma = np.geomspace(1.0, 1.0 / kappa, n)
    p = gen_haar_stiefel(m, n, seed)
    q = gen_haar_stiefel(n, n, seed + 1)
    return (p * sigma) @ q.conj().T


class TestPolarSvd:
    def test_identity(self):
        pf = polar_svd(np.eye(3, dtype=complex))
        np.testing.assert_allclose(pf.w, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(pf.h, np.eye(3), atol=1e-15)

    def test_scaled_identity(self):
        pf = polar_svd(2 * np.eye(3, dtype=complex))
        np.testing.assert_allclose(pf.w, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(pf.h, 2 * np.eye(3), atol=1e-14)

    def test_haar_input_recovered(self):
        u = gen_haar_stiefel(6, 6, seed=5)
        pf = polar_svd(u)
        assert norm_fro(pf.w - u) <= 1e2 * U_ROUNDOFF * 10
        assert norm_fro(pf.h - np.eye(6)) <= 1e2 * U_ROUNDOFF

    def test_h_hermitian_psd(self):
        a = conditioned(8, 5, 1e3, seed=2)
        pf = polar_svd(a)
        assert norm_fro(pf.h - pf.h.conj().T) == 0.0
        assert np.min(np.linalg.eigvalsh(pf.h)) >= -50 * 5 * U_ROUNDOFF


class TestPolarIterative:
    def test_identity_is_fixed_point(self):
        pf = polar_iterative(np.eye(4, dtype=complex))
        assert pf.iterations == 1
        assert norm_fro(pf.w - np.eye(4)) <= 10 * U_ROUNDOFF

    def test_diagonal_against_svd_oracle(self):
        a = np.diag([1.0, 0.5]).astype(complex)
        ref = polar_svd(a)
        for method in ("qdwh", "zolo"):
            pf = polar_iterative(a, method=method)
            assert norm_fro(pf.w - ref.w) <= 1e2 * U_ROUNDOFF
            assert norm_fro(pf.h - a) <= 1e2 * U_ROUNDOFF

    @pytest.mark.parametrize("method", ["qdwh", "zolo"])
    def test_conditioned_residual_contract(self, method):
        m, n = 40, 30
        a = conditioned(m, n, 1e4, seed=11)
        pf = polar_iterative(a, method=method)
        bound = 50 * n * U_ROUNDOFF
        assert norm_fro(pf.w @ pf.h - a) / norm_fro(a) <= bound
        assert norm_fro(pf.w.conj().T @ pf.w - np.eye(n)) <= bound
        assert norm_fro(pf.h - pf.h.conj().T) == 0.0
        assert np.min(np.linalg.eigvalsh(pf.h)) >= -50 * n * U_ROUNDOFF
        ref = polar_svd(a)
        # Well inside the spectrum gap, the unitary factors agree closely.
        assert norm_fro(pf.w - ref.w) <= 1e-10

    def test_qdwh_iteration_cap(self):
        for kappa in (1e0, 1e4, 1e8):
            pf = polar_iterative(conditioned(25, 20, kappa, seed=3), method="qdwh")
            assert pf.iterations <= 6

    def test_zolo_two_rounds(self):
        pf = polar_iterative(conditioned(25, 20, 1e8, seed=4), method="zolo")
        assert pf.iterations == 2

    def test_family_members_agree_when_well_conditioned(self):
        a = conditioned(20, 15, 10.0, seed=9)
        w1 = polar_iterative(a, SignApproxParams(p=1, ell=0.05, iterations=6)).w
        w8 = polar_iterative(a, SignApproxParams(p=8, ell=0.05, iterations=2), method="zolo").w
        assert norm_fro(w1 - w8) <= 1e3 * U_ROUNDOFF

    def test_singular_input_signals(self):
        a = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ConvergenceError):
            polar_iterative(a)

    def test_wide_rejected(self):
        with pytest.raises(DimensionError):
            polar_iterative(np.ones((2, 3), dtype=complex))


class TestPolarModified:
    def test_well_conditioned_matches_iterative(self):
        q = gen_haar_stiefel(8, 2, seed=21)
        a = (q * np.array([1.0, 0.9])) @ gen_haar_stiefel(2, 2, seed=22).conj().T
        ref = polar_iterative(a, method="zolo")
        pf = polar_modified(a)
        assert pf.mode == "interval_modified"
        assert norm_fro(pf.h - ref.h) <= 1e2 * U_ROUNDOFF

    def test_exact_zero_singular_value(self):
        a = np.diag([1.0, 0.0]).astype(complex)
        pf = polar_modified(a)
        ev = np.sort(np.linalg.eigvalsh(pf.h))
        assert abs(ev[0]) <= 1e2 * U_ROUNDOFF
        assert abs(ev[1] - 1.0) <= 1e2 * U_ROUNDOFF

    def test_tiny_singular_value_stays_below(self):
        a = np.diag([1.0, 1e-18]).astype(complex)
        pf = polar_modified(a)
        ev = np.sort(np.linalg.eigvalsh(pf.h))[::-1]
        assert abs(ev[0] - 1.0) <= 1e2 * U_ROUNDOFF
        assert -1e2 * U_ROUNDOFF <= ev[1] <= 1e-18 + 1e2 * U_ROUNDOFF
        sv = np.linalg.svd(pf.w, compute_uv=False)
        assert sv[0] <= 1.0 + 1e2 * U_ROUNDOFF

    def test_near_isometry_identities(self):
        # Singular values straddling the interval edge: accurate H, small
        # residual, and W singular values inside [0, 1 + O(u)].
        n = 12
        sigma = np.ones(n)
        sigma[-3:] = [1e-8, 1e-16, 0.0]
        a = (gen_haar_stiefel(2 * n, n, seed=31) * sigma) @ gen_haar_stiefel(
            n, n, seed=32
        ).conj().T
        pf = polar_modified(a)
        href = polar_svd(a).h
        assert norm_fro(pf.h - href) <= 1e3 * U_ROUNDOFF
        assert norm_fro(pf.w @ pf.h - a) <= 1e3 * U_ROUNDOFF
        sv = np.linalg.svd(pf.w, compute_uv=False)
        assert sv[0] <= 1.0 + 50 * n * U_ROUNDOFF
        assert sv[-1] >= -50 * n * U_ROUNDOFF

    def test_scalar_shadow_consistency(self):
        # For diagonal input the matrix map acts entrywise, so the computed
        # Hermitian factor must match d * r(d) from the scalar shadow.
        d = np.array([1.0, 0.3, 1e-3, 1e-12, 1e-16])
        a = np.diag(d).astype(complex)
        params = SignApproxParams(p=8, ell=1e-15, iterations=2)
        pf = polar_modified(a, params=params)
        predicted = d * eval_sign_approx(d, params)
        np.testing.assert_allclose(
            np.real(np.diagonal(pf.h)), predicted, atol=1e2 * U_ROUNDOFF
        )


class TestCanonicalPolar:
    def test_identity(self):
        u, h = canonical_polar(np.eye(3, dtype=complex), 1e-10)
        np.testing.assert_allclose(u, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(h, np.eye(3), atol=1e-15)

    def test_rank_deficient_diagonal(self):
        u, h = canonical_polar(np.diag([2.0, 0.0]).astype(complex), 1e-10)
        np.testing.assert_allclose(u, np.diag([1.0, 0.0]), atol=1e-15)
        np.testing.assert_allclose(h, np.diag([2.0, 0.0]), atol=1e-15)

    def test_partial_isometry_property(self):
        x = gen_haar_stiefel(4, 2, seed=41)
        y = gen_haar_stiefel(3, 2, seed=42)
        a = x @ y.conj().T
        u, h = canonical_polar(a, 1e-8)
        assert norm_fro(u @ u.conj().T @ u - u) <= 1e2 * U_ROUNDOFF
        assert np.linalg.matrix_rank(u, 1e-8) == 2
        # Row space of U equals the range of H.
        assert norm_fro(u @ h - a) <= 1e2 * U_ROUNDOFF
