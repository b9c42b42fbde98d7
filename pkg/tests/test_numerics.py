import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qprelax.core import DNN, lift_instance
from qprelax.errors import DimensionMismatch, NonFinite
from qprelax.numerics import (
    NONNEG,
    PSD,
    ROW0NONNEG,
    AffineProjector,
    build_affine_projector,
    certificate_projector,
    cone_violation,
    nullspace_basis,
    project_cone,
    sym_eigen,
)

def sym_matrices(n, elements=st.floats(min_value=-5, max_value=5)):
    return arrays(np.float64, (n, n), elements=elements).map(lambda m: 0.5 * (m + m.T))


class TestEigen:
    def test_identity(self):
        dec = sym_eigen(np.eye(3))
        assert np.allclose(dec.values, [1, 1, 1])

    def test_diagonal(self):
        dec = sym_eigen(np.diag([-2.0, 5.0]))
        assert np.allclose(dec.values, [-2, 5])

    def test_off_diagonal(self):
        dec = sym_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(dec.values, [-1, 1])

    def test_nonfinite(self):
        with pytest.raises(NonFinite):
            sym_eigen(np.array([[np.inf, 0.0], [0.0, 1.0]]))

    @given(sym_matrices(4))
    def test_invariants(self, m):
        dec = sym_eigen(m)
        scale = max(1.0, float(np.abs(m).max()))
        for lam, v in zip(dec.values, dec.vectors.T):
            assert np.linalg.norm(m @ v - lam * v) <= 1e-9 * scale
        assert np.allclose(dec.vectors.T @ dec.vectors, np.eye(4), atol=1e-10)


class TestNullspace:
    def test_row(self):
        n = nullspace_basis(np.array([[1.0, 1.0]]))
        assert n.shape == (2, 1)
        assert abs(abs(n[0, 0]) - 1 / np.sqrt(2)) < 1e-12
        assert np.allclose(np.array([[1.0, 1.0]]) @ n, 0.0)

    def test_full_rank(self):
        assert nullspace_basis(np.eye(3)).shape == (3, 0)

    def test_horn_row(self, horn):
        inst, _ = horn
        n = nullspace_basis(inst.A)
        assert n.shape == (5, 4)
        assert np.abs(inst.A @ n).max() <= 1e-10 * np.abs(inst.A).max()
        assert np.allclose(n.T @ n, np.eye(4), atol=1e-10)

    def test_zero_matrix(self):
        n = nullspace_basis(np.zeros((2, 3)))
        assert n.shape == (3, 3)


class TestConeProjections:
    def test_psd_clip(self):
        out = project_cone(np.diag([-1.0, 2.0]), PSD)
        assert np.allclose(out, np.diag([0.0, 2.0]))

    def test_nonneg(self):
        out = project_cone(np.array([[1.0, -3.0], [-3.0, 1.0]]), NONNEG)
        assert np.allclose(out, np.eye(2))

    def test_row0_only(self):
        m = np.zeros((3, 3))
        m[0, 2] = m[2, 0] = -5.0
        m[1, 2] = m[2, 1] = -5.0
        out = project_cone(m, ROW0NONNEG)
        assert out[0, 2] == 0.0 and out[2, 0] == 0.0
        assert out[1, 2] == -5.0

    @given(sym_matrices(3), sym_matrices(3))
    def test_idempotent_and_nonexpansive(self, m1, m2):
        for cone in (PSD, NONNEG, ROW0NONNEG):
            p1 = project_cone(m1, cone)
            assert np.abs(project_cone(p1, cone) - p1).max() <= 1e-10
            d_before = np.linalg.norm(m1 - m2)
            d_after = np.linalg.norm(p1 - project_cone(m2, cone))
            assert d_after <= d_before + 1e-10

    @given(sym_matrices(4))
    def test_psd_output_psd(self, m):
        out = project_cone(m, PSD)
        scale = max(1.0, float(np.abs(m).max()))
        assert np.linalg.eigvalsh(out).min() >= -1e-10 * scale


class TestAffineProjector:
    def test_direct_constraints_idempotent(self):
        g1 = np.eye(3)
        g2 = np.zeros((3, 3))
        g2[0, 0] = 1.0
        proj = AffineProjector([g1, g2], [1.0, 0.25], 3)
        m = np.random.default_rng(0).normal(size=(3, 3))
        m = 0.5 * (m + m.T)
        once = proj.apply(m)
        assert np.abs(proj.apply(once) - once).max() <= 1e-10
        assert abs(np.trace(once) - 1.0) <= 1e-10
        assert abs(once[0, 0] - 0.25) <= 1e-10

    def test_zero_matrix_gets_unit_corner(self, horn):
        inst, _ = horn
        lp = lift_instance(inst, DNN)
        proj = build_affine_projector(lp)
        out = proj.apply(np.zeros((6, 6)))
        assert out[0, 0] == pytest.approx(1.0, abs=1e-10)
        assert abs(float(np.tensordot(lp.ahat, out))) <= 1e-8

    def test_feasible_point_unchanged(self, horn):
        inst, _ = horn
        lp = lift_instance(inst, DNN)
        proj = build_affine_projector(lp)
        v = np.concatenate(([1.0], [0, 1, 0, 0, 4.0]))
        y = np.outer(v, v)
        assert np.abs(proj.apply(y) - y).max() <= 1e-9

    def test_pinned_row(self, horn):
        inst, _ = horn
        lp = lift_instance(inst, DNN)
        xt = np.array([0, 1, 0, 0, 4.0])
        proj = build_affine_projector(lp, pin=xt)
        out = proj.apply(np.zeros((6, 6)))
        assert np.allclose(out[0], np.concatenate(([1.0], xt)), atol=1e-9)
        again = proj.apply(out)
        assert np.abs(again - out).max() <= 1e-10

    def test_pin_dimension_check(self, horn):
        inst, _ = horn
        lp = lift_instance(inst, DNN)
        with pytest.raises(DimensionMismatch):
            build_affine_projector(lp, pin=np.ones(3))

    def test_certificate_slice(self, horn):
        inst, dtilde = horn
        lp = lift_instance(inst, DNN)
        proj = certificate_projector(lp)
        d = np.zeros((6, 6))
        d[1:, 1:] = dtilde / np.trace(dtilde)
        out = proj.apply(d)
        # the certificate block already satisfies every constraint
        assert np.abs(out - d).max() <= 1e-9
        assert abs(np.trace(out) - 1.0) <= 1e-10
        assert abs(out[0, 0]) <= 1e-12


class TestDegenerateConstraints:
    def test_dependent_rows_warn_and_solve_least_norm(self):
        from qprelax.errors import DegenerateConstraints

        g = np.zeros((2, 2))
        g[0, 0] = 1.0
        with pytest.warns(DegenerateConstraints):
            proj = AffineProjector([g, 2.0 * g], [1.0, 2.0], 2)
        assert proj.degenerate
        out = proj.apply(np.zeros((2, 2)))
        assert out[0, 0] == pytest.approx(1.0)
        assert np.abs(proj.apply(out) - out).max() <= 1e-10


class TestConeViolation:
    def test_dnn(self, horn):
        _, dtilde = horn
        d = np.zeros((6, 6))
        d[1:, 1:] = dtilde
        assert cone_violation(d, DNN) <= 1e-9

    def test_detects_negative_entry(self):
        m = np.eye(3)
        m[1, 2] = m[2, 1] = -0.5
        assert cone_violation(m, DNN) >= 0.5
