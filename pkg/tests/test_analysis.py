import math

import numpy as np
import pytest

from qprelax.analysis import (
    CASE1,
    CASE2,
    NOT_DETECTED,
    analyze_recession_cone,
    check_copositivity_desk_scale,
    check_psd_on_nullspace,
    detect_unbounded,
    envelope_csv,
    sample_envelope,
)
from qprelax.conic import OPTIMAL, SolveOptions, UNBOUNDED, solve_relaxation
from qprelax.core import DNN, PSD0
from qprelax.errors import DeskScaleLimit, InfeasibleInstance, PointInfeasible
from qprelax.generators import BOUNDED, CONVEX_ON_NULLSPACE, random_instance
from qprelax.oracle import global_solve

from conftest import make_qp


class TestPsdOnNullspace:
    def test_globally_psd(self):
        inst = make_qp(np.eye(2), [0, 0], [[1, 1]], [1])
        assert check_psd_on_nullspace(inst).holds

    def test_indefinite_on_nullspace(self):
        inst = make_qp(np.diag([1.0, -3.0]), [0, 0], [[1, 1]], [1])
        report = check_psd_on_nullspace(inst)
        assert not report.holds
        d = report.witness
        assert np.abs(inst.A @ d).max() <= 1e-9
        assert float(d @ inst.Q @ d) < 0
        # reduced curvature of the normalized direction (1,-1)/sqrt(2)
        assert report.min_eigenvalue == pytest.approx(-1.0)

    def test_trivial_nullspace(self):
        inst = make_qp(np.diag([-5.0, -5.0]), [0, 0], [[1, 0], [0, 1]], [1, 1])
        report = check_psd_on_nullspace(inst)
        assert report.holds
        assert math.isinf(report.min_eigenvalue)


class TestRecessionCone:
    def test_simplex_trivial(self):
        inst = make_qp(np.eye(2), [0, 0], [[1, 1]], [1])
        report = analyze_recession_cone(inst)
        assert not report.l_nontrivial
        assert math.isinf(report.min_curvature)

    def test_horn_nonnegative_curvature(self, horn):
        inst, _ = horn
        report = analyze_recession_cone(inst)
        assert report.l_nontrivial
        assert report.min_curvature >= -1e-9
        assert report.neg_direction is None

    def test_negative_curvature_witness(self):
        inst = make_qp(-np.eye(2), [0, 0], [[1, -1]], [1])
        report = analyze_recession_cone(inst)
        assert report.min_curvature < 0
        d = report.neg_direction
        assert np.allclose(d / d.max(), [1.0, 1.0])
        assert float(d @ inst.Q @ d) < 0

    def test_witnesses_verify_from_raw_data(self):
        inst = make_qp([[0, -1], [-1, 0]], [0, 0], [[1, -1]], [1])
        report = analyze_recession_cone(inst)
        if report.neg_direction is not None:
            d = report.neg_direction
            assert np.abs(inst.A @ d).max() <= 1e-8
            assert d.min() >= -1e-9
            assert float(d @ inst.Q @ d) < 0


class TestDetectUnbounded:
    def test_case1(self):
        inst = make_qp(-np.eye(2), [0, 0], [[1, -1]], [1])
        verdict = detect_unbounded(inst)
        assert verdict.status == CASE1
        d = verdict.direction
        assert float(d @ inst.Q @ d) < 0 and d.min() >= -1e-9

    def test_case2(self):
        inst = make_qp(np.zeros((2, 2)), [-1, -1], [[1, -1]], [0])
        verdict = detect_unbounded(inst)
        assert verdict.status == CASE2
        d, x = verdict.direction, verdict.point
        assert abs(float(d @ inst.Q @ d)) <= 1e-9
        assert float((inst.Q @ x + inst.c) @ d) < 0
        from qprelax.core import is_feasible

        assert is_feasible(inst, x, tol=1e-7)

    def test_bounded_not_detected(self, simplex_convex):
        assert detect_unbounded(simplex_convex).status == NOT_DETECTED

    def test_requires_feasible(self):
        inst = make_qp(np.eye(2), [0, 0], [[1, 1]], [-1])
        with pytest.raises(InfeasibleInstance):
            detect_unbounded(inst)


class TestCopositivity:
    def test_identity(self):
        check = check_copositivity_desk_scale(np.eye(3))
        assert check.min_value == pytest.approx(1.0 / 3.0)
        assert np.allclose(check.minimizer, [1 / 3] * 3)

    def test_horn_boundary(self, horn):
        inst, _ = horn
        check = check_copositivity_desk_scale(inst.Q)
        assert abs(check.min_value) <= 1e-9

    def test_not_copositive(self):
        check = check_copositivity_desk_scale(np.array([[1.0, -2.0], [-2.0, 1.0]]))
        assert check.min_value == pytest.approx(-0.5)
        assert np.allclose(check.minimizer, [0.5, 0.5])

    def test_cap(self, monkeypatch):
        monkeypatch.setenv("QPRELAX_ENUM_CAP", "2")
        with pytest.raises(DeskScaleLimit):
            check_copositivity_desk_scale(np.eye(4))


class TestEnvelopeSampling:
    def test_convex_matches_objective(self, simplex_convex):
        rows = sample_envelope(
            simplex_convex, DNN, [1.0, 0.0], [0.0, 1.0], samples=5,
            opts=SolveOptions(tol_primal=1e-9, tol_dual=1e-9),
        )
        for row in rows:
            assert row.status == OPTIMAL
            assert row.lk == pytest.approx(row.q, abs=1e-6)

    def test_bilinear_edge_is_flat(self, simplex_bilinear):
        rows = sample_envelope(
            simplex_bilinear, DNN, [1.0, 0.0], [0.0, 1.0], samples=5,
            opts=SolveOptions(tol_primal=1e-9, tol_dual=1e-9),
        )
        for row in rows:
            t = row.t
            assert row.q == pytest.approx(2 * t * (1 - t), abs=1e-12)
            assert row.lk == pytest.approx(0.0, abs=1e-6)

    def test_horn_rows_unbounded(self, horn):
        inst, _ = horn
        rows = sample_envelope(
            inst, DNN, [0, 9, 0, 0, 0.0], [0, 0, 0, 0, 4.5], samples=3
        )
        assert all(row.status == UNBOUNDED for row in rows)
        assert all(row.lk == -math.inf for row in rows)

    def test_csv_format(self, simplex_convex):
        rows = sample_envelope(simplex_convex, DNN, [1.0, 0.0], [0.0, 1.0], samples=3)
        csv = envelope_csv(rows)
        lines = csv.strip().split("\n")
        assert lines[0] == "t,q,lK,status"
        assert len(lines) == 4
        cells = lines[1].split(",")
        assert len(cells) == 4
        float(cells[0]), float(cells[1]), float(cells[2])

    def test_infeasible_endpoint(self, simplex_convex):
        with pytest.raises(PointInfeasible):
            sample_envelope(simplex_convex, DNN, [1.0, 1.0], [0.0, 1.0], samples=3)


class TestDichotomy:
    def test_holds_implies_exact(self):
        opts = SolveOptions(tol_primal=1e-9, tol_dual=1e-9)
        for seed in range(3):
            inst = random_instance(CONVEX_ON_NULLSPACE, 3, 1, seed)
            assert check_psd_on_nullspace(inst).holds
            lstar = global_solve(inst).value
            for cone in (DNN, PSD0):
                res = solve_relaxation(inst, cone, opts)
                assert res.status == OPTIMAL
                assert res.value == pytest.approx(lstar, abs=1e-5 * (1 + abs(lstar)))

    def test_fails_implies_border_cone_unbounded(self):
        found = 0
        for seed in range(12):
            inst = random_instance(BOUNDED, 3, 1, seed)
            if check_psd_on_nullspace(inst).holds:
                continue
            found += 1
            res = solve_relaxation(inst, PSD0)
            assert res.status == UNBOUNDED
            if found >= 3:
                break
        assert found >= 3
