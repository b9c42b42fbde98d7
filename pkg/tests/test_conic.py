import math

import numpy as np
import pytest

from qprelax import conic
from qprelax.conic import (
    FEASIBILITY,
    FOUND,
    INFEASIBLE,
    NONE,
    OBJECTIVE,
    OPTIMAL,
    UNBOUNDED,
    SolveOptions,
    evaluate_underestimator,
    recession_certificate_search,
    solve_relaxation,
    verify_certificate,
)
from qprelax.core import DNN, PSD0, evaluate_objective, validate_lifted_point
from qprelax.errors import PointInfeasible
from qprelax.generators import (
    BOUNDED,
    CONVEX_ON_NULLSPACE,
    INFEASIBLE as KIND_INFEASIBLE,
    UNBOUNDED_SAFE,
    random_instance,
)
from qprelax.oracle import global_solve

from conftest import feasible_samples, make_qp

TIGHT = SolveOptions(tol_primal=1e-9, tol_dual=1e-9)


class TestSolveRelaxation:
    def test_convex_exact(self, simplex_convex):
        res = solve_relaxation(simplex_convex, DNN, TIGHT)
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(0.5, abs=1e-7)
        assert res.validation is not None and res.validation.ok

    def test_bilinear_envelope_exact(self, simplex_bilinear):
        res = solve_relaxation(simplex_bilinear, DNN, TIGHT)
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(0.0, abs=1e-7)

    def test_horn_unbounded_with_certificate(self, horn):
        inst, _ = horn
        res = solve_relaxation(inst, DNN)
        assert res.status == UNBOUNDED
        assert res.value == -math.inf
        cert = res.certificate
        assert cert is not None
        assert cert.objective_rate <= -0.1
        check = verify_certificate(inst, cert)
        assert check.ok

    def test_infeasible_short_circuit(self):
        inst = random_instance(KIND_INFEASIBLE, 3, 2, 1)
        for cone in (DNN, PSD0):
            res = solve_relaxation(inst, cone)
            assert res.status == INFEASIBLE
            assert res.iterations == 0
            assert res.value == math.inf

    def test_cone_ordering(self):
        for seed in range(3):
            inst = random_instance(CONVEX_ON_NULLSPACE, 3, 1, seed)
            dnn = solve_relaxation(inst, DNN, TIGHT)
            psd0 = solve_relaxation(inst, PSD0, TIGHT)
            assert psd0.value <= dnn.value + 1e-6 * (1 + abs(dnn.value))

    def test_lower_bound_vs_oracle(self):
        for seed in range(3):
            inst = random_instance(BOUNDED, 3, 1, seed)
            lstar = global_solve(inst).value
            res = solve_relaxation(inst, DNN, TIGHT)
            assert res.value <= lstar + 1e-6 * (1 + abs(lstar))

    def test_pinned_cone_ordering(self):
        inst = random_instance(CONVEX_ON_NULLSPACE, 3, 1, 8)
        for x in feasible_samples(inst, 3, seed=5):
            dnn = evaluate_underestimator(inst, DNN, x, TIGHT)
            psd0 = evaluate_underestimator(inst, PSD0, x, TIGHT)
            assert psd0.value <= dnn.value + 1e-6 * (1 + abs(dnn.value))


class TestUnderestimator:
    def test_exact_when_psd_on_nullspace(self):
        inst = random_instance(CONVEX_ON_NULLSPACE, 4, 2, 5)
        for x in feasible_samples(inst, 5, seed=1):
            res = evaluate_underestimator(inst, DNN, x, TIGHT)
            assert res.status == OPTIMAL
            assert res.value == pytest.approx(evaluate_objective(inst, x), abs=1e-5)

    def test_horn_pinned_unbounded(self, horn):
        inst, _ = horn
        res = evaluate_underestimator(inst, DNN, np.array([0, 1, 0, 0, 4.0]))
        assert res.status == UNBOUNDED

    def test_bilinear_midpoint_envelope(self, simplex_bilinear):
        res = evaluate_underestimator(simplex_bilinear, DNN, np.array([0.5, 0.5]), TIGHT)
        assert res.status == OPTIMAL
        assert res.value == pytest.approx(0.0, abs=1e-6)

    def test_underestimates_objective(self):
        inst = random_instance(BOUNDED, 3, 1, 11)
        for x in feasible_samples(inst, 10, seed=2):
            res = evaluate_underestimator(inst, DNN, x, TIGHT)
            assert res.status == OPTIMAL
            assert res.value <= evaluate_objective(inst, x) + 1e-6

    def test_midpoint_convexity(self):
        inst = random_instance(BOUNDED, 3, 1, 13)
        samples = feasible_samples(inst, 6, seed=3)
        for a, b in zip(samples[::2], samples[1::2]):
            la = evaluate_underestimator(inst, DNN, a, TIGHT).value
            lb = evaluate_underestimator(inst, DNN, b, TIGHT).value
            lm = evaluate_underestimator(inst, DNN, 0.5 * (a + b), TIGHT).value
            assert lm <= 0.5 * (la + lb) + 1e-6

    def test_min_over_points_bounds_unpinned(self):
        inst = random_instance(BOUNDED, 3, 1, 17)
        unpinned = solve_relaxation(inst, DNN, TIGHT).value
        values = [
            evaluate_underestimator(inst, DNN, x, TIGHT).value
            for x in feasible_samples(inst, 10, seed=4)
        ]
        assert min(values) >= unpinned - 1e-6

    def test_infeasible_anchor_rejected(self, simplex_convex):
        with pytest.raises(PointInfeasible):
            evaluate_underestimator(simplex_convex, DNN, np.array([1.0, 1.0]))

    def test_zero_block_property(self):
        # rows of X - x x^T on the zero support vanish for bounded instances
        inst = random_instance(BOUNDED, 4, 2, 23)
        res = global_solve(inst)
        x = res.minimizers[0]
        out = evaluate_underestimator(inst, DNN, x, TIGHT)
        assert out.status == OPTIMAL
        delta = out.point.X - np.outer(x, x)
        zero_rows = [j for j in range(inst.n) if x[j] <= 1e-9]
        if zero_rows:
            assert np.abs(delta[zero_rows, :]).max() <= 1e-5


class TestCertificateSearch:
    def test_horn_objective_rate(self, horn):
        inst, dtilde = horn
        res = recession_certificate_search(inst, DNN, OBJECTIVE)
        assert res.status == FOUND
        # the integer certificate scaled to unit trace achieves -1/9;
        # the search optimum can only be lower
        assert res.certificate.objective_rate <= -1.0 / 9.0 + 1e-6
        assert res.certificate.objective_rate <= -0.1

    def test_bounded_feasibility_none(self):
        inst = make_qp(np.eye(2), [0, 0], [[1, 1]], [1])
        res = recession_certificate_search(inst, DNN, FEASIBILITY)
        assert res.status == NONE

    def test_negative_curvature_border_cone(self):
        inst = make_qp([[0, -1], [-1, 0]], [0, 0], [[1, -1]], [0])
        res = recession_certificate_search(inst, PSD0, OBJECTIVE)
        assert res.status == FOUND
        assert res.certificate.objective_rate == pytest.approx(-1.0, abs=1e-6)
        check = verify_certificate(inst, res.certificate)
        assert check.ok

    def test_unbounded_safe_feasibility_found(self):
        inst = random_instance(UNBOUNDED_SAFE, 4, 2, 2)
        res = recession_certificate_search(inst, DNN, FEASIBILITY)
        assert res.status == FOUND
        check = verify_certificate(inst, res.certificate)
        assert check.ok
        assert abs(np.trace(res.certificate.d) - 1.0) <= 1e-6

    def test_trivial_face_short_circuit(self):
        inst = make_qp(np.eye(2), [0, 0], [[1, 0], [0, 1]], [1, 1])
        res = recession_certificate_search(inst, DNN, FEASIBILITY)
        assert res.status == NONE
        assert res.iterations == 0

    def test_bad_mode(self, simplex_convex):
        with pytest.raises(ValueError):
            recession_certificate_search(simplex_convex, DNN, "SIDEWAYS")


class TestOptions:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolveOptions(tol_primal=-1.0)
        with pytest.raises(ValueError):
            SolveOptions(unbounded_threshold=1.0)
        with pytest.raises(ValueError):
            SolveOptions(over_relaxation=2.5)

    def test_optimal_point_validates(self, simplex_bilinear):
        res = solve_relaxation(simplex_bilinear, DNN)
        assert res.status == OPTIMAL
        report = validate_lifted_point(
            simplex_bilinear, res.point, tol=10 * SolveOptions().tol_primal, cone=DNN
        )
        assert report.ok
