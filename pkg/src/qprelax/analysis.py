"""Structural condition checkers for the relaxation theory.

Covers the dichotomy between exact and trivial relaxations (positive
semidefiniteness of Q on null(A)), recession-cone curvature analysis, the
classical ray-based unboundedness test, desk-scale copositivity by exact
enumeration, and sampling of the induced underestimator along segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conic import OPTIMAL, UNBOUNDED, SolveOptions, _pinned_solve
from .core import QpInstance, evaluate_objective, is_feasible
from .errors import DeskScaleLimit, InfeasibleInstance, PointInfeasible
from .numerics import nullspace_basis
from .oracle import (
    basic_feasible_points,
    enum_cap,
    enumerate_vertices,
    linear_min_over_polytope,
    minimize_quad_over_polytope,
)

CASE1 = "UNBOUNDED_CASE1"
CASE2 = "UNBOUNDED_CASE2"
NOT_DETECTED = "NOT_DETECTED"


@dataclass(frozen=True)
class NullspaceCurvatureReport:
    """Whether Q is positive semidefinite on null(A).

    When the condition fails, ``witness`` is a null-space direction of
    strictly negative curvature, re-verifiable from raw data.
    """

    holds: bool
    witness: Optional[np.ndarray]
    min_eigenvalue: float
    tolerance: float


@dataclass(frozen=True)
class RecessionReport:
    """Curvature analysis of the recession cone ``{A d = 0, d >= 0}``.

    ``min_curvature`` is the exact minimum of ``d^T Q d`` over the recession
    directions normalized to the unit simplex (+inf when the cone is
    trivial); ``zero_directions`` samples normalized directions of zero
    curvature.
    """

    l_nontrivial: bool
    min_curvature: float
    neg_direction: Optional[np.ndarray]
    zero_directions: tuple[np.ndarray, ...]
    tolerance: float


@dataclass(frozen=True)
class UnboundednessVerdict:
    """Outcome of the ray-based unboundedness test.

    CASE1: a recession direction of negative curvature exists.  CASE2: a
    zero-curvature recession direction along which the objective decreases
    from some feasible point.  NOT_DETECTED is sound but incomplete: the
    second case is only checked over enumerated extreme zero-curvature
    directions.
    """

    status: str
    direction: Optional[np.ndarray] = None
    point: Optional[np.ndarray] = None


@dataclass(frozen=True)
class CopositivityCheck:
    """Exact minimum of the quadratic form over the standard simplex."""

    min_value: float
    minimizer: np.ndarray


def check_psd_on_nullspace(inst: QpInstance, tol: float = 1e-9) -> NullspaceCurvatureReport:
    """Decide whether Q is positive semidefinite on null(A).

    The reduced matrix ``N^T Q N`` over an orthonormal null-space basis is
    eigendecomposed; failure produces the most negative direction mapped
    back to the original coordinates.
    """
    N = nullspace_basis(inst.A)
    qscale = max(1.0, float(np.abs(inst.Q).max()))
    if N.shape[1] == 0:
        return NullspaceCurvatureReport(True, None, math.inf, tol)
    H = N.T @ inst.Q @ N
    H = 0.5 * (H + H.T)
    values, vectors = np.linalg.eigh(H)
    holds = values[0] >= -tol * qscale
    witness = None
    if not holds:
        witness = N @ vectors[:, 0]
        witness = witness / float(np.abs(witness).max())
    return NullspaceCurvatureReport(bool(holds), witness, float(values[0]), tol)


def analyze_recession_cone(
    inst: QpInstance, cap: Optional[int] = None, tol: float = 1e-9
) -> RecessionReport:
    """Exact curvature analysis of the recession cone.

    Nontriviality and the minimum of ``d^T Q d`` are decided over the
    compact slice ``{A d = 0, e^T d = 1, d >= 0}`` by basic-solution and
    face enumeration.
    """
    if inst.n > enum_cap(cap):
        raise DeskScaleLimit(f"n={inst.n} exceeds the enumeration cap {enum_cap(cap)}")
    aug = np.vstack([inst.A, np.ones((1, inst.n))])
    rhs = np.concatenate([np.zeros(inst.m), [1.0]])
    rays = basic_feasible_points(aug, rhs, cap=cap)
    if not rays:
        return RecessionReport(False, math.inf, None, (), tol)
    curv = minimize_quad_over_polytope(inst.Q, np.zeros(inst.n), aug, rhs, cap=cap)
    qscale = max(1.0, float(np.abs(inst.Q).max()))
    neg = None
    if curv.value < -tol * qscale:
        neg = curv.minimizers[0]
    zero_dirs = []
    seen = set()
    for d in list(rays) + list(curv.minimizers):
        if abs(float(d @ inst.Q @ d)) <= tol * qscale:
            key = tuple(np.round(d, 8))
            if key not in seen:
                seen.add(key)
                zero_dirs.append(d)
    return RecessionReport(True, float(curv.value), neg, tuple(zero_dirs), tol)


def detect_unbounded(inst: QpInstance, cap: Optional[int] = None, tol: float = 1e-9) -> UnboundednessVerdict:
    """Ray-based test for an objective unbounded below on the feasible set.

    Requires a nonempty feasible region.  The second case is checked only
    over extreme zero-curvature recession directions, so NOT_DETECTED does
    not certify boundedness below.
    """
    verts = enumerate_vertices(inst, cap=cap)
    if not verts:
        raise InfeasibleInstance("unboundedness test requires a feasible instance")
    report = analyze_recession_cone(inst, cap=cap, tol=tol)
    qscale = max(1.0, float(np.abs(inst.Q).max()))
    if report.neg_direction is not None:
        return UnboundednessVerdict(CASE1, direction=report.neg_direction)
    gscale = qscale + float(np.abs(inst.c).max())
    for d in report.zero_directions:
        g = inst.Q @ d
        const = float(inst.c @ d)
        value, argmin, ray = linear_min_over_polytope(g, inst.A, inst.b, cap=cap)
        if value == -math.inf:
            v0 = verts[0]
            h0 = float((inst.Q @ v0 + inst.c) @ d)
            rate = float(g @ ray)
            t = (abs(h0) + 1.0) / max(-rate, 1e-12)
            return UnboundednessVerdict(CASE2, direction=d, point=v0 + t * ray)
        if value + const < -tol * gscale:
            return UnboundednessVerdict(CASE2, direction=d, point=argmin)
    return UnboundednessVerdict(NOT_DETECTED)


def check_copositivity_desk_scale(Q, cap: Optional[int] = None) -> CopositivityCheck:
    """Exact minimum of ``x^T Q x`` over the standard simplex.

    Q is copositive exactly when the minimum is nonnegative; the check is
    by exhaustive face enumeration and is limited to desk-scale orders.
    """
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[0]
    if n > enum_cap(cap):
        raise DeskScaleLimit(f"n={n} exceeds the enumeration cap {enum_cap(cap)}")
    res = minimize_quad_over_polytope(
        Q, np.zeros(n), np.ones((1, n)), np.array([1.0]), cap=cap
    )
    return CopositivityCheck(min_value=float(res.value), minimizer=res.minimizers[0])


# ---------------------------------------------------------------------------
# envelope sampling


@dataclass(frozen=True)
class EnvelopeRow:
    t: float
    q: float
    lk: float
    status: str


def sample_envelope(
    inst: QpInstance,
    cone: str,
    start,
    end,
    samples: int = 11,
    opts: Optional[SolveOptions] = None,
) -> list[EnvelopeRow]:
    """Evaluate the underestimator and the objective along a segment.

    Both endpoints must be feasible; the segment stays feasible by
    convexity.  Solver failures on individual samples are recorded in the
    row status rather than raised.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    for label, pt in (("start", start), ("end", end)):
        if not is_feasible(inst, pt, tol=1e-7):
            raise PointInfeasible(f"{label} point of the segment is infeasible")
    opts = opts or SolveOptions()
    rows = []
    warm = None
    for t in np.linspace(0.0, 1.0, samples):
        x = (1.0 - t) * start + t * end
        qval = evaluate_objective(inst, x)
        result, state = _pinned_solve(inst, cone, x, opts, warm=warm)
        if result.status == OPTIMAL:
            warm = state
        lk = result.value
        rows.append(EnvelopeRow(t=float(t), q=qval, lk=lk, status=result.status))
    return rows


def envelope_csv(rows) -> str:
    """Render envelope samples as CSV with 12 significant digits."""
    lines = ["t,q,lK,status"]
    for row in rows:
        lines.append(f"{row.t:.12g},{row.q:.12g},{row.lk:.12g},{row.status}")
    return "\n".join(lines) + "\n"
