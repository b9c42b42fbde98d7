"""Ground-truth engine: exact global quadratic minimization over polyhedra.

The core is exhaustive face enumeration.  For every zero pattern the
quadratic is restricted to the face's affine hull; stationary points with a
positive semidefinite reduced Hessian, together with all vertices, cover
every possible location of the global minimum.  Recession directions are
analyzed first so that unbounded problems are flagged instead of silently
returning a wrong finite value.

All enumeration is capped (default 16 variables, override with the
QPRELAX_ENUM_CAP environment variable).
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import QpInstance, index_sets
from .errors import DeskScaleLimit, DimensionMismatch, NonFinite, PointInfeasible
from .numerics import nullspace_basis

ORACLE_OPTIMAL = "OPTIMAL"
ORACLE_INFEASIBLE = "INFEASIBLE"
ORACLE_UNBOUNDED = "UNBOUNDED_BELOW"
ORACLE_INCONCLUSIVE = "INCONCLUSIVE"

DEFAULT_ENUM_CAP = 16

_TOL_EQ = 1e-8
_TOL_PSD = 1e-9
_TOL_BOUND = 1e-9
_TOL_CURV = 1e-9
_DEDUP_DECIMALS = 8


def enum_cap(cap: Optional[int] = None) -> int:
    """Resolve the enumeration cap, honoring QPRELAX_ENUM_CAP."""
    if cap is not None:
        return int(cap)
    return int(os.environ.get("QPRELAX_ENUM_CAP", DEFAULT_ENUM_CAP))


@dataclass(frozen=True)
class OracleResult:
    """Exact minimization outcome.

    ``value`` is the optimal value with +inf / -inf sentinels for infeasible
    and unbounded problems; ``minimizers`` samples the optimal set; the
    ``certified`` flag records whether boundedness below was proved (it is
    always True for compact feasible regions).
    """

    value: float
    minimizers: tuple[np.ndarray, ...]
    attained: bool
    faces_explored: int
    status: str
    certified: bool = True
    unbounded_witness: Optional[dict] = None


@dataclass(frozen=True)
class KktCertificate:
    """First-order multipliers at a candidate point.

    ``s`` is forced to zero on the positive support; residuals are the
    stationarity, sign, and complementarity violations.
    """

    y: np.ndarray
    s: np.ndarray
    stationarity_residual: float
    min_multiplier: float
    complementarity_residual: float


@dataclass(frozen=True)
class LocalMinVerdict:
    is_local_min: bool
    kkt: Optional[KktCertificate]
    second_order_min: float


# ---------------------------------------------------------------------------
# basic feasible point enumeration


def basic_feasible_points(A, b, cap: Optional[int] = None, tol: float = _TOL_EQ):
    """All basic feasible solutions of ``{A x = b, x >= 0}``, deduplicated.

    Enumerates column subsets of size rank(A); a nonempty result is
    equivalent to feasibility of the system, and for bounded systems the
    result is the vertex set.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise DimensionMismatch("basic_feasible_points expects A (m x n) and b (m,)")
    if not (np.isfinite(A).all() and np.isfinite(b).all()):
        raise NonFinite("non-finite constraint data")
    m, n = A.shape
    scale = 1.0 + float(np.abs(b).max(initial=0.0)) + float(np.abs(A).max(initial=0.0))
    svals = np.linalg.svd(A, compute_uv=False)
    smax = svals[0] if svals.size else 0.0
    rank = int(np.sum(svals > 1e-10 * smax)) if smax > 0 else 0

    if rank == 0:
        if float(np.abs(b).max(initial=0.0)) <= tol * scale:
            return [np.zeros(n)]
        return []

    limit = 1 << enum_cap(cap)
    if math.comb(n, rank) > limit:
        raise DeskScaleLimit(
            f"{math.comb(n, rank)} column subsets exceed the enumeration cap"
        )

    points = []
    seen = set()
    for cols in itertools.combinations(range(n), rank):
        sub = A[:, cols]
        sub_svals = np.linalg.svd(sub, compute_uv=False)
        if sub_svals[-1] <= 1e-10 * max(smax, 1e-300):
            continue  # linearly dependent basis
        xb, *_ = np.linalg.lstsq(sub, b, rcond=None)
        if float(np.abs(sub @ xb - b).max(initial=0.0)) > tol * scale:
            continue
        if float(xb.min(initial=0.0)) < -tol * scale:
            continue
        x = np.zeros(n)
        x[list(cols)] = np.clip(xb, 0.0, None)
        key = tuple(np.round(x, _DEDUP_DECIMALS))
        if key not in seen:
            seen.add(key)
            points.append(x)
    return points


def enumerate_vertices(inst: QpInstance, cap: Optional[int] = None):
    """Basic feasible solutions of the instance polyhedron."""
    if inst.n > enum_cap(cap):
        raise DeskScaleLimit(f"n={inst.n} exceeds the enumeration cap {enum_cap(cap)}")
    return basic_feasible_points(inst.A, inst.b, cap=cap)


# ---------------------------------------------------------------------------
# linear minimization (support for unboundedness analysis)


def linear_min_over_polytope(g, A, b, cap: Optional[int] = None):
    """Minimize ``g^T x`` over ``{A x = b, x >= 0}`` exactly.

    Returns ``(value, argmin, ray)``: for unbounded problems value is -inf
    and ``ray`` is a recession direction with negative rate; for infeasible
    problems value is +inf.
    """
    g = np.asarray(g, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    verts = basic_feasible_points(A, b, cap=cap)
    if not verts:
        return math.inf, None, None
    n = A.shape[1]
    aug = np.vstack([A, np.ones((1, n))])
    rhs = np.concatenate([np.zeros(A.shape[0]), [1.0]])
    rays = basic_feasible_points(aug, rhs, cap=cap)
    gscale = 1.0 + float(np.abs(g).max(initial=0.0))
    for ray in rays:
        if float(g @ ray) < -_TOL_CURV * gscale:
            return -math.inf, None, ray
    values = [float(g @ v) for v in verts]
    k = int(np.argmin(values))
    return values[k], verts[k], None


# ---------------------------------------------------------------------------
# face enumeration engine


def _pattern_states(n: int, upper: np.ndarray):
    """Per-variable active-set states: 0 at lower bound, 1 free, 2 at upper."""
    choices = [(0, 1, 2) if np.isfinite(upper[j]) else (0, 1) for j in range(n)]
    total = 1
    for ch in choices:
        total *= len(ch)
    return choices, total


def _stationary_face_point(AF, rhs, NT_QFF, NT_cF, uF, cap):
    """Feasible point of a singular-Hessian stationary set, if one exists.

    The stationary set of the reduced quadratic is the affine set
    ``{AF x = rhs, N^T (QFF x + cF) = 0}``; the objective is constant on it,
    so any point inside the bounds certifies the face's candidate value.
    """
    M = np.vstack([AF, NT_QFF])
    r = np.concatenate([rhs, -NT_cF])
    finite = np.isfinite(uF)
    if finite.any():
        nf = AF.shape[1]
        k = int(finite.sum())
        slack_rows = np.zeros((k, nf + k))
        slack_rows[np.arange(k), np.flatnonzero(finite)] = 1.0
        slack_rows[np.arange(k), nf + np.arange(k)] = 1.0
        M = np.hstack([M, np.zeros((M.shape[0], k))])
        M = np.vstack([M, slack_rows])
        r = np.concatenate([r, uF[finite]])
    try:
        pts = basic_feasible_points(M, r, cap=cap)
    except DeskScaleLimit:
        return None
    if not pts:
        return None
    return pts[0][: AF.shape[1]]


def minimize_quad_over_polytope(
    Q,
    c,
    A,
    b,
    box=None,
    cap: Optional[int] = None,
    stop_below: Optional[float] = None,
) -> OracleResult:
    """Exact minimum of ``x^T Q x + 2 c^T x`` over ``{A x = b, 0 <= x <= box}``.

    ``box`` gives optional per-variable upper bounds (may contain inf; None
    means all inf).  The global minimizer of a quadratic lies in the relative
    interior of some face, where the reduced gradient vanishes and the
    reduced Hessian is positive semidefinite; enumerating those candidates
    plus all vertices is exact.  With ``stop_below`` the scan aborts early
    once any candidate value falls below the threshold (sign queries).
    """
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = Q.shape[0]
    if Q.shape != (n, n) or c.shape != (n,) or A.ndim != 2 or A.shape[1] != n:
        raise DimensionMismatch("inconsistent problem dimensions")
    if b.shape != (A.shape[0],):
        raise DimensionMismatch("b must match the number of constraint rows")
    for arr in (Q, c, A, b):
        if not np.isfinite(arr).all():
            raise NonFinite("non-finite problem data")
    upper = np.full(n, np.inf) if box is None else np.asarray(box, dtype=float).copy()
    if upper.shape != (n,):
        raise DimensionMismatch("box must give one upper bound per variable")
    if np.any(upper < 0):
        raise ValueError("upper bounds must be nonnegative")

    mixed = np.isfinite(upper).any() and not np.isfinite(upper).all()
    if mixed:
        # fold the finite bounds into equality rows with slacks, then rerun
        finite = np.flatnonzero(np.isfinite(upper))
        k = finite.size
        Q2 = np.zeros((n + k, n + k))
        Q2[:n, :n] = Q
        c2 = np.concatenate([c, np.zeros(k)])
        slack = np.zeros((k, n + k))
        slack[np.arange(k), finite] = 1.0
        slack[np.arange(k), n + np.arange(k)] = 1.0
        A2 = np.vstack([np.hstack([A, np.zeros((A.shape[0], k))]), slack])
        b2 = np.concatenate([b, upper[finite]])
        res = minimize_quad_over_polytope(Q2, c2, A2, b2, cap=cap, stop_below=stop_below)
        mins = tuple(x[:n] for x in res.minimizers)
        wit = res.unbounded_witness
        if wit is not None:
            wit = {k2: (v[:n] if isinstance(v, np.ndarray) else v) for k2, v in wit.items()}
        return OracleResult(
            value=res.value,
            minimizers=mins,
            attained=res.attained,
            faces_explored=res.faces_explored,
            status=res.status,
            certified=res.certified,
            unbounded_witness=wit,
        )

    certified = True
    compact = np.isfinite(upper).all()
    if not compact:
        aug = np.vstack([A, np.ones((1, n))])
        rhs = np.concatenate([np.zeros(A.shape[0]), [1.0]])
        rays = basic_feasible_points(aug, rhs, cap=cap)
        if rays:
            verts = basic_feasible_points(A, b, cap=cap)
            if not verts:
                return OracleResult(math.inf, (), False, 0, ORACLE_INFEASIBLE)
            curv = minimize_quad_over_polytope(Q, np.zeros(n), aug, rhs, cap=cap)
            qscale = 1.0 + float(np.abs(Q).max(initial=0.0))
            if curv.value < -_TOL_CURV * qscale:
                d = curv.minimizers[0]
                return OracleResult(
                    -math.inf,
                    (),
                    False,
                    curv.faces_explored,
                    ORACLE_UNBOUNDED,
                    certified=True,
                    unbounded_witness={"direction": d, "curvature": curv.value},
                )
            # zero-curvature rays: objective decreases linearly along some ray
            zero_dirs = [r for r in rays if abs(float(r @ Q @ r)) <= _TOL_CURV * qscale]
            for dmin in curv.minimizers:
                if abs(float(dmin @ Q @ dmin)) <= _TOL_CURV * qscale:
                    zero_dirs.append(dmin)
            gscale = 1.0 + float(np.abs(c).max(initial=0.0)) + qscale
            for d in zero_dirs:
                grad = Q @ d
                ray_rates = [float(grad @ r) for r in rays]
                if min(ray_rates, default=0.0) < -_TOL_CURV * gscale:
                    k = int(np.argmin(ray_rates))
                    v0 = verts[0]
                    h0 = float((Q @ v0 + c) @ d)
                    t = (abs(h0) + 1.0) / max(-ray_rates[k], 1e-12)
                    witness_x = v0 + t * rays[k]
                    return OracleResult(
                        -math.inf,
                        (),
                        False,
                        0,
                        ORACLE_UNBOUNDED,
                        certified=True,
                        unbounded_witness={"direction": d, "point": witness_x},
                    )
                values = [float((Q @ v + c) @ d) for v in verts]
                if min(values) < -_TOL_CURV * gscale:
                    k = int(np.argmin(values))
                    return OracleResult(
                        -math.inf,
                        (),
                        False,
                        0,
                        ORACLE_UNBOUNDED,
                        certified=True,
                        unbounded_witness={"direction": d, "point": verts[k]},
                    )
            curv_strict = curv.value > _TOL_CURV * qscale
            certified = bool(curv_strict)

    choices, total = _pattern_states(n, upper)
    if total > (1 << enum_cap(cap)):
        raise DeskScaleLimit(f"{total} face patterns exceed the enumeration cap")

    scale = 1.0 + float(np.abs(b).max(initial=0.0)) + float(np.abs(A).max(initial=0.0))
    candidates: list[tuple[float, np.ndarray]] = []
    faces = 0
    stop = False

    for states in itertools.product(*choices):
        faces += 1
        fixed_vals = np.zeros(n)
        free_idx = [j for j in range(n) if states[j] == 1]
        for j in range(n):
            if states[j] == 2:
                fixed_vals[j] = upper[j]
        fixed_idx = [j for j in range(n) if states[j] != 1]
        rhs = b - A[:, fixed_idx] @ fixed_vals[fixed_idx] if fixed_idx else b.copy()

        if not free_idx:
            if float(np.abs(rhs).max(initial=0.0)) <= _TOL_EQ * scale:
                x = fixed_vals.copy()
                candidates.append((float(x @ Q @ x + 2 * c @ x), x))
            continue

        AF = A[:, free_idx]
        x0, *_ = np.linalg.lstsq(AF, rhs, rcond=None)
        if float(np.abs(AF @ x0 - rhs).max(initial=0.0)) > _TOL_EQ * scale:
            continue  # empty face
        N = nullspace_basis(AF)
        QFF = Q[np.ix_(free_idx, free_idx)]
        cF = c[free_idx]
        uF = upper[free_idx]

        if N.shape[1] == 0:
            xF = x0
        else:
            H = N.T @ QFF @ N
            H = 0.5 * (H + H.T)
            g = N.T @ (QFF @ x0 + cF)
            w, V = np.linalg.eigh(H)
            hscale = max(1.0, float(np.abs(w).max(initial=0.0)))
            if w[0] < -_TOL_PSD * hscale:
                continue  # indefinite on this face: no interior minimum
            gp = V.T @ g
            singular = np.abs(w) <= 1e-10 * hscale
            gscale = max(1.0, float(np.abs(gp).max(initial=0.0)))
            if np.any(singular & (np.abs(gp) > 1e-8 * gscale)):
                continue  # gradient cannot vanish on this face
            t = np.where(singular, 0.0, -gp / np.where(singular, 1.0, w))
            xF = x0 + N @ (V @ t)
            inside = (
                float(xF.min(initial=0.0)) >= -_TOL_BOUND * scale
                and float((xF - uF).max(initial=0.0)) <= _TOL_BOUND * scale
            )
            if not inside and singular.any():
                # objective is constant on the stationary set; look for a
                # representative inside the face
                alt = _stationary_face_point(AF, rhs, N.T @ QFF, N.T @ cF, uF, cap)
                if alt is None:
                    continue
                xF = alt
            elif not inside:
                continue

        if (
            float(xF.min(initial=0.0)) < -_TOL_BOUND * scale
            or float((xF - uF).max(initial=0.0)) > _TOL_BOUND * scale
        ):
            continue
        x = fixed_vals.copy()
        x[free_idx] = np.clip(xF, 0.0, None)
        val = float(x @ Q @ x + 2 * c @ x)
        candidates.append((val, x))
        if stop_below is not None and val < stop_below:
            stop = True
            break

    if not candidates:
        return OracleResult(math.inf, (), False, faces, ORACLE_INFEASIBLE)

    vmin = min(v for v, _ in candidates)
    vtol = 1e-9 * (1.0 + abs(vmin))
    mins = []
    seen = set()
    for v, x in candidates:
        if v <= vmin + vtol:
            key = tuple(np.round(x, _DEDUP_DECIMALS))
            if key not in seen:
                seen.add(key)
                mins.append(x)
    # an early stop answers the sign query but leaves the scan incomplete
    exact = certified and not stop
    return OracleResult(
        value=vmin,
        minimizers=tuple(mins),
        attained=exact,
        faces_explored=faces,
        status=ORACLE_OPTIMAL if exact else ORACLE_INCONCLUSIVE,
        certified=exact,
    )


def global_solve(inst: QpInstance, cap: Optional[int] = None) -> OracleResult:
    """Exact optimal value of the instance, with unboundedness analysis.

    +inf for infeasible instances, -inf when a divergent ray is found.  For
    unbounded feasible regions where no divergence is found but zero
    curvature rays exist, the enumeration value is still exact provided the
    objective is bounded below; boundedness is certified when the quadratic
    part is copositive and the linear part nonnegative (the objective is
    then nonnegative on the whole orthant), otherwise the result is
    INCONCLUSIVE.
    """
    if inst.n > enum_cap(cap):
        raise DeskScaleLimit(f"n={inst.n} exceeds the enumeration cap {enum_cap(cap)}")
    res = minimize_quad_over_polytope(inst.Q, inst.c, inst.A, inst.b, cap=cap)
    if res.status == ORACLE_INCONCLUSIVE and float(inst.c.min()) >= 0.0:
        simplex = minimize_quad_over_polytope(
            inst.Q, np.zeros(inst.n), np.ones((1, inst.n)), np.array([1.0]), cap=cap
        )
        if simplex.value >= -_TOL_CURV * max(1.0, float(np.abs(inst.Q).max())):
            return OracleResult(
                value=res.value,
                minimizers=res.minimizers,
                attained=True,
                faces_explored=res.faces_explored,
                status=ORACLE_OPTIMAL,
                certified=True,
                unbounded_witness=None,
            )
    return res


# ---------------------------------------------------------------------------
# local minimizer verification


def verify_local_minimizer(
    inst: QpInstance,
    x,
    tol: float = 1e-8,
    cap: Optional[int] = None,
    index_tol: float = 1e-9,
) -> LocalMinVerdict:
    """Decide whether a feasible point is a local minimizer.

    Runs the first-order multiplier recovery (multipliers forced to zero on
    the positive support) and then minimizes the quadratic form over the
    critical cone intersected with the unit box, split into nonnegative
    parts; the point is a local minimizer exactly when both tests pass.
    """
    x = np.asarray(x, dtype=float)
    from .core import feasibility_residual  # local import to avoid cycle at module load

    if feasibility_residual(inst, x) > max(tol, 1e-8):
        raise PointInfeasible(f"point is not feasible (residual {feasibility_residual(inst, x):.3e})")

    sets = index_sets(np.clip(x, 0.0, None), tol=index_tol)
    P = [j - 1 for j in sets.positive]
    Z = [j - 1 for j in sets.zero]
    grad = inst.Q @ x + inst.c
    gscale = 1.0 + float(np.abs(grad).max(initial=0.0))

    if P:
        AP = inst.A[:, P]
        y, *_ = np.linalg.lstsq(AP.T, grad[P], rcond=None)
        stat_res = float(np.abs(AP.T @ y - grad[P]).max(initial=0.0))
    else:
        y = np.zeros(inst.m)
        stat_res = 0.0
    s = grad - inst.A.T @ y
    s[P] = 0.0
    min_mult = float(s[Z].min(initial=0.0)) if Z else 0.0
    compl = float(np.abs(x * s).max(initial=0.0))
    kkt_ok = stat_res <= tol * gscale and min_mult >= -tol * gscale

    kkt = KktCertificate(
        y=y,
        s=s,
        stationarity_residual=stat_res,
        min_multiplier=min_mult,
        complementarity_residual=compl,
    ) if kkt_ok else None

    if not kkt_ok:
        return LocalMinVerdict(is_local_min=False, kkt=None, second_order_min=math.nan)

    second_min = second_order_minimum(inst, x, grad, P, Z, cap=cap)
    qscale = 1.0 + float(np.abs(inst.Q).max(initial=0.0))
    is_min = second_min >= -tol * qscale
    return LocalMinVerdict(is_local_min=bool(is_min), kkt=kkt, second_order_min=second_min)


def second_order_minimum(
    inst: QpInstance,
    x,
    grad=None,
    P=None,
    Z=None,
    cap: Optional[int] = None,
    box_radius: float = 1.0,
    stop_below: Optional[float] = None,
) -> float:
    """Minimum of ``d^T Q d`` over the critical cone within a box.

    The cone is ``{d : A d = 0, (Qx + c)^T d = 0, d_j >= 0 on the zero
    support}``; free components are split into differences of nonnegative
    parts and every part is capped at ``box_radius``.  By homogeneity the
    sign of the result does not depend on the radius.
    """
    x = np.asarray(x, dtype=float)
    if grad is None:
        grad = inst.Q @ x + inst.c
    if P is None or Z is None:
        sets = index_sets(np.clip(x, 0.0, None), tol=1e-9)
        P = [j - 1 for j in sets.positive]
        Z = [j - 1 for j in sets.zero]
    n = inst.n
    nsplit = 2 * len(P) + len(Z)
    # expansion matrix: d = T z with z >= 0
    T = np.zeros((n, nsplit))
    for k, j in enumerate(P):
        T[j, k] = 1.0
        T[j, len(P) + k] = -1.0
    for k, j in enumerate(Z):
        T[j, 2 * len(P) + k] = 1.0
    M = np.vstack([inst.A @ T, (grad @ T).reshape(1, -1)])
    rhs = np.zeros(M.shape[0])
    Qz = T.T @ inst.Q @ T
    res = minimize_quad_over_polytope(
        Qz,
        np.zeros(nsplit),
        M,
        rhs,
        box=np.full(nsplit, float(box_radius)),
        cap=cap,
        stop_below=stop_below,
    )
    return float(res.value)
