"""Operator-splitting solver for the lifted conic relaxations.

The lifted problems minimize a linear objective over the intersection of an
affine slice with a matrix cone.  They are solved in consensus form: one
copy of the matrix variable per cone factor (the PSD cone plus an entrywise
sign cone) and one copy for the affine slice, coupled through averaging
with scaled dual variables, over-relaxation, and an adaptive penalty.

Plain splitting has a sublinear tail when the cone touches the affine slice
tangentially (exactly the structurally exact instances), so the loop
periodically attempts an active-face polish: predict the optimal face from
the iterate's eigenstructure and zero pattern, solve the reduced linear
system, and accept only when the polished point is feasible and a fitted
dual certificate closes the duality gap.

Unboundedness is decided by a certificate pre-pass rather than by watching
the objective diverge: a nonzero cone matrix with zero corner, zero
constraint value, and negative objective rate is an independently checkable
proof that the relaxation value is minus infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import (
    CONES,
    DNN,
    FEAS_TOL,
    LiftedPoint,
    LiftedProblem,
    QpInstance,
    ValidationReport,
    feasibility_residual,
    lift_instance,
    validate_lifted_point,
)
from .errors import PointInfeasible
from .numerics import (
    AffineProjector,
    build_affine_projector,
    certificate_projector,
    cone_projection_for,
    cone_violation,
    nullspace_basis,
)
from .oracle import basic_feasible_points, enumerate_vertices

OPTIMAL = "OPTIMAL"
UNBOUNDED = "UNBOUNDED"
INFEASIBLE = "INFEASIBLE"
MAX_ITER = "MAX_ITER"

OBJECTIVE = "OBJECTIVE"
FEASIBILITY = "FEASIBILITY"

FOUND = "FOUND"
NONE = "NONE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class SolveOptions:
    """Tuning knobs of the splitting solver.

    The stall parameters drive the heuristic infeasibility detector of the
    certificate searches: a search gives up when the best scaled residual
    fails to improve by ``stall_factor`` over ``stall_windows`` consecutive
    windows of ``stall_window`` iterations.  Polishing attempts an exact
    active-face solve every ``polish_interval`` iterations and accepts only
    gap-certified candidates.
    """

    max_iterations: int = 200_000
    tol_primal: float = 1e-7
    tol_dual: float = 1e-7
    penalty: float = 1.0
    unbounded_threshold: float = -1e12
    over_relaxation: float = 1.6
    tol_certificate: float = 1e-6
    stall_window: int = 5000
    stall_factor: float = 0.9
    stall_windows: int = 3
    adapt_interval: int = 50
    polish: bool = True
    polish_interval: int = 500
    polish_gap_tol: float = 1e-7

    def __post_init__(self):
        if min(self.max_iterations, self.tol_primal, self.tol_dual, self.penalty) <= 0:
            raise ValueError("iteration and tolerance options must be positive")
        if self.unbounded_threshold >= 0:
            raise ValueError("unbounded_threshold must be negative")
        if not 0 < self.over_relaxation < 2:
            raise ValueError("over_relaxation must lie in (0, 2)")


@dataclass(frozen=True)
class RecessionCertificate:
    """A direction proving the lifted feasible set unbounded.

    ``d`` is trace-normalized, lies in the requested cone, has zero corner
    entry and zero constraint value; a negative ``objective_rate`` proves
    the relaxation value is minus infinity.
    """

    d: np.ndarray
    objective_rate: float
    trace_norm: float
    cone: str


@dataclass(frozen=True)
class CertificateCheck:
    """Independent re-verification of a certificate from raw instance data."""

    ok: bool
    cone_violation: float
    corner: float
    affine_residual: float
    trace_error: float
    objective_rate: float
    tolerance: float


@dataclass(frozen=True)
class CertificateSearch:
    """Outcome of a recession-certificate search.

    ``status`` is FOUND, NONE (no certificate: converged above the rate
    threshold, or residual stall on an empty certificate set), or
    INCONCLUSIVE (no verdict within the iteration budget).
    """

    status: str
    certificate: Optional[RecessionCertificate]
    iterations: int
    residual: float
    reason: str = ""


@dataclass(frozen=True)
class RelaxationResult:
    """Result of a lifted relaxation solve.

    ``value`` uses +inf / -inf sentinels for INFEASIBLE and UNBOUNDED; an
    OPTIMAL result carries the lifted point and its validation report, an
    UNBOUNDED result carries the verified certificate.
    """

    status: str
    value: float
    point: Optional[LiftedPoint]
    residual_primal: float
    residual_dual: float
    iterations: int
    certificate: Optional[RecessionCertificate] = None
    validation: Optional[ValidationReport] = None
    polished: bool = False


# ---------------------------------------------------------------------------
# active-face polishing


def _pack_design(m: np.ndarray) -> np.ndarray:
    """Row of the reduced system for <m, S> with S in packed symmetric form."""
    r = m.shape[0]
    diag = np.diag(m)
    off = 2.0 * m[np.triu_indices(r, k=1)]
    return np.concatenate([diag, off])


def _unpack_sym(v: np.ndarray, r: int) -> np.ndarray:
    s = np.zeros((r, r))
    s[np.diag_indices(r)] = v[:r]
    iu = np.triu_indices(r, k=1)
    s[iu] = v[r:]
    s[(iu[1], iu[0])] = v[r:]
    return s


class _Polisher:
    """Predict the optimal face and solve it exactly with a gap certificate.

    Works in the reduced coordinates of the constraint face, where strict
    feasibility is restored and the dual of the reduced problem is
    attained, so a fitted dual slack can actually close the gap.
    """

    def __init__(self, lp: LiftedProblem, projector, cone: str):
        self.lp = lp
        self.cone = cone
        self.basis = projector.basis  # k x r0, orthonormal
        self.mats = projector.matrices  # reduced constraint matrices
        self.rhs = np.asarray(projector.rhs, dtype=float)
        self.k = lp.n + 1
        self.qred = self.basis.T @ lp.qhat @ self.basis
        self.qscale = max(1.0, float(np.abs(self.qred).max()))
        # a PSD constraint matrix with zero right-hand side forces the
        # optimal range out of its own range; deflate predicted faces by it
        deflate = []
        for g, b in zip(self.mats, self.rhs):
            if b == 0.0:
                w, vv = np.linalg.eigh(g)
                gmax = float(np.abs(w).max(initial=0.0))
                if gmax > 0 and w[0] >= -1e-12 * gmax:
                    deflate.append(vv[:, w > 1e-12 * gmax])
        if deflate:
            stack = np.hstack(deflate)
            qmat, _ = np.linalg.qr(stack)
            self._deflate = qmat
        else:
            self._deflate = None

    def _refine_face(self, U: np.ndarray) -> Optional[np.ndarray]:
        if self._deflate is None:
            return U
        proj = U - self._deflate @ (self._deflate.T @ U)
        qmat, rmat = np.linalg.qr(proj)
        keep = np.abs(np.diag(rmat)) > 1e-8
        if not keep.any():
            return None
        return qmat[:, keep]

    def attempt(self, z: np.ndarray, gap_tol: float) -> Optional[dict]:
        s_it = self.basis.T @ (0.5 * (z + z.T)) @ self.basis
        s_it = 0.5 * (s_it + s_it.T)
        vals, vecs = np.linalg.eigh(s_it)
        vmax = float(vals.max(initial=0.0))
        if vmax <= 0:
            return None
        y_it = self.basis @ s_it @ self.basis.T
        r0 = vals.size
        # likely ranks first (eigenvalue gaps), then the full sweep
        candidates = [int(np.sum(vals > tau * vmax)) for tau in (1e-4, 1e-6, 1e-2)]
        candidates += list(range(1, r0 + 1))
        for rank in dict.fromkeys(candidates):
            if rank <= 0:
                continue
            U = self._refine_face(vecs[:, r0 - rank :])
            if U is None:
                continue
            Ucomp = nullspace_basis(U.T)
            for zeta in (1e-5, 1e-3, 3e-2):
                out = self._attempt_face(y_it, U, Ucomp, zeta, gap_tol)
                if out is not None:
                    return out
        return None

    def _zero_pairs(self, y: np.ndarray, zeta: float, scale: float):
        k = self.k
        if self.cone == DNN:
            return [
                (i, j)
                for i in range(k)
                for j in range(i, k)
                if abs(y[i, j]) <= zeta * scale
            ]
        return [(0, j) for j in range(k) if abs(y[0, j]) <= zeta * scale]

    def _entry_reduced(self, i: int, j: int) -> np.ndarray:
        """Reduced matrix representing the full-space entry functional Y_ij."""
        vi = self.basis[i]
        vj = self.basis[j]
        g = 0.5 * (np.outer(vi, vj) + np.outer(vj, vi))
        return g

    def _attempt_face(self, y_it, U, Ucomp, zeta, gap_tol) -> Optional[dict]:
        scale = max(1.0, float(np.abs(y_it).max()))
        zero_pairs = self._zero_pairs(y_it, zeta, scale)

        rows = [_pack_design(U.T @ g @ U) for g in self.mats]
        rhs = list(self.rhs)
        zero_red = []
        for i, j in zero_pairs:
            g = self._entry_reduced(i, j)
            zero_red.append(g)
            rows.append(_pack_design(U.T @ g @ U))
            rhs.append(0.0)
        sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        rank = U.shape[1]
        T = _unpack_sym(sol, rank)
        w, tvecs = np.linalg.eigh(T)
        wmax = max(1.0, float(np.abs(w).max(initial=0.0)))
        if w[0] < -1e-8 * wmax:
            return None
        T = (tvecs * np.clip(w, 0.0, None)) @ tvecs.T
        s_pol = U @ T @ U.T
        y_pol = self.basis @ s_pol @ self.basis.T
        y_pol = 0.5 * (y_pol + y_pol.T)

        yscale = max(1.0, float(np.abs(y_pol).max()))
        afeas = max(
            abs(float(np.tensordot(g, s_pol)) - b) for g, b in zip(self.mats, self.rhs)
        )
        if afeas > 1e-9 * yscale:
            return None
        if self.cone == DNN:
            entry_viol = max(0.0, -float(y_pol.min()))
        else:
            entry_viol = max(0.0, -float(y_pol[0].min()))
        if entry_viol > 1e-9 * yscale:
            return None
        value = float(np.tensordot(self.qred, s_pol))

        # complementarity support for the dual: exact zeros of the polished
        # point, not of the unconverged iterate
        dual_red = [
            self._entry_reduced(i, j)
            for i, j in self._zero_pairs(y_pol, 1e-9, yscale)
        ]
        gap, dres = self._dual_fit(U, Ucomp, dual_red, value)
        if gap is None:
            return None
        if abs(gap) > gap_tol * max(1.0, abs(value)) or dres > 1e-7 * self.qscale:
            return None
        return {
            "value": value,
            "y": y_pol,
            "primal_residual": max(afeas, entry_viol),
            "dual_residual": dres,
            "gap": gap,
        }

    def _dual_fit(self, U, Ucomp, zero_red, value):
        """Fit multipliers and a dual slack supported on the predicted face
        complement; returns (duality gap, dual residual)."""
        q = Ucomp.shape[1]
        cols = [g.ravel() for g in self.mats]
        for a in range(q):
            for bidx in range(a, q):
                gb = np.outer(Ucomp[:, a], Ucomp[:, bidx])
                gb = gb + gb.T if a != bidx else gb
                cols.append(gb.ravel())
        for g in zero_red:
            cols.append(g.ravel())
        design = np.array(cols).T
        sol, *_ = np.linalg.lstsq(design, self.qred.ravel(), rcond=None)

        p = len(self.mats)
        nu = sol[:p]
        nt = q * (q + 1) // 2
        tvals = sol[p : p + nt]
        rvals = sol[p + nt :]

        if nt:
            T = np.zeros((q, q))
            idx = 0
            for a in range(q):
                for bidx in range(a, q):
                    T[a, bidx] = tvals[idx]
                    T[bidx, a] = tvals[idx]
                    idx += 1
            tw, tU = np.linalg.eigh(T)
            if tw.min(initial=0.0) < -1e-6 * max(1.0, float(np.abs(tw).max(initial=0.0))):
                return None, math.inf
            Tpsd = (tU * np.clip(tw, 0.0, None)) @ tU.T
            slack = Ucomp @ Tpsd @ Ucomp.T
        else:
            slack = np.zeros_like(self.qred)
        if rvals.size and float(rvals.min()) < -1e-6 * max(1.0, float(np.abs(rvals).max())):
            return None, math.inf
        rclip = np.clip(rvals, 0.0, None)
        for g, rv in zip(zero_red, rclip):
            slack = slack + rv * g
        lhs = slack
        for nu_i, g in zip(nu, self.mats):
            lhs = lhs + nu_i * g
        dres = float(np.abs(lhs - self.qred).max())
        dual_value = float(nu @ self.rhs)
        return value - dual_value, dres


# ---------------------------------------------------------------------------
# consensus loop


@dataclass
class _LoopOutcome:
    status: str  # CONVERGED, POLISHED, MAX_ITER, STALLED, DIVERGING
    Z: np.ndarray
    U: list
    iterations: int
    residual_primal: float
    residual_dual: float
    polish: Optional[dict] = None


def _consensus(
    qhat,
    projector: AffineProjector,
    factors,
    opts: SolveOptions,
    stall: bool = False,
    polisher: Optional[_Polisher] = None,
    warm=None,
) -> _LoopOutcome:
    """Consensus splitting over the affine slice and the cone factors."""
    k = qhat.shape[0]
    blocks = [projector.apply] + list(factors)
    nb = len(blocks)
    if warm is not None:
        Z = warm[0].copy()
        U = [u.copy() for u in warm[1]]
    else:
        Z = projector.apply(np.zeros((k, k)))
        U = [np.zeros((k, k)) for _ in range(nb)]
    rho = opts.penalty
    alpha = opts.over_relaxation
    qscale = max(1.0, float(np.linalg.norm(qhat)))
    step = qhat / nb

    best_res = math.inf
    window_min = math.inf
    bad_windows = 0
    r = s = math.inf
    status = MAX_ITER
    polish_hit = None
    it = 0

    for it in range(1, opts.max_iterations + 1):
        Zold = Z
        Ys = [blocks[i](Z - U[i]) for i in range(nb)]
        acc = np.zeros((k, k))
        for i in range(nb):
            Yr = alpha * Ys[i] + (1.0 - alpha) * Zold
            acc += Yr + U[i]
            U[i] = U[i] + Yr  # completed after the Z update
        Z = acc / nb - step / rho
        for i in range(nb):
            U[i] -= Z

        r = math.sqrt(sum(float(np.linalg.norm(Y - Z)) ** 2 for Y in Ys))
        s = rho * math.sqrt(nb) * float(np.linalg.norm(Z - Zold))
        zscale = max(1.0, float(np.linalg.norm(Z)))
        r_rel = r / zscale
        s_rel = s / qscale
        if r_rel <= opts.tol_primal and s_rel <= opts.tol_dual:
            status = "CONVERGED"
            break
        if float(np.tensordot(qhat, Z)) < opts.unbounded_threshold * qscale:
            status = "DIVERGING"
            break
        if polisher is not None and opts.polish and it % opts.polish_interval == 0:
            polish_hit = polisher.attempt(Z, opts.polish_gap_tol)
            if polish_hit is not None:
                status = "POLISHED"
                break
        if stall:
            window_min = min(window_min, r_rel)
            if it % opts.stall_window == 0:
                if window_min > opts.stall_factor * best_res:
                    bad_windows += 1
                    if bad_windows >= opts.stall_windows:
                        status = "STALLED"
                        break
                else:
                    bad_windows = 0
                best_res = min(best_res, window_min)
                window_min = math.inf
        if it % opts.adapt_interval == 0:
            if r_rel > 10.0 * s_rel:
                rho = min(rho * 2.0, 1e9)
                U = [u * 0.5 for u in U]
            elif s_rel > 10.0 * r_rel:
                rho = max(rho * 0.5, 1e-9)
                U = [u * 2.0 for u in U]

    return _LoopOutcome(
        status=status,
        Z=Z,
        U=U,
        iterations=it,
        residual_primal=r,
        residual_dual=s,
        polish=polish_hit,
    )


# ---------------------------------------------------------------------------
# certificates


def verify_certificate(
    inst: QpInstance, cert: RecessionCertificate, tol: float = 1e-6
) -> CertificateCheck:
    """Re-check a certificate against raw instance data.

    Verifies cone membership, zero corner, zero constraint value, unit
    trace, and recomputes the objective rate.
    """
    lp = lift_instance(inst, cert.cone)
    d = np.asarray(cert.d, dtype=float)
    viol = cone_violation(d, cert.cone)
    corner = abs(float(d[0, 0]))
    affine = abs(float(np.tensordot(lp.ahat, d))) / max(1.0, float(np.abs(lp.ahat).max()))
    trace_err = abs(float(np.trace(d)) - 1.0)
    rate = float(np.tensordot(lp.qhat, d))
    ok = viol <= tol and corner <= tol and affine <= tol and trace_err <= tol
    return CertificateCheck(
        ok=bool(ok),
        cone_violation=viol,
        corner=corner,
        affine_residual=affine,
        trace_error=trace_err,
        objective_rate=rate,
        tolerance=tol,
    )


def certificate_feasible_set_nonempty(inst: QpInstance, cone: str) -> bool:
    """Exact screen for existence of any certificate candidate.

    For the doubly nonnegative cone the certificate block has nonnegative
    entries and columns in null(A); its row sums then form a nonzero
    recession direction of the original polyhedron, and conversely any such
    direction yields a candidate.  For the PSD-with-nonnegative-border cone
    only a nonzero null space of A is needed.
    """
    if cone == DNN:
        n = inst.n
        aug = np.vstack([inst.A, np.ones((1, n))])
        rhs = np.concatenate([np.zeros(inst.m), [1.0]])
        return bool(basic_feasible_points(aug, rhs))
    return nullspace_basis(inst.A).shape[1] > 0


def recession_certificate_search(
    inst: QpInstance,
    cone: str = DNN,
    mode: str = OBJECTIVE,
    opts: Optional[SolveOptions] = None,
) -> CertificateSearch:
    """Search the recession cone of the lifted feasible set.

    OBJECTIVE mode minimizes the objective rate over trace-normalized
    candidates and reports FOUND only below ``-tol_certificate``.
    FEASIBILITY mode looks for any candidate at all; NONE after a residual
    stall is the heuristic verdict that no candidate exists.
    """
    if cone not in CONES:
        raise ValueError(f"unknown cone selector {cone!r}")
    if mode not in (OBJECTIVE, FEASIBILITY):
        raise ValueError(f"unknown search mode {mode!r}")
    opts = opts or SolveOptions()
    lp = lift_instance(inst, cone)
    projector = certificate_projector(lp)
    if projector.rank == 0:
        return CertificateSearch(NONE, None, 0, 0.0, reason="certificate face is trivial")
    k = lp.n + 1
    qhat = lp.qhat if mode == OBJECTIVE else np.zeros((k, k))
    polisher = _Polisher(lp, projector, cone) if mode == OBJECTIVE else None
    out = _consensus(qhat, projector, cone_projection_for(cone), opts, stall=True,
                     polisher=polisher)

    if out.status == "STALLED":
        return CertificateSearch(NONE, None, out.iterations, out.residual_primal,
                                 reason="residual stall")
    if out.status in ("MAX_ITER", "DIVERGING"):
        return CertificateSearch(INCONCLUSIVE, None, out.iterations, out.residual_primal,
                                 reason=out.status.lower())

    if out.status == "POLISHED":
        d = 0.5 * (out.polish["y"] + out.polish["y"].T)
    else:
        d = projector.apply(out.Z)
    rate = float(np.tensordot(lp.qhat, d))
    cert = RecessionCertificate(d=d, objective_rate=rate, trace_norm=float(np.trace(d)),
                                cone=cone)
    check = verify_certificate(inst, cert, tol=max(10.0 * opts.tol_primal, 1e-9))
    if not check.ok:
        return CertificateSearch(INCONCLUSIVE, None, out.iterations, out.residual_primal,
                                 reason="converged point failed verification")
    if mode == OBJECTIVE and rate >= -opts.tol_certificate:
        return CertificateSearch(NONE, None, out.iterations, out.residual_primal,
                                 reason=f"optimal rate {rate:.3e} above threshold")
    return CertificateSearch(FOUND, cert, out.iterations, out.residual_primal)


# ---------------------------------------------------------------------------
# relaxation solves


def _finish(lp: LiftedProblem, inst: QpInstance, projector: AffineProjector,
            out: _LoopOutcome, opts: SolveOptions) -> RelaxationResult:
    if out.status == "POLISHED":
        point = LiftedPoint(out.polish["y"])
        report = validate_lifted_point(inst, point, tol=10.0 * opts.tol_primal, cone=lp.cone)
        return RelaxationResult(
            status=OPTIMAL if report.ok else MAX_ITER,
            value=out.polish["value"],
            point=point,
            residual_primal=out.polish["primal_residual"],
            residual_dual=out.polish["dual_residual"],
            iterations=out.iterations,
            validation=report,
            polished=True,
        )
    y = projector.apply(out.Z)
    point = LiftedPoint(y)
    value = float(np.tensordot(lp.qhat, point.y))
    if out.status == "CONVERGED":
        report = validate_lifted_point(inst, point, tol=10.0 * opts.tol_primal, cone=lp.cone)
        status = OPTIMAL if report.ok else MAX_ITER
        return RelaxationResult(
            status=status, value=value, point=point,
            residual_primal=out.residual_primal, residual_dual=out.residual_dual,
            iterations=out.iterations, validation=report,
        )
    return RelaxationResult(
        status=MAX_ITER, value=value, point=point,
        residual_primal=out.residual_primal, residual_dual=out.residual_dual,
        iterations=out.iterations,
    )


def _unbounded_result(search: CertificateSearch) -> RelaxationResult:
    return RelaxationResult(
        status=UNBOUNDED, value=-math.inf, point=None,
        residual_primal=search.residual, residual_dual=0.0,
        iterations=search.iterations, certificate=search.certificate,
    )


def solve_relaxation(
    inst: QpInstance, cone: str = DNN, opts: Optional[SolveOptions] = None
) -> RelaxationResult:
    """Solve the lifted relaxation over the selected cone.

    Pipeline: decide feasibility exactly from the original polyhedron
    (feasibility is preserved by the lifting, so an empty polyhedron means
    an infeasible relaxation and no iterations are spent); search for a
    negative-rate recession certificate; otherwise run the consensus
    splitting to optimality.
    """
    opts = opts or SolveOptions()
    lp = lift_instance(inst, cone)
    if not enumerate_vertices(inst):
        return RelaxationResult(INFEASIBLE, math.inf, None, 0.0, 0.0, 0)

    if certificate_feasible_set_nonempty(inst, cone):
        search = recession_certificate_search(inst, cone, OBJECTIVE, opts)
        if search.status == FOUND:
            return _unbounded_result(search)

    projector = build_affine_projector(lp)
    polisher = _Polisher(lp, projector, cone)
    out = _consensus(lp.qhat, projector, cone_projection_for(cone), opts, polisher=polisher)
    if out.status == "DIVERGING":
        # backstop: divergence without a certificate from the pre-pass;
        # retry the search with a larger budget before giving up
        if certificate_feasible_set_nonempty(inst, cone):
            retry_opts = replace(opts, max_iterations=2 * opts.max_iterations)
            search = recession_certificate_search(inst, cone, OBJECTIVE, retry_opts)
            if search.status == FOUND:
                return _unbounded_result(search)
    return _finish(lp, inst, projector, out, opts)


def _pinned_solve(inst: QpInstance, cone: str, x, opts: SolveOptions, warm=None,
                  skip_certificate_prepass: bool = False):
    """Pinned relaxation solve; returns the result and reusable warm state."""
    x = np.asarray(x, dtype=float)
    resid = feasibility_residual(inst, x)
    if resid > max(FEAS_TOL, 10.0 * opts.tol_primal):
        raise PointInfeasible(f"anchor point violates the constraints (residual {resid:.3e})")
    lp = lift_instance(inst, cone)
    if not skip_certificate_prepass and certificate_feasible_set_nonempty(inst, cone):
        search = recession_certificate_search(inst, cone, OBJECTIVE, opts)
        if search.status == FOUND:
            return _unbounded_result(search), None
    projector = build_affine_projector(lp, pin=x)
    polisher = _Polisher(lp, projector, cone)
    out = _consensus(lp.qhat, projector, cone_projection_for(cone), opts,
                     polisher=polisher, warm=warm)
    result = _finish(lp, inst, projector, out, opts)
    return result, (out.Z, out.U)


def evaluate_underestimator(
    inst: QpInstance, cone: str, x, opts: Optional[SolveOptions] = None
) -> RelaxationResult:
    """Value of the induced convex underestimator at a feasible point.

    Solves the relaxation with the 0th row pinned to the point.  The same
    certificate pre-pass applies: pinning does not change the recession
    cone of the lifted feasible set, so one negative-rate certificate
    proves the underestimator is minus infinity everywhere.
    """
    opts = opts or SolveOptions()
    result, _ = _pinned_solve(inst, cone, x, opts)
    return result
