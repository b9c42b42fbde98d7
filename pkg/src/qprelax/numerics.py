"""Dense symmetric linear algebra: eigendecomposition, nullspaces, projections.

Everything here operates on small dense matrices; the eigensolver is the
LAPACK symmetric driver behind ``numpy.linalg.eigh``, which meets the
accuracy contract at the target sizes (order below ~200).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DNN, PSD0, LiftedProblem
from .errors import DegenerateConstraints, DimensionMismatch, NonFinite

#: Cone selectors for matrix projections.
PSD = "PSD"
NONNEG = "NONNEG"
ROW0NONNEG = "ROW0NONNEG"
PROJECTION_CONES = (PSD, NONNEG, ROW0NONNEG)

#: Relative singular-value threshold deciding numerical rank.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition with ascending eigenvalues.

    Columns of ``vectors`` are orthonormal eigenvectors matching ``values``.
    """

    values: np.ndarray
    vectors: np.ndarray


def _check_symmetric(m, name="matrix") -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise NonFinite(f"{name} contains non-finite entries")
    return 0.5 * (m + m.T)


def sym_eigen(m) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix, values ascending."""
    m = _check_symmetric(m)
    values, vectors = np.linalg.eigh(m)
    return EigenDecomposition(values=values, vectors=vectors)


def nullspace_basis(a, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of null(a) as an ``n x r`` matrix.

    Rank is decided by singular values above ``tol`` times the largest one.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch("nullspace_basis expects a matrix")
    if not np.isfinite(a).all():
        raise NonFinite("matrix contains non-finite entries")
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    return vt[rank:].T.copy()


def project_cone(m, cone: str) -> np.ndarray:
    """Frobenius-nearest point of a symmetric matrix in the selected cone.

    PSD clips negative eigenvalues, NONNEG clips negative entries, and
    ROW0NONNEG clips negative entries of the 0th row and column only.
    """
    m = _check_symmetric(m)
    if cone == PSD:
        values, vectors = np.linalg.eigh(m)
        clipped = np.clip(values, 0.0, None)
        out = (vectors * clipped) @ vectors.T
        return 0.5 * (out + out.T)
    if cone == NONNEG:
        return np.clip(m, 0.0, None)
    if cone == ROW0NONNEG:
        out = m.copy()
        out[0, :] = np.clip(out[0, :], 0.0, None)
        out[:, 0] = out[0, :]
        return out
    raise ValueError(f"unknown projection cone {cone!r}")


class AffineProjector:
    """Orthogonal projector onto an affine slice of the symmetric matrices.

    The slice is ``{Y : <G_i, Y> = r_i for all i}`` with symmetric G_i.  The
    projection subtracts the least-norm combination of the G_i that restores
    the constraints; with a rank-deficient Gram matrix a pseudoinverse is
    used and the projector is flagged degenerate.
    """

    def __init__(self, constraints, rhs, order: int):
        self.order = order
        mats = [_check_symmetric(g, "constraint matrix") for g in constraints]
        if any(g.shape != (order, order) for g in mats):
            raise DimensionMismatch("constraint matrices must match the projector order")
        self.matrices = tuple(mats)
        self.rhs = np.asarray(rhs, dtype=float)
        self._basis = np.array([g.ravel() for g in mats])  # k x order^2
        self._rhs = self.rhs
        if self._rhs.shape != (len(mats),):
            raise DimensionMismatch("one right-hand side per constraint matrix is required")
        gram = self._basis @ self._basis.T
        k = gram.shape[0]
        rank = int(np.linalg.matrix_rank(gram, tol=RANK_TOL * max(1.0, float(np.abs(gram).max()))))
        self.degenerate = rank < k
        if self.degenerate:
            warnings.warn(
                "affine constraint system is numerically singular; "
                "using least-norm correction",
                DegenerateConstraints,
                stacklevel=2,
            )
        self._gram_pinv = np.linalg.pinv(gram, rcond=1e-12)

    def apply(self, m) -> np.ndarray:
        """Project a symmetric matrix onto the affine slice."""
        m = _check_symmetric(m)
        if m.shape != (self.order, self.order):
            raise DimensionMismatch(f"expected order {self.order}, got {m.shape}")
        violation = self._basis @ m.ravel() - self._rhs
        correction = self._gram_pinv @ violation
        out = m - (self._basis.T @ correction).reshape(self.order, self.order)
        return 0.5 * (out + out.T)

    def residual(self, m) -> float:
        """Infinity norm of the constraint violation at m."""
        m = np.asarray(m, dtype=float)
        return float(np.abs(self._basis @ m.ravel() - self._rhs).max())


class FaceProjector:
    """Projector onto an affine slice of the face ``{V S V^T}``.

    For a positive semidefinite Y the constraint ``<ahat, Y> = 0`` with
    positive semidefinite ``ahat`` is equivalent to range(Y) lying in
    null(ahat); restricting to that face removes the constraint that would
    otherwise destroy strict feasibility.  The projection of M is
    ``V P(V^T M V) V^T`` where P is the affine projection in the reduced
    space: for an orthonormal V this is the Frobenius-nearest point of the
    sliced face.
    """

    def __init__(self, basis: np.ndarray, reduced_constraints, reduced_rhs):
        self.basis = np.asarray(basis, dtype=float)
        self.order = self.basis.shape[0]
        self.rank = self.basis.shape[1]
        if self.rank == 0:
            # trivial face: the only member is the zero matrix
            self.reduced = None
            self.matrices = ()
            self.rhs = np.zeros(0)
            self.degenerate = False
            return
        self.reduced = AffineProjector(reduced_constraints, reduced_rhs, self.rank)
        self.matrices = self.reduced.matrices
        self.rhs = self.reduced.rhs
        self.degenerate = self.reduced.degenerate

    def compress(self, m) -> np.ndarray:
        return self.basis.T @ np.asarray(m, dtype=float) @ self.basis

    def lift(self, s) -> np.ndarray:
        out = self.basis @ np.asarray(s, dtype=float) @ self.basis.T
        return 0.5 * (out + out.T)

    def apply(self, m) -> np.ndarray:
        if self.reduced is None:
            return np.zeros((self.order, self.order))
        return self.lift(self.reduced.apply(self.compress(m)))

    def residual(self, m) -> float:
        if self.reduced is None:
            return 0.0
        return self.reduced.residual(self.compress(m))


def _constraint_face_basis(lp: LiftedProblem) -> np.ndarray:
    """Orthonormal basis of null(ahat), the face carrying all feasible Y."""
    # ahat = stack stack^T, so null(ahat) = null(stack^T)
    return nullspace_basis(lp.ahat)


def build_affine_projector(lp: LiftedProblem, pin=None) -> FaceProjector:
    """Face-restricted projector for the lifted relaxation constraints.

    Enforces range(Y) in null(ahat) (equivalent to ``<ahat, Y> = 0`` for
    positive semidefinite Y), ``Y[0,0] = 1``, and optionally a pinned 0th
    row.  Pinning the full 0th row of ``Y = V S V^T`` reduces to the
    independent system ``S v0 = V^T [1; x]`` over the face coordinates,
    which also implies the corner constraint.
    """
    k = lp.n + 1
    basis = _constraint_face_basis(lp)
    r = basis.shape[1]
    v0 = basis[0]
    mats = []
    rhs = []
    if pin is not None:
        pin = np.asarray(pin, dtype=float)
        if pin.shape != (lp.n,):
            raise DimensionMismatch(f"pin has shape {pin.shape}, expected {(lp.n,)}")
        if not np.isfinite(pin).all():
            raise NonFinite("pin contains non-finite entries")
        target = basis.T @ np.concatenate(([1.0], pin))
        for a in range(r):
            g = 0.5 * (np.outer(v0, np.eye(r)[a]) + np.outer(np.eye(r)[a], v0))
            mats.append(g)
            rhs.append(float(target[a]))
    else:
        mats.append(np.outer(v0, v0))
        rhs.append(1.0)
    return FaceProjector(basis, mats, rhs)


def certificate_projector(lp: LiftedProblem) -> FaceProjector:
    """Face-restricted projector for the recession-certificate constraints.

    A positive semidefinite certificate with zero corner entry has a zero
    0th row, so the carrying face is range(D) in null(ahat) intersected
    with the complement of the 0th coordinate; the only remaining
    constraint is the trace normalization making candidates comparable.
    """
    k = lp.n + 1
    e0 = np.zeros((1, k))
    e0[0, 0] = 1.0
    basis = nullspace_basis(np.vstack([lp.ahat, e0]))
    r = basis.shape[1]
    return FaceProjector(basis, [np.eye(r)], [1.0])


def cone_projection_for(cone: str):
    """The pair of factor projections whose intersection is the cone."""
    if cone == DNN:
        return (lambda m: project_cone(m, PSD), lambda m: project_cone(m, NONNEG))
    if cone == PSD0:
        return (lambda m: project_cone(m, PSD), lambda m: project_cone(m, ROW0NONNEG))
    raise ValueError(f"unknown cone selector {cone!r}")


def cone_violation(m, cone: str) -> float:
    """Worst violation of cone membership, in absolute terms."""
    m = _check_symmetric(m)
    psd = max(0.0, -float(np.linalg.eigvalsh(m).min()))
    if cone == DNN:
        sign = max(0.0, -float(m.min()))
    elif cone == PSD0:
        sign = max(0.0, -float(m[0].min()))
    else:
        raise ValueError(f"unknown cone selector {cone!r}")
    return max(psd, sign)
