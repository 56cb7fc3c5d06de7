"""Dense complex linear algebra used by every construction.

A "CMatrix" here is simply a two-dimensional ``complex128`` numpy array
with finite entries; :func:`as_cmatrix` is the single gate that enforces it.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateInputError, InputError, SingularityError, StructureError

EPS = np.finfo(float).eps


def as_cmatrix(A, shape=None, name="matrix"):
    """Return `A` as a finite 2-D complex array (a copy)."""
    M = np.array(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got ndim={M.ndim}")
    if shape is not None and M.shape != tuple(shape):
        raise InputError(f"{name} has shape {M.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(M)):
        raise InputError(f"{name} has non-finite entries")
    return M


def frozen(M):
    M.flags.writeable = False
    return M


def opnorm(A):
    """Spectral norm; zero for empty matrices."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


@dataclass(frozen=True)
class RankTolerance:
    """How a numerical rank decision is thresholded.

    In ``relative`` mode the threshold is ``value * max(rows, cols) * eps * sigma_1``,
    so the default ``RankTolerance()`` is the usual numpy-style rank test.
    In ``absolute`` mode the threshold is ``value`` itself.
    """

    mode: str = "relative"
    value: float = 1.0

    def __post_init__(self):
        if self.mode not in ("relative", "absolute"):
            raise InputError(f"unknown tolerance mode {self.mode!r}")
        if not (self.value >= 0 and np.isfinite(self.value)):
            raise InputError("tolerance value must be a finite nonnegative number")

    def threshold(self, sigma_max, shape):
        if self.mode == "absolute":
            return float(self.value)
        return float(self.value) * max(shape) * EPS * float(sigma_max)


DEFAULT_TOL = RankTolerance()


def resolve_tol(tol):
    if tol is None:
        return DEFAULT_TOL
    if isinstance(tol, RankTolerance):
        return tol
    return RankTolerance("relative", float(tol))


def svd(A):
    """Full SVD ``A = U @ diag(S) @ V^*`` with U, V unitary and S nonincreasing."""
    A = as_cmatrix(A)
    if A.size == 0:
        raise InputError("svd of an empty matrix")
    U, S, Vh = scipy.linalg.svd(A, full_matrices=True, lapack_driver="gesvd")
    return U, S, Vh.conj().T


def singular_values(A):
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(A)


def rank_of(A, tol=None):
    A = as_cmatrix(A)
    if A.size == 0:
        return 0
    s = singular_values(A)
    thr = resolve_tol(tol).threshold(s[0], A.shape)
    return int(np.sum(s > thr))


def hermitian_eigendecomp(A, rtol=1e-12):
    """Eigendecomposition ``A = Q diag(lambdas) Q^*`` of a Hermitian matrix.

    Eigenvalues come back in ascending order.  Raises StructureError when
    ``||A - A^*|| > rtol * ||A||``.
    """
    A = as_cmatrix(A)
    if A.shape[0] != A.shape[1]:
        raise StructureError(f"Hermitian eigendecomposition needs a square matrix, got {A.shape}")
    nrm = opnorm(A)
    defect = opnorm(A - A.conj().T)
    if defect > rtol * nrm:
        raise StructureError(f"matrix is not Hermitian (defect {defect:.3e})", defect=defect)
    lambdas, Q = scipy.linalg.eigh((A + A.conj().T) / 2)
    return Q, lambdas


def lin_solve(A, B):
    """Solve ``A X = B``; SingularityError when A is numerically singular."""
    A = as_cmatrix(A, name="A")
    B = as_cmatrix(B, name="B")
    if A.shape[0] != A.shape[1]:
        raise InputError(f"lin_solve needs square A, got {A.shape}")
    if A.shape[0] != B.shape[0]:
        raise InputError(f"incompatible shapes {A.shape} and {B.shape}")
    if A.shape[0] == 0:
        return np.zeros((0, B.shape[1]), dtype=complex)
    s = singular_values(A)
    if s[-1] <= A.shape[0] * EPS * s[0] or s[0] == 0.0:
        raise SingularityError(
            f"matrix is numerically singular (sigma_min={s[-1]:.3e})", smallest_singular_value=float(s[-1])
        )
    return scipy.linalg.solve(A, B)


def trim_poly(coeffs, rtol=1e-12):
    """Drop trailing (highest-degree) coefficients below ``rtol * max|c|``."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0 or not np.any(c):
        raise DegenerateInputError("zero polynomial has no well-defined roots")
    if not np.all(np.isfinite(c)):
        raise InputError("polynomial coefficients must be finite")
    cut = rtol * np.max(np.abs(c))
    last = np.nonzero(np.abs(c) > cut)[0][-1]
    return c[: last + 1]


def poly_roots(coeffs):
    """Roots of ``c0 + c1 z + ... + cd z^d`` (ascending coefficient order)."""
    c = trim_poly(coeffs)
    if c.size == 1:
        return np.zeros(0, dtype=complex)
    # companion-matrix eigenvalues
    return np.roots(c[::-1]).astype(complex)
