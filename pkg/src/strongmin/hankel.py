"""Block Hankel matrices and the unitary rank compressions built on them."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InputError, StructureError
from .numkernel import opnorm, rank_of, resolve_tol, svd
from .polyrat import Structure, as_structure

ZEROS_FIRST = "zeros_first"
CORE_FIRST = "core_first"


@dataclass(frozen=True, eq=False)
class CompressionResult:
    """Unitary U, V with ``U^* M V`` block diagonal: a zero block and an r x r core.

    ``U_sel``/``V_sel`` are the column blocks spanning the core (the trailing
    r columns for ``zeros_first``, the leading r columns for ``core_first``).
    """

    U: np.ndarray
    V: np.ndarray
    rank: int
    core: np.ndarray
    layout: str
    threshold: float
    singular_values: np.ndarray
    warnings: tuple = ()

    @property
    def U_sel(self):
        return self._select(self.U)

    @property
    def V_sel(self):
        return self._select(self.V)

    def _select(self, W):
        r = self.rank
        if self.layout == ZEROS_FIRST:
            return W[:, W.shape[1] - r:]
        return W[:, :r]

    @property
    def core_margin(self):
        """Smallest kept singular value over the threshold (inf for rank 0)."""
        if self.rank == 0:
            return np.inf
        return float(self.singular_values[self.rank - 1]) / max(self.threshold, np.finfo(float).tiny)

    @property
    def gap_margin(self):
        """Threshold over the largest discarded singular value (inf if none)."""
        rest = self.singular_values[self.rank:]
        if rest.size == 0 or rest[0] == 0:
            return np.inf
        return self.threshold / float(rest[0])

    def diagnostics(self):
        return {
            "rank": self.rank,
            "layout": self.layout,
            "threshold": self.threshold,
            "core_margin": self.core_margin,
            "gap_margin": self.gap_margin,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class ScalingS:
    """Block diagonal sign matrix ``diag(s_0 I_m, ..., s_{N-1} I_m)``."""

    block_size: int
    signs: tuple

    @property
    def blocks(self):
        return len(self.signs)

    def matrix(self):
        return np.kron(np.diag(np.array(self.signs, dtype=float)), np.eye(self.block_size)).astype(complex)


def build_S_poly(d, m):
    """Signs ``(-1)^{d-1}, ..., (-1)^2, -1`` for the polynomial Hankel matrix."""
    if d < 2:
        raise DegenerateInputError("the polynomial scaling matrix needs degree >= 2")
    return ScalingS(m, tuple((-1) ** (d - 1 - i) for i in range(d - 1)))


def build_S_rat(k, m):
    """Signs ``-1, +1, -1, ...`` (k blocks) for the Laurent Hankel matrices."""
    if k < 1:
        raise DegenerateInputError("the rational scaling matrix needs k >= 1")
    return ScalingS(m, tuple((-1) ** (i + 1) for i in range(k)))


def build_T(P):
    """(d-1) x (d-1) block Hankel matrix with P_d on the anti-diagonal and last row (P_d, ..., P_2)."""
    d = P.degree
    if d < 2:
        raise DegenerateInputError(f"T needs degree >= 2, got {d}")
    m, n = P.shape
    T = np.zeros(((d - 1) * m, (d - 1) * n), dtype=complex)
    for i in range(d - 1):
        for j in range(d - 1):
            k = i + j - (d - 2)
            if k >= 0:
                T[i * m:(i + 1) * m, j * n:(j + 1) * n] = P.coeffs[d - k]
    return T


def _hankel(Rsp, k, shift):
    m, n = Rsp.shape
    H = np.empty((k * m, k * n), dtype=complex)
    for i in range(k):
        for j in range(k):
            H[i * m:(i + 1) * m, j * n:(j + 1) * n] = Rsp.block(i + j + 1 + shift)
    return H


def build_H_pair(Rsp, k=None):
    """Hankel matrix over R_{-1}..R_{-(2k-1)} and its shift over R_{-2}..R_{-2k}."""
    if Rsp.depth % 2:
        raise InputError("Laurent tail depth must be even")
    k = Rsp.depth // 2 if k is None else int(k)
    if k < 1 or 2 * k > Rsp.depth:
        raise InputError(f"k={k} needs {2 * k} Laurent blocks, tail has {Rsp.depth}")
    return _hankel(Rsp, k, 0), _hankel(Rsp, k, 1)


def _warnings(s, thr):
    near = s[(s > thr / 10) & (s < thr * 10)]
    if near.size:
        return (f"{near.size} singular value(s) within a factor 10 of the rank threshold {thr:.3e}",)
    return ()


def compress_unstructured(M, layout=ZEROS_FIRST, tol=None):
    """SVD-based compression of M to a zero block and an invertible core."""
    if layout not in (ZEROS_FIRST, CORE_FIRST):
        raise InputError(f"unknown layout {layout!r}")
    M = np.asarray(M, dtype=complex)
    U, S, V = svd(M)
    thr = resolve_tol(tol).threshold(S[0] if S.size else 0.0, M.shape)
    r = int(np.sum(S > thr))
    if layout == ZEROS_FIRST:
        U = np.hstack([U[:, r:], U[:, :r]])
        V = np.hstack([V[:, r:], V[:, :r]])
        Us, Vs = U[:, U.shape[1] - r:], V[:, V.shape[1] - r:]
    else:
        Us, Vs = U[:, :r], V[:, :r]
    core = Us.conj().T @ M @ Vs
    return CompressionResult(U, V, r, core, layout, thr, S, _warnings(S, thr))


def compress_structured(M, tag, S=None, layout=ZEROS_FIRST, tol=None, *, skew=None, rtol=1e-12):
    """Compression with U = V (Hermitian/skew tags) or U = S V (para tags).

    The right factor V diagonalizes the Hermitian representative of M, which
    is one of M, iM, SM, iSM.  ``skew`` says whether M (or SM) is
    skew-Hermitian; by default it follows the polynomial sign table
    (skew for the skew-Hermitian and para-skew-Hermitian tags).
    """
    tag = as_structure(tag)
    if tag is Structure.NONE:
        raise StructureError("compress_structured needs a structure tag")
    if layout not in (ZEROS_FIRST, CORE_FIRST):
        raise InputError(f"unknown layout {layout!r}")
    M = np.asarray(M, dtype=complex)
    if M.shape[0] != M.shape[1]:
        raise StructureError(f"structured compression needs a square matrix, got {M.shape}")
    N = M.shape[0]
    if tag.is_para:
        if S is None:
            raise StructureError("para structures need the scaling matrix S")
        Smat = S.matrix() if isinstance(S, ScalingS) else np.asarray(S, dtype=complex)
        base = Smat @ M
    else:
        Smat = None
        base = M
    if skew is None:
        skew = tag in (Structure.SKEW_HERMITIAN, Structure.PARA_SKEW_HERMITIAN)
    rep = 1j * base if skew else base
    defect = opnorm(rep - rep.conj().T)
    if defect > rtol * max(opnorm(rep), np.finfo(float).tiny):
        raise StructureError(
            f"Hermitian representative for {tag.value} has defect {defect:.3e}", defect=defect
        )
    lam, Q = np.linalg.eigh((rep + rep.conj().T) / 2)
    mag = np.abs(lam)
    order = np.argsort(-mag, kind="stable")
    svals = mag[order]
    thr = resolve_tol(tol).threshold(svals[0] if N else 0.0, M.shape)
    r = int(np.sum(svals > thr))
    keep, drop = order[:r], order[r:]
    idx = np.concatenate([drop, keep]) if layout == ZEROS_FIRST else np.concatenate([keep, drop])
    V = Q[:, idx]
    U = Smat @ V if Smat is not None else V.copy()
    res = CompressionResult(U, V, r, np.zeros((r, r), complex), layout, thr, svals, _warnings(svals, thr))
    core = res.U_sel.conj().T @ M @ res.V_sel
    return CompressionResult(U, V, r, core, layout, thr, svals, res.warnings)


def choose_k(tail, tol=None):
    """Pick the Hankel block count from the rank sequence of H.

    Returns ``(k_used, stabilized)``: k_used is the largest k with
    rank H_{k-1} = rank H_k (or the largest k the data allows when there is
    none); stabilized is False when the rank still grows at the data boundary.
    """
    if tail.depth < 4:
        raise InputError("choose_k needs at least 4 Laurent blocks")
    kmax = tail.depth // 2
    ranks = [rank_of(_hankel(tail, k, 0), tol) for k in range(1, kmax + 1)]
    stabilized = ranks[-1] == ranks[-2]
    k_used = kmax
    for k in range(kmax, 1, -1):
        if ranks[k - 2] == ranks[k - 1]:
            k_used = k
            break
    return k_used, stabilized
