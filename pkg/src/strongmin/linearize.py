"""Pencil constructions: companion-like pencils, deflation, realizations, combination.

Every pencil is stored as a :class:`LinearSystemMatrix` holding eight
constant blocks, with

    A(z) = z A1 - A0,  B(z) = z B1 - B0,  C(z) = z C1 - C0,  D(z) = z D1 - D0,

and assembled as ``L(z) = [[A(z), -B(z)], [C(z), D(z)]]``.  All assembly and
disassembly goes through :meth:`LinearSystemMatrix.pencil` and
:meth:`LinearSystemMatrix.from_pencil`.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import block_diag

from .errors import DegenerateInputError, InputError, ShapeError, StructureError
from .hankel import (
    CORE_FIRST,
    ZEROS_FIRST,
    CompressionResult,
    build_H_pair,
    build_S_poly,
    build_S_rat,
    build_T,
    choose_k,
    compress_structured,
    compress_unstructured,
)
from .numkernel import as_cmatrix, frozen, lin_solve, opnorm, rank_of
from .polyrat import (
    LaurentTail,
    PolyMatrix,
    RationalMatrix,
    StateSpaceTriple,
    Structure,
    as_structure,
    check_structure_laurent,
    check_structure_poly,
    pencil_signs,
    symmetrize,
)

log = logging.getLogger(__name__)

_BLOCKS = ("A0", "A1", "B0", "B1", "C0", "C1", "D0", "D1")


@dataclass(frozen=True, eq=False)
class LinearSystemMatrix:
    A0: np.ndarray
    A1: np.ndarray
    B0: np.ndarray
    B1: np.ndarray
    C0: np.ndarray
    C1: np.ndarray
    D0: np.ndarray
    D1: np.ndarray

    def __post_init__(self):
        D0 = as_cmatrix(self.D0, name="D0")
        m, n = D0.shape
        A0 = as_cmatrix(self.A0, name="A0")
        pr, pc = A0.shape
        shapes = {"A0": (pr, pc), "A1": (pr, pc), "B0": (pr, n), "B1": (pr, n),
                  "C0": (m, pc), "C1": (m, pc), "D0": (m, n), "D1": (m, n)}
        for name in _BLOCKS:
            M = np.asarray(getattr(self, name), dtype=complex)
            if M.size == 0:
                M = M.reshape(shapes[name])
            try:
                M = as_cmatrix(M, shape=shapes[name], name=name)
            except InputError as exc:
                raise ShapeError(str(exc)) from None
            object.__setattr__(self, name, frozen(M))

    @property
    def p(self):
        """State dimension (row count of A; A is square except for the raw Lancaster pencil)."""
        return self.A0.shape[0]

    @property
    def state_shape(self):
        return self.A0.shape

    @property
    def m(self):
        return self.D0.shape[0]

    @property
    def n(self):
        return self.D0.shape[1]

    @property
    def shape(self):
        pr, pc = self.A0.shape
        return (pr + self.m, pc + self.n)

    def blocks(self):
        return {name: getattr(self, name) for name in _BLOCKS}

    def pencil(self):
        """Coefficients ``(L0, L1)`` of ``L(z) = L0 + z L1``."""
        L1 = np.block([[self.A1, -self.B1], [self.C1, self.D1]])
        L0 = np.block([[-self.A0, self.B0], [-self.C0, -self.D0]])
        return L0, L1

    @classmethod
    def from_pencil(cls, L0, L1, p, m=None, n=None):
        """Split a pencil; ``p`` is the state dimension or a (rows, cols) pair."""
        L0 = np.asarray(L0, dtype=complex)
        L1 = np.asarray(L1, dtype=complex)
        if L0.shape != L1.shape:
            raise ShapeError("pencil coefficients differ in shape")
        rows, cols = L0.shape
        pr, pc = (p, p) if np.isscalar(p) else p
        if m is not None and rows != pr + m or n is not None and cols != pc + n:
            raise ShapeError("pencil size disagrees with the declared partition")
        return cls(
            A0=-L0[:pr, :pc], A1=L1[:pr, :pc],
            B0=L0[:pr, pc:], B1=-L1[:pr, pc:],
            C0=-L0[pr:, :pc], C1=L1[pr:, :pc],
            D0=-L0[pr:, pc:], D1=L1[pr:, pc:],
        )

    def A(self, z):
        return z * self.A1 - self.A0

    def B(self, z):
        return z * self.B1 - self.B0

    def C(self, z):
        return z * self.C1 - self.C0

    def D(self, z):
        return z * self.D1 - self.D0

    def __call__(self, z):
        L0, L1 = self.pencil()
        return L0 + complex(z) * L1

    def transfer(self, z):
        """``D(z) + C(z) A(z)^{-1} B(z)``."""
        z = complex(z)
        if self.p == 0:
            return self.D(z)
        if self.A0.shape[0] != self.A0.shape[1]:
            raise ShapeError("transfer function needs a square A")
        return self.D(z) + self.C(z) @ lin_solve(self.A(z), self.B(z))


def _lsm(A0, A1, B0, B1, C0, C1, D0, D1):
    return LinearSystemMatrix(A0, A1, B0, B1, C0, C1, D0, D1)


def _need_degree(P, where):
    if P.degree < 2:
        raise DegenerateInputError(f"{where} needs degree >= 2, got {P.degree}")


def build_Lr(P):
    _need_degree(P, "build_Lr")
    d, (m, n) = P.degree, P.shape
    p = (d - 1) * n
    A1 = np.kron(np.eye(d - 1, k=1), np.eye(n))
    B1 = np.zeros((p, n), complex)
    B1[-n:] = -np.eye(n)
    C1 = np.hstack([P.coeffs[d - j] for j in range(d - 1)])
    return _lsm(np.eye(p), A1, np.zeros((p, n)), B1, np.zeros((m, p)), C1, -P.coeffs[0], P.coeffs[1])


def build_Lc(P):
    _need_degree(P, "build_Lc")
    d, (m, n) = P.degree, P.shape
    p = (d - 1) * m
    A1 = np.kron(np.eye(d - 1, k=-1), np.eye(m))
    B1 = -np.vstack([P.coeffs[d - i] for i in range(d - 1)])
    C1 = np.zeros((m, p), complex)
    C1[:, -m:] = np.eye(m)
    return _lsm(np.eye(p), A1, np.zeros((p, n)), B1, np.zeros((m, p)), C1, -P.coeffs[0], P.coeffs[1])


def build_Ls(P):
    """Lancaster-type pencil; A_s is (d-1)m x (d-1)n block anti-triangular with A_s(0) = -T."""
    _need_degree(P, "build_Ls")
    d, (m, n) = P.degree, P.shape
    A0 = build_T(P)
    A1 = np.zeros_like(A0)
    for i in range(d - 1):
        for j in range(d - 1):
            k = i + j - (d - 2)
            if k >= 1:
                A1[i * m:(i + 1) * m, j * n:(j + 1) * n] = P.coeffs[d - k + 1]
    B1 = -np.vstack([P.coeffs[d - i] for i in range(d - 1)])
    C1 = np.hstack([P.coeffs[d - j] for j in range(d - 1)])
    return _lsm(A0, A1, np.zeros_like(B1), B1, np.zeros_like(C1), C1, -P.coeffs[0], P.coeffs[1])


def trivial_linearization(P):
    """State dimension 0 and ``D(z) = P(z)`` for degree <= 1."""
    if P.degree > 1:
        raise InputError(f"trivial_linearization needs degree <= 1, got {P.degree}")
    m, n = P.shape
    D1 = P.coefficient(1)
    return _lsm(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, n)), np.zeros((0, n)),
                np.zeros((m, 0)), np.zeros((m, 0)), -P.coeffs[0], D1)


def _project(L, Us, Vs):
    """Keep the state rows ``Us^* [A -B]`` and state columns ``[A; C] Vs``."""
    Uh = Us.conj().T
    return _lsm(Uh @ L.A0 @ Vs, Uh @ L.A1 @ Vs, Uh @ L.B0, Uh @ L.B1,
                L.C0 @ Vs, L.C1 @ Vs, L.D0, L.D1)


def deflation_residual(P, comp):
    """Largest norm of the rows/columns that deflation discards (should vanish)."""
    L = build_Ls(P)
    U, V = comp.U, comp.V
    ru = U.shape[1] - comp.rank
    rv = V.shape[1] - comp.rank
    U1, V1 = U[:, :ru], V[:, :rv]
    parts = [U1.conj().T @ np.hstack([L.A0, L.B0]), U1.conj().T @ np.hstack([L.A1, L.B1]),
             np.vstack([L.A0, L.C0]) @ V1, np.vstack([L.A1, L.C1]) @ V1]
    return max(opnorm(X) for X in parts)


def deflate_Ls(P, tol=None):
    """Strongly minimal linearization by deflating the Lancaster pencil with T's compression.

    Degrees 0 and 1 route to :func:`trivial_linearization` (compression None).
    """
    if P.degree <= 1:
        return trivial_linearization(P), None
    comp = compress_unstructured(build_T(P), ZEROS_FIRST, tol)
    return _project(build_Ls(P), comp.U_sel, comp.V_sel), comp


def symmetrize_pencil(L, tag):
    """Enforce the tag's coefficient symmetry exactly; returns (pencil, defect before)."""
    tag = as_structure(tag)
    if tag is Structure.NONE:
        return L, 0.0
    s0, s1 = pencil_signs(tag)
    L0, L1 = L.pencil()
    defect = max(opnorm(L0.conj().T - s0 * L0), opnorm(L1.conj().T - s1 * L1))
    out = LinearSystemMatrix.from_pencil(symmetrize(L0, s0), symmetrize(L1, s1), L.p)
    return out, defect


def structure_defect(L, tag):
    tag = as_structure(tag)
    if tag is Structure.NONE:
        return 0.0
    if L.m != L.n:
        raise StructureError("structured pencils must be square")
    s0, s1 = pencil_signs(tag)
    L0, L1 = L.pencil()
    return max(opnorm(L0.conj().T - s0 * L0), opnorm(L1.conj().T - s1 * L1))


def _require_structure(ok_defect, tag, what):
    ok, defect = ok_defect
    if not ok:
        raise StructureError(f"{what} is not {tag.value} (defect {defect:.3e})", defect=defect)


def _deflate_structured_raw(P, tag, tol):
    tag = as_structure(tag)
    _require_structure(check_structure_poly(P, tag), tag, "polynomial matrix")
    if tag is Structure.NONE:
        return deflate_Ls(P, tol)
    if P.degree <= 1:
        return trivial_linearization(P), None
    S = build_S_poly(P.degree, P.rows)
    comp = compress_structured(build_T(P), tag, S, ZEROS_FIRST, tol)
    return _project(build_Ls(P), comp.U_sel, comp.V_sel), comp


def deflate_Ls_structured(P, tag, tol=None):
    """Deflated Lancaster pencil with U = V or U = S V, so the output keeps P's structure."""
    L, comp = _deflate_structured_raw(P, tag, tol)
    L, defect = symmetrize_pencil(L, tag)
    log.debug("structured deflation: symmetry defect %.3e before averaging", defect)
    return L, comp


def quad_lowrank(P, tol=None):
    """``[[-T^, z T^ V2^*], [z U2 T^, z P1 + P0]]`` from a rank-revealing P2 = U2 T^ V2^*."""
    if P.degree < 2:
        return trivial_linearization(P)
    if P.degree != 2:
        raise DegenerateInputError(f"quad_lowrank needs degree 2, got {P.degree}")
    comp = compress_unstructured(P.coeffs[2], ZEROS_FIRST, tol)
    Th, U2, V2 = comp.core, comp.U_sel, comp.V_sel
    r2 = comp.rank
    m, n = P.shape
    if r2 == 0:
        return trivial_linearization(PolyMatrix(P.coeffs[:2]))
    return _lsm(Th, np.zeros((r2, r2)), np.zeros((r2, n)), -Th @ V2.conj().T,
                np.zeros((m, r2)), U2 @ Th, -P.coeffs[0], P.coeffs[1])


def quad_lowrank_factored(P1, P0, Lfac, Ufac):
    """``[[-I, z Ufac^*], [z Lfac, z P1 + P0]]`` for P2 = Lfac Ufac^*."""
    P1, P0 = as_cmatrix(P1, name="P1"), as_cmatrix(P0, name="P0")
    Lfac, Ufac = as_cmatrix(Lfac, name="Lfac"), as_cmatrix(Ufac, name="Ufac")
    m, n = P0.shape
    r2 = Lfac.shape[1]
    if P1.shape != (m, n) or Lfac.shape != (m, r2) or Ufac.shape != (n, r2):
        raise ShapeError("factor shapes do not match P1/P0")
    if rank_of(Lfac) != r2 or rank_of(Ufac) != r2:
        raise InputError("low-rank factors must have full column rank")
    return _lsm(np.eye(r2), np.zeros((r2, r2)), np.zeros((r2, n)), -Ufac.conj().T,
                np.zeros((m, r2)), Lfac, -P0, P1)


def _empty_sp(m, n):
    return _lsm(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, n)), np.zeros((0, n)),
                np.zeros((m, 0)), np.zeros((m, 0)), np.zeros((m, n)), np.zeros((m, n)))


def _resolve_k(Rsp, k, tol):
    if k is None:
        if Rsp.depth >= 4:
            k, stabilized = choose_k(Rsp, tol)
            if not stabilized:
                log.warning("Hankel rank still growing at the data boundary (k=%d)", k)
            return k
        return 1
    k = int(k)
    if k < 1 or 2 * k > Rsp.depth:
        raise InputError(f"k={k} needs {2 * k} Laurent blocks, tail has {Rsp.depth}")
    return k


def realize_strictly_proper(Rsp, k=None, tol=None):
    """Hankel realization ``[[U1^* Hs V1 - z H^, H^ V11^*], [U11 H^, 0]]``."""
    k = _resolve_k(Rsp, k, tol)
    m, n = Rsp.shape
    H, Hs = build_H_pair(Rsp, k)
    comp = compress_unstructured(H, CORE_FIRST, tol)
    r = comp.rank
    if r == 0:
        return _empty_sp(m, n), comp
    U1, V1, Hh = comp.U_sel, comp.V_sel, comp.core
    U11, V11 = U1[:m], V1[:n]
    return _lsm(-U1.conj().T @ Hs @ V1, -Hh, Hh @ V11.conj().T, np.zeros((r, n)),
                -U11 @ Hh, np.zeros((m, r)), np.zeros((m, n)), np.zeros((m, n))), comp


# whether H (or S H for para tags) is skew-Hermitian, per the Laurent sign table
_TAIL_SKEW = {
    Structure.HERMITIAN: False,
    Structure.SKEW_HERMITIAN: True,
    Structure.PARA_HERMITIAN: True,
    Structure.PARA_SKEW_HERMITIAN: False,
}


def _realize_structured_raw(Rsp, tag, k, tol):
    tag = as_structure(tag)
    _require_structure(check_structure_laurent(Rsp, tag), tag, "Laurent tail")
    if tag is Structure.NONE:
        return realize_strictly_proper(Rsp, k, tol)
    m = Rsp.rows
    k = _resolve_k(Rsp, k, tol)
    H, Hs = build_H_pair(Rsp, k)
    S = build_S_rat(k, m)
    comp = compress_structured(H, tag, S, CORE_FIRST, tol, skew=_TAIL_SKEW[tag])
    r = comp.rank
    if r == 0:
        return _empty_sp(m, m), comp
    V1, Hh = comp.V_sel, comp.core
    V11 = V1[:m]
    if tag.is_para:
        Hs = S.matrix() @ Hs
        C0 = V11 @ Hh  # C(z) = -V11 H^
    else:
        C0 = -V11 @ Hh  # C(z) = V11 H^
    L = _lsm(-V1.conj().T @ Hs @ V1, -Hh, Hh @ V11.conj().T, np.zeros((r, m)),
             C0, np.zeros((m, r)), np.zeros((m, m)), np.zeros((m, m)))
    return L, comp


def realize_strictly_proper_structured(Rsp, tag, k=None, tol=None):
    """Structure-preserving Hankel realization (U = V or U = S V)."""
    L, comp = _realize_structured_raw(Rsp, tag, k, tol)
    L, defect = symmetrize_pencil(L, tag)
    log.debug("structured realization: symmetry defect %.3e before averaging", defect)
    return L, comp


def from_state_space(ss):
    """``[[A - z E, -B], [C, 0]]`` for a triple with E invertible."""
    q = ss.order
    m, n = ss.shape
    return _lsm(-ss.A, -ss.E, -ss.B, np.zeros((q, n)), -ss.C, np.zeros((m, q)),
                np.zeros((m, n)), np.zeros((m, n)))


def combine(Lpoly, Lsp):
    """Stack the states of a polynomial-part and a strictly-proper-part linearization."""
    if (Lpoly.m, Lpoly.n) != (Lsp.m, Lsp.n):
        raise ShapeError(f"parts have transfer shapes {(Lpoly.m, Lpoly.n)} and {(Lsp.m, Lsp.n)}")
    scale = max(1.0, opnorm(np.hstack([Lsp.C0, Lsp.C1])), opnorm(np.vstack([Lsp.B0, Lsp.B1])))
    if max(opnorm(Lsp.D0), opnorm(Lsp.D1)) > 1e-14 * scale:
        raise InputError("the strictly proper part must have D = 0")
    if Lsp.p == 0:
        return Lpoly
    return _lsm(
        block_diag(Lpoly.A0, Lsp.A0), block_diag(Lpoly.A1, Lsp.A1),
        np.vstack([Lpoly.B0, Lsp.B0]), np.vstack([Lpoly.B1, Lsp.B1]),
        np.hstack([Lpoly.C0, Lsp.C0]), np.hstack([Lpoly.C1, Lsp.C1]),
        Lpoly.D0, Lpoly.D1,
    )


@dataclass
class LinearizationReport:
    structure: str
    poly_compression: Optional[CompressionResult] = None
    sp_compression: Optional[CompressionResult] = None
    k_used: Optional[int] = None
    stabilized: Optional[bool] = None
    symmetry_defect_before: float = 0.0
    symmetry_defect_after: float = 0.0
    certificate: object = None
    warnings: list = field(default_factory=list)

    def flagged(self):
        """True when any rank decision sat close to its threshold."""
        return bool(self.warnings) or self.stabilized is False


def linearize_rational(R, tag="none", tol=None, *, k=None, seed=0, certify=True):
    """Strongly minimal (and structure-preserving when tagged) linearization of R.

    Returns ``(L, report)``.
    """
    tag = as_structure(tag)
    if not isinstance(R, RationalMatrix):
        R = RationalMatrix(R)
    report = LinearizationReport(structure=tag.value)
    P = R.poly_part
    Lpoly, report.poly_compression = _deflate_structured_raw(P, tag, tol)

    sp = R.sp_part
    Lsp = None
    if isinstance(sp, StateSpaceTriple):
        if tag is Structure.NONE:
            Lsp = from_state_space(sp)
        else:
            q = sp.order
            sp = sp.laurent(2 * (q + 1))
    if isinstance(sp, LaurentTail):
        kk = _resolve_k(sp, k, tol)
        report.k_used = kk
        report.stabilized = choose_k(sp, tol)[1] if sp.depth >= 4 else None
        Lsp, report.sp_compression = _realize_structured_raw(sp, tag, kk, tol)

    L = Lpoly if Lsp is None else combine(Lpoly, Lsp)
    if tag is not Structure.NONE:
        L, report.symmetry_defect_before = symmetrize_pencil(L, tag)
        report.symmetry_defect_after = structure_defect(L, tag)
    for comp in (report.poly_compression, report.sp_compression):
        if comp is not None:
            report.warnings.extend(comp.warnings)
    if report.stabilized is False:
        report.warnings.append("Hankel rank not stabilized; supply more Laurent blocks")
    if certify:
        from .analyze import check_strong_minimality

        report.certificate = check_strong_minimality(L, seed=seed)
    return L, report
