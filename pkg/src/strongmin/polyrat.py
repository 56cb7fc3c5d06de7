"""Polynomial matrices, Laurent tails, state-space triples and structure tags."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import InputError, ShapeError, SingularityError
from .numkernel import as_cmatrix, frozen, lin_solve, opnorm, singular_values, EPS

TRIM_RTOL = 1e-13
STRUCTURE_RTOL = 1e-12


class Structure(str, Enum):
    NONE = "none"
    HERMITIAN = "hermitian"
    SKEW_HERMITIAN = "skew_hermitian"
    PARA_HERMITIAN = "para_hermitian"
    PARA_SKEW_HERMITIAN = "para_skew_hermitian"

    @property
    def is_para(self):
        return self in (Structure.PARA_HERMITIAN, Structure.PARA_SKEW_HERMITIAN)


def as_structure(tag):
    if tag is None:
        return Structure.NONE
    try:
        return Structure(tag)
    except ValueError:
        raise InputError(f"unknown structure tag {tag!r}") from None


def poly_sign(tag, i):
    """Sign s with ``P_i^* = s P_i`` for the coefficient of lambda^i."""
    tag = as_structure(tag)
    if tag is Structure.HERMITIAN:
        return 1
    if tag is Structure.SKEW_HERMITIAN:
        return -1
    if tag is Structure.PARA_HERMITIAN:
        return (-1) ** i
    if tag is Structure.PARA_SKEW_HERMITIAN:
        return (-1) ** (i + 1)
    raise InputError("unstructured tag has no coefficient sign")


def tail_sign(tag, i):
    """Sign s with ``R_{-i}^* = s R_{-i}``; i >= 1."""
    return poly_sign(tag, i)


def pencil_signs(tag):
    """Signs (s0, s1) with ``L0^* = s0 L0`` and ``L1^* = s1 L1`` for a structured pencil."""
    tag = as_structure(tag)
    return poly_sign(tag, 0), poly_sign(tag, 1)


@dataclass(frozen=True, eq=False)
class PolyMatrix:
    """``P(z) = P_0 + P_1 z + ... + P_d z^d`` stored as a tuple of m x n arrays.

    Trailing coefficients that are negligible relative to the largest one are
    trimmed on construction, so ``coeffs[-1]`` is nonzero unless ``degree == 0``.
    """

    coeffs: tuple

    def __init__(self, coeffs, rows=None, cols=None):
        mats = [as_cmatrix(c, name=f"P_{i}") for i, c in enumerate(coeffs)]
        if not mats:
            if rows is None or cols is None:
                raise InputError("an empty coefficient list needs explicit rows and cols")
            mats = [np.zeros((rows, cols), dtype=complex)]
        shape = mats[0].shape
        for i, M in enumerate(mats):
            if M.shape != shape:
                raise ShapeError(f"P_{i} has shape {M.shape}, expected {shape}")
        if rows is not None and shape != (rows, cols):
            raise ShapeError(f"coefficients are {shape}, declared {(rows, cols)}")
        norms = [opnorm(M) for M in mats]
        cut = TRIM_RTOL * max(norms)
        last = len(mats) - 1
        while last > 0 and norms[last] <= cut:
            last -= 1
        object.__setattr__(self, "coeffs", tuple(frozen(M) for M in mats[: last + 1]))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def shape(self):
        return self.coeffs[0].shape

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    @property
    def leading(self):
        return self.coeffs[-1]

    def coefficient(self, i):
        if 0 <= i <= self.degree:
            return self.coeffs[i]
        return np.zeros(self.shape, dtype=complex)

    def scale(self):
        return max(opnorm(M) for M in self.coeffs)

    def __call__(self, z):
        return eval_poly(self, z)

    def reversal(self, degree=None):
        """``z^g P(1/z)`` with g = degree (default: the degree of P)."""
        g = self.degree if degree is None else degree
        if g < self.degree:
            raise InputError("reversal degree below polynomial degree")
        return PolyMatrix([self.coefficient(g - i) for i in range(g + 1)])

    def __add__(self, other):
        if other.shape != self.shape:
            raise ShapeError("shape mismatch in polynomial sum")
        g = max(self.degree, other.degree)
        return PolyMatrix([self.coefficient(i) + other.coefficient(i) for i in range(g + 1)])


@dataclass(frozen=True, eq=False)
class LaurentTail:
    """Leading blocks ``R_{-1}, ..., R_{-2k}`` of a strictly proper expansion at infinity."""

    coeffs: tuple

    def __init__(self, coeffs):
        mats = [as_cmatrix(c, name=f"R_-{i + 1}") for i, c in enumerate(coeffs)]
        if len(mats) < 2 or len(mats) % 2:
            raise InputError(f"a Laurent tail needs an even number (>= 2) of blocks, got {len(mats)}")
        shape = mats[0].shape
        for i, M in enumerate(mats):
            if M.shape != shape:
                raise ShapeError(f"R_-{i + 1} has shape {M.shape}, expected {shape}")
        object.__setattr__(self, "coeffs", tuple(frozen(M) for M in mats))

    @property
    def depth(self):
        return len(self.coeffs)

    @property
    def shape(self):
        return self.coeffs[0].shape

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    def block(self, i):
        """R_{-i} for 1 <= i <= depth."""
        return self.coeffs[i - 1]

    def truncated(self, depth):
        return LaurentTail(self.coeffs[:depth])

    def scale(self):
        return max(opnorm(M) for M in self.coeffs)

    def __call__(self, z):
        return eval_laurent(self, z)


@dataclass(frozen=True, eq=False)
class StateSpaceTriple:
    """``z -> C (A - z E)^{-1} B`` with E invertible."""

    A: np.ndarray
    E: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = as_cmatrix(self.A, name="A")
        q = A.shape[0]
        if A.shape != (q, q):
            raise ShapeError(f"A must be square, got {A.shape}")
        E = as_cmatrix(self.E, shape=(q, q), name="E")
        B = as_cmatrix(self.B, name="B")
        C = as_cmatrix(self.C, name="C")
        if B.shape[0] != q or C.shape[1] != q:
            raise ShapeError(f"B is {B.shape} and C is {C.shape} for state size {q}")
        s = singular_values(E)
        if q == 0 or s[-1] <= q * EPS * s[0] or s[0] == 0:
            raise InputError("E must be square and numerically invertible")
        for name, M in zip("AEBC", (A, E, B, C)):
            object.__setattr__(self, name, frozen(M))

    @property
    def order(self):
        return self.A.shape[0]

    @property
    def shape(self):
        return (self.C.shape[0], self.B.shape[1])

    def __call__(self, z):
        return eval_statespace(self, z)

    def laurent(self, depth):
        """Laurent blocks ``R_{-j} = -C (E^{-1}A)^{j-1} E^{-1} B``, j = 1..depth."""
        Ei = np.linalg.inv(self.E)
        M = Ei @ self.A
        X = Ei @ self.B
        blocks = []
        for _ in range(depth):
            blocks.append(-self.C @ X)
            X = M @ X
        return LaurentTail(blocks)


@dataclass(frozen=True, eq=False)
class RationalMatrix:
    """Polynomial part plus an optional strictly proper part."""

    poly_part: PolyMatrix
    sp_part: Optional[Union[LaurentTail, StateSpaceTriple]] = None

    def __post_init__(self):
        if self.sp_part is not None and self.sp_part.shape != self.poly_part.shape:
            raise ShapeError(
                f"polynomial part is {self.poly_part.shape}, strictly proper part is {self.sp_part.shape}"
            )

    @property
    def shape(self):
        return self.poly_part.shape

    def __call__(self, z):
        val = eval_poly(self.poly_part, z)
        if isinstance(self.sp_part, LaurentTail):
            val = val + eval_laurent(self.sp_part, z)
        elif isinstance(self.sp_part, StateSpaceTriple):
            val = val + eval_statespace(self.sp_part, z)
        return val


@dataclass(frozen=True)
class StructuralIndices:
    normal_rank: int
    indices: tuple = field(default_factory=tuple)

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if list(idx) != sorted(idx):
            raise InputError(f"indices must be nondecreasing, got {idx}")
        object.__setattr__(self, "indices", idx)


def eval_poly(P, z):
    z = complex(z)
    acc = np.array(P.coeffs[-1], dtype=complex)
    for C in reversed(P.coeffs[:-1]):
        acc = acc * z + C
    return acc


def eval_laurent(Rsp, z):
    z = complex(z)
    if z == 0:
        raise InputError("a Laurent tail cannot be evaluated at z = 0")
    w = 1.0 / z
    acc = np.zeros(Rsp.shape, dtype=complex)
    for R in reversed(Rsp.coeffs):
        acc = (acc + R) * w
    return acc


def eval_statespace(ss, z):
    try:
        X = lin_solve(ss.A - complex(z) * ss.E, ss.B)
    except SingularityError as exc:
        raise SingularityError(f"z = {z} is a pole of the realization", exc.smallest_singular_value) from exc
    return ss.C @ X


def _check_blocks(blocks, tag, sign_of, first_index):
    tag = as_structure(tag)
    if tag is Structure.NONE:
        return True, 0.0
    m, n = blocks[0].shape
    if m != n:
        raise ShapeError(f"structure {tag.value} needs square data, got {m}x{n}")
    scale = max(opnorm(M) for M in blocks)
    defect = 0.0
    for i, M in enumerate(blocks, start=first_index):
        defect = max(defect, opnorm(M.conj().T - sign_of(tag, i) * M))
    return defect <= STRUCTURE_RTOL * max(scale, 1e-300) or defect == 0.0, defect


def check_structure_poly(P, tag):
    """Return ``(ok, defect)`` with defect the largest ``||P_i^* - s_i P_i||``."""
    return _check_blocks(P.coeffs, tag, poly_sign, 0)


def check_structure_laurent(Rsp, tag):
    return _check_blocks(Rsp.coeffs, tag, tail_sign, 1)


def reverse_pencil(L0, L1):
    """Coefficients of ``L1 + z L0``, the reversal of ``L0 + z L1``."""
    L0 = as_cmatrix(L0)
    L1 = as_cmatrix(L1)
    if L0.shape != L1.shape:
        raise ShapeError("pencil coefficients differ in shape")
    return L1, L0


def symmetrize(M, sign):
    """``(M + sign M^*)/2``; exactly (skew-)Hermitian in floating point."""
    return (M + sign * M.conj().T) / 2


def _gauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _low_rank(rng, rows, cols, rank, sign):
    X = _gauss(rng, (rows, rank))
    if sign is None:
        return X @ _gauss(rng, (rank, cols))
    K = np.diag(rng.uniform(0.5, 2.0, rank) * rng.choice([-1.0, 1.0], rank))
    if sign < 0:
        K = 1j * K
    return symmetrize(X @ K @ X.conj().T, sign)


def random_structured(m, degree, tag="none", seed=0, *, kind="poly", rank=None, n=None, real=False):
    """Random fixture data passing the matching structure check.

    ``kind="poly"`` gives a PolyMatrix of the given degree; ``kind="laurent"``
    gives a LaurentTail with ``degree`` blocks.  ``rank`` plants the rank of
    the leading coefficient P_d (poly) or of R_{-1} (laurent).
    """
    tag = as_structure(tag)
    rng = np.random.default_rng(seed)
    n = m if n is None else n
    if tag is not Structure.NONE and n != m:
        raise ShapeError("structured data must be square")
    if kind == "poly":
        indices = range(degree + 1)
        planted = degree
    elif kind == "laurent":
        indices = range(1, degree + 1)
        planted = 1
    else:
        raise InputError(f"unknown kind {kind!r}")
    blocks = []
    for i in indices:
        sign = None if tag is Structure.NONE else poly_sign(tag, i)
        if rank is not None and i == planted:
            Z = _low_rank(rng, m, n, rank, sign)
        else:
            Z = _gauss(rng, (m, n))
            if sign is not None:
                Z = symmetrize(Z, sign)
        if real:
            Z = Z.real if sign is None else symmetrize(Z.real, sign)
        blocks.append(Z)
    if kind == "poly":
        return PolyMatrix(blocks)
    return LaurentTail(blocks)


def random_statespace(m, n, q, seed=0, *, tag="none", spectral_radius=0.9):
    """Random minimal (generically) triple, optionally carrying a structure.

    Structured triples have the form ``C (K - z J)^{-1} (-C^*)`` scaled by 1
    or i, with J, K (skew-)Hermitian as the tag requires; the realized
    function then carries the tag's structure exactly.
    """
    tag = as_structure(tag)
    rng = np.random.default_rng(seed)
    if tag is Structure.NONE:
        A = _gauss(rng, (q, q))
        E = _gauss(rng, (q, q)) + 2 * q * np.eye(q)
        M = np.linalg.solve(E, A)
        rho = max(np.max(np.abs(np.linalg.eigvals(M))), 1e-12)
        A = A * (spectral_radius / rho)
        return StateSpaceTriple(A, E, _gauss(rng, (q, n)), _gauss(rng, (m, q)))
    if n != m:
        raise ShapeError("structured state-space data must be square")
    C = _gauss(rng, (m, q))
    K = symmetrize(_gauss(rng, (q, q)), 1)
    if tag in (Structure.HERMITIAN, Structure.SKEW_HERMITIAN):
        W = _gauss(rng, (q, q))
        J = W @ W.conj().T + np.eye(q)  # Hermitian positive definite
    else:
        W = _gauss(rng, (q, q))
        J = 1j * (W @ W.conj().T + np.eye(q))  # skew-Hermitian, invertible
    rho = max(np.max(np.abs(np.linalg.eigvals(np.linalg.solve(J, K)))), 1e-12)
    K = K * (spectral_radius / rho)
    B = -C.conj().T
    if tag in (Structure.SKEW_HERMITIAN, Structure.PARA_SKEW_HERMITIAN):
        B = 1j * B
    return StateSpaceTriple(K, J, B, C)
