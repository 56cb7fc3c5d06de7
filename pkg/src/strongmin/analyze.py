"""Certificates and recovery for linear system matrices.

Rank decisions here use :data:`ANALYSIS_TOL` unless told otherwise; it is a
little looser than the numpy-style default because the matrices involved
(Toeplitz stacks of pencil coefficients, rectangular pencils at sampled
points) carry the rounding of the constructions that produced them.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InputError, PreconditionError, SingularPencilError, StrongMinError
from .numkernel import (
    EPS, RankTolerance, as_cmatrix, lin_solve, opnorm, poly_roots, rank_of, resolve_tol, singular_values,
)
from .polyrat import LaurentTail, PolyMatrix, RationalMatrix, StructuralIndices

ANALYSIS_TOL = RankTolerance("relative", 1e3)
FINITE_TOL = 1e-9
CLUSTER_RADIUS = 1e-6
DET_TRIM = 1e-10


def _tol(tol):
    return ANALYSIS_TOL if tol is None else resolve_tol(tol)


def transfer_eval(L, z):
    """``D(z) + C(z) A(z)^{-1} B(z)``; SingularityError at a pole of the realization."""
    return L.transfer(z)


# ---------------------------------------------------------------- certificate


@dataclass
class MinimalityCertificate:
    controllable_inf: bool
    observable_inf: bool
    controllable_fin: bool
    observable_fin: bool
    witnesses: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)

    @property
    def strongly_minimal(self):
        return self.controllable_inf and self.observable_inf and self.controllable_fin and self.observable_fin

    @property
    def min_margin(self):
        return min(self.margins.values()) if self.margins else np.inf

    def to_dict(self):
        return {
            "controllable_inf": self.controllable_inf,
            "observable_inf": self.observable_inf,
            "controllable_fin": self.controllable_fin,
            "observable_fin": self.observable_fin,
            "strongly_minimal": self.strongly_minimal,
            "witnesses": [
                {"edge": e, "point": [float(np.real(z)), float(np.imag(z))], "deficiency": int(k)}
                for e, z, k in self.witnesses
            ],
            "margins": {k: float(v) for k, v in self.margins.items()},
        }


def _full_row_rank(X, tol):
    """(full row rank?, margin, deficiency) for a wide matrix X."""
    p = X.shape[0]
    s = singular_values(X)
    thr = tol.threshold(s[0] if s.size else 0.0, X.shape)
    rank = int(np.sum(s > thr))
    margin = float(s[p - 1]) / max(thr, np.finfo(float).tiny) if p else np.inf
    return rank == p, margin, p - rank


def _square_candidates(X0, X1, W):
    """Finite eigenvalues of the square pencil ``(X1 z - X0) W``."""
    a, b = X0 @ W, X1 @ W
    w = scipy.linalg.eigvals(a, b, homogeneous_eigvals=True)
    alpha, beta = w
    scale = max(opnorm(a), opnorm(b), np.finfo(float).tiny)
    ok = np.abs(beta) > 1e3 * EPS * np.abs(alpha) + np.finfo(float).tiny * scale
    return alpha[ok] / beta[ok]


def _edge_finite(X0, X1, rng, finite_tol, probes, draws=2):
    """Test that ``z X1 - X0`` (p x N, N >= p) has full row rank at every finite z.

    Returns (ok, margin, witnesses).
    """
    p, N = X0.shape
    if p == 0:
        return True, np.inf, []
    cands = []
    for _ in range(draws):
        W = rng.standard_normal((N, p)) + 1j * rng.standard_normal((N, p))
        cands.append(_square_candidates(X0, X1, W))
    cands = np.concatenate(cands)
    rad = 1.0 + opnorm(X0) / max(opnorm(X1), np.finfo(float).tiny)
    probe_pts = rad * np.sqrt(rng.uniform(0, 1, probes)) * np.exp(2j * np.pi * rng.uniform(0, 1, probes))
    n0, n1 = opnorm(X0), opnorm(X1)
    ok, margin, wit = True, np.inf, []
    for z in np.concatenate([cands, probe_pts]):
        X = z * X1 - X0
        s = singular_values(X)
        thr = finite_tol * (n0 + abs(z) * n1)
        defic = int(np.sum(s[:p] <= thr)) if s.size >= p else p
        margin = min(margin, float(s[p - 1]) / max(thr, np.finfo(float).tiny))
        if defic:
            ok = False
            wit.append((complex(z), defic))
    return ok, margin, wit


def check_strong_minimality(L, tol=None, seed=0, finite_tol=FINITE_TOL, probes=20):
    """Rank certificate that ``[A, -B]`` and ``[A; C]`` have no finite or infinite eigenvalues.

    The infinity conditions are exact SVD ranks of ``[A1, -B1]`` and
    ``[A1; C1]``.  Finite eigenvalues of the rectangular edge pencils are
    hunted by compressing each to a square pencil with two independent
    random factors, then re-testing the rank of the rectangular pencil at
    every candidate and at ``probes`` random points.
    """
    tol = _tol(tol)
    p = L.p
    if p == 0:
        return MinimalityCertificate(True, True, True, True, [], {})
    rng = np.random.default_rng(seed)
    margins, witnesses = {}, []

    c_inf, margins["controllable_inf"], k = _full_row_rank(np.hstack([L.A1, -L.B1]), tol)
    if not c_inf:
        witnesses.append(("controllable", complex(np.inf), k))
    o_inf, margins["observable_inf"], k = _full_row_rank(np.vstack([L.A1, L.C1]).conj().T, tol)
    if not o_inf:
        witnesses.append(("observable", complex(np.inf), k))

    # [A(z), -B(z)] = z [A1, -B1] - [A0, -B0]
    c_fin, margins["controllable_fin"], w = _edge_finite(
        np.hstack([L.A0, -L.B0]), np.hstack([L.A1, -L.B1]), rng, finite_tol, probes)
    witnesses += [("controllable", z, k) for z, k in w]
    # transpose the column edge so it is wide; eigenvalues are unchanged
    o_fin, margins["observable_fin"], w = _edge_finite(
        np.vstack([L.A0, L.C0]).T, np.vstack([L.A1, L.C1]).T, rng, finite_tol, probes)
    witnesses += [("observable", z, k) for z, k in w]
    return MinimalityCertificate(c_inf, o_inf, c_fin, o_fin, witnesses, margins)


# ---------------------------------------------------------- finite eigenvalues


def _is_singular_pencil(L0, L1, rng):
    N = L0.shape[0]
    scale = max(opnorm(L0), opnorm(L1), np.finfo(float).tiny)
    for _ in range(3):
        z = rng.standard_normal() + 1j * rng.standard_normal()
        s = singular_values(L0 + z * L1)
        if s[-1] > 1e3 * N * EPS * scale * (1 + abs(z)):
            return False
    return True


def pencil_finite_eigenvalues(L0, L1, seed=0):
    """Finite eigenvalues of the square regular pencil ``L0 + z L1``, with multiplicity.

    The determinant is interpolated at N+1 scaled roots of unity (N the
    pencil size) and its roots taken with :func:`poly_roots`.
    """
    L0, L1 = as_cmatrix(L0, name="L0"), as_cmatrix(L1, name="L1")
    if L0.shape != L1.shape or L0.shape[0] != L0.shape[1]:
        raise InputError(f"need square pencil coefficients of equal shape, got {L0.shape} and {L1.shape}")
    N = L0.shape[0]
    if N == 0:
        return np.zeros(0, dtype=complex)
    if _is_singular_pencil(L0, L1, np.random.default_rng(seed)):
        raise SingularPencilError("determinant vanishes identically; singular pencils are not supported")
    n1 = opnorm(L1)
    if n1 == 0:
        return np.zeros(0, dtype=complex)
    rho = 1.0 + opnorm(L0) / n1
    nodes = rho * np.exp(2j * np.pi * np.arange(N + 1) / (N + 1))
    dets = np.array([np.linalg.det(L0 + z * L1) for z in nodes])
    # coefficients of q(w) = det(L0 + rho w L1), w on the unit circle
    c = np.fft.fft(dets) / (N + 1)
    # fft uses exp(-2 pi i jk/(N+1)); that is exactly the inverse of evaluation at nodes
    big = np.max(np.abs(c))
    keep = np.nonzero(np.abs(c) > DET_TRIM * big)[0]
    c = c[: keep[-1] + 1]
    return rho * poly_roots(c)


def cluster_eigenvalues(values, radius=CLUSTER_RADIUS):
    """Single-linkage clusters at radius ``radius * max(1, |z|)``; returns [(centre, count)]."""
    vals = [complex(v) for v in np.ravel(values)]
    parent = list(range(len(vals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) <= radius * max(1.0, abs(vals[i]), abs(vals[j])):
                parent[find(i)] = find(j)
    groups = {}
    for i, v in enumerate(vals):
        groups.setdefault(find(i), []).append(v)
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    out.sort(key=lambda t: (round(t[0].real, 8), round(t[0].imag, 8)))
    return out


# ------------------------------------------------------ structure at a point


def _as_poly(M):
    if isinstance(M, PolyMatrix):
        return M
    if isinstance(M, tuple) and len(M) == 2:
        return PolyMatrix(list(M))
    raise InputError("expected a PolyMatrix or an (L0, L1) pair")


def normal_rank(M, tol=None, seed=0):
    """Rank at a seeded random point of modulus 0.5."""
    P = _as_poly(M)
    rng = np.random.default_rng(seed)
    z = 0.5 * np.exp(2j * np.pi * rng.uniform())
    return rank_of(P(z), _tol(tol))


def _toeplitz(coeffs, k):
    m, n = coeffs[0].shape
    T = np.zeros((k * m, k * n), dtype=complex)
    for i in range(k):
        for j in range(i + 1):
            if i - j < len(coeffs):
                T[i * m:(i + 1) * m, j * n:(j + 1) * n] = coeffs[i - j]
    return T


def partial_mults_at_zero(M, tol=None, seed=0, normal_rank_hint=None):
    """Exponents of the local Smith form at 0 (zeros included), nondecreasing.

    With T_k the block lower-triangular Toeplitz matrix of the first k
    Taylor coefficients and s_k = rank T_k - rank T_{k-1}, the number of
    exponents >= k is r - s_k.  The sequence stops once s_k = r.
    """
    P = _as_poly(M)
    tol = _tol(tol)
    r = normal_rank(P, tol, seed) if normal_rank_hint is None else int(normal_rank_hint)
    if r == 0:
        return StructuralIndices(0, ())
    kmax = min(P.shape) * max(P.degree, 1) + 1
    coeffs = P.coeffs
    prev = 0
    at_least = []
    for k in range(1, kmax + 2):
        rho = rank_of(_toeplitz(coeffs, k), tol)
        s = rho - prev
        prev = rho
        if s > r or s < 0:
            raise StrongMinError(f"inconsistent Toeplitz rank sequence (s_{k} = {s}, r = {r})")
        if s == r:
            break
        at_least.append(r - s)
    else:
        raise StrongMinError("Toeplitz rank sequence did not reach the normal rank; tolerance too tight?")
    # at_least[k-1] = #{exponents >= k}
    counts = [r] + at_least + [0]
    idx = []
    for k in range(len(counts) - 1):
        idx += [k] * (counts[k] - counts[k + 1])
    return StructuralIndices(r, tuple(sorted(idx)))


def _positive(si):
    return [i for i in si.indices if i > 0]


def transfer_normal_rank(L, tol=None, seed=0):
    """Normal rank of the transfer function: rank L(z) - p at a random point."""
    L0, L1 = L.pencil()
    return normal_rank((L0, L1), tol, seed) - L.p


def _rev1_A(L):
    return PolyMatrix([L.A1, -L.A0], rows=L.p, cols=L.p)


def _rev1_L(L):
    L0, L1 = L.pencil()
    return PolyMatrix([L1, L0])


def _require_minimal(L, tol, seed):
    cert = check_strong_minimality(L, seed=seed)
    if not cert.strongly_minimal:
        raise PreconditionError("pencil is not strongly minimal; the infinity formula does not apply")
    return cert


def indices_at_infinity(L, normal_rank=None, tol=None, seed=0, check=True):
    """Structural indices at infinity of the transfer function of a strongly minimal L.

    ``(-e_s, ..., -e_1, 0, ..., 0, f_1, ..., f_u) - 1`` with e the partial
    multiplicities at 0 of ``rev_1 A`` and f those of ``rev_1 L``.
    """
    if check:
        _require_minimal(L, tol, seed)
    r = transfer_normal_rank(L, tol, seed) if normal_rank is None else int(normal_rank)
    e = _positive(partial_mults_at_zero(_rev1_A(L), tol, seed, normal_rank_hint=L.p)) if L.p else []
    f = _positive(partial_mults_at_zero(_rev1_L(L), tol, seed, normal_rank_hint=r + L.p))
    zeros = r - len(e) - len(f)
    if zeros < 0:
        raise StrongMinError(f"more pole and zero multiplicities ({len(e)}+{len(f)}) than the rank {r}")
    d = sorted(-x for x in e) + [0] * zeros + sorted(f)
    return StructuralIndices(r, tuple(x - 1 for x in d))


def eig_structure_at_infinity_poly(P, L, tol=None, seed=0, check=True):
    """Partial multiplicities at 0 of ``rev_d P`` (the infinite eigenvalue) recovered from L."""
    d = indices_at_infinity(L, tol=tol, seed=seed, check=check)
    t = [x + P.degree for x in d.indices]
    if any(x < 0 for x in t):
        raise StrongMinError(f"structural indices {d.indices} are below -deg P")
    return StructuralIndices(d.normal_rank, tuple(x for x in t if x > 0))


def quad_infinity(P, L, r_P=None, r2=None, tol=None, seed=0):
    """Infinite eigenvalue structure of a quadratic P from a strongly minimal L.

    ``(1, ..., 1, f_1 + 1, ..., f_u + 1)`` with ``r_P - r2 - u`` ones, where
    f are the partial multiplicities at 0 of ``rev_1 L``.
    """
    if P.degree != 2:
        raise InputError(f"quad_infinity needs a quadratic, got degree {P.degree}")
    r_P = normal_rank(P, tol, seed) if r_P is None else int(r_P)
    r2 = rank_of(P.coeffs[2], _tol(tol)) if r2 is None else int(r2)
    f = _positive(partial_mults_at_zero(_rev1_L(L), tol, seed, normal_rank_hint=r_P + L.p))
    ones = r_P - r2 - len(f)
    if ones < 0:
        raise StrongMinError(f"r_P - r2 - u = {ones} is negative")
    return StructuralIndices(r_P, tuple([1] * ones + sorted(x + 1 for x in f)))


# --------------------------------------------------------------- eigenvectors


def _null_residual(M, v):
    return opnorm(M @ v) / max(opnorm(M) * np.linalg.norm(v), np.finfo(float).tiny)


def recover_eigenvector(L, z0, side, v, rtol=1e-8):
    """Project a null vector of ``L(z0)`` to one of the transfer function at z0."""
    v = np.asarray(v, dtype=complex).reshape(-1, 1)
    M = L(z0)
    if side == "right":
        if v.shape[0] != L.p + L.n:
            raise InputError(f"right vector needs length {L.p + L.n}")
        res = _null_residual(M, v)
        out = v[L.p:]
    elif side == "left":
        if v.shape[0] != L.p + L.m:
            raise InputError(f"left vector needs length {L.p + L.m}")
        res = _null_residual(M.conj().T, v)
        out = v[L.p:]
    else:
        raise InputError(f"side must be 'left' or 'right', got {side!r}")
    if res > rtol:
        raise InputError(f"v is not a null vector of L(z0) (relative residual {res:.2e})")
    return out.ravel()


def lift_eigenvector(L, z0, side, x):
    """Inverse of :func:`recover_eigenvector`: a null vector of the transfer function lifted to L(z0)."""
    x = np.asarray(x, dtype=complex).reshape(-1, 1)
    if L.p == 0:
        return x.ravel()
    A = L.A(z0)
    if side == "right":
        top = lin_solve(A, L.B(z0) @ x)
    elif side == "left":
        top = -lin_solve(A.conj().T, L.C(z0).conj().T @ x)
    else:
        raise InputError(f"side must be 'left' or 'right', got {side!r}")
    return np.vstack([top, x]).ravel()


# ------------------------------------------------------------------ reports


def polar_degree_at_infinity(P, tol=None, seed=0):
    """Sum of pole orders at infinity of P, from the Smith form of ``rev_d P`` at 0."""
    t = partial_mults_at_zero(P.reversal(), tol, seed)
    return sum(max(0, P.degree - x) for x in t.indices)


def degree_audit(L, source=None, tol=None, seed=0):
    """McMillan degree read off as rank L1, cross-checked against a polynomial source."""
    L0, L1 = L.pencil()
    rk = rank_of(L1, _tol(tol)) if L1.size else 0
    out = {"state_dim": L.p, "mcmillan_rank_L1": rk, "polar_degree_infinity": None, "consistent": None}
    P = source.poly_part if isinstance(source, RationalMatrix) and source.sp_part is None else source
    if isinstance(P, PolyMatrix):
        pd = polar_degree_at_infinity(P, tol, seed)
        out["polar_degree_infinity"] = pd
        out["consistent"] = pd == rk
    return out


@dataclass
class StructuralReport:
    normal_rank: int
    indices_at_infinity: StructuralIndices
    finite_eigenvalues: object = None
    mcmillan_rank_L1: int = 0
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.indices_at_infinity.indices) != self.normal_rank:
            raise InputError("index list length must equal the normal rank")

    def eigenvalue_clusters(self):
        if self.finite_eigenvalues is None:
            return None
        return cluster_eigenvalues(self.finite_eigenvalues)


def structural_report(L, tol=None, seed=0, eigs=True):
    r = transfer_normal_rank(L, tol, seed)
    idx = indices_at_infinity(L, r, tol, seed)
    notes = []
    ev = None
    if eigs:
        L0, L1 = L.pencil()
        if L0.shape[0] != L0.shape[1]:
            notes.append("rectangular pencil: finite eigenvalues not computed")
        else:
            try:
                ev = pencil_finite_eigenvalues(L0, L1, seed)
            except SingularPencilError:
                notes.append("singular pencil: finite eigenvalues not supported")
    L1 = L.pencil()[1]
    rk = rank_of(L1, _tol(tol)) if L1.size else 0
    return StructuralReport(r, idx, ev, rk, notes)


# ------------------------------------------------------- model comparisons


def _finite_pole_radius(L):
    if L.p == 0:
        return 0.0
    alpha, beta = scipy.linalg.eigvals(L.A0, L.A1, homogeneous_eigvals=True)
    ok = np.abs(beta) > 1e3 * EPS * np.abs(alpha)
    return float(np.max(np.abs(alpha[ok] / beta[ok]))) if np.any(ok) else 0.0


def laurent_coefficients(L, P, depth, npoints=None):
    """Coefficients of ``T(z) - P(z)`` at infinity by the trapezoidal rule on a circle.

    Returns ``(neg, pos)``: neg[j-1] is the coefficient of z^{-j}
    (j = 1..depth) and pos[j] that of z^j (j = 0..deg), which should vanish
    when P is the polynomial part of the transfer function T of L.
    """
    rho = 2.0 * max(1.0, _finite_pole_radius(L))
    deg = max(P.degree, 1)
    N = npoints or int(2 ** np.ceil(np.log2(max(64, 4 * (depth + deg + 2)))))
    nodes = rho * np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([L.transfer(z) - P(z) for z in nodes])
    G = np.fft.fft(vals, axis=0) / N
    neg = [G[N - j] * rho ** j for j in range(1, depth + 1)]
    pos = [G[j] / rho ** j for j in range(deg + 1)]
    return neg, pos


def transfer_residual(L, R, seed=0, points=20):
    """Largest relative mismatch between the transfer function of L and the model R.

    Polynomial and state-space models are sampled at ``points`` seeded
    points; a Laurent-tail model is compared coefficient by coefficient,
    since a truncated tail is not a function one can sample.
    """
    if not isinstance(R, RationalMatrix):
        R = RationalMatrix(R)
    if (L.m, L.n) != R.shape:
        return np.inf
    sp = R.sp_part
    if isinstance(sp, LaurentTail):
        neg, pos = laurent_coefficients(L, R.poly_part, sp.depth)
        scale = max(1.0, sp.scale(), R.poly_part.scale())
        err = max(opnorm(neg[j] - sp.block(j + 1)) for j in range(sp.depth))
        err = max([err] + [opnorm(G) for G in pos])
        return err / scale
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < points:
        z = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
        try:
            T = L.transfer(z)
            ref = R(z)
        except ArithmeticError:
            continue
        worst = max(worst, opnorm(T - ref) / max(1.0, opnorm(ref)))
        done += 1
    return worst
