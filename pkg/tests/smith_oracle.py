"""Exact Smith form over Q[x] by elementary row and column operations.

Polynomials are lists of Fractions in ascending order with no trailing
zeros; the zero polynomial is ``[]``.  Only used as a test oracle, so
clarity wins over speed.
"""
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np


def norm(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def deg(p):
    return len(p) - 1 if p else -1


def add(p, q):
    n = max(len(p), len(q))
    return norm([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p, c):
    return norm([c * a for a in p])


def mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return norm(out)


def divmod_poly(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    while p and deg(p) >= deg(q):
        c = p[-1] / q[-1]
        s = deg(p) - deg(q)
        quot[s] = c
        p = add(p, [0] * s + scale(q, -c))
    return norm(quot), p


def ord0(p):
    """Multiplicity of the root x = 0."""
    k = 0
    while k < len(p) and p[k] == 0:
        k += 1
    return k


def smith_diagonal(M):
    """Invariant factors (monic, each dividing the next) of a polynomial matrix."""
    A = [[norm(Fraction(c) for c in e) for e in row] for row in M]
    rows, cols = len(A), len(A[0]) if A else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        nz = [(deg(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            changed = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    q, r = divmod_poly(A[i][t], A[t][t])
                    A[i] = [add(A[i][c], scale(mul(q, A[t][c]), -1)) for c in range(cols)]
                    if r:
                        A[t], A[i] = A[i], A[t]
                        changed = True
            for j in range(t + 1, cols):
                if A[t][j]:
                    q, r = divmod_poly(A[t][j], A[t][t])
                    for row in A:
                        row[j] = add(row[j], scale(mul(q, row[t]), -1))
                    if r:
                        for row in A:
                            row[t], row[j] = row[j], row[t]
                        changed = True
            if changed:
                continue
            # pivot must divide the rest of the trailing block
            bad = [(i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                   if A[i][j] and divmod_poly(A[i][j], A[t][t])[1]]
            if bad:
                i, _ = bad[0]
                A[t] = [add(A[t][c], A[i][c]) for c in range(cols)]
                continue
            break
        p = A[t][t]
        diag.append(scale(p, 1 / p[-1]))
        t += 1
    return diag


def local_exponents_at_zero(M):
    """Exponents of x in the invariant factors, i.e. the local Smith form at 0 (zeros included)."""
    return sorted(ord0(p) for p in smith_diagonal(M))


# ------------------------------------------------- exhaustive 2x2 family

COEFFS = np.array(list(product((-1, 0, 1), repeat=3)))  # entry polynomials c0 + c1 x + c2 x^2


def _codes(E):
    """Base-3 code of an (N, 2, 2, 3) array of coefficients in {-1, 0, 1}."""
    flat = (E + 1).reshape(E.shape[0], 12)
    return flat @ (3 ** np.arange(12))


def _transforms(E):
    """Images of E under row/column swaps, transpose, row/column sign flips and x -> -x."""
    xflip = np.array([1, -1, 1])
    for t in (False, True):
        F = E.transpose(0, 2, 1, 3) if t else E
        for rs in (False, True):
            G = F[:, ::-1] if rs else F
            for cs in (False, True):
                H = G[:, :, ::-1] if cs else G
                for s in product((1, -1), repeat=3):
                    signs = np.array([[1, s[0]], [s[1], s[0] * s[1]]]) * s[2]
                    K = H * signs[None, :, :, None]
                    yield K
                    yield K * xflip


@lru_cache(maxsize=1)
def exhaustive_family():
    """Orbit representatives of all 2x2 matrices with entries of degree <= 2 and coefficients in {-1,0,1}.

    Returns an integer array of shape (N, 2, 2, 3): entry (i, j) has
    coefficients ``[c0, c1, c2]``.
    """
    idx = np.stack(np.unravel_index(np.arange(27 ** 4), (27,) * 4), axis=1)
    E = COEFFS[idx].reshape(-1, 2, 2, 3)
    canon = None
    for K in _transforms(E):
        c = _codes(K)
        canon = c if canon is None else np.minimum(canon, c)
    _, first = np.unique(canon, return_index=True)
    out = E[np.sort(first)]
    out.flags.writeable = False
    return out


def as_coeff_matrices(E):
    """(2, 2, 3) integer array -> list of three 2x2 coefficient matrices."""
    return [E[:, :, k].astype(float) for k in range(E.shape[2])]
