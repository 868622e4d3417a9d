"""Self-contained dense two-phase simplex for the covering LPs.

Solves   min c.x   s.t.  A_ub x <= b_ub,  x >= 0.

Greater-or-equal covering rows are passed negated by the caller.  Bland's
rule guarantees termination; a small tolerance absorbs float noise.  The
cover LPs this backs are tiny after restriction to edges that appear in at
least one constraint, so a dense tableau is adequate.
"""

from __future__ import annotations

import numpy as np

_TOL = 1e-9


class LPError(Exception):
    pass


class LPInfeasibleError(LPError):
    pass


class LPUnboundedError(LPError):
    pass


def solve_lp(c: np.ndarray, a_ub: np.ndarray, b_ub: np.ndarray) -> tuple[np.ndarray, float]:
    """Return (x, objective) minimizing c.x subject to A_ub x <= b_ub, x >= 0."""
    c = np.asarray(c, dtype=float)
    a_ub = np.asarray(a_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    m, n = a_ub.shape
    if c.shape != (n,) or b_ub.shape != (m,):
        raise LPError("inconsistent LP dimensions")
    if m == 0:
        if np.any(c < -_TOL):
            raise LPUnboundedError("no constraints and a negative cost")
        return np.zeros(n), 0.0

    # standard form: A x + I s = b with b >= 0 (negate rows as needed; their
    # slack then enters with coefficient -1 and needs an artificial)
    A = np.hstack([a_ub, np.eye(m)])
    b = b_ub.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    total = n + m
    basis = np.empty(m, dtype=int)
    art_cols = []
    for i in range(m):
        if neg[i]:
            art_cols.append(i)
        else:
            basis[i] = n + i
    if art_cols:
        Aa = np.zeros((m, len(art_cols)))
        for j, i in enumerate(art_cols):
            Aa[i, j] = 1.0
            basis[i] = total + j
        A = np.hstack([A, Aa])
        # phase 1: minimize the artificial sum
        c1 = np.zeros(A.shape[1])
        c1[total:] = 1.0
        A, b, basis, obj1 = _simplex(A, b, c1, basis)
        if obj1 > 1e-7:
            raise LPInfeasibleError(f"phase-1 objective {obj1:.3g} > 0")
        # drive any leftover artificial out of the basis, then drop the columns
        for i in range(m):
            if basis[i] >= total:
                row = A[i]
                pivot = next((j for j in range(total) if abs(row[j]) > _TOL), None)
                if pivot is None:
                    continue  # redundant row; artificial stays at zero level
                _pivot(A, b, i, pivot)
                basis[i] = pivot
        keep = [i for i in range(m) if basis[i] < total]
        A = A[keep][:, :total]
        b = b[keep]
        basis = basis[keep]

    c2 = np.zeros(A.shape[1])
    c2[:n] = c
    A, b, basis, obj = _simplex(A, b, c2, basis)
    x = np.zeros(A.shape[1])
    x[basis] = b
    return x[:n], float(obj)


def _pivot(A: np.ndarray, b: np.ndarray, row: int, col: int) -> None:
    piv = A[row, col]
    A[row] /= piv
    b[row] /= piv
    for i in range(A.shape[0]):
        if i != row and abs(A[i, col]) > 0:
            factor = A[i, col]
            A[i] -= factor * A[row]
            b[i] -= factor * b[row]
    np.maximum(b, 0.0, out=b)


def _simplex(A, b, c, basis):
    """Primal simplex from a feasible basis, Bland's anti-cycling rule."""
    A = A.copy()
    b = b.copy()
    basis = basis.copy()
    m = A.shape[0]
    # reduce so basic columns form an identity
    for i in range(m):
        if abs(A[i, basis[i]] - 1.0) > _TOL or np.any(
            np.abs(np.delete(A[:, basis[i]], i)) > _TOL
        ):
            _pivot(A, b, i, basis[i])
    while True:
        y = c[basis] @ A
        reduced = c - y
        entering = next((j for j in range(A.shape[1]) if reduced[j] < -_TOL), None)
        if entering is None:
            break
        col = A[:, entering]
        candidates = [(b[i] / col[i], basis[i], i) for i in range(m) if col[i] > _TOL]
        if not candidates:
            raise LPUnboundedError("unbounded direction in simplex")
        min_ratio = min(r for r, _, _ in candidates)
        # Bland: among minimum-ratio rows, leave the smallest basis index
        leave = min((bi, i) for r, bi, i in candidates if r <= min_ratio + _TOL)[1]
        _pivot(A, b, leave, entering)
        basis[leave] = entering
    return A, b, basis, float(c[basis] @ b)
