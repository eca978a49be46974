"""Dense two-phase revised simplex with Bland's rule.

Solves min c^T x subject to A x = b, x >= 0 at desk scale. Bland's rule
(smallest eligible index enters; ratio ties leave by smallest basic index)
makes every pivot deterministic and prevents cycling.
"""

from __future__ import annotations

import numpy as np

from .errors import UnboundedProblemError, ValidationError

_RC_TOL = 1e-9
_PIV_TOL = 1e-9
_FEAS_TOL = 1e-8


class SimplexResult:
    __slots__ = ("status", "x", "objective", "pivots")

    def __init__(self, status, x, objective, pivots):
        self.status = status          # "optimal" | "infeasible"
        self.x = x
        self.objective = objective
        self.pivots = pivots


def _pivot_loop(A, b, c, basis, allowed, max_pivots):
    """Pivot until no eligible entering column remains; returns (x_basic, pivots)."""
    pivots = 0
    in_basis = np.zeros(A.shape[1], dtype=bool)
    in_basis[basis] = True
    while True:
        B = A[:, basis]
        xB = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, c[basis])
        rc = c - A.T @ y
        eligible = np.where(allowed & ~in_basis & (rc < -_RC_TOL))[0]
        if eligible.size == 0:
            return xB, pivots
        entering = int(eligible[0])            # Bland: smallest index enters
        d = np.linalg.solve(B, A[:, entering])
        cand = np.where(d > _PIV_TOL)[0]
        if cand.size == 0:
            raise UnboundedProblemError("objective unbounded below")
        ratios = xB[cand] / d[cand]
        rmin = ratios.min()
        ties = cand[ratios <= rmin + _PIV_TOL]
        leave_pos = int(ties[np.argmin([basis[i] for i in ties])])
        in_basis[basis[leave_pos]] = False
        in_basis[entering] = True
        basis[leave_pos] = entering
        pivots += 1
        if pivots > max_pivots:
            raise ValidationError(f"simplex exceeded {max_pivots} pivots")


def solve_lp(A, b, c, max_pivots: int = 20000) -> SimplexResult:
    """Two-phase simplex for min c^T x s.t. A x = b, x >= 0."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    if A.ndim != 2:
        raise ValidationError("A must be 2-D")
    m, nv = A.shape
    if b.shape != (m,) or c.shape != (nv,):
        raise ValidationError("b/c dimensions do not match A")

    # make b nonnegative so the artificial basis is feasible
    neg = b < 0
    A[neg, :] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial identity columns, minimize their sum
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(nv), np.ones(m)])
    basis = list(range(nv, nv + m))
    allowed = np.ones(nv + m, dtype=bool)
    xB, piv1 = _pivot_loop(A1, b, c1, basis, allowed, max_pivots)
    if float(c1[basis] @ xB) > _FEAS_TOL:
        return SimplexResult("infeasible", np.zeros(nv), 0.0, piv1)

    # drive artificials (basic at ~0 now) out of the basis, dropping any
    # redundant rows where no original column can replace them
    for pos in range(m - 1, -1, -1):
        if basis[pos] < nv:
            continue
        e_pos = np.zeros(len(basis))
        e_pos[pos] = 1.0
        binv_row = np.linalg.solve(A1[:, basis].T, e_pos)
        replaced = False
        for j in range(nv):
            if j in basis:
                continue
            if abs(binv_row @ A1[:, j]) > _PIV_TOL:
                basis[pos] = j
                replaced = True
                break
        if not replaced:
            A1 = np.delete(A1, pos, axis=0)
            b = np.delete(b, pos)
            del basis[pos]

    # phase 2 on original columns only
    allowed = np.zeros(A1.shape[1], dtype=bool)
    allowed[:nv] = True
    c2 = np.concatenate([c, np.zeros(A1.shape[1] - nv)])
    xB, piv2 = _pivot_loop(A1, b, c2, basis, allowed, max_pivots)
    x_full = np.zeros(A1.shape[1])
    x_full[basis] = xB
    x = np.maximum(x_full[:nv], 0.0)
    return SimplexResult("optimal", x, float(c @ x), piv1 + piv2)
