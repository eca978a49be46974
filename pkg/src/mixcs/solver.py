"""ℓ1 recovery: basis pursuit, its noisy variant, an exact LP oracle, and
dual optimality certificates.

Basis pursuit (min ‖x‖₁ s.t. Φx = y) is solved by alternating-direction
splitting: the equality constraint is handled by projection onto the affine
set {x : Φx = y} through a cached Cholesky factorization of ΦΦᵀ, the ℓ1
term by soft thresholding; penalty parameter 1.0. The noisy variant keeps
an auxiliary range variable confined to the ε-ball around y and updates x
by a linearized prox-gradient step of size 0.9/‖Φ‖₂².
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .ensembles import MeasurementMatrix
from .errors import RankDeficientError, ValidationError
from . import simplex

SIGMA_MIN_THRESHOLD = 1e-10
LP_MAX_COLS = 64
LP_MAX_ROWS = 48


@dataclass
class RecoveryResult:
    x_star: np.ndarray
    objective: float          # ℓ1 norm of x_star
    residual: float           # ‖Φ x_star − y‖₂
    iterations: int
    status: str               # converged | max-iter | infeasible
    certificate_gap: float | None = None


def _entries(phi) -> np.ndarray:
    if isinstance(phi, MeasurementMatrix):
        return phi.entries
    A = np.asarray(phi, dtype=float)
    if A.ndim != 2:
        raise ValidationError("measurement matrix must be 2-D")
    return A


def _check_vector(y, n) -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if y.shape != (n,):
        raise ValidationError(f"y must have length {n}, got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValidationError("y has non-finite entries")
    return y


def _soft(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def _gram_rows(A):
    """(K, cho) with K = Φ Φᵀ Cholesky-factored, after the sigma_min guard.

    Exact lambda_min via eigvalsh for small row counts; for large ones the
    estimate comes from inverse-power iteration on the factorization (the
    rank guard only needs the order of magnitude).
    """
    n = A.shape[0]
    K = A @ A.T
    if n <= 512:
        w = np.linalg.eigvalsh(K)
        smin = math.sqrt(max(float(w[0]), 0.0))
        if smin < SIGMA_MIN_THRESHOLD:
            raise RankDeficientError(
                f"sigma_min(phi) = {smin:.3e} < {SIGMA_MIN_THRESHOLD}; "
                "affine projection unreliable (rank-deficient rows)"
            )
        return K, cho_factor(K)
    try:
        cho = cho_factor(K)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise RankDeficientError(f"Cholesky of phi*phi^T failed: {exc}") from exc
    v = np.full(n, 1.0 / math.sqrt(n))
    lam = None
    for _ in range(50):
        w = cho_solve(cho, v)
        nw = float(np.linalg.norm(w))
        v = w / nw
        lam = float(v @ (K @ v))
    smin = math.sqrt(max(lam, 0.0))
    if smin < SIGMA_MIN_THRESHOLD:
        raise RankDeficientError(
            f"sigma_min(phi) ~ {smin:.3e} < {SIGMA_MIN_THRESHOLD}; "
            "affine projection unreliable (rank-deficient rows)"
        )
    return K, cho


def basis_pursuit(phi, y, tol: float = 1e-6, max_iter: int = 10000) -> RecoveryResult:
    """min ‖x‖₁ subject to Φx = y.

    Returns the affine-feasible iterate, so the equality residual is at
    rounding level whenever the run converged. Stops when primal and dual
    residuals both fall below tol·sqrt(N).
    """
    A = _entries(phi)
    n, N = A.shape
    if n > N:
        raise ValidationError(f"basis pursuit needs n <= N, got ({n}, {N})")
    y = _check_vector(y, n)
    if not tol > 0.0:
        raise ValidationError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter}")
    _, cho = _gram_rows(A)
    # affine projection w ↦ w − Φᵀ K⁻¹ (Φw − y) with QT = (K⁻¹Φ)ᵀ cached
    QT = np.ascontiguousarray(cho_solve(cho, A).T)
    py = QT @ y

    stop2 = (tol * math.sqrt(N)) ** 2
    z = np.zeros(N)
    u = np.zeros(N)
    x = np.zeros(N)
    status = "max-iter"
    it = 0
    for it in range(1, max_iter + 1):
        w = z - u
        x = w - QT @ (A @ w) + py
        v = x + u
        z_new = _soft(v, 1.0)
        r = x - z_new
        s = z_new - z
        z = z_new
        u = v - z_new
        if float(r @ r) <= stop2 and float(s @ s) <= stop2:
            status = "converged"
            break
    residual = float(np.linalg.norm(A @ x - y))
    return RecoveryResult(x, float(np.abs(x).sum()), residual, it, status)


def bpdn(phi, y, eps: float, tol: float = 1e-6, max_iter: int = 10000) -> RecoveryResult:
    """min ‖x‖₁ subject to ‖y − Φx‖₂ ≤ ε. ε = 0 collapses to basis pursuit."""
    A = _entries(phi)
    n, N = A.shape
    if eps < 0.0:
        raise ValidationError(f"eps must be nonnegative, got {eps}")
    if eps == 0.0:
        return basis_pursuit(phi, y, tol=tol, max_iter=max_iter)
    if n > N:
        raise ValidationError(f"bpdn needs n <= N, got ({n}, {N})")
    y = _check_vector(y, n)
    if not tol > 0.0:
        raise ValidationError(f"tol must be positive, got {tol}")
    ynorm = float(np.linalg.norm(y))
    if eps >= ynorm:
        # the origin is feasible and has minimal ℓ1 norm
        return RecoveryResult(np.zeros(N), 0.0, ynorm, 0, "converged")
    K, _ = _gram_rows(A)
    lmax = float(np.linalg.eigvalsh(K)[-1])
    mu = 0.9 / lmax

    stop = tol * math.sqrt(N)
    x = np.zeros(N)
    r = y.copy()
    u = np.zeros(n)
    status = "max-iter"
    it = 0
    for it in range(1, max_iter + 1):
        grad = A.T @ (A @ x - r + u)
        x = _soft(x - mu * grad, mu)
        Ax = A @ x
        v = Ax + u
        dev = v - y
        dn = float(np.linalg.norm(dev))
        r_new = y + dev * (eps / dn) if dn > eps else v.copy()
        s_norm = float(np.linalg.norm(A.T @ (r_new - r)))
        r = r_new
        u = v - r_new
        prim = float(np.linalg.norm(Ax - r_new))
        if prim <= stop and s_norm <= stop:
            data_res = float(np.linalg.norm(Ax - y))
            if data_res <= eps + tol:
                status = "converged"
                break
    residual = float(np.linalg.norm(A @ x - y))
    return RecoveryResult(x, float(np.abs(x).sum()), residual, it, status)


def lp_oracle(phi, y) -> RecoveryResult:
    """Exact basis-pursuit reference via the split x = u − v, u, v ≥ 0,
    solved by the dense simplex. Desk-scale only."""
    A = _entries(phi)
    n, N = A.shape
    if N > LP_MAX_COLS or n > LP_MAX_ROWS:
        raise ValidationError(
            f"lp_oracle guard: need N <= {LP_MAX_COLS} and n <= {LP_MAX_ROWS}, "
            f"got ({n}, {N})"
        )
    y = _check_vector(y, n)
    A_lp = np.hstack([A, -A])
    c = np.ones(2 * N)
    res = simplex.solve_lp(A_lp, y, c)
    if res.status != "optimal":
        return RecoveryResult(np.zeros(N), 0.0, float(np.linalg.norm(y)),
                              res.pivots, "infeasible")
    x = res.x[:N] - res.x[N:]
    residual = float(np.linalg.norm(A @ x - y))
    return RecoveryResult(x, float(np.abs(x).sum()), residual, res.pivots, "converged")


@dataclass(frozen=True)
class CertificateReport:
    valid: bool
    certificate_gap: float


def dual_certificate_check(phi, x_star, tol: float = 1e-6) -> CertificateReport:
    """First-order optimality check for basis pursuit.

    Fits ν by least squares to the support sign equations Φ_Sᵀν = sign(x_S)
    and accepts when the fit is exact to tol and ‖Φᵀν‖∞ ≤ 1 + tol. A failed
    search is inconclusive, not a proof of suboptimality.
    """
    A = _entries(phi)
    x = np.asarray(x_star, dtype=float).ravel()
    if x.shape != (A.shape[1],):
        raise ValidationError(f"x_star must have length {A.shape[1]}, got {x.shape}")
    support = np.abs(x) > tol
    if not support.any():
        return CertificateReport(True, 0.0)
    signs = np.sign(x[support])
    nu, *_ = np.linalg.lstsq(A[:, support].T, signs, rcond=None)
    corr = A.T @ nu
    fit_err = float(np.max(np.abs(corr[support] - signs)))
    inf_norm = float(np.max(np.abs(corr)))
    valid = fit_err <= tol and inf_norm <= 1.0 + tol
    return CertificateReport(valid, max(0.0, inf_norm - 1.0))
