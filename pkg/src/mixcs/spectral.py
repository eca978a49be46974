"""Extreme singular values / eigenvalues and the asymptotic edge laws.

The rectangular law: extreme singular values of a scaled iid n×p matrix
approach sqrt(v)·(1 ∓ sqrt(p/n)). The symmetric law: the largest eigenvalue
of a scaled symmetric mixed matrix approaches 2σ, independent of the
diagonal law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import DistributionSpec, MixedGraphModel, sample_iid_matrix, sample_mixed_adjacency
from .errors import ValidationError
from .matrixio import fmt_float

_SYM_TOL = 1e-12
# Gram route beats bidiagonalization once the matrix is this lopsided
_GRAM_ASPECT = 4.0


@dataclass(frozen=True)
class SpectralEdgeReport:
    """Observed vs predicted spectral edges for one sampled matrix.

    y is the aspect ratio p/n for the rectangular check and 1.0 for the
    square symmetric check. abs_deviation is the largest |observed −
    predicted| over the edges the law constrains (both edges for the
    rectangular law, the max edge for the symmetric law).
    """

    n: int
    y: float
    observed_min: float
    observed_max: float
    predicted_min: float
    predicted_max: float
    abs_deviation: float

    def csv_line(self) -> str:
        return ",".join(
            [str(self.n)]
            + [fmt_float(v) for v in (
                self.y, self.observed_min, self.observed_max,
                self.predicted_min, self.predicted_max, self.abs_deviation,
            )]
        )


CSV_HEADER = "n,y,observed_min,observed_max,predicted_min,predicted_max,abs_deviation"


def _as_2d(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ValidationError("expected a nonempty 2-D matrix")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    return M


def extreme_singular_values(M) -> tuple[float, float]:
    """(sigma_min, sigma_max) of the matrix as given.

    Uses the Gram route (eigenvalues of the smaller-side Gram matrix) for
    strongly rectangular inputs, full bidiagonalized SVD otherwise.
    """
    M = _as_2d(M)
    n, p = M.shape
    if max(n, p) >= _GRAM_ASPECT * min(n, p):
        G = M.T @ M if p <= n else M @ M.T
        w = np.linalg.eigvalsh(G)
        s = np.sqrt(np.clip(w, 0.0, None))
        return float(s[0]), float(s[-1])
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[-1]), float(s[0])


def extreme_eigenvalues_symmetric(M) -> tuple[float, float]:
    """(lambda_min, lambda_max) of a symmetric matrix.

    Inputs asymmetric beyond 1e-12 entrywise are rejected, not symmetrized:
    silent symmetrization would hide generator bugs.
    """
    M = _as_2d(M)
    if M.shape[0] != M.shape[1]:
        raise ValidationError(f"matrix must be square, got {M.shape}")
    gap = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if gap > _SYM_TOL:
        raise ValidationError(f"matrix asymmetric: max |M - M^T| = {gap:.3e} > {_SYM_TOL}")
    w = np.linalg.eigvalsh(M)
    return float(w[0]), float(w[-1])


def bai_yin_check(spec: DistributionSpec, n: int, y: float, seed: int) -> SpectralEdgeReport:
    """Sample an n×p iid matrix (p = round(y·n)), scale by n^{-1/2}, and
    compare its extreme singular values with sqrt(v)·(1 ∓ sqrt(y))."""
    if spec.declared_mean != 0.0:
        raise ValidationError("law must have declared mean 0")
    if spec.declared_fourth_moment is None:
        raise ValidationError("law needs a declared finite fourth moment")
    if not 0.0 < y < 1.0:
        raise ValidationError(f"aspect y must lie in (0,1), got {y}")
    p = int(round(y * n))
    if p < 2:
        raise ValidationError(f"round(y*n) = {p} < 2; increase n or y")
    A = sample_iid_matrix(spec, n, p, seed)
    smin, smax = extreme_singular_values(A.entries / math.sqrt(n))
    sd = math.sqrt(spec.declared_variance)
    pred_min = sd * (1.0 - math.sqrt(y))
    pred_max = sd * (1.0 + math.sqrt(y))
    dev = max(abs(smin - pred_min), abs(smax - pred_max))
    return SpectralEdgeReport(n, y, smin, smax, pred_min, pred_max, dev)


def semicircle_edge_check(model: MixedGraphModel, n: int, seed: int) -> SpectralEdgeReport:
    """Sample the n×n symmetric mixed matrix, scale by n^{-1/2}, and compare
    lambda_max with 2σ (σ² = off-diagonal variance). The diagonal law does
    not enter the limit."""
    sized = MixedGraphModel(n, model.diag_law, model.offdiag_law)
    A = sample_mixed_adjacency(sized, seed)
    lmin, lmax = extreme_eigenvalues_symmetric(A / math.sqrt(n))
    edge = 2.0 * sized.sigma
    dev = abs(lmax - edge)
    return SpectralEdgeReport(n, 1.0, lmin, lmax, -edge, edge, dev)
