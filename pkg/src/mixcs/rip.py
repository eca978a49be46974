"""Restricted-isometry constants and the sigma-squared admissibility intervals.

delta_k is the max deviation of k-column Gram eigenvalues from 1, taken
exactly over all supports (exhaustive) or over sampled supports (Monte
Carlo, a lower bound). The sigma intervals are the closed-form admissible
ranges for the off-diagonal variance under the three support placements
(inside the selected rows, disjoint from them, or straddling the boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .ensembles import MeasurementMatrix, MixedGraphModel, sample_mixed_adjacency
from .errors import ExhaustiveGuardError, SingularIntervalError, ValidationError
from .matrixio import fmt_float
from .rng import substream

EXHAUSTIVE_GUARD = 2_000_000

CASES = ("diag-inside", "off-diag", "mixed-boundary")

RIP_CSV_HEADER = "k,delta,method,trials,gram_min,gram_max,witness"


@dataclass(frozen=True)
class RipEstimate:
    """delta = max(gram_max − 1, 1 − gram_min) over the examined supports.

    Exhaustive enumeration gives the true delta_k; Monte Carlo gives a lower
    bound. witness_support is the (0-based) support attaining the extreme
    deviation, first-found in enumeration/sampling order.
    """

    k: int
    delta: float
    method: str
    trials: int
    witness_support: tuple[int, ...]
    gram_min: float
    gram_max: float
    seed: int | None = None

    def csv_line(self) -> str:
        witness = ";".join(str(i) for i in self.witness_support)
        return ",".join([
            str(self.k), fmt_float(self.delta), self.method, str(self.trials),
            fmt_float(self.gram_min), fmt_float(self.gram_max), witness,
        ])


def _entries(phi) -> np.ndarray:
    if isinstance(phi, MeasurementMatrix):
        return phi.entries
    return np.asarray(phi, dtype=float)


def _scan_supports(G: np.ndarray, supports) -> tuple[float, float, float, tuple[int, ...], int]:
    gram_min = math.inf
    gram_max = -math.inf
    best_dev = -math.inf
    witness: tuple[int, ...] = ()
    count = 0
    for S in supports:
        sub = G[np.ix_(S, S)]
        w = np.linalg.eigvalsh(sub)
        lo = float(w[0])
        hi = float(w[-1])
        gram_min = min(gram_min, lo)
        gram_max = max(gram_max, hi)
        dev = max(hi - 1.0, 1.0 - lo)
        if dev > best_dev:
            best_dev = dev
            witness = tuple(int(i) for i in S)
        count += 1
    return best_dev, gram_min, gram_max, witness, count


def delta_exhaustive(phi, k: int) -> RipEstimate:
    """Exact delta_k by enumerating all k-subsets in lexicographic order."""
    A = _entries(phi)
    n, N = A.shape
    if not 1 <= k <= n:
        raise ValidationError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k > N:
        raise ValidationError(f"k={k} exceeds column count N={N}")
    total = math.comb(N, k)
    if total > EXHAUSTIVE_GUARD:
        raise ExhaustiveGuardError(
            f"C({N},{k}) = {total} supports is too large for exhaustive "
            f"enumeration (guard {EXHAUSTIVE_GUARD}); use delta_monte_carlo"
        )
    G = A.T @ A
    dev, gmin, gmax, witness, count = _scan_supports(G, combinations(range(N), k))
    return RipEstimate(k, max(dev, 0.0), "exhaustive", count, witness,
                       max(gmin, 0.0), gmax)


def delta_monte_carlo(phi, k: int, trials: int, seed: int) -> RipEstimate:
    """Lower bound on delta_k from uniformly sampled supports.

    Supports are drawn sequentially from one derived stream, so a run with
    more trials examines a superset of the supports of a shorter run with
    the same seed (the estimate is monotone in trials).
    """
    A = _entries(phi)
    n, N = A.shape
    if not 1 <= k <= min(n, N):
        raise ValidationError(f"need 1 <= k <= min(n, N), got k={k}, shape ({n}, {N})")
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    rng = substream(seed, "rip-supports")
    G = A.T @ A
    supports = (np.sort(rng.choice(N, size=k, replace=False)) for _ in range(trials))
    dev, gmin, gmax, witness, count = _scan_supports(G, supports)
    return RipEstimate(k, max(dev, 0.0), "monte-carlo", count, witness,
                       max(gmin, 0.0), gmax, seed=seed)


@dataclass(frozen=True)
class SigmaInterval:
    gamma: float
    delta: float
    case: str
    lo: float
    hi: float
    feasible: bool


def _interval_bounds(gamma: float, delta: float, case: str) -> tuple[float, float]:
    r = math.sqrt(gamma * (1.0 - gamma))
    if case == "diag-inside":
        lo_den = 1.0 - 2.0 * r
        hi_den = 1.0 + 4.0 * gamma + 2.0 * r
    elif case == "off-diag":
        lo_den = (1.0 - math.sqrt(gamma)) ** 2
        hi_den = (1.0 + math.sqrt(gamma)) ** 2
    elif case == "mixed-boundary":
        lo_den = (1.0 - math.sqrt(gamma / (1.0 - gamma))) ** 2
        hi_den = 1.0 + 7.0 * gamma + 2.0 * math.sqrt(gamma)
    else:
        raise ValidationError(f"unknown case {case!r}; expected one of {CASES}")
    if lo_den <= 0.0:
        raise SingularIntervalError(
            f"{case}: lower-bound denominator {lo_den!r} <= 0 at gamma={gamma}"
        )
    if hi_den <= 0.0:
        raise SingularIntervalError(
            f"{case}: upper-bound denominator {hi_den!r} <= 0 at gamma={gamma}"
        )
    return (1.0 - delta) / lo_den, (1.0 + delta) / hi_den


def sigma_interval(gamma: float, delta: float, case: str) -> SigmaInterval:
    """Admissible [lo, hi] for sigma² under the given support-placement case."""
    if not 0.0 <= gamma < 1.0:
        raise ValidationError(f"gamma must lie in [0,1), got {gamma}")
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta must lie in (0,1), got {delta}")
    lo, hi = _interval_bounds(gamma, delta, case)
    return SigmaInterval(gamma, delta, case, lo, hi, lo <= hi)


@dataclass(frozen=True)
class SigmaFeasibility:
    intervals: dict       # case -> SigmaInterval
    errors: dict          # case -> str (degenerate bounds)
    intersection: tuple[float, float] | None
    feasible: bool


def sigma_feasible_all_cases(gamma: float, delta: float) -> SigmaFeasibility:
    """Intersect the three case intervals; feasible iff every case admits a
    common sigma². Degenerate cases are reported per case, not raised."""
    intervals: dict[str, SigmaInterval] = {}
    errors: dict[str, str] = {}
    for case in CASES:
        try:
            intervals[case] = sigma_interval(gamma, delta, case)
        except SingularIntervalError as exc:
            errors[case] = str(exc)
    if errors:
        return SigmaFeasibility(intervals, errors, None, False)
    lo = max(iv.lo for iv in intervals.values())
    hi = min(iv.hi for iv in intervals.values())
    return SigmaFeasibility(intervals, errors, (lo, hi), lo <= hi)


def recovery_condition(delta_2k: float) -> bool:
    """True iff delta_{2k} < sqrt(2) − 1, the sparse-recovery sufficient condition."""
    if delta_2k < 0.0:
        raise ValidationError(f"delta_2k must be nonnegative, got {delta_2k}")
    return delta_2k < math.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class GramAsymptoteReport:
    case: str
    n: int
    k: int
    gamma: float
    sigma_sq: float
    observed_min: float
    observed_max: float
    predicted_min: float
    predicted_max: float


def gram_asymptote_check(model: MixedGraphModel, n: int, gamma: float, case: str,
                         seed: int) -> GramAsymptoteReport:
    """Place a support of the requested type on Φ built from the model and
    compare the Gram extremes with the proof-limit expressions.

    diag-inside: S inside the selected rows, limits (1 − 2√(γ(1−γ)))σ² and
    (1 + 4γ + 2√(γ(1−γ)))σ². off-diag: S disjoint from the selected rows,
    limits (1 ∓ √γ)²σ².
    """
    if case not in ("diag-inside", "off-diag"):
        raise ValidationError(f"case must be diag-inside or off-diag, got {case!r}")
    if not 0.0 <= gamma < 1.0:
        raise ValidationError(f"gamma must lie in [0,1), got {gamma}")
    k = int(round(gamma * n))
    if k < 1:
        raise ValidationError(f"round(gamma*n) = {k} < 1; increase gamma or n")
    N = model.N
    if n > N:
        raise ValidationError(f"need n <= N, got n={n}, N={N}")
    if case == "diag-inside":
        if k > n:
            raise ValidationError(f"diag-inside needs k <= n, got k={k}, n={n}")
        support = np.arange(k)
    else:
        if n + k > N:
            raise ValidationError(
                f"off-diag support does not fit: n + k = {n + k} > N = {N}"
            )
        support = np.arange(n, n + k)
    parent = sample_mixed_adjacency(model, seed)
    phi = parent[:n, :] / math.sqrt(n)
    sub = phi[:, support]
    w = np.linalg.eigvalsh(sub.T @ sub)
    s2 = model.offdiag_law.declared_variance
    r = math.sqrt(gamma * (1.0 - gamma))
    if case == "diag-inside":
        pred_lo = (1.0 - 2.0 * r) * s2
        pred_hi = (1.0 + 4.0 * gamma + 2.0 * r) * s2
    else:
        pred_lo = (1.0 - math.sqrt(gamma)) ** 2 * s2
        pred_hi = (1.0 + math.sqrt(gamma)) ** 2 * s2
    return GramAsymptoteReport(case, n, k, gamma, s2, float(w[0]), float(w[-1]),
                               pred_lo, pred_hi)
