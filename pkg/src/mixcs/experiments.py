"""Recovery experiments: sparse-signal trials, success curves over sparsity
and measurement count, and grayscale image reconstruction.

Each trial draws a fresh matrix and a fresh signal from seeds derived as
(master_seed, purpose_tag, trial_index), so sweeps are reproducible and
independent of worker scheduling. Success means the relative ℓ2 recovery
error stays at or below the configured threshold (default 1e-4).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensembles import (
    DistributionSpec,
    MeasurementMatrix,
    MixedGraphModel,
    mixed_measurement,
    sample_iid_matrix,
)
from .errors import MixcsError, ValidationError
from .rng import derive_seed, substream
from .solver import RecoveryResult, bpdn

DEFAULT_THRESHOLD = 1e-4
DEFAULT_SOLVER_TOL = 1e-6
DEFAULT_SOLVER_MAX_ITER = 3000

ENSEMBLES = ("gaussian", "bernoulli", "s-mixed")

_IID_LAWS = {
    "gaussian": DistributionSpec.gaussian_unit,
    "bernoulli": DistributionSpec.bernoulli_sym,
    "three-point": DistributionSpec.three_point,
}


def default_mixed_model(N: int) -> MixedGraphModel:
    """The experiments' mixed ensemble: Gaussian diagonal, Bernoulli off-diagonal."""
    return MixedGraphModel(N, DistributionSpec.gaussian_unit(),
                           DistributionSpec.bernoulli_sym())


def build_measurement(ensemble: str, n: int, N: int, seed: int) -> MeasurementMatrix:
    """n×N measurement matrix, already scaled by n^{-1/2}."""
    if ensemble == "s-mixed":
        return mixed_measurement(default_mixed_model(N), n, seed)
    if ensemble not in _IID_LAWS:
        raise ValidationError(
            f"unknown ensemble {ensemble!r}; expected one of "
            f"{sorted(_IID_LAWS) + ['s-mixed']}"
        )
    raw = sample_iid_matrix(_IID_LAWS[ensemble](), n, N, seed)
    scaling = 1.0 / math.sqrt(n)
    prov = dict(raw.provenance)
    return MeasurementMatrix(raw.entries * scaling, scaling=scaling, provenance=prov)


@dataclass(frozen=True)
class SparseSignal:
    N: int
    support: tuple[int, ...]
    values: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.support)

    def dense(self) -> np.ndarray:
        x = np.zeros(self.N)
        x[list(self.support)] = self.values
        return x


def gen_sparse_signal(N: int, k: int, seed: int) -> SparseSignal:
    """Uniform k-subset support with independent ±1 values."""
    if not 0 <= k <= N:
        raise ValidationError(f"need 0 <= k <= N, got k={k}, N={N}")
    rng = substream(seed, "sparse-signal")
    if k == 0:
        return SparseSignal(N, (), ())
    support = np.sort(rng.choice(N, size=k, replace=False))
    values = np.where(rng.random(k) < 0.5, -1.0, 1.0)
    return SparseSignal(N, tuple(int(i) for i in support),
                        tuple(float(v) for v in values))


def best_k_term(x, k: int) -> np.ndarray:
    """Keep the k largest-magnitude entries, zero the rest."""
    x = np.asarray(x, dtype=float)
    if k >= x.size:
        return x.copy()
    out = np.zeros_like(x)
    if k > 0:
        idx = np.argsort(-np.abs(x), kind="stable")[:k]
        out[idx] = x[idx]
    return out


@dataclass(frozen=True)
class TrialOutcome:
    ensemble: str
    n: int
    N: int
    k: int
    seed: int
    rel_error: float
    success: bool
    solve_iterations: int
    status: str


def run_trial(ensemble: str, n: int, N: int, k: int, seed: int,
              threshold: float = DEFAULT_THRESHOLD, eps: float = 0.0,
              solver_tol: float = DEFAULT_SOLVER_TOL,
              solver_max_iter: int = DEFAULT_SOLVER_MAX_ITER) -> TrialOutcome:
    """One fresh-matrix fresh-signal recovery trial."""
    if n > N:
        raise ValidationError(f"need n <= N, got n={n}, N={N}")
    phi = build_measurement(ensemble, n, N, derive_seed(seed, "trial-matrix"))
    x0 = gen_sparse_signal(N, k, derive_seed(seed, "trial-signal")).dense()
    y = phi.entries @ x0
    try:
        res = bpdn(phi, y, eps, tol=solver_tol, max_iter=solver_max_iter)
    except MixcsError as exc:
        return TrialOutcome(ensemble, n, N, k, seed, math.inf, False, 0,
                            f"error:{type(exc).__name__}")
    x0_norm = float(np.linalg.norm(x0))
    err = float(np.linalg.norm(res.x_star - x0))
    if x0_norm > 0.0:
        rel = err / x0_norm
    else:
        rel = 0.0 if err <= threshold else math.inf
    return TrialOutcome(ensemble, n, N, k, seed, rel, rel <= threshold,
                        res.iterations, res.status)


@dataclass(frozen=True)
class SuccessPoint:
    param: int
    trials: int
    successes: int
    rate: float
    mean_rel_error: float
    mean_iterations: float


@dataclass(frozen=True)
class SuccessCurve:
    param_name: str          # "k" or "n"
    ensemble: str
    fixed: dict
    points: tuple[SuccessPoint, ...]


def _trial_star(args):
    return run_trial(*args)


def _run_point(param_value, ensemble, n, N, k, trials, master_seed, tag,
               threshold, eps, solver_tol, solver_max_iter, executor=None):
    tasks = [
        (ensemble, n, N, k, derive_seed(master_seed, tag, i), threshold, eps,
         solver_tol, solver_max_iter)
        for i in range(trials)
    ]
    if executor is not None:
        outcomes = list(executor.map(_trial_star, tasks, chunksize=8))
    else:
        outcomes = [run_trial(*t) for t in tasks]
    successes = sum(1 for o in outcomes if o.success)
    finite = [o.rel_error for o in outcomes if math.isfinite(o.rel_error)]
    mean_rel = sum(finite) / len(finite) if finite else math.inf
    mean_it = sum(o.solve_iterations for o in outcomes) / len(outcomes)
    return SuccessPoint(param_value, trials, successes, successes / trials,
                        mean_rel, mean_it)


def _sweep(param_name, ensembles, grid, fixed_builder, trials, master_seed,
           threshold, eps, solver_tol, solver_max_iter, jobs, progress=None):
    curves = {}
    executor = None
    fixed_common = None
    try:
        if jobs and jobs > 1:
            executor = ProcessPoolExecutor(max_workers=jobs)
        for ensemble in ensembles:
            points = []
            for value in grid:
                n, N, k, tag = fixed_builder(ensemble, value)
                if fixed_common is None:
                    fixed_common = {"N": N, "trials": trials, "threshold": threshold,
                                    "master_seed": master_seed}
                    fixed_common["n" if param_name == "k" else "k"] = n if param_name == "k" else k
                pt = _run_point(value, ensemble, n, N, k, trials, master_seed, tag,
                                threshold, eps, solver_tol, solver_max_iter, executor)
                points.append(pt)
                if progress is not None:
                    progress(ensemble, value, pt)
            curves[ensemble] = SuccessCurve(param_name, ensemble, dict(fixed_common),
                                            tuple(points))
    finally:
        if executor is not None:
            executor.shutdown()
    return curves


def success_vs_sparsity(ensembles=ENSEMBLES, N: int = 256, n: int = 100,
                        k_grid=(10, 20, 30, 40), trials: int = 1000,
                        master_seed: int = 1, threshold: float = DEFAULT_THRESHOLD,
                        eps: float = 0.0, solver_tol: float = DEFAULT_SOLVER_TOL,
                        solver_max_iter: int = DEFAULT_SOLVER_MAX_ITER,
                        jobs: int | None = None, progress=None) -> dict:
    """Success-rate curve per ensemble as sparsity k sweeps at fixed n."""
    k_grid = list(k_grid)
    if not k_grid or sorted(k_grid) != k_grid:
        raise ValidationError("k_grid must be nonempty and ascending")

    def fixed(ensemble, k):
        return n, N, k, f"sparsity:{ensemble}:k={k}"

    return _sweep("k", ensembles, k_grid, fixed, trials, master_seed, threshold,
                  eps, solver_tol, solver_max_iter, jobs, progress)


def success_vs_measurements(ensembles=ENSEMBLES, N: int = 256, k: int = 20,
                            n_grid=(60, 70, 80, 90, 95, 100, 110, 120),
                            trials: int = 1000, master_seed: int = 1,
                            threshold: float = DEFAULT_THRESHOLD, eps: float = 0.0,
                            solver_tol: float = DEFAULT_SOLVER_TOL,
                            solver_max_iter: int = DEFAULT_SOLVER_MAX_ITER,
                            jobs: int | None = None, progress=None) -> dict:
    """Success-rate curve per ensemble as measurement count n sweeps at fixed k."""
    n_grid = list(n_grid)
    if not n_grid or sorted(n_grid) != n_grid:
        raise ValidationError("n_grid must be nonempty and ascending")
    if n_grid[-1] > N:
        raise ValidationError(f"max n = {n_grid[-1]} exceeds N = {N}")

    def fixed(ensemble, n):
        return n, N, k, f"measurements:{ensemble}:n={n}"

    return _sweep("n", ensembles, n_grid, fixed, trials, master_seed, threshold,
                  eps, solver_tol, solver_max_iter, jobs, progress)


def frobenius_mse(X, M) -> float:
    """‖X − M‖_F / ‖M‖_F (the image-experiment error measure)."""
    X = np.asarray(X, dtype=float)
    M = np.asarray(M, dtype=float)
    if X.shape != M.shape:
        raise ValidationError(f"shape mismatch {X.shape} vs {M.shape}")
    return float(np.linalg.norm(X - M) / np.linalg.norm(M))


@dataclass(frozen=True)
class ImageReport:
    reconstruction: np.ndarray
    mse: float
    sparsity: int             # ℓ0 pixel count of the input image
    result: RecoveryResult


def image_experiment(image, n: int, ensemble: str, seed: int, eps: float = 0.0,
                     solver_tol: float = DEFAULT_SOLVER_TOL,
                     solver_max_iter: int = DEFAULT_SOLVER_MAX_ITER) -> ImageReport:
    """Measure the column-major vectorized image with a fresh Φ and recover it."""
    M = np.asarray(image, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ValidationError("image must be a nonempty 2-D array")
    h, w = M.shape
    N = h * w
    if n > N:
        raise ValidationError(f"need n <= h*w, got n={n}, h*w={N}")
    phi = build_measurement(ensemble, n, N, derive_seed(seed, "image-matrix"))
    x0 = M.ravel(order="F")
    y = phi.entries @ x0
    res = bpdn(phi, y, eps, tol=solver_tol, max_iter=solver_max_iter)
    X = res.x_star.reshape((h, w), order="F")
    return ImageReport(X, frobenius_mse(X, M), int(np.count_nonzero(M)), res)


@dataclass(frozen=True)
class ErrorBoundReport:
    l1_error: float
    l2_error: float
    tail_l1: float
    noise_scaling: dict | None


def error_bound_probe(phi, x0_compressible, k: int, eps: float, seed: int,
                      solver_tol: float = DEFAULT_SOLVER_TOL,
                      solver_max_iter: int = DEFAULT_SOLVER_MAX_ITER) -> ErrorBoundReport:
    """Recovery-error quantities for a compressible signal.

    tail_l1 is ‖x0 − (x0)_k‖₁, the best-k-term approximation residue. With
    eps > 0, a fixed-direction noise vector of norm eps corrupts y and the
    noise_scaling dict reports the error growth when eps doubles.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if eps < 0.0:
        raise ValidationError(f"eps must be nonnegative, got {eps}")
    entries = phi.entries if isinstance(phi, MeasurementMatrix) else np.asarray(phi, dtype=float)
    x0 = np.asarray(x0_compressible, dtype=float).ravel()
    if x0.shape != (entries.shape[1],):
        raise ValidationError("x0 length must match the matrix column count")
    tail = float(np.abs(x0 - best_k_term(x0, k)).sum())
    clean = entries @ x0

    def solve_at(e):
        if e == 0.0:
            return bpdn(phi, clean, 0.0, tol=solver_tol, max_iter=solver_max_iter)
        rng = substream(seed, "probe-noise")
        z = rng.standard_normal(entries.shape[0])
        z *= e / float(np.linalg.norm(z))
        return bpdn(phi, clean + z, e, tol=solver_tol, max_iter=solver_max_iter)

    res = solve_at(eps)
    l1 = float(np.abs(res.x_star - x0).sum())
    l2 = float(np.linalg.norm(res.x_star - x0))
    scaling = None
    if eps > 0.0:
        res2 = solve_at(2.0 * eps)
        l2_2 = float(np.linalg.norm(res2.x_star - x0))
        scaling = {"eps": eps, "l2_error": l2, "l2_error_2eps": l2_2,
                   "growth_ratio": l2_2 / l2 if l2 > 0 else math.inf}
    return ErrorBoundReport(l1, l2, tail, scaling)
