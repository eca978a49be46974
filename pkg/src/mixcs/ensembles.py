"""Scalar laws and random measurement-matrix ensembles.

Covers the unit Gaussian, symmetric Bernoulli and 3-point laws, custom
discrete laws, iid rectangular matrices, symmetric mixed random-graph
matrices (diagonal from one law, off-diagonal from another), and row
subsampling with the n^{-1/2} scaling that turns a symmetric parent into a
measurement matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .rng import substream

_PROB_TOL = 1e-12

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class DistributionSpec:
    """A scalar probability law with declared moment metadata.

    kind is one of "gaussian-unit", "bernoulli-sym", "three-point" or
    "discrete". Discrete kinds carry their (value, probability) atoms; the
    Gaussian has atoms=None. declared_fourth_moment is the raw fourth moment
    E[x^4] (None when unknown).
    """

    kind: str
    atoms: tuple[tuple[float, float], ...] | None
    declared_mean: float
    declared_variance: float
    declared_fourth_moment: float | None

    @staticmethod
    def gaussian_unit() -> "DistributionSpec":
        return DistributionSpec("gaussian-unit", None, 0.0, 1.0, 3.0)

    @staticmethod
    def bernoulli_sym() -> "DistributionSpec":
        atoms = ((1.0, 0.5), (-1.0, 0.5))
        return DistributionSpec("bernoulli-sym", atoms, 0.0, 1.0, 1.0)

    @staticmethod
    def three_point() -> "DistributionSpec":
        atoms = ((_SQRT3, 1.0 / 6.0), (0.0, 2.0 / 3.0), (-_SQRT3, 1.0 / 6.0))
        return DistributionSpec("three-point", atoms, 0.0, 1.0, 3.0)

    @staticmethod
    def discrete(pairs) -> "DistributionSpec":
        """Custom discrete law from (value, probability) pairs."""
        atoms = tuple((float(v), float(p)) for v, p in pairs)
        if not atoms:
            raise ValidationError("discrete law needs at least one atom")
        probs = np.array([p for _, p in atoms])
        if np.any(probs < 0.0):
            raise ValidationError("discrete probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > _PROB_TOL:
            raise ValidationError(
                f"discrete probabilities sum to {probs.sum()!r}, expected 1 within {_PROB_TOL}"
            )
        vals = np.array([v for v, _ in atoms])
        mean = float(np.dot(probs, vals))
        var = float(np.dot(probs, (vals - mean) ** 2))
        m4 = float(np.dot(probs, vals**4))
        return DistributionSpec("discrete", atoms, mean, var, m4)


def named_law(name: str) -> DistributionSpec:
    """Look up one of the three named laws by its kind string."""
    table = {
        "gaussian-unit": DistributionSpec.gaussian_unit,
        "bernoulli-sym": DistributionSpec.bernoulli_sym,
        "three-point": DistributionSpec.three_point,
    }
    if name not in table:
        raise ValidationError(f"unknown law {name!r}; expected one of {sorted(table)}")
    return table[name]()


def _polar_normal(rng: np.random.Generator, count: int) -> np.ndarray:
    """Unit normals via the Marsaglia polar rejection transform from uniforms."""
    out = np.empty(count)
    have = 0
    while have < count:
        need = count - have
        # ~pi/4 pair acceptance, two normals per accepted pair
        m = max(8, (need * 2) // 3 + 4)
        uv = rng.random((m, 2)) * 2.0 - 1.0
        s = uv[:, 0] ** 2 + uv[:, 1] ** 2
        keep = (s > 0.0) & (s < 1.0)
        s = s[keep]
        f = np.sqrt(-2.0 * np.log(s) / s)
        vals = (uv[keep] * f[:, None]).ravel()
        take = min(vals.size, need)
        out[have : have + take] = vals[:take]
        have += take
    return out


def sample_array(spec: DistributionSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw `count` iid values from the law using the given stream."""
    if spec.kind == "gaussian-unit":
        return _polar_normal(rng, count)
    vals = np.array([v for v, _ in spec.atoms])
    cum = np.cumsum([p for _, p in spec.atoms])
    u = rng.random(count)
    idx = np.minimum(np.searchsorted(cum, u, side="right"), len(vals) - 1)
    return vals[idx]


def sample_scalar(spec: DistributionSpec, stream: np.random.Generator) -> float:
    """One draw from the law; repeated calls walk the stream deterministically."""
    return float(sample_array(spec, stream, 1)[0])


@dataclass(frozen=True)
class MixedGraphModel:
    """Weighted random-graph model: loop weights from diag_law, edge weights
    from offdiag_law. The off-diagonal law must be zero-mean with positive
    variance and a declared finite fourth moment."""

    N: int
    diag_law: DistributionSpec
    offdiag_law: DistributionSpec

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError(f"vertex count must be positive, got {self.N}")
        off = self.offdiag_law
        if off.declared_mean != 0.0:
            raise ValidationError("off-diagonal law must have declared mean 0")
        if not off.declared_variance > 0.0:
            raise ValidationError("off-diagonal law must have positive variance")
        if off.declared_fourth_moment is None:
            raise ValidationError("off-diagonal law needs a declared (finite) fourth moment")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.offdiag_law.declared_variance)


class MeasurementMatrix:
    """Dense real matrix with provenance.

    entries is an (n, N) row-major float array, read-only after construction.
    scaling records the factor already applied to the entries (1.0 = raw,
    n^{-1/2} for measurement-scaled). provenance is a small dict with at
    least an "ensemble" descriptor and, when known, "seed" and "theta" (the
    selected row subset of the symmetric parent, 0-based).
    """

    __slots__ = ("entries", "scaling", "provenance")

    def __init__(self, entries, scaling: float = 1.0, provenance: dict | None = None):
        arr = np.array(entries, dtype=float, order="C")
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError("matrix entries must be a nonempty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("matrix entries must all be finite")
        arr.setflags(write=False)
        self.entries = arr
        self.scaling = float(scaling)
        self.provenance = dict(provenance) if provenance else {"ensemble": "unknown"}

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]

    def __repr__(self):
        return (
            f"MeasurementMatrix(n={self.n}, N={self.N}, scaling={self.scaling!r}, "
            f"ensemble={self.provenance.get('ensemble')!r})"
        )


def sample_iid_matrix(spec: DistributionSpec, n: int, N: int, seed: int) -> MeasurementMatrix:
    """Unscaled n×N matrix of iid draws from the law, deterministic per seed."""
    if n < 1 or N < 1:
        raise ValidationError(f"matrix dimensions must be positive, got ({n}, {N})")
    rng = substream(seed, "iid-matrix")
    entries = sample_array(spec, rng, n * N).reshape(n, N)
    prov = {"ensemble": f"iid:{spec.kind}", "seed": int(seed), "theta": None}
    return MeasurementMatrix(entries, scaling=1.0, provenance=prov)


def sample_mixed_adjacency(model: MixedGraphModel, seed: int) -> np.ndarray:
    """Symmetric N×N adjacency of the mixed weighted random graph.

    Diagonal entries come from diag_law, strict-upper-triangle entries from
    offdiag_law (mirrored), all independent. Exactly symmetric by
    construction.
    """
    N = model.N
    rng = substream(seed, "mixed-adjacency")
    diag = sample_array(model.diag_law, rng, N)
    M = np.zeros((N, N))
    if N > 1:
        upper = sample_array(model.offdiag_law, rng, N * (N - 1) // 2)
        iu = np.triu_indices(N, k=1)
        M[iu] = upper
        M = M + M.T
    np.fill_diagonal(M, diag)
    return M


def bernoulli_from_graph(N: int, p: float, seed: int) -> np.ndarray:
    """2A(G) − J for G drawn from the Erdős–Rényi model with loops.

    Each edge (including loops) is present independently with probability p;
    the result is a symmetric ±1 matrix.
    """
    if N < 1:
        raise ValidationError(f"vertex count must be positive, got {N}")
    if not 0.0 < p < 1.0:
        raise ValidationError(f"edge probability must lie in (0,1), got {p}")
    rng = substream(seed, "graph-bernoulli")
    A = np.zeros((N, N))
    diag = (rng.random(N) < p).astype(float)
    if N > 1:
        upper = (rng.random(N * (N - 1) // 2) < p).astype(float)
        iu = np.triu_indices(N, k=1)
        A[iu] = upper
        A = A + A.T
    np.fill_diagonal(A, diag)
    return 2.0 * A - 1.0


def subsample_rows(parent, theta, scale: bool, ensemble: str = "subsample",
                   seed: int | None = None) -> MeasurementMatrix:
    """Select the rows indexed by theta (0-based) and optionally apply n^{-1/2}.

    theta must hold distinct in-range indices. The provenance records theta
    so a symmetric-mixed parent can be regenerated from its seed and checked.
    """
    parent = np.asarray(parent, dtype=float)
    if parent.ndim != 2:
        raise ValidationError("parent must be a 2-D matrix")
    idx = [int(i) for i in theta]
    if len(idx) == 0:
        raise ValidationError("theta must select at least one row")
    if len(set(idx)) != len(idx):
        raise ValidationError("theta indices must be distinct")
    if min(idx) < 0 or max(idx) >= parent.shape[0]:
        raise ValidationError(
            f"theta indices out of range [0, {parent.shape[0]}): {sorted(set(idx))[:8]}"
        )
    n = len(idx)
    rows = parent[idx, :].copy()
    scaling = 1.0
    if scale:
        scaling = 1.0 / math.sqrt(n)
        rows = rows * scaling
    prov = {"ensemble": ensemble, "seed": seed, "theta": tuple(idx)}
    return MeasurementMatrix(rows, scaling=scaling, provenance=prov)


def mixed_measurement(model: MixedGraphModel, n: int, seed: int,
                      theta=None, scale: bool = True) -> MeasurementMatrix:
    """Build Φ = n^{-1/2}·(rows Θ of the mixed adjacency). Default Θ = {0..n-1}."""
    if n < 1 or n > model.N:
        raise ValidationError(f"need 1 <= n <= N, got n={n}, N={model.N}")
    parent = sample_mixed_adjacency(model, seed)
    if theta is None:
        theta = range(n)
    label = f"s-mixed:{model.diag_law.kind}/{model.offdiag_law.kind}"
    return subsample_rows(parent, theta, scale, ensemble=label, seed=seed)


@dataclass(frozen=True)
class MomentReport:
    mean: float
    variance: float
    fourth_moment: float
    positive_part_second_moment: float


def moment_check(spec: DistributionSpec, samples: int, seed: int) -> MomentReport:
    """Empirical mean, central variance, raw fourth moment and E[max(x,0)^2].

    The caller compares against the law's declared metadata.
    """
    if samples < 10_000:
        raise ValidationError(f"moment_check needs at least 1e4 samples, got {samples}")
    rng = substream(seed, "moment-check")
    x = sample_array(spec, rng, samples)
    mean = float(x.mean())
    var = float(((x - mean) ** 2).mean())
    m4 = float((x**4).mean())
    pos2 = float((np.maximum(x, 0.0) ** 2).mean())
    return MomentReport(mean, var, m4, pos2)
