import math

import numpy as np
import pytest

from conftest import simplex_etf
from mixcs.ensembles import DistributionSpec, sample_iid_matrix
from mixcs.errors import ValidationError
from mixcs.experiments import (
    best_k_term,
    build_measurement,
    error_bound_probe,
    frobenius_mse,
    gen_sparse_signal,
    image_experiment,
    run_trial,
    success_vs_measurements,
    success_vs_sparsity,
)
from mixcs.rng import derive_seed, substream


def test_signal_k_zero_and_full():
    assert np.array_equal(gen_sparse_signal(8, 0, 1).dense(), np.zeros(8))
    full = gen_sparse_signal(5, 5, 2)
    assert set(np.unique(full.dense())) <= {1.0, -1.0}
    assert full.k == 5
    with pytest.raises(ValidationError):
        gen_sparse_signal(4, 5, 0)


def test_signal_support_uniformity():
    counts = np.zeros(256)
    trials = 10**4
    for i in range(trials):
        sig = gen_sparse_signal(256, 20, derive_seed(0, "freq", i))
        counts[list(sig.support)] += 1
    freq = counts / trials
    assert np.max(np.abs(freq - 20.0 / 256.0)) <= 0.01


def test_signal_l0_matches_k():
    for k in (1, 3, 7):
        sig = gen_sparse_signal(32, k, k)
        assert int(np.count_nonzero(sig.dense())) == k


def test_best_k_term():
    x = np.array([0.1, -3.0, 2.0, 0.0, -1.5])
    out = best_k_term(x, 2)
    assert np.array_equal(out, [0.0, -3.0, 2.0, 0.0, 0.0])
    assert np.array_equal(best_k_term(x, 10), x)
    assert np.array_equal(best_k_term(x, 0), np.zeros(5))


def test_build_measurement_shapes_and_scaling():
    for ensemble in ("gaussian", "bernoulli", "three-point", "s-mixed"):
        phi = build_measurement(ensemble, 10, 24, 3)
        assert (phi.n, phi.N) == (10, 24)
        assert phi.scaling == 1.0 / math.sqrt(10)
    with pytest.raises(ValidationError):
        build_measurement("toeplitz", 4, 8, 0)


def test_smixed_measurement_symmetric_parent_block():
    phi = build_measurement("s-mixed", 8, 20, 11)
    block = phi.entries[:, :8]
    assert np.allclose(block, block.T, atol=0)  # scaled symmetric block


def test_run_trial_k_zero_succeeds():
    out = run_trial("gaussian", 10, 32, 0, 5)
    assert out.success and out.rel_error == 0.0


def test_run_trial_deterministic():
    a = run_trial("bernoulli", 20, 64, 3, 123)
    b = run_trial("bernoulli", 20, 64, 3, 123)
    assert a == b
    assert a.success and a.rel_error <= 1e-4


def test_run_trial_validation():
    with pytest.raises(ValidationError):
        run_trial("gaussian", 20, 10, 2, 0)


def test_sparsity_sweep_k_zero_grid():
    curves = success_vs_sparsity(ensembles=("gaussian", "bernoulli"), N=24, n=12,
                                 k_grid=[0], trials=4, master_seed=2)
    for curve in curves.values():
        assert curve.points[0].rate == 1.0


def test_sweep_reproducible_bit_identical():
    kw = dict(ensembles=("gaussian",), N=32, n=16, k_grid=[1, 2], trials=5,
              master_seed=3)
    assert success_vs_sparsity(**kw) == success_vs_sparsity(**kw)


def test_sweep_independent_of_worker_count():
    kw = dict(ensembles=("gaussian", "s-mixed"), N=24, n=12, k_grid=[1, 2],
              trials=6, master_seed=4)
    serial = success_vs_sparsity(**kw)
    pooled = success_vs_sparsity(**kw, jobs=2)
    assert serial == pooled


def test_sweep_grid_validation():
    with pytest.raises(ValidationError):
        success_vs_sparsity(k_grid=[], trials=1)
    with pytest.raises(ValidationError):
        success_vs_sparsity(k_grid=[4, 2], trials=1)
    with pytest.raises(ValidationError):
        success_vs_measurements(n_grid=[8, 300], N=256, trials=1)


def test_measurements_sweep_square_system():
    curves = success_vs_measurements(ensembles=("gaussian",), N=24, k=4,
                                     n_grid=[24], trials=4, master_seed=7)
    assert curves["gaussian"].points[0].rate == 1.0


def test_frobenius_mse_basics():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert frobenius_mse(M, M) == 0.0
    assert frobenius_mse(np.zeros_like(M), M) == 1.0
    assert frobenius_mse(2.0 * M, 2.0 * M.T) == frobenius_mse(M, M.T)
    with pytest.raises(ValidationError):
        frobenius_mse(np.zeros((2, 2)), np.zeros((3, 3)))


def test_image_experiment_small_exact():
    img = np.zeros((8, 8))
    img[2, 3] = 0.8
    img[5, 1] = 0.4
    img[6, 6] = 1.0
    rep = image_experiment(img, 40, "gaussian", seed=3, solver_tol=1e-8)
    assert rep.sparsity == 3
    assert rep.mse <= 1e-5
    assert rep.reconstruction.shape == (8, 8)


def test_image_experiment_column_major_vectorization():
    # a column-constant image recovered from n=N measurements reshapes back
    img = np.outer(np.ones(4), np.array([0.1, 0.4, 0.7, 1.0]))
    rep = image_experiment(img, 16, "bernoulli", seed=2, solver_tol=1e-9)
    assert rep.mse <= 1e-6
    with pytest.raises(ValidationError):
        image_experiment(img, 17, "gaussian", seed=0)


def test_error_bound_probe_exact_sparse():
    Phi = simplex_etf(12)
    x0 = np.zeros(13)
    x0[[4, 9]] = [1.0, -1.0]
    rep = error_bound_probe(Phi, x0, k=2, eps=0.0, seed=1, solver_tol=1e-10,
                            solver_max_iter=100000)
    assert rep.tail_l1 == 0.0
    assert rep.l2_error <= 1e-6 * np.linalg.norm(x0)
    assert rep.noise_scaling is None


def test_error_bound_probe_geometric_decay():
    rng = substream(2, "probe")
    A = rng.standard_normal((60, 128)) / math.sqrt(60)
    x0 = 0.5 ** np.arange(128)
    rep = error_bound_probe(A, x0, k=5, eps=0.0, seed=2, solver_tol=1e-8,
                            solver_max_iter=60000)
    assert rep.tail_l1 == float(np.abs(x0 - best_k_term(x0, 5)).sum())
    assert rep.l2_error <= 10.0 * rep.tail_l1 / math.sqrt(5)


def test_error_bound_probe_noise_scaling():
    rng = substream(4, "probe-noise")
    A = rng.standard_normal((20, 50)) / math.sqrt(20)
    x0 = np.zeros(50)
    x0[[5, 20, 40]] = [1.0, -1.0, 1.0]
    rep = error_bound_probe(A, x0, k=3, eps=0.01, seed=7, solver_tol=1e-8,
                            solver_max_iter=60000)
    assert rep.noise_scaling is not None
    assert rep.noise_scaling["growth_ratio"] <= 2.5
