"""Sampler determinism and Monte Carlo agreement with exact moment formulas.

Statistical assertions use five empirical standard errors; per-check false
alarm probability is below 1e-6.
"""

import numpy as np
import pytest

from symsub.randomness import (
    RngStream,
    complex_gaussian_moment_operator,
    gaussian_batch,
    gaussian_vector,
    haar_moment_operator,
    haar_state,
    haar_state_batch,
    haar_unitary,
    mc_projector_moment,
    mc_real_unit_moment,
    mc_tensor_power_mean,
    projector_moment_exact,
    random_projector,
    real_gaussian_moment_operator,
    real_unit_moment_operator,
)
from symsub.tensorspace import frobenius_distance

N = 100_000


def test_stream_determinism():
    a = mc_projector_moment(4, 1, 2, 20_000, RngStream(seed=9, stream_id=2))
    b = mc_projector_moment(4, 1, 2, 20_000, RngStream(seed=9, stream_id=2))
    assert a == b
    c = mc_projector_moment(4, 1, 2, 20_000, RngStream(seed=9, stream_id=3))
    assert a.mean != c.mean


def test_haar_state_norm_and_scalar_case():
    psi = haar_state(6, RngStream(0))
    assert abs(np.linalg.norm(psi.entries) - 1) <= 1e-14
    scalar = haar_state(1, RngStream(0))
    assert abs(abs(scalar.entries[0, 0]) - 1) <= 1e-14


def test_haar_state_first_moment():
    d = 4
    batch = haar_state_batch(d, RngStream(1).generator(), N)
    mean = batch.conj().T @ batch / N
    assert np.linalg.norm(mean - np.eye(d) / d) <= 5 / np.sqrt(N)


def test_haar_unitary_unitarity_and_phase():
    u = haar_unitary(5, RngStream(2)).entries
    assert np.abs(u.conj().T @ u - np.eye(5)).max() <= 1e-12
    u1 = haar_unitary(1, RngStream(3)).entries
    assert abs(abs(u1[0, 0]) - 1) <= 1e-14


def test_haar_unitary_first_moment_twirl():
    d = 3
    x = np.diag([1.0, 2.0, 3.0])
    trials = N
    gen = RngStream(4).generator()
    z = (gen.standard_normal((trials, d, d)) + 1j * gen.standard_normal((trials, d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.einsum("...ii->...i", r)
    u = q * (diag / np.abs(diag))[:, None, :]
    mean = np.einsum("mij,jk,mlk->il", u, x, u.conj()) / trials
    target = np.trace(x) * np.eye(d) / d
    assert np.linalg.norm(mean - target) <= 5 * np.linalg.norm(x) / np.sqrt(trials)


def test_gaussian_normalization():
    for field in ("real", "complex"):
        v = gaussian_batch(5, field, RngStream(5).generator(), N)
        norms = np.sum(np.abs(v) ** 2, axis=1)
        assert abs(norms.mean() - 1) <= 5 * norms.std() / np.sqrt(N)


def test_gaussian_fourth_norm_moment():
    # E |x|^4 = (1 + 1/d) for complex Gaussians normalized to E<v|v> = 1
    d = 4
    v = gaussian_batch(d, "complex", RngStream(6).generator(), 2 * N)
    x4 = np.linalg.norm(v, axis=1) ** 4
    assert abs(x4.mean() - (1 + 1 / d)) <= 5 * x4.std() / np.sqrt(2 * N)


def test_real_gaussian_scalar_second_moment():
    v = gaussian_batch(1, "real", RngStream(7).generator(), N)
    sq = v[:, 0] ** 2
    assert abs(sq.mean() - 1.0) <= 5 * sq.std() / np.sqrt(N)


def test_gaussian_vector_rejects_unknown_field():
    with pytest.raises(ValueError):
        gaussian_vector(3, "quaternion", RngStream(0))


def test_random_projector_properties():
    p = random_projector(7, 3, RngStream(8)).entries
    assert np.abs(p - p.conj().T).max() <= 1e-12
    assert np.abs(p @ p - p).max() <= 1e-12
    assert abs(np.trace(p).real - 3) <= 1e-12
    full = random_projector(4, 4, RngStream(9)).entries
    assert np.abs(full - np.eye(4)).max() <= 1e-12
    with pytest.raises(ValueError):
        random_projector(4, 5, RngStream(0))


def test_rank_one_projector_matches_haar_state_moment():
    # tr(Pi phi)^n for rank-1 Pi has the same law as |<psi|0>|^2n
    est = mc_projector_moment(4, 1, 2, N, RngStream(10))
    exact = float(projector_moment_exact(4, 1, 2))
    assert abs(est.mean - exact) <= 5 * est.stderr


def test_projector_moment_endpoints():
    assert projector_moment_exact(6, 6, 3) == 1
    assert float(projector_moment_exact(5, 2, 1)) == pytest.approx(2 / 5)
    est = mc_projector_moment(5, 2, 1, 50_000, RngStream(11))
    assert abs(est.mean - 0.4) <= 5 * est.stderr


def test_mean_power_haar():
    est = mc_tensor_power_mean(lambda g, m: haar_state_batch(2, g, m), 2, N, RngStream(12))
    exact = haar_moment_operator(2, 2)
    r = frobenius_distance(est.mean, exact)
    assert r <= 5 * est.frob_stderr
    assert r <= 0.02


def test_mean_power_complex_gaussian():
    est = mc_tensor_power_mean(lambda g, m: gaussian_batch(2, "complex", g, m), 2, N, RngStream(13))
    exact = complex_gaussian_moment_operator(2, 2)
    r = frobenius_distance(est.mean, exact)
    assert r <= 5 * est.frob_stderr
    assert r <= 0.02


def test_mean_power_real_gaussian():
    est = mc_tensor_power_mean(lambda g, m: gaussian_batch(3, "real", g, m), 2, N, RngStream(14))
    exact = real_gaussian_moment_operator(3, 2)
    r = frobenius_distance(est.mean, exact)
    assert r <= 5 * est.frob_stderr
    assert r <= 0.02


def test_real_unit_moment():
    est = mc_real_unit_moment(3, 2, N, RngStream(15))
    exact = real_unit_moment_operator(3, 2)
    r = frobenius_distance(est.mean, exact)
    assert r <= 5 * est.frob_stderr
    assert r <= 0.02


def test_real_unit_first_moment_is_normalized_identity():
    est = mc_real_unit_moment(3, 1, 50_000, RngStream(16))
    assert frobenius_distance(est.mean, np.eye(3) / 3) <= 5 * est.frob_stderr


def test_real_unit_moment_d1():
    est = mc_real_unit_moment(1, 2, 1000, RngStream(17))
    assert abs(est.mean.entries[0, 0] - 1) <= 1e-14


def test_haar_moment_operator_normalization():
    op = haar_moment_operator(3, 2)
    assert abs(np.trace(op.entries).real - 1) <= 1e-12
    gauss = complex_gaussian_moment_operator(3, 2)
    assert abs(np.trace(gauss.entries).real - (1 + 1 / 3)) <= 1e-12
