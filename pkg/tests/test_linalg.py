import numpy as np
import pytest
from scipy import stats

from shadowcap.linalg import (
    ComplexLine,
    NotOrthogonalError,
    RngSeed,
    apply_j,
    check_orthogonal,
    haar_orthogonal,
    haar_orthogonal_batch,
    make_complex_structure,
    orthogonality_defect,
    random_unit_vector,
    random_unitary,
    rotated_complex_structure,
)

ALPHA = 1e-3


def test_complex_structure_dim2():
    assert np.array_equal(make_complex_structure(1), np.array([[0.0, -1.0], [1.0, 0.0]]))


def test_complex_structure_maps_x1_to_y1():
    J = make_complex_structure(2)
    assert np.array_equal(J @ np.array([1.0, 0, 0, 0]), np.array([0.0, 0, 1, 0]))


@pytest.mark.parametrize("n", [1, 3, 7])
def test_j_squared_is_minus_identity(n, rng):
    J = make_complex_structure(n)
    v = rng.standard_normal((100, 2 * n))
    assert np.allclose(v @ J.T @ J.T, -v, atol=0)
    assert np.array_equal(apply_j(v), v @ J.T)


def test_complex_structure_rejects_zero():
    with pytest.raises(ValueError):
        make_complex_structure(0)


def test_haar_is_orthogonal():
    O = haar_orthogonal(10, RngSeed(3))
    assert np.abs(O.T @ O - np.eye(10)).max() < 1e-10
    assert orthogonality_defect(O) < 1e-10


def test_haar_rejects_odd_dim():
    with pytest.raises(ValueError):
        haar_orthogonal(5, RngSeed(0))


def test_haar_deterministic():
    a = haar_orthogonal(8, RngSeed(11, 2))
    b = haar_orthogonal(8, RngSeed(11, 2))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, haar_orthogonal(8, RngSeed(11, 3)))


def test_haar_entry_mean():
    Os = haar_orthogonal_batch(4, 10_000, RngSeed(5))
    # entries have mean 0 and variance 1/dim
    assert abs(Os[:, 0, 0].mean()) < 3 * (1 / np.sqrt(4)) / np.sqrt(10_000)


def test_haar_first_column_uniform_on_sphere(rng):
    dim = 4
    Os = haar_orthogonal_batch(dim, 10_000, RngSeed(6))
    u = random_unit_vector(dim, rng)
    t = Os[:, :, 0] @ u
    # one coordinate of a uniform point on S^{d-1}: (t + 1)/2 ~ Beta((d-1)/2, (d-1)/2)
    marg = stats.beta((dim - 1) / 2, (dim - 1) / 2)
    assert stats.kstest((t + 1) / 2, marg.cdf).pvalue > ALPHA


def test_haar_covers_both_components():
    dets = np.linalg.det(haar_orthogonal_batch(4, 2000, RngSeed(8)))
    assert np.allclose(np.abs(dets), 1.0)
    frac = (dets > 0).mean()
    assert 0.45 < frac < 0.55


def test_batch_matches_orthogonality():
    Os = haar_orthogonal_batch(6, 50, RngSeed(1))
    eye = np.eye(6)
    assert max(np.abs(O.T @ O - eye).max() for O in Os) < 1e-10


def test_rotated_structure_identity_is_j():
    for n in (1, 2, 5):
        assert np.array_equal(rotated_complex_structure(np.eye(2 * n)), make_complex_structure(n))


def test_rotated_structure_properties(haar, rng):
    O = haar(6, seed=2)
    A = rotated_complex_structure(O)
    assert np.abs(A.T @ A - np.eye(12)).max() < 1e-10
    assert np.abs(A + A.T).max() < 1e-12
    assert np.abs(A @ A + np.eye(12)).max() < 1e-10
    y = random_unit_vector(12, rng, size=100)
    assert np.abs(np.einsum("ki,ki->k", y @ A.T, y)).max() < 1e-12


def test_rotated_structure_covariance(haar):
    O = haar(4, seed=1)
    V = haar(4, seed=2)
    lhs = rotated_complex_structure(O @ V)
    rhs = V.T @ rotated_complex_structure(O) @ V
    assert np.abs(lhs - rhs).max() < 1e-10


def test_check_orthogonal():
    with pytest.raises(NotOrthogonalError):
        check_orthogonal(2 * np.eye(4))
    with pytest.raises(ValueError):
        check_orthogonal(np.eye(3))
    O = haar_orthogonal(6, RngSeed(0))
    assert check_orthogonal(O) is not None
    with pytest.raises(NotOrthogonalError):
        check_orthogonal(O + 1e-9)


def test_unit_vector_norms(rng):
    v = random_unit_vector(7, rng, size=1000)
    assert np.abs(np.linalg.norm(v, axis=1) - 1).max() < 1e-12


def test_unit_vector_angle_uniform():
    v = random_unit_vector(2, RngSeed(9), size=10_000)
    ang = np.mod(np.arctan2(v[:, 1], v[:, 0]), 2 * np.pi)
    counts, _ = np.histogram(ang, bins=20, range=(0, 2 * np.pi))
    assert stats.chisquare(counts).pvalue > ALPHA


def test_unit_vector_mean():
    v = random_unit_vector(5, RngSeed(10), size=100_000)
    assert np.abs(v.mean(axis=0)).max() < 5 / np.sqrt(100_000)


def test_random_unitary_commutes_with_j():
    W = random_unitary(4, RngSeed(2))
    J = make_complex_structure(4)
    assert np.abs(W.T @ W - np.eye(8)).max() < 1e-10
    assert np.abs(W @ J - J @ W).max() < 1e-12


def test_complex_line():
    line = ComplexLine.from_vector([3.0, 0.0, 4.0, 0.0])
    assert np.isclose(np.linalg.norm(line.e), 1)
    assert np.array_equal(line.je, apply_j(line.e))
    assert line.dim == 4
    r = line.rotated(0.7)
    assert abs(r.e @ r.je) < 1e-15
    with pytest.raises(ValueError):
        ComplexLine.from_vector([1.0, 2.0, 3.0])
