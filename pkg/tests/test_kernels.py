import numpy as np
import pytest

from shadowcap import kernels
from shadowcap.linalg import RngSeed, haar_orthogonal, random_unit_vector
from shadowcap.search import _objective_matrices

OBJECTIVES = ["area", "diam_proxy", "l1_sum"]


def setup(objective, n=5, seed=0):
    O = haar_orthogonal(2 * n, RngSeed(seed))
    M1, M2 = _objective_matrices(objective, O)
    return M1, M2


def test_area_twins_agree(rng):
    for _ in range(50):
        a, b = rng.standard_normal((2, 9))
        assert np.isclose(kernels.zonogon_area_nb(a, b), kernels.zonogon_area_np(a, b), rtol=1e-13)


@pytest.mark.parametrize("objective", OBJECTIVES)
def test_gradient_twins_agree(objective, rng):
    M1, M2 = setup(objective)
    code = kernels.OBJECTIVE_CODES[objective]
    for _ in range(20):
        x = random_unit_vector(10, rng)
        f1, g1 = kernels.objective_grad_nb(code, M1, M2, x)
        f2, g2 = kernels.objective_grad_np(code, M1, M2, x)
        assert np.isclose(f1, f2, rtol=1e-12)
        assert np.allclose(g1, g2, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("objective", OBJECTIVES)
def test_gradient_matches_finite_differences(objective, rng):
    # at a generic point every objective is smooth, so central differences apply
    M1, M2 = setup(objective, seed=1)
    code = kernels.OBJECTIVE_CODES[objective]
    h = 1e-6
    for _ in range(5):
        x = rng.standard_normal(10)
        _, g = kernels.objective_grad_np(code, M1, M2, x)
        fd = np.empty(10)
        for i in range(10):
            d = np.zeros(10)
            d[i] = h
            fd[i] = (kernels.objective_grad_np(code, M1, M2, x + d)[0] - kernels.objective_grad_np(code, M1, M2, x - d)[0]) / (2 * h)
        assert np.allclose(g, fd, rtol=1e-5, atol=1e-5)


def test_area_is_homogeneous_of_degree_two(rng):
    M1, M2 = setup("area")
    x = rng.standard_normal(10)
    f, g = kernels.objective_grad(0, M1, M2, x)
    # Euler: <grad f, x> = 2 f
    assert np.isclose(g @ x, 2 * f, rtol=1e-10)


@pytest.mark.parametrize("objective", OBJECTIVES)
def test_descent_twins_agree(objective):
    M1, M2 = setup(objective, n=4, seed=3)
    code = kernels.OBJECTIVE_CODES[objective]
    starts = np.random.default_rng(0).standard_normal((6, 8))
    args = (code, M1, M2, starts, 0.1, 0.5, 300, 1e-8)
    xs1, fs1, its1, c1 = kernels.descend_many_nb(*args)
    xs2, fs2, its2, c2 = kernels.descend_many_np(*args)
    # identical arithmetic up to summation order, so values match closely
    assert np.allclose(fs1, fs2, rtol=1e-6)
    assert np.array_equal(c1, c2)


def test_descent_never_increases(rng):
    M1, M2 = setup("area", n=6, seed=4)
    starts = rng.standard_normal((8, 12))
    f0 = np.array([kernels.objective_grad(0, M1, M2, s / np.linalg.norm(s))[0] for s in starts])
    xs, fs, its, conv = kernels.descend_many(0, M1, M2, starts, 0.1, 0.5, 200, 1e-8)
    assert np.all(fs <= f0 + 1e-12)
    assert np.allclose(np.linalg.norm(xs, axis=1), 1.0)
    assert np.all(its >= 1) and np.all(its <= 200)


@pytest.mark.parametrize("flag,expected", [("1", "descend_many_np"), ("0", "descend_many_nb")])
def test_env_flag_selects_backend(flag, expected):
    import os
    import subprocess
    import sys

    env = dict(os.environ, SHADOWCAP_PURE_NUMPY=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from shadowcap import kernels; print(kernels.descend_many.__name__)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    ).stdout.strip()
    if expected.endswith("_nb") and out.endswith("_np"):
        pytest.skip("numba is not installed")
    assert out == expected


def test_pure_numpy_run_matches(tmp_path):
    import os
    import subprocess
    import sys

    code = (
        "from shadowcap.linalg import RngSeed, haar_orthogonal\n"
        "from shadowcap.search import OptimizerConfig, minimize_shadow_area\n"
        "O = haar_orthogonal(8, RngSeed(1))\n"
        "print(repr(minimize_shadow_area(O, OptimizerConfig(restarts=4, max_iters=200)).best_value))\n"
    )
    vals = []
    for flag in ("1", "0"):
        env = dict(os.environ, SHADOWCAP_PURE_NUMPY=flag)
        vals.append(float(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout))
    assert np.isclose(vals[0], vals[1], rtol=1e-6)
