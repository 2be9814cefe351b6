"""Hot inner loops: zonogon area, objective subgradients and the sphere descent.

Every kernel exists twice. The ``*_nb`` versions are explicit loops compiled by
numba; the ``*_np`` versions are vectorised numpy and serve as the fallback
(``SHADOWCAP_PURE_NUMPY=1``) and as a cross-check in the test suite. The
unsuffixed public names are bound to one set or the other at import time.

Objectives are all functions of two linear images ``a = M1 @ x`` and
``b = M2 @ x`` of a point ``x`` on the unit sphere:

``AREA``        4 * sum_{i<j} |a_i b_j - a_j b_i|   (shadow area of the cube)
``DIAM_PROXY``  max(|a|_1, |b|_1)
``L1_SUM``      |a|_1 + |b|_1
"""

import numpy as np

from ._accel import USE_NUMBA, njit, prange

AREA = 0
DIAM_PROXY = 1
L1_SUM = 2

OBJECTIVE_CODES = {"area": AREA, "diam_proxy": DIAM_PROXY, "l1_sum": L1_SUM}


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------


@njit(cache=True)
def zonogon_area_nb(a, b):
    m = a.shape[0]
    s = 0.0
    for i in range(m):
        ai = a[i]
        bi = b[i]
        for j in range(i + 1, m):
            s += abs(ai * b[j] - a[j] * bi)
    return 4.0 * s


@njit(cache=True)
def _sign(v):
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


@njit(cache=True)
def objective_grad_nb(code, M1, M2, x):
    d = x.shape[0]
    m = M1.shape[0]
    a = M1 @ x
    b = M2 @ x
    ga = np.zeros(m)
    gb = np.zeros(m)
    if code == AREA:
        f = 0.0
        for i in range(m):
            ai = a[i]
            bi = b[i]
            for j in range(i + 1, m):
                det = ai * b[j] - a[j] * bi
                s = _sign(det)
                f += abs(det)
                ga[i] += s * b[j]
                ga[j] -= s * bi
                gb[i] -= s * a[j]
                gb[j] += s * ai
        f *= 4.0
        for i in range(m):
            ga[i] *= 4.0
            gb[i] *= 4.0
    else:
        na = 0.0
        nb = 0.0
        for i in range(m):
            na += abs(a[i])
            nb += abs(b[i])
        if code == DIAM_PROXY:
            if na >= nb:
                f = na
                for i in range(m):
                    ga[i] = _sign(a[i])
            else:
                f = nb
                for i in range(m):
                    gb[i] = _sign(b[i])
        else:
            f = na + nb
            for i in range(m):
                ga[i] = _sign(a[i])
                gb[i] = _sign(b[i])
    g = np.zeros(d)
    g += M1.T @ ga
    g += M2.T @ gb
    return f, g


@njit(cache=True)
def _descend_one_nb(code, M1, M2, x0, step_init, shrink, max_iters, grad_tol):
    x = x0 / np.sqrt(np.sum(x0 * x0))
    f, g = objective_grad_nb(code, M1, M2, x)
    step = step_init
    it = 0
    converged = False
    while it < max_iters:
        it += 1
        gt = g - np.dot(g, x) * x
        gn = np.sqrt(np.sum(gt * gt))
        if gn <= grad_tol:
            converged = True
            break
        y = x - (step / gn) * gt
        y = y / np.sqrt(np.sum(y * y))
        fy, gy = objective_grad_nb(code, M1, M2, y)
        if fy < f:
            x = y
            f = fy
            g = gy
        else:
            step *= shrink
            if step < grad_tol:
                converged = True
                break
    return x, f, it, converged


@njit(cache=True, parallel=True)
def descend_many_nb(code, M1, M2, starts, step_init, shrink, max_iters, grad_tol):
    r, d = starts.shape
    xs = np.empty((r, d))
    fs = np.empty(r)
    its = np.empty(r, dtype=np.int64)
    conv = np.empty(r, dtype=np.bool_)
    for k in prange(r):
        x, f, it, c = _descend_one_nb(
            code, M1, M2, starts[k], step_init, shrink, max_iters, grad_tol
        )
        xs[k] = x
        fs[k] = f
        its[k] = it
        conv[k] = c
    return xs, fs, its, conv


# --------------------------------------------------------------------------
# numpy twins
# --------------------------------------------------------------------------


def zonogon_area_np(a, b):
    det = np.outer(a, b) - np.outer(b, a)
    return 2.0 * float(np.abs(det).sum())


def objective_grad_np(code, M1, M2, x):
    a = M1 @ x
    b = M2 @ x
    if code == AREA:
        det = np.outer(a, b) - np.outer(b, a)
        s = np.sign(det)
        f = 2.0 * float(np.abs(det).sum())
        ga = 4.0 * (s @ b)
        gb = -4.0 * (s @ a)
        return f, M1.T @ ga + M2.T @ gb
    na = float(np.abs(a).sum())
    nb = float(np.abs(b).sum())
    if code == DIAM_PROXY:
        if na >= nb:
            return na, M1.T @ np.sign(a)
        return nb, M2.T @ np.sign(b)
    return na + nb, M1.T @ np.sign(a) + M2.T @ np.sign(b)


def _descend_one_np(code, M1, M2, x0, step_init, shrink, max_iters, grad_tol):
    x = x0 / np.linalg.norm(x0)
    f, g = objective_grad_np(code, M1, M2, x)
    step = step_init
    it = 0
    converged = False
    while it < max_iters:
        it += 1
        gt = g - np.dot(g, x) * x
        gn = np.linalg.norm(gt)
        if gn <= grad_tol:
            converged = True
            break
        y = x - (step / gn) * gt
        y /= np.linalg.norm(y)
        fy, gy = objective_grad_np(code, M1, M2, y)
        if fy < f:
            x, f, g = y, fy, gy
        else:
            step *= shrink
            if step < grad_tol:
                converged = True
                break
    return x, f, it, converged


def descend_many_np(code, M1, M2, starts, step_init, shrink, max_iters, grad_tol):
    r, d = starts.shape
    xs = np.empty((r, d))
    fs = np.empty(r)
    its = np.empty(r, dtype=np.int64)
    conv = np.empty(r, dtype=bool)
    for k in range(r):
        xs[k], fs[k], its[k], conv[k] = _descend_one_np(
            code, M1, M2, starts[k], step_init, shrink, max_iters, grad_tol
        )
    return xs, fs, its, conv


if USE_NUMBA:
    zonogon_area = zonogon_area_nb
    objective_grad = objective_grad_nb
    descend_many = descend_many_nb
else:
    zonogon_area = zonogon_area_np
    objective_grad = objective_grad_np
    descend_many = descend_many_np
