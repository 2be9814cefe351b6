"""Complex structure, Haar rotations and seeded random streams on R^{2n}."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-10


class NotOrthogonalError(ValueError):
    """A matrix that should be orthogonal is not, within ``ORTHO_TOL``."""


@dataclass(frozen=True)
class RngSeed:
    """A (seed, stream) pair; equal pairs reproduce identical draws."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, index))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngSeed):
        return rng.generator()
    return np.random.default_rng(rng)


def make_complex_structure(n: int) -> np.ndarray:
    """The 2n x 2n matrix of (x, y) -> (-y, x), coordinates ordered x_1..x_n, y_1..y_n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def apply_j(v: np.ndarray) -> np.ndarray:
    """J @ v without forming J; works on the last axis."""
    n = v.shape[-1] // 2
    return np.concatenate([-v[..., n:], v[..., :n]], axis=-1)


def orthogonality_defect(O: np.ndarray) -> float:
    return float(np.abs(O.T @ O - np.eye(O.shape[0])).max())


def check_orthogonal(O: np.ndarray, tol: float = ORTHO_TOL) -> np.ndarray:
    O = np.asarray(O, dtype=float)
    if O.ndim != 2 or O.shape[0] != O.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {O.shape}")
    if O.shape[0] % 2:
        raise ValueError(f"dimension must be even, got {O.shape[0]}")
    defect = orthogonality_defect(O)
    if defect >= tol:
        raise NotOrthogonalError(f"max |O^T O - I| = {defect:.3e} >= {tol:.0e}")
    return O


def _qr_haar(g: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(g)
    d = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    d[d == 0] = 1.0
    return q * d[..., None, :]


def haar_orthogonal(dim: int, rng) -> np.ndarray:
    """Haar-distributed element of O(dim) (both determinant signs).

    Gaussian matrix, QR, then column j is multiplied by sign(R_jj); without the
    sign fix the law of Q depends on the QR convention and is not Haar.
    """
    if dim < 2 or dim % 2:
        raise ValueError(f"dim must be even and >= 2, got {dim}")
    gen = as_generator(rng)
    O = _qr_haar(gen.standard_normal((dim, dim)))
    if orthogonality_defect(O) >= ORTHO_TOL:
        O = _qr_haar(O)
        check_orthogonal(O)
    return O


def haar_orthogonal_batch(dim: int, size: int, rng) -> np.ndarray:
    """``size`` independent Haar samples stacked along axis 0."""
    if dim < 2 or dim % 2:
        raise ValueError(f"dim must be even and >= 2, got {dim}")
    gen = as_generator(rng)
    return _qr_haar(gen.standard_normal((size, dim, dim)))


def rotated_complex_structure(O: np.ndarray) -> np.ndarray:
    """A = O^T J O: orthogonal, skew-symmetric, A @ A = -I."""
    O = check_orthogonal(O)
    return O.T @ apply_j(O.T).T


def random_unit_vector(dim: int, rng, size: int | None = None) -> np.ndarray:
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    gen = as_generator(rng)
    shape = (dim,) if size is None else (size, dim)
    g = gen.standard_normal(shape)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def random_unitary(n: int, rng) -> np.ndarray:
    """Haar element of U(n) in its real 2n x 2n form [[X, -Y], [Y, X]]."""
    gen = as_generator(rng)
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    u = q * ph[None, :]
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


@dataclass(frozen=True)
class ComplexLine:
    """span{e, Je} for a unit vector e."""

    e: np.ndarray
    je: np.ndarray

    @classmethod
    def from_vector(cls, v) -> "ComplexLine":
        v = np.asarray(v, dtype=float)
        if v.ndim != 1 or v.shape[0] % 2:
            raise ValueError("a complex line needs a vector of even length")
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ValueError("zero vector does not span a complex line")
        e = v / nrm
        return cls(e, apply_j(e))

    @property
    def dim(self) -> int:
        return self.e.shape[0]

    def rotated(self, theta: float) -> "ComplexLine":
        """Same line, basis turned by theta inside the plane."""
        c, s = np.cos(theta), np.sin(theta)
        return ComplexLine(c * self.e + s * self.je, -s * self.e + c * self.je)
