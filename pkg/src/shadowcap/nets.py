"""Integer-point nets of cross-polytopes, nets of the slices G_theta, and the
certificate that no complex line has a small shadow diameter.

``G_theta^n`` is the set of unit vectors x in R^n with |x|_1 <= theta sqrt(n).
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import as_generator, check_orthogonal, rotated_complex_structure

log = logging.getLogger(__name__)

NET_BUDGET = 10**7
_CHUNK = 2**22  # entries per distance block


class NetBudgetExceeded(RuntimeError):
    """The requested net is larger than ``NET_BUDGET`` points."""


class EmptySampleError(RuntimeError):
    """A sampler for the target set returned nothing usable."""


def cardinality_bound(k: int, n: int) -> float:
    """(2e(1 + n/k))^k, an upper bound on #(Z^n ∩ k B_1^n)."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    log_b = k * math.log(2.0 * math.e * (1.0 + n / k))
    return math.exp(log_b) if log_b < 700.0 else math.inf


def lattice_count(k: int, n: int) -> int:
    """Exact #(Z^n ∩ k B_1^n) = sum_j 2^j C(n, j) C(k, j)."""
    return sum(2**j * math.comb(n, j) * math.comb(k, j) for j in range(min(k, n) + 1))


@dataclass(frozen=True)
class LatticeNet:
    n: int
    k: int
    points: np.ndarray  # int16, shape (count, n)

    @property
    def covering_radius_bound(self) -> float:
        return math.sqrt(self.k)

    @property
    def cardinality_bound(self) -> float:
        return cardinality_bound(self.k, self.n)

    def __len__(self) -> int:
        return self.points.shape[0]


def lattice_net(k: int, n: int, budget: int = NET_BUDGET) -> LatticeNet:
    """All integer points of the l1 ball of radius k, built one coordinate at a time."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    if k > np.iinfo(np.int16).max:
        raise ValueError("k does not fit the int16 point storage")
    bound = cardinality_bound(k, n)
    if bound > budget:
        raise NetBudgetExceeded(f"(2e(1+n/k))^k = {bound:.3g} exceeds the budget {budget:.0e}")
    pts = np.zeros((1, 0), dtype=np.int16)
    used = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        new_pts, new_used = [], []
        for v in range(-k, k + 1):
            keep = used + abs(v) <= k
            if not keep.any():
                continue
            col = np.full((int(keep.sum()), 1), v, dtype=np.int16)
            new_pts.append(np.hstack([pts[keep], col]))
            new_used.append(used[keep] + abs(v))
        pts = np.vstack(new_pts)
        used = np.concatenate(new_used)
    return LatticeNet(n=n, k=k, points=pts)


# -- samplers --------------------------------------------------------------


def l1_ball_sampler(radius: float, n: int):
    """Uniform points of radius * B_1^n: Dirichlet(1,...,1) on n+1 parts, random signs."""

    def sample(size, rng):
        gen = as_generator(rng)
        w = gen.dirichlet(np.ones(n + 1), size=size)[:, :n]
        s = gen.choice([-1.0, 1.0], size=(size, n))
        return radius * w * s

    return sample


def slice_sampler(theta: float, n: int, proposal_factor: int = 20):
    """Points of G_theta^n by rejection.

    Plain rejection from the whole sphere almost never lands in G_theta once
    theta sqrt(n) is well below sqrt(2n/pi), so the proposal is uniform on the
    unit sphere of a random coordinate subspace (support size uniform in 1..n),
    followed by the l1 test.
    """
    cap = theta * math.sqrt(n)

    def sample(size, rng):
        gen = as_generator(rng)
        m = size * proposal_factor
        supp = gen.integers(1, n + 1, size=m)
        g = gen.standard_normal((m, n))
        order = np.argsort(gen.random((m, n)), axis=1)
        mask = order < supp[:, None]
        x = np.where(mask, g, 0.0)
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        ok = np.abs(x).sum(axis=1) <= cap
        return x[ok][:size]

    return sample


def nearest_distances(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Euclidean distance from each query to its nearest point."""
    P = np.asarray(points, dtype=float)
    X = np.asarray(queries, dtype=float)
    p2 = (P * P).sum(axis=1)
    out = np.empty(X.shape[0])
    step = max(1, _CHUNK // max(1, P.shape[0]))
    for i in range(0, X.shape[0], step):
        xb = X[i : i + step]
        d2 = (xb * xb).sum(axis=1)[:, None] + p2[None, :] - 2.0 * xb @ P.T
        out[i : i + step] = np.sqrt(np.clip(d2.min(axis=1), 0.0, None))
    return out


def covering_check(points, radius: float, sampler, trials: int, rng=None) -> float:
    """Largest sampled distance to the net; the net property says it is <= radius."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    X = sampler(trials, as_generator(rng))
    if X.shape[0] == 0:
        raise EmptySampleError("sampler produced no points of the target set")
    if len(points) == 0:
        raise EmptySampleError("target set is nonempty but the net has no points")
    gap = float(nearest_distances(points, X).max())
    if gap > radius:
        log.warning("sampled covering gap %.6g exceeds the net radius %.6g", gap, radius)
    return gap


# -- slice nets ------------------------------------------------------------


@dataclass(frozen=True)
class SliceNet:
    theta: float
    epsilon: float
    n: int
    k: int
    points: np.ndarray
    net_radius: float  # 8 theta sqrt(ln(1/eps)/eps)
    construction_radius: float  # 2 theta sqrt(n/k), valid when nothing was discarded
    proven_radius: float
    discarded: int

    def __len__(self) -> int:
        return self.points.shape[0]


def slice_k(epsilon: float, n: int) -> int:
    return int(math.floor(epsilon * n / (8.0 * math.log(1.0 / epsilon))))


def slice_net(theta: float, epsilon: float, n: int, strict: bool = False, budget: int = NET_BUDGET) -> SliceNet:
    """Net of G_theta^n from the scaled lattice (theta sqrt(n)/k) Z^n ∩ theta sqrt(n) B_1^n.

    Each lattice point p whose r-ball reaches the sphere (r = theta sqrt(n/k))
    is snapped to p/|p| and kept if it satisfies the l1 constraint. With
    ``strict`` the window 8 ln(n)/n < epsilon < 1/2 is enforced; otherwise only
    0 < epsilon < 1/2 and k >= 1.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if strict and not epsilon > 8.0 * math.log(n) / n:
        raise ValueError(f"epsilon={epsilon} is below 8 ln(n)/n = {8 * math.log(n) / n:.4g}")
    k = slice_k(epsilon, n)
    if k < 1:
        raise ValueError(f"k = floor(eps n / (8 ln(1/eps))) = 0 for eps={epsilon}, n={n}")
    cap = theta * math.sqrt(n)
    lat = lattice_net(k, n, budget=budget)
    r = cap / math.sqrt(k)
    P = lat.points.astype(float) * (cap / k)
    norms = np.linalg.norm(P, axis=1)
    reach = (norms > 0) & (np.abs(norms - 1.0) <= r)
    Q = P[reach] / norms[reach, None]
    ok = np.abs(Q).sum(axis=1) <= cap + 1e-9
    discarded = int((~ok).sum())
    Q = Q[ok]
    if cap >= 1.0:
        # +-e_i always lie in G_theta once it is nonempty
        eye = np.eye(n)
        Q = np.vstack([Q, eye, -eye])
    if Q.shape[0]:
        Q = np.unique(np.round(Q, 15), axis=0)
        Q /= np.linalg.norm(Q, axis=1, keepdims=True)
    if cap < 1.0:
        proven = 0.0  # G_theta is empty
    else:
        # |x|_inf >= 1/|x|_1 >= 1/cap on G_theta, so some +-e_i is within sqrt(2 - 2/cap)
        proven = math.sqrt(max(0.0, 2.0 - 2.0 / cap))
        if discarded == 0:
            proven = min(proven, 2.0 * r)
    return SliceNet(
        theta=theta,
        epsilon=epsilon,
        n=n,
        k=k,
        points=Q,
        net_radius=8.0 * theta * math.sqrt(math.log(1.0 / epsilon) / epsilon),
        construction_radius=2.0 * r,
        proven_radius=proven,
        discarded=discarded,
    )


# -- certification ---------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    lambda_: float
    epsilon: float
    delta: float
    certified: bool
    violating_point: np.ndarray | None
    implied_bound: float  # lambda sqrt(n): every line has a shadow diameter above it
    threshold: float
    net_size: int
    radius_mode: str


def nominal_delta(lam: float, epsilon: float) -> float:
    return 8.0 * lam * math.sqrt(math.log(1.0 / epsilon) / epsilon)


def certify_min_diameter(
    O,
    lam: float,
    epsilon: float,
    radius: str = "nominal",
    net: SliceNet | None = None,
    strict: bool = False,
    budget: int = NET_BUDGET,
) -> Certificate:
    """Scan a delta-net of G_lambda (unit x in R^{2n} with |x|_1 <= lambda sqrt(n)).

    If |A y|_1 > sqrt(n) (lambda + sqrt(2) delta) for every net point y, with
    A = O^T J O, then no unit z has both |z|_1 and |A z|_1 at most lambda sqrt(n),
    so every complex line L has diam(pi_L(O Q)) > lambda sqrt(n).

    ``radius="nominal"`` uses delta = 8 lambda sqrt(ln(1/eps)/eps), raised to the
    net's proven covering radius if that is larger; ``radius="proven"`` uses the
    proven radius alone.
    """
    O = check_orthogonal(O)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    N = O.shape[0]
    n = N // 2
    if net is None:
        net = slice_net(lam / math.sqrt(2.0), epsilon, N, strict=strict, budget=budget)
    elif net.n != N:
        raise ValueError(f"net lives in R^{net.n}, rotation in R^{N}")
    if radius == "nominal":
        delta = max(nominal_delta(lam, epsilon), net.proven_radius)
    elif radius == "proven":
        delta = net.proven_radius
    else:
        raise ValueError(f"unknown radius mode {radius!r}")
    A = rotated_complex_structure(O)
    tau = math.sqrt(n) * (lam + math.sqrt(2.0) * delta)
    Y = net.points
    violating = None
    step = max(1, _CHUNK // N)
    for i in range(0, Y.shape[0], step):
        vals = np.abs(Y[i : i + step] @ A.T).sum(axis=1)
        bad = np.flatnonzero(vals <= tau)
        if bad.size:
            violating = Y[i + int(bad[0])].copy()
            break
    return Certificate(
        lambda_=lam,
        epsilon=epsilon,
        delta=delta,
        certified=violating is None,
        violating_point=violating,
        implied_bound=lam * math.sqrt(n),
        threshold=tau,
        net_size=int(Y.shape[0]),
        radius_mode=radius,
    )


# -- serialisation ---------------------------------------------------------


def _float_token(v) -> str:
    s = f"{float(v):.17g}"
    # keep slice-net files distinguishable from integer lattices
    return s if any(c in s for c in ".eE") or not s.lstrip("-").isdigit() else s + ".0"


def format_net(points: np.ndarray, k: int, n: int, radius: float) -> str:
    pts = np.asarray(points)
    buf = io.StringIO()
    buf.write(f"# net k={k} n={n} radius={radius!r} count={pts.shape[0]}\n")
    integer = np.issubdtype(pts.dtype, np.integer)
    for row in pts:
        if integer:
            buf.write(" ".join(str(int(v)) for v in row))
        else:
            buf.write(" ".join(_float_token(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def write_net(net, path) -> None:
    radius = net.covering_radius_bound if isinstance(net, LatticeNet) else net.net_radius
    text = format_net(net.points, net.k, net.n, radius)
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def parse_net(text: str):
    """Inverse of :func:`format_net`: returns (header dict, points)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# net "):
        raise ValueError("missing '# net' header")
    header = dict(tok.split("=", 1) for tok in lines[0][len("# net ") :].split())
    meta = {"k": int(header["k"]), "n": int(header["n"]), "radius": float(header["radius"]), "count": int(header["count"])}
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != meta["count"]:
        raise ValueError(f"header says {meta['count']} points, found {len(body)}")
    if not body:
        return meta, np.zeros((0, meta["n"]))
    is_int = all("." not in ln and "e" not in ln.lower() for ln in body)
    if is_int:
        pts = np.array([[int(t) for t in ln.split()] for ln in body], dtype=np.int16)
    else:
        pts = np.array([[float(t) for t in ln.split()] for ln in body])
    return meta, pts


def read_net(path):
    return parse_net(Path(path).read_text(encoding="utf-8"))
