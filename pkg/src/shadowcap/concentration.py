"""The law of O^T J O y under Haar O, l1 / l_inf statistics, Gaussian tail bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

from .linalg import apply_j, as_generator, haar_orthogonal, haar_orthogonal_batch

QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)


@dataclass(frozen=True)
class SubsphereSample:
    y: np.ndarray
    x: np.ndarray
    source: str  # "pushforward" or "direct"


@dataclass
class NormStats:
    n_samples: int
    mean: float
    std: float
    quantiles: list
    norm: str
    pass_flags: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, values, norm: str, **flags) -> "NormStats":
        v = np.asarray(values, dtype=float)
        q = np.quantile(v, QUANTILE_LEVELS)
        return cls(
            n_samples=int(v.size),
            mean=float(v.mean()),
            std=float(v.std(ddof=1)) if v.size > 1 else 0.0,
            quantiles=[(p, float(x)) for p, x in zip(QUANTILE_LEVELS, q)],
            norm=norm,
            pass_flags=dict(flags),
        )

    def to_record(self, estimator: str, n: int) -> dict:
        return {
            "estimator": estimator,
            "n": n,
            "samples": self.n_samples,
            "mean": self.mean,
            "std": self.std,
            "quantiles": [[p, x] for p, x in self.quantiles],
            "pass_flags": self.pass_flags,
        }


def _check_unit(y, even: bool = True) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] < 2 or (even and y.shape[0] % 2):
        raise ValueError("y must be a vector of even length" if even else "y must be a vector of length >= 2")
    if abs(np.linalg.norm(y) - 1.0) > 1e-12:
        raise ValueError("y must be a unit vector")
    return y


def pushforward_sample(y, rng) -> SubsphereSample:
    """x = O^T J O y for one Haar draw O."""
    y = _check_unit(y)
    O = haar_orthogonal(y.shape[0], rng)
    return SubsphereSample(y=y, x=O.T @ apply_j(O @ y), source="pushforward")


def pushforward_samples(y, size: int, rng) -> np.ndarray:
    """``size`` draws of O^T J O y, one row each (batched QR)."""
    y = _check_unit(y)
    gen = as_generator(rng)
    out = np.empty((size, y.shape[0]))
    block = max(1, 2**20 // (y.shape[0] ** 2))
    for i in range(0, size, block):
        Os = haar_orthogonal_batch(y.shape[0], min(block, size - i), gen)
        z = apply_j(Os @ y)
        out[i : i + block] = np.einsum("kji,kj->ki", Os, z)
    return out


def direct_samples(y, size: int, rng) -> np.ndarray:
    """Uniform on the unit sphere of the hyperplane orthogonal to y (any dimension >= 2)."""
    y = _check_unit(y, even=False)
    gen = as_generator(rng)
    g = gen.standard_normal((size, y.shape[0]))
    g -= np.outer(g @ y, y)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def direct_sample(y, rng) -> SubsphereSample:
    return SubsphereSample(y=_check_unit(y, even=False), x=direct_samples(y, 1, rng)[0], source="direct")


def sphere_abs_coordinate_mean(m: int) -> float:
    """E|u_1| for u uniform on S^{m-1}, by quadrature of the marginal density.

    The marginal of one coordinate is (1 - t^2)^{(m-3)/2} / B(1/2, (m-1)/2) on [-1, 1].
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    a = (m - 3) / 2.0
    norm = special.beta(0.5, (m - 1) / 2.0)
    val, _ = integrate.quad(lambda t: t * (1.0 - t * t) ** a, 0.0, 1.0, limit=200)
    return 2.0 * val / norm


def l1_mean_exact(y) -> float:
    """E ||x||_1 for x uniform on the unit sphere orthogonal to y."""
    y = _check_unit(y)
    c = sphere_abs_coordinate_mean(y.shape[0] - 1)
    return c * float(np.sqrt(np.clip(1.0 - y * y, 0.0, None)).sum())


def l1_closed_form(y) -> float:
    """sqrt(2/pi) / sqrt(2n - 1) * sum_j sqrt(1 - y_j^2)."""
    y = _check_unit(y)
    m = y.shape[0] - 1
    return math.sqrt(2.0 / math.pi) / math.sqrt(m) * float(np.sqrt(np.clip(1.0 - y * y, 0.0, None)).sum())


def l1_expectation_check(y, n_samples: int, rng) -> NormStats:
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000")
    y = _check_unit(y)
    n = y.shape[0] // 2
    x = pushforward_samples(y, n_samples, rng)
    vals = np.abs(x).sum(axis=1)
    mean = float(vals.mean())
    proxy = l1_closed_form(y)
    return NormStats.from_values(
        vals,
        "l1",
        mean_ge_half_sqrt_n=bool(mean >= 0.5 * math.sqrt(n)),
        closed_form=proxy,
        within_5pct_of_closed_form=bool(abs(mean - proxy) <= 0.05 * proxy),
    )


def linf_column_values(n: int, n_samples: int, rng) -> np.ndarray:
    """||O^T J O e_1||_inf for ``n_samples`` Haar draws in dimension 2n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    y = np.zeros(2 * n)
    y[0] = 1.0
    return np.abs(pushforward_samples(y, n_samples, rng)).max(axis=1)


def linf_column_stats(n: int, n_samples: int, rng) -> NormStats:
    vals = linf_column_values(n, n_samples, rng)
    return NormStats.from_values(
        vals,
        "linf",
        within_unit=bool(vals.max() <= 1.0 + 1e-12),
        above_inv_sqrt_2n=bool(vals.min() >= 1.0 / math.sqrt(2 * n) - 1e-12),
        rate=math.sqrt(math.log(n) / n),
    )


def gaussian_linf_tail(alpha: float, k: int, form: str = "stated") -> float:
    """Closed-form bound on P(||g||_inf <= alpha) for a standard Gaussian g in R^k.

    ``form="stated"``: [1 - sqrt(2/pi) exp(-alpha^2/2) / alpha]^k, base clipped at 0.
    Because 1 - Phi(a) < phi(a)/a, this is in fact *below* the true probability
    for every alpha > 0.

    ``form="mills"``: [1 - sqrt(2/pi) alpha exp(-alpha^2/2) / (1 + alpha^2)]^k,
    which is a genuine upper bound via 1 - Phi(a) >= phi(a) a / (1 + a^2).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    c = math.sqrt(2.0 / math.pi) * math.exp(-alpha * alpha / 2.0)
    if form == "stated":
        base = 1.0 - c / alpha
    elif form == "mills":
        base = 1.0 - c * alpha / (1.0 + alpha * alpha)
    else:
        raise ValueError(f"unknown form {form!r}")
    return max(base, 0.0) ** k


def gaussian_linf_prob(alpha: float, k: int) -> float:
    """Exact P(||g||_inf <= alpha) = erf(alpha / sqrt 2)^k."""
    return float(special.erf(alpha / math.sqrt(2.0)) ** k)


def gaussian_linf_mc(alpha: float, k: int, n_draws: int, rng) -> float:
    gen = as_generator(rng)
    hits = 0
    block = max(1, 2**22 // k)
    for i in range(0, n_draws, block):
        g = gen.standard_normal((min(block, n_draws - i), k))
        hits += int((np.abs(g).max(axis=1) <= alpha).sum())
    return hits / n_draws


def gaussian_linf_validity(alphas, ks, n_draws: int, rng, form: str = "stated") -> list:
    """Grid of (alpha, k, bound, exact, mc, holds) rows; ``holds`` compares bound with exact."""
    gen = as_generator(rng)
    rows = []
    for a in alphas:
        for k in ks:
            bound = gaussian_linf_tail(a, k, form)
            exact = gaussian_linf_prob(a, k)
            mc = gaussian_linf_mc(a, k, n_draws, gen)
            rows.append({"alpha": float(a), "k": int(k), "bound": bound, "exact": exact, "mc": mc, "holds": bool(exact <= bound)})
    return rows


def chi_square_tail(epsilon: float, k: int) -> float:
    """exp(-eps^2 k / 4), a bound on P(||g||_2^2 >= k / (1 - eps))."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.exp(-epsilon * epsilon * k / 4.0)


def chi_square_tail_mc(epsilon: float, k: int, n_draws: int, rng) -> float:
    """Monte Carlo P(||g||_2^2 >= k / (1 - eps)), with ||g||^2 drawn as chi^2_k."""
    gen = as_generator(rng)
    return float((gen.chisquare(k, size=n_draws) >= k / (1.0 - epsilon)).mean())


def chi_square_tail_exact(epsilon: float, k: int) -> float:
    return float(stats.chi2.sf(k / (1.0 - epsilon), k))


LIPSCHITZ_FUNCTIONS = {"l1_norm": lambda x: np.abs(x).sum(axis=1)}


def lipschitz_tail_empirical(f_id: str, n: int, t_grid, n_samples: int, rng) -> dict:
    """Empirical P(|f - E f| >= t) on S^{2n-1}, plus the slope of log P against t^2."""
    if f_id not in LIPSCHITZ_FUNCTIONS:
        raise ValueError(f"unknown function {f_id!r}")
    gen = as_generator(rng)
    g = gen.standard_normal((n_samples, 2 * n))
    x = g / np.linalg.norm(g, axis=1, keepdims=True)
    f = LIPSCHITZ_FUNCTIONS[f_id](x)
    dev = np.abs(f - f.mean())
    t = np.asarray(t_grid, dtype=float)
    probs = np.array([(dev >= ti).mean() for ti in t])
    pos = probs > 0
    slope = float(np.polyfit(t[pos] ** 2, np.log(probs[pos]), 1)[0]) if pos.sum() >= 2 else float("nan")
    return {
        "f": f_id,
        "n": n,
        "lipschitz": math.sqrt(2 * n),
        "t": t.tolist(),
        "prob": probs.tolist(),
        "slope_logp_vs_t2": slope,
    }
