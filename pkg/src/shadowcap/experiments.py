"""Monte Carlo experiments over Haar rotations.

Every sample draws its rotation and optimizer stream from a seed derived from
(master seed, experiment, n, sample index), so records do not depend on the
order in which n values or samples are visited.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import concentration as conc
from . import nets
from .linalg import RngSeed, haar_orthogonal, random_unit_vector
from .records import ExperimentRecord, derive_seed
from .search import (
    OptimizerConfig,
    j_operator_norm_cube,
    minimize_diam_proxy,
    minimize_shadow_area,
    octahedron_section_diameter,
    width_direction_upper_bound,
)

EXPERIMENTS = (
    "scaling_cUn",
    "scaling_sandwich",
    "rare_event",
    "concentration",
    "nets_audit",
    "section_diameter",
)

TOL = 1e-9


class InvariantViolation(RuntimeError):
    """An emitted value broke one of its bracket invariants."""


@dataclass
class ExperimentConfig:
    experiment: str
    n_list: list
    samples_per_n: int
    seed: int = 0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    output_path: str | None = None
    format: str = "csv"
    # experiment-specific knobs (lambda for rare_event, grids for nets_audit, ...)
    params: dict = field(default_factory=dict)
    record_timing: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if not self.n_list or any(int(n) < 2 for n in self.n_list):
            raise ValueError("n_list must be nonempty with every n >= 2")
        if self.samples_per_n < 1:
            raise ValueError("samples_per_n must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        self.n_list = [int(n) for n in self.n_list]

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        opt = dict(d.pop("optimizer", {}) or {})
        if "rng" in opt:
            r = opt.pop("rng")
            opt["rng"] = RngSeed(**r) if isinstance(r, dict) else RngSeed(int(r))
        return cls(optimizer=OptimizerConfig(**opt), **d)

    def to_dict(self) -> dict:
        d = asdict(self)
        return d


def load_config(path) -> ExperimentConfig:
    return ExperimentConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    log_constant: float
    r_squared: float
    points: list


def fit_power_law(xs, ys) -> PowerLawFit:
    """Least squares of log y on log x."""
    if len(set(xs)) < 2:
        raise ValueError("a power law needs at least two distinct x values")
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    slope, icept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icept)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(slope), float(icept), min(max(r2, 0.0), 1.0), [(float(x), float(y)) for x, y in zip(xs, ys)])


@dataclass
class ExperimentResult:
    records: list
    summary: dict
    fit: PowerLawFit | None = None


class _Recorder:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.records = []

    def add(self, n, i, seed, estimator, value, elapsed_ms=0.0):
        ms = float(elapsed_ms) if self.cfg.record_timing else 0.0
        self.records.append(ExperimentRecord(self.cfg.experiment, int(n), int(i), int(seed), estimator, float(value), ms))

    def values(self, estimator, n):
        return np.array([r.value for r in self.records if r.estimator == estimator and r.n == n])


def _sample(cfg: ExperimentConfig, n: int, i: int):
    seed = derive_seed(cfg.seed, cfg.experiment, n, i)
    O = haar_orthogonal(2 * n, RngSeed(seed, 0))
    opt = replace(cfg.optimizer, rng=RngSeed(seed, 1))
    return seed, O, opt


def _require(cond: bool, msg: str):
    if not cond:
        raise InvariantViolation(msg)


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1e3


def run_scaling_cUn(cfg: ExperimentConfig) -> ExperimentResult:
    rec = _Recorder(cfg)
    for n in sorted(cfg.n_list):
        cap = 4.0 * math.sqrt(2 * n)
        for i in range(cfg.samples_per_n):
            t0 = time.perf_counter()
            seed, O, opt = _sample(cfg, n, i)
            res = minimize_shadow_area(O, opt)
            prox = minimize_diam_proxy(O, opt, extra_starts=O.T @ res.best_line.e)
            ub = width_direction_upper_bound(O)["area_ub"]
            inv_j = 1.0 / j_operator_norm_cube(O)
            ms = _ms(t0)
            a = res.best_value
            _require(a <= cap + TOL, f"n={n} i={i}: min area {a} above 4 sqrt(2n) = {cap}")
            _require(a >= inv_j - TOL, f"n={n} i={i}: min area {a} below 1/||J|| = {inv_j}")
            _require(a >= prox.best_value - TOL, f"n={n} i={i}: min area {a} below diam proxy {prox.best_value}")
            _require(a <= ub + TOL, f"n={n} i={i}: min area {a} above the width-line area {ub}")
            rec.add(n, i, seed, "min_area", a, ms)
            rec.add(n, i, seed, "min_area_converged", float(res.converged), ms)
            rec.add(n, i, seed, "diam_proxy", prox.best_value, ms)
            rec.add(n, i, seed, "width_area_ub", ub, ms)
            rec.add(n, i, seed, "inv_j_norm", inv_j, ms)
    ns = sorted(cfg.n_list)
    means = [float(rec.values("min_area", n).mean()) for n in ns]
    fit = fit_power_law(ns, means) if len(ns) > 1 else None
    summary = {
        "experiment": cfg.experiment,
        "n": ns,
        "mean_min_area": means,
        "mean_min_area_over_sqrt_n": [m / math.sqrt(n) for m, n in zip(means, ns)],
        "fit": asdict(fit) if fit else None,
    }
    return ExperimentResult(rec.records, summary, fit)


def run_scaling_sandwich(cfg: ExperimentConfig) -> ExperimentResult:
    rec = _Recorder(cfg)
    with_area = cfg.params.get("with_min_area", True)
    for n in sorted(cfg.n_list):
        for i in range(cfg.samples_per_n):
            t0 = time.perf_counter()
            seed, O, opt = _sample(cfg, n, i)
            inv_j = 1.0 / j_operator_norm_cube(O)
            _require(1.0 - TOL <= inv_j <= math.sqrt(2 * n) + TOL, f"n={n} i={i}: 1/||J|| = {inv_j} outside [1, sqrt(2n)]")
            rec.add(n, i, seed, "inv_j_norm", inv_j, _ms(t0))
            rec.add(n, i, seed, "sandwich_upper", 4.0 * inv_j, _ms(t0))
            if with_area:
                a = minimize_shadow_area(O, opt).best_value
                _require(a >= inv_j - TOL, f"n={n} i={i}: min area {a} below 1/||J|| = {inv_j}")
                rec.add(n, i, seed, "min_area", a, _ms(t0))
    ns = sorted(cfg.n_list)
    inv = [float(rec.values("inv_j_norm", n).mean()) for n in ns]
    consts = [m / math.sqrt(n / math.log(n)) for m, n in zip(inv, ns)]
    fit = fit_power_law(ns, inv) if len(ns) > 1 else None
    summary = {
        "experiment": cfg.experiment,
        "n": ns,
        "mean_inv_j_norm": inv,
        "constant_vs_sqrt_n_over_ln_n": consts,
        "constant_spread": max(consts) / min(consts),
        "fit": asdict(fit) if fit else None,
    }
    if with_area:
        area = [float(rec.values("min_area", n).mean()) for n in ns]
        ratio = [a / b for a, b in zip(area, inv)]
        summary["mean_min_area"] = area
        summary["ratio_area_over_inv_j"] = ratio
        summary["ratio_strictly_increasing"] = bool(all(b > a for a, b in zip(ratio, ratio[1:])))
    return ExperimentResult(rec.records, summary, fit)


def run_rare_event(cfg: ExperimentConfig, lam: float | None = None) -> ExperimentResult:
    lam = float(cfg.params.get("lambda", 0.05) if lam is None else lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    # optional net certificate per sample: {"lambda": .., "epsilon": .., "radius": "proven"}
    cert = cfg.params.get("certify")
    rec = _Recorder(cfg)
    freq = {}
    n_cert = {}
    for n in sorted(cfg.n_list):
        hits = 0
        n_cert[n] = 0
        net = None
        if cert:
            net = nets.slice_net(cert["lambda"] / math.sqrt(2.0), cert["epsilon"], 2 * n)
        for i in range(cfg.samples_per_n):
            t0 = time.perf_counter()
            seed, O, opt = _sample(cfg, n, i)
            p = minimize_diam_proxy(O, opt).best_value
            _require(p >= 1.0 - TOL, f"n={n} i={i}: diam proxy {p} below 1")
            event = p <= lam * math.sqrt(n)
            hits += event
            rec.add(n, i, seed, "diam_proxy", p, _ms(t0))
            rec.add(n, i, seed, "small_diameter_event", float(event), _ms(t0))
            if cert:
                c = nets.certify_min_diameter(O, cert["lambda"], cert["epsilon"], radius=cert.get("radius", "proven"), net=net)
                if c.certified:
                    _require(p >= c.implied_bound - TOL, f"n={n} i={i}: certified {c.implied_bound} but proxy {p}")
                n_cert[n] += c.certified
                rec.add(n, i, seed, "certified", float(c.certified), _ms(t0))
        freq[n] = hits / cfg.samples_per_n
    ns = sorted(freq)
    f = [freq[n] for n in ns]
    summary = {
        "experiment": cfg.experiment,
        "lambda": lam,
        "n": ns,
        # the optimizer can only overshoot the minimum, so this over-counts events
        "event_frequency_upper_estimate": f,
        "frequency_nonincreasing": bool(all(b <= a for a, b in zip(f, f[1:]))),
    }
    if cert:
        summary["certified_fraction"] = [n_cert[n] / cfg.samples_per_n for n in ns]
    return ExperimentResult(rec.records, summary)


def _y_choices(n: int, seed: int) -> dict:
    e1 = np.zeros(2 * n)
    e1[0] = 1.0
    return {
        "e1": e1,
        "random": random_unit_vector(2 * n, RngSeed(seed, 2)),
        "flat": np.full(2 * n, 1.0 / math.sqrt(2 * n)),
    }


def run_concentration(cfg: ExperimentConfig) -> ExperimentResult:
    rec = _Recorder(cfg)
    stats = []
    for n in sorted(cfg.n_list):
        seed = derive_seed(cfg.seed, cfg.experiment, n, 0)
        for j, (name, y) in enumerate(_y_choices(n, seed).items()):
            x = conc.pushforward_samples(y, cfg.samples_per_n, RngSeed(seed, 10 + j))
            orth = float(np.abs(x @ y).max())
            _require(orth < 1e-10, f"n={n} y={name}: |<x, y>| = {orth}")
            vals = np.abs(x).sum(axis=1)
            for i, v in enumerate(vals):
                rec.add(n, i, seed, f"l1_pushforward_{name}", v)
            st = conc.NormStats.from_values(
                vals,
                "l1",
                mean_ge_half_sqrt_n=bool(vals.mean() >= 0.5 * math.sqrt(n)),
                orthogonality_max=orth,
            )
            stats.append(st.to_record(f"l1_pushforward_{name}", n))
        lv = conc.linf_column_values(n, cfg.samples_per_n, RngSeed(seed, 20))
        _require(lv.max() <= 1.0 + TOL and lv.min() >= 1.0 / math.sqrt(2 * n) - TOL, f"n={n}: l_inf column outside [1/sqrt(2n), 1]")
        for i, v in enumerate(lv):
            rec.add(n, i, seed, "linf_column", v)
        st = conc.NormStats.from_values(lv, "linf", rate=math.sqrt(math.log(n) / n))
        stats.append(st.to_record("linf_column", n))
    return ExperimentResult(rec.records, {"experiment": cfg.experiment, "stats": stats})


DEFAULT_SLICE_GRID = [[0.25, 0.25, 64], [0.3, 0.45, 32]]


def run_nets_audit(cfg: ExperimentConfig) -> ExperimentResult:
    rec = _Recorder(cfg)
    k_list = cfg.params.get("k_list", [1, 2, 3])
    slice_grid = cfg.params.get("slice_grid", DEFAULT_SLICE_GRID)
    trials = cfg.samples_per_n
    skipped = []
    for n in sorted(cfg.n_list):
        for k in k_list:
            seed = derive_seed(cfg.seed, cfg.experiment, n, k)
            try:
                net = nets.lattice_net(k, n)
            except nets.NetBudgetExceeded as exc:
                skipped.append({"k": k, "n": n, "reason": str(exc)})
                continue
            bound = net.cardinality_bound
            gap = nets.covering_check(net.points, net.covering_radius_bound, nets.l1_ball_sampler(k, n), trials, RngSeed(seed))
            _require(len(net) <= bound, f"k={k} n={n}: count {len(net)} above bound {bound}")
            _require(gap <= net.covering_radius_bound + TOL, f"k={k} n={n}: gap {gap} above sqrt(k)")
            rec.add(n, k, seed, "lattice_count", len(net))
            rec.add(n, k, seed, "lattice_bound", bound)
            rec.add(n, k, seed, "lattice_gap", gap)
            rec.add(n, k, seed, "lattice_radius", net.covering_radius_bound)
    for j, (theta, eps, n) in enumerate(slice_grid):
        n = int(n)
        seed = derive_seed(cfg.seed, cfg.experiment + "/slice", n, j)
        try:
            sn = nets.slice_net(theta, eps, n)
        except nets.NetBudgetExceeded as exc:
            skipped.append({"theta": theta, "epsilon": eps, "n": n, "reason": str(exc)})
            continue
        gap = nets.covering_check(sn.points, sn.net_radius, nets.slice_sampler(theta, n), trials, RngSeed(seed))
        _require(gap <= sn.net_radius + TOL, f"slice {theta, eps, n}: gap {gap} above {sn.net_radius}")
        _require(len(sn) <= math.exp(eps * n), f"slice {theta, eps, n}: {len(sn)} points above exp(eps n)")
        rec.add(n, j, seed, "slice_count", len(sn))
        rec.add(n, j, seed, "slice_exp_eps_n", math.exp(eps * n))
        rec.add(n, j, seed, "slice_gap", gap)
        rec.add(n, j, seed, "slice_radius", sn.net_radius)
        rec.add(n, j, seed, "slice_proven_radius", sn.proven_radius)
    return ExperimentResult(rec.records, {"experiment": cfg.experiment, "skipped": skipped})


def run_section_diameter(cfg: ExperimentConfig) -> ExperimentResult:
    rec = _Recorder(cfg)
    for n in sorted(cfg.n_list):
        for i in range(cfg.samples_per_n):
            t0 = time.perf_counter()
            seed, O, opt = _sample(cfg, n, i)
            area = minimize_shadow_area(O, opt)
            prox = minimize_diam_proxy(O, opt, extra_starts=O.T @ area.best_line.e)
            sec = octahedron_section_diameter(O, opt, extra_starts=prox.point)
            literal = area.best_value >= sec.diameter
            halves = prox.best_value >= sec.m2 / 2.0 - TOL
            _require(literal, f"n={n} i={i}: min area {area.best_value} below section diameter {sec.diameter}")
            _require(halves, f"n={n} i={i}: proxy {prox.best_value} below m2/2 = {sec.m2 / 2}")
            ms = _ms(t0)
            rec.add(n, i, seed, "section_diameter", sec.diameter, ms)
            rec.add(n, i, seed, "section_m2", sec.m2, ms)
            rec.add(n, i, seed, "diam_proxy", prox.best_value, ms)
            rec.add(n, i, seed, "min_area", area.best_value, ms)
            rec.add(n, i, seed, "literal_check", float(literal), ms)
    ns = sorted(cfg.n_list)
    scaled = [float(rec.values("section_diameter", n).mean()) * math.sqrt(n) for n in ns]
    summary = {
        "experiment": cfg.experiment,
        "n": ns,
        "mean_section_diameter_times_sqrt_n": scaled,
        "band_ratio": max(scaled) / min(scaled),
    }
    return ExperimentResult(rec.records, summary)


RUNNERS = {
    "scaling_cUn": run_scaling_cUn,
    "scaling_sandwich": run_scaling_sandwich,
    "rare_event": run_rare_event,
    "concentration": run_concentration,
    "nets_audit": run_nets_audit,
    "section_diameter": run_section_diameter,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    result = RUNNERS[cfg.experiment](cfg)
    result.records.sort(key=lambda r: (r.n, r.sample_index))
    return result
