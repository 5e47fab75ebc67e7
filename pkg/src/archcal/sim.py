"""Monte Carlo studies: diagonal comparison (sim 1), Gumbel calibration (sim 2),
bootstrap calibration on Gaussian data (sim 3).

Every repetition draws its randomness from ``derive(cfg.seed, rep)``, so the
output does not depend on how repetitions are spread over worker processes.
"""

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import ndtr, ndtri

from .generator import ParametricGumbel, copula_diagonal, fit_generator_gnz, fit_generator_pairwise
from .mtp import (
    bootstrap_lfc_statistics,
    calibrate,
    calibrate_bonferroni,
    calibrate_oracle_gumbel,
    decide,
    evaluate,
    p_two_sided_normal,
)
from .rng import derive
from .sampling import sample_gauss_equicorr, sample_gumbel, tau_to_theta

SCHEMA = "archcal v1"
ALL_METHODS = ("gnz", "pairwise", "bonferroni", "oracle")
DEFAULT_METHODS = {1: ("gnz", "pairwise"), 2: ALL_METHODS, 3: ("gnz", "pairwise", "bonferroni")}

# sub-stream ids inside one repetition
_CALIBRATION, _OBSERVED, _PAIRS, _BOOTSTRAP = range(4)


def _grid(*blocks):
    out = []
    for start, stop, step in blocks:
        k = 0
        while start + k * step <= stop + 1e-9:
            out.append(round(start + k * step, 10))
            k += 1
    return sorted(set(out))


FULL_GRIDS = {
    "B": _grid((10, 100, 10), (200, 1000, 100)),
    "n": _grid((10, 100, 10), (200, 1000, 100)),
    "m": _grid((2, 10, 1), (20, 100, 10), (200, 1000, 100)),
    "tau": _grid((0.0, 0.9, 0.05)),
    "rho": _grid((0.0, 0.95, 0.05)),
}
QUICK_CAPS = {"B": 500, "m": 100}
QUICK_L = 200
SWEEPABLE = {"tau", "B", "n", "m", "mu", "rho", "pi0", "alpha", "M", "L"}
_INT_FIELDS = {"B", "n", "m", "M", "L"}


@dataclass(frozen=True)
class SimConfig:
    sim: int
    tau: float = 0.5
    B: int = 100
    n: int = 100
    m: int = 6
    mu: float = 0.2
    rho: float | None = None
    pi0: float = 0.5
    alpha: float = 0.05
    L: int = 1000
    M: int = 100
    methods: tuple = ()
    seed: int = 0
    sides: int = 2

    def __post_init__(self):
        if self.sim not in (1, 2, 3):
            raise ValueError(f"sim must be 1, 2 or 3, got {self.sim}")
        methods = tuple(self.methods) or DEFAULT_METHODS[self.sim]
        unknown = set(methods) - set(ALL_METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if self.sim == 1:
            methods = tuple(mt for mt in methods if mt in ("gnz", "pairwise"))
            if not methods:
                raise ValueError("simulation 1 compares fitted generators: use gnz and/or pairwise")
        if self.sim == 3 and "oracle" in methods:
            raise ValueError("simulation 3 has no Gumbel truth; the oracle method is unavailable")
        object.__setattr__(self, "methods", methods)
        if not 0.0 <= self.tau < 1.0:
            raise ValueError("tau must lie in [0, 1)")
        if self.B < 2 or self.m < 2 or self.n < 2 or self.L < 1 or self.M < 1:
            raise ValueError("need B >= 2, m >= 2, n >= 2, L >= 1, M >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 <= self.pi0 <= 1.0:
            raise ValueError("pi0 must lie in [0, 1]")
        if self.rho is not None and not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        if self.sides not in (1, 2):
            raise ValueError("sides must be 1 or 2")
        if self.sides == 1 and self.sim != 2:
            raise ValueError("one-sided p-values are only available in simulation 2")

    @property
    def theta_star(self) -> float:
        return tau_to_theta(self.tau)

    @property
    def theta(self) -> float:
        """Copula parameter of the observed statistics in simulation 2."""
        return self.theta_star + (1.0 - self.pi0) * self.mu

    @property
    def rho_eff(self) -> float:
        return math.sin(math.pi * self.tau / 2.0) if self.rho is None else self.rho

    @property
    def n_null(self) -> int:
        return int(math.floor(self.pi0 * self.m + 0.5))

    def truth(self) -> np.ndarray:
        """True where H_j holds: the first round(pi0 * m) hypotheses, or all when mu = 0."""
        flags = np.arange(self.m) < self.n_null
        return flags | (self.mu == 0.0)

    def means(self) -> np.ndarray:
        return np.where(self.truth(), 0.0, self.mu)

    def pvalues(self, stats) -> np.ndarray:
        if self.sides == 2:
            return p_two_sided_normal(stats, self.n)
        return ndtr(-math.sqrt(self.n) * np.asarray(stats))


@dataclass
class SimRecord:
    rep: int
    method: str
    alpha_loc: float
    fwe: int
    power: float
    fit_failures: int
    runtime_ms: int = field(default=0, compare=False)


def _fit_level(method, cfg, sample, rep_seed):
    if method == "gnz":
        return calibrate(fit_generator_gnz(sample), cfg.m, cfg.alpha, "gnz")
    if method == "pairwise":
        gen = fit_generator_pairwise(sample, "monte_carlo", cfg.M, derive(rep_seed, _PAIRS))
        return calibrate(gen, cfg.m, cfg.alpha, "pairwise")
    if method == "bonferroni":
        return calibrate_bonferroni(cfg.m, cfg.alpha)
    return calibrate_oracle_gumbel(cfg.theta, cfg.m, cfg.alpha)


def _test(cfg, calib_sample, pvals, rep, rep_seed):
    truth = cfg.truth()
    records = []
    for method in cfg.methods:
        start = time.perf_counter()
        res = _fit_level(method, cfg, calib_sample, rep_seed)
        elapsed = int(round(1000 * (time.perf_counter() - start)))
        out = evaluate(decide(pvals, res.alpha_loc), truth)
        failures = res.diagnostics.get("fit_failures", 0)
        records.append(SimRecord(rep, method, res.alpha_loc, int(out.fwe), out.power, failures, elapsed))
    return records


def sim2_rep(cfg: SimConfig, rep: int):
    """One repetition of the Gumbel calibration study."""
    rep_seed = derive(cfg.seed, rep)
    calib = ndtri(sample_gumbel(cfg.theta_star, cfg.m, cfg.B, derive(rep_seed, _CALIBRATION)))
    u = sample_gumbel(cfg.theta, cfg.m, 1, derive(rep_seed, _OBSERVED))[0]
    stats = cfg.means() + ndtri(u) / math.sqrt(cfg.n)
    pvals = cfg.pvalues(stats)
    return _test(cfg, calib, pvals, rep, rep_seed)


def sim3_rep(cfg: SimConfig, rep: int):
    """One repetition of the bootstrap study on equi-correlated Gaussian data."""
    rep_seed = derive(cfg.seed, rep)
    data = sample_gauss_equicorr(cfg.rho_eff, cfg.means(), cfg.n, derive(rep_seed, _OBSERVED))
    stats = data.mean(axis=0)
    pvals = cfg.pvalues(stats)
    boot = bootstrap_lfc_statistics(data, cfg.B, derive(rep_seed, _BOOTSTRAP))
    return _test(cfg, boot, pvals, rep, rep_seed)


def sim1_grid(B: int) -> np.ndarray:
    return np.arange(B + 2) / (B + 1.0)


def sim1_rep(cfg: SimConfig, rep: int):
    """Fitted diagonals on the grid k / (B + 1) for one Gumbel sample."""
    rep_seed = derive(cfg.seed, rep)
    sample = sample_gumbel(cfg.theta_star, cfg.m, cfg.B, derive(rep_seed, _CALIBRATION))
    u = sim1_grid(cfg.B)
    out = {}
    for method in cfg.methods:
        start = time.perf_counter()
        if method == "gnz":
            gen = fit_generator_gnz(sample)
            failures = int(gen.folded > 0)
        else:
            gen = fit_generator_pairwise(sample, "monte_carlo", cfg.M, derive(rep_seed, _PAIRS))
            failures = gen.fit_failures
        diag = copula_diagonal(gen, cfg.m, u)
        elapsed = int(round(1000 * (time.perf_counter() - start)))
        out[method] = (diag, failures, elapsed)
    return out


_REP_FUNCS = {1: sim1_rep, 2: sim2_rep, 3: sim3_rep}


def worker_count(threads: int | None = None) -> int:
    n = threads if threads is not None else (os.cpu_count() or 1)
    cap = os.environ.get("ARCHCAL_THREADS")
    if cap:
        n = min(n, int(cap))
    return max(1, n)


def _call(args):
    func, cfg, rep = args
    return func(cfg, rep)


def run_reps(cfg: SimConfig, threads: int | None = None):
    """Results of all ``cfg.L`` repetitions, in repetition order."""
    func = _REP_FUNCS[cfg.sim]
    workers = min(worker_count(threads), cfg.L)
    if workers == 1:
        return [func(cfg, rep) for rep in range(cfg.L)]
    jobs = [(func, cfg, rep) for rep in range(cfg.L)]
    chunk = max(1, cfg.L // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, jobs, chunksize=chunk))


# aggregation -----------------------------------------------------------------


def summarize_records(records, methods):
    """Per-method mean/sd of alpha_loc, empirical FWER and mean power."""
    rows = []
    for method in methods:
        sel = [r for r in records if r.method == method]
        a = np.array([r.alpha_loc for r in sel])
        rows.append({
            "method": method,
            "reps": len(sel),
            "mean_alpha_loc": float(a.mean()),
            "sd_alpha_loc": float(a.std(ddof=1)) if a.size > 1 else 0.0,
            "fwer": float(np.mean([r.fwe for r in sel])),
            "mean_power": float(np.mean([r.power for r in sel])),
            "fit_failures": int(sum(r.fit_failures for r in sel)),
        })
    return rows


def summarize_sim1(results, cfg):
    """Pointwise means of the fitted diagonals and of their distance to the truth."""
    u = sim1_grid(cfg.B)
    true = ParametricGumbel(cfg.theta_star)
    truth = copula_diagonal(true, cfg.m, u)
    pointwise, summary = [], []
    for method in cfg.methods:
        diags = np.array([res[method][0] for res in results])
        dist = np.abs(diags - truth)
        mean_c = diags.mean(axis=0)
        mean_d = dist.mean(axis=0)
        for k in range(u.size):
            pointwise.append({
                "method": method, "u": u[k], "true": truth[k],
                "mean_copula": mean_c[k], "mean_abs_dist": mean_d[k],
            })
        summary.append({
            "method": method,
            "reps": len(results),
            "mean_abs_dist": float(dist.mean()),
            "max_mean_abs_dist": float(mean_d.max()),
            "fit_failures": int(sum(res[method][1] for res in results)),
        })
    return pointwise, summary


# output ------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, sim, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {SCHEMA} sim{sim}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row[h]) for h in header])
    return path


def read_csv(path):
    """Rows of an archcal CSV as dicts of strings (comment lines skipped)."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def expand_sweep(var, values, preset="full"):
    """Sweep values for ``var``; an empty list means the preset grid."""
    if var not in SWEEPABLE:
        raise ValueError(f"cannot sweep {var!r}; choose one of {sorted(SWEEPABLE)}")
    if not values:
        if var not in FULL_GRIDS:
            raise ValueError(f"no default grid for {var!r}; give explicit values")
        values = FULL_GRIDS[var]
        if preset == "quick" and var in QUICK_CAPS:
            values = [v for v in values if v <= QUICK_CAPS[var]]
    cast = int if var in _INT_FIELDS else float
    return [cast(v) for v in values]


def run(cfg: SimConfig, out_dir, sweep=None, threads=None, plots=True):
    """Run a study (optionally over a one-parameter sweep) and write its CSVs.

    Returns the paths written.  Files: ``sim<k>_records.csv`` (sims 2/3) or
    ``sim1_pointwise.csv``, ``sim<k>_summary.csv``, ``sim<k>_timings.csv`` and
    SVG plots.
    """
    out_dir = Path(out_dir)
    var, values = sweep if sweep else ("none", [None])
    k = cfg.sim
    detail, summary, timings = [], [], []
    for value in values:
        c = cfg if value is None else replace(cfg, **{var: value})
        tag = {"param": var, "value": "" if value is None else value}
        results = run_reps(c, threads)
        if k == 1:
            pointwise, summ = summarize_sim1(results, c)
            detail += [{**tag, **row} for row in pointwise]
            for rep, res in enumerate(results):
                timings += [{**tag, "rep": rep, "method": mt, "runtime_ms": res[mt][2]} for mt in c.methods]
        else:
            records = [r for reps in results for r in reps]
            detail += [{**tag, **vars(r)} for r in records]
            timings += [{**tag, "rep": r.rep, "method": r.method, "runtime_ms": r.runtime_ms} for r in records]
            summ = summarize_records(records, c.methods)
        summary += [{**tag, **row} for row in summ]

    paths = {}
    if k == 1:
        head = ["param", "value", "method", "u", "true", "mean_copula", "mean_abs_dist"]
        paths["pointwise"] = write_csv(out_dir / "sim1_pointwise.csv", 1, head, detail)
        head = ["param", "value", "method", "reps", "mean_abs_dist", "max_mean_abs_dist", "fit_failures"]
    else:
        head = ["param", "value", "rep", "method", "alpha_loc", "fwe", "power", "fit_failures"]
        paths["records"] = write_csv(out_dir / f"sim{k}_records.csv", k, head, detail)
        head = ["param", "value", "method", "reps", "mean_alpha_loc", "sd_alpha_loc",
                "fwer", "mean_power", "fit_failures"]
    paths["summary"] = write_csv(out_dir / f"sim{k}_summary.csv", k, head, summary)
    # wall-clock times vary between runs, so they live apart from the reproducible tables
    paths["timings"] = write_csv(out_dir / f"sim{k}_timings.csv", k,
                                 ["param", "value", "rep", "method", "runtime_ms"], timings)
    if plots:
        from .plots import emit_plots
        paths["plots"] = emit_plots(paths["summary"], out_dir)
        if k == 1:
            paths["plots"] += emit_plots(paths["pointwise"], out_dir)
    return paths
