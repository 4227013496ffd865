"""Experiment drivers producing tables of accuracy and stability diagnostics.

Every ``run_*`` function takes an :class:`ExperimentConfig` and returns a
:class:`Table`.  Independent cells (one linear system each) may be solved on
a thread pool whose size is capped by ``WAVESYNTH_THREADS``; rows are always
returned in a fixed order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_eps, check_positive, check_strategy
from .estimators import PlaneWaveRegressor, truncation_rule
from .exceptions import ConfigError, NumericalError
from .geometry import CircularMode, FundamentalSolution, RandomSurrogate, Triangle, UnitDisk
from .modal import cached_context
from .sampling import cached_density, sample_nodes
from .solver import RegularizedPseudoInverse, WaveSet, collocation_matrix

__all__ = [
    "ExperimentConfig",
    "Table",
    "run_density",
    "run_epw_stability",
    "run_ppw_instability",
    "run_quasi_optimality",
    "run_sample",
    "run_surrogate_convergence",
    "run_tau_table",
    "run_triangle",
    "worker_count",
]


@dataclass
class Table:
    """Column names and rows of plain Python scalars."""

    columns: list
    rows: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def records(self):
        return [dict(zip(self.columns, r)) for r in self.rows]

    def where(self, **match) -> "Table":
        idx = [self.columns.index(k) for k in match]
        keep = [r for r in self.rows if all(r[i] == v for i, v in zip(idx, match.values()))]
        return Table(list(self.columns), keep)


@dataclass
class ExperimentConfig:
    """Parameters shared by the experiment drivers.

    Unset sweep lists (``None``) select the defaults of each driver.
    ``sigma`` is the residual tolerance of the quasi-optimality search.
    """

    kappa: float = 16.0
    P: int | None = None
    M: int | None = None
    eps: float = 1e-14
    oversampling: float = 2.0
    strategy: str = "sobol"
    seed: int = 0
    sigma: float = 1e-12
    p_values: list | None = None
    M_values: list | None = None
    P_values: list | None = None
    ratios: list | None = None
    strategies: list | None = None
    kinds: list | None = None
    sources: list | None = None
    kappas: list | None = None
    bulk_error: bool = False

    def __post_init__(self):
        self.kappa = check_positive("kappa", self.kappa)
        self.eps = check_eps(self.eps)
        self.oversampling = check_positive("oversampling", self.oversampling)
        if self.oversampling < 1:
            raise ConfigError(f"oversampling: must be at least 1, got {self.oversampling}")
        check_strategy(self.strategy)
        self.seed = check_positive("seed", self.seed, integer=True, allow_zero=True)
        self.sigma = check_positive("sigma", self.sigma)
        if self.P is not None:
            self.P = check_positive("P", self.P, integer=True)
        if self.M is not None:
            self.M = check_positive("M", self.M, integer=True)
        for name in ("M_values", "P_values"):
            vals = getattr(self, name)
            if vals is not None:
                setattr(self, name, [check_positive(name, v, integer=True) for v in vals])
        if self.p_values is not None:
            self.p_values = [int(v) for v in self.p_values]
        if self.ratios is not None:
            self.ratios = [check_positive("ratios", v) for v in self.ratios]
        if self.kappas is not None:
            self.kappas = [check_positive("kappas", v) for v in self.kappas]
        if self.strategies is not None:
            self.strategies = [check_strategy(s) for s in self.strategies]
        if self.kinds is not None:
            for k in self.kinds:
                if k not in ("ppw", "epw"):
                    raise ConfigError(f"kinds: expected 'ppw' or 'epw', got {k!r}")
        if self.sources is not None:
            for s in self.sources:
                if s not in ("edge", "vertex"):
                    raise ConfigError(f"sources: expected 'edge' or 'vertex', got {s!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    def boundary_count(self, M: int, p: int = 0) -> int:
        """Number of boundary points for ``M`` waves and a mode-``p`` target."""
        return max(int(math.ceil(self.oversampling * M)), 2 * abs(p), M)


def worker_count() -> int:
    """Thread pool size from ``WAVESYNTH_THREADS`` (default 1)."""
    raw = os.environ.get("WAVESYNTH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"WAVESYNTH_THREADS: expected an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"WAVESYNTH_THREADS: must be at least 1, got {n}")
    return n


def _map(fn, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _mode_sweep(cfg, kappa, waves, p_values, ctx):
    """Solve for every circular mode in ``p_values`` with one SVD per distinct S."""
    disk = UnitDisk()
    by_S = {}
    for p in p_values:
        by_S.setdefault(cfg.boundary_count(waves.M, p), []).append(p)
    out = {}
    for S, ps in by_S.items():
        pts = disk.boundary_points(S)
        pinv = RegularizedPseudoInverse(collocation_matrix(kappa, waves, pts), cfg.eps)
        for p in ps:
            rep = pinv.solve(CircularMode(ctx, p).trace(pts))
            out[p] = (S, rep)
    return [(p,) + out[p] for p in p_values]


def run_ppw_instability(cfg: ExperimentConfig) -> Table:
    """Approximation of circular waves by equispaced propagative waves.

    Defaults: ``M`` in ``{4, 8, 16, 32} kappa`` and ``p = 0..6 kappa``.
    """
    k = cfg.kappa
    M_values = cfg.M_values or ([cfg.M] if cfg.M else [int(round(f * k)) for f in (4, 8, 16, 32)])
    p_values = cfg.p_values if cfg.p_values is not None else list(range(0, int(round(6 * k)) + 1))
    ctx = cached_context(k, max(max(abs(p) for p in p_values), math.ceil(k)))

    def cell(M):
        return _mode_sweep(cfg, k, WaveSet.propagative(M), p_values, ctx)

    table = Table(["p", "M", "S", "eps", "residual", "coeff_norm", "eps_rank"])
    for M, res in zip(M_values, _map(cell, M_values)):
        for p, S, rep in res:
            table.rows.append([p, M, S, cfg.eps, rep.residual, rep.coeff_norm, rep.eps_rank])
    return table


def run_epw_stability(cfg: ExperimentConfig) -> Table:
    """Approximation of circular waves by Christoffel-sampled evanescent waves.

    Defaults: ``P = 4 kappa``, ``M`` in ``{4, 8, 16, 32} kappa``,
    ``p = -P..P`` and the configured strategy.
    """
    k = cfg.kappa
    P = cfg.P or int(round(4 * k))
    M_values = cfg.M_values or ([cfg.M] if cfg.M else [int(round(f * k)) for f in (4, 8, 16, 32)])
    p_values = cfg.p_values if cfg.p_values is not None else list(range(-P, P + 1))
    strategies = cfg.strategies or [cfg.strategy]
    ctx = cached_context(k, max(max(abs(p) for p in p_values), math.ceil(k)))
    model = cached_density(k, P)

    def cell(item):
        M, strategy = item
        nodes = sample_nodes(model, M, strategy, cfg.seed)
        return nodes.M, _mode_sweep(cfg, k, WaveSet.evanescent(nodes, model), p_values, ctx)

    cells = [(M, s) for s in strategies for M in M_values]
    table = Table(["p", "M", "S", "P", "strategy", "seed", "eps", "residual", "coeff_norm", "eps_rank"])
    for (_, strategy), (M_eff, res) in zip(cells, _map(cell, cells)):
        for p, S, rep in res:
            table.rows.append([p, M_eff, S, P, strategy, cfg.seed, cfg.eps, rep.residual, rep.coeff_norm, rep.eps_rank])
    return table


def surrogate_fit(kappa, P, M, strategy, seed, eps, oversampling=2.0, bulk_error=False):
    """Fit one random surrogate; returns a dict of diagnostics."""
    ctx = cached_context(kappa, max(P, math.ceil(kappa)))
    target = RandomSurrogate(ctx, P, seed)
    disk = UnitDisk()
    S = max(int(math.ceil(oversampling * M)), M)
    X = disk.boundary_points(S)
    reg = PlaneWaveRegressor(kappa=kappa, n_waves=M, truncation=P, strategy=strategy, seed=seed, eps=eps)
    if strategy == "deterministic":
        side = math.isqrt(M - 1) + 1
        S = max(S, side * side)
        X = disk.boundary_points(S)
    reg.fit(X, target.trace(X))
    rep = reg.report_
    out = {
        "M": reg.waves_.M,
        "S": S,
        "residual": rep.residual,
        "coeff_norm": rep.coeff_norm,
        "relative_coeff_norm": rep.coeff_norm / target.norm,
        "eps_rank": rep.eps_rank,
    }
    if bulk_error:
        grid = disk.bulk_grid()
        out["bulk_error"] = float(np.max(np.abs(reg.predict(grid) - target.evaluate(grid))))
    return out


def run_surrogate_convergence(cfg: ExperimentConfig) -> Table:
    """Approximation of random surrogate solutions.

    Defaults: ``P`` in ``{kappa, 2 kappa, 4 kappa}`` and ``M / N`` in
    ``{1/2, 1, 2, 3, 4, 6}``.  Explicit ``M_values`` replace the ratios.
    ``bulk_error`` adds the maximum error on a 100 x 256 polar grid.
    """
    k = cfg.kappa
    P_values = cfg.P_values or ([cfg.P] if cfg.P else [math.ceil(k), int(round(2 * k)), int(round(4 * k))])
    strategies = cfg.strategies or [cfg.strategy]
    cells = []
    for strategy in strategies:
        for P in P_values:
            N = 2 * P + 1
            if cfg.M_values or cfg.M:
                Ms = list(cfg.M_values or [cfg.M])
            else:
                Ms = [max(1, int(round(r * N))) for r in (cfg.ratios or [0.5, 1, 2, 3, 4, 6])]
            cells += [(P, M, strategy) for M in Ms]

    def cell(item):
        P, M, strategy = item
        return surrogate_fit(k, P, M, strategy, cfg.seed, cfg.eps, cfg.oversampling, cfg.bulk_error)

    cols = ["P", "N", "M", "ratio", "S", "strategy", "seed", "eps", "residual", "coeff_norm", "relative_coeff_norm", "eps_rank"]
    if cfg.bulk_error:
        cols.append("bulk_error")
    table = Table(cols)
    for (P, _, strategy), d in zip(cells, _map(cell, cells)):
        N = 2 * P + 1
        row = [P, N, d["M"], d["M"] / N, d["S"], strategy, cfg.seed, cfg.eps, d["residual"], d["coeff_norm"], d["relative_coeff_norm"], d["eps_rank"]]
        if cfg.bulk_error:
            row.append(d["bulk_error"])
        table.rows.append(row)
    return table


def _all_modes_ok(cfg, k, P, M, strategy, ctx) -> bool:
    model = cached_density(k, P)
    nodes = sample_nodes(model, M, strategy, cfg.seed)
    waves = WaveSet.evanescent(nodes, model)
    res = _mode_sweep(cfg, k, waves, list(range(-P, P + 1)), ctx)
    return max(rep.residual for _, _, rep in res) <= cfg.sigma


def quasi_optimal_size(cfg: ExperimentConfig, P: int, strategy: str | None = None):
    """Smallest ``M`` whose wave set resolves every mode ``|p| <= P`` to ``sigma``.

    Doubling from ``M = N`` brackets the threshold, bisection on integers
    refines it.  The search gives up beyond ``M = 64 N``.

    Returns
    -------
    M_star : int
    evaluations : int
        Number of linear systems solved.
    """
    k = cfg.kappa
    strategy = strategy or cfg.strategy
    ctx = cached_context(k, max(P, math.ceil(k)))
    N = 2 * P + 1
    count = 0
    M = N
    while True:
        count += 1
        if _all_modes_ok(cfg, k, P, M, strategy, ctx):
            break
        if 2 * M > 64 * N:
            raise NumericalError(f"P={P}: no M <= 64 N reaches sigma={cfg.sigma}")
        M *= 2
    lo, hi = (M // 2, M) if M > N else (0, M)
    if lo == 0:
        return hi, count
    while hi - lo > 1:
        mid = (lo + hi) // 2
        count += 1
        if _all_modes_ok(cfg, k, P, mid, strategy, ctx):
            hi = mid
        else:
            lo = mid
    return hi, count


def run_quasi_optimality(cfg: ExperimentConfig) -> Table:
    """Ratio ``M* / N`` of the quasi-optimal set size to the mode count.

    Defaults: ``P`` in ``{kappa/2, kappa, 2 kappa, 3 kappa, 4 kappa}``.
    """
    k = cfg.kappa
    P_values = cfg.P_values or ([cfg.P] if cfg.P else None) or sorted({max(1, int(round(f * k))) for f in (0.5, 1, 2, 3, 4)})
    strategies = cfg.strategies or [cfg.strategy]
    cells = [(P, s) for s in strategies for P in P_values]

    def cell(item):
        P, strategy = item
        return quasi_optimal_size(cfg, P, strategy)

    table = Table(["P", "N", "strategy", "seed", "sigma", "M_star", "ratio", "evaluations"])
    for (P, strategy), (M_star, count) in zip(cells, _map(cell, cells)):
        N = 2 * P + 1
        table.rows.append([P, N, strategy, cfg.seed, cfg.sigma, M_star, M_star / N, count])
    return table


def triangle_source(kind: str, kappa: float) -> np.ndarray:
    """Source one wavelength outside the triangle, near an edge or the apex."""
    tri = Triangle()
    lam = 2.0 * math.pi / kappa
    if kind == "edge":
        return tri.source_near_edge(lam)
    if kind == "vertex":
        return tri.source_near_vertex(lam)
    raise ConfigError(f"sources: expected 'edge' or 'vertex', got {kind!r}")


def run_triangle(cfg: ExperimentConfig) -> Table:
    """Point-source fields on the triangle, propagative against evanescent waves.

    Evanescent sets use ``P = max(ceil kappa, floor(M/4))`` and are rescaled to
    unit maximum modulus on the boundary points.  Defaults: ``M`` in
    ``20, 40, ..., 600``, both sources and both wave kinds.  ``bulk_error``
    adds the maximum error on a barycentric lattice relative to the maximum
    field modulus there.
    """
    k = cfg.kappa
    M_values = cfg.M_values or ([cfg.M] if cfg.M else list(range(20, 601, 20)))
    kinds = cfg.kinds or ["ppw", "epw"]
    sources = cfg.sources or ["edge", "vertex"]
    tri = Triangle()
    grid = tri.bulk_grid() if cfg.bulk_error else None
    targets = {s: FundamentalSolution(k, triangle_source(s, k), tri) for s in sources}
    exact = {s: targets[s].evaluate(grid) for s in sources} if cfg.bulk_error else {}

    def cell(item):
        source, kind, M = item
        S = cfg.boundary_count(M)
        X = tri.boundary_points(S)
        reg = PlaneWaveRegressor(
            kappa=k,
            wave_type="evanescent" if kind == "epw" else "propagative",
            n_waves=M,
            truncation=truncation_rule(k, M),
            strategy=cfg.strategy,
            seed=cfg.seed,
            eps=cfg.eps,
            normalization="sup" if kind == "epw" else "christoffel",
        )
        if kind == "epw" and cfg.strategy == "deterministic":
            side = math.isqrt(M - 1) + 1
            S = max(S, side * side)
            X = tri.boundary_points(S)
        reg.fit(X, targets[source].trace(X))
        rep = reg.report_
        row = [M if kind == "ppw" else reg.waves_.M, kind, source, reg.truncation_ if kind == "epw" else 0, S, cfg.eps, rep.residual, rep.coeff_norm, rep.eps_rank]
        if cfg.bulk_error:
            u = exact[source]
            row.append(float(np.max(np.abs(reg.predict(grid) - u)) / np.max(np.abs(u))))
        return row

    cells = [(s, kind, M) for s in sources for kind in kinds for M in M_values]
    cols = ["M", "kind", "source", "P", "S", "eps", "residual", "coeff_norm", "eps_rank"]
    if cfg.bulk_error:
        cols.append("bulk_error")
    return Table(cols, _map(cell, cells))


def run_tau_table(cfg: ExperimentConfig) -> Table:
    """Moduli of the coupling constants and their extremes per wavenumber.

    Defaults: ``kappa`` in ``{4, 16, 64}`` and ``|p| <= 16 kappa``.
    """
    kappas = cfg.kappas or [4.0, 16.0, 64.0]
    table = Table(["kappa", "p", "abs_tau", "log_alpha", "log_beta", "tau_minus", "tau_plus"])
    for k in kappas:
        pmax = cfg.P or int(round(16 * k))
        ctx = cached_context(k, max(pmax, math.ceil(k)))
        lo, hi = ctx.tau_bounds()
        for p in range(pmax + 1):
            table.rows.append([k, p, float(abs(ctx.tau(p))), float(ctx.log_alpha[p]), float(ctx.log_beta[p]), lo, hi])
    return table


def run_density(cfg: ExperimentConfig) -> Table:
    """Sampling density and distribution function on the table knots."""
    P = cfg.P or int(round(4 * cfg.kappa))
    model = cached_density(cfg.kappa, P)
    z, rho, cdf = model.table()
    return Table(["zeta", "rho", "cdf"], [[float(a), float(b), float(c)] for a, b, c in zip(z, rho, cdf)])


def run_sample(cfg: ExperimentConfig) -> Table:
    """Sampled wave parameters ``(m, phi, zeta)``."""
    M = cfg.M or int(round(32 * cfg.kappa))
    P = cfg.P or truncation_rule(cfg.kappa, M)
    nodes = sample_nodes(cached_density(cfg.kappa, P), M, cfg.strategy, cfg.seed)
    return Table(["m", "phi", "zeta"], [list(r) for r in nodes.to_rows()])
