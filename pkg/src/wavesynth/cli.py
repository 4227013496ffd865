"""Command-line front end.

Each experiment subcommand writes ``<subcommand>.csv`` and
``<subcommand>.config.json`` into ``--out``.  Exit status is 0 on success,
2 for invalid input and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .exceptions import ConfigError, NumericalError
from .reports import read_csv, read_sidecar, write_report
from .scenarios import (
    ExperimentConfig,
    run_density,
    run_epw_stability,
    run_ppw_instability,
    run_quasi_optimality,
    run_sample,
    run_surrogate_convergence,
    run_tau_table,
    run_triangle,
)

log = logging.getLogger("wavesynth")

RUNNERS = {
    "density": run_density,
    "sample": run_sample,
    "ppw-instability": run_ppw_instability,
    "epw-stability": run_epw_stability,
    "surrogate": run_surrogate_convergence,
    "quasi-opt": run_quasi_optimality,
    "triangle": run_triangle,
    "tau-table": run_tau_table,
}

# subcommands whose output depends on the sampler seed
SEEDED = {"sample", "epw-stability", "surrogate", "quasi-opt", "triangle"}

DEFAULTS = {"kappa": 16.0, "eps": 1e-14, "oversampling": 2.0, "strategy": "sobol", "seed": 0}

# flags beyond the shared ones, per subcommand
EXTRA_FLAGS = {
    "density": ["P"],
    "sample": ["P", "M"],
    "ppw-instability": ["M", "M_values", "p_values"],
    "epw-stability": ["P", "M", "M_values", "p_values", "strategies"],
    "surrogate": ["P", "P_values", "M", "M_values", "ratios", "strategies", "bulk_error"],
    "quasi-opt": ["P", "P_values", "sigma", "strategies"],
    "triangle": ["M", "M_values", "kinds", "sources", "bulk_error"],
    "tau-table": ["P", "kappas"],
}


def _list_of(conv, name):
    def parse(text):
        try:
            return [conv(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name}: expected a comma-separated list, got {text!r}")

    return parse


def _str_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


FLAG_SPECS = {
    "P": dict(flags=["--P"], type=int, help="mode truncation (tau-table: largest |p|)"),
    "M": dict(flags=["--M"], type=int, help="number of waves"),
    "M_values": dict(flags=["--M-values"], type=_list_of(int, "M-values"), help="comma-separated M sweep"),
    "P_values": dict(flags=["--P-values"], type=_list_of(int, "P-values"), help="comma-separated P sweep"),
    "p_values": dict(flags=["--p-values"], type=_list_of(int, "p-values"), help="comma-separated target modes"),
    "ratios": dict(flags=["--ratios"], type=_list_of(float, "ratios"), help="comma-separated M/N ratios"),
    "strategies": dict(flags=["--strategies"], type=_str_list, help="comma-separated sampling strategies"),
    "kinds": dict(flags=["--kinds"], type=_str_list, help="wave kinds among ppw,epw"),
    "sources": dict(flags=["--sources"], type=_str_list, help="source positions among edge,vertex"),
    "kappas": dict(flags=["--kappas"], type=_list_of(float, "kappas"), help="comma-separated wavenumbers"),
    "sigma": dict(flags=["--sigma"], type=float, help="residual tolerance of the size search"),
    "bulk_error": dict(flags=["--bulk-error"], action="store_true", help="also report the interior max error"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavesynth", description="Plane-wave approximation experiments.", allow_abbrev=False)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    S = argparse.SUPPRESS
    for name, extras in EXTRA_FLAGS.items():
        p = sub.add_parser(name, help=((RUNNERS[name].__doc__ or "").strip().splitlines() or [""])[0], allow_abbrev=False, argument_default=S)
        p.add_argument("--kappa", type=float, help="wavenumber (default 16)")
        p.add_argument("--eps", type=float, help="relative singular value cutoff (default 1e-14)")
        p.add_argument("--oversampling", type=float, help="boundary points per wave (default 2)")
        p.add_argument("--strategy", help="sampling strategy: deterministic, sobol or random (default sobol)")
        p.add_argument("--seed", type=int, help="generator seed (default 0)")
        p.add_argument("--strict-repro", action="store_true", help="require an explicit --seed")
        p.add_argument("--config", help="JSON sidecar of an earlier run to replay")
        p.add_argument("--out", help="output directory (default: current directory)")
        for key in extras:
            spec = dict(FLAG_SPECS[key])
            flags = spec.pop("flags")
            p.add_argument(*flags, dest=key, **spec)
    pp = sub.add_parser("plot", help="render a CSV table as an SVG chart", allow_abbrev=False)
    pp.add_argument("csv", help="table written by one of the experiment subcommands")
    pp.add_argument("--x", help="abscissa column")
    pp.add_argument("--y", type=_str_list, help="comma-separated ordinate columns")
    pp.add_argument("--group", type=_str_list, help="comma-separated columns splitting the curves")
    pp.add_argument("--output", help="SVG path (default: CSV path with .svg suffix)")
    return parser


def _resolve_config(name: str, ns: argparse.Namespace) -> ExperimentConfig:
    given = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "verbose", "strict_repro", "config", "out")}
    values = dict(DEFAULTS)
    if getattr(ns, "config", None):
        recorded, cfg = read_sidecar(ns.config)
        if recorded != name:
            raise ConfigError(f"config: sidecar belongs to {recorded!r}, not {name!r}")
        values.update(cfg)
    elif getattr(ns, "strict_repro", False) and name in SEEDED and "seed" not in given:
        raise ConfigError("seed: --strict-repro requires an explicit --seed")
    values.update(given)
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(f"config: {exc}") from exc


# column choices for the default chart of each table layout
_PLOT_LAYOUTS = [
    ({"p", "M", "residual"}, "p", ["residual", "coeff_norm"], ["M", "strategy"]),
    ({"kind", "source"}, "M", ["residual", "coeff_norm"], ["kind", "source"]),
    ({"relative_coeff_norm"}, "ratio", ["residual", "relative_coeff_norm"], ["P", "strategy"]),
    ({"M_star"}, "P", ["ratio"], ["strategy"]),
    ({"abs_tau"}, "p", ["abs_tau"], ["kappa"]),
    ({"rho", "cdf"}, "zeta", ["rho", "cdf"], []),
    ({"phi", "zeta", "m"}, "phi", ["zeta"], []),
]


def plot_table(csv_path, output=None, x=None, y=None, group=None) -> Path:
    """Render a CSV table as a static SVG line chart (scatter for samples)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    table, _ = read_csv(csv_path)
    cols = set(table.columns)
    layout = next((lay for lay in _PLOT_LAYOUTS if lay[0] <= cols), None)
    scatter = layout is not None and layout[1] == "phi"
    if layout is None:
        layout = (set(), table.columns[0], table.columns[1:2], [])
    x = x or layout[1]
    y = y or layout[2]
    group = [g for g in (group if group is not None else layout[3]) if g in cols]
    for c in [x, *y, *group]:
        if c not in cols:
            raise ConfigError(f"plot: column {c!r} not in {csv_path}")
    keys = sorted({tuple(r[table.columns.index(g)] for g in group) for r in table.rows}, key=str)

    plt.rcParams["svg.hashsalt"] = "wavesynth"
    fig, axes = plt.subplots(1, len(y), figsize=(5 * len(y), 4), squeeze=False)
    for ax, ycol in zip(axes[0], y):
        for key in keys:
            sub = table.where(**dict(zip(group, key))) if group else table
            xs = sub.column(x).astype(float)
            ys = sub.column(ycol).astype(float)
            label = ", ".join(f"{g}={v}" for g, v in zip(group, key)) or None
            if scatter:
                ax.scatter(xs, ys, s=2, label=label)
            else:
                order = np.argsort(xs, kind="stable")
                ax.plot(xs[order], ys[order], marker=".", label=label)
        vals = table.column(ycol).astype(float)
        vals = vals[np.isfinite(vals)]
        if vals.size and np.all(vals > 0) and vals.max() / vals.min() > 100:
            ax.set_yscale("log")
        ax.set_xlabel(x)
        ax.set_ylabel(ycol)
        if group and len(keys) > 1:
            ax.legend(fontsize=7)
    fig.tight_layout()
    out = Path(output) if output else Path(csv_path).with_suffix(".svg")
    try:
        fig.savefig(out, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise ConfigError(f"output: cannot write {out}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    name = ns.subcommand
    try:
        if name == "plot":
            out = plot_table(ns.csv, ns.output, ns.x, ns.y, ns.group)
            print(out)
            return 0
        cfg = _resolve_config(name, ns)
        log.info("running %s", name)
        table = RUNNERS[name](cfg)
        csv_path, side = write_report(table, getattr(ns, "out", "."), name, cfg.to_dict())
        print(csv_path)
        return 0
    except ConfigError as exc:
        print(f"wavesynth {name}: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"wavesynth {name}: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
