"""Experiment orchestration: run a configuration and emit its artifact set.

Every run writes, inside ``<output root>/<output_dir>``:

  config.cfg     canonical configuration echo (re-runnable)
  snapshot.csv   final moments, one row per cell
  telemetry.csv  per-step time step and dual-solver work
  stats.csv      mean/variance per conserved component from the final moments
  reference.csv  exact-solution statistics on the same grid
  errors.csv     numeric-minus-reference mean/variance errors
  summary.csv    oscillation metrics over the report region plus error norms
  plot.py        standalone matplotlib script over these CSVs
  run.log        human-readable outcome (the only file with wall time)

All CSV content is a deterministic function of the configuration: floats are
written with shortest round-trip formatting and timing never enters a CSV, so
rerunning an emitted config.cfg reproduces every CSV byte for byte.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import euler
from .config import _TYPES, ExperimentConfig, ScanConfig
from .errors import ConfigError, FipmError
from .filters import FilterKind, FilterSpec
from .realizability import ScanResult, filter_image_scan
from .solver import RunResult, project_ic
from .stats import StatField, delta_metrics, error_norms, stats_from_moments

COMPONENTS = ("rho", "m", "E")

SUMMARY_FIELDS = ("deltaE", "deltaVar", "l1_mean", "l2_mean", "l1_var", "l2_var")


def resolve_output_root(explicit: str | os.PathLike | None = None) -> Path:
    """Explicit argument, else the FIPM_OUTPUT_ROOT variable, else the cwd."""
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get("FIPM_OUTPUT_ROOT")
    return Path(env) if env else Path.cwd()


def _fmt(value) -> str:
    return repr(float(value))


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _write_snapshot(path: Path, x, moments):
    n_cells, n_moments, n_comp = moments.shape
    header = ["x"] + [
        f"u{k}_mom{i}" for k in range(n_comp) for i in range(n_moments)
    ]
    rows = [
        [_fmt(x[j])]
        + [_fmt(moments[j, i, k]) for k in range(n_comp) for i in range(n_moments)]
        for j in range(n_cells)
    ]
    _write_csv(path, header, rows)


def _write_telemetry(path: Path, telemetry):
    header = ["step", "t", "dt", "total_newton_iters", "max_newton_iters", "max_grad_norm"]
    rows = [
        [str(d.step), _fmt(d.t), _fmt(d.dt), str(d.newton_total), str(d.newton_max), _fmt(d.grad_max)]
        for d in telemetry
    ]
    _write_csv(path, header, rows)


def _stat_header(prefix=""):
    header = ["x"]
    for name in COMPONENTS:
        header += [f"{prefix}mean_{name}", f"{prefix}var_{name}"]
    return header


def _write_stat_field(path: Path, field: StatField, prefix=""):
    rows = []
    for j in range(field.x.size):
        row = [_fmt(field.x[j])]
        for k in range(len(field.components)):
            row += [_fmt(field.mean[j, k]), _fmt(field.var[j, k])]
        rows.append(row)
    _write_csv(path, _stat_header(prefix), rows)


def _write_errors(path: Path, numeric: StatField, reference: StatField):
    rows = []
    for j in range(numeric.x.size):
        row = [_fmt(numeric.x[j])]
        for k in range(len(COMPONENTS)):
            row += [
                _fmt(numeric.mean[j, k] - reference.mean[j, k]),
                _fmt(numeric.var[j, k] - reference.var[j, k]),
            ]
        rows.append(row)
    _write_csv(path, _stat_header("err_"), rows)


PLOT_SCRIPT = '''"""Plot the density mean and variance of this run against the reference.

Usage: python3 plot.py [--out density.png]
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_columns(path):
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    header, data = rows[0], rows[1:]
    return {name: [float(row[i]) for row in data] for i, name in enumerate(header)}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="density.png")
    args = parser.parse_args()
    here = Path(__file__).resolve().parent
    stats = read_columns(here / "stats.csv")
    reference = read_columns(here / "reference.csv")

    fig, (ax_mean, ax_var) = plt.subplots(1, 2, figsize=(11, 4))
    ax_mean.plot(reference["x"], reference["mean_rho"], "r-", lw=1.2, label="exact")
    ax_mean.plot(stats["x"], stats["mean_rho"], "k--", lw=1.0, label="numeric")
    ax_mean.set_xlabel("x")
    ax_mean.set_ylabel("E[rho]")
    ax_mean.legend()
    ax_var.plot(reference["x"], reference["var_rho"], "b-", lw=1.2, label="exact")
    ax_var.plot(stats["x"], stats["var_rho"], "k--", lw=1.0, label="numeric")
    ax_var.set_xlabel("x")
    ax_var.set_ylabel("Var[rho]")
    ax_var.legend()
    fig.tight_layout()
    fig.savefig(here / args.out, dpi=150)
    print(f"wrote {here / args.out}")


if __name__ == "__main__":
    main()
'''


@dataclass(frozen=True)
class RunArtifacts:
    """Outcome of one experiment run."""

    out_dir: Path
    exit_code: int
    summary: dict | None
    error: str | None
    runtime: float
    n_steps: int


def _log_lines(status, cfg, runtime, extra):
    lines = [f"status: {status}", f"closure: {cfg.closure}", f"filter: {cfg.filter}"]
    lines += extra
    lines.append(f"wall_seconds: {runtime:.3f}")
    return "\n".join(lines) + "\n"


def run_experiment(cfg: ExperimentConfig, output_root=None) -> RunArtifacts:
    """Run one configuration and write its artifact directory.

    Solver aborts (breakdown, dual non-convergence, inadmissible states) are
    recorded in run.log and reported with exit code 3; the configuration echo
    is always written first so failures stay reproducible too.
    """
    out_dir = resolve_output_root(output_root) / cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.cfg").write_text(cfg.to_text())

    start = time.perf_counter()
    grid = cfg.grid()
    ic = cfg.ic()
    try:
        solver = cfg.build_solver()
        u0 = project_ic(grid.centers(), cfg.degree, ic, cfg.gamma)
        ghosts = project_ic(grid.ghost_centers(), cfg.degree, ic, cfg.gamma)
        result: RunResult = solver.run(u0, ghosts)
    except (FipmError, RuntimeError) as err:
        runtime = time.perf_counter() - start
        message = f"{type(err).__name__}: {err}"
        (out_dir / "run.log").write_text(
            _log_lines("failed", cfg, runtime, [f"error: {message}"])
        )
        return RunArtifacts(out_dir, 3, None, message, runtime, 0)
    runtime = time.perf_counter() - start

    x = grid.centers()
    _write_snapshot(out_dir / "snapshot.csv", x, result.moments)
    _write_telemetry(out_dir / "telemetry.csv", result.telemetry)

    numeric = stats_from_moments(x, result.moments, COMPONENTS)
    ref_mean, ref_var = euler.reference_statistics(
        x, result.t_final, cfg.x0, cfg.sigma, *ic.primitive_states(), gamma=cfg.gamma
    )
    reference = StatField(x=x, mean=ref_mean, var=ref_var, components=COMPONENTS)
    _write_stat_field(out_dir / "stats.csv", numeric)
    _write_stat_field(out_dir / "reference.csv", reference)
    _write_errors(out_dir / "errors.csv", numeric, reference)

    d_mean, d_var = delta_metrics(numeric, reference, cfg.delta_region())
    summary = {"deltaE": d_mean, "deltaVar": d_var, **error_norms(numeric, reference)}
    _write_csv(
        out_dir / "summary.csv",
        SUMMARY_FIELDS,
        [[_fmt(summary[name]) for name in SUMMARY_FIELDS]],
    )
    (out_dir / "plot.py").write_text(PLOT_SCRIPT)
    (out_dir / "run.log").write_text(
        _log_lines(
            "ok",
            cfg,
            runtime,
            [
                f"steps: {result.n_steps}",
                f"t_final: {_fmt(result.t_final)}",
                f"deltaE: {_fmt(summary['deltaE'])}",
                f"deltaVar: {_fmt(summary['deltaVar'])}",
            ],
        )
    )
    return RunArtifacts(out_dir, 0, summary, None, runtime, result.n_steps)


# -- parameter sweeps ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    value: str
    deltaE: float
    deltaVar: float
    runtime: float
    error: str | None


@dataclass(frozen=True)
class SweepResult:
    out_dir: Path
    key: str
    rows: list[SweepRow]

    @property
    def table_path(self) -> Path:
        return self.out_dir / "sweep.csv"


def sweep(cfg: ExperimentConfig, key: str, values, output_root=None) -> SweepResult:
    """Run the configuration once per value of one numeric key.

    Each run lands in its own subdirectory of the base output_dir; failures
    (bad value, solver abort) are recorded as NaN rows and the sweep
    continues.  An empty value list yields an empty table.
    """
    if _TYPES.get(key) not in (float, int):
        raise ConfigError(f"'{key}' is not a sweepable numeric configuration key")
    base_dir = resolve_output_root(output_root) / cfg.output_dir
    base_dir.mkdir(parents=True, exist_ok=True)

    rows: list[SweepRow] = []
    for raw in values:
        raw = str(raw).strip()
        started = time.perf_counter()
        try:
            value = _TYPES[key](raw)
            sub_cfg = replace(
                cfg, **{key: value, "output_dir": f"{cfg.output_dir}/{key}-{raw}"}
            )
            artifacts = run_experiment(sub_cfg, output_root)
        except ConfigError as err:
            rows.append(
                SweepRow(raw, float("nan"), float("nan"), time.perf_counter() - started, str(err))
            )
            continue
        if artifacts.exit_code != 0:
            rows.append(
                SweepRow(raw, float("nan"), float("nan"), artifacts.runtime, artifacts.error)
            )
        else:
            rows.append(
                SweepRow(
                    raw,
                    artifacts.summary["deltaE"],
                    artifacts.summary["deltaVar"],
                    artifacts.runtime,
                    None,
                )
            )

    result = SweepResult(out_dir=base_dir, key=key, rows=rows)
    _write_csv(
        result.table_path,
        ["value", "deltaE", "deltaVar", "runtime"],
        [[r.value, _fmt(r.deltaE), _fmt(r.deltaVar), f"{r.runtime:.3f}"] for r in rows],
    )
    return result


# -- realizability raster scans -------------------------------------------------------


@dataclass(frozen=True)
class ScanArtifacts:
    out_dir: Path
    rows: list[tuple[str, float, int, int]]  # (filter, strength, n_inside, n_escaped)


def _write_scan_csv(path: Path, scan: ScanResult):
    rows = [
        [
            _fmt(scan.u1[i]),
            _fmt(scan.u2[i]),
            str(int(scan.inside_before[i])),
            str(int(scan.inside_after[i])),
        ]
        for i in range(scan.u1.size)
    ]
    _write_csv(path, ["u1", "u2", "inside_before", "inside_after"], rows)


def scan_figure1(cfg: ScanConfig, output_root=None) -> ScanArtifacts:
    """Raster the degree-two realizable set through both filter families.

    The exponential filter (fixed total exponent per scan, no time-step
    coupling) loses points near the realizability boundary; the exact
    heat-semigroup filter keeps every raster point inside.
    """
    out_dir = resolve_output_root(output_root) / cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.cfg").write_text(cfg.to_text())

    rows = []
    for strength in cfg.exp_exponents:
        spec = FilterSpec(
            FilterKind.EXPONENTIAL, strength, order=cfg.order, dt_coupled=False
        )
        scan = filter_image_scan(spec, resolution=cfg.resolution)
        _write_scan_csv(out_dir / f"exp-{_fmt(strength)}.csv", scan)
        rows.append(("exponential", strength, scan.n_inside, scan.n_escaped))
    for strength in cfg.fp_strengths:
        spec = FilterSpec(FilterKind.FOKKER_PLANCK, strength)
        scan = filter_image_scan(spec, resolution=cfg.resolution)
        _write_scan_csv(out_dir / f"fp-{_fmt(strength)}.csv", scan)
        rows.append(("fokker-planck", strength, scan.n_inside, scan.n_escaped))

    _write_csv(
        out_dir / "scan-summary.csv",
        ["filter", "strength", "n_inside", "n_escaped"],
        [[name, _fmt(strength), str(inside), str(escaped)] for name, strength, inside, escaped in rows],
    )
    return ScanArtifacts(out_dir=out_dir, rows=rows)
