"""Command-line interface: trajectory / run / sweep / plot.

Every command reads an optional flat key-value config, runs the requested
experiment, and writes CSV tables and/or SVG figures into --out.  Numbers
are serialized with 17 significant digits so a reread reproduces the
in-memory float64 values exactly.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config as config_mod
from .dynamics import integrate_rk4, lorenz_drift_fn
from .errors import ConfigError, DivergenceError, EnkfLabError
from .experiments import TwinExperimentConfig, run_twin, sweep_ensemble_sizes
from .svg import AxesSpec, Curve, emit_svg, emit_svg_panels

RUN_CSV_HEADER = (
    "step,truth_x,truth_y,truth_z,"
    "pred_mean_x,pred_mean_y,pred_mean_z,"
    "anal_mean_x,anal_mean_y,anal_mean_z,"
    "abs_pred_err_x,abs_pred_err_y,abs_pred_err_z,"
    "abs_anal_err_x,abs_anal_err_y,abs_anal_err_z,"
    "running_mean_err"
)


def _num(v: float) -> str:
    return format(float(v), ".17g")


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
    except OSError as exc:
        raise EnkfLabError(f"failed to write {path}: {exc}") from exc


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _load_config(path: str | None, base_seed: int) -> TwinExperimentConfig:
    if path is None:
        text = ""
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    config = config_mod.parse_config(text)
    # The default seed population is 20 consecutive integers from the CLI
    # base seed; an explicit `seeds` key in the config wins.
    if "seeds" not in _present_keys(text):
        from dataclasses import replace

        config = replace(config, seeds=tuple(range(base_seed, base_seed + 20)))
    return config


def _present_keys(text: str) -> set:
    keys = set()
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped and "=" in stripped:
            keys.add(stripped.split("=", 1)[0].strip())
    return keys


def cmd_trajectory(config: TwinExperimentConfig, out: Path, fmt: str) -> None:
    drift = lorenz_drift_fn(config.lorenz)
    h = config.dt / config.substeps
    n_points = int(round(config.trajectory_time / h))
    states = np.empty((n_points + 1, 3))
    states[0] = np.asarray(config.truth_init)
    for i in range(n_points):
        states[i + 1] = integrate_rk4(drift, states[i], h, 1)
    times = h * np.arange(n_points + 1)

    if fmt in ("csv", "both"):
        rows = (
            [_num(t), _num(s[0]), _num(s[1]), _num(s[2])]
            for t, s in zip(times, states)
        )
        _write_csv(out / "trajectory.csv", "t,x,y,z", rows)
    if fmt in ("svg", "both"):
        curve = Curve("trajectory", states[:, 0], states[:, 2])
        axes = AxesSpec(
            title="Lorenz 63 trajectory (x-z projection)", xlabel="x", ylabel="z",
            legend=False,
        )
        _write_text(out / "trajectory.svg", emit_svg([curve], axes))


def cmd_run(
    config: TwinExperimentConfig, n_members: int, seed: int, out: Path, fmt: str
) -> None:
    series = run_twin(config, n_members, seed)
    stem = f"run_N{n_members}_seed{seed}"
    steps = np.arange(1, series.steps + 1)

    if fmt in ("csv", "both"):
        rows = []
        for j in range(series.steps):
            row = [str(j + 1)]
            for block in (series.truth, series.pred_mean, series.anal_mean,
                          series.abs_pred_err, series.abs_anal_err):
                row.extend(_num(v) for v in block[j])
            row.append(_num(series.running_mean_err[j]))
            rows.append(row)
        _write_csv(out / f"{stem}.csv", RUN_CSV_HEADER, rows)
    if fmt in ("svg", "both"):
        panels = []
        for dim, label in enumerate("xyz"):
            curves = [
                Curve("Prediction", steps, series.abs_pred_err[:, dim]),
                Curve("Analysis", steps, series.abs_anal_err[:, dim]),
            ]
            axes = AxesSpec(
                title=f"Absolute error in ensemble mean ({label})",
                xlabel="Steps", ylabel=label,
            )
            panels.append((curves, axes))
        _write_text(out / f"{stem}.svg", emit_svg_panels(panels))


def cmd_sweep(config: TwinExperimentConfig, out: Path, fmt: str) -> None:
    result = sweep_ensemble_sizes(config)

    if fmt in ("csv", "both"):
        rows = []
        warnings = []
        for cell in result.cells:
            final = "" if cell.final_err is None else _num(cell.final_err)
            rows.append([str(cell.n_members), str(cell.seed), final])
            if cell.error is not None:
                warnings.append(
                    f"N={cell.n_members} seed={cell.seed}: {cell.error}"
                )
        _write_csv(out / "sweep.csv", "N,seed,final_running_mean_err", rows)

        summary_rows = []
        for n_members in config.ensemble_sizes:
            finals = [c.final_err for c in result.cells
                      if c.n_members == n_members and c.final_err is not None]
            if not finals:
                summary_rows.append([str(n_members), "", ""])
                continue
            q1, q3 = np.percentile(finals, [25, 75])
            summary_rows.append(
                [str(n_members), _num(np.median(finals)), _num(q3 - q1)]
            )
        _write_csv(out / "summary.csv", "N,median,iqr", summary_rows)
        if warnings:
            _write_text(out / "sweep_warnings.txt", "\n".join(warnings) + "\n")
    if fmt in ("svg", "both"):
        steps = np.arange(1, config.steps + 1)
        curves = [
            Curve(f"{n_members} Ensemble", steps, result.median_curves[n_members])
            for n_members in config.ensemble_sizes
            if n_members in result.median_curves
        ]
        axes = AxesSpec(
            title="Mean difference between truth and analysis mean",
            xlabel="Steps", ylabel="Difference",
        )
        _write_text(out / "sweep.svg", emit_svg(curves, axes))


def cmd_plot(csv_path: Path, out: Path) -> None:
    """Re-render an emitted CSV (trajectory, run, or sweep) as an SVG."""
    try:
        lines = csv_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise EnkfLabError(f"cannot read {csv_path}: {exc}") from exc
    if not lines:
        raise EnkfLabError(f"{csv_path} is empty")
    header = lines[0]
    data = np.array(
        [[float(v) if v else np.nan for v in line.split(",")] for line in lines[1:]]
    )
    stem = csv_path.stem
    if header == "t,x,y,z":
        curve = Curve("trajectory", data[:, 1], data[:, 3])
        axes = AxesSpec(
            title="Lorenz 63 trajectory (x-z projection)", xlabel="x", ylabel="z",
            legend=False,
        )
        _write_text(out / f"{stem}.svg", emit_svg([curve], axes))
    elif header == RUN_CSV_HEADER:
        steps = data[:, 0]
        panels = []
        for dim, label in enumerate("xyz"):
            curves = [
                Curve("Prediction", steps, data[:, 10 + dim]),
                Curve("Analysis", steps, data[:, 13 + dim]),
            ]
            axes = AxesSpec(
                title=f"Absolute error in ensemble mean ({label})",
                xlabel="Steps", ylabel=label,
            )
            panels.append((curves, axes))
        _write_text(out / f"{stem}.svg", emit_svg_panels(panels))
    elif header == "N,seed,final_running_mean_err":
        curves = []
        for n_members in sorted(set(int(v) for v in data[:, 0])):
            finals = data[data[:, 0] == n_members, 2]
            finals = finals[np.isfinite(finals)]
            seeds = np.arange(1, finals.size + 1)
            curves.append(Curve(f"{n_members} Ensemble", seeds, finals))
        axes = AxesSpec(
            title="Final running mean error per seed",
            xlabel="Seed index", ylabel="Difference",
        )
        _write_text(out / f"{stem}.svg", emit_svg(curves, axes))
    else:
        raise EnkfLabError(f"unrecognized CSV schema in {csv_path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enkf-lab",
        description="Ensemble Kalman filtering experiments on the Lorenz 63 model.",
        epilog="Config keys (flat 'key = value' lines, '#' comments):\n"
        + config_mod.describe_defaults(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_shared(p):
        p.add_argument("--config", metavar="PATH", help="config document to load")
        p.add_argument("--seed", type=int, default=0,
                       help="base seed (64-bit decimal integer, default 0)")
        p.add_argument("--out", default="out", help="output directory (created)")
        p.add_argument("--format", choices=("csv", "svg", "both"), default="both",
                       help="which outputs to write (default both)")

    p_traj = sub.add_parser("trajectory", help="integrate and plot the attractor")
    add_shared(p_traj)

    p_run = sub.add_parser("run", help="one twin experiment at a fixed N and seed")
    add_shared(p_run)
    p_run.add_argument("--ensemble-size", type=int, default=None, metavar="N",
                       help="ensemble size (default: first config ensemble size)")

    p_sweep = sub.add_parser("sweep", help="twin experiments over all (N, seed) pairs")
    add_shared(p_sweep)

    p_plot = sub.add_parser("plot", help="re-render an emitted CSV as an SVG")
    add_shared(p_plot)
    p_plot.add_argument("--input", required=True, metavar="CSV",
                        help="CSV file previously written by trajectory/run/sweep")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        if args.command == "plot":
            cmd_plot(Path(args.input), out)
            return 0
        config = _load_config(args.config, args.seed)
        if args.command == "trajectory":
            cmd_trajectory(config, out, args.format)
        elif args.command == "run":
            n_members = args.ensemble_size
            if n_members is None:
                n_members = config.ensemble_sizes[0]
            try:
                cmd_run(config, n_members, args.seed, out, args.format)
            except DivergenceError:
                # Never leave a partial table behind on blowup.
                stem = f"run_N{n_members}_seed{args.seed}"
                (out / f"{stem}.csv").unlink(missing_ok=True)
                raise
        elif args.command == "sweep":
            cmd_sweep(config, out, args.format)
    except EnkfLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
