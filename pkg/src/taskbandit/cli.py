"""Command line front end.

Subcommands:

* ``simulate``           run one experiment from a YAML config
* ``metrics``            compare performance curves against a baseline
* ``sweep``              grid of simulate runs over update knobs
* ``inspect-checkpoint`` summarize a checkpoint file
* ``report``             render figures for finished runs

Exit codes: 0 success, 2 configuration or usage error, 3 I/O failure
mid-run (a final checkpoint is flushed before exiting).
"""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
from dataclasses import replace
from pathlib import Path

from .checkpoint import describe_checkpoint, restore_engine, save_checkpoint
from .config import ExperimentConfig, load_config, rehash
from .errors import CheckpointError, ConfigError
from .metrics import NOT_REACHED, bsf, ttb
from .runio import (
    etr_curve,
    read_performance_input,
    read_runlog,
    runlog_line,
    write_curve,
    write_histogram,
)
from .simulator import build_engine, build_profile, run_experiment


def _default_out_root() -> Path:
    return Path(os.environ.get("TASKBANDIT_OUT", "runs"))


def _run_dir(args: argparse.Namespace) -> Path:
    if args.out is not None:
        return Path(args.out)
    return _default_out_root() / Path(args.config).stem


def _truncate_runlog(path: Path, keep: int) -> None:
    if not path.exists():
        if keep > 0:
            raise CheckpointError(f"runlog {path} missing, cannot resume at step {keep}")
        return
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if len(lines) < keep:
        raise CheckpointError(
            f"runlog {path} has {len(lines)} steps but checkpoint expects {keep}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(lines[:keep])


def _simulate_into(exp: ExperimentConfig, out_dir: Path, resume: str | None) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "runlog.jsonl"

    profile = build_profile(exp.run)
    engine = build_engine(exp.run, profile)
    if resume is not None:
        engine = restore_engine(Path(resume), engine, exp.config_hash)
        _truncate_runlog(log_path, engine.step)
    else:
        log_path.write_text("", encoding="utf-8")

    interval = exp.checkpoint_interval
    fh = open(log_path, "a", encoding="utf-8")
    try:
        def probe(record, predictions, true_rates):
            fh.write(runlog_line(record) + "\n")
            done = record.step + 1
            if interval > 0 and done % interval == 0:
                fh.flush()
                save_checkpoint(out_dir / f"checkpoint_{done:06d}.json", engine, exp.config_hash)

        run_experiment(exp.run, probe=probe, engine=engine)
        fh.close()
        save_checkpoint(out_dir / "checkpoint_final.json", engine, exp.config_hash)
        log = read_runlog(log_path)
        if log.records:
            write_curve(out_dir / "etr.txt", etr_curve(log))
            write_histogram(out_dir / "histogram.txt", log)
    except OSError as exc:
        if not fh.closed:
            try:
                fh.close()
            except OSError:
                pass
        try:
            save_checkpoint(out_dir / "checkpoint_final.json", engine, exp.config_hash)
        except OSError:
            pass
        print(f"error: I/O failure during run: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {log_path} ({engine.step} steps)")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    exp = load_config(args.config, seed_override=args.seed)
    return _simulate_into(exp, _run_dir(args), args.resume)


def _parse_grid_floats(text: str | None) -> list[float] | None:
    if text is None:
        return None
    values = [float(part) for part in text.split(",") if part.strip() != ""]
    if not values:
        raise ConfigError("empty grid axis")
    return values


def _parse_grid_flags(text: str | None) -> list[bool] | None:
    if text is None:
        return None
    values = []
    for part in text.split(","):
        part = part.strip().lower()
        if part == "":
            continue
        if part in ("on", "true", "1"):
            values.append(True)
        elif part in ("off", "false", "0"):
            values.append(False)
        else:
            raise ConfigError(f"bad sample flag {part!r}, expected on/off")
    if not values:
        raise ConfigError("empty grid axis")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    exp = load_config(args.config, seed_override=args.seed)
    forgets = _parse_grid_floats(args.forget_grid)
    mixes = _parse_grid_floats(args.mix_grid)
    samples = _parse_grid_flags(args.sample_grid)
    if forgets is None and mixes is None and samples is None:
        print("error: sweep needs at least one of --forget-grid/--mix-grid/--sample-grid",
              file=sys.stderr)
        return 2
    forgets = forgets if forgets is not None else [exp.run.forget]
    mixes = mixes if mixes is not None else [exp.run.mix]
    samples = samples if samples is not None else [exp.run.sample_posterior]

    root = Path(args.out) if args.out is not None else _default_out_root() / f"{Path(args.config).stem}_sweep"
    base_seed = exp.run.seed
    status = 0
    for i, (f, m, s) in enumerate(itertools.product(forgets, mixes, samples)):
        run = replace(exp.run, forget=f, mix=m, sample_posterior=s, seed=base_seed + i)
        cell = rehash(exp, run)
        name = f"cell_{i:03d}_f{f:g}_m{m:g}_s{'on' if s else 'off'}"
        code = _simulate_into(cell, root / name, None)
        status = max(status, code)
    return status


def _method_name(path: Path) -> str:
    stem = path.stem
    if stem in ("runlog", "etr"):
        return path.resolve().parent.name
    return stem


def _fmt_metric(value: float | None) -> str:
    if value is NOT_REACHED or value is None:
        return "-"
    return f"{value:.6g}"


def cmd_metrics(args: argparse.Namespace) -> int:
    baseline_path = Path(args.baseline)
    if not baseline_path.exists():
        print(f"error: baseline {baseline_path} not found", file=sys.stderr)
        return 2
    baseline = read_performance_input(baseline_path)
    taus = args.tau
    betas = args.beta

    header = ["method"] + [f"ttb@{t:g}" for t in taus] + [f"bsf@{b:g}" for b in betas]
    rows: list[list[str]] = []
    for raw in args.logs:
        path = Path(raw)
        curve = read_performance_input(path)
        cells = [_method_name(path)]
        for t in taus:
            cells.append(_fmt_metric(ttb(baseline, curve, t)))
        for b in betas:
            cells.append(_fmt_metric(bsf(baseline, curve, b)))
        rows.append(cells)

    widths = [max(len(header[j]), *(len(r[j]) for r in rows)) if rows else len(header[j])
              for j in range(len(header))]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))

    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    return 0


def cmd_inspect_checkpoint(args: argparse.Namespace) -> int:
    info = describe_checkpoint(Path(args.checkpoint))
    for key, value in info.items():
        print(f"{key}: {value}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from .report import render_comparison, render_run_figures

    dirs = [Path(d) for d in args.run_dirs]
    for d in dirs:
        if not (d / "runlog.jsonl").exists():
            print(f"error: no runlog.jsonl under {d}", file=sys.stderr)
            return 2
    written: list[Path] = []
    for d in dirs:
        written.extend(render_run_figures(d))
    if len(dirs) > 1:
        out_dir = Path(args.out) if args.out is not None else dirs[0].resolve().parent
        written.append(render_comparison(dirs, out_dir))
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taskbandit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--resume", default=None, help="checkpoint file to continue from")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", help="compare curves against a baseline")
    p.add_argument("logs", nargs="+", help="runlog.jsonl or two-column curve files")
    p.add_argument("--baseline", required=True)
    p.add_argument("--tau", type=float, nargs="+", default=[0.5])
    p.add_argument("--beta", type=float, nargs="+", default=[0.5])
    p.add_argument("--out", default=None, help="CSV export path")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", help="grid of runs over update knobs")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--forget-grid", default=None)
    p.add_argument("--mix-grid", default=None)
    p.add_argument("--sample-grid", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("inspect-checkpoint", help="summarize a checkpoint")
    p.add_argument("checkpoint")
    p.set_defaults(func=cmd_inspect_checkpoint)

    p = sub.add_parser("report", help="render figures for finished runs")
    p.add_argument("run_dirs", nargs="+")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, CheckpointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
