"""Command-line front end.

    awminmax --scenario scenario.yaml --out results/ --algo both \\
             [--trials K] [--seed S] [--sweep anchor_count:10,20,30] [--jobs N]

Writes ``trials.csv``, ``summary.csv``, ``cdf.csv`` and ``manifest.json`` into
the output directory. Exit status: 0 success, 1 configuration error, 2 I/O
error. Files written before a failure are removed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT_SCENARIO, ScenarioConfig, parse_scenario
from .exceptions import ConfigError
from .harness import (ALGORITHMS, SWEEP_AXES, config_for_axis, error_cdf, run_trials,
                      summarize, sweep)

logger = logging.getLogger("awminmax")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

TRIALS_COLUMNS = ["trial", "algo", "node_id", "true_x", "true_y", "est_x", "est_y",
                  "error_m", "localized", "sca_iters"]
SUMMARY_COLUMNS = ["algo", "axis_value", "ale", "mean_rmse", "pct_unlocalizable"]
CDF_COLUMNS = ["algo", "error_m", "cum_frac"]
OUTPUT_FILES = ("trials.csv", "summary.csv", "cdf.csv", "manifest.json")


@dataclass
class RunManifest:
    scenario_path: str | None
    output_dir: str
    algorithms: list[str]
    sweep: dict | None
    seed: int
    trials: int
    tool_version: str
    scenario: dict


def fmt(x) -> str:
    """Fixed 9-significant-digit rendering; empty for missing values."""
    if x is None:
        return ""
    x = float(x)
    if not np.isfinite(x):
        return ""
    return f"{x:.9g}"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="awminmax", description=__doc__.split("\n")[0])
    p.add_argument("--scenario", help="scenario file (YAML/JSON); defaults if omitted")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--algo", choices=["dvhop", "awminmax", "both"], default="both")
    p.add_argument("--trials", type=int, help="Monte Carlo runs (overrides scenario)")
    p.add_argument("--seed", type=int, help="base seed (overrides scenario)")
    p.add_argument("--sweep", help="axis:v1,v2,... with axis in " + ", ".join(SWEEP_AXES))
    p.add_argument("--jobs", type=int, default=1, help="parallel trials (joblib)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def parse_sweep(text: str | None):
    if text is None:
        return None
    axis, sep, values = text.partition(":")
    if not sep or axis not in SWEEP_AXES:
        raise ConfigError(f"--sweep: expected axis:v1,v2,... with axis in {SWEEP_AXES}")
    try:
        vals = [float(v) for v in values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--sweep: {exc}") from None
    if not vals:
        raise ConfigError("--sweep: no values given")
    if vals != sorted(vals):
        raise ConfigError("--sweep: values must be sorted")
    if axis == "avg_hop_distance_bins" and len(vals) < 2:
        raise ConfigError("--sweep: avg_hop_distance_bins needs at least two bin edges")
    if axis == "anchor_count":
        if any(v != int(v) for v in vals):
            raise ConfigError("--sweep: anchor counts must be integers")
        vals = [int(v) for v in vals]
    return axis, vals


def resolve_config(args) -> ScenarioConfig:
    if args.scenario is None:
        cfg = DEFAULT_SCENARIO
    else:
        try:
            cfg = parse_scenario(args.scenario)
        except OSError as exc:
            raise ConfigError(f"scenario: cannot read {args.scenario}: {exc.strerror}") from None
    changes = {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["base_seed"] = args.seed
    return cfg.replace(**changes) if changes else cfg


def _trial_rows(results):
    for r in results:
        for nid, true, est, err, ok, it in zip(r.node_ids, r.true_positions, r.estimates,
                                              r.errors, r.localized, r.sca_iters):
            yield [r.trial, r.algo, int(nid), fmt(true[0]), fmt(true[1]), fmt(est[0]),
                   fmt(est[1]), fmt(err), int(ok), int(it)]


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def execute(cfg: ScenarioConfig, algos, sweep_plan, out: Path, n_jobs: int = 1,
            written: list[Path] | None = None) -> list[Path]:
    """Run the campaign and write the CSV trio.

    Each path is appended to ``written`` before the file is opened, so a
    caller can clean up after a failure part-way through.
    """
    if sweep_plan is None:
        res = run_trials(cfg, algos, n_jobs=n_jobs)
        summaries = [summarize(res[a], cfg.comm_radius) for a in algos]
        blocks = [(None, a, res[a]) for a in algos]
    else:
        summaries, blocks = sweep(cfg, *sweep_plan, algos=algos, n_jobs=n_jobs)

    written = [] if written is None else written
    path = out / "trials.csv"
    written.append(path)
    _write_csv(path, TRIALS_COLUMNS,
               (row for _, _, results in blocks for row in _trial_rows(results)))

    path = out / "summary.csv"
    written.append(path)
    _write_csv(path, SUMMARY_COLUMNS,
               ([s.algo, fmt(s.axis_value), fmt(s.ale), fmt(s.mean_rmse),
                 fmt(s.pct_unlocalizable)] for s in summaries))

    cdf_rows = []
    for a in algos:
        pooled = np.concatenate([r.errors for _, algo, results in blocks if algo == a
                                 for r in results])
        pooled = pooled[np.isfinite(pooled)]
        if len(pooled):
            for e, f in zip(*error_cdf(pooled)):
                cdf_rows.append([a, fmt(e), fmt(f)])
    path = out / "cdf.csv"
    written.append(path)
    _write_csv(path, CDF_COLUMNS, cdf_rows)
    return written


def main(argv=None) -> int:
    written: list[Path] = []
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = resolve_config(args)
        sweep_plan = parse_sweep(args.sweep)
        if args.jobs == 0:
            raise ConfigError("--jobs must be non-zero")
        algos = ALGORITHMS if args.algo == "both" else (args.algo,)
        if sweep_plan is not None and sweep_plan[0] != "avg_hop_distance_bins":
            for v in sweep_plan[1]:
                config_for_axis(cfg, sweep_plan[0], v)  # validates every sweep point up front

        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            print(f"awminmax: cannot create {out}: {exc}", file=sys.stderr)
            return EXIT_IO

        logger.info("running %s for %d trials", ",".join(algos), cfg.trials)
        execute(cfg, algos, sweep_plan, out, args.jobs, written)
        manifest = RunManifest(
            scenario_path=args.scenario,
            output_dir=str(out),
            algorithms=list(algos),
            sweep=None if sweep_plan is None else {"axis": sweep_plan[0],
                                                   "values": list(sweep_plan[1])},
            seed=cfg.base_seed,
            trials=cfg.trials,
            tool_version=__version__,
            scenario=cfg.to_dict(),
        )
        path = out / "manifest.json"
        written.append(path)
        path.write_text(json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n")
    except ConfigError as exc:
        _cleanup(written)
        print(f"awminmax: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        _cleanup(written)
        print(f"awminmax: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BaseException:
        _cleanup(written)
        raise
    return EXIT_OK


def _cleanup(paths):
    for p in paths:
        try:
            p.unlink()
        except OSError:
            pass


if __name__ == "__main__":
    sys.exit(main())
