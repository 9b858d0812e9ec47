"""Command-line experiment runner.

`supercon run` executes one verification suite with a JSON config,
writes canonical CSVs (plus JSON mirrors, a manifest, and rendered
figures) into an output directory, and exits 0 only if every suite
check passed. `supercon plotdata` reshapes a result CSV into tidy
(x, y, series, stderr) rows for external plotting tools.

Exit codes: 0 all checks passed, 1 some check failed, 2 bad
configuration or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import figures
from .report import CRITERIA_HEADER, read_csv, write_csv, write_json_mirror, write_manifest
from .suites import ConfigError, DEFAULT_SEED, SUITE_NAMES, params_class, run_suite

__all__ = ["build_parser", "main"]

PLOT_KINDS = ("drift-vs-steps", "deviation-vs-n", "predicted-vs-empirical", "gap-histogram")
TIDY_HEADER = ("x", "y", "series", "stderr")

_PLOT_SCHEMAS = {
    "drift-vs-steps": ("k", "rms_angle", "trials"),
    "deviation-vs-n": ("family", "N", "trials", "deviation"),
    "predicted-vs-empirical": (
        "conclusion_id", "N", "M", "trials", "predicted", "mean", "std", "rel_err", "seed",
    ),
    "gap-histogram": (
        "trial", "phi_basic", "phi_sup", "gap", "residual_basic", "residual_sup",
        "iters_basic", "iters_sup", "valid",
    ),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supercon",
        description="Run superiorization verification suites and reshape their results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one verification suite")
    runp.add_argument("--suite", required=True, choices=SUITE_NAMES)
    runp.add_argument("--config", type=Path, default=None,
                      help="JSON file with suite parameters")
    runp.add_argument("--seed", type=int, default=None,
                      help="master seed (beats config seed and SUPERCON_SEED)")
    runp.add_argument("--trials", type=int, default=None,
                      help="override the suite's headline trial count")
    runp.add_argument("--dim", type=int, default=None,
                      help="override the suite's headline dimension")
    runp.add_argument("--out", type=Path, default=Path("results"),
                      help="output directory (default: results)")
    runp.add_argument("--threads", type=int, default=1,
                      help="worker threads for trial execution")

    plotp = sub.add_parser("plotdata", help="reshape a result CSV for plotting")
    plotp.add_argument("--results", type=Path, required=True)
    plotp.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plotp.add_argument("--out", type=Path, required=True)
    return parser


def _resolve_seed(cli_seed, config_seed) -> int:
    if cli_seed is not None:
        seed = int(cli_seed)
    elif config_seed is not None:
        seed = int(config_seed)
    else:
        env = os.environ.get("SUPERCON_SEED")
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ConfigError(f"SUPERCON_SEED is not an integer: {env!r}") from None
        else:
            seed = DEFAULT_SEED
    if not (0 <= seed < 2**64):
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    return seed


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def _apply_overrides(cls, raw: dict, trials, dim) -> dict:
    merged = dict(raw)
    if trials is not None:
        merged[cls.TRIALS_FIELD] = trials
    if dim is not None:
        if cls.DIM_FIELD is None:
            raise ConfigError(
                "this suite has no single headline dimension; set dims in the config file"
            )
        merged[cls.DIM_FIELD] = dim
    return merged


def _render_figures(suite: str, result, outdir: Path) -> list:
    paths = []
    if suite == "com-verify":
        _, rows = result.tables["predictions"]
        paths.append(figures.fig_predicted_vs_empirical(
            [r[0] for r in rows],
            [r[4] for r in rows],
            [r[5] for r in rows],
            [r[6] for r in rows],
            outdir / "predictions.png",
        ))
    elif suite == "scaling":
        _, rows = result.tables["deviations"]
        series = {}
        for fam, n, _, dev in rows:
            series.setdefault(fam, ([], []))
            series[fam][0].append(n)
            series[fam][1].append(dev)
        _, fit_rows = result.tables["fits"]
        fits = {fam: (slope, intercept) for fam, slope, intercept in fit_rows}
        paths.append(figures.fig_loglog_scaling(series, fits, outdir / "scaling.png"))
    elif suite == "linsup":
        _, orows = result.tables["outcomes"]
        paths.append(figures.fig_gap_histogram([r[3] for r in orows], outdir / "gaps.png"))
        _, drows = result.tables["drift"]
        srow = result.tables["summary"][1][0]
        paths.append(figures.fig_drift(
            [r[0] for r in drows], [r[1] for r in drows], srow[4], srow[5],
            outdir / "drift.png",
        ))
    elif suite == "supmatrix-trace":
        _, rows = result.tables["instances"]
        paths.append(figures.fig_residuals(
            [r[1] for r in rows], outdir / "telescoping.png",
            "Row telescoping residuals", "max residual",
        ))
    elif suite == "projder-check":
        _, rows = result.tables["fd_checks"]
        paths.append(figures.fig_residuals(
            [r[3] for r in rows], outdir / "fd_agreement.png",
            "Finite-difference agreement", "relative error",
        ))
    return paths


def _cmd_run(args) -> int:
    try:
        raw = _load_config(args.config)
        cls = params_class(args.suite)
        merged = _apply_overrides(cls, raw, args.trials, args.dim)
        params = cls.from_dict(merged)
        seed = _resolve_seed(args.seed, params.seed)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    result = run_suite(args.suite, params, seed, args.threads)
    wall = time.perf_counter() - t0

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for name, (header, rows) in result.tables.items():
        outputs.append(write_csv(outdir / f"{name}.csv", header, rows))
        write_json_mirror(outdir / f"{name}.json", header, rows)
    crit_rows = [(c.criterion, c.description, c.passed, c.detail) for c in result.criteria]
    outputs.append(write_csv(outdir / "criteria.csv", CRITERIA_HEADER, crit_rows))
    write_json_mirror(outdir / "criteria.json", CRITERIA_HEADER, crit_rows)
    outputs.extend(_render_figures(args.suite, result, outdir))
    write_manifest(
        outdir / "manifest.json", suite=args.suite, config=asdict(params),
        seed=seed, threads=args.threads, wall_time_s=wall,
        outputs=[p.name for p in outputs], timings=result.timings,
    )

    for c in result.criteria:
        tag = "PASS" if c.passed else "FAIL"
        print(f"[{tag}] {c.criterion} {c.description} -- {c.detail}")
    verdict = "PASS" if result.passed else "FAIL"
    print(f"suite {args.suite}: {verdict} ({wall:.1f} s, seed {seed}, out {outdir})")
    return 0 if result.passed else 1


def _tidy_rows(kind: str, header, rows) -> list:
    out = []
    if kind == "drift-vs-steps":
        for r in rows:
            out.append((r[0], r[1], "drift", ""))
    elif kind == "deviation-vs-n":
        series = {}
        for r in rows:
            fam, n, _, dev = r[0], float(r[1]), r[2], float(r[3])
            out.append((repr(np.log(n)), repr(np.log(dev)), fam, ""))
            series.setdefault(fam, []).append((np.log(n), np.log(dev)))
        for fam in sorted(series):
            pts = np.asarray(series[fam])
            if pts.shape[0] >= 2:
                x = pts[:, 0] - pts[:, 0].mean()
                slope = float(np.dot(x, pts[:, 1] - pts[:, 1].mean()) / np.dot(x, x))
                out.append(("", repr(slope), f"{fam}/slope", ""))
    elif kind == "predicted-vs-empirical":
        for r in rows:
            trials = max(int(r[3]), 1)
            stderr = float(r[6]) / (trials ** 0.5)
            out.append((r[4], r[5], r[0], repr(stderr)))
    elif kind == "gap-histogram":
        gaps = np.array([float(r[3]) for r in rows], dtype=float)
        counts, edges = np.histogram(gaps, bins=20)
        centers = 0.5 * (edges[:-1] + edges[1:])
        for c, n in zip(centers, counts):
            out.append((repr(float(c)), str(int(n)), "gap", ""))
    return out


def _cmd_plotdata(args) -> int:
    try:
        if not Path(args.results).exists():
            raise ConfigError(f"results file not found: {args.results}")
        header, rows = read_csv(args.results)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    expected = _PLOT_SCHEMAS[args.kind]
    if not header and not rows:
        write_csv(args.out, TIDY_HEADER, [])
        return 0
    if tuple(header) != expected:
        print(
            f"config error: {args.results} does not match the {args.kind} schema "
            f"(expected columns {', '.join(expected)})",
            file=sys.stderr,
        )
        return 2
    write_csv(args.out, TIDY_HEADER, _tidy_rows(args.kind, header, rows))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_plotdata(args)


if __name__ == "__main__":
    sys.exit(main())
