"""Command-line runner: ``endslab <experiment> --config <file> [--out <dir>] [--emit-plot svg]``.

Exit codes: 0 when every declared tolerance is met, 1 when a check fails,
2 for configuration errors (including unknown experiments) and 3 for
numerical failures.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .lab import REGISTRY, ConfigError, run_experiment
from .report import ExperimentReport, config_hash, write_atomic

log = logging.getLogger("endslab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
_SECTIONS = {"experiment", "model", "params"}
_GROUP_KEYS = ("oracle", "variant", "pair", "z", "l", "p", "n", "control")


def load_config(path) -> dict:
    """Parse an INI file into ``{"experiment": name|None, "model": {...}, "params": {...}}``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            text = fh.read()
        cp.read_string(text, source=str(path))
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    extra = set(cp.sections()) - _SECTIONS
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(extra))}")
    name = cp.get("experiment", "name", fallback=None)
    if cp.has_section("experiment") and set(cp["experiment"]) - {"name", "criterion"}:
        raise ConfigError("[experiment] accepts only 'name' and 'criterion'")
    return dict(experiment=name,
                model=dict(cp["model"]) if cp.has_section("model") else {},
                params=dict(cp["params"]) if cp.has_section("params") else {})


def _canonical(name, cfg) -> str:
    return json.dumps(dict(experiment=name, model=cfg["model"], params=cfg["params"]), sort_keys=True)


def header(name: str, cfg: dict, rep: ExperimentReport) -> dict:
    exp = REGISTRY[name]
    return {"endslab_version": __version__, "experiment": name,
            "criterion": exp.criterion if exp.criterion is not None else "none",
            "config_hash": config_hash(_canonical(name, cfg)),
            "passed": rep.passed}


def emit_plot(rep: ExperimentReport, path: Path) -> bool:
    """SVG of the declared columns; returns False when matplotlib is missing."""
    plot = REGISTRY[rep.name].plot
    if not plot or not rep.rows:
        return False
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        log.warning("matplotlib not installed; skipping plot")
        return False
    matplotlib.rcParams["svg.hashsalt"] = "endslab"
    x, ys = plot
    fig, ax = plt.subplots(figsize=(6, 4))
    groups = {}
    for r in rep.rows:
        if x not in r:
            continue
        key = tuple((g, r[g]) for g in _GROUP_KEYS if g in r)
        groups.setdefault(key, []).append(r)
    logscale = True
    for key, rows in groups.items():
        for y in ys:
            pts = [(r[x], abs(r[y])) for r in rows if y in r and isinstance(r[y], (int, float))]
            if not pts:
                continue
            xs, vs = zip(*pts)
            logscale &= min(xs) > 0 and min(vs) > 0
            label = y + "".join(f" {k}={v}" for k, v in key)
            ax.plot(xs, vs, "o-", ms=3, label=label)
    if logscale:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(x)
    ax.set_title(rep.name)
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return True


def run_one(name: str, cfg: dict, out: str = None, plot: str = None, fmt: str = "csv") -> int:
    """Run one experiment, write outputs and return the exit code."""
    if cfg.get("experiment") and cfg["experiment"] != name:
        log.error("config is for %r, not %r", cfg["experiment"], name)
        return EXIT_CONFIG
    try:
        rep = run_experiment(name, cfg["model"], cfg["params"])
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError, ValueError, MemoryError) as exc:
        log.error("numerical failure in %s: %s", name, exc)
        return EXIT_NUMERIC
    head = header(name, cfg, rep)
    for c in rep.checks:
        print(f"{name}: {c.name} value={c.value:.6g} target={c.target:.6g} tol={c.tol:.3g} "
              f"{'PASS' if c.passed else 'FAIL'}")
    print(f"{name}: {'PASS' if rep.passed else 'FAIL'}")
    if out:
        d = Path(out)
        if fmt in ("csv", "both"):
            write_atomic(str(d / f"{name}.csv"), rep.to_csv(head))
        if fmt in ("json", "both"):
            write_atomic(str(d / f"{name}.json"), rep.to_json(head))
        if plot == "svg":
            d.mkdir(parents=True, exist_ok=True)
            emit_plot(rep, d / f"{name}.svg")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _run_file(args):
    path, out, plot, fmt = args
    try:
        cfg = load_config(path)
        if not cfg["experiment"]:
            raise ConfigError(f"{path}: [experiment] name missing")
    except ConfigError as exc:
        log.error("%s", exc)
        return path, EXIT_CONFIG
    return path, run_one(cfg["experiment"], cfg, out, plot, fmt)


def run_catalog(directory: str, out: str = None, plot: str = None, fmt: str = "csv") -> int:
    """Run every ``*.ini`` in ``directory``; workers capped by ``ENDSLAB_THREADS``."""
    files = sorted(str(p) for p in Path(directory).glob("*.ini"))
    if not files:
        log.error("no *.ini files in %s", directory)
        return EXIT_CONFIG
    workers = max(1, int(os.environ.get("ENDSLAB_THREADS", "1")))
    jobs = [(f, out, plot, fmt) for f in files]
    if workers == 1:
        results = [_run_file(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_file, jobs))
    code = EXIT_OK
    for path, c in results:
        print(f"{Path(path).name}: exit {c}")
        code = max(code, c)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="endslab", description=__doc__.splitlines()[0])
    ap.add_argument("experiment", help="experiment name, 'list', or 'all' (config is a directory)")
    ap.add_argument("--config", help="INI file with [experiment], [model] and [params] sections")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--emit-plot", choices=["svg"], help="also write an SVG plot")
    ap.add_argument("--format", choices=["csv", "json", "both"], default="csv")
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--version", action="version", version=f"endslab {__version__}")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.experiment == "list":
        for name, exp in sorted(REGISTRY.items()):
            crit = f"[{exp.criterion}]" if exp.criterion else "[-]"
            print(f"{name:18s} {crit:5s} {exp.summary}")
        return EXIT_OK
    try:
        if args.experiment == "all":
            if not args.config or not os.path.isdir(args.config):
                raise ConfigError("'all' needs --config <directory>")
            return run_catalog(args.config, args.out, args.emit_plot, args.format)
        if args.experiment not in REGISTRY:
            raise ConfigError(f"unknown experiment {args.experiment!r}")
        cfg = load_config(args.config) if args.config else dict(experiment=None, model={}, params={})
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    return run_one(args.experiment, cfg, args.out, args.emit_plot, args.format)


if __name__ == "__main__":
    sys.exit(main())
