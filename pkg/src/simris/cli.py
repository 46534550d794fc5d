"""Command-line entry point ``simris``.

Every subcommand writes ``<out>/<subcommand>.csv`` plus a sibling
``<subcommand>.manifest.json`` holding the full configuration, the seed and
the package version. Passing the manifest back through ``--config``
reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import generate_batch
from .config import PRESETS, load_config, load_preset, parse_config
from .correlation import (
    INDOOR_ELEVATION_PDF,
    OUTDOOR_ELEVATION_PDF,
    correlation_matrix,
    eigenvalue_spread,
    nlos_channel_samples,
    ris_elevation_samples,
)
from .errors import ConfigError, SimRISError
from .metrics import SweepAxis, achievable_rate, sweep

SUBCOMMANDS = ("generate", "rate", "sweep-power", "sweep-rx", "sweep-ris", "sweep-n", "corr")
RATE_HEADER = ("axis_value", "mean_rate", "stderr", "mean_rate_no_ris", "n_realizations")
OUT_ENV = "SIMRIS_OUT"
CORR_METHODS = ("empirical", "semi", "analytic")


def fmt(v):
    """Round-trip text for one CSV cell."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def _point_text(p):
    return ";".join(fmt(float(x)) for x in p)


def write_csv(path, header, rows, manifest_name):
    lines = [f"# manifest: {manifest_name}", ",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_manifest(path, subcommand, cfg, csv_name):
    doc = {
        "version": __version__,
        "subcommand": subcommand,
        "seed": cfg.seed,
        "output": csv_name,
        "config": cfg.to_dict(),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def channel_rows(batch):
    n = batch.h.shape[1]
    header = []
    for name in ("h", "g"):
        for i in range(1, n + 1):
            header += [f"re_{name}_{i}", f"im_{name}_{i}"]
    header += ["re_h_siso", "im_h_siso", "los_txris", "los_risrx", "los_txrx"]
    rows = []
    for r in range(len(batch)):
        row = []
        for arr in (batch.h[r], batch.g[r]):
            inter = np.empty(2 * n)
            inter[0::2], inter[1::2] = arr.real, arr.imag
            row += inter.tolist()
        row += [batch.h_siso[r].real, batch.h_siso[r].imag]
        row += [int(x) for x in batch.los_flags[r]]
        rows.append(row)
    return header, rows


def _rate_row(value, res):
    return [value, res.mean_rate, res.stderr, res.mean_rate_no_ris, res.n_realizations]


def _resolve_points(grid, base):
    pts = []
    for v in grid:
        if isinstance(v, (list, tuple)):
            pts.append(tuple(float(x) for x in v) + tuple(base[len(v):]))
        else:
            pts.append((float(v),) + tuple(base[1:]))
    return pts


def build_parser():
    parser = argparse.ArgumentParser(prog="simris", description="RIS-assisted mmWave channel simulator")
    parser.add_argument("--version", action="version", version=f"simris {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="JSON config or run manifest")
        src.add_argument("--preset", choices=PRESETS)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
        p.add_argument("--realizations", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--n-elements", type=int)
        p.add_argument("--pt-dbm", type=float)
        p.add_argument("--phase-mode")
        p.add_argument("--q-bits", type=int)
        p.add_argument("--kappa", type=float)
        p.add_argument("--no-direct-link", action="store_true")
        if name.startswith("sweep-"):
            p.add_argument("--grid", help="JSON list overriding the configured grid")
        if name == "corr":
            p.add_argument("--method", choices=CORR_METHODS, action="append")
    return parser


def _config_from_args(args):
    cfg = load_preset(args.preset) if args.preset else load_config(args.config)
    d = cfg.to_dict()
    for attr, key in (("seed", "seed"), ("realizations", "realizations"), ("workers", "workers"),
                      ("n_elements", "n_elements")):
        if getattr(args, attr) is not None:
            d[key] = getattr(args, attr)
    if args.pt_dbm is not None:
        d["budget"]["pt_dbm"] = args.pt_dbm
    if args.phase_mode is not None:
        d["phase"]["mode"] = args.phase_mode
    if args.q_bits is not None:
        d["phase"]["q_bits"] = args.q_bits
    if args.kappa is not None:
        d["phase"]["kappa"] = args.kappa
    if args.no_direct_link:
        d["include_direct_link"] = False
    if getattr(args, "grid", None):
        axis = args.command.split("-", 1)[1]
        try:
            d["sweep"][axis] = json.loads(args.grid)
        except json.JSONDecodeError as exc:
            raise ConfigError("--grid", f"invalid JSON: {exc}") from None
    return parse_config(d)


def run(command, cfg, out_dir, methods=None):
    """Execute one subcommand; returns the exit code."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_name = f"{command}.csv"
    man_name = f"{command}.manifest.json"
    scene = cfg.scene()
    budget = cfg.link_budget()
    phase = cfg.phase_settings()
    code = 0
    write_manifest(out_dir / man_name, command, cfg, csv_name)

    if command == "generate":
        batch = generate_batch(scene, cfg.realizations, seed=cfg.seed, workers=cfg.workers)
        header, rows = channel_rows(batch)
    elif command == "rate":
        res = achievable_rate(scene, budget, cfg.realizations, cfg.seed, phase, cfg.workers)
        header, rows = RATE_HEADER, [_rate_row(budget.pt_dbm, res)]
    elif command.startswith("sweep-"):
        axis = SweepAxis.parse(command.split("-", 1)[1])
        grid = cfg.sweep.get(axis.value)
        if not grid:
            raise ConfigError(f"sweep.{axis.value}", "no grid configured for this sweep")
        if axis is SweepAxis.RX_POSITION:
            grid = _resolve_points(grid, cfg.rx)
        elif axis is SweepAxis.RIS_POSITION:
            grid = _resolve_points(grid, cfg.ris)
        result = sweep(scene, axis, grid, budget, cfg.realizations, cfg.seed, phase, cfg.workers)
        header, rows = RATE_HEADER, []
        for row in result:
            value = _point_text(row.axis_value) if isinstance(row.axis_value, tuple) else row.axis_value
            if row.error:
                print(f"simris: grid point {value}: {row.error}", file=sys.stderr)
                rows.append([value, math.nan, math.nan, math.nan, 0])
                code = 3
            else:
                rows.append(_rate_row(value, row.result))
    elif command == "corr":
        methods = list(methods or CORR_METHODS)
        m = cfg.corr["realizations"]
        pdf = INDOOR_ELEVATION_PDF if scene.indoor else OUTDOOR_ELEVATION_PDF
        cols = []
        for method in methods:
            if method == "empirical":
                r = correlation_matrix(scene.panel, scene.f_hz, method,
                                       samples=nlos_channel_samples(scene, m, cfg.seed))
            elif method == "semi":
                r = correlation_matrix(scene.panel, scene.f_hz, method,
                                       theta_samples=ris_elevation_samples(scene, m, cfg.seed))
            else:
                r = correlation_matrix(scene.panel, scene.f_hz, method, pdf=pdf)
            cols.append(eigenvalue_spread(r))
        header = ["index", *methods]
        rows = [[i + 1, *(c[i] for c in cols)] for i in range(scene.panel.n_elements)]
    else:
        raise ValueError(f"unknown subcommand {command!r}")

    write_csv(out_dir / csv_name, header, rows, man_name)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = args.out or os.environ.get(OUT_ENV) or "."
    try:
        cfg = _config_from_args(args)
        return run(args.command, cfg, out, getattr(args, "method", None))
    except ConfigError as exc:
        print(f"simris: config error: {exc}", file=sys.stderr)
        return 2
    except (SimRISError, ValueError, OSError) as exc:
        print(f"simris: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
