"""Command-line driver for the toy identity experiment.

Verbs: ``train``, ``eval``, ``plot``, ``export-waveforms``. Exit codes are
0 on success, 1 for usage/config/input errors and 2 for numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import re
import sys
from dataclasses import asdict, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import numpy as np

from . import __version__, svg
from .errors import AliasingError, ConfigError, MalformedStreamError, TrainingDiverged
from .fourier import FrequencySet, coefficients, matrix_rows, read_coefficient_csv, write_coefficient_csv
from .model import load_checkpoint, one_hot, save_params
from .sampler import SampleGrid, read_waveform_csv, sample_values, sample_waveform, write_waveform_csv
from .trainer import TrainConfig, load_config, read_loss_csv, train, write_loss_csv

CHECKPOINT = "checkpoint.bin"
LOSS_CSV = "loss.csv"
COEFF_CSV = "coefficients.csv"
MANIFEST = "manifest.json"
PLOTS = ("waveforms_0_4.svg", "waveforms_11_15.svg", "coefficients.svg", "loss.svg")


_INT_OR_RANGE = re.compile(r"^(-?\d+)(?:-(-?\d+))?$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def waveform_csv_name(x: int) -> str:
    return f"waveform_x{x:02d}.csv"


def parse_int_list(text: str) -> List[int]:
    """``"0,3,5-8"`` -> ``[0, 3, 5, 6, 7, 8]``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = _INT_OR_RANGE.match(part)
        if not m:
            raise UsageError(f"cannot parse {part!r} as an integer or range")
        lo, hi = int(m.group(1)), int(m.group(2) or m.group(1))
        out.extend(range(lo, hi + 1))
    if not out:
        raise UsageError(f"empty integer list {text!r}")
    return out


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def update_manifest(out_dir: Path, names: Iterable[str], config: Optional[Dict] = None) -> Path:
    """Record checksums for ``names``, creating the manifest on first use."""
    path = out_dir / MANIFEST
    now = datetime.now(timezone.utc).isoformat(timespec="seconds")
    if path.exists():
        manifest = json.loads(path.read_text())
    else:
        manifest = {"output_dir": str(out_dir.resolve()), "created": now, "config": None, "files": {}}
    if config is not None:
        manifest["config"] = config
    for name in names:
        manifest["files"][name] = {"sha256": _sha256(out_dir / name), "bytes": (out_dir / name).stat().st_size}
    manifest["updated"] = now
    manifest["version"] = __version__
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def verify_manifest(out_dir) -> List[str]:
    """Problems found: missing files or checksum mismatches (empty when valid)."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / MANIFEST).read_text())
    problems = []
    for name, entry in manifest["files"].items():
        p = out_dir / name
        if not p.exists():
            problems.append(f"{name}: missing")
        elif _sha256(p) != entry["sha256"]:
            problems.append(f"{name}: checksum mismatch")
    return problems


def _config_from_args(args) -> TrainConfig:
    config = load_config(args.config) if args.config else TrainConfig()
    overrides = {
        "seed": args.seed,
        "steps": args.steps,
        "grid_n": args.grid_n,
        "grid_convention": args.grid_convention,
    }
    config = replace(config, **{k: v for k, v in overrides.items() if v is not None})
    return config.validate()


def cmd_train(args) -> int:
    config = _config_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = train(config, log_every=args.log_every)
    grid, freqs = config.grid(), config.frequencies()
    inputs = list(range(config.n_inputs))

    (out / CHECKPOINT).write_bytes(save_params(report.params, config.grid_n, config.grid_convention))
    write_loss_csv(out / LOSS_CSV, report.losses)
    write_coefficient_csv(out / COEFF_CSV, matrix_rows(inputs, freqs, report.a, report.b))
    (out / "config.txt").write_text(config.to_text())
    names = [CHECKPOINT, LOSS_CSV, COEFF_CSV, "config.txt"]
    for x, values in zip(inputs, sample_values(report.params, config.encodings(), grid)):
        write_waveform_csv(out / waveform_csv_name(x), grid.times, values)
        names.append(waveform_csv_name(x))
    update_manifest(out, names, asdict(config))
    print(
        f"trained {config.steps} steps in {report.wall_time:.1f}s: final loss {report.final_loss:.3e}, "
        f"max |A - I| {report.max_identity_error:.3e} -> {out}"
    )
    return 0


def _load(args):
    try:
        data = Path(args.checkpoint).read_bytes()
    except OSError as e:
        raise UsageError(f"cannot read checkpoint {args.checkpoint}: {e.strerror}") from None
    params, grid_n, convention = load_checkpoint(data)
    grid = SampleGrid(args.grid_n or grid_n or 256, args.grid_convention or convention)
    return params, grid


def _check_inputs(xs, params):
    for x in xs:
        if not 0 <= x < params.encoding_dim:
            raise UsageError(f"input x = {x} is outside 0..{params.encoding_dim - 1} for this checkpoint")


def cmd_eval(args) -> int:
    params, grid = _load(args)
    xs = parse_int_list(args.x)
    _check_inputs(xs, params)
    freqs = FrequencySet(tuple(parse_int_list(args.omegas))).check(grid)
    rows = []
    for x in xs:
        wf = sample_waveform(params, one_hot(x, params.encoding_dim), grid, input_id=x)
        rows.extend(coefficients(wf, freqs).rows())
    print("x,omega,a,b")
    for x, omega, a, b in rows:
        print(f"{x},{omega},{a:.17g},{b:.17g}")
    if args.out:
        write_coefficient_csv(args.out, rows)
    return 0


def cmd_export_waveforms(args) -> int:
    params, grid = _load(args)
    xs = parse_int_list(args.x)
    _check_inputs(xs, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    encodings = [one_hot(x, params.encoding_dim) for x in xs]
    names = []
    for x, values in zip(xs, sample_values(params, encodings, grid)):
        write_waveform_csv(out / waveform_csv_name(x), grid.times, values)
        names.append(waveform_csv_name(x))
    update_manifest(out, names)
    print(f"wrote {len(names)} waveform CSVs ({grid.size} rows each) to {out}")
    return 0


def _require(path: Path) -> Path:
    if not path.exists():
        raise FileNotFoundError(f"missing required file {path.name} in {path.parent}")
    return path


def cmd_plot(args) -> int:
    run = Path(args.run_dir)
    coeffs = read_coefficient_csv(_require(run / COEFF_CSV))
    losses = read_loss_csv(_require(run / LOSS_CSV))
    groups = {"waveforms_0_4.svg": range(0, 5), "waveforms_11_15.svg": range(11, 16)}
    waves = {x: read_waveform_csv(_require(run / waveform_csv_name(x))) for g in groups.values() for x in g}

    for name, xs in groups.items():
        series = [(f"x = {x}", *waves[x]) for x in xs]
        title = f"Neural waveforms, x in [{xs[0]}, {xs[-1]}]"
        (run / name).write_text(svg.line_chart(series, title, "t (radians)", "s_x(t)"))

    xs = sorted({r[0] for r in coeffs})
    omegas = sorted({r[1] for r in coeffs})
    a = np.zeros((len(xs), len(omegas)))
    for x, omega, av, _ in coeffs:
        a[xs.index(x), omegas.index(omega)] = av
    (run / "coefficients.svg").write_text(svg.heat_map(a, "Cosine coefficients a[x, omega]", "input x", "frequency omega"))
    steps = np.arange(1, len(losses) + 1)
    (run / "loss.svg").write_text(svg.line_chart([("MSE", steps, losses)], "Training loss", "step", "loss", log_y=True))
    update_manifest(run, PLOTS)
    print(f"wrote {', '.join(PLOTS)} to {run}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="neural-waveform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_flags(p):
        p.add_argument("--grid-n", type=int, help="grid size N")
        p.add_argument("--grid-convention", choices=("open", "paper"))

    p = sub.add_parser("train", help="train on the toy identity task and write a run directory")
    p.add_argument("--config", help="flat 'key = value' config file")
    p.add_argument("--out", required=True, help="run directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--log-every", type=int, default=0, help="log loss every K steps")
    grid_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="print coefficients of a trained model at any frequencies")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--x", required=True, help="input(s), e.g. 7 or 0,3 or 0-4")
    p.add_argument("--omegas", required=True, help="frequencies, e.g. 0-15 or 16,40")
    p.add_argument("--out", help="also write an x,omega,a,b CSV here")
    grid_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="render SVG figures from a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("export-waveforms", help="write t,value CSVs for the given inputs")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--x", required=True, help="input(s), e.g. 0-4")
    p.add_argument("--out", default=".", help="output directory")
    grid_flags(p)
    p.set_defaults(func=cmd_export_waveforms)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrainingDiverged as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConfigError, AliasingError, MalformedStreamError, UsageError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
