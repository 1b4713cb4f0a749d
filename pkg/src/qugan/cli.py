"""Command-line driver: ``qugan <subcommand> ...``.

Exit status is 0 on success, 2 on usage, config or input errors and 3 when
training fails at run time.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .circuit import export_qasm
from .data import BivariateParams, load_csv, sample_bivariate, write_points_csv
from .errors import ConfigurationError, TrainingError
from .experiments import (
    build_experiment,
    load_config,
    preset_names,
    prepare_data,
    qugan_from_params,
    run_experiment,
    write_outputs,
)
from .metrics import hellinger, histogram
from .swaptest import build_swap_test

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3
SEED_ENV = "QUGAN_SEED"

log = logging.getLogger("qugan")


class UsageError(Exception):
    pass


def seed_override() -> int | None:
    value = os.environ.get(SEED_ENV)
    if value is None or value.strip() == "":
        return None
    try:
        return int(value)
    except ValueError:
        raise ConfigurationError(f"{SEED_ENV} must be an integer, got {value!r}") from None


def _train(args, model: str) -> int:
    started = time.monotonic()
    exp = build_experiment(load_config(args.config), seed_override())
    if exp.model != model:
        raise ConfigurationError(f"config is for model {exp.model!r}; use the matching train command")
    prepared = prepare_data(exp.data, exp.seed, exp.train.bins)
    log.info("training %s (seed %d) on %d points", exp.model, exp.seed, len(prepared.points))
    files = run_experiment(exp, prepared)
    manifest = write_outputs(args.out, files, exp, started)
    final = files["hellinger.csv"].strip().splitlines()[-1].split(",")[1]
    print(f"final hellinger {float(final):.6f}; wrote {len(manifest['outputs']) + 1} files to {args.out}")
    return EXIT_OK


def cmd_train_qugan(args) -> int:
    return _train(args, "qugan")


def cmd_train_classical(args) -> int:
    return _train(args, "cgan")


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")


def cmd_gen_data(args) -> int:
    if args.kind == "bivariate":
        if args.count < 1:
            raise UsageError("--count must be >= 1")
        try:
            params = BivariateParams(tuple(args.means), tuple(args.stds))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        points, labels = sample_bivariate(params, args.count, args.seed), None
    else:
        if not args.input:
            raise UsageError("csv-filter needs --input")
        try:
            ds = load_csv(args.input, args.classes)
        except FileNotFoundError:
            raise UsageError(f"input not found: {args.input}") from None
        points, labels = ds.points, ds.labels
    fh = _open_out(args.out)
    try:
        write_points_csv(fh, points, labels)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def qasm_for_params(params: dict) -> str:
    """Discriminator and generator preparation followed by the SWAP test."""
    model, theta_d, theta_g = qugan_from_params(params)
    circuit = model.disc_circuit.then(model.gen_circuit).then(build_swap_test(model.layout))
    return export_qasm(circuit, np.concatenate([theta_d, theta_g]), measure=[model.layout.ancilla])


def cmd_export_qasm(args) -> int:
    try:
        params = json.loads(Path(args.params).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"params file not found: {args.params}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.params}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    text = qasm_for_params(params)
    fh = _open_out(args.out)
    try:
        fh.write(text)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _read_points(path):
    try:
        return load_csv(path).points
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}") from None


def cmd_eval(args) -> int:
    samples = _read_points(args.samples)
    if len(samples) == 0:
        raise UsageError(f"no samples in {args.samples}")
    if str(args.target).endswith(".csv"):
        bins = args.bins or 16
        target = histogram(_read_points(args.target), bins)
    else:
        exp = build_experiment(load_config(args.target), seed_override())
        bins = args.bins or exp.train.bins
        prepared = prepare_data(exp.data, exp.seed, bins)
        target = prepared.target
        samples = prepared.scaler.transform(samples)
    print(f"{hellinger(histogram(samples, bins), target):.17g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qugan", description="Quantum GAN experiments on a state-vector simulator.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    presets = ", ".join(preset_names())
    for name, fn, what in (
        ("train-qugan", cmd_train_qugan, "train the quantum GAN"),
        ("train-classical", cmd_train_classical, "train the dense-network baseline"),
    ):
        s = sub.add_parser(name, help=what)
        s.add_argument("--config", required=True, help=f"JSON config path or preset name ({presets})")
        s.add_argument("--out", required=True, help="output directory")
        s.set_defaults(func=fn)

    s = sub.add_parser("gen-data", help="write a dataset as CSV")
    s.add_argument("kind", choices=["bivariate", "csv-filter"])
    s.add_argument("--count", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--means", type=float, nargs=2, default=[0.65, 0.45])
    s.add_argument("--stds", type=float, nargs=2, default=[0.10, 0.05])
    s.add_argument("--input", help="CSV to filter (csv-filter)")
    s.add_argument("--classes", nargs="+", help="labels to keep (csv-filter)")
    s.add_argument("--out", help="output file (default: stdout)")
    s.set_defaults(func=cmd_gen_data)

    s = sub.add_parser("export-qasm", help="export trained circuits as OpenQASM 2.0")
    s.add_argument("params", help="params.json from a QuGAN run")
    s.add_argument("--out", help="output file (default: stdout)")
    s.set_defaults(func=cmd_export_qasm)

    s = sub.add_parser("eval", help="Hellinger distance of samples to a target")
    s.add_argument("samples", help="samples CSV (x,y in data units)")
    s.add_argument("--target", required=True, help="preset name, config path, or a CSV of target points in [0,1]^2")
    s.add_argument("--bins", type=int, help="bins per axis (default: the config's, or 16)")
    s.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except TrainingError as exc:
        print(f"qugan: training failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (UsageError, ValueError) as exc:
        # ConfigurationError and DataError are ValueErrors
        print(f"qugan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qugan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
