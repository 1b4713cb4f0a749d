"""JSON experiment configs, dataset/target construction and run outputs.

A config is one JSON object with a ``model`` name ("qugan" or "cgan") and the
sections ``layout``, ``train``, ``eval`` and ``data``.  Relative data paths are
resolved against the directory of the config file.  Shipped presets live in
``qugan/presets`` and can be named instead of a path.
"""
from __future__ import annotations

import copy
import io
import json
import time
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .classical import CGanConfig, train_cgan
from .data import BivariateParams, bivariate_histogram, load_csv, sample_bivariate, write_points_csv
from .encoding import Scaler, fit_scaler
from .errors import ConfigurationError, DataError
from .metrics import Histogram2D, histogram
from .trainer import QuGAN, TrainConfig, train

PRESET_DIR = Path(__file__).resolve().parent / "presets"
MODELS = ("qugan", "cgan")
SECTIONS = ("layout", "train", "eval", "data")
DATA_KINDS = ("bivariate", "csv")
TARGETS = ("analytic", "dataset")


def package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def preset_names() -> list[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.json"))


def _resolve_source(source) -> Path:
    path = Path(source)
    if path.suffix != ".json" and not path.exists() and (PRESET_DIR / f"{source}.json").exists():
        return PRESET_DIR / f"{source}.json"
    return path


def load_config(source) -> dict:
    """Read a config file or preset name into a plain dict with resolved paths."""
    path = _resolve_source(source)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigurationError(f"config not found: {source} (presets: {', '.join(preset_names())})") from None
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    data = raw.get("data")
    if isinstance(data, dict) and isinstance(data.get("path"), str):
        p = Path(data["path"])
        if not p.is_absolute():
            data["path"] = str((path.parent / p).resolve())
    return raw


@dataclass
class DataSpec:
    kind: str = "bivariate"
    count: int = 200
    seed: int | None = None
    means: tuple[float, float] = (0.65, 0.45)
    stds: tuple[float, float] = (0.10, 0.05)
    path: str | None = None
    classes: tuple[str, ...] | None = None
    normalize: bool = False
    target: str = "analytic"

    def validate(self) -> "DataSpec":
        if self.kind not in DATA_KINDS:
            raise ConfigurationError(f"data.kind must be one of {DATA_KINDS}, got {self.kind!r}")
        if self.target not in TARGETS:
            raise ConfigurationError(f"data.target must be one of {TARGETS}, got {self.target!r}")
        if self.kind == "bivariate" and self.count < 1:
            raise ConfigurationError("data.count must be >= 1")
        if self.kind == "csv" and not self.path:
            raise ConfigurationError("data.path is required for csv data")
        if self.kind == "csv" and self.target == "analytic":
            raise ConfigurationError("an analytic target exists only for bivariate data")
        try:
            BivariateParams(self.means, self.stds)
        except ValueError as exc:
            raise ConfigurationError(f"data: {exc}") from None
        return self


@dataclass
class Experiment:
    model: str
    train: TrainConfig | CGanConfig
    data: DataSpec
    snapshot: dict = field(repr=False)

    @property
    def seed(self) -> int:
        return self.train.seed


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigurationError(f"section {name!r} must be a JSON object")
    return dict(sec)


def _pop_eval(ev: dict) -> dict:
    mapping = {"bins": "bins", "sample_count": "eval_sample_count", "interval": "eval_interval"}
    unknown = set(ev) - set(mapping)
    if unknown:
        raise ConfigurationError(f"unknown eval option(s): {sorted(unknown)}")
    return {mapping[k]: v for k, v in ev.items()}


def build_experiment(raw: dict, seed_override: int | None = None) -> Experiment:
    """Validate a raw config dict; ``seed_override`` replaces ``train.seed``."""
    raw = copy.deepcopy(raw)
    unknown = set(raw) - set(SECTIONS) - {"model", "name", "description"}
    if unknown:
        raise ConfigurationError(f"unknown top-level key(s): {sorted(unknown)}")
    model = raw.get("model", "qugan")
    if model not in MODELS:
        raise ConfigurationError(f"model must be one of {MODELS}, got {model!r}")
    if seed_override is not None:
        raw.setdefault("train", {})["seed"] = int(seed_override)
    layout, tr, ev, data = (_section(raw, s) for s in SECTIONS)
    options = {**layout, **tr, **_pop_eval(ev)}
    try:
        if model == "qugan":
            cfg = TrainConfig.from_dict(options)
        else:
            cfg = CGanConfig.from_dict(options)
        spec = DataSpec(**data)
    except TypeError as exc:
        raise ConfigurationError(f"bad config value: {exc}") from None
    if spec.classes is not None:
        spec.classes = tuple(str(c) for c in spec.classes)
    spec.means, spec.stds = tuple(spec.means), tuple(spec.stds)
    spec.validate()
    if model == "qugan" and cfg.dim != 2:
        raise ConfigurationError("experiments use 2D data; layout.dim must be 2")
    return Experiment(model, cfg, spec, raw)


@dataclass
class PreparedData:
    points: np.ndarray  # normalized to [0,1]^2
    scaler: Scaler
    target: Histogram2D


def data_seed(spec: DataSpec, run_seed: int):
    return spec.seed if spec.seed is not None else np.random.SeedSequence([int(run_seed), 4])


def prepare_data(spec: DataSpec, run_seed: int, bins: int) -> PreparedData:
    if spec.kind == "bivariate":
        params = BivariateParams(spec.means, spec.stds)
        raw = sample_bivariate(params, spec.count, data_seed(spec, run_seed))
    else:
        try:
            raw = load_csv(spec.path, spec.classes).points
        except FileNotFoundError:
            raise ConfigurationError(f"data file not found: {spec.path}") from None
        if len(raw) == 0:
            raise DataError(f"no rows of classes {spec.classes} in {spec.path}")
    scaler = fit_scaler(raw) if spec.normalize else Scaler.identity(2)
    points = scaler.transform(raw)
    if spec.target == "analytic":
        target = bivariate_histogram(BivariateParams(spec.means, spec.stds), bins)
    else:
        target = histogram(points, bins)
    return PreparedData(points, scaler, target)


def _csv_text(points, header=("x", "y")) -> str:
    buf = io.StringIO()
    write_points_csv(buf, points, header=header)
    return buf.getvalue()


def _hellinger_csv(pairs) -> str:
    lines = ["epoch,hellinger"] + [f"{e},{h:.17g}" for e, h in pairs]
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run_experiment(exp: Experiment, prepared: PreparedData | None = None) -> dict[str, str]:
    """Train and render every output file in memory, keyed by file name."""
    cfg = exp.train
    prepared = prepared or prepare_data(exp.data, cfg.seed, cfg.bins)
    scaler = prepared.scaler
    if exp.model == "qugan":
        trace = train(cfg, prepared.points, prepared.target)
        params = {
            "model": "qugan",
            "dim": cfg.dim,
            "theta_d": trace.final.theta_d.tolist(),
            "theta_g": trace.final.theta_g.tolist(),
            "scaler": scaler.to_dict(),
        }
    else:
        trace = train_cgan(cfg, prepared.points, prepared.target)
        params = {
            "model": "cgan",
            "gen_widths": list(trace.generator.widths),
            "disc_widths": list(trace.discriminator.widths),
            "generator": trace.generator.flat().tolist(),
            "discriminator": trace.discriminator.flat().tolist(),
            "param_count": trace.generator.count_params(),
            "scaler": scaler.to_dict(),
        }
    series = [(0, trace.initial_hellinger)] + [(r.epoch, r.hellinger) for r in trace.records if r.hellinger is not None]
    files = {"hellinger.csv": _hellinger_csv(series)}
    files["samples_epoch_0.csv"] = _csv_text(scaler.inverse(trace.initial_samples))
    for r in trace.records:
        if r.samples is not None:
            files[f"samples_epoch_{r.epoch}.csv"] = _csv_text(scaler.inverse(r.samples))
    files["params.json"] = _json_text(params)
    return files


def write_outputs(out_dir, files: dict[str, str], exp: Experiment, started: float) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")
    manifest = {
        "config": exp.snapshot,
        "seed": exp.seed,
        "version": package_version(),
        "outputs": sorted(files),
        "duration_seconds": round(time.monotonic() - started, 3),
    }
    (out / "manifest.json").write_text(_json_text(manifest), encoding="utf-8")
    return manifest


def qugan_from_params(params: dict) -> tuple[QuGAN, np.ndarray, np.ndarray]:
    if params.get("model", "qugan") != "qugan":
        raise ConfigurationError("params file is not from a QuGAN run")
    try:
        dim = int(params["dim"])
        theta_d = np.asarray(params["theta_d"], dtype=float)
        theta_g = np.asarray(params["theta_g"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed params file: {exc}") from None
    model = QuGAN(dim)
    if theta_d.shape != (model.num_disc_params,) or theta_g.shape != (model.num_gen_params,):
        raise ConfigurationError(
            f"expected {model.num_disc_params}+{model.num_gen_params} parameters, got {theta_d.size}+{theta_g.size}"
        )
    return model, theta_d, theta_g
