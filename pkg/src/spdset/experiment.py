"""Randomized-split evaluation protocol, configuration files and result files."""

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .alignment import learn_weights
from .classifiers import svm_predict, svm_train
from .datasets import load_image_set
from .descriptors import (
    PipelineConfig,
    combine,
    finalize_representation,
    local_grams,
    traditional_covds,
)
from .exceptions import InsufficientSets, InvalidInput, InvalidResult, SpdSetError
from .metrics import pairwise_distances

log = logging.getLogger(__name__)

DESCRIPTORS = ("covds", "covds-s")
CLASSIFIERS = ("nn-airm", "nn-stein", "nn-jeffrey", "nn-lem", "ker-svm")
PRESETS = ("cg", "eth80", "virus", "mdsd")


@dataclass(frozen=True)
class ExperimentConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    descriptor: str = "covds-s"
    classifier: str = "ker-svm"
    splits: int = 10
    train_per_class: int = 5
    seed: int = 0
    k_orders: int = 2
    svm_C: float = 1.0
    rotation: int = 0
    resize_to: tuple = (24, 24)

    def __post_init__(self):
        if self.descriptor not in DESCRIPTORS:
            raise InvalidInput(f"descriptor must be one of {DESCRIPTORS}")
        if self.classifier not in CLASSIFIERS:
            raise InvalidInput(f"classifier must be one of {CLASSIFIERS}")
        if self.splits < 1:
            raise InvalidInput("splits must be >= 1")
        if self.train_per_class < 1:
            raise InvalidInput("train_per_class must be >= 1")
        if self.rotation not in (0, 90, 180, 270):
            raise InvalidInput("rotation must be 0, 90, 180 or 270")
        if self.svm_C <= 0:
            raise InvalidInput("svm_C must be positive")

    def to_mapping(self):
        """Flat ``key -> text`` view, in a fixed order, as written to config files."""
        out = {}
        for f in dataclasses.fields(self):
            if f.name == "pipeline":
                for pf in dataclasses.fields(self.pipeline):
                    if pf.name != "keep_locals":
                        out[pf.name] = _format(getattr(self.pipeline, pf.name))
            else:
                out[f.name] = _format(getattr(self, f.name))
        return out


def _format(value):
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    if value is None:
        return "none"
    return str(value)


def _ints(text):
    return tuple(int(t) for t in text.replace("x", ",").split(",") if t.strip())


def _opt_float(text):
    return None if text.lower() in ("none", "") else float(text)


_PIPELINE_KEYS = {
    "win": int, "stride": int, "beta": float, "lambda_frac": float, "orders": _ints,
    "eig_floor": float, "kernel": str, "gamma": _opt_float, "coef0": float, "degree": int,
    "min_reg": float,
}
_TOP_KEYS = {
    "descriptor": str, "classifier": str, "splits": int, "train_per_class": int, "seed": int,
    "k_orders": int, "svm_C": float, "rotation": int, "resize_to": _ints,
}


def parse_key_values(text):
    """Parse ``key = value`` (or ``key: value``) lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            raise InvalidInput(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split(sep, 1))
        out[key] = value
    return out


def preset_text(name):
    if name not in PRESETS:
        raise InvalidInput(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("spdset").joinpath("presets", f"{name}.preset").read_text()


def config_from_mapping(values, base=None):
    """Build a config from text values, starting from ``base`` (or the defaults)."""
    values = dict(values)
    if "preset" in values:
        base = config_from_mapping(parse_key_values(preset_text(values.pop("preset"))), base)
    base = base or ExperimentConfig()
    top, pipe = {}, {}
    for key, text in values.items():
        try:
            if key in _TOP_KEYS:
                top[key] = _TOP_KEYS[key](text)
            elif key in _PIPELINE_KEYS:
                pipe[key] = _PIPELINE_KEYS[key](text)
            else:
                raise InvalidInput(f"unknown config key {key!r}")
        except ValueError as exc:
            raise InvalidInput(f"bad value for {key!r}: {text!r}") from exc
    pipeline = dataclasses.replace(base.pipeline, **pipe)
    return dataclasses.replace(base, pipeline=pipeline, **top)


def load_config(path_or_preset, overrides=None):
    """Read a config file; a bare preset name (``eth80`` ...) loads the shipped preset."""
    p = Path(path_or_preset)
    if p.is_file():
        values = parse_key_values(p.read_text())
    elif str(path_or_preset) in PRESETS:
        values = parse_key_values(preset_text(str(path_or_preset)))
    else:
        raise InvalidInput(f"config file {path_or_preset} not found")
    values.update(overrides or {})
    return config_from_mapping(values)


@dataclass
class ExperimentResult:
    accuracies: list
    config: dict
    timings: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def mean(self):
        return float(np.mean(self.accuracies))

    @property
    def std(self):
        if len(self.accuracies) < 2:
            return 0.0
        return float(np.std(self.accuracies, ddof=1))


def split_indices(labels, classes, train_per_class, seed, split):
    """Train/test indices for one split; depends only on (seed, split, manifest order)."""
    rng = np.random.default_rng([seed, split])
    train, test = [], []
    for c in classes:
        idx = np.flatnonzero(labels == c)
        perm = rng.permutation(len(idx))
        train.extend(idx[perm[:train_per_class]])
        test.extend(idx[perm[train_per_class:]])
    return np.sort(np.array(train)), np.sort(np.array(test))


def _classify(cfg, reps, labels, train, test):
    if cfg.classifier == "ker-svm":
        model = svm_train(reps[train], labels[train], C=cfg.svm_C)
        t = time.perf_counter()
        pred = svm_predict(model, reps[test])
    else:
        t = time.perf_counter()
        D = pairwise_distances(reps[test], reps[train], cfg.classifier[3:])
        pred = labels[train][np.argmin(D, axis=1)]
    return pred, t


def run_experiment(cfg, manifest):
    """Evaluate ``cfg`` over ``cfg.splits`` random train/test splits of ``manifest``."""
    counts = {c: len(v) for c, v in manifest.sets_per_class.items()}
    if cfg.train_per_class >= min(counts.values()):
        raise InsufficientSets(
            f"train_per_class={cfg.train_per_class} leaves no test set for some class "
            f"(smallest class has {min(counts.values())} sets)"
        )
    timings = {"generation": 0.0, "train": 0.0, "test": 0.0}
    t0 = time.perf_counter()
    entries = manifest.entries()
    labels = np.array([c for c, _ in entries])
    sets = [load_image_set(e, c, cfg.resize_to, cfg.rotation) for c, e in entries]
    pipe = cfg.pipeline
    if cfg.descriptor == "covds":
        fixed = np.stack([traditional_covds(s.frames, pipe.lambda_frac) for s in sets])
        L = None
    else:
        L = np.stack([local_grams(s.frames, pipe) for s in sets])
        learn = len(pipe.local_orders) > 1
        fixed = None if learn else np.stack(
            [finalize_representation(l[0], pipe.eig_floor) for l in L])
    timings["generation"] = time.perf_counter() - t0

    accuracies, failures = [], []
    for split in range(cfg.splits):
        train, test = split_indices(labels, manifest.classes, cfg.train_per_class,
                                    cfg.seed, split)
        try:
            t1 = time.perf_counter()
            if fixed is not None:
                reps = fixed
            else:
                # weights see the training split only
                w = learn_weights(L[train], labels[train], cfg.k_orders, pipe.local_orders)
                reps = np.stack([finalize_representation(combine(l, w.mask), pipe.eig_floor)
                                 for l in L])
                log.info("split %d: raw weights %s mask %s", split, w.raw, w.mask)
            pred, t2 = _classify(cfg, reps, labels, train, test)
            t3 = time.perf_counter()
        except SpdSetError as exc:
            log.warning("split %d failed: %s", split, exc)
            failures.append((split, f"{type(exc).__name__}: {exc}"))
            if len(failures) * 2 > cfg.splits:
                raise
            continue
        timings["train"] += t2 - t1
        timings["test"] += t3 - t2
        accuracies.append(100.0 * float(np.mean(pred == labels[test])))
    return ExperimentResult(accuracies, cfg.to_mapping(), timings, failures)


HEADER = (
    "# spdset experiment result\n"
    "# accuracies in percent; std is the sample standard deviation (n-1 denominator)\n"
)


def format_results(res):
    if not res.accuracies:
        raise InvalidResult("no successful splits to report")
    lines = [HEADER.rstrip("\n")]
    lines += [f"config.{k}: {v}" for k, v in res.config.items()]
    lines.append(f"splits_ok: {len(res.accuracies)}")
    lines += [f"split.{i:02d}: {a!r}" for i, a in enumerate(res.accuracies)]
    lines += [f"failed.{s:02d}: {msg}" for s, msg in res.failures]
    lines.append(f"mean_full: {res.mean!r}")
    lines.append(f"std_full: {res.std!r}")
    lines.append(f"mean: {res.mean:.2f}, std: {res.std:.2f}")
    lines.append(f"table: {res.mean:.2f}±{res.std:.2f}")
    return "\n".join(lines) + "\n"


def emit_results(res, path):
    """Write the result document to ``path`` and phase timings to ``path.timings``.

    Timings live in the side file so that the result document is
    byte-identical across reruns of the same configuration.
    """
    text = format_results(res)
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    timing_lines = [f"{k}_seconds: {v:.6f}" for k, v in res.timings.items()]
    Path(f"{path}.timings").write_text("\n".join(timing_lines) + "\n", encoding="utf-8")
    return path


def parse_results(path):
    """Read a result document back.

    Returns a dict with ``config``, ``accuracies``, full-precision ``mean``
    and ``std``, the rounded ``summary`` line and the remaining scalar keys.
    """
    config, accs, out = {}, [], {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        key, value = line.split(": ", 1)
        if key.startswith("config."):
            config[key[7:]] = value
        elif key.startswith("split."):
            accs.append(float(value))
        elif key in ("mean_full", "std_full"):
            out[key[:-5]] = float(value)
        elif key == "mean":
            out["summary"] = line
        else:
            out[key] = value
    out["config"] = config
    out["accuracies"] = accs
    return out
