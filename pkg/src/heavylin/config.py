"""TOML run configuration shared by every CLI command.

A config has three tables::

    [model]          # alpha, p, q, h.kind, h.params, seed
    [coefficients]   # kind plus kind-specific keys
    [experiment]     # grid sizes, replicate counts, probes, thresholds

Validation errors name the offending key and, when it can be found, its line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .coefficients import CoefficientSeq
from .innovations import TailModel
from .montecarlo import DEFAULT_THRESHOLDS, ExperimentConfig

SECTIONS = ("model", "coefficients", "experiment")
EXPERIMENT_KEYS = {
    "kind", "n", "reps", "seed", "t_points", "deltas", "etas", "beta", "n_list", "eps_grid",
    "reference_size", "threads", "chunk", "thresholds", "zeta", "xi", "r", "threshold",
    "criteria", "gamma", "seeds",
}


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")
        self.line = line


def _locate(text: str, section: str, key: str | None) -> int | None:
    """1-based line of ``key`` inside ``[section]`` (or of the section header)."""
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        head = re.match(r"\s*\[([^\]]+)\]", line)
        if head:
            current = head.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if key and current == section and re.match(rf"\s*{re.escape(key)}\s*[=.]", line):
            return i
    return None


@dataclass
class RunConfig:
    model: TailModel
    seq: CoefficientSeq
    experiment: dict = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> dict:
        return {"model": self.model.to_config(self.seed), "coefficients": self.seq.to_config(),
                "experiment": dict(self.experiment)}

    def with_overrides(self, **overrides) -> "RunConfig":
        exp = dict(self.experiment)
        seed = self.seed
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "seed":
                seed = int(value)
            else:
                exp[key] = value
        return RunConfig(self.model, self.seq, exp, seed)

    def experiment_config(self) -> ExperimentConfig:
        e = self.experiment
        tup = lambda k, d: tuple(float(x) for x in e.get(k, d))
        return ExperimentConfig(
            model=self.model, seq=self.seq, n=int(e.get("n", 1000)), reps=int(e.get("reps", 1000)),
            base_seed=self.seed, t_points=tup("t_points", (1.0,)), deltas=tup("deltas", (0.05,)),
            etas=tup("etas", (1.0,)), beta=float(e.get("beta", 1.0)),
            n_list=tuple(int(x) for x in e.get("n_list", ())), eps_grid=tup("eps_grid", (0.1, 0.25, 0.5)),
            reference_size=int(e.get("reference_size", 100_000)),
            thresholds=dict(e.get("thresholds", {})), threads=int(e.get("threads", 1)),
            chunk=int(e.get("chunk", 250)))


def parse_config(data: Mapping[str, Any], text: str = "", source: str = "<config>") -> RunConfig:
    """Build a :class:`RunConfig` from parsed TOML, mapping failures to line diagnostics."""
    for name in data:
        if name not in SECTIONS:
            raise ConfigError(f"unknown table [{name}]; expected {', '.join(SECTIONS)}", source,
                              _locate(text, name, None))
    for name in ("model", "coefficients"):
        if name not in data:
            raise ConfigError(f"missing table [{name}]", source)
    model_block = dict(data["model"])
    seed = model_block.pop("seed", 0)
    try:
        model = TailModel.from_config(model_block)
    except (KeyError, ValueError, TypeError) as exc:
        key = _offending_key(exc, model_block, ("alpha", "p", "q", "h"))
        raise ConfigError(f"[model] {_describe(exc)}", source, _locate(text, "model", key)) from exc
    try:
        seq = CoefficientSeq.from_config(data["coefficients"])
    except (KeyError, ValueError, TypeError) as exc:
        key = _offending_key(exc, data["coefficients"], tuple(data["coefficients"]))
        raise ConfigError(f"[coefficients] {_describe(exc)}", source,
                          _locate(text, "coefficients", key)) from exc
    experiment = dict(data.get("experiment", {}))
    for key in experiment:
        if key not in EXPERIMENT_KEYS:
            raise ConfigError(f"[experiment] unknown key {key!r}", source, _locate(text, "experiment", key))
    for key in experiment.get("thresholds", {}):
        if key not in DEFAULT_THRESHOLDS:
            raise ConfigError(f"[experiment.thresholds] unknown key {key!r}", source,
                              _locate(text, "experiment.thresholds", key))
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("[model] seed must be a nonnegative integer", source, _locate(text, "model", "seed"))
    return RunConfig(model, seq, experiment, seed)


def _describe(exc: Exception) -> str:
    return f"missing key {exc.args[0]!r}" if isinstance(exc, KeyError) else str(exc)


def _offending_key(exc: Exception, block: Mapping, candidates) -> str | None:
    if isinstance(exc, KeyError):
        return None
    msg = str(exc)
    for key in candidates:
        if re.search(rf"\b{re.escape(key)}\b", msg) and key in block:
            return key
    return None


def load_config(path) -> RunConfig:
    path = Path(path)
    text = path.read_text()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}", str(path)) from exc
    return parse_config(data, text, str(path))


def preset_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("heavylin.presets").iterdir()
                  if p.name.endswith(".toml"))


def load_preset(name: str) -> RunConfig:
    res = resources.files("heavylin.presets") / f"{name}.toml"
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    text = res.read_text()
    return parse_config(tomllib.loads(text), text, f"preset:{name}")
