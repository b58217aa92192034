"""Experiment configuration: flat ``section.key = value`` text files.

The format is deliberately minimal so configs diff cleanly as experiment
provenance: one assignment per line, ``#`` comments, shapes written as
``30`` or ``40x40``, phase lists as comma-separated ``updates:step:sigma``
triples.

Example::

    # 1-D dominance stripes
    topology.grid = 30
    topology.retinae = 2
    topology.rf = 9
    topology.inhibition = 5
    topology.leakage = 5
    schedule.phases = 2000:0.01:1.0, 2000:0.01:0.5
    data.mode = synthetic
    run.seed = 1
    run.outdir = out/stripes1d
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .data import SyntheticRetinaSource, TexturePatchSource, generate_texture
from .errors import ConfigError, DataError
from .imageio import load_pgm
from .topology import Topology, build_topology
from .trainer import Phase, Schedule

DATA_MODES = ("synthetic", "texture", "procedural")


@dataclass
class ExperimentConfig:
    grid: tuple[int, ...]
    rf: tuple[int, ...]
    inhibition: tuple[int, ...]
    leakage: tuple[int, ...]
    phases: list[Phase]
    mode: str
    outdir: str
    retina: tuple[int, ...] | None = None
    retinae: int = 1
    sigma: tuple[float, ...] = (1.0,)
    wrap: bool = False
    texture_path: str | None = None
    texture_seed: int = 0
    texture_size: tuple[int, ...] = (256, 256)
    corr_length: float = 7.0
    correlated: bool = False
    weight_scale: float = 0.1
    reference_scale: float = 0.01
    seed: int = 0
    log_interval: int = 100

    def to_topology(self) -> Topology:
        sigma = self.sigma if len(self.sigma) > 1 else self.sigma[0]
        return build_topology(
            grid_shape=self.grid,
            retina_shape=self.retina,
            num_retinae=self.retinae,
            rf_shape=self.rf,
            inhibition_shape=self.inhibition,
            leakage_shape=self.leakage,
            leakage_sigma=sigma,
            wrap=self.wrap,
        )

    def to_schedule(self) -> Schedule:
        return Schedule(phases=list(self.phases))

    def make_source(self, topo: Topology, rng: np.random.Generator):
        if self.mode == "synthetic":
            return SyntheticRetinaSource.from_topology(topo, rng)
        if self.mode == "texture":
            if not self.texture_path:
                raise ConfigError("data.mode = texture requires data.texture = <path>")
            if not os.path.exists(self.texture_path):
                raise DataError(f"texture image not found: {self.texture_path}")
            image = load_pgm(self.texture_path)
            return TexturePatchSource.from_topology(topo, image, rng, self.correlated)
        image = generate_texture(self.texture_seed, self.texture_size, self.corr_length)
        return TexturePatchSource.from_topology(topo, image, rng, self.correlated)


def _parse_shape(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad shape value {text!r} (want e.g. 30 or 40x40)") from None


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad value {text!r} (want e.g. 1.0 or 0.5x0.5)") from None


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"bad boolean value {text!r}")


def _parse_phases(text: str) -> list[Phase]:
    phases = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 3:
            raise ConfigError(
                f"bad phase {part!r} (want updates:step:sigma)"
            )
        sigma = _parse_floats(bits[2])
        try:
            phases.append(Phase(
                num_updates=int(bits[0]),
                step_size=float(bits[1]),
                leakage_sigma=sigma if len(sigma) > 1 else sigma[0],
            ))
        except ValueError as exc:
            raise ConfigError(f"bad phase {part!r}: {exc}") from None
    if not phases:
        raise ConfigError("schedule.phases is empty")
    return phases


def _fmt_shape(shape) -> str:
    return "x".join(str(v) for v in shape)


def _fmt_sigma(sigma) -> str:
    if isinstance(sigma, (tuple, list)):
        return "x".join(f"{v:g}" for v in sigma)
    return f"{sigma:g}"


_KEYS = {
    "topology.grid", "topology.retina", "topology.retinae", "topology.rf",
    "topology.inhibition", "topology.leakage", "topology.sigma", "topology.wrap",
    "schedule.phases",
    "data.mode", "data.texture", "data.seed", "data.size", "data.corr_length",
    "data.correlated",
    "init.weight_scale", "init.reference_scale",
    "run.seed", "run.outdir", "run.log_interval",
}


def parse_config(text: str) -> ExperimentConfig:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value

    for required in ("topology.grid", "topology.rf", "topology.inhibition",
                     "topology.leakage", "schedule.phases", "data.mode", "run.outdir"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")

    mode = values["data.mode"].strip().lower()
    if mode not in DATA_MODES:
        raise ConfigError(f"data.mode must be one of {DATA_MODES}, got {mode!r}")

    def get(key, parse, default):
        return parse(values[key]) if key in values else default

    return ExperimentConfig(
        grid=_parse_shape(values["topology.grid"]),
        retina=get("topology.retina", _parse_shape, None),
        retinae=get("topology.retinae", int, 1),
        rf=_parse_shape(values["topology.rf"]),
        inhibition=_parse_shape(values["topology.inhibition"]),
        leakage=_parse_shape(values["topology.leakage"]),
        sigma=get("topology.sigma", _parse_floats, (1.0,)),
        wrap=get("topology.wrap", _parse_bool, False),
        phases=_parse_phases(values["schedule.phases"]),
        mode=mode,
        texture_path=values.get("data.texture"),
        texture_seed=get("data.seed", int, 0),
        texture_size=get("data.size", _parse_shape, (256, 256)),
        corr_length=get("data.corr_length", float, 7.0),
        correlated=get("data.correlated", _parse_bool, False),
        weight_scale=get("init.weight_scale", float, 0.1),
        reference_scale=get("init.reference_scale", float, 0.01),
        seed=get("run.seed", int, 0),
        outdir=values["run.outdir"],
        log_interval=get("run.log_interval", int, 100),
    )


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = [
        f"topology.grid = {_fmt_shape(cfg.grid)}",
    ]
    if cfg.retina is not None:
        lines.append(f"topology.retina = {_fmt_shape(cfg.retina)}")
    lines += [
        f"topology.retinae = {cfg.retinae}",
        f"topology.rf = {_fmt_shape(cfg.rf)}",
        f"topology.inhibition = {_fmt_shape(cfg.inhibition)}",
        f"topology.leakage = {_fmt_shape(cfg.leakage)}",
        f"topology.sigma = {_fmt_sigma(cfg.sigma)}",
        f"topology.wrap = {str(cfg.wrap).lower()}",
        "schedule.phases = " + ", ".join(
            f"{p.num_updates}:{p.step_size:g}:{_fmt_sigma(p.leakage_sigma)}"
            for p in cfg.phases
        ),
        f"data.mode = {cfg.mode}",
    ]
    if cfg.texture_path is not None:
        lines.append(f"data.texture = {cfg.texture_path}")
    lines += [
        f"data.seed = {cfg.texture_seed}",
        f"data.size = {_fmt_shape(cfg.texture_size)}",
        f"data.corr_length = {cfg.corr_length:g}",
        f"data.correlated = {str(cfg.correlated).lower()}",
        f"init.weight_scale = {cfg.weight_scale:g}",
        f"init.reference_scale = {cfg.reference_scale:g}",
        f"run.seed = {cfg.seed}",
        f"run.outdir = {cfg.outdir}",
        f"run.log_interval = {cfg.log_interval}",
    ]
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
