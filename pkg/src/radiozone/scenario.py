"""Scenario files: TOML documents describing a zone, its fleet and an experiment.

Sections::

    [scenario]    name, steps_per_trial, trials, move_distance, seed,
                  measure_before_act, policies
    [grid]        width, height, cell_size, elevation_csv, buildings
    [zone]        rect = [x0, y0, x1, y1]  or  polygon = [[x, y], ...]
    [config]      leakage_threshold, interference_threshold, channels,
                  noise_floor, endpoints_as_victims, probe_height, probe_gain
    [propagation] kind, path_loss_exponent, reference_distance,
                  obstruction_penalty, obstruction_cap
    [reward]      clip_bound, normalize_signs
    [[fleet]]     id, role, x, y, height, tx_power, gain, frequency, enabled
                  (x = y = "random" places a transmitter uniformly in the zone
                  at the start of every trial)
    [[incumbent_requests]]  step, rect | polygon
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from radiozone.core import RdzConfig, RdzState, Role, Transmitter
from radiozone.geo import Grid, GridPos, ZoneBoundary, contains
from radiozone.propagation import PropagationModel

BUNDLED = ("leakage", "interference")


def _zone(d: dict) -> ZoneBoundary:
    if "rect" in d:
        return ZoneBoundary.rect(*d["rect"])
    return ZoneBoundary(tuple(tuple(p) for p in d["polygon"]))


@dataclass
class Scenario:
    name: str
    grid: Grid
    zone: ZoneBoundary
    config: RdzConfig
    fleet: list[dict]
    steps_per_trial: int = 50
    trials: int = 5
    move_distance: float = 5.0
    seed: int = 0
    measure_before_act: bool = False
    policies: list[str] = field(default_factory=lambda: ["htn", "naive"])
    incumbent_requests: dict[int, ZoneBoundary] = field(default_factory=dict)
    clip_bound: float = 10.0
    normalize_reward_signs: bool = False
    digest: str = ""

    def __post_init__(self):
        if self.steps_per_trial <= 0:
            raise ValueError("steps_per_trial must be positive")
        if self.trials <= 0:
            raise ValueError("trials must be positive")
        roles = [Role(t["role"]) for t in self.fleet]
        if Role.MOBILE_TEST in roles and Role.ENDPOINT not in roles:
            raise ValueError("a fleet with a mobile needs at least one endpoint for SINR")
        self.initial_state(0)

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> "Scenario":
        sc = doc.get("scenario", {})
        g = doc.get("grid", {})
        cell_size = float(g.get("cell_size", 10.0))
        if "elevation_csv" in g:
            path = Path(g["elevation_csv"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            grid = Grid.from_csv(path, cell_size)
        else:
            grid = Grid(int(g.get("width", 400)), int(g.get("height", 400)), cell_size)
        if g.get("buildings"):
            grid = grid.with_buildings(g["buildings"])

        cfg = dict(doc.get("config", {}))
        if "channels" in cfg:
            cfg["channel_set"] = tuple(cfg.pop("channels"))
        cfg["model"] = PropagationModel(**doc.get("propagation", {}))
        reward = doc.get("reward", {})
        digest = hashlib.sha1(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:12]
        return cls(
            name=sc.get("name", "scenario"),
            grid=grid,
            zone=_zone(doc["zone"]),
            config=RdzConfig(**cfg),
            fleet=list(doc.get("fleet", [])),
            steps_per_trial=int(sc.get("steps_per_trial", 50)),
            trials=int(sc.get("trials", 5)),
            move_distance=float(sc.get("move_distance", 5.0)),
            seed=int(sc.get("seed", 0)),
            measure_before_act=bool(sc.get("measure_before_act", False)),
            policies=list(sc.get("policies", ["htn", "naive"])),
            incumbent_requests={int(r["step"]): _zone(r) for r in doc.get("incumbent_requests", [])},
            clip_bound=float(reward.get("clip_bound", 10.0)),
            normalize_reward_signs=bool(reward.get("normalize_signs", False)),
            digest=digest,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "Scenario":
        path = Path(path)
        if not path.exists() and str(path) in BUNDLED:
            return cls.bundled(str(path))
        with open(path, "rb") as fh:
            return cls.from_dict(tomllib.load(fh), path.parent)

    @classmethod
    def bundled(cls, name: str) -> "Scenario":
        ref = resources.files("radiozone") / "scenarios" / f"{name}.scenario"
        with resources.as_file(ref) as path:
            return cls.from_file(path)

    def with_overrides(self, **changes) -> "Scenario":
        return replace(self, **changes)

    @property
    def mobile_ids(self) -> list[str]:
        return [str(t["id"]) for t in self.fleet if Role(t["role"]) is Role.MOBILE_TEST]

    def _random_point(self, rng: np.random.Generator) -> GridPos:
        xs = [p[0] for p in self.zone.polygon]
        ys = [p[1] for p in self.zone.polygon]
        for _ in range(10_000):
            pos = GridPos(float(rng.uniform(min(xs), max(xs))), float(rng.uniform(min(ys), max(ys))))
            if contains(self.zone, pos):
                return pos
        return self.zone.centroid()

    def initial_state(self, trial: int, seed: int | None = None) -> RdzState:
        """Fresh state for one trial; random placements depend only on (seed, trial)."""
        seed = self.seed if seed is None else seed
        rng = np.random.default_rng([seed, trial, 2])
        fleet = []
        for entry in self.fleet:
            d = dict(entry)
            if d.get("x") == "random" or d.get("y") == "random":
                pos = self._random_point(rng)
                d["x"], d["y"] = pos.x, pos.y
            d.setdefault("frequency", self.config.channel_set[0])
            fleet.append(Transmitter.from_dict(d))
        return RdzState(self.grid, self.zone, self.config, fleet)
