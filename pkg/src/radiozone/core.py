"""Zone world state, violation detection and digital-twin cloning."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from radiozone.actions import AtomicAction, apply_action
from radiozone.geo import Grid, GridPos, ZoneBoundary, contains, zone_mask
from radiozone.propagation import (MapCache, PropagationModel, default_cache, dbm_to_mw,
                                   mw_to_dbm, received_power, single_source_map)


class Role(str, enum.Enum):
    ENDPOINT = "endpoint"
    STATIONARY_TEST = "stationary_test"
    MOBILE_TEST = "mobile_test"


@dataclass(frozen=True)
class Transmitter:
    id: str
    role: Role
    pos: GridPos
    height: float
    tx_power: float = 30.0  # dBm
    gain: float = 0.0  # dBi
    frequency: float = 3600.0  # MHz
    enabled: bool = True
    waypoint: GridPos | None = None
    # set when the manager disabled it for a violation; cleared on enable
    suspended: bool = False

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))
        if self.height <= 0:
            raise ValueError(f"{self.id}: height must be positive")

    @property
    def is_test(self) -> bool:
        return self.role is not Role.ENDPOINT

    def to_dict(self) -> dict:
        d = {
            "id": self.id, "role": self.role.value, "x": float(self.pos.x), "y": float(self.pos.y),
            "height": self.height, "tx_power": self.tx_power, "gain": self.gain,
            "frequency": self.frequency, "enabled": self.enabled, "suspended": self.suspended,
        }
        if self.waypoint is not None:
            d["waypoint"] = [float(self.waypoint.x), float(self.waypoint.y)]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Transmitter":
        wp = d.get("waypoint")
        return cls(
            id=str(d["id"]), role=Role(d["role"]), pos=GridPos(float(d["x"]), float(d["y"])),
            height=float(d["height"]), tx_power=float(d.get("tx_power", 30.0)),
            gain=float(d.get("gain", 0.0)), frequency=float(d.get("frequency", 3600.0)),
            enabled=bool(d.get("enabled", True)), suspended=bool(d.get("suspended", False)),
            waypoint=GridPos(*map(float, wp)) if wp is not None else None,
        )


@dataclass(frozen=True)
class RdzConfig:
    leakage_threshold: float = -95.0  # dBm
    interference_threshold: float = -70.0  # dBm
    channel_set: tuple[float, ...] = (3600.0, 3610.0, 3620.0)
    noise_floor: float = -100.0  # dBm
    endpoints_as_victims: bool = True
    probe_height: float = 1.5  # m, receiver height of leakage maps
    probe_gain: float = 0.0  # dBi
    model: PropagationModel = field(default_factory=PropagationModel)

    def __post_init__(self):
        object.__setattr__(self, "channel_set", tuple(float(c) for c in self.channel_set))
        if not self.channel_set:
            raise ValueError("channel_set must not be empty")


@dataclass(frozen=True)
class Violation:
    kind: str  # "leakage" | "interference"
    offender_id: str
    magnitude: float  # dB above threshold

    def __post_init__(self):
        if not self.magnitude > 0:
            raise ValueError("violation magnitude must be positive")


@dataclass(eq=False)
class RdzState:
    grid: Grid
    zone: ZoneBoundary
    config: RdzConfig
    fleet: list[Transmitter]
    step: int = 0
    # incumbent request waiting to be handled by the manager
    pending_zone: ZoneBoundary | None = None
    provenance: str = "live"

    def __post_init__(self):
        self.fleet = list(self.fleet)
        self.validate()

    def validate(self) -> None:
        ids = [t.id for t in self.fleet]
        if len(set(ids)) != len(ids):
            raise ValueError("transmitter ids must be unique")
        self.zone.validate(self.grid)
        for t in self.fleet:
            if t.frequency not in self.config.channel_set:
                raise ValueError(f"{t.id}: frequency {t.frequency} not in channel set")
            if not self.grid.in_bounds(t.pos):
                raise ValueError(f"{t.id}: position {t.pos} outside the grid")

    def clone(self, provenance: str | None = None) -> "RdzState":
        # grid, zone, config and transmitters are immutable values
        return RdzState(self.grid, self.zone, self.config, list(self.fleet), self.step,
                        self.pending_zone, provenance or self.provenance)

    def index_of(self, tx_id: str) -> int:
        for i, t in enumerate(self.fleet):
            if t.id == tx_id:
                return i
        raise KeyError(f"unknown transmitter {tx_id!r}")

    def get(self, tx_id: str) -> Transmitter:
        return self.fleet[self.index_of(tx_id)]

    def mobiles(self) -> list[Transmitter]:
        return [t for t in self.fleet if t.role is Role.MOBILE_TEST]

    def test_transmitters(self) -> list[Transmitter]:
        return [t for t in self.fleet if t.is_test]

    def endpoints(self) -> list[Transmitter]:
        return [t for t in self.fleet if t.role is Role.ENDPOINT]

    def to_dict(self) -> dict:
        c = self.config
        m = c.model
        return {
            "step": self.step,
            "provenance": self.provenance,
            "grid": {"width": self.grid.width, "height": self.grid.height,
                     "cell_size": self.grid.cell_size, "fingerprint": self.grid.fingerprint},
            "zone": self.zone.to_list(),
            "pending_zone": self.pending_zone.to_list() if self.pending_zone else None,
            "config": {
                "leakage_threshold": c.leakage_threshold,
                "interference_threshold": c.interference_threshold,
                "channel_set": list(c.channel_set), "noise_floor": c.noise_floor,
                "endpoints_as_victims": c.endpoints_as_victims,
                "probe_height": c.probe_height, "probe_gain": c.probe_gain,
                "model": {"kind": m.kind.value, "path_loss_exponent": m.path_loss_exponent,
                          "reference_distance": m.reference_distance,
                          "obstruction_penalty": m.obstruction_penalty,
                          "obstruction_cap": m.obstruction_cap},
            },
            "fleet": [t.to_dict() for t in self.fleet],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict, grid: Grid) -> "RdzState":
        if d["grid"]["fingerprint"] != grid.fingerprint:
            raise ValueError("snapshot was taken on a different grid")
        cfg = dict(d["config"])
        cfg["model"] = PropagationModel(**cfg["model"])
        pending = d.get("pending_zone")
        return cls(
            grid=grid, zone=ZoneBoundary(tuple(map(tuple, d["zone"]))), config=RdzConfig(**cfg),
            fleet=[Transmitter.from_dict(t) for t in d["fleet"]], step=int(d["step"]),
            pending_zone=ZoneBoundary(tuple(map(tuple, pending))) if pending else None,
            provenance=d.get("provenance", "live"),
        )


def transmitter_field(state: RdzState, tx: Transmitter, cache: MapCache | None = default_cache):
    c = state.config
    return single_source_map(tx, c.probe_height, c.probe_gain, c.model, state.grid, cache)


def leakage_level(state: RdzState, tx_id: str, cache: MapCache | None = default_cache) -> float:
    """Strongest out-of-zone reading of one transmitter's field, as if enabled (dBm)."""
    tx = state.get(tx_id)
    if not tx.is_test:
        raise ValueError(f"{tx_id} is an endpoint; endpoints are not leakage offenders")
    outside = ~zone_mask(state.zone, state.grid)
    rfmap = transmitter_field(state, tx, cache)
    return mw_to_dbm(rfmap.peak_where((state.zone, state.grid.fingerprint), outside))


def detect_leakage(state: RdzState, tx_id: str,
                   cache: MapCache | None = default_cache) -> Violation | None:
    if math.isinf(state.config.leakage_threshold) and state.config.leakage_threshold > 0:
        state.get(tx_id)
        return None
    level = leakage_level(state, tx_id, cache)
    excess = level - state.config.leakage_threshold
    return Violation("leakage", tx_id, excess) if excess > 0 else None


def interference_victims(state: RdzState, mobile: Transmitter) -> list[Transmitter]:
    out = []
    for t in state.fleet:
        if t.id == mobile.id or t.role is Role.MOBILE_TEST or not t.enabled:
            continue
        if t.frequency != mobile.frequency:
            continue
        if t.role is Role.ENDPOINT and not state.config.endpoints_as_victims:
            continue
        if contains(state.zone, t.pos):
            out.append(t)
    return out


def interference_level(state: RdzState, mobile_id: str) -> float:
    """Aggregate power of the mobile (as if enabled) at in-zone co-channel receivers, dBm."""
    mobile = state.get(mobile_id)
    if mobile.role is not Role.MOBILE_TEST:
        raise ValueError(f"{mobile_id} is not a mobile transmitter")
    total = 0.0
    for rx in interference_victims(state, mobile):
        total += float(dbm_to_mw(received_power(mobile, rx.pos, rx.height, rx.gain,
                                                state.config.model, state.grid)))
    return mw_to_dbm(total)


def detect_interference(state: RdzState, mobile_id: str) -> Violation | None:
    excess = interference_level(state, mobile_id) - state.config.interference_threshold
    return Violation("interference", mobile_id, excess) if excess > 0 else None


def sense(state: RdzState) -> list[Violation]:
    """Violations of currently enabled test transmitters."""
    found = []
    for t in state.test_transmitters():
        if not t.enabled:
            continue
        v = detect_leakage(state, t.id)
        if v:
            found.append(v)
        if t.role is Role.MOBILE_TEST:
            v = detect_interference(state, t.id)
            if v:
                found.append(v)
    return found


def twin_apply(state: RdzState, action: AtomicAction) -> RdzState:
    """Apply ``action`` to a fresh twin of ``state``; ``state`` is left untouched."""
    return apply_action(state.clone(provenance="twin"), action)


def advance_mobility(state: RdzState, rng: np.random.Generator,
                     move_distance: float = 5.0) -> RdzState:
    """Move every mobile ``move_distance`` cells and bump the step counter.

    One angle is drawn per mobile per step even when it follows a waypoint,
    so the random stream stays aligned across policies.
    """
    nxt = state.clone()
    grid = state.grid
    for i, t in enumerate(nxt.fleet):
        if t.role is not Role.MOBILE_TEST:
            continue
        theta = rng.uniform(0.0, 2.0 * math.pi)
        waypoint = t.waypoint
        if waypoint is not None:
            dx, dy = waypoint.x - t.pos.x, waypoint.y - t.pos.y
            dist = math.hypot(dx, dy)
            if dist <= move_distance:
                pos, waypoint = waypoint, None
            else:
                pos = GridPos(t.pos.x + move_distance * dx / dist, t.pos.y + move_distance * dy / dist)
        else:
            pos = GridPos(t.pos.x + move_distance * math.cos(theta),
                          t.pos.y + move_distance * math.sin(theta))
        nxt.fleet[i] = replace(t, pos=pos.clamped(grid), waypoint=waypoint)
    nxt.step += 1
    return nxt
