"""Atomic control actions and their effect on a zone state."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

from radiozone.geo import GridPos, ZoneBoundary

if TYPE_CHECKING:
    from radiozone.core import RdzState


class ActionKind(str, enum.Enum):
    IDLE = "idle"
    DISABLE = "disable"
    ENABLE = "enable"
    ROUND_ROBIN_FREQ = "round_robin_freq"
    SET_WAYPOINT = "set_waypoint"
    UPDATE_ZONE = "update_zone"


# discrete action numbering shared with learned policies
ACTION_CODES = {
    ActionKind.IDLE: 0,
    ActionKind.DISABLE: 1,
    ActionKind.ENABLE: 2,
    ActionKind.ROUND_ROBIN_FREQ: 3,
}


@dataclass(frozen=True)
class AtomicAction:
    kind: ActionKind
    tx_id: str | None = None
    waypoint: GridPos | None = None
    zone: ZoneBoundary | None = None
    # why the manager disabled a transmitter; None for uninformed disables
    reason: str | None = None

    @classmethod
    def idle(cls) -> "AtomicAction":
        return cls(ActionKind.IDLE)

    @classmethod
    def disable(cls, tx_id: str, reason: str | None = None) -> "AtomicAction":
        return cls(ActionKind.DISABLE, tx_id, reason=reason)

    @classmethod
    def enable(cls, tx_id: str) -> "AtomicAction":
        return cls(ActionKind.ENABLE, tx_id)

    @classmethod
    def round_robin(cls, tx_id: str) -> "AtomicAction":
        return cls(ActionKind.ROUND_ROBIN_FREQ, tx_id)

    @classmethod
    def set_waypoint(cls, tx_id: str, pos: GridPos) -> "AtomicAction":
        return cls(ActionKind.SET_WAYPOINT, tx_id, waypoint=pos)

    @classmethod
    def update_zone(cls, zone: ZoneBoundary) -> "AtomicAction":
        return cls(ActionKind.UPDATE_ZONE, zone=zone)

    @classmethod
    def from_code(cls, code: int, tx_id: str) -> "AtomicAction":
        kind = {v: k for k, v in ACTION_CODES.items()}[code]
        return cls(kind, None if kind is ActionKind.IDLE else tx_id)

    @property
    def code(self) -> int | None:
        return ACTION_CODES.get(self.kind)

    def label(self) -> str:
        k = self.kind.value
        if self.kind is ActionKind.IDLE:
            return k
        if self.kind is ActionKind.UPDATE_ZONE:
            return f"{k}({len(self.zone.polygon)} vertices)"
        if self.kind is ActionKind.SET_WAYPOINT:
            return f"{k}({self.tx_id}->{self.waypoint.x:.1f},{self.waypoint.y:.1f})"
        if self.reason:
            return f"{k}({self.tx_id},{self.reason})"
        return f"{k}({self.tx_id})"

    def __str__(self):
        return self.label()


def apply_action(state: "RdzState", action: AtomicAction) -> "RdzState":
    """Apply ``action`` to ``state`` in place and return it.

    Raises KeyError for an unknown transmitter and ValueError for a zone that
    does not fit the grid.
    """
    kind = action.kind
    if kind is ActionKind.IDLE:
        return state
    if kind is ActionKind.UPDATE_ZONE:
        action.zone.validate(state.grid)
        state.zone = action.zone
        state.pending_zone = None
        return state

    idx = state.index_of(action.tx_id)
    tx = state.fleet[idx]
    if kind is ActionKind.DISABLE:
        tx = replace(tx, enabled=False, suspended=tx.suspended or action.reason is not None)
    elif kind is ActionKind.ENABLE:
        tx = replace(tx, enabled=True, suspended=False)
    elif kind is ActionKind.ROUND_ROBIN_FREQ:
        channels = state.config.channel_set
        nxt = (channels.index(tx.frequency) + 1) % len(channels) if tx.frequency in channels else 0
        tx = replace(tx, frequency=channels[nxt])
    elif kind is ActionKind.SET_WAYPOINT:
        if not state.grid.in_bounds(action.waypoint):
            raise ValueError(f"waypoint {action.waypoint} outside the grid")
        tx = replace(tx, waypoint=action.waypoint)
    state.fleet[idx] = tx
    return state
