"""Zone-maintenance HTN domain.

``maintain_rdz`` splits into four subtasks: handle a pending incumbent
request, mitigate leakage, mitigate mobile interference, and restore
disabled transmitters. Every enable is gated on a digital-twin check: the
transmitter is only switched back on if its twin does not leak and does not
push a mobile over the interference threshold.
"""

from __future__ import annotations

from functools import lru_cache

from radiozone.actions import AtomicAction, apply_action
from radiozone.core import RdzState, detect_interference, detect_leakage, twin_apply
from radiozone.geo import contains
from radiozone.htn import Domain, Plan, Task, find_plan

ROOT_TASK = ("maintain_rdz",)


def to_atomic(task: Task) -> AtomicAction:
    name, args = task[0], task[1:]
    if name == "idle":
        return AtomicAction.idle()
    if name == "disable":
        return AtomicAction.disable(args[0], args[1] if len(args) > 1 else None)
    if name == "enable":
        return AtomicAction.enable(args[0])
    if name == "round_robin_freq":
        return AtomicAction.round_robin(args[0])
    if name == "set_waypoint":
        return AtomicAction.set_waypoint(args[0], args[1])
    if name == "update_zone":
        return AtomicAction.update_zone(args[0])
    raise ValueError(f"not an atomic action: {name!r}")


def _apply(name):
    def apply(state: RdzState, *args):
        return apply_action(state, to_atomic((name, *args)))
    apply.__name__ = name
    return apply


def _has(state: RdzState, tx_id, *_args) -> bool:
    try:
        state.index_of(tx_id)
    except KeyError:
        return False
    return True


def _is_test(state: RdzState, tx_id, *_args) -> bool:
    return _has(state, tx_id) and state.get(tx_id).is_test


# --- twin checks -----------------------------------------------------------

def _mobiles_clear(state: RdzState) -> bool:
    return all(detect_interference(state, m.id) is None for m in state.mobiles() if m.enabled)


def restorable(state: RdzState, tx_id: str) -> bool:
    """Whether enabling ``tx_id`` keeps its twin free of leakage and interference."""
    twin = twin_apply(state, AtomicAction.enable(tx_id))
    if detect_leakage(twin, tx_id) is not None:
        return False
    return _mobiles_clear(twin)


def retune_steps(state: RdzState, mobile_id: str) -> int | None:
    """Fewest round-robin hops that leave the mobile's twin compliant, if any."""
    twin = state
    for k in range(1, len(state.config.channel_set)):
        twin = twin_apply(twin, AtomicAction.round_robin(mobile_id))
        if detect_interference(twin, mobile_id) is None and detect_leakage(twin, mobile_id) is None:
            return k
    return None


def leaking(state: RdzState) -> list[str]:
    return [t.id for t in state.test_transmitters()
            if t.enabled and detect_leakage(state, t.id) is not None]


def interfering(state: RdzState) -> list[str]:
    return [m.id for m in state.mobiles() if m.enabled and detect_interference(state, m.id) is not None]


def needs_attention(state: RdzState) -> bool:
    if state.pending_zone is not None or leaking(state) or interfering(state):
        return True
    return any(restorable(state, t.id) for t in state.test_transmitters() if not t.enabled)


# --- methods ---------------------------------------------------------------

def quiescent(state: RdzState):
    return ["idle"]


def maintain(state: RdzState):
    tasks: list = []
    if state.pending_zone is not None:
        tasks.append(("handle_incumbent_request", state.pending_zone))
    tasks += ["mitigate_leakage", "mitigate_interference", "restore_transmitters"]
    return tasks


def relocate_zone(state: RdzState, zone):
    return [("update_zone", zone), "disable_noncompliant", "relocate_mobiles", "enable_compliant"]


def disable_noncompliant(state: RdzState):
    return [("disable", tx_id, "incumbent") for tx_id in leaking(state)]


def relocate_mobiles(state: RdzState):
    target = state.zone.centroid()
    return [("set_waypoint", m.id, target) for m in state.mobiles()
            if not contains(state.zone, m.pos)]


def disable_leakers(state: RdzState):
    return [("disable", tx_id, "leakage") for tx_id in leaking(state)]


def per_mobile(state: RdzState):
    return [("resolve_interference", m) for m in interfering(state)]


def retune(state: RdzState, mobile_id: str):
    k = retune_steps(state, mobile_id)
    return None if k is None else [("round_robin_freq", mobile_id)] * k


def disable_mobile(state: RdzState, mobile_id: str):
    return [("disable", mobile_id, "interference")]


def restore_each(state: RdzState):
    return [("try_restore", t.id) for t in state.test_transmitters() if not t.enabled]


def enable_if_compliant(state: RdzState, tx_id: str):
    return [("enable", tx_id)] if restorable(state, tx_id) else None


def keep_disabled(state: RdzState, tx_id: str):
    return []


@lru_cache(maxsize=1)
def build_domain() -> Domain:
    d = Domain("rdz", copy_state=lambda s: s.clone(provenance="twin"))
    d.declare_action("idle", _apply("idle"))
    d.declare_action("disable", _apply("disable"), _is_test)
    d.declare_action("enable", _apply("enable"), _is_test)
    d.declare_action("round_robin_freq", _apply("round_robin_freq"), _has)
    d.declare_action("set_waypoint", _apply("set_waypoint"),
                     lambda s, tx_id, pos: _has(s, tx_id) and s.grid.in_bounds(pos))
    d.declare_action("update_zone", _apply("update_zone"))

    d.declare_method("maintain_rdz", quiescent, lambda s: not needs_attention(s))
    d.declare_method("maintain_rdz", maintain)
    d.declare_method("handle_incumbent_request", relocate_zone)
    d.declare_method("disable_noncompliant", disable_noncompliant)
    d.declare_method("relocate_mobiles", relocate_mobiles)
    d.declare_method("enable_compliant", restore_each)
    d.declare_method("mitigate_leakage", disable_leakers)
    d.declare_method("mitigate_interference", per_mobile)
    d.declare_method("resolve_interference", retune)
    d.declare_method("resolve_interference", disable_mobile)
    d.declare_method("restore_transmitters", restore_each)
    d.declare_method("try_restore", enable_if_compliant)
    d.declare_method("try_restore", keep_disabled)
    return d


def plan_maintenance(state: RdzState, depth_limit: int = 1000) -> Plan:
    return find_plan(state, [ROOT_TASK], build_domain(), depth_limit)


def plan_actions(plan: Plan) -> list[AtomicAction]:
    return [to_atomic(t) for t in plan.actions]

