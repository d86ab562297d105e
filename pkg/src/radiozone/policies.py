"""Per-step policy executors sharing one decide-and-act interface."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from radiozone.actions import ActionKind, AtomicAction, apply_action
from radiozone.core import RdzState
from radiozone.domain import plan_actions, plan_maintenance
from radiozone.htn import Plan, PlanningError

log = logging.getLogger(__name__)


class PolicyKind(str, enum.Enum):
    HTN = "htn"
    STOCHASTIC_HTN = "stochastic_htn"
    RANDOM = "random"
    NAIVE = "naive"


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")

    @classmethod
    def parse(cls, text: str) -> "Policy":
        """``htn``, ``htn-0.1`` (stochastic), ``random`` or ``naive``."""
        text = text.strip().lower()
        if text.startswith("htn-"):
            return cls(PolicyKind.STOCHASTIC_HTN, float(text[4:]))
        if text in ("htn", "random", "naive"):
            return cls(PolicyKind(text))
        raise ValueError(f"unknown policy {text!r}")

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.STOCHASTIC_HTN:
            return f"htn-{self.epsilon:g}"
        return self.kind.value


@dataclass
class StepDecision:
    planned: list[AtomicAction] = field(default_factory=list)
    executed: list[AtomicAction] = field(default_factory=list)
    skipped: list[AtomicAction] = field(default_factory=list)
    plan: Plan | None = None
    error: str | None = None


# actions the random baseline picks from, by discrete code
RANDOM_CODES = (0, 1, 2, 3)

discrepancies = 0


def _execute(state: RdzState, action: AtomicAction) -> RdzState:
    global discrepancies
    try:
        return apply_action(state, action)
    except (KeyError, ValueError) as exc:
        discrepancies += 1
        log.warning("planned action %s no longer applies: %s", action, exc)
        return state


def decide_and_act(policy: Policy, state: RdzState,
                   rng: np.random.Generator) -> tuple[RdzState, StepDecision]:
    """Choose this step's actions and apply them to a copy of ``state``."""
    state = state.clone(provenance="live")
    decision = StepDecision()
    kind = policy.kind

    if kind is PolicyKind.NAIVE:
        return state, decision

    if kind is PolicyKind.RANDOM:
        mobiles = state.mobiles()
        code = RANDOM_CODES[int(rng.integers(len(RANDOM_CODES)))]
        if not mobiles:
            action = AtomicAction.idle()
        else:
            action = AtomicAction.from_code(code, mobiles[0].id)
        decision.planned = decision.executed = [action]
        return _execute(state, action), decision

    try:
        plan = plan_maintenance(state)
    except PlanningError as exc:
        log.error("planning failed at step %d: %s", state.step, exc)
        decision.error = str(exc)
        return state, decision
    decision.plan = plan
    decision.planned = plan_actions(plan)
    for action in decision.planned:
        # one independent draw per action; skipped actions become no-ops
        if kind is PolicyKind.STOCHASTIC_HTN and rng.random() >= 1.0 - policy.epsilon:
            decision.skipped.append(action)
            continue
        if action.kind is not ActionKind.IDLE:
            state = _execute(state, action)
        decision.executed.append(action)
    return state, decision
