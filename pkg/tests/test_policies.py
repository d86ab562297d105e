from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from radiozone.actions import ActionKind
from radiozone.domain import plan_actions, plan_maintenance
from radiozone.policies import Policy, PolicyKind, decide_and_act

from conftest import random_state


def test_parse_labels():
    assert Policy.parse("htn") == Policy(PolicyKind.HTN)
    assert Policy.parse("HTN-0.2") == Policy(PolicyKind.STOCHASTIC_HTN, 0.2)
    assert Policy.parse("htn-0.1").label == "htn-0.1"
    assert Policy.parse("naive").label == "naive"
    for bad in ("greedy", "htn-1.5", "htn-x"):
        with pytest.raises(ValueError):
            Policy.parse(bad)


def test_naive_does_nothing():
    state = random_state(1)
    out, decision = decide_and_act(Policy(PolicyKind.NAIVE), state, np.random.default_rng(0))
    assert decision.executed == [] and out.to_json() == state.to_json()
    assert out is not state


@pytest.mark.parametrize("seed", range(25))
def test_zero_epsilon_matches_deterministic(seed):
    state = random_state(seed)
    det, d1 = decide_and_act(Policy(PolicyKind.HTN), state, np.random.default_rng(seed))
    sto, d2 = decide_and_act(Policy(PolicyKind.STOCHASTIC_HTN, 0.0), state,
                             np.random.default_rng(seed + 1))
    assert d1.executed == d2.executed and d2.skipped == []
    assert det.to_json() == sto.to_json()


def test_htn_executes_its_plan():
    state = random_state(3)
    _, decision = decide_and_act(Policy(PolicyKind.HTN), state, np.random.default_rng(0))
    assert decision.executed == plan_actions(plan_maintenance(state))


def test_random_codes_are_uniform():
    state = random_state(2)
    rng = np.random.default_rng(99)
    counts = Counter()
    for _ in range(10_000):
        _, decision = decide_and_act(Policy(PolicyKind.RANDOM), state, rng)
        (action,) = decision.executed
        assert action.kind is ActionKind.IDLE or action.tx_id == "m"
        counts[action.code] += 1
    assert set(counts) == {0, 1, 2, 3}
    for code in range(4):
        assert counts[code] / 10_000 == pytest.approx(0.25, abs=0.02)


def test_stochastic_skips_each_action_independently():
    # a state whose plan has several actions
    state = random_state(7, n_stationary=8)
    planned = plan_actions(plan_maintenance(state))
    assert len(planned) >= 2
    rng = np.random.default_rng(0)
    skipped = executed = 0
    for _ in range(200):
        _, d = decide_and_act(Policy(PolicyKind.STOCHASTIC_HTN, 0.3), state, rng)
        assert sorted(map(str, d.executed + d.skipped)) == sorted(map(str, planned))
        skipped += len(d.skipped)
        executed += len(d.executed)
    assert skipped / (skipped + executed) == pytest.approx(0.3, abs=0.06)


def test_planning_error_is_reported_not_raised(monkeypatch):
    from radiozone import policies
    from radiozone.htn import PlanningFailure

    def boom(state):
        raise PlanningFailure("no plan")

    monkeypatch.setattr(policies, "plan_maintenance", boom)
    state = random_state(0)
    out, d = decide_and_act(Policy(PolicyKind.HTN), state, np.random.default_rng(0))
    assert d.error == "no plan" and d.executed == [] and out.to_json() == state.to_json()
