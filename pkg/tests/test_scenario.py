from __future__ import annotations

from collections import Counter

import pytest

from radiozone.core import Role
from radiozone.geo import contains
from radiozone.scenario import BUNDLED, Scenario

MINIMAL = """
[scenario]
name = "tiny"
steps_per_trial = {steps}
trials = 1

[grid]
width = 30
height = 30

[zone]
rect = [5, 5, 25, 25]

[[fleet]]
id = "m"
role = "mobile_test"
x = "random"
y = "random"
height = 30
{endpoint}
"""

ENDPOINT = """
[[fleet]]
id = "e"
role = "endpoint"
x = 10
y = 10
height = 1.8
"""


def write(tmp_path, steps=3, endpoint=True):
    path = tmp_path / "tiny.scenario"
    path.write_text(MINIMAL.format(steps=steps, endpoint=ENDPOINT if endpoint else ""))
    return path


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_scenarios_load(name):
    sc = Scenario.bundled(name)
    assert sc.name == name and sc.steps_per_trial == 50 and sc.trials == 5
    assert (sc.grid.width, sc.grid.height) == (400, 400)
    assert len(sc.mobile_ids) == 1
    assert {"htn", "htn-0.1", "htn-0.2", "htn-0.3", "random", "naive"} <= set(sc.policies)


def test_leakage_scenario_shape():
    state = Scenario.bundled("leakage").initial_state(0)
    stationary = [t for t in state.fleet if t.role is Role.STATIONARY_TEST]
    mobile = state.mobiles()[0]
    assert len(stationary) == 9
    assert {t.frequency for t in stationary} == {mobile.frequency}
    assert contains(state.zone, mobile.pos)


def test_interference_scenario_shape():
    state = Scenario.bundled("interference").initial_state(0)
    stationary = [t for t in state.fleet if t.role is Role.STATIONARY_TEST]
    assert len(stationary) == 18
    assert Counter(t.frequency for t in stationary) == {3600.0: 9, 3610.0: 9}
    assert len(state.endpoints()) == 10


def test_random_placement_depends_on_trial_only():
    sc = Scenario.bundled("leakage")
    a, b = sc.initial_state(0), sc.initial_state(0)
    assert a.mobiles()[0].pos == b.mobiles()[0].pos
    assert sc.initial_state(1).mobiles()[0].pos != a.mobiles()[0].pos


def test_minimal_file(tmp_path):
    sc = Scenario.from_file(write(tmp_path))
    assert sc.name == "tiny" and sc.digest
    assert Scenario.from_file(write(tmp_path)).digest == sc.digest


def test_zero_steps_rejected(tmp_path):
    with pytest.raises(ValueError):
        Scenario.from_file(write(tmp_path, steps=0))


def test_mobile_without_endpoint_rejected(tmp_path):
    with pytest.raises(ValueError, match="endpoint"):
        Scenario.from_file(write(tmp_path, endpoint=False))


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        Scenario.from_file("no-such.scenario")
