"""Radio Dynamic Zone simulator with a digital-twin RF model and an HTN zone manager."""

from radiozone.actions import ActionKind, AtomicAction, apply_action
from radiozone.core import RdzConfig, RdzState, Role, Transmitter, Violation
from radiozone.geo import Grid, GridPos, ZoneBoundary
from radiozone.harness import run_experiment, run_trial
from radiozone.policies import Policy
from radiozone.propagation import ModelKind, PropagationModel, compute_map, single_source_map
from radiozone.scenario import Scenario

__all__ = [
    "ActionKind", "AtomicAction", "Grid", "GridPos", "ModelKind", "Policy", "PropagationModel",
    "RdzConfig", "RdzState", "Role", "Scenario", "Transmitter", "Violation", "ZoneBoundary",
    "apply_action", "compute_map", "run_experiment", "run_trial", "single_source_map",
]
