"""Per-step evaluation metrics, trial aggregation and the step reward."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from radiozone.core import (RdzState, detect_interference, detect_leakage,
                            interference_level)
from radiozone.geo import zone_area, zone_mask
from radiozone.propagation import (RfMap, compute_map, dbm_to_mw, mw_to_dbm, received_power)

NEG_INF = -math.inf


@dataclass
class StepMetrics:
    step: int
    leakage_points: int
    leaked_power: float  # dBm, -inf when nothing leaked
    interference: float  # dBm, -inf when the mobile is silent or unheard
    mobile_sinr: float | None  # dB, None when the mobile is disabled
    mobile_active: bool
    step_valid: bool
    reward: float = 0.0


@dataclass
class TrialSummary:
    total_leakage_points: int
    total_leaked_power: float
    total_interference: float
    sinr_samples: list[float] = field(default_factory=list)
    uptime: float = 1.0
    total_reward: float = 0.0

    @property
    def sinr_mean(self) -> float:
        return float(np.mean(self.sinr_samples)) if self.sinr_samples else math.nan

    @property
    def sinr_std(self) -> float:
        return float(np.std(self.sinr_samples, ddof=1)) if len(self.sinr_samples) > 1 else math.nan


@dataclass(frozen=True)
class RewardInputs:
    U: float  # mobile enabled this step (0/1)
    S: float | None  # mobile SINR, dB
    I: float  # induced interference, dBm
    I_T: float
    P: float  # leakage points
    A: float  # zone area, cells
    L: float  # leaked power, dBm
    L_T: float
    clip_bound: float = 10.0
    normalize_signs: bool = False


def leakage_from_map(rfmap: RfMap, inside: np.ndarray, threshold_dbm: float) -> tuple[int, float]:
    """Count out-of-zone cells above threshold and their summed power (dBm)."""
    power = rfmap.power[~inside]
    hot = power[power > dbm_to_mw(threshold_dbm)]
    if hot.size == 0:
        return 0, NEG_INF
    return int(hot.size), mw_to_dbm(hot.sum())


def leakage_metrics(state: RdzState) -> tuple[int, float]:
    c = state.config
    rfmap = compute_map(state.test_transmitters(), None, c.probe_height, c.probe_gain,
                        c.model, state.grid)
    return leakage_from_map(rfmap, zone_mask(state.zone, state.grid), c.leakage_threshold)


def sinr_db(signal_dbm: float, interferers_dbm, noise_dbm: float) -> float:
    denom = sum(float(dbm_to_mw(i)) for i in interferers_dbm) + float(dbm_to_mw(noise_dbm))
    return 10.0 * math.log10(float(dbm_to_mw(signal_dbm)) / denom)


def mobile_sinr(state: RdzState, mobile_id: str) -> float | None:
    """SINR of the mobile at its best endpoint; None while the mobile is disabled.

    Interferers are the other enabled co-channel test transmitters.
    """
    mobile = state.get(mobile_id)
    endpoints = state.endpoints()
    if not endpoints:
        raise ValueError("no endpoints configured")
    if not mobile.enabled:
        return None
    model, grid = state.config.model, state.grid
    best, best_rx = NEG_INF, None
    for ep in endpoints:
        p = received_power(mobile, ep.pos, ep.height, ep.gain, model, grid)
        if p > best:
            best, best_rx = p, ep
    interferers = [
        received_power(t, best_rx.pos, best_rx.height, best_rx.gain, model, grid)
        for t in state.test_transmitters()
        if t.enabled and t.id != mobile.id and t.frequency == mobile.frequency
    ]
    return sinr_db(best, interferers, state.config.noise_floor)


def mobile_violating(state: RdzState, mobile_id: str) -> bool:
    """Whether the mobile breaks zone policy this step (evaluated as if enabled)."""
    return (detect_leakage(state, mobile_id) is not None
            or detect_interference(state, mobile_id) is not None)


def step_valid(state: RdzState, mobile_id: str) -> bool:
    """A step counts toward uptime unless the mobile is violating, or is still held
    off by the manager for an earlier violation."""
    mobile = state.get(mobile_id)
    if not mobile.enabled and mobile.suspended:
        return False
    return not mobile_violating(state, mobile_id)


def _clip(v: float, bound: float) -> float:
    return min(max(v, -bound), bound)


def reward_terms(r: RewardInputs) -> tuple[float, float, float, float, float]:
    if r.A <= 0:
        raise ValueError("zone area must be positive")
    if r.I_T == 0 or r.L_T == 0:
        raise ValueError("thresholds must be non-zero")
    b = r.clip_bound
    uptime = 10.0 * r.U
    sinr = 0.0 if r.S is None or not math.isfinite(r.S) else r.S / 30.0
    if r.normalize_signs:
        interf = 0.0 if r.I == NEG_INF else -(r.I_T / r.I)
        leak = 0.0 if r.L == NEG_INF else -(r.L_T / r.L)
    else:
        interf = 0.0 if r.I == NEG_INF else -(r.I / r.I_T)
        leak = 0.0 if r.L == NEG_INF else -(r.L / r.L_T)
    points = -(r.P / r.A)
    return tuple(_clip(t, b) for t in (uptime, sinr, interf, points, leak))


def step_reward(r: RewardInputs) -> float:
    return sum(reward_terms(r))


def measure(state: RdzState, mobile_id: str | None, clip_bound: float = 10.0,
            normalize_signs: bool = False) -> StepMetrics:
    c = state.config
    P, L = leakage_metrics(state)
    if mobile_id is None:
        return StepMetrics(state.step, P, L, NEG_INF, None, False, True,
                           step_reward(RewardInputs(0, None, NEG_INF, c.interference_threshold, P,
                                                    zone_area(state.zone, state.grid), L,
                                                    c.leakage_threshold, clip_bound,
                                                    normalize_signs)))
    mobile = state.get(mobile_id)
    active = mobile.enabled
    I = interference_level(state, mobile_id) if active else NEG_INF
    S = mobile_sinr(state, mobile_id) if state.endpoints() else None
    valid = step_valid(state, mobile_id)
    reward = step_reward(RewardInputs(
        U=1.0 if active else 0.0, S=S, I=I, I_T=c.interference_threshold, P=P,
        A=zone_area(state.zone, state.grid), L=L, L_T=c.leakage_threshold,
        clip_bound=clip_bound, normalize_signs=normalize_signs))
    return StepMetrics(state.step, P, L, I, S, active, valid, reward)


def uptime(steps: list[StepMetrics]) -> float:
    if not steps:
        raise ValueError("uptime of an empty trial is undefined")
    valid = [s for s in steps if s.step_valid]
    if not valid:
        return 1.0
    return sum(1 for s in valid if s.mobile_active) / len(valid)


def summarize(steps: list[StepMetrics]) -> TrialSummary:
    leaked = sum(float(dbm_to_mw(s.leaked_power)) for s in steps)
    interf = sum(float(dbm_to_mw(s.interference)) for s in steps)
    return TrialSummary(
        total_leakage_points=sum(s.leakage_points for s in steps),
        total_leaked_power=mw_to_dbm(leaked),
        total_interference=mw_to_dbm(interf),
        sinr_samples=[s.mobile_sinr for s in steps if s.mobile_sinr is not None],
        uptime=uptime(steps),
        total_reward=sum(s.reward for s in steps),
    )


def pooled_uptime(trials: list[list[StepMetrics]]) -> float:
    """Uptime over all valid steps of several trials taken together."""
    valid = [s for steps in trials for s in steps if s.step_valid]
    if not valid:
        return 1.0
    return sum(1 for s in valid if s.mobile_active) / len(valid)
