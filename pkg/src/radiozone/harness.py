"""Closed-loop step driver, trial orchestration and result files."""

from __future__ import annotations

import csv
import io
import logging
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from radiozone.core import RdzState, Violation, advance_mobility, sense
from radiozone.metrics import StepMetrics, TrialSummary, measure, summarize
from radiozone.policies import Policy, StepDecision, decide_and_act
from radiozone.scenario import Scenario

log = logging.getLogger(__name__)

STEP_COLUMNS = [
    "policy", "trial", "step", "leakage_points", "leaked_power_dbm", "interference_dbm",
    "sinr_db", "active", "valid", "reward", "mobile_x", "mobile_y", "mobile_freq",
    "executed", "skipped",
]
SUMMARY_COLUMNS = [
    "policy", "trial", "total_leakage_points", "total_leaked_power_dbm",
    "total_interference_dbm", "sinr_mean_db", "sinr_std_db", "sinr_samples", "uptime",
    "total_reward",
]


@dataclass
class StepRecord:
    metrics: StepMetrics
    decision: StepDecision
    violations: list[Violation]
    mobile: tuple[float, float, float] | None  # x, y, frequency after the move


@dataclass
class TrialRecord:
    scenario_hash: str
    policy: str
    seed: int
    trial: int
    steps: list[StepRecord] = field(default_factory=list)
    summary: TrialSummary | None = None
    final_state: RdzState | None = field(default=None, repr=False)

    @property
    def metrics(self) -> list[StepMetrics]:
        return [s.metrics for s in self.steps]

    @property
    def mobile_track(self) -> list[tuple[float, float]]:
        return [s.mobile[:2] for s in self.steps if s.mobile is not None]


@dataclass
class ExperimentReport:
    scenario: str
    records: list[TrialRecord]

    def by_policy(self) -> dict[str, list[TrialRecord]]:
        out: dict[str, list[TrialRecord]] = {}
        for r in self.records:
            out.setdefault(r.policy, []).append(r)
        return out

    def record(self, policy: str, trial: int) -> TrialRecord:
        for r in self.records:
            if r.policy == policy and r.trial == trial:
                return r
        raise KeyError((policy, trial))


def trial_rngs(seed: int, trial: int, policy: Policy) -> tuple[np.random.Generator, np.random.Generator]:
    """Mobility stream shared by every policy of a trial, plus a per-policy stream."""
    mobility = np.random.default_rng([seed, trial, 0])
    tag = zlib.crc32(policy.label.encode())
    return mobility, np.random.default_rng([seed, trial, 1, tag])


def run_step(state: RdzState, policy: Policy, mobility_rng: np.random.Generator,
             policy_rng: np.random.Generator, move_distance: float = 5.0,
             measure_before_act: bool = False, request=None, clip_bound: float = 10.0,
             normalize_reward_signs: bool = False):
    """Move, sense, act, measure. Returns (state, metrics, decision, violations)."""
    state = advance_mobility(state, mobility_rng, move_distance)
    if request is not None:
        state.pending_zone = request
    violations = sense(state)
    mobiles = state.mobiles()
    mobile_id = mobiles[0].id if mobiles else None
    if measure_before_act:
        metrics = measure(state, mobile_id, clip_bound, normalize_reward_signs)
        state, decision = decide_and_act(policy, state, policy_rng)
    else:
        state, decision = decide_and_act(policy, state, policy_rng)
        metrics = measure(state, mobile_id, clip_bound, normalize_reward_signs)
    return state, metrics, decision, violations


def run_trial(scenario: Scenario, policy: Policy | str, trial: int = 0,
              seed: int | None = None) -> TrialRecord:
    policy = Policy.parse(policy) if isinstance(policy, str) else policy
    seed = scenario.seed if seed is None else seed
    state = scenario.initial_state(trial, seed)
    mobility_rng, policy_rng = trial_rngs(seed, trial, policy)
    record = TrialRecord(scenario.digest, policy.label, seed, trial)
    for _ in range(scenario.steps_per_trial):
        request = scenario.incumbent_requests.get(state.step + 1)
        state, metrics, decision, violations = run_step(
            state, policy, mobility_rng, policy_rng, scenario.move_distance,
            scenario.measure_before_act, request, scenario.clip_bound,
            scenario.normalize_reward_signs)
        mobiles = state.mobiles()
        mob = (mobiles[0].pos.x, mobiles[0].pos.y, mobiles[0].frequency) if mobiles else None
        record.steps.append(StepRecord(metrics, decision, violations, mob))
    record.summary = summarize(record.metrics)
    record.final_state = state
    return record


def run_experiment(scenario: Scenario, policies: list[Policy | str] | None = None,
                   out_dir: str | Path | None = None) -> ExperimentReport:
    """Every policy on every trial; trial ``i`` shares its mobility seed across policies."""
    policies = [Policy.parse(p) if isinstance(p, str) else p
                for p in (policies or scenario.policies)]
    if not policies:
        raise ValueError("at least one policy is required")
    records = []
    for trial in range(scenario.trials):
        for policy in policies:
            rec = run_trial(scenario, policy, trial)
            log.info("%s trial %d: %s", policy.label, trial, rec.summary)
            records.append(rec)
    report = ExperimentReport(scenario.name, records)
    if out_dir is not None:
        write_outputs(report, out_dir)
    return report


def _num(v: float | None, fmt: str = ".6f") -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return format(v, fmt)


def steps_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STEP_COLUMNS)
    for rec in report.records:
        for s in rec.steps:
            m = s.metrics
            mob = s.mobile or ("", "", "")
            w.writerow([
                rec.policy, rec.trial, m.step, m.leakage_points, _num(m.leaked_power),
                _num(m.interference), _num(m.mobile_sinr), int(m.mobile_active),
                int(m.step_valid), _num(m.reward), _num(mob[0], ".4f") if s.mobile else "",
                _num(mob[1], ".4f") if s.mobile else "", _num(mob[2], ".0f") if s.mobile else "",
                ";".join(a.label() for a in s.decision.executed),
                ";".join(a.label() for a in s.decision.skipped),
            ])
    return buf.getvalue()


def summary_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for rec in report.records:
        s = rec.summary
        w.writerow([
            rec.policy, rec.trial, s.total_leakage_points, _num(s.total_leaked_power),
            _num(s.total_interference), _num(s.sinr_mean), _num(s.sinr_std),
            len(s.sinr_samples), _num(s.uptime, ".4f"), _num(s.total_reward),
        ])
    return buf.getvalue()


def format_report(report: ExperimentReport) -> str:
    groups = report.by_policy()
    lines = [f"scenario: {report.scenario}", ""]
    header = (f"{'policy':<10} {'leak pts':>10} {'leaked dBm':>11} {'interf dBm':>11} "
              f"{'SINR mean':>10} {'SINR std':>9} {'uptime':>7}")
    lines += ["per-trial totals", header, "-" * len(header)]
    for policy, recs in groups.items():
        for r in recs:
            s = r.summary
            lines.append(
                f"{policy + ' #' + str(r.trial):<10} {s.total_leakage_points:>10d} "
                f"{_num(s.total_leaked_power, '.2f'):>11} {_num(s.total_interference, '.2f'):>11} "
                f"{_num(s.sinr_mean, '.2f'):>10} {_num(s.sinr_std, '.2f'):>9} {s.uptime:>7.3f}")
    lines += ["", "mean over trials (SINR pooled over all samples)", header, "-" * len(header)]
    for policy, recs in groups.items():
        samples = [x for r in recs for x in r.summary.sinr_samples]
        pts = np.mean([r.summary.total_leakage_points for r in recs])
        leaked = np.mean([r.summary.total_leaked_power for r in recs])
        interf = np.mean([r.summary.total_interference for r in recs])
        mean = float(np.mean(samples)) if samples else math.nan
        std = float(np.std(samples, ddof=1)) if len(samples) > 1 else math.nan
        up = np.mean([r.summary.uptime for r in recs])
        lines.append(f"{policy:<10} {pts:>10.1f} {_num(float(leaked), '.2f'):>11} "
                     f"{_num(float(interf), '.2f'):>11} {_num(mean, '.2f'):>10} "
                     f"{_num(std, '.2f'):>9} {up:>7.3f}")
    return "\n".join(lines) + "\n"


def write_outputs(report: ExperimentReport, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "steps.csv").write_text(steps_csv(report))
    (out / "summary.csv").write_text(summary_csv(report))
    (out / "report.txt").write_text(format_report(report))
