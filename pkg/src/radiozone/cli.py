"""Command line entry point: ``radiozone run | plan-trace | map | snapshot``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from radiozone.core import RdzState
from radiozone.domain import plan_maintenance
from radiozone.geo import ZoneBoundary
from radiozone.harness import format_report, run_experiment, run_trial
from radiozone.htn import PlanningError, render_trace
from radiozone.policies import Policy
from radiozone.propagation import compute_map
from radiozone.scenario import Scenario

log = logging.getLogger("radiozone")


def _load(args) -> Scenario:
    sc = Scenario.from_file(args.scenario)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if getattr(args, "steps", None) is not None:
        changes["steps_per_trial"] = args.steps
    return sc.with_overrides(**changes) if changes else sc


def cmd_run(args) -> int:
    sc = _load(args)
    policies = [Policy.parse(p) for p in args.policies.split(",")] if args.policies else None
    report = run_experiment(sc, policies, args.out)
    sys.stdout.write(format_report(report))
    log.info("wrote steps.csv, summary.csv and report.txt to %s", args.out)
    return 0


def cmd_plan_trace(args) -> int:
    sc = _load(args)
    doc = json.loads(Path(args.step_state).read_text())
    state = RdzState.from_dict(doc, sc.grid)
    try:
        plan = plan_maintenance(state)
    except PlanningError as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return 1
    print(render_trace(plan))
    return 0


def cmd_map(args) -> int:
    sc = _load(args)
    state = sc.initial_state(args.trial)
    c = state.config
    rfmap = compute_map(state.fleet, args.frequency, c.probe_height, c.probe_gain, c.model, state.grid)
    rfmap.write_csv(args.out)
    log.info("wrote %dx%d map to %s", rfmap.width, rfmap.height, args.out)
    return 0


def cmd_snapshot(args) -> int:
    sc = _load(args).with_overrides(steps_per_trial=args.step)
    record = run_trial(sc, args.policy, args.trial)
    state = record.final_state
    if args.pending_rect:
        state.pending_zone = ZoneBoundary.rect(*args.pending_rect)
    Path(args.out).write_text(state.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radiozone", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_args(sp):
        sp.add_argument("--scenario", required=True,
                        help="scenario TOML file, or a bundled name (leakage, interference)")
        sp.add_argument("--seed", type=int)

    r = sub.add_parser("run", help="run every policy on every trial and write results")
    scenario_args(r)
    r.add_argument("--policies", help="comma separated, e.g. htn,htn-0.1,random,naive")
    r.add_argument("--out", required=True)
    r.add_argument("--trials", type=int)
    r.add_argument("--steps", type=int)
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("plan-trace", help="plan one step from a state snapshot and print the tree")
    scenario_args(t)
    t.add_argument("--step-state", required=True, help="JSON snapshot written by `snapshot`")
    t.set_defaults(func=cmd_plan_trace)

    m = sub.add_parser("map", help="dump the aggregate RF map (dBm) of a trial's initial fleet")
    scenario_args(m)
    m.add_argument("--out", required=True)
    m.add_argument("--trial", type=int, default=0)
    m.add_argument("--frequency", type=float, help="only transmitters on this channel")
    m.set_defaults(func=cmd_map)

    s = sub.add_parser("snapshot", help="run one trial for N steps and save the resulting state")
    scenario_args(s)
    s.add_argument("--policy", default="naive")
    s.add_argument("--trial", type=int, default=0)
    s.add_argument("--step", type=int, default=1)
    s.add_argument("--pending-rect", type=float, nargs=4, metavar=("X0", "Y0", "X1", "Y1"),
                   help="attach a pending incumbent request to the saved state")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_snapshot)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
