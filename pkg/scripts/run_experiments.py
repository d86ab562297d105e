"""Run both bundled experiments plus the long random-uptime study.

Writes ``<out>/<scenario>/{steps,summary}.csv`` and ``report.txt`` for each
scenario and ``<out>/random_uptime.json``.
"""

from __future__ import annotations

import argparse
import json
import logging
from pathlib import Path

from radiozone.harness import format_report, run_experiment
from radiozone.metrics import pooled_uptime
from radiozone.scenario import BUNDLED, Scenario

log = logging.getLogger("run_experiments")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, help="override the scenario seed")
    ap.add_argument("--uptime-trials", type=int, default=30)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    out = Path(args.out)
    uptime = {}
    for name in BUNDLED:
        sc = Scenario.bundled(name)
        if args.seed is not None:
            sc = sc.with_overrides(seed=args.seed)
        report = run_experiment(sc, out_dir=out / name)
        print(format_report(report))
        recs = run_experiment(sc.with_overrides(trials=args.uptime_trials), ["random"]).records
        uptime[name] = {
            "trials": len(recs),
            "valid_steps": sum(m.step_valid for r in recs for m in r.metrics),
            "pooled_uptime": pooled_uptime([r.metrics for r in recs]),
            "mean_trial_uptime": sum(r.summary.uptime for r in recs) / len(recs),
        }
        log.info("%s random uptime: %s", name, uptime[name])
    (out / "random_uptime.json").write_text(json.dumps(uptime, indent=2))


if __name__ == "__main__":
    main()
