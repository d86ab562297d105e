"""Per-policy, per-trial breakdown of a scenario, used to tune transmit powers.

    python3 scripts/calibrate.py path/to/file.scenario [htn,naive,...]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from radiozone.harness import run_experiment
from radiozone.scenario import Scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scenario")
    ap.add_argument("policies", nargs="?", default="htn,htn-0.1,htn-0.2,htn-0.3,naive")
    args = ap.parse_args()
    sc = Scenario.from_file(args.scenario)
    t0 = time.perf_counter()
    report = run_experiment(sc, args.policies.split(","))
    print(f"{sc.name}: {time.perf_counter() - t0:.1f} s")
    for policy, recs in report.by_policy().items():
        sinr = np.array([x for r in recs for x in r.summary.sinr_samples])
        print(policy,
              "pts", [r.summary.total_leakage_points for r in recs],
              "L", [round(r.summary.total_leaked_power, 1) for r in recs],
              "I", [round(r.summary.total_interference, 1) for r in recs],
              "up", [round(r.summary.uptime, 3) for r in recs],
              "valid", [sum(m.step_valid for m in r.metrics) for r in recs],
              "sinr>25", round(float((sinr > 25).mean()), 3) if sinr.size else None,
              "n", sinr.size)


if __name__ == "__main__":
    main()
