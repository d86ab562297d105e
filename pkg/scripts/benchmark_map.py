"""Time cold and one-mover cached aggregate maps for 28 terrain-aware transmitters."""

from __future__ import annotations

import argparse
import os
import statistics
import time
from dataclasses import replace

from radiozone.geo import GridPos
from radiozone.propagation import MapCache, compute_map
from radiozone.scenario import Scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()
    state = Scenario.bundled("interference").initial_state(0)
    c = state.config
    fleet = [replace(t, enabled=True) for t in state.fleet[:28]]

    def timed(cache):
        t0 = time.perf_counter()
        compute_map(fleet, None, c.probe_height, c.probe_gain, c.model, state.grid, cache,
                    args.workers)
        return (time.perf_counter() - t0) * 1e3

    timed(None)
    cold = [timed(None) for _ in range(args.repeats)]
    cache = MapCache()
    timed(cache)
    warm = []
    for _ in range(args.repeats):
        m = fleet[-1]
        fleet[-1] = replace(m, pos=GridPos((m.pos.x + 1) % 400, m.pos.y))
        warm.append(timed(cache))
    print(f"cpus: {os.cpu_count()}")
    for name, xs in (("cold", cold), ("one mover, cached", warm)):
        print(f"{name:<18} min {min(xs):6.1f} ms  median {statistics.median(xs):6.1f} ms")


if __name__ == "__main__":
    main()
