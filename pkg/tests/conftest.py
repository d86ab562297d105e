from __future__ import annotations

import numpy as np
import pytest

from radiozone.core import RdzConfig, RdzState, Role, Transmitter
from radiozone.geo import Grid, GridPos, ZoneBoundary
from radiozone.propagation import ModelKind, PropagationModel


def random_grid(rng: np.random.Generator, size: int, n_blocks: int = 4) -> Grid:
    grid = Grid(size, size, 10.0)
    blocks = []
    for _ in range(n_blocks):
        x0, y0 = rng.integers(0, size - 2, 2)
        w, h = rng.integers(1, max(2, size // 5), 2)
        blocks.append((int(x0), int(y0), int(min(size - 1, x0 + w)), int(min(size - 1, y0 + h)),
                       float(rng.uniform(3.0, 45.0))))
    return grid.with_buildings(blocks)


def random_state(seed: int, size: int = 40, n_stationary: int = 4, n_endpoints: int = 3,
                 terrain: bool = True) -> RdzState:
    """A small random zone: a rectangle well inside the grid, a mixed fleet with
    random powers, channels and enabled flags, and one mobile."""
    rng = np.random.default_rng(seed)
    grid = random_grid(rng, size) if terrain else Grid(size, size, 10.0)
    lo = int(rng.integers(size // 8, size // 4))
    hi = int(rng.integers(3 * size // 4, size - size // 8))
    zone = ZoneBoundary.rect(lo, lo, hi, hi)
    channels = (3600.0, 3610.0, 3620.0)
    model = PropagationModel(ModelKind.TERRAIN_AWARE if terrain else ModelKind.LOG_DISTANCE,
                             float(rng.uniform(2.5, 3.5)))
    config = RdzConfig(model=model)

    def point():
        return GridPos(float(rng.uniform(0, size - 1)), float(rng.uniform(0, size - 1)))

    fleet = []
    for i in range(n_stationary):
        fleet.append(Transmitter(
            f"s{i}", Role.STATIONARY_TEST, point(), float(rng.uniform(5, 40)),
            tx_power=float(rng.uniform(-20, 20)), gain=4.9,
            frequency=channels[int(rng.integers(3))], enabled=bool(rng.random() < 0.6)))
    for i in range(n_endpoints):
        fleet.append(Transmitter(f"e{i}", Role.ENDPOINT, point(), 1.8, gain=-2.0,
                                 frequency=channels[int(rng.integers(3))]))
    fleet.append(Transmitter(
        "m", Role.MOBILE_TEST, point(), 30.0, tx_power=float(rng.uniform(-20, 20)), gain=4.9,
        frequency=channels[int(rng.integers(3))], enabled=bool(rng.random() < 0.6)))
    return RdzState(grid, zone, config, fleet)


@pytest.fixture
def flat_state() -> RdzState:
    """400x400 flat grid, zone (50,50)-(350,350), free-space propagation, no fleet."""
    return RdzState(Grid(), ZoneBoundary.rect(50, 50, 350, 350),
                    RdzConfig(model=PropagationModel(ModelKind.FREE_SPACE)), [])


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
