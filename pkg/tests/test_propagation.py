from __future__ import annotations

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radiozone.core import Role, Transmitter
from radiozone.geo import Grid, GridPos
from radiozone.propagation import (NO_SIGNAL_DBM, MapCache, ModelKind, PropagationModel,
                                   compute_map, fspl_db, path_loss, received_power,
                                   single_source_map)

from conftest import random_grid

FREE = PropagationModel(ModelKind.FREE_SPACE)


def tx(x, y, h=10.0, p=30.0, g=0.0, f=3600.0, enabled=True, name="t"):
    return Transmitter(name, Role.STATIONARY_TEST, GridPos(x, y), h, p, g, f, enabled)


def test_fspl_example():
    grid = Grid(200, 200)
    loss = path_loss(FREE, GridPos(0, 0), 2.0, GridPos(100, 0), 2.0, 3600.0, grid)
    assert loss == pytest.approx(32.45 + 20 * math.log10(3600), abs=1e-9)
    assert loss == pytest.approx(103.58, abs=0.005)


def test_received_power_example():
    grid = Grid(200, 200)
    t = Transmitter("t", Role.STATIONARY_TEST, GridPos(0, 0), 2.0, 30.0, 4.9, 3600.0)
    p = received_power(t, GridPos(100, 0), 2.0, -2.0, FREE, grid)
    assert p == pytest.approx(-70.68, abs=0.005)


def test_loss_clamped_below_reference_distance():
    grid = Grid(50, 50)
    model = PropagationModel(ModelKind.LOG_DISTANCE, 3.0, reference_distance=20.0)
    at_ref = fspl_db(20.0, 3600.0)
    assert path_loss(model, GridPos(5, 5), 2.0, GridPos(5, 5), 2.0, 3600.0, grid) == pytest.approx(at_ref)
    assert path_loss(model, GridPos(5, 5), 2.0, GridPos(6, 5), 2.0, 3600.0, grid) == pytest.approx(at_ref)


def test_loss_never_negative_and_rejects_bad_frequency():
    grid = Grid(10, 10)
    model = PropagationModel(reference_distance=0.001)
    assert path_loss(model, GridPos(1, 1), 2.0, GridPos(1, 1), 2.0, 10.0, grid) == 0.0
    with pytest.raises(ValueError):
        path_loss(model, GridPos(1, 1), 2.0, GridPos(2, 1), 2.0, 0.0, grid)
    with pytest.raises(ValueError):
        PropagationModel(path_loss_exponent=9.0)


def test_zero_loss_identity():
    grid = Grid(10, 10)
    model = PropagationModel(reference_distance=0.001)
    t = tx(1, 1, h=2.0, p=17.0, f=10.0)
    assert received_power(t, GridPos(1, 1), 2.0, 0.0, model, grid) == 17.0


@settings(max_examples=200)
@given(st.sampled_from([ModelKind.FREE_SPACE, ModelKind.LOG_DISTANCE]), st.floats(2, 5),
       st.floats(0, 199), st.floats(0, 199), st.floats(0, 199), st.floats(0, 199),
       st.floats(1, 30), st.floats(0, 1))
def test_monotone_and_reciprocal(kind, n, ax, ay, bx, by, h, t):
    grid = Grid(200, 200)
    model = PropagationModel(kind, n)
    a, b = GridPos(ax, ay), GridPos(bx, by)
    ab = path_loss(model, a, h, b, h, 3600.0, grid)
    assert ab == pytest.approx(path_loss(model, b, h, a, h, 3600.0, grid))
    # a point on the segment is no farther than b
    c = GridPos(ax + t * (bx - ax), ay + t * (by - ay))
    assert path_loss(model, a, h, c, h, 3600.0, grid) <= ab + 1e-9


def test_terrain_on_flat_grid_equals_log_distance():
    grid = Grid(60, 60)
    t = tx(20.3, 31.7, h=25.0)
    flat = single_source_map(t, 1.5, 0.0, PropagationModel(ModelKind.LOG_DISTANCE, 3.2), grid, None)
    terr = single_source_map(t, 1.5, 0.0, PropagationModel(ModelKind.TERRAIN_AWARE, 3.2), grid, None)
    np.testing.assert_array_equal(flat.power, terr.power)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_field_matches_point_evaluation(kind):
    rng = np.random.default_rng(3)
    grid = random_grid(rng, 30, n_blocks=5)
    model = PropagationModel(kind, 2.8)
    t = tx(12.0, 17.0, h=6.0, p=20.0, g=4.9)
    field = single_source_map(t, 1.5, -2.0, model, grid, None)
    for y in range(0, 30, 3):
        for x in range(0, 30, 2):
            expected = received_power(t, GridPos(x, y), 1.5, -2.0, model, grid)
            assert field.at(x, y) == pytest.approx(expected, abs=1e-9)


def test_compute_map_examples():
    grid = Grid(40, 40)
    empty = compute_map([], grid=grid, cache=None)
    assert not empty.power.any()
    a = tx(5, 5, name="a")
    assert np.array_equal(compute_map([a], grid=grid, cache=None).power,
                          single_source_map(a, grid=grid, cache=None).power)
    b = tx(30, 12, p=10.0, name="b")
    both = compute_map([a, b], grid=grid, cache=None)
    assert np.array_equal(both.power, single_source_map(a, grid=grid, cache=None).power
                          + single_source_map(b, grid=grid, cache=None).power)


def test_compute_map_filters_disabled_and_frequency():
    grid = Grid(40, 40)
    a, b = tx(5, 5, name="a"), tx(30, 12, f=3610.0, name="b")
    off = tx(20, 20, enabled=False, name="c")
    only_a = compute_map([a, b, off], 3600.0, grid=grid, cache=None)
    assert np.array_equal(only_a.power, single_source_map(a, grid=grid, cache=None).power)


def test_compute_map_worker_count_does_not_change_result():
    grid = random_grid(np.random.default_rng(9), 80, n_blocks=8)
    model = PropagationModel(ModelKind.TERRAIN_AWARE)
    rng = np.random.default_rng(1)
    fleet = [tx(*rng.uniform(0, 79, 2), h=float(rng.uniform(5, 40)), p=float(rng.uniform(0, 30)),
                name=f"t{i}") for i in range(7)]
    one = compute_map(fleet, model=model, grid=grid, cache=MapCache(), workers=1)
    four = compute_map(fleet, model=model, grid=grid, cache=MapCache(), workers=4)
    assert np.array_equal(one.power, four.power)


def test_cache_hits_and_invalidation():
    grid = Grid(50, 50)
    cache = MapCache()
    a = tx(10, 10)
    m1 = single_source_map(a, grid=grid, cache=cache)
    m2 = single_source_map(a, grid=grid, cache=cache)
    assert (cache.hits, cache.misses) == (1, 1)
    assert np.array_equal(m1.power, m2.power)
    moved = Transmitter(a.id, a.role, GridPos(11, 10), a.height, a.tx_power, a.gain, a.frequency)
    m3 = single_source_map(moved, grid=grid, cache=cache)
    assert cache.misses == 2
    assert np.any(m3.power != m1.power)
    np.testing.assert_array_equal(m3.power, single_source_map(moved, grid=grid, cache=None).power)
    # the unmoved transmitter is still served from cache
    single_source_map(a, grid=grid, cache=cache)
    assert cache.hits == 2


def test_cache_is_bounded():
    grid = Grid(20, 20)
    cache = MapCache(maxsize=3)
    for i in range(5):
        single_source_map(tx(i, 0), grid=grid, cache=cache)
    assert len(cache) == 3


def test_out_of_bounds_transmitter_rejected():
    with pytest.raises(ValueError):
        single_source_map(tx(5, 5), grid=Grid(4, 4), cache=None)


def test_csv_export(tmp_path):
    grid = Grid(6, 4)
    rf = compute_map([tx(1, 1)], grid=grid, cache=None)
    rf.write_csv(tmp_path / "map.csv")
    rows = list(csv.reader(open(tmp_path / "map.csv")))
    assert len(rows) == 4 and all(len(r) == 6 for r in rows)
    assert float(rows[2][3]) == pytest.approx(rf.at(3, 2), abs=1e-4)
    compute_map([], grid=grid, cache=None).write_csv(tmp_path / "empty.csv")
    rows = list(csv.reader(open(tmp_path / "empty.csv")))
    assert all(float(v) == NO_SIGNAL_DBM for r in rows for v in r)
