"""Analytic path-loss models and received-power maps.

Three models share one interface: free-space, log-distance (free-space loss
up to a reference distance, then ``10 n log10(d / d0)``) and terrain-aware
(log-distance plus a per-obstructed-cell penalty, capped). Maps hold linear
milliwatts; dBm is only used at the interface.
"""

from __future__ import annotations

import csv
import enum
import math
import os
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np

from radiozone._terrain import (field_obstructions, finish_power, link_obstructions,
                                scaled_distance2)
from radiozone.geo import Grid, GridPos, distance_3d

NO_SIGNAL_DBM = -999.0


class ModelKind(str, enum.Enum):
    FREE_SPACE = "free-space"
    LOG_DISTANCE = "log-distance"
    TERRAIN_AWARE = "terrain-aware"


@dataclass(frozen=True)
class PropagationModel:
    kind: ModelKind = ModelKind.LOG_DISTANCE
    path_loss_exponent: float = 3.0
    reference_distance: float = 1.0
    obstruction_penalty: float = 0.5  # dB per obstructed cell
    obstruction_cap: float = 40.0  # dB

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if not 1.6 <= self.path_loss_exponent <= 6.5:
            raise ValueError(f"path_loss_exponent {self.path_loss_exponent} outside [1.6, 6.5]")
        if self.reference_distance <= 0:
            raise ValueError("reference_distance must be positive")
        if self.obstruction_penalty < 0 or self.obstruction_cap < 0:
            raise ValueError("obstruction penalty and cap must be non-negative")

    @property
    def exponent(self) -> float:
        return 2.0 if self.kind is ModelKind.FREE_SPACE else self.path_loss_exponent

    @property
    def uses_terrain(self) -> bool:
        return self.kind is ModelKind.TERRAIN_AWARE


class Emitter(Protocol):
    pos: GridPos
    height: float
    tx_power: float
    gain: float
    frequency: float
    enabled: bool


def dbm_to_mw(dbm):
    return np.power(10.0, np.asarray(dbm, dtype=float) / 10.0)


def mw_to_dbm(mw):
    """dBm of a linear power; zero maps to ``-inf``."""
    mw = np.asarray(mw, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(mw)
    return float(out) if out.ndim == 0 else out


def fspl_db(distance_m: float, freq_mhz: float) -> float:
    return 20.0 * math.log10(distance_m / 1000.0) + 20.0 * math.log10(freq_mhz) + 32.45


def terrain_penalty_db(model: PropagationModel, count) -> float:
    return np.minimum(np.asarray(count) * model.obstruction_penalty, model.obstruction_cap)


def path_loss(model: PropagationModel, tx_pos: GridPos, tx_height: float,
              rx_pos: GridPos, rx_height: float, freq: float, grid: Grid) -> float:
    """Loss in dB between two antennas; never negative."""
    if freq <= 0:
        raise ValueError(f"frequency must be positive, got {freq}")
    d0 = model.reference_distance
    d = max(distance_3d(tx_pos, tx_height, rx_pos, rx_height, grid), d0)
    loss = fspl_db(d0, freq) + 10.0 * model.exponent * math.log10(d / d0)
    if model.uses_terrain and not grid.is_flat:
        x0, y0 = tx_pos.cell()
        x1, y1 = rx_pos.cell()
        count = link_obstructions(grid.elevation, x0, y0, x1, y1, float(tx_height), float(rx_height))
        loss += float(terrain_penalty_db(model, count))
    return max(loss, 0.0)


def received_power(tx: Emitter, rx_pos: GridPos, rx_height: float, rx_gain: float,
                   model: PropagationModel, grid: Grid) -> float:
    """Received power in dBm at a point antenna (ignores the enabled flag)."""
    loss = path_loss(model, tx.pos, tx.height, rx_pos, rx_height, tx.frequency, grid)
    return tx.tx_power + tx.gain + rx_gain - loss


@dataclass(eq=False)
class RfMap:
    """Per-cell received power in linear mW, indexed ``[y, x]``."""

    power: np.ndarray
    frequency_filter: float | None = None
    _peaks: dict = field(default_factory=dict, repr=False)

    def peak_where(self, key, mask: np.ndarray) -> float:
        """Largest mW value under ``mask``; memoized per ``key`` since cached maps are reused."""
        if key not in self._peaks:
            self._peaks[key] = float(self.power[mask].max()) if mask.any() else 0.0
        return self._peaks[key]

    @property
    def width(self) -> int:
        return self.power.shape[1]

    @property
    def height(self) -> int:
        return self.power.shape[0]

    def dbm(self) -> np.ndarray:
        return mw_to_dbm(self.power)

    def at(self, x: int, y: int) -> float:
        """dBm at a cell."""
        return mw_to_dbm(self.power[y, x])

    def write_csv(self, path: str | Path) -> None:
        out = self.dbm()
        out[~np.isfinite(out)] = NO_SIGNAL_DBM
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            for row in out:
                w.writerow([f"{v:.4f}" for v in row])


_NO_COUNTS = np.zeros((0, 0), dtype=np.int32)
_NO_TABLE = np.zeros(1)


def _field(tx: Emitter, rx_height: float, rx_gain: float,
           model: PropagationModel, grid: Grid) -> np.ndarray:
    if tx.frequency <= 0:
        raise ValueError(f"frequency must be positive, got {tx.frequency}")
    d0 = model.reference_distance
    eirp = tx.tx_power + tx.gain + rx_gain
    scale = 10.0 ** ((eirp - fspl_db(d0, tx.frequency)) / 10.0)
    counts, table = _NO_COUNTS, _NO_TABLE
    if model.uses_terrain and not grid.is_flat:
        counts = field_obstructions(grid, tx.pos.cell(), tx.height, rx_height)
        table = 10.0 ** (-terrain_penalty_db(model, np.arange(counts.max() + 1)) / 10.0)
    out = np.empty((grid.height, grid.width))
    dz2 = (tx.height - rx_height) ** 2
    cap = 10.0 ** (eirp / 10.0)  # 0 dB path-loss floor
    scaled_distance2(float(tx.pos.x), float(tx.pos.y), dz2, grid.cell_size, d0, out)
    # (d / d0) ** -n from squared distances
    np.power(out, -model.exponent / 2.0, out=out)
    finish_power(out, scale, cap, counts, table)
    return out


class MapCache:
    """LRU of single-transmitter fields keyed by everything that shapes them.

    Moving or retuning a transmitter changes its key, so only that
    transmitter misses on the next lookup.
    """

    def __init__(self, maxsize: int = 192):
        self.maxsize = maxsize
        self.hits = 0
        self.misses = 0
        self._store: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    @staticmethod
    def key(tx: Emitter, rx_height, rx_gain, model, grid) -> tuple:
        return (tx.pos.x, tx.pos.y, tx.height, tx.tx_power, tx.gain, tx.frequency,
                model, rx_height, rx_gain, grid.fingerprint)

    def get(self, key):
        with self._lock:
            hit = self._store.get(key)
            if hit is not None:
                self._store.move_to_end(key)
                self.hits += 1
            return hit

    def put(self, key, value) -> None:
        with self._lock:
            self._store[key] = value
            self._store.move_to_end(key)
            while len(self._store) > self.maxsize:
                self._store.popitem(last=False)

    def clear(self) -> None:
        with self._lock:
            self._store.clear()
            self.hits = self.misses = 0

    def __len__(self):
        return len(self._store)


default_cache = MapCache()


def single_source_map(tx: Emitter, rx_height: float = 1.5, rx_gain: float = 0.0,
                      model: PropagationModel = PropagationModel(), grid: Grid | None = None,
                      cache: MapCache | None = default_cache) -> RfMap:
    """Field of one transmitter, regardless of its enabled flag."""
    grid = grid if grid is not None else Grid()
    if not grid.in_bounds(tx.pos):
        raise ValueError(f"transmitter at {tx.pos} is outside the grid")
    if cache is None:
        arr = _field(tx, rx_height, rx_gain, model, grid)
        arr.setflags(write=False)
        return RfMap(arr, tx.frequency)
    key = MapCache.key(tx, rx_height, rx_gain, model, grid)
    rfmap = cache.get(key)
    if rfmap is None:
        arr = _field(tx, rx_height, rx_gain, model, grid)
        arr.setflags(write=False)
        rfmap = RfMap(arr, tx.frequency)
        with cache._lock:
            cache.misses += 1
        cache.put(key, rfmap)
    return rfmap


def _workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def compute_map(transmitters: Iterable[Emitter], freq_filter: float | None = None,
                rx_height: float = 1.5, rx_gain: float = 0.0,
                model: PropagationModel = PropagationModel(), grid: Grid | None = None,
                cache: MapCache | None = default_cache, workers: int | None = None) -> RfMap:
    """Linear sum of enabled transmitters' fields, optionally one channel only.

    Fields missing from the cache are computed on ``workers`` threads (the
    kernels release the GIL); the sum is always taken in fleet order.
    """
    grid = grid if grid is not None else Grid()
    active = [tx for tx in transmitters
              if tx.enabled and (freq_filter is None or tx.frequency == freq_filter)]
    workers = _workers() if workers is None else workers

    def field_of(tx):
        return single_source_map(tx, rx_height, rx_gain, model, grid, cache).power

    total = np.zeros((grid.height, grid.width))
    if workers > 1 and len(active) > 1:
        with ThreadPoolExecutor(workers) as pool:
            for f in pool.map(field_of, active):
                total += f
    else:
        for tx in active:
            total += field_of(tx)
    return RfMap(total, freq_filter)
