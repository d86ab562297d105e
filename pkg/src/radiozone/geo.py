"""Grid geometry, zone membership and obstruction heights."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import Polygon


@dataclass(frozen=True)
class GridPos:
    x: float
    y: float

    def __str__(self) -> str:
        return f"({self.x:g}, {self.y:g})"

    def cell(self) -> tuple[int, int]:
        """Nearest cell index (x, y), rounding halves up."""
        return int(math.floor(self.x + 0.5)), int(math.floor(self.y + 0.5))

    def clamped(self, grid: "Grid") -> "GridPos":
        return GridPos(min(max(self.x, 0.0), grid.width - 1.0),
                       min(max(self.y, 0.0), grid.height - 1.0))


@dataclass(frozen=True, eq=False)
class Grid:
    """Discrete terrain raster.

    ``elevation`` is indexed ``[y, x]`` and holds the obstruction surface
    (terrain plus buildings) in meters above a flat datum. Antenna heights
    are measured against the same datum.
    """

    width: int = 400
    height: int = 400
    cell_size: float = 10.0
    elevation: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("grid dimensions must be positive")
        if self.cell_size <= 0:
            raise ValueError("cell_size must be positive")
        if self.elevation is None:
            elev = np.zeros((self.height, self.width))
        else:
            elev = np.array(self.elevation, dtype=float)
        if elev.shape != (self.height, self.width):
            raise ValueError(f"elevation shape {elev.shape} != ({self.height}, {self.width})")
        if np.any(elev < 0) or not np.all(np.isfinite(elev)):
            raise ValueError("elevation must be finite and non-negative")
        elev.setflags(write=False)
        object.__setattr__(self, "elevation", elev)

    @classmethod
    def from_csv(cls, path: str | Path, cell_size: float = 10.0) -> "Grid":
        """Load a row-major elevation raster (one row per line, meters)."""
        with open(path, newline="") as fh:
            rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
        elev = np.array(rows, dtype=float)
        return cls(width=elev.shape[1], height=elev.shape[0], cell_size=cell_size, elevation=elev)

    def with_buildings(self, blocks: Iterable[Sequence[float]]) -> "Grid":
        """Return a copy with rectangular blocks ``(x0, y0, x1, y1, height_m)`` raised.

        Corners are inclusive cell indices; overlapping blocks keep the taller value.
        """
        elev = np.array(self.elevation)
        for x0, y0, x1, y1, h in blocks:
            xs = slice(max(int(x0), 0), min(int(x1), self.width - 1) + 1)
            ys = slice(max(int(y0), 0), min(int(y1), self.height - 1) + 1)
            elev[ys, xs] = np.maximum(elev[ys, xs], h)
        return Grid(self.width, self.height, self.cell_size, elev)

    def in_bounds(self, pos: GridPos) -> bool:
        return 0 <= pos.x <= self.width - 1 and 0 <= pos.y <= self.height - 1

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(f"{self.width}x{self.height}@{self.cell_size!r}".encode())
        h.update(np.ascontiguousarray(self.elevation).tobytes())
        return h.hexdigest()

    @cached_property
    def is_flat(self) -> bool:
        return not bool(np.any(self.elevation > 0))

    @cached_property
    def column_runs(self) -> tuple[np.ndarray, ...]:
        """Runs of equal positive elevation down each column (CSR layout)."""
        return _runs(self.elevation)

    @cached_property
    def row_runs(self) -> tuple[np.ndarray, ...]:
        """Runs of equal positive elevation along each row (CSR layout)."""
        return _runs(np.ascontiguousarray(self.elevation.T))

    def __hash__(self):
        return hash(self.fingerprint)

    def __eq__(self, other):
        return isinstance(other, Grid) and self.fingerprint == other.fingerprint


def _runs(elev: np.ndarray) -> tuple[np.ndarray, ...]:
    # elev indexed [minor, major]; runs are collected along the minor axis of each major index
    a = np.ascontiguousarray(elev.T)
    n_major, n_minor = a.shape
    first = np.ones_like(a, dtype=bool)
    first[:, 1:] = a[:, 1:] != a[:, :-1]
    last = np.ones_like(a, dtype=bool)
    last[:, :-1] = a[:, :-1] != a[:, 1:]
    pos = a > 0
    sj, si = np.nonzero(first & pos)
    _, ei = np.nonzero(last & pos)
    ptr = np.zeros(n_major + 1, dtype=np.int64)
    ptr[1:] = np.cumsum(np.bincount(sj, minlength=n_major))
    return ptr, si.astype(np.int64), ei.astype(np.int64), a[sj, si].astype(float)


@dataclass(frozen=True)
class ZoneBoundary:
    """Simple polygon in grid coordinates; the boundary itself counts as inside."""

    polygon: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.polygon)
        object.__setattr__(self, "polygon", pts)
        if len(pts) < 3:
            raise ValueError("zone polygon needs at least 3 vertices")
        if not self.shape.is_simple:
            raise ValueError("zone polygon must be simple (non self-intersecting)")

    @classmethod
    def rect(cls, x0: float, y0: float, x1: float, y1: float) -> "ZoneBoundary":
        return cls(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))

    @cached_property
    def shape(self) -> Polygon:
        poly = Polygon(self.polygon)
        shapely.prepare(poly)
        return poly

    def validate(self, grid: Grid) -> None:
        for x, y in self.polygon:
            if not (0 <= x <= grid.width - 1 and 0 <= y <= grid.height - 1):
                raise ValueError(f"zone vertex ({x}, {y}) outside the grid")

    def centroid(self) -> GridPos:
        c = self.shape.centroid
        if c.is_empty:
            x, y = self.polygon[0]
            return GridPos(x, y)
        return GridPos(c.x, c.y)

    def to_list(self) -> list[list[float]]:
        return [[x, y] for x, y in self.polygon]

    def __str__(self) -> str:
        return "zone[" + " ".join(f"({x:g},{y:g})" for x, y in self.polygon) + "]"


def contains(zone: ZoneBoundary, pos: GridPos) -> bool:
    return bool(shapely.intersects_xy(zone.shape, pos.x, pos.y))


@lru_cache(maxsize=64)
def _zone_mask(zone: ZoneBoundary, width: int, height: int) -> np.ndarray:
    ys, xs = np.mgrid[0:height, 0:width]
    mask = shapely.intersects_xy(zone.shape, xs.ravel().astype(float), ys.ravel().astype(float))
    mask = mask.reshape(height, width)
    mask.setflags(write=False)
    return mask


def zone_mask(zone: ZoneBoundary, grid: Grid) -> np.ndarray:
    """Boolean ``[y, x]`` mask of cell centers inside (or on) the zone."""
    return _zone_mask(zone, grid.width, grid.height)


def zone_area(zone: ZoneBoundary, grid: Grid) -> int:
    return int(zone_mask(zone, grid).sum())


def distance_3d(a: GridPos, height_a: float, b: GridPos, height_b: float, grid: Grid) -> float:
    """Straight-line distance in meters between two antennas."""
    dx = (a.x - b.x) * grid.cell_size
    dy = (a.y - b.y) * grid.cell_size
    return math.sqrt(dx * dx + dy * dy + (height_a - height_b) ** 2)
