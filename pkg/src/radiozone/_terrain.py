"""Obstruction counting along discrete lines of sight.

A link from cell (x0, y0) to cell (x1, y1) is sampled once per cell along
its major axis: with ``n = max(|dx|, |dy|)`` the k-th sample (0 < k < n) sits
in cell ``(x0 + floor((2k*dx + n) / 2n), y0 + floor((2k*dy + n) / 2n))`` and
the sight line there has height ``h0 + k * ((h1 - h0) / n)``. A sample is
obstructed when the cell elevation is strictly above that height. Endpoint
cells are never counted.

``link_obstructions`` walks a single link. ``field_obstructions`` produces the
same counts for every cell of the grid at once: for a fixed target column all
targets share ``n`` and therefore share the sight-line height of each sample,
so each run of equal elevation in a sampled column maps to a contiguous range
of target rows. Those ranges are accumulated with a difference array.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def link_obstructions(elev, x0, y0, x1, y1, h0, h1):
    dx = x1 - x0
    dy = y1 - y0
    n = max(abs(dx), abs(dy))
    count = 0
    if n < 2:
        return 0
    sh = (h1 - h0) / n
    two_n = 2 * n
    for k in range(1, n):
        cx = x0 + (2 * k * dx + n) // two_n
        cy = y0 + (2 * k * dy + n) // two_n
        if elev[cy, cx] > h0 + k * sh:
            count += 1
    return count


@njit(cache=True, nogil=True)
def _major_pass(ptr, r0, r1, rh_, tx, ty, th, rh, n_major, n_minor, strict, transposed, out):
    # out is [minor, major], or [major, minor] when transposed. Loops run over
    # (sampled column, run, target distance n), so the sample index k is fixed
    # per column and the admissible minor range moves linearly with n.
    diff = np.zeros((n_major, n_minor + 1), np.int32)
    touched = np.zeros(n_major, np.bool_)
    sh = np.empty(n_major + 1)
    for n in range(1, n_major + 1):
        sh[n] = (rh - th) / n
    for s in (1, -1):
        n_max = n_major - 1 - tx if s > 0 else tx
        for k in range(1, n_max):
            c = tx + s * k
            q = 2 * k
            for j in range(ptr[c], ptr[c + 1]):
                h = rh_[j]
                a = r0[j] - ty
                b = r1[j] - ty
                n = k + 1
                # lo(n) = ceil(n (2a - 1) / q), hi(n) = ceil(n (2b + 1) / q) - 1, as
                # quotient/remainder pairs P = c q - r stepped by one n at a time
                da = 2 * a - 1
                db = 2 * b + 1
                pa = n * da
                ca = -((-pa) // q)
                ra = ca * q - pa
                pb = n * db
                cb = -((-pb) // q)
                rb = cb * q - pb
                qa = da // q
                sa = da - qa * q
                qb = db // q
                sb = db - qb * q
                while True:
                    if h > th + k * sh[n]:
                        lim = n - 1 if strict else n
                        lo = ca + ty
                        hi = cb - 1 + ty
                        ylo = ty - lim
                        if ylo < 0:
                            ylo = 0
                        yhi = ty + lim
                        if yhi > n_minor - 1:
                            yhi = n_minor - 1
                        if lo < ylo:
                            lo = ylo
                        if hi > yhi:
                            hi = yhi
                        if lo <= hi:
                            xi = tx + s * n
                            diff[xi, lo] += 1
                            diff[xi, hi + 1] -= 1
                            touched[xi] = True
                    if n == n_max:
                        break
                    n += 1
                    ca += qa
                    ra -= sa
                    if ra < 0:
                        ra += q
                        ca += 1
                    cb += qb
                    rb -= sb
                    if rb < 0:
                        rb += q
                        cb += 1
    for x in range(n_major):
        if not touched[x]:
            continue
        acc = 0
        if transposed:
            for y in range(n_minor):
                acc += diff[x, y]
                out[x, y] += acc
        else:
            for y in range(n_minor):
                acc += diff[x, y]
                out[y, x] += acc


def field_obstructions(grid, tx_cell, tx_height, rx_height):
    """Obstructed-sample counts from ``tx_cell`` to every cell center, ``[y, x]``."""
    out = np.zeros((grid.height, grid.width), dtype=np.int32)
    if grid.is_flat:
        return out
    tx, ty = tx_cell
    ptr, r0, r1, h = grid.column_runs
    _major_pass(ptr, r0, r1, h, tx, ty, float(tx_height), float(rx_height),
                grid.width, grid.height, False, False, out)
    ptr, r0, r1, h = grid.row_runs
    _major_pass(ptr, r0, r1, h, ty, tx, float(tx_height), float(rx_height),
                grid.height, grid.width, True, True, out)
    return out


@njit(cache=True, nogil=True)
def scaled_distance2(tx_x, tx_y, dz2, cell_size, d0, out):
    """``(d / d0) ** 2`` from the transmitter to every cell center, floored at 1."""
    h, w = out.shape
    d02 = d0 * d0
    for y in range(h):
        ddy = (y - tx_y) * cell_size
        for x in range(w):
            ddx = (x - tx_x) * cell_size
            d2 = (ddx * ddx + ddy * ddy + dz2) / d02
            out[y, x] = d2 if d2 > 1.0 else 1.0


@njit(cache=True, nogil=True)
def finish_power(gain, scale, cap, counts, table):
    """In place: ``gain * scale * table[counts]`` capped at ``cap``; an empty
    ``counts`` skips the terrain factor."""
    h, w = gain.shape
    use_terrain = counts.shape[0] == h
    for y in range(h):
        for x in range(w):
            g = gain[y, x] * scale
            if use_terrain:
                g *= table[counts[y, x]]
            gain[y, x] = g if g < cap else cap
