"""Grid sweeps producing 95% accuracy coverage maps, plus CSV/PGM output.

Cells are independent pure computations, so the sweep can run on a
thread pool; results are assembled by row index and every mode computes
one latitude row per kernel call, which makes the output bitwise
identical for any worker count.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .accuracy import (
    CONDITION_LIMIT,
    MASK_SINGULAR_GEOMETRY,
    MASK_TOO_FEW_STATIONS,
    _condition_sym,
    _inv3_sym,
    _normal_matrix,
)
from .errors import GridTooLargeError
from .geodesy import bearing_rad
from .propagation import NoiseSpec, PropagationSpec, TransmitterStation, snr_db_at
from .variance_model import ModelParams

DEFAULT_CELL_LIMIT = 10_000_000


@dataclass(frozen=True)
class GridSpec:
    """A lat/lon lattice: inclusive bounds and a positive step in degrees.

    Node coordinates are ``min + i * step`` (never accumulated), with
    ``floor((max - min) / step) + 1`` nodes per axis.
    """

    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float
    step_deg: float

    def __post_init__(self):
        if not self.lat_min < self.lat_max:
            raise ValueError(f"lat_min {self.lat_min} must be < lat_max {self.lat_max}")
        if not self.lon_min < self.lon_max:
            raise ValueError(f"lon_min {self.lon_min} must be < lon_max {self.lon_max}")
        if not self.step_deg > 0.0:
            raise ValueError(f"step_deg must be > 0, got {self.step_deg}")

    @property
    def n_lat(self) -> int:
        return math.floor((self.lat_max - self.lat_min) / self.step_deg) + 1

    @property
    def n_lon(self) -> int:
        return math.floor((self.lon_max - self.lon_min) / self.step_deg) + 1

    @property
    def cell_count(self) -> int:
        return self.n_lat * self.n_lon

    def lat_values(self) -> np.ndarray:
        return self.lat_min + np.arange(self.n_lat) * self.step_deg

    def lon_values(self) -> np.ndarray:
        return self.lon_min + np.arange(self.n_lon) * self.step_deg


@dataclass
class CoverageGrid:
    """Sweep results: per-cell accuracy or mask reason, plus diagnostics."""

    spec: GridSpec
    lat_deg: np.ndarray  # (n_lat,)
    lon_deg: np.ndarray  # (n_lon,)
    accuracy_m: np.ndarray  # (n_lat, n_lon), NaN where masked
    usable_count: np.ndarray  # (n_lat, n_lon) int
    mask: np.ndarray  # (n_lat, n_lon) str, "" where unmasked
    station_ids: list[str]
    snr_db: np.ndarray  # (n_stations, n_lat, n_lon)


def _sweep_rows(
    lat_vals: np.ndarray,
    lon_vals: np.ndarray,
    stations: list[TransmitterStation],
    params: ModelParams,
    prop: PropagationSpec,
    noise: NoiseSpec,
    snr_threshold_db: float,
):
    """Evaluate a block of latitude rows; returns per-cell arrays."""
    lat2 = np.broadcast_to(lat_vals[:, None], (lat_vals.size, lon_vals.size))
    lon2 = np.broadcast_to(lon_vals[None, :], (lat_vals.size, lon_vals.size))

    snr_db = np.empty((len(stations),) + lat2.shape)
    az = np.empty_like(snr_db)
    sigma2 = np.empty_like(snr_db)
    c2 = params.c_m * params.c_m
    for k, tx in enumerate(stations):
        snr_db[k] = snr_db_at(tx, lat2, lon2, prop, noise)
        az[k] = bearing_rad(lat2, lon2, tx.position.lat_deg, tx.position.lon_deg)
        j = params.jitter_m[tx.station_id]
        sigma2[k] = j * j + c2 / 10.0 ** (snr_db[k] / 10.0)

    usable = snr_db >= snr_threshold_db
    if np.any(usable & (sigma2 == 0.0)):
        raise ValueError(
            "zero TOA variance for a usable station (jitter and C both zero); "
            "the weighted solution is undefined"
        )
    count = usable.sum(axis=0).astype(np.int64)
    weights = np.divide(1.0, sigma2, out=np.zeros_like(sigma2), where=usable)

    # station axis last for the 3x3 normal-matrix kernels
    m = _normal_matrix(np.moveaxis(az, 0, -1), np.moveaxis(weights, 0, -1))
    too_few = count < 3
    cond = _condition_sym(m)
    singular = ~too_few & ~(cond <= CONDITION_LIMIT)
    ok = ~too_few & ~singular
    # substitute the identity in bad cells so the inverse stays warning-free
    m_safe = np.where(ok[..., None, None], m, np.eye(3))
    k3 = _inv3_sym(m_safe)
    horiz = np.maximum(np.where(ok, k3[..., 0, 0] + k3[..., 1, 1], 0.0), 0.0)
    accuracy = np.where(ok, 2.0 * np.sqrt(horiz), np.nan)
    mask = np.where(too_few, MASK_TOO_FEW_STATIONS, np.where(singular, MASK_SINGULAR_GEOMETRY, ""))
    return accuracy, count, mask, snr_db


def compute_coverage(
    spec: GridSpec,
    stations: list[TransmitterStation],
    params: ModelParams,
    prop: PropagationSpec,
    noise: NoiseSpec,
    snr_threshold_db: float,
    threads: int = 0,
    cell_limit: int = DEFAULT_CELL_LIMIT,
) -> CoverageGrid:
    """Sweep the grid and evaluate accuracy at every cell.

    ``threads`` 0 picks a worker count automatically, 1 runs serially;
    the result is deterministic and identical for any value. Raises
    GridTooLargeError when the grid exceeds ``cell_limit`` cells.
    """
    if len(stations) < 3:
        raise ValueError(f"need >= 3 configured stations, got {len(stations)}")
    if spec.cell_count > cell_limit:
        raise GridTooLargeError(f"{spec.cell_count} cells exceeds the limit of {cell_limit}")
    for tx in stations:
        if tx.station_id not in params.jitter_m:
            raise ValueError(f"no jitter parameter for station {tx.station_id!r}")

    lats = spec.lat_values()
    lons = spec.lon_values()
    accuracy = np.empty((lats.size, lons.size))
    count = np.empty((lats.size, lons.size), dtype=np.int64)
    mask = np.empty((lats.size, lons.size), dtype="<U16")
    snr_db = np.empty((len(stations), lats.size, lons.size))

    def run_row(i: int) -> None:
        acc_i, count_i, mask_i, snr_i = _sweep_rows(
            lats[i : i + 1], lons, stations, params, prop, noise, snr_threshold_db
        )
        accuracy[i] = acc_i[0]
        count[i] = count_i[0]
        mask[i] = mask_i[0]
        snr_db[:, i] = snr_i[:, 0]

    if threads == 1:
        for i in range(lats.size):
            run_row(i)
    else:
        workers = threads if threads > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_row, range(lats.size)))

    return CoverageGrid(
        spec=spec,
        lat_deg=lats,
        lon_deg=lons,
        accuracy_m=accuracy,
        usable_count=count,
        mask=mask,
        station_ids=[tx.station_id for tx in stations],
        snr_db=snr_db,
    )


def coverage_summary(grid: CoverageGrid) -> dict:
    """Cell totals and accuracy stats over the unmasked region."""
    unmasked = grid.mask == ""
    vals = grid.accuracy_m[unmasked]
    return {
        "cells": int(grid.mask.size),
        "unmasked": int(unmasked.sum()),
        "min_accuracy_m": float(vals.min()) if vals.size else None,
        "median_accuracy_m": float(np.median(vals)) if vals.size else None,
    }


def write_coverage_csv(grid: CoverageGrid, path) -> None:
    """Write per-cell rows, latitude ascending then longitude ascending.

    Schema ``lat_deg,lon_deg,accuracy_m,usable_count,mask``: coordinates
    and accuracy carry six fractional digits, a masked cell has an empty
    accuracy field and the mask reason, an unmasked cell an empty mask.
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["lat_deg", "lon_deg", "accuracy_m", "usable_count", "mask"])
        for i, lat in enumerate(grid.lat_deg):
            for j, lon in enumerate(grid.lon_deg):
                masked = grid.mask[i, j] != ""
                w.writerow(
                    [
                        f"{lat:.6f}",
                        f"{lon:.6f}",
                        "" if masked else f"{grid.accuracy_m[i, j]:.6f}",
                        int(grid.usable_count[i, j]),
                        grid.mask[i, j],
                    ]
                )


def read_coverage_csv(path) -> list[tuple[float, float, float | None, int, str]]:
    """Read rows written by :func:`write_coverage_csv`."""
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["lat_deg", "lon_deg", "accuracy_m", "usable_count", "mask"]:
            raise ValueError(f"unexpected header {header}")
        for row in reader:
            lat, lon, acc, count, mask = row
            rows.append((float(lat), float(lon), float(acc) if acc else None, int(count), mask))
    return rows


def write_coverage_pgm(grid: CoverageGrid, path, accuracy_clip_m: float) -> None:
    """Render the map as plain PGM (P2), row 0 at the northernmost latitude.

    Pixel value is ``255 * (1 - min(accuracy, clip) / clip)`` rounded
    half-up, so accuracy 0 is white (255) and anything at or beyond the
    clip is black; masked cells are 0.
    """
    if not accuracy_clip_m > 0.0:
        raise ValueError(f"accuracy_clip_m must be > 0, got {accuracy_clip_m}")
    unmasked = grid.mask == ""
    clipped = np.minimum(np.where(unmasked, grid.accuracy_m, accuracy_clip_m), accuracy_clip_m)
    pix = np.floor(255.0 * (1.0 - clipped / accuracy_clip_m) + 0.5)
    pix = np.where(unmasked, pix, 0.0).astype(np.int64)
    with open(path, "w", encoding="ascii") as f:
        f.write("P2\n")
        f.write(f"{grid.lon_deg.size} {grid.lat_deg.size}\n")
        f.write("255\n")
        for i in range(grid.lat_deg.size - 1, -1, -1):
            f.write(" ".join(str(v) for v in pix[i]) + "\n")


def write_contour_csv(grid: CoverageGrid, path, accuracy_limit_m: float) -> None:
    """Write boundary cells of the region meeting an accuracy limit.

    A cell is on the boundary when it is unmasked with accuracy at or
    under the limit, and at least one 4-neighbor is not (or it sits on
    the grid edge). Schema ``lat_deg,lon_deg``, six fractional digits,
    latitude ascending then longitude.
    """
    if not accuracy_limit_m > 0.0:
        raise ValueError(f"accuracy_limit_m must be > 0, got {accuracy_limit_m}")
    inside = np.zeros(grid.mask.shape, dtype=bool)
    sel = grid.mask == ""
    inside[sel] = grid.accuracy_m[sel] <= accuracy_limit_m
    padded = np.pad(inside, 1, constant_values=False)
    neighbors_all_in = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    boundary = inside & ~neighbors_all_in
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["lat_deg", "lon_deg"])
        for i, j in zip(*np.nonzero(boundary)):
            w.writerow([f"{grid.lat_deg[i]:.6f}", f"{grid.lon_deg[j]:.6f}"])
