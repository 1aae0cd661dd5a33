"""Weighted least-squares position covariance and 95% horizontal accuracy.

Each usable station contributes one row [cos(theta), sin(theta), 1] to the
geometry matrix G, with theta its azimuth clockwise from north; the state
columns are then (north error, east error, receiver clock). With R the
diagonal of per-station TOA variances, the position-error covariance is
K = (G' R^-1 G)^-1 and the 95% horizontal accuracy is 2*sqrt(K11 + K22),
the two horizontal diagonal entries. This is repeatable accuracy: the
solution is assumed unbiased, with propagation-delay biases corrected
elsewhere.

Any azimuth convention gives the same accuracy (the horizontal trace is
rotation invariant); the formulas hold verbatim for any N >= 3 stations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularGeometryError, TooFewStationsError
from .geodesy import GeoPoint, azimuth
from .propagation import NoiseSpec, PropagationSpec, TransmitterStation, snr_at
from .variance_model import ModelParams, predict_sigma2

CONDITION_LIMIT = 1e12  # normal-matrix condition number above which geometry is singular

MASK_TOO_FEW_STATIONS = "TooFewStations"
MASK_SINGULAR_GEOMETRY = "SingularGeometry"


def geometry_matrix(azimuths_rad) -> np.ndarray:
    """N x 3 geometry matrix with rows [cos(theta_i), sin(theta_i), 1]."""
    az = np.asarray(azimuths_rad, dtype=float)
    if az.ndim != 1 or az.size < 3:
        raise TooFewStationsError(f"need >= 3 azimuths, got {az.size}")
    if not np.all(np.isfinite(az)):
        raise ValueError("azimuths must be finite")
    return np.column_stack([np.cos(az), np.sin(az), np.ones(az.size)])


def _normal_matrix(az_rad: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """G' R^-1 G summed over the trailing station axis.

    ``az_rad`` and ``weights`` share shape (..., N); a zero weight drops
    a station. Returns shape (..., 3, 3).
    """
    c = np.cos(az_rad)
    s = np.sin(az_rad)
    m = np.empty(az_rad.shape[:-1] + (3, 3))
    m[..., 0, 0] = np.sum(weights * c * c, axis=-1)
    m[..., 0, 1] = np.sum(weights * c * s, axis=-1)
    m[..., 0, 2] = np.sum(weights * c, axis=-1)
    m[..., 1, 1] = np.sum(weights * s * s, axis=-1)
    m[..., 1, 2] = np.sum(weights * s, axis=-1)
    m[..., 2, 2] = np.sum(weights, axis=-1)
    m[..., 1, 0] = m[..., 0, 1]
    m[..., 2, 0] = m[..., 0, 2]
    m[..., 2, 1] = m[..., 1, 2]
    return m


def _inv3_sym(m: np.ndarray) -> np.ndarray:
    """Adjugate inverse of symmetric 3x3 matrices, batched over leading axes."""
    a, b, c = m[..., 0, 0], m[..., 0, 1], m[..., 0, 2]
    d, e, f = m[..., 1, 1], m[..., 1, 2], m[..., 2, 2]
    cof00 = d * f - e * e
    cof01 = c * e - b * f
    cof02 = b * e - c * d
    cof11 = a * f - c * c
    cof12 = b * c - a * e
    cof22 = a * d - b * b
    det = a * cof00 + b * cof01 + c * cof02
    k = np.empty_like(m)
    k[..., 0, 0] = cof00 / det
    k[..., 0, 1] = k[..., 1, 0] = cof01 / det
    k[..., 0, 2] = k[..., 2, 0] = cof02 / det
    k[..., 1, 1] = cof11 / det
    k[..., 1, 2] = k[..., 2, 1] = cof12 / det
    k[..., 2, 2] = cof22 / det
    return k


def _condition_sym(m: np.ndarray) -> np.ndarray:
    """2-norm condition number of symmetric matrices; inf when singular."""
    lam = np.abs(np.linalg.eigvalsh(m))
    lo = lam[..., 0]
    hi = lam[..., -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(lo > 0.0, hi / np.where(lo > 0.0, lo, 1.0), np.inf)


def covariance(azimuths_rad, sigma2_m2) -> np.ndarray:
    """Position-error covariance K = (G' R^-1 G)^-1, a symmetric PSD 3x3.

    ``sigma2_m2`` holds each station's TOA variance in m^2 and must be
    positive. Raises SingularGeometryError when the normal matrix has
    condition number above ``CONDITION_LIMIT`` (collinear or duplicate
    azimuths).
    """
    az = np.asarray(azimuths_rad, dtype=float)
    s2 = np.asarray(sigma2_m2, dtype=float)
    if az.ndim != 1 or az.size < 3:
        raise TooFewStationsError(f"need >= 3 azimuths, got {az.size}")
    if s2.shape != az.shape:
        raise ValueError(f"sigma2 shape {s2.shape} does not match azimuths {az.shape}")
    if not np.all(s2 > 0.0):
        raise ValueError("all sigma2 must be > 0")
    m = _normal_matrix(az, 1.0 / s2)
    cond = float(_condition_sym(m))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularGeometryError(f"normal matrix condition {cond:.3e} exceeds {CONDITION_LIMIT:.0e}")
    return _inv3_sym(m)


def accuracy95(k: np.ndarray) -> float:
    """95% horizontal accuracy in meters: 2*sqrt(K11 + K22)."""
    k = np.asarray(k, dtype=float)
    return float(2.0 * np.sqrt(k[0, 0] + k[1, 1]))


@dataclass(frozen=True)
class StationAccuracy:
    """Per-station diagnostics at one query point."""

    station_id: str
    snr_db: float
    snr_linear: float
    sigma2_m2: float
    azimuth_rad: float
    usable: bool


@dataclass(frozen=True)
class PointAccuracy:
    """Accuracy (or the mask reason) at one query point."""

    accuracy_m: float | None
    mask_reason: str | None
    usable_count: int
    stations: list[StationAccuracy]

    @property
    def masked(self) -> bool:
        return self.mask_reason is not None


def accuracy_at(
    p: GeoPoint,
    stations: list[TransmitterStation],
    params: ModelParams,
    prop: PropagationSpec,
    noise: NoiseSpec,
    snr_threshold_db: float,
) -> PointAccuracy:
    """Evaluate 95% horizontal accuracy at one point.

    Stations below the SNR threshold are dropped. Fewer than three
    usable stations, or a singular geometry, masks the point instead of
    raising.
    """
    if not stations:
        raise ValueError("stations must be non-empty")
    diags = []
    for tx in stations:
        snr_db, snr_linear = snr_at(tx, p, prop, noise)
        diags.append(
            StationAccuracy(
                station_id=tx.station_id,
                snr_db=snr_db,
                snr_linear=snr_linear,
                sigma2_m2=predict_sigma2(params, tx.station_id, snr_linear),
                azimuth_rad=azimuth(p, tx.position),
                usable=snr_db >= snr_threshold_db,
            )
        )
    usable = [d for d in diags if d.usable]
    if len(usable) < 3:
        return PointAccuracy(None, MASK_TOO_FEW_STATIONS, len(usable), diags)
    try:
        k = covariance([d.azimuth_rad for d in usable], [d.sigma2_m2 for d in usable])
    except SingularGeometryError:
        return PointAccuracy(None, MASK_SINGULAR_GEOMETRY, len(usable), diags)
    return PointAccuracy(accuracy95(k), None, len(usable), diags)
