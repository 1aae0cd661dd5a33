"""Receiver log ingestion: CSV parsing, phase unwrapping, windowed variance.

Turns raw wrapped-phase/SNR logs into per-window TOA-variance samples.
The TOA variance of a window is the sample variance of the continuous
(unwrapped) carrier phase scaled by (wavelength / 2*pi)^2.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyInputError,
    InsufficientDataError,
    ParseError,
)

MEASUREMENT_COLUMNS = ("timestamp", "station_id", "phase_rad", "snr_db")

DEFAULT_WINDOW_LEN = 100  # records per variance window
DEFAULT_WAVELENGTH_M = 299_792_458.0 / 300_000.0  # 300 kHz carrier
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseRecord:
    """One logged carrier-phase observation.

    Phase is wrapped to [-pi, pi) as receivers log it; SNR is the
    receiver-reported value in dB.
    """

    timestamp: float
    station_id: str
    phase_rad: float
    snr_db: float


@dataclass(frozen=True)
class VarianceSample:
    """One (station, linear SNR, TOA variance) observation."""

    station_id: str
    snr_linear: float
    toa_var_m2: float

    def __post_init__(self):
        if not self.snr_linear > 0.0:
            raise ValueError(f"snr_linear must be > 0, got {self.snr_linear}")
        if self.toa_var_m2 < 0.0:
            raise ValueError(f"toa_var_m2 must be >= 0, got {self.toa_var_m2}")


def parse_measurement_file(path) -> list[PhaseRecord]:
    """Parse a measurement CSV into PhaseRecords, in file order.

    Schema: header ``timestamp,station_id,phase_rad,snr_db``, one record
    per line, ``.`` decimal separator, UTF-8. Lines starting with ``#``
    are comments. Timestamps must be strictly increasing per station.

    Raises FileNotFoundError for a missing file and
    ParseError (with the 1-based line number) for a malformed
    header, non-numeric fields, missing columns, or a timestamp that
    does not increase.
    """
    path = Path(path)
    records: list[PhaseRecord] = []
    last_t: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8") as f:
        header = None
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row or (row[0].lstrip().startswith("#")):
                continue
            if header is None:
                header = tuple(c.strip() for c in row)
                if header != MEASUREMENT_COLUMNS:
                    raise ParseError(
                        lineno, f"expected header {','.join(MEASUREMENT_COLUMNS)}"
                    )
                continue
            if len(row) != len(MEASUREMENT_COLUMNS):
                raise ParseError(
                    lineno, f"expected {len(MEASUREMENT_COLUMNS)} fields, got {len(row)}"
                )
            t_str, station_id, phase_str, snr_str = (c.strip() for c in row)
            if not station_id:
                raise ParseError(lineno, "empty station_id")
            try:
                t = float(t_str)
                phase = float(phase_str)
                snr = float(snr_str)
            except ValueError as exc:
                raise ParseError(lineno, f"non-numeric field: {exc}") from None
            if not (np.isfinite(t) and np.isfinite(phase) and np.isfinite(snr)):
                raise ParseError(lineno, "non-finite field")
            if station_id in last_t and t <= last_t[station_id]:
                raise ParseError(
                    lineno, f"timestamp {t} not increasing for station {station_id}"
                )
            last_t[station_id] = t
            records.append(PhaseRecord(t, station_id, phase, snr))
        if header is None:
            raise ParseError(1, "empty file, missing header")
    return records


def group_by_station(records) -> dict[str, list[PhaseRecord]]:
    """Split records into per-station lists, preserving order."""
    groups: dict[str, list[PhaseRecord]] = {}
    for rec in records:
        groups.setdefault(rec.station_id, []).append(rec)
    return groups


def unwrap_phase(wrapped) -> np.ndarray:
    """Remove 2*pi jumps so every successive difference lies in (-pi, pi].

    The first element is kept as-is and the output is congruent to the
    input modulo 2*pi, element by element.
    """
    w = np.asarray(wrapped, dtype=float)
    if w.size == 0:
        raise EmptyInputError("cannot unwrap an empty phase series")
    d = np.diff(w)
    k = np.floor((np.pi - d) / TWO_PI)
    out = np.empty_like(w)
    out[0] = w[0]
    out[1:] = w[0] + np.cumsum(d + TWO_PI * k)
    return out


def window_variance(
    records,
    window_len: int = DEFAULT_WINDOW_LEN,
    wavelength_m: float = DEFAULT_WAVELENGTH_M,
    detrend: str = "none",
) -> list[VarianceSample]:
    """Convert a single station's phase records into TOA-variance samples.

    The phase series is unwrapped once over the whole series, then split
    into consecutive non-overlapping windows of ``window_len`` records
    (any remainder is discarded). Each window yields one sample:

    * ``toa_var_m2`` = (wavelength / 2*pi)^2 times the sample variance
      (denominator n-1) of the continuous phase;
    * ``snr_linear`` = 10^(mean(snr_db)/10), the dB mean converted to a
      linear power ratio.

    ``detrend="linear"`` removes a per-window least-squares line (a
    receiver clock ramp) before the variance; the residual variance then
    uses denominator n-2. Off by default.

    Records must be time-sorted and from one station. Raises
    InsufficientDataError when there are fewer than ``window_len``
    records.
    """
    if window_len < 2:
        raise ValueError(f"window_len must be >= 2, got {window_len}")
    if wavelength_m <= 0.0:
        raise ValueError(f"wavelength_m must be > 0, got {wavelength_m}")
    if detrend not in ("none", "linear"):
        raise ValueError(f"detrend must be 'none' or 'linear', got {detrend!r}")
    if detrend == "linear" and window_len < 3:
        raise ValueError("linear detrend needs window_len >= 3")
    records = list(records)
    if len(records) < window_len:
        raise InsufficientDataError(
            f"{len(records)} records, need at least window_len={window_len}"
        )
    station_ids = {r.station_id for r in records}
    if len(station_ids) != 1:
        raise ValueError(f"records span multiple stations: {sorted(station_ids)}")
    station_id = records[0].station_id

    phase = unwrap_phase([r.phase_rad for r in records])
    snr_db = np.array([r.snr_db for r in records])
    scale = (wavelength_m / TWO_PI) ** 2

    n_windows = len(records) // window_len
    samples = []
    for i in range(n_windows):
        sl = slice(i * window_len, (i + 1) * window_len)
        # anchoring on the first element keeps the variance well
        # conditioned when the mean phase dwarfs its scatter
        p = phase[sl] - phase[sl.start]
        if detrend == "linear":
            t = np.arange(window_len, dtype=float)
            coef = np.polynomial.polynomial.polyfit(t, p, 1)
            resid = p - np.polynomial.polynomial.polyval(t, coef)
            var = float(resid @ resid) / (window_len - 2)
        else:
            var = float(np.var(p, ddof=1))
        snr_linear = float(10.0 ** (np.mean(snr_db[sl]) / 10.0))
        samples.append(VarianceSample(station_id, snr_linear, scale * var))
    return samples
