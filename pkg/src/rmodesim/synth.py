"""Synthetic measurement-log generation for tests and demos.

Builds raw phase/SNR logs whose windowed variance reproduces a given
model exactly ("none" noise: a zero-mean pattern scaled so each window's
sample variance hits the target bit-for-bit up to rounding) or
statistically ("gauss" noise: independent normal phases, chi-squared
scatter in the recovered variances). Test tooling, not a claim about
how any real receiver behaves.
"""

from __future__ import annotations

import csv

import numpy as np

from .ingest import MEASUREMENT_COLUMNS, PhaseRecord

TWO_PI = 2.0 * np.pi


def _wrap(phase: np.ndarray) -> np.ndarray:
    """Wrap to [-pi, pi) the way receivers log phase."""
    return np.mod(phase + np.pi, TWO_PI) - np.pi


def synth_station_log(
    station_id: str,
    jitter_m: float,
    c_m: float,
    wavelength_m: float,
    snr_linear,
    window_len: int,
    noise: str = "none",
    rng: np.random.Generator | None = None,
    t0: float = 0.0,
    dt: float = 1.0,
) -> list[PhaseRecord]:
    """Generate one station's log: one window per entry of ``snr_linear``.

    Each window holds ``window_len`` records at the window's SNR, with
    phase variance matching sigma^2 = jitter^2 + C^2/snr scaled into the
    phase domain by (2*pi/wavelength)^2.
    """
    if noise not in ("none", "gauss"):
        raise ValueError(f"noise must be 'none' or 'gauss', got {noise!r}")
    if noise == "gauss" and rng is None:
        raise ValueError("gaussian noise needs an rng")
    snr_values = np.asarray(snr_linear, dtype=float)
    if np.any(snr_values <= 0.0):
        raise ValueError("snr_linear values must be > 0")

    n = int(window_len)
    base = np.empty(n)
    base[0::2] = 1.0
    base[1::2] = -1.0
    if n % 2:
        base[-1] = 0.0  # keeps the pattern zero-mean for odd windows
    base_var = float(np.var(base, ddof=1))

    phase_scale = (TWO_PI / wavelength_m) ** 2  # m^2 -> rad^2
    records = []
    t = t0
    for snr in snr_values:
        sigma2_m2 = jitter_m * jitter_m + c_m * c_m / snr
        phase_var = sigma2_m2 * phase_scale
        if noise == "none":
            phases = base * np.sqrt(phase_var / base_var)
        else:
            phases = rng.normal(0.0, np.sqrt(phase_var), n)
        snr_db = float(10.0 * np.log10(snr))
        for p in _wrap(phases):
            records.append(PhaseRecord(t, station_id, float(p), snr_db))
            t += dt
    return records


def write_measurement_csv(records, path) -> None:
    """Write records in the measurement CSV schema."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(MEASUREMENT_COLUMNS)
        for r in records:
            w.writerow(
                [repr(float(r.timestamp)), r.station_id, repr(float(r.phase_rad)), repr(float(r.snr_db))]
            )
