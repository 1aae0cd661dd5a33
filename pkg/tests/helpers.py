"""Independent oracles shared by the test modules.

Everything here is deliberately implemented from standard formulas,
not by calling the code under test.
"""

from __future__ import annotations

import math

import numpy as np

# WGS84
_A = 6378137.0
_F = 1.0 / 298.257223563
_B = _A * (1.0 - _F)


def vincenty_distance_m(lat1_deg, lon1_deg, lat2_deg, lon2_deg, tol=1e-12, max_iter=200):
    """Ellipsoidal (WGS84) inverse distance via Vincenty's iteration."""
    phi1, phi2 = math.radians(lat1_deg), math.radians(lat2_deg)
    if lat1_deg == lat2_deg and lon1_deg == lon2_deg:
        return 0.0
    u1 = math.atan((1.0 - _F) * math.tan(phi1))
    u2 = math.atan((1.0 - _F) * math.tan(phi2))
    big_l = math.radians(lon2_deg - lon1_deg)
    sin_u1, cos_u1 = math.sin(u1), math.cos(u1)
    sin_u2, cos_u2 = math.sin(u2), math.cos(u2)

    lam = big_l
    for _ in range(max_iter):
        sin_lam, cos_lam = math.sin(lam), math.cos(lam)
        sin_sigma = math.hypot(
            cos_u2 * sin_lam, cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lam
        )
        if sin_sigma == 0.0:
            return 0.0
        cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lam
        sigma = math.atan2(sin_sigma, cos_sigma)
        sin_alpha = cos_u1 * cos_u2 * sin_lam / sin_sigma
        cos2_alpha = 1.0 - sin_alpha * sin_alpha
        if cos2_alpha == 0.0:
            cos_2sm = 0.0  # equatorial line
        else:
            cos_2sm = cos_sigma - 2.0 * sin_u1 * sin_u2 / cos2_alpha
        c = _F / 16.0 * cos2_alpha * (4.0 + _F * (4.0 - 3.0 * cos2_alpha))
        lam_prev = lam
        lam = big_l + (1.0 - c) * _F * sin_alpha * (
            sigma
            + c * sin_sigma * (cos_2sm + c * cos_sigma * (-1.0 + 2.0 * cos_2sm * cos_2sm))
        )
        if abs(lam - lam_prev) < tol:
            break
    u_sq = cos2_alpha * (_A * _A - _B * _B) / (_B * _B)
    big_a = 1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)))
    big_b = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)))
    delta_sigma = (
        big_b
        * sin_sigma
        * (
            cos_2sm
            + big_b
            / 4.0
            * (
                cos_sigma * (-1.0 + 2.0 * cos_2sm * cos_2sm)
                - big_b
                / 6.0
                * cos_2sm
                * (-3.0 + 4.0 * sin_sigma * sin_sigma)
                * (-3.0 + 4.0 * cos_2sm * cos_2sm)
            )
        )
    )
    return _B * big_a * (sigma - delta_sigma)


def tangent_plane_bearing_rad(lat1_deg, lon1_deg, lat2_deg, lon2_deg):
    """Initial bearing via 3-D unit vectors projected on the local tangent plane."""
    p1 = math.radians(lat1_deg), math.radians(lon1_deg)
    p2 = math.radians(lat2_deg), math.radians(lon2_deg)

    def xyz(lat, lon):
        return np.array(
            [math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)]
        )

    p = xyz(*p1)
    q = xyz(*p2)
    north = np.array(
        [
            -math.sin(p1[0]) * math.cos(p1[1]),
            -math.sin(p1[0]) * math.sin(p1[1]),
            math.cos(p1[0]),
        ]
    )
    east = np.array([-math.sin(p1[1]), math.cos(p1[1]), 0.0])
    tangent = q - p * float(p @ q)
    return math.atan2(float(tangent @ east), float(tangent @ north)) % (2.0 * math.pi)


def destination_point(lat_deg, lon_deg, bearing_rad, distance_m, radius_m=6_371_000.0):
    """Spherical direct problem: end point after ``distance_m`` along a bearing."""
    delta = distance_m / radius_m
    phi1 = math.radians(lat_deg)
    lam1 = math.radians(lon_deg)
    phi2 = math.asin(
        math.sin(phi1) * math.cos(delta)
        + math.cos(phi1) * math.sin(delta) * math.cos(bearing_rad)
    )
    lam2 = lam1 + math.atan2(
        math.sin(bearing_rad) * math.sin(delta) * math.cos(phi1),
        math.cos(delta) - math.sin(phi1) * math.sin(phi2),
    )
    lon_out = math.degrees(lam2)
    if lon_out > 180.0:
        lon_out -= 360.0
    elif lon_out < -180.0:
        lon_out += 360.0
    return math.degrees(phi2), lon_out


def mc_wls_horizontal_cov(azimuths_rad, sigma2_m2, trials, rng):
    """Monte Carlo sample covariance of the horizontal WLS position estimate.

    Draws TOA errors e ~ N(0, diag(sigma2)), solves the linearized WLS
    state estimate x = (G' W G)^-1 G' W e per trial, and returns the
    2x2 sample covariance of the horizontal components.
    """
    az = np.asarray(azimuths_rad, dtype=float)
    s2 = np.asarray(sigma2_m2, dtype=float)
    g = np.column_stack([np.cos(az), np.sin(az), np.ones(az.size)])
    w = 1.0 / s2
    solve_mat = np.linalg.solve(g.T @ (g * w[:, None]), g.T * w[None, :])  # 3 x N
    e = rng.normal(0.0, np.sqrt(s2), size=(trials, az.size))
    x = e @ solve_mat.T
    return np.cov(x[:, 0], x[:, 1])


def grid_search_single_station(snr_linear, toa_var, a_max, b_max, n=241, refine=3):
    """Coarse-to-fine grid search of the single-station RSS in (J^2, C^2) space."""
    x = 1.0 / np.asarray(snr_linear, dtype=float)
    y = np.asarray(toa_var, dtype=float)

    def rss(a, b):
        r = y[None, None, :] - (a[:, :, None] + b[:, :, None] * x[None, None, :])
        return np.sum(r * r, axis=-1)

    a_lo, a_hi = 0.0, a_max
    b_lo, b_hi = 0.0, b_max
    best = None
    for _ in range(refine):
        a_grid = np.linspace(a_lo, a_hi, n)
        b_grid = np.linspace(b_lo, b_hi, n)
        aa, bb = np.meshgrid(a_grid, b_grid, indexing="ij")
        val = rss(aa, bb)
        i, j = np.unravel_index(np.argmin(val), val.shape)
        best = (float(a_grid[i]), float(b_grid[j]), float(val[i, j]))
        da = a_grid[1] - a_grid[0]
        db = b_grid[1] - b_grid[0]
        a_lo, a_hi = max(0.0, a_grid[i] - 2 * da), a_grid[i] + 2 * da
        b_lo, b_hi = max(0.0, b_grid[j] - 2 * db), b_grid[j] + 2 * db
    return best
