"""Independent reference computations used by the tests."""
from __future__ import annotations

import math

import numpy as np


def stepped_exit_time(xi, vi, xj, vj, h, dy=0.0, dt=0.01, limit=10_000.0):
    """First time the stepped pair is farther apart than ``h``, or None."""
    t = 0.0
    k = 0
    while t < limit:
        k += 1
        t = k * dt
        if math.hypot((xi + vi * t) - (xj + vj * t), dy) > h:
            return t
    return None


def relative_exit_time(xi, vi, xj, vj, h):
    """Collinear exit time from the relative gap g(t) = g0 + dv*t reaching |g| = h."""
    g0, dv = xi - xj, vi - vj
    if dv == 0:
        return math.inf
    # the gap leaves [-h, h] through +h if it grows, through -h if it shrinks
    return (h - g0) / dv if dv > 0 else (-h - g0) / dv


def cosine(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(a @ b / (na * nb))


def stepped_exit_time_np(xi, vi, xj, vj, h, dy=0.0, dt=0.01, limit=2000.0):
    """Vectorised :func:`stepped_exit_time` for long horizons."""
    k = np.arange(1, int(limit / dt) + 2, dtype=np.int64)
    t = k * dt
    gap = np.hypot((xi + vi * t) - (xj + vj * t), dy)
    idx = np.flatnonzero(gap > h)
    return float(t[idx[0]]) if idx.size else None


def eq_link_durations(x, y, v, h):
    """Expected link duration matrix from the four motion cases, vectorised.

    theta = -1 when the longitudinal gap is closing, +1 otherwise; vartheta = +1
    for a common direction of travel, -1 for opposite directions.  Pairs out of
    range are NaN, zero relative speed is +inf.
    """
    x, y, v = (np.asarray(a, float) for a in (x, y, v))
    dx = x[:, None] - x[None, :]
    dv = v[:, None] - v[None, :]
    dist = np.hypot(dx, y[:, None] - y[None, :])
    theta = np.where(dx * dv < 0, -1.0, 1.0)
    vartheta = np.where(v[:, None] * v[None, :] < 0, -1.0, 1.0)
    denom = np.abs(np.abs(v)[:, None] - vartheta * np.abs(v)[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        et = np.where(denom == 0, np.inf, (h - theta * dist) / denom)
    return np.where(dist <= h, et, np.nan), dist


def cosine_matrix(bits):
    b = np.asarray(bits, float)
    norms = np.linalg.norm(b, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sim = (b @ b.T) / np.outer(norms, norms)
    return np.nan_to_num(sim, nan=0.0)
