"""Small numerical kernels shared by the solver and the oracle."""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

_SERIES_CUTOFF = 1e-4


def cos_sinc(z, w):
    """Return ``cos(sqrt(z) w)`` and ``sin(sqrt(z) w) / sqrt(z)``.

    Both are even in ``sqrt(z)``, hence single-valued and entire in ``z``; the
    second one is evaluated by its Taylor series when ``|sqrt(z) w|`` is small.
    """
    z = np.asarray(z, dtype=complex)
    kap = np.sqrt(z)
    u = kap * w
    small = np.abs(u) < _SERIES_CUTOFF
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc = np.where(small, 0.0, np.sin(u) / np.where(small, 1.0, kap))
    u2 = u * u
    sinc = np.where(small, w * (1 - u2 / 6 + u2 * u2 / 120), sinc)
    return np.cos(u), sinc


def scaled_cos_sinc(z, w):
    """:func:`cos_sinc` multiplied by ``exp(-|Im sqrt(z)| w)``, plus that exponent.

    Evanescent regions grow like ``exp(|Im sqrt(z)| w)``; the scaled values stay
    bounded so long chains of regions do not overflow.
    """
    z = np.asarray(z, dtype=complex)
    kap = np.sqrt(z)
    m = np.abs(kap.imag) * w
    ep = np.exp(1j * kap * w - m)
    em = np.exp(-1j * kap * w - m)
    c = 0.5 * (ep + em)
    small = np.abs(kap * w) < _SERIES_CUTOFF
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(small, 0.0, (ep - em) / np.where(small, 1.0, 2j * kap))
    u2 = (kap * w) ** 2
    s = np.where(small, np.exp(-m) * w * (1 - u2 / 6 + u2 * u2 / 120), s)
    return c, s, m


def exprel(z):
    """``expm1(z) / z`` with the removable singularity at 0 filled in."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SERIES_CUTOFF
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(small, 0.0, np.expm1(z) / np.where(small, 1.0, z))
    return np.where(small, 1 + z / 2 + z * z / 6, out)


def scan_real_roots(fn, lo, hi, n, tol, merge=1e-9):
    """Bracket sign changes of a real function on a uniform grid and refine them.

    ``fn`` must accept arrays. Refined roots with ``|fn| >= tol`` are treated as
    sign changes across poles or noise and dropped. Roots closer than
    ``merge * hi`` are merged.
    """
    if hi <= lo:
        return []
    grid = np.linspace(lo, hi, n)
    values = np.asarray(fn(grid), dtype=float)
    roots = []
    for i in np.flatnonzero(values[:-1] * values[1:] <= 0):
        a, b = grid[i], grid[i + 1]
        if values[i] == 0:
            x = a
        elif values[i + 1] == 0:
            x = b
        else:
            x = brentq(lambda t: float(fn(np.array([t]))[0]), a, b,
                       xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        if abs(float(fn(np.array([x]))[0])) < tol:
            if not roots or x - roots[-1] > merge * hi:
                roots.append(x)
    return roots
