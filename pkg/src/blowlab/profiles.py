"""Compactly supported radial data profiles and radial quadrature helpers."""

from __future__ import annotations

import math

import numpy as np

from .params import sphere_area

PROFILE_NAMES = ("bump", "truncatedPoly")


def bump_profile(r, R: float):
    """Smooth bump exp(-1/(1 - (r/R)^2)) inside r < R, zero outside."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < R
    x = r[inside] / R
    out[inside] = np.exp(-1.0 / (1.0 - x * x))
    return out


def truncated_poly_profile(r, R: float):
    """C^3 cutoff polynomial (1 - (r/R)^2)^4 inside r < R, zero outside."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < R
    x = r[inside] / R
    out[inside] = (1.0 - x * x) ** 4
    return out


def get_profile(name: str):
    if name == "bump":
        return bump_profile
    if name == "truncatedPoly":
        return truncated_poly_profile
    raise ValueError(f"unknown profile {name!r}; choose from {PROFILE_NAMES}")


def simpson_weights(npts: int, h: float) -> np.ndarray:
    """Composite Simpson weights on a uniform grid with an even interval count."""
    if npts < 3 or npts % 2 == 0:
        raise ValueError(f"Simpson weights need an odd point count >= 3, got {npts}")
    w = np.ones(npts)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def radial_quadrature(values: np.ndarray, r: np.ndarray, n: int) -> float:
    """Integral of a radial function over R^n: |S^{n-1}| * int f r^{n-1} dr.

    The grid must be uniform; an odd trailing interval is handled with a
    single trapezoid panel.
    """
    npts = len(r)
    if npts < 3:
        raise ValueError("need at least 3 radial samples")
    h = r[1] - r[0]
    weighted = values * r ** (n - 1)
    if npts % 2 == 1:
        total = float(simpson_weights(npts, h) @ weighted)
    else:
        total = float(simpson_weights(npts - 1, h) @ weighted[:-1])
        total += 0.5 * h * (weighted[-2] + weighted[-1])
    return sphere_area(n) * total


def profile_integral(name: str, R: float, n: int, weight=None, npts: int = 513) -> float:
    """Integral of a named profile (optionally times a radial weight) over R^n."""
    r = np.linspace(0.0, R, npts)
    vals = get_profile(name)(r, R)
    if weight is not None:
        vals = vals * np.asarray([weight(float(x)) for x in r])
    return radial_quadrature(vals, r, n)


def perturbation_factor(seed) -> float:
    """Deterministic amplitude jitter for seeded runs; 1.0 when seed is None."""
    if seed is None:
        return 1.0
    rng = np.random.default_rng(int(seed))
    return 1.0 + 0.05 * (2.0 * rng.random() - 1.0)


def theoretical_bump_peak(epsilon: float) -> float:
    """Center value of the scaled bump: epsilon * exp(-1)."""
    return epsilon * math.exp(-1.0)
