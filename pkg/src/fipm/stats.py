"""Field statistics from moment data and oscillation/error metrics.

With an orthonormal basis the mean of each component is its degree-0
coefficient and the variance is the sum of squares of the higher ones
(Parseval).  The oscillation metric integrates squared central second
differences of an error field over a report region,

    delta = sqrt( sum_j dx * ((e_{j-1} - 2 e_j + e_{j+1}) / dx^2)^2 ),

summed over cells whose centers lie in the region; the first and last grid
cells have no two-sided stencil and never contribute.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StatField:
    """Mean and variance per cell and component on a cell-centered grid."""

    x: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    components: tuple[str, ...]

    def __post_init__(self):
        n = self.x.size
        if self.mean.shape != self.var.shape or self.mean.shape[0] != n:
            raise ValueError("mean/var shapes do not match the grid")
        if self.mean.shape[1] != len(self.components):
            raise ValueError("component names do not match the field width")


def stats_from_moments(x, u_hat, components=None) -> StatField:
    """StatField of a moment array u_hat with shape (n_cells, N+1, m)."""
    u_hat = np.asarray(u_hat, dtype=float)
    x = np.asarray(x, dtype=float)
    if u_hat.ndim != 3 or u_hat.shape[0] != x.size:
        raise ValueError(f"expected (n_cells, N+1, m) moments on the grid, got {u_hat.shape}")
    if components is None:
        components = tuple(f"u{k}" for k in range(u_hat.shape[2]))
    mean = u_hat[:, 0, :].copy()
    var = np.sum(u_hat[:, 1:, :] ** 2, axis=1)
    return StatField(x=x, mean=mean, var=var, components=tuple(components))


def check_same_grid(a: StatField, b: StatField):
    if a.x.shape != b.x.shape or not np.allclose(a.x, b.x, rtol=1e-12, atol=1e-12):
        raise ValueError("statistics fields live on different grids")


def second_difference(values, dx):
    """Central second difference at interior points; shape (n-2,)."""
    values = np.asarray(values, dtype=float)
    return (values[:-2] - 2.0 * values[1:-1] + values[2:]) / dx**2


def oscillation_metric(error, x, region):
    """sqrt(sum dx * d2^2) over cells with centers inside the region."""
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        raise ValueError("need at least three cells for a second difference")
    dx = x[1] - x[0]
    d2 = second_difference(error, dx)
    centers = x[1:-1]
    lo, hi = region
    mask = (centers >= lo) & (centers <= hi)
    return float(np.sqrt(np.sum(dx * d2[mask] ** 2)))


def delta_metrics(numeric: StatField, reference: StatField, region, component=0):
    """Oscillation metrics (delta_mean, delta_var) of one component's errors."""
    check_same_grid(numeric, reference)
    d_mean = oscillation_metric(
        numeric.mean[:, component] - reference.mean[:, component], numeric.x, region
    )
    d_var = oscillation_metric(
        numeric.var[:, component] - reference.var[:, component], numeric.x, region
    )
    return d_mean, d_var


def error_norms(numeric: StatField, reference: StatField, component=0):
    """Grid L1 and L2 norms of one component's mean and variance errors."""
    check_same_grid(numeric, reference)
    dx = numeric.x[1] - numeric.x[0]
    e_mean = numeric.mean[:, component] - reference.mean[:, component]
    e_var = numeric.var[:, component] - reference.var[:, component]
    return {
        "l1_mean": float(np.sum(dx * np.abs(e_mean))),
        "l2_mean": float(np.sqrt(np.sum(dx * e_mean**2))),
        "l1_var": float(np.sum(dx * np.abs(e_var))),
        "l2_var": float(np.sqrt(np.sum(dx * e_var**2))),
    }
