# Copyright (C) 2025 Targoman Intelligent Processing Co.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

# lichlab/manifold.py
"""Rotationally symmetric space-form models and radial integration on balls.

A model is the metric dr² + s(r)² g_sphere with s(r) = r (Euclidean) or
s(r) = sinh(√κ r)/√κ (hyperbolic, sectional curvature -κ).  Radial functions
are integrated against the volume weight ω_{n-1} s(r)^{n-1}.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import simpson, trapezoid
from scipy.interpolate import CubicSpline
from scipy.special import gamma

from .errors import DimensionTooSmall, GridMismatch, InvalidParams, NegativeRadius, OriginSingularity
from .logging import log_message

ArrayLike = Union[float, np.ndarray]

VOLUME_RTOL = 1e-10
INTEGRAL_RTOL = 1e-8
MAX_REFINEMENTS = 18


class ManifoldKind(Enum):
    EUCLIDEAN = 'euclidean'
    HYPERBOLIC = 'hyperbolic'


@dataclass(frozen=True)
class ModelManifold:
    n: int
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise DimensionTooSmall(f"dimension must be an integer >= 3, got {self.n}")
        if not self.kappa >= 0:
            raise InvalidParams(f"kappa must be >= 0, got {self.kappa}")

    @property
    def kind(self) -> ManifoldKind:
        return ManifoldKind.EUCLIDEAN if self.kappa == 0 else ManifoldKind.HYPERBOLIC

    def to_dict(self):
        return {'n': self.n, 'kappa': self.kappa, 'kind': self.kind.value}


@dataclass(frozen=True)
class RadialFunction:
    """A radial function given analytically: value and optionally its first two derivatives."""
    value: Callable[[np.ndarray], np.ndarray]
    d1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    d2: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, r):
        return self.value(r)


def _as_radius(r: ArrayLike) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise NegativeRadius(f"radius must be >= 0, got min {arr.min()}")
    return arr


def _scalar_or_array(values: np.ndarray, r: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(r) == 0 else values


def warp(m: ModelManifold, r: ArrayLike) -> ArrayLike:
    """s(r): r for Euclidean, sinh(√κ r)/√κ for hyperbolic."""
    arr = _as_radius(r)
    if m.kind is ManifoldKind.EUCLIDEAN:
        out = arr.copy()
    else:
        k = math.sqrt(m.kappa)
        out = np.sinh(k * arr) / k
    return _scalar_or_array(out, r)


def warp_derivative(m: ModelManifold, r: ArrayLike) -> ArrayLike:
    arr = _as_radius(r)
    if m.kind is ManifoldKind.EUCLIDEAN:
        out = np.ones_like(arr)
    else:
        out = np.cosh(math.sqrt(m.kappa) * arr)
    return _scalar_or_array(out, r)


def mean_curvature_coeff(m: ModelManifold, r: ArrayLike) -> ArrayLike:
    """(n-1) s'(r)/s(r), the first-order coefficient of the radial Laplacian."""
    arr = _as_radius(r)
    if np.any(arr == 0):
        raise OriginSingularity("radial Laplacian coefficient is singular at r = 0")
    if m.kind is ManifoldKind.EUCLIDEAN:
        out = (m.n - 1) / arr
    else:
        k = math.sqrt(m.kappa)
        out = (m.n - 1) * k / np.tanh(k * arr)
    return _scalar_or_array(out, r)


def mean_curvature_coeff_derivative(m: ModelManifold, r: ArrayLike) -> ArrayLike:
    """d/dr of mean_curvature_coeff."""
    arr = _as_radius(r)
    if np.any(arr == 0):
        raise OriginSingularity("radial Laplacian coefficient is singular at r = 0")
    if m.kind is ManifoldKind.EUCLIDEAN:
        out = -(m.n - 1) / arr ** 2
    else:
        k = math.sqrt(m.kappa)
        out = -(m.n - 1) * m.kappa / np.sinh(k * arr) ** 2
    return _scalar_or_array(out, r)


def sphere_area(n: int) -> float:
    """Area ω_{n-1} = 2π^{n/2}/Γ(n/2) of the unit (n-1)-sphere."""
    return float(2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0))


def scalar_curvature(m: ModelManifold) -> float:
    """Constant scalar curvature of the model, -n(n-1)κ."""
    return -m.n * (m.n - 1) * m.kappa + 0.0


def _refined_simpson(func: Callable[[np.ndarray], np.ndarray], r: float, rtol: float) -> float:
    """Composite Simpson on [0, r], doubling the node count until the Richardson estimate is below rtol."""
    intervals = 64
    t = np.linspace(0.0, r, intervals + 1)
    previous = simpson(func(t), x=t)
    for _ in range(MAX_REFINEMENTS):
        intervals *= 2
        t = np.linspace(0.0, r, intervals + 1)
        current = simpson(func(t), x=t)
        error = abs(current - previous) / 15.0
        if error <= rtol * max(abs(current), 1e-300):
            return float(current + (current - previous) / 15.0)
        previous = current
    log_message(f"Simpson refinement stopped at {intervals} intervals (rtol {rtol:g})", 'warning')
    return float(current)


def ball_volume(m: ModelManifold, r: float) -> float:
    """Volume ω_{n-1} ∫₀^r s(t)^{n-1} dt of the geodesic ball of radius r."""
    _as_radius(r)
    if r == 0:
        return 0.0
    omega = sphere_area(m.n)
    if m.kind is ManifoldKind.EUCLIDEAN:
        return omega * r ** m.n / m.n
    return omega * _refined_simpson(lambda t: np.asarray(warp(m, t)) ** (m.n - 1), r, VOLUME_RTOL)


def integrate_sampled(grid: np.ndarray, values: np.ndarray, r: float) -> float:
    """∫₀^r of samples on `grid`: Simpson over whole nodes, spline over the last partial cell."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.shape != values.shape or grid.ndim != 1:
        raise GridMismatch(f"grid and samples differ in shape: {grid.shape} vs {values.shape}")
    if grid.size < 2 or abs(grid[0]) > 1e-12 * max(r, 1.0) or grid[-1] < r * (1.0 - 1e-12):
        raise GridMismatch(f"grid [{grid[0] if grid.size else None}, {grid[-1] if grid.size else None}] "
                           f"does not cover [0, {r}]")
    if r <= 0:
        return 0.0
    j = int(np.searchsorted(grid, r, side='right'))
    if j >= 3:
        total = float(simpson(values[:j], x=grid[:j]))
    else:
        total = float(trapezoid(values[:j], x=grid[:j]))
    r_last = grid[j - 1]
    if r - r_last > 1e-14 * r and j < grid.size:
        lo, hi = max(0, j - 2), min(grid.size, j + 2)
        if hi - lo >= 3:
            total += float(CubicSpline(grid[lo:hi], values[lo:hi]).integrate(r_last, r))
        else:
            total += 0.5 * (r - r_last) * (values[j - 1] + np.interp(r, grid, values))
    return total


def ball_integral(m: ModelManifold, h, r: float, grid: Optional[np.ndarray] = None) -> float:
    """ω_{n-1} ∫₀^r h(t) s(t)^{n-1} dt.

    `h` is either a callable (integrated with refined Simpson) or an array of
    samples on `grid`, which must start at 0 and reach r.
    """
    _as_radius(r)
    omega = sphere_area(m.n)
    if callable(h):
        if r == 0:
            return 0.0
        weight = lambda t: np.asarray(h(t), dtype=float) * np.asarray(warp(m, t)) ** (m.n - 1)
        return omega * _refined_simpson(weight, r, INTEGRAL_RTOL)
    if grid is None:
        raise GridMismatch("sampled integrand given without its grid")
    samples = np.asarray(h, dtype=float)
    weight = samples * np.asarray(warp(m, np.asarray(grid, dtype=float))) ** (m.n - 1)
    return omega * integrate_sampled(grid, weight, r)
