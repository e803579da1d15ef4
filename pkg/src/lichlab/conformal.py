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

# lichlab/conformal.py
"""Einstein-scalar field constants and the conformal change of the model metric.

The field equation is written  L φ = β φ^α - σ² φ^(-γ)  with the conformal
Laplacian  L = Δ - c(n) R.  Moving every term to the left gives the general
equation with  μ = -c(n) R,  a = -β,  b = σ²,  p = α - 1,  q = γ + 1.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import numpy as np

from .errors import InvalidParams, NonconstantCurvature, PositivityViolated
from .logging import log_message
from .manifold import ModelManifold, RadialFunction, mean_curvature_coeff, scalar_curvature
from .params import Params, _check_dimension

Number = Union[float, Fraction]

IDENTITY_GRID_POINTS = 2001
# The identity is sampled on [IDENTITY_START * R, R]; the radial Laplacian is singular at 0
IDENTITY_START = 1e-3


def conformal_constants(n: int, exact: bool = False) -> Tuple[Number, Number, Number]:
    """(c(n), α, γ) = ((n-2)/(4(n-1)), (n+2)/(n-2), (3n-2)/(n-2)); Fractions when `exact`."""
    _check_dimension(n)
    n = int(n)
    values = (Fraction(n - 2, 4 * (n - 1)), Fraction(n + 2, n - 2), Fraction(3 * n - 2, n - 2))
    return values if exact else tuple(float(x) for x in values)


def lichnerowicz_exponents(n: int, exact: bool = False) -> Tuple[Number, Number]:
    """(p, q) = (4/(n-2), 4(n-1)/(n-2)), i.e. (α - 1, γ + 1)."""
    _, alpha, gamma = conformal_constants(n, exact=True)
    p, q = alpha - 1, gamma + 1
    return (p, q) if exact else (float(p), float(q))


@dataclass(frozen=True)
class ConformalParams:
    n: int
    beta: float
    sigma2: float
    scalar_curv: Union[float, np.ndarray] = 0.0

    def __post_init__(self):
        _check_dimension(self.n)
        if self.sigma2 < 0:
            raise InvalidParams(f"sigma2 must be >= 0, got {self.sigma2}")

    @property
    def c_conf(self) -> float:
        return float(conformal_constants(self.n, exact=True)[0])

    @property
    def alpha_conf(self) -> float:
        return float(conformal_constants(self.n, exact=True)[1])

    @property
    def gamma_conf(self) -> float:
        return float(conformal_constants(self.n, exact=True)[2])

    def constant_curvature(self) -> float:
        """R̃ as a single number; samples on a ball must all agree."""
        values = np.atleast_1d(np.asarray(self.scalar_curv, dtype=float))
        if values.size == 0 or not np.all(np.isfinite(values)):
            raise NonconstantCurvature("scalar curvature samples are empty or non-finite")
        if np.ptp(values) > 0:
            raise NonconstantCurvature(
                f"scalar curvature varies between {values.min():.6g} and {values.max():.6g}")
        return float(values[0])


def map_to_general_equation(cp: ConformalParams, kappa: float = 0.0, R: float = 1.0) -> Params:
    """Params of  Δv + μv + a v^(p+1) + b v^(1-q) = 0  equivalent to the field equation of `cp`."""
    curvature = cp.constant_curvature()
    p, q = lichnerowicz_exponents(cp.n)
    mu = -cp.c_conf * curvature + 0.0
    params = Params(n=cp.n, mu=mu, a=-cp.beta + 0.0, b=float(cp.sigma2), p=p, q=q, kappa=kappa, R=R)
    log_message(f"field equation n={cp.n} beta={cp.beta} sigma2={cp.sigma2} R~={curvature} "
                f"-> mu={params.mu}, a={params.a}, b={params.b}", 'debug')
    return params


def substitution_gap(cp: ConformalParams, phi: float, kappa: float = 0.0, R: float = 1.0) -> float:
    """|field residual - general residual| for the constant function φ.

    Zero when the sign convention of `map_to_general_equation` is right.
    """
    if not phi > 0:
        raise PositivityViolated(f"substitution needs phi > 0, got {phi}")
    params = map_to_general_equation(cp, kappa, R)
    curvature = cp.constant_curvature()
    field = -cp.c_conf * curvature * phi - (cp.beta * phi ** cp.alpha_conf - cp.sigma2 * phi ** (-cp.gamma_conf))
    general = params.mu * phi + params.a * phi ** (params.p + 1.0) + params.b * phi ** (1.0 - params.q)
    return abs(field - general) / (1.0 + abs(field) + abs(general))


def _derivatives(func: RadialFunction, grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    value = np.asarray(func(grid), dtype=float) * np.ones_like(grid)
    d1 = func.d1(grid) if func.d1 is not None else np.gradient(value, grid, edge_order=2)
    d1 = np.asarray(d1, dtype=float) * np.ones_like(grid)
    d2 = func.d2(grid) if func.d2 is not None else np.gradient(d1, grid, edge_order=2)
    return value, d1, np.asarray(d2, dtype=float) * np.ones_like(grid)


def conformal_identity_residual(m: ModelManifold, u: RadialFunction, phi: RadialFunction, R: float,
                                points: int = IDENTITY_GRID_POINTS) -> float:
    """Max normalised gap of  L_g(uφ) = u^α L_ĝ(φ)  for ĝ = u^(4/(n-2)) g and radial u, φ.

    With ĝ = e^(2w) g, w = 2 ln u/(n-2):
        Δ_ĝ φ = e^(-2w) (φ'' + ((n-2) w' + H) φ')
        R_ĝ   = e^(-2w) (R - 2(n-1) Δ_g w - (n-2)(n-1) w'²)
    where H = (n-1)s'/s.
    """
    if not R > 0:
        raise InvalidParams(f"R must be > 0, got {R}")
    n = m.n
    c_conf, alpha, _ = conformal_constants(n)
    grid = np.linspace(IDENTITY_START * R, R, points)
    u0, u1, u2 = _derivatives(u, grid)
    if np.any(u0 <= 0):
        raise PositivityViolated(f"conformal factor must be positive, min {u0.min():.6g}")
    f0, f1, f2 = _derivatives(phi, grid)

    H = mean_curvature_coeff(m, grid)
    curvature = scalar_curvature(m)

    w1 = 2.0 * u1 / ((n - 2) * u0)
    w2 = 2.0 * (u2 * u0 - u1 ** 2) / ((n - 2) * u0 ** 2)
    scale = u0 ** (-4.0 / (n - 2))  # e^(-2w)
    laplace_w = w2 + H * w1
    curvature_hat = scale * (curvature - 2.0 * (n - 1) * laplace_w - (n - 2) * (n - 1) * w1 ** 2)
    laplace_hat = scale * (f2 + ((n - 2) * w1 + H) * f1)

    prod0 = u0 * f0
    prod1 = u1 * f0 + u0 * f1
    prod2 = u2 * f0 + 2.0 * u1 * f1 + u0 * f2
    lhs = prod2 + H * prod1 - c_conf * curvature * prod0
    rhs = u0 ** alpha * (laplace_hat - c_conf * curvature_hat * f0)

    gap = np.abs(lhs - rhs) / (1.0 + np.abs(lhs) + np.abs(rhs))
    worst = float(np.max(gap))
    log_message(f"conformal identity on [{grid[0]:.3g}, {R:.3g}]: worst gap {worst:.3e}", 'debug')
    return worst


def sigma_transform(sigma2: float, u_value: float, n: int) -> float:
    """σ̂² = u^(-(γ+α)) σ̃², the coefficient after the change ĝ = u^(4/(n-2)) g."""
    if not u_value > 0:
        raise PositivityViolated(f"u must be > 0, got {u_value}")
    if sigma2 < 0:
        raise PositivityViolated(f"sigma2 must be >= 0, got {sigma2}")
    _, alpha, gamma = conformal_constants(n, exact=True)
    return float(sigma2) * math.pow(u_value, -float(alpha + gamma))
