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

# lichlab/solver.py
"""Radial shooting for  v'' + c(r) v' + μv + a v^(p+1) + b v^(1-q) = 0,  v(0)=v0, v'(0)=0.

c(r) = (n-1) s'(r)/s(r) is singular at the origin, so integration starts at a
small radius h from a second-order Taylor seed.  Loss of positivity and blow-up
are outcomes of the shot, reported through `SolveStatus`, not exceptions.
"""
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar, newton

from .errors import InvalidParams, PositivityViolated, SolverError, StepFailure
from .logging import log_message
from .manifold import ModelManifold, mean_curvature_coeff, mean_curvature_coeff_derivative
from .params import Params

SCAN_POINTS = 2001
LOG_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    v_floor: float = 1e-10
    v_ceil: float = 1e10
    grid_points: int = 2001
    seed_fraction: float = 1e-4
    method: str = 'DOP853'
    rtol: float = 1e-11
    atol: float = 1e-13

    def __post_init__(self):
        if self.grid_points < 3:
            raise InvalidParams(f"grid_points must be >= 3, got {self.grid_points}")
        if not 0 < self.v_floor < self.v_ceil:
            raise InvalidParams(f"need 0 < v_floor < v_ceil, got {self.v_floor}, {self.v_ceil}")
        if not 0 < self.seed_fraction < 1:
            raise InvalidParams(f"seed_fraction must lie in (0, 1), got {self.seed_fraction}")


class SolveStatus(Enum):
    COMPLETE = 'complete'
    POSITIVITY_LOST = 'positivity_lost'
    BLOWUP = 'blowup'


@dataclass(frozen=True, eq=False)
class SolutionProfile:
    """Radial solution sampled on a uniform grid starting at r = 0."""
    grid: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    ddv: np.ndarray
    params: Params
    manifold: ModelManifold
    status: SolveStatus = SolveStatus.COMPLETE
    r_stop: Optional[float] = None
    dddv: Optional[np.ndarray] = field(default=None, repr=False)
    v0: Optional[float] = None
    # dense interpolant of (v, v') on [seed_radius, r_end], kept for the residual
    dense: Optional[Callable] = field(default=None, repr=False)
    seed_radius: float = 0.0

    @property
    def r_end(self) -> float:
        return float(self.grid[-1])


@dataclass(frozen=True, eq=False)
class LogProfile:
    """u = -ln v and f = |∇u|² = (u')² with derivatives up to the order the estimates need."""
    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    ddu: np.ndarray
    dddu: np.ndarray
    f: np.ndarray
    df: np.ndarray
    ddf: np.ndarray
    params: Params
    manifold: ModelManifold
    equation_residual: float = 0.0

    def reconstruct_v(self) -> np.ndarray:
        return np.exp(-self.u)


def _nonlinearity(params: Params, v):
    return params.mu * v + params.a * v ** (params.p + 1) + params.b * v ** (1 - params.q)


def _nonlinearity_derivative(params: Params, v):
    return params.mu + params.a * (params.p + 1) * v ** params.p + params.b * (1 - params.q) * v ** (-params.q)


def _taylor_coefficient(params: Params, v0: float) -> float:
    # regularity at the origin forces Δv(0) = 2n v2
    return -_nonlinearity(params, v0) / (2.0 * params.n)


def radial_rhs(params: Params, m: ModelManifold, v_floor: float) -> Callable:
    """First-order system y = (v, v') for solve_ivp and the fixed-step integrator."""
    guard = 0.5 * v_floor

    def rhs(r, y):
        v = max(y[0], guard)
        w = y[1]
        return np.array([w, -mean_curvature_coeff(m, r) * w - _nonlinearity(params, v)])

    return rhs


def _check_geometry(params: Params, m: ModelManifold) -> None:
    if params.n != m.n:
        raise InvalidParams(f"params dimension {params.n} differs from manifold dimension {m.n}")


def _second_derivatives(params: Params, m: ModelManifold, grid, v, dv, v2) -> Tuple[np.ndarray, np.ndarray]:
    ddv = np.empty_like(v)
    dddv = np.empty_like(v)
    origin = grid == 0
    inner = ~origin
    r = grid[inner]
    c = mean_curvature_coeff(m, r)
    dc = mean_curvature_coeff_derivative(m, r)
    ddv[inner] = -c * dv[inner] - _nonlinearity(params, v[inner])
    dddv[inner] = -dc * dv[inner] - c * ddv[inner] - _nonlinearity_derivative(params, v[inner]) * dv[inner]
    ddv[origin] = 2.0 * v2
    dddv[origin] = 0.0
    return ddv, dddv


def solve_radial(params: Params, m: ModelManifold, v0: float, R_max: float,
                 opts: Optional[SolverOptions] = None) -> SolutionProfile:
    """Shoot from v(0) = v0 to R_max and resample onto a uniform grid."""
    opts = opts or SolverOptions()
    _check_geometry(params, m)
    if not v0 > 0:
        raise InvalidParams(f"v0 must be > 0, got {v0}")
    if not R_max > 0:
        raise InvalidParams(f"R_max must be > 0, got {R_max}")

    h = opts.seed_fraction * R_max
    v2 = _taylor_coefficient(params, v0)
    y_seed = [v0 + v2 * h * h, 2.0 * v2 * h]

    def floor_event(r, y):
        return y[0] - opts.v_floor
    floor_event.terminal = True
    floor_event.direction = -1

    def ceil_event(r, y):
        return y[0] - opts.v_ceil
    ceil_event.terminal = True
    ceil_event.direction = 1

    log_message(f"Shooting n={params.n} kappa={m.kappa} v0={v0} to R_max={R_max} ({opts.method})", 'debug')
    sol = solve_ivp(radial_rhs(params, m, opts.v_floor), (h, R_max), y_seed,
                    method=opts.method, dense_output=True, events=[floor_event, ceil_event],
                    rtol=opts.rtol, atol=opts.atol)
    if sol.status == -1:
        log_message(f"Integrator failed for {params}: {sol.message}", 'error')
        raise StepFailure(sol.message)

    status = SolveStatus.COMPLETE
    r_stop = None
    if sol.status == 1:
        if sol.t_events[0].size:
            status = SolveStatus.POSITIVITY_LOST
            r_stop = float(sol.t_events[0][0])
        else:
            status = SolveStatus.BLOWUP
            r_stop = float(sol.t_events[1][0])
        log_message(f"Shot stopped at r*={r_stop:.10g}: {status.value}", 'info')

    r_end = float(sol.t[-1])
    grid = np.linspace(0.0, r_end, opts.grid_points)
    v = np.empty_like(grid)
    dv = np.empty_like(grid)
    seeded = grid < h
    v[seeded] = v0 + v2 * grid[seeded] ** 2
    dv[seeded] = 2.0 * v2 * grid[seeded]
    dense = sol.sol(grid[~seeded])
    v[~seeded] = dense[0]
    dv[~seeded] = dense[1]
    if status is SolveStatus.POSITIVITY_LOST:
        v[-1] = max(v[-1], opts.v_floor)

    ddv, dddv = _second_derivatives(params, m, grid, v, dv, v2)
    profile = SolutionProfile(grid=grid, v=v, dv=dv, ddv=ddv, params=params, manifold=m,
                              status=status, r_stop=r_stop, dddv=dddv, v0=v0,
                              dense=sol.sol, seed_radius=h)
    res = residual(profile)
    if res > opts.tol:
        log_message(f"Profile residual {res:.3e} exceeds tolerance {opts.tol:.1e}", 'warning')
    return profile


def _independent_second_derivative(profile: SolutionProfile) -> Tuple[np.ndarray, np.ndarray]:
    """v'' at interior nodes taken from v' alone, never from the equation.

    With a dense interpolant this is a five-point central difference of the
    interpolated v' on a sub-grid stencil; otherwise second-order differences
    of the sampled dv.
    """
    grid = profile.grid
    inner = np.zeros(grid.size, dtype=bool)
    inner[1:-1] = True
    if profile.dense is None:
        return inner, np.gradient(profile.dv, grid, edge_order=2)[inner]
    delta = 0.25 * (grid[1] - grid[0])
    inner &= (grid - 2.0 * delta >= profile.seed_radius) & (grid + 2.0 * delta <= profile.r_end)
    r = grid[inner]

    def dv_at(shift):
        return profile.dense(r + shift * delta)[1]

    ddv = (-dv_at(2.0) + 8.0 * dv_at(1.0) - 8.0 * dv_at(-1.0) + dv_at(-2.0)) / (12.0 * delta)
    return inner, ddv


def residual(profile: SolutionProfile) -> float:
    """Max normalised residual of the equation over interior nodes.

    v'' is recovered from v' independently of the right-hand side, so a
    poorly integrated profile shows up here.
    """
    params = profile.params
    if profile.grid.size < 3:
        return 0.0
    inner, ddv = _independent_second_derivative(profile)
    if not np.any(inner):
        return 0.0
    r = profile.grid[inner]
    v = profile.v[inner]
    if np.any(v <= 0):
        return math.inf
    lap = ddv + mean_curvature_coeff(profile.manifold, r) * profile.dv[inner]
    terms = (params.mu * v, params.a * v ** (params.p + 1), params.b * v ** (1 - params.q))
    scale = 1.0 + sum(np.abs(t) for t in terms)
    return float(np.max(np.abs(lap + sum(terms)) / scale))


@dataclass(frozen=True)
class RootScan:
    """Log-spaced sign scan of g(t) = μ + a t^p + b t^(-q) on [lower, upper]."""
    lower: float
    upper: float
    points: int
    sign_lower: int
    sign_upper: int
    min_abs: float
    argmin: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _constant_equation(params: Params) -> Callable:
    mu, a, b, p, q = params.mu, params.a, params.b, params.p, params.q

    def g(t):
        return mu + a * t ** p + b * t ** (-q)

    return g


def _scan(g: Callable, v_floor: float, v_ceil: float) -> Tuple[np.ndarray, np.ndarray]:
    t = np.logspace(math.log10(v_floor), math.log10(v_ceil), SCAN_POINTS)
    return t, g(t)


def _root_scan(t: np.ndarray, values: np.ndarray) -> RootScan:
    i = int(np.argmin(np.abs(values)))
    return RootScan(lower=float(t[0]), upper=float(t[-1]), points=int(t.size),
                    sign_lower=int(np.sign(values[0])), sign_upper=int(np.sign(values[-1])),
                    min_abs=float(abs(values[i])), argmin=float(t[i]))


def constant_root_scan(params: Params, v_floor: float = 1e-10, v_ceil: float = 1e10) -> RootScan:
    """Scan backing a `None` from `constant_solution`: end signs and the closest approach to zero."""
    return _root_scan(*_scan(_constant_equation(params), v_floor, v_ceil))


def constant_solution(params: Params, v_floor: float = 1e-10, v_ceil: float = 1e10) -> Optional[float]:
    """Positive root of μ + a t^p + b t^(-q), i.e. a constant solution, if one exists."""
    mu, a, b, p, q = params.mu, params.a, params.b, params.p, params.q
    if mu == 0 and a == 0 and b == 0:
        log_message("All coefficients vanish: every constant solves the equation, returning 1.0", 'info')
        return 1.0

    g = _constant_equation(params)

    def dg(t):
        return a * p * t ** (p - 1) - b * q * t ** (-q - 1)

    def d2g(t):
        return a * p * (p - 1) * t ** (p - 2) + b * q * (q + 1) * t ** (-q - 2)

    t, values = _scan(g, v_floor, v_ceil)
    zeros = np.flatnonzero(values == 0)
    if zeros.size:
        return float(t[zeros[0]])

    crossings = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    if crossings.size:
        i = int(crossings[0])
        root = brentq(g, t[i], t[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps)
        try:
            polished = newton(g, root, fprime=dg, tol=1e-14, maxiter=20)
            if t[i] <= polished <= t[i + 1]:
                root = polished
        except (RuntimeError, ZeroDivisionError):
            pass
        return float(root)

    # one sign everywhere: look for a tangential root at the extremum closest to zero
    i = int(np.argmin(np.abs(values)))
    sign = 1.0 if values[i] > 0 else -1.0
    lo = math.log(t[max(i - 1, 0)])
    hi = math.log(t[min(i + 1, t.size - 1)])
    found = minimize_scalar(lambda s: sign * g(math.exp(s)), bounds=(lo, hi), method='bounded',
                            options={'xatol': 1e-14})
    t_star = math.exp(found.x)
    try:
        polished = float(newton(dg, t_star, fprime=d2g, tol=1e-15, maxiter=50))
        if math.isfinite(polished) and polished > 0:
            t_star = polished
    except (RuntimeError, ZeroDivisionError, ValueError):
        pass
    scale = abs(mu) + abs(a) * t_star ** p + abs(b) * t_star ** (-q)
    if abs(g(t_star)) <= 1e-12 * scale:
        return float(t_star)

    scan = _root_scan(t, values)
    log_message(f"No constant solution on [{scan.lower:g}, {scan.upper:g}] ({scan.points} points): "
                f"sign {scan.sign_lower:+d} at both ends, min |g| = {scan.min_abs:.3e} near t = {scan.argmin:.3e}",
                'info')
    return None


def log_transform(profile: SolutionProfile, strict: bool = False) -> LogProfile:
    """Quantities of u = -ln v needed by the pointwise estimates.

    Third derivatives come from the differentiated equation when the profile
    carries them, otherwise from second-order differences of ddv.
    """
    v, dv, ddv = profile.v, profile.dv, profile.ddv
    if np.any(~(v > 0)):
        raise PositivityViolated(f"profile has non-positive values (min {np.min(v):.3e})")
    dddv = profile.dddv
    if dddv is None:
        log_message("Profile has no third derivative, falling back to finite differences", 'debug')
        dddv = np.gradient(ddv, profile.grid, edge_order=2)

    ratio = dv / v
    u = -np.log(v)
    du = -ratio
    ddu = -ddv / v + du ** 2
    dddu = -dddv / v + 3.0 * dv * ddv / v ** 2 - 2.0 * ratio ** 3
    f = du ** 2
    df = 2.0 * du * ddu
    ddf = 2.0 * ddu ** 2 + 2.0 * du * dddu

    lp = LogProfile(grid=profile.grid, u=u, du=du, ddu=ddu, dddu=dddu, f=f, df=df, ddf=ddf,
                    params=profile.params, manifold=profile.manifold,
                    equation_residual=log_equation_residual(profile.grid, u, du, ddu, f,
                                                            profile.params, profile.manifold))
    if lp.equation_residual > LOG_RESIDUAL_TOL:
        message = f"log-transformed equation residual {lp.equation_residual:.3e} above {LOG_RESIDUAL_TOL:g}"
        if strict:
            log_message(message, 'error')
            raise SolverError(message)
        log_message(message, 'warning')
    return lp


def log_equation_residual(grid, u, du, ddu, f, params: Params, m: ModelManifold) -> float:
    """Max normalised residual of  Δu = f + μ + a e^(-pu) + b e^(qu)."""
    inner = grid > 0
    if not np.any(inner):
        return 0.0
    lap = ddu[inner] + mean_curvature_coeff(m, grid[inner]) * du[inner]
    ap = params.a * np.exp(-params.p * u[inner])
    bq = params.b * np.exp(params.q * u[inner])
    rhs = f[inner] + params.mu + ap + bq
    scale = 1.0 + np.abs(lap) + np.abs(f[inner]) + abs(params.mu) + np.abs(ap) + np.abs(bq)
    return float(np.max(np.abs(lap - rhs) / scale))


def rk4_integrate(rhs: Callable, r_span: Tuple[float, float], y0: Sequence[float],
                  steps: int) -> Tuple[np.ndarray, np.ndarray]:
    """Classical fixed-step fourth-order Runge-Kutta."""
    r0, r1 = r_span
    dr = (r1 - r0) / steps
    r = r0 + dr * np.arange(steps + 1)
    y = np.zeros((steps + 1, len(y0)))
    y[0] = y0
    for i in range(steps):
        k1 = rhs(r[i], y[i])
        k2 = rhs(r[i] + dr / 2.0, y[i] + dr * k1 / 2.0)
        k3 = rhs(r[i] + dr / 2.0, y[i] + dr * k2 / 2.0)
        k4 = rhs(r[i] + dr, y[i] + dr * k3)
        y[i + 1] = y[i] + dr * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return r, y


def observed_order(params: Params, m: ModelManifold, v0: float, R_max: float,
                   opts: Optional[SolverOptions] = None, steps: int = 64,
                   start_fraction: float = 0.1,
                   exact: Optional[Callable[[float], Tuple[float, float]]] = None) -> float:
    """Convergence order of fixed-step RK4 under step halving.

    With `exact` (r -> (v, v')) both runs start from the closed form at
    start_fraction·R_max and the error is the largest deviation from it over the
    nodes both runs share.  Without it the adaptive shot from v0 is the
    reference at R_max.  Either way the start sits
    away from the origin singularity.
    """
    opts = opts or SolverOptions()
    if exact is not None:
        r_a = start_fraction * R_max
        y_a = [float(x) for x in exact(r_a)]
        target = None
    else:
        reference = solve_radial(params, m, v0, R_max, opts)
        if reference.status is not SolveStatus.COMPLETE:
            raise SolverError(f"reference shot did not reach R_max: {reference.status.value}")
        i = max(1, int(round(start_fraction * (reference.grid.size - 1))))
        r_a = float(reference.grid[i])
        y_a = [reference.v[i], reference.dv[i]]
        target = reference.v[-1]
    rhs = radial_rhs(params, m, opts.v_floor)

    errors = []
    for count in (steps, 2 * steps):
        r, y = rk4_integrate(rhs, (r_a, R_max), y_a, count)
        if exact is not None:
            # max over the nodes both runs share
            stride = count // steps
            closed = np.array([exact(float(x))[0] for x in r[::stride]])
            errors.append(float(np.max(np.abs(y[::stride, 0] - closed))))
        else:
            errors.append(abs(y[-1, 0] - target))
    if errors[1] == 0:
        raise SolverError("fixed-step error vanished, order is undefined")
    order = math.log2(errors[0] / errors[1])
    log_message(f"RK4 errors {errors[0]:.3e} -> {errors[1]:.3e}, observed order {order:.3f}", 'debug')
    return order
