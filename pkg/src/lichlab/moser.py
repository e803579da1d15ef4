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

# lichlab/moser.py
"""Ball L^θ norms, cutoffs, the θ_k / r_k norm cascade and the ball Sobolev inequality."""
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import suite_seed
from .errors import DomainTooSmall, EmptySuite, GridMismatch, InvalidParams, SolverError, SupportViolation
from .logging import log_message
from .manifold import ModelManifold, RadialFunction, ball_integral, ball_volume
from .params import ConstantChain, iteration_schedule, lambda_exponent
from .solver import LogProfile

SAMPLE_POINTS = 4097


def _power_scaled(values: np.ndarray, theta: float, fmax: float) -> np.ndarray:
    # exp(θ (ln f - ln fmax)) stays in [0, 1] however large θ gets
    with np.errstate(divide='ignore'):
        return np.exp(theta * (np.log(values) - math.log(fmax)))


def lp_norm(m: ModelManifold, f, theta: float, r: float, grid: Optional[np.ndarray] = None) -> float:
    """(∫_{B_r} f^θ)^{1/θ} for f >= 0, sampled on `grid` or given as a callable."""
    if not theta >= 1:
        raise InvalidParams(f"theta must be >= 1, got {theta}")
    if callable(f):
        samples = np.linspace(0.0, r, SAMPLE_POINTS)
        fmax = float(np.max(f(samples)))
        if fmax <= 0:
            return 0.0
        scaled = lambda t: _power_scaled(np.maximum(np.asarray(f(t), dtype=float), 0.0), theta, fmax)
        return fmax * ball_integral(m, scaled, r) ** (1.0 / theta)

    values = np.asarray(f, dtype=float)
    if np.any(values < 0):
        raise InvalidParams("lp_norm needs a nonnegative function")
    if grid is None:
        raise GridMismatch("sampled function given without its grid")
    grid = np.asarray(grid, dtype=float)
    inside = int(np.searchsorted(grid, r, side='right'))
    if inside == 0:
        return 0.0
    fmax = max(float(np.max(values[:inside])), float(np.interp(r, grid, values)))
    if fmax <= 0:
        return 0.0
    # samples past r only feed the last partial cell; capping them keeps the scaled values in [0, 1]
    integral = ball_integral(m, _power_scaled(np.minimum(values, fmax), theta, fmax), r, grid)
    return fmax * max(integral, 0.0) ** (1.0 / theta)


class CascadeEntry(NamedTuple):
    k: int
    theta: float
    radius: float
    norm: float
    normalized: float


@dataclass(frozen=True)
class CascadeResult:
    entries: Tuple[CascadeEntry, ...]
    sup_half_ball: float
    tail_normalized: float
    deviation: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'entries': [e._asdict() for e in self.entries],
            'sup_half_ball': self.sup_half_ball,
            'tail_normalized': self.tail_normalized,
            'deviation': self.deviation,
        }


def norm_cascade(m: ModelManifold, grid: np.ndarray, values: np.ndarray, thetas: Sequence[float],
                 radii: Sequence[float], R: float) -> CascadeResult:
    """Norms ‖h‖_{L^{θ_k}(B_{r_k})} of sampled data and their volume-normalised values."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid[-1] < max(radii) * (1.0 - 1e-12):
        raise DomainTooSmall(f"samples end at r={grid[-1]:.6g}, cascade needs r={max(radii):.6g}")
    entries = []
    for k, (theta, radius) in enumerate(zip(thetas, radii), start=1):
        norm = lp_norm(m, values, float(theta), float(radius), grid)
        normalized = norm / ball_volume(m, float(radius)) ** (1.0 / theta)
        entries.append(CascadeEntry(k, float(theta), float(radius), norm, normalized))

    half = grid <= 0.5 * R * (1.0 + 1e-12)
    sup = float(np.max(values[half]))
    tail = entries[-1].normalized if entries else 0.0
    deviation = abs(tail - sup) / sup if sup > 0 else abs(tail)
    log_message(f"cascade tail {tail:.6g} vs sup {sup:.6g} on B_(R/2): deviation {deviation:.3%}", 'info')
    return CascadeResult(tuple(entries), sup, tail, deviation)


def cascade(m: ModelManifold, lp: LogProfile, chain: ConstantChain, k_max: int) -> CascadeResult:
    """Run the θ_k / r_k schedule of `chain` over f = |∇ln v|² of a solved profile."""
    if lp.grid[-1] < chain.R * (1.0 - 1e-12):
        raise DomainTooSmall(f"profile ends at r={lp.grid[-1]:.6g}, cascade needs [0, {chain.R:.6g}]")
    schedule = iteration_schedule(chain, k_max)
    return norm_cascade(m, lp.grid, lp.f, schedule.thetas, schedule.radii, chain.R)


@dataclass(frozen=True)
class CutoffFunction:
    """Cubic smoothstep plateau: 1 on [0, inner], 0 on [outer, ∞)."""
    k: int
    inner: float
    outer: float

    @property
    def width(self) -> float:
        return self.outer - self.inner

    @property
    def max_slope(self) -> float:
        return 1.5 / self.width

    def _t(self, r):
        return np.clip((self.outer - np.asarray(r, dtype=float)) / self.width, 0.0, 1.0)

    def __call__(self, r):
        t = self._t(r)
        return t * t * (3.0 - 2.0 * t)

    def derivative(self, r):
        t = self._t(r)
        return -6.0 * t * (1.0 - t) / self.width

    def measured_max_slope(self, samples: int = 4001) -> float:
        r = np.linspace(self.inner, self.outer, samples)
        return float(np.max(np.abs(self.derivative(r))))


def build_cutoff(k: int, R: float) -> CutoffFunction:
    """η_k ramping down over [r_{k+1}, r_k] with |η_k'| <= 4^(k+1)/(2R)."""
    if k < 1:
        raise InvalidParams(f"cutoff index must be >= 1, got {k}")
    if not R > 0:
        raise InvalidParams(f"R must be > 0, got {R}")
    cutoff = CutoffFunction(k, R / 2.0 + R / 4.0 ** (k + 1), R / 2.0 + R / 4.0 ** k)
    if cutoff.max_slope > 4.0 ** (k + 1) / R:
        raise SolverError(f"cutoff slope {cutoff.max_slope:.6g} breaks the bound {4.0 ** (k + 1) / R:.6g}")
    return cutoff


def build_base_cutoff(R: float) -> CutoffFunction:
    """η_0: plateau on B_{3R/4}, support in B_R, |η_0'| <= 6/R."""
    if not R > 0:
        raise InvalidParams(f"R must be > 0, got {R}")
    return CutoffFunction(0, 0.75 * R, R)


class IterationInequality(NamedTuple):
    theta: float
    lhs: float
    rhs: float
    holds: bool
    scale: float


def iteration_inequality(m: ModelManifold, lp: LogProfile, chain: ConstantChain,
                         cutoff: CutoffFunction, theta: Optional[float] = None) -> IterationInequality:
    """Both sides of the energy inequality driving one iteration step, divided by fmax^(θ+1).

    lhs = e^{-θ₀} V^{2/n} (∫ f^{(θ+1)λ} η^{2λ})^{1/λ} + 4θρ̃R² ∫ f^{θ+2} η²
    rhs = θ₀² θ ∫ f^{θ+1} η² + 66 R² ∫ f^{θ+1} |η'|²
    """
    R = chain.R
    if lp.grid[-1] < R * (1.0 - 1e-12):
        raise DomainTooSmall(f"profile ends at r={lp.grid[-1]:.6g}, needs [0, {R:.6g}]")
    theta = chain.theta0 if theta is None else float(theta)
    if theta < max(2.0 * chain.iota, 16.0 / chain.tilde_rho):
        raise InvalidParams(f"theta={theta} below max(2 iota, 16/tilde_rho)")

    grid = lp.grid
    mask = grid <= R * (1.0 + 1e-12)
    fmax = float(np.max(lp.f[mask]))
    if fmax <= 0:
        return IterationInequality(theta, 0.0, 0.0, True, 0.0)
    lam = chain.lam
    f = np.minimum(lp.f, fmax)
    eta = cutoff(grid)
    deta = cutoff.derivative(grid)
    base = _power_scaled(f, theta + 1.0, fmax)

    sobolev_part = ball_integral(m, _power_scaled(f, (theta + 1.0) * lam, fmax) * eta ** (2.0 * lam), R, grid)
    volume = ball_volume(m, R)
    lhs = (math.exp(-chain.theta0) * volume ** (2.0 / m.n) * max(sobolev_part, 0.0) ** (1.0 / lam)
           + 4.0 * theta * chain.tilde_rho * R ** 2 * fmax
           * ball_integral(m, _power_scaled(f, theta + 2.0, fmax) * eta ** 2, R, grid))
    rhs = (chain.theta0 ** 2 * theta * ball_integral(m, base * eta ** 2, R, grid)
           + 66.0 * R ** 2 * ball_integral(m, base * deta ** 2, R, grid))
    return IterationInequality(theta, lhs, rhs, lhs <= rhs, fmax)


class SobolevResult(NamedTuple):
    holds: bool
    margin: float
    lhs: float
    rhs: float


def _sobolev_sides(m: ModelManifold, g: RadialFunction, R: float) -> Tuple[float, float]:
    """(∫|g|^{2λ})^{1/λ} and V^{-2/n} R² (∫g'² + R^{-2}∫g²), the c_n-free parts."""
    if g.d1 is None:
        raise InvalidParams("Sobolev check needs the derivative of the test function")
    samples = np.abs(np.asarray(g(np.linspace(0.0, R, SAMPLE_POINTS)), dtype=float))
    gmax = float(np.max(samples))
    if abs(float(g(np.array([R]))[0])) > 1e-12 * max(1.0, gmax):
        raise SupportViolation(f"test function does not vanish at r=R={R}")
    if gmax == 0:
        return 0.0, 0.0
    lam = lambda_exponent(m.n)
    lhs = ball_integral(m, lambda t: np.abs(g(t)) ** (2.0 * lam), R) ** (1.0 / lam)
    energy = ball_integral(m, lambda t: np.asarray(g.d1(t)) ** 2, R)
    mass = ball_integral(m, lambda t: np.asarray(g(t)) ** 2, R)
    base = ball_volume(m, R) ** (-2.0 / m.n) * R ** 2 * (energy + mass / R ** 2)
    return lhs, base


def sobolev_check(m: ModelManifold, g: RadialFunction, R: float, c_n: float) -> SobolevResult:
    """(∫_B g^{2λ})^{1/λ} <= e^{c_n(1+√κR)} V^{-2/n} R² (∫_B|∇g|² + R^{-2}∫_B g²)."""
    lhs, base = _sobolev_sides(m, g, R)
    if base == 0:
        return SobolevResult(True, 1.0, 0.0, 0.0)
    rhs = math.exp(c_n * (1.0 + math.sqrt(m.kappa) * R)) * base
    return SobolevResult(lhs <= rhs, (rhs - lhs) / rhs, lhs, rhs)


def calibrate_sobolev(m: ModelManifold, suite: Sequence, R: float,
                      lower: float = -10.0, tol: float = 1e-4) -> float:
    """Smallest c_n on the lattice lower + j·tol for which every suite member satisfies the inequality."""
    if not suite:
        raise EmptySuite("calibration suite is empty")
    sides = [_sobolev_sides(m, getattr(member, 'g', member), R) for member in suite]
    sides = [(lhs, base) for lhs, base in sides if base > 0]
    growth = 1.0 + math.sqrt(m.kappa) * R

    def holds(j: int) -> bool:
        factor = math.exp((lower + j * tol) * growth)
        return all(lhs <= factor * base for lhs, base in sides)

    if holds(0):
        log_message(f"suite satisfied at the lower bracket c_n={lower}", 'info')
        return lower
    lo, hi = 0, 1
    while not holds(hi):
        lo, hi = hi, hi * 2
        if hi > 2 ** 40:
            raise SolverError("no upper bracket for the Sobolev constant")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    c_star = lower + hi * tol
    log_message(f"calibrated c_n = {c_star:.6g} over {len(suite)} test functions", 'info')
    return c_star


def tightened_constant(c_n: float, fraction: float = 0.1) -> float:
    """c_n moved `fraction` of its magnitude toward a stronger inequality.

    The right-hand side grows with c_n whatever its sign, so tightening always
    lowers it; scaling by (1 - fraction) would loosen a negative constant.
    """
    if not 0 < fraction < 1:
        raise InvalidParams(f"fraction must lie in (0, 1), got {fraction}")
    return c_n - fraction * abs(c_n)


@dataclass(frozen=True)
class SuiteMember:
    name: str
    g: RadialFunction = field(repr=False)
    descriptor: Dict[str, Any] = field(default_factory=dict)


def polynomial_cap(m_power: int, R: float) -> SuiteMember:
    """(1 - (r/R)²)₊^m."""
    def value(r):
        x = np.clip(1.0 - (np.asarray(r, dtype=float) / R) ** 2, 0.0, None)
        return x ** m_power

    def d1(r):
        r = np.asarray(r, dtype=float)
        x = np.clip(1.0 - (r / R) ** 2, 0.0, None)
        return -2.0 * m_power * r / R ** 2 * x ** (m_power - 1) * (x > 0)

    return SuiteMember(f'cap_m{m_power}', RadialFunction(value, d1),
                       {'kind': 'cap', 'power': m_power, 'R': R})


def annular_bump(center: float, width: float) -> SuiteMember:
    """(1 - ((r-c)/w)²)₊³ supported on [c-w, c+w]."""
    def value(r):
        x = np.clip(1.0 - ((np.asarray(r, dtype=float) - center) / width) ** 2, 0.0, None)
        return x ** 3

    def d1(r):
        z = (np.asarray(r, dtype=float) - center) / width
        x = np.clip(1.0 - z ** 2, 0.0, None)
        return -6.0 * z / width * x ** 2

    return SuiteMember(f'bump_c{center:.6f}_w{width:.6f}', RadialFunction(value, d1),
                       {'kind': 'bump', 'center': center, 'width': width})


def standard_bump_suite(R: float = 1.0, count: int = 50, seed: Optional[int] = None,
                        caps: int = 10) -> List[SuiteMember]:
    """`caps` polynomial caps plus seeded annular bumps inside [0, R]."""
    if count < 1:
        raise EmptySuite("suite size must be positive")
    rng = np.random.default_rng(suite_seed() if seed is None else seed)
    members = [polynomial_cap(power, R) for power in range(1, min(caps, count) + 1)]
    while len(members) < count:
        width = float(rng.uniform(0.05, 0.3) * R)
        center = float(rng.uniform(width, R - width))
        members.append(annular_bump(center, width))
    return members


def suite_fingerprint(suite: Sequence[SuiteMember]) -> str:
    """sha256 of the canonical JSON of the member descriptors."""
    payload = json.dumps([member.descriptor for member in suite], sort_keys=True)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()
