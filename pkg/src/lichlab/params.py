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

# lichlab/params.py
"""Equation parameters, derived constants and the Liouville regime classifier.

Everything here is pure and immutable: `Params` and `ConstantChain` are frozen
dataclasses and every function is a plain computation on floats.
"""
import math
import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np

from .errors import DimensionTooSmall, InvalidExponent, InvalidIota, InvalidParams, OutOfRegime
from .logging import log_message

# Relative tolerance used to recognise the Einstein-scalar exponents
EXPONENT_RTOL = 1e-12

SWEEP_AXES = ('p', 'mu', 'a', 'b', 'kappa', 'R')


def _check_dimension(n: int) -> None:
    if int(n) != n or n < 3:
        raise DimensionTooSmall(f"dimension must be an integer >= 3, got {n}")


@dataclass(frozen=True)
class Params:
    """Coefficients of  Δv + μv + a v^(p+1) + b v^(1-q) = 0  on a ball of radius R."""
    n: int
    mu: float
    a: float
    b: float
    p: float
    q: float
    kappa: float = 0.0
    R: float = 1.0

    def __post_init__(self):
        _check_dimension(self.n)
        if not all(math.isfinite(x) for x in (self.mu, self.a, self.b, self.p, self.q, self.kappa, self.R)):
            raise InvalidParams(f"non-finite parameter in {self}")
        if self.p < -1:
            raise InvalidExponent(f"p must be >= -1, got {self.p}")
        if self.q < 1:
            raise InvalidExponent(f"q must be >= 1, got {self.q}")
        if self.kappa < 0:
            raise InvalidParams(f"kappa must be >= 0, got {self.kappa}")
        if self.R <= 0:
            raise InvalidParams(f"R must be > 0, got {self.R}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Params':
        return cls(
            n=int(data['n']),
            mu=float(data['mu']),
            a=float(data['a']),
            b=float(data['b']),
            p=float(data['p']),
            q=float(data['q']),
            kappa=float(data.get('kappa', 0.0)),
            R=float(data.get('R', 1.0)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    def with_value(self, axis: str, value: float) -> 'Params':
        """Copy with one sweepable field replaced."""
        if axis not in SWEEP_AXES:
            raise InvalidParams(f"'{axis}' is not a parameter field")
        return dataclasses.replace(self, **{axis: float(value)})

    @property
    def critical_p(self) -> float:
        """Upper end 4/(n-1) of the exponent window of the second case."""
        return 4.0 / (self.n - 1)

    @property
    def is_einstein_scalar(self) -> bool:
        """True when (p, q) are the Einstein-scalar field exponents for this n."""
        p_e = 4.0 / (self.n - 2)
        q_e = 4.0 * (self.n - 1) / (self.n - 2)
        return (math.isclose(self.p, p_e, rel_tol=EXPONENT_RTOL)
                and math.isclose(self.q, q_e, rel_tol=EXPONENT_RTOL))


def lambda_exponent(n: int) -> float:
    """Sobolev exponent n/(n-2)."""
    _check_dimension(n)
    return n / (n - 2)


def y_coefficient(n: int, iota: float) -> float:
    """(2(ι-1)(n-1)+n) / (2(2ι-1)), decreasing from n/2 at ι=1 to (n-1)/2 as ι grows."""
    _check_dimension(n)
    if not iota >= 1:
        raise InvalidIota(f"iota must be >= 1, got {iota}")
    if math.isinf(iota):
        return (n - 1) / 2.0
    return (2.0 * (iota - 1) * (n - 1) + n) / (2.0 * (2.0 * iota - 1))


def _slack(n: int, p: float) -> float:
    return 2.0 / (n - 1) - p


def rho(n: int, p: float, iota: float) -> float:
    """ρ(n,p,ι) = 2/(n-1) - y(n,ι)·(2/(n-1) - p)².  May be negative."""
    if p < 0:
        raise InvalidExponent(f"rho needs p >= 0, got {p}")
    s = _slack(n, p)
    return 2.0 / (n - 1) - y_coefficient(n, iota) * s * s


def rho_infinity(n: int, p: float) -> float:
    """Limit of ρ(n,p,ι) as ι grows without bound."""
    _check_dimension(n)
    s = _slack(n, p)
    return 2.0 / (n - 1) - (n - 1) / 2.0 * s * s


def _minimal_iota(n: int, p: float) -> Tuple[float, float]:
    # smallest integer iota with rho(iota) >= rho_inf / 2; rho(iota) = rho_inf - s^2/(2(2 iota - 1))
    rho_inf = rho_infinity(n, p)
    s2 = _slack(n, p) ** 2
    half = 0.5 * rho_inf
    iota = max(1, math.ceil((s2 / rho_inf + 1.0) / 2.0))
    while iota > 1 and rho(n, p, iota - 1) >= half:
        iota -= 1
    while rho(n, p, iota) < half:
        iota += 1
    return float(iota), rho(n, p, iota)


def choose_iota(n: int, p: float, a: Optional[float] = None) -> Tuple[float, float]:
    """Pick (ι, ρ̃) for the reduced Bochner inequality.

    When `a` is given and a·(2/(n-1) - p) >= 0 with p >= -1 the first case applies
    and the answer is (1, 2/(n-1)).  Otherwise the exponent must lie in the open
    window (0, 4/(n-1)) and ι is the smallest integer with ρ(n,p,ι) >= ρ∞/2.
    """
    _check_dimension(n)
    if a is not None and a * _slack(n, p) >= 0 and p >= -1:
        return 1.0, 2.0 / (n - 1)
    if not 0 < p < 4.0 / (n - 1):
        raise OutOfRegime(f"p={p} outside (0, 4/(n-1)) = (0, {4.0 / (n - 1):.6g}) for n={n}")
    iota, tilde_rho = _minimal_iota(n, p)
    log_message(f"choose_iota(n={n}, p={p}) -> iota={iota:g}, tilde_rho={tilde_rho:.6g}", 'debug')
    return iota, tilde_rho


def delta_ratio(mu: float, a: float, b: float) -> float:
    """δ = μ / max{-a, -b} for the negative-μ regime."""
    if a <= 0 or b <= 0:
        raise OutOfRegime(f"negative-mu regime needs a > 0 and b > 0, got a={a}, b={b}")
    lower = max(-a, -b)
    if not lower < mu < 0:
        raise OutOfRegime(f"negative-mu regime needs {lower} < mu < 0, got mu={mu}")
    return mu / lower


def alpha_const(n: int, p: float, delta: float) -> Tuple[float, float]:
    """(ι, α) for the negative-μ regime: the ι rule applied to p/(1-δ)."""
    _check_dimension(n)
    if not 0 < delta < 1:
        raise OutOfRegime(f"delta must lie in (0, 1), got {delta}")
    upper = 4.0 * (1.0 - delta) / (n - 1)
    if not 0 < p < upper:
        raise OutOfRegime(f"p={p} outside (0, {upper:.6g}) for n={n}, delta={delta}")
    return choose_iota(n, p / (1.0 - delta))


class ChainBranch(Enum):
    NONNEGATIVE_MU = 'nonnegative_mu'
    NEGATIVE_MU = 'negative_mu'
    NOMINAL = 'nominal'


@dataclass(frozen=True)
class ConstantChain:
    """Derived constants of the gradient estimate and the iteration schedules.

    For the negative-μ branch `tilde_rho` holds α(n,p,δ), which plays the same role.
    """
    n: int
    kappa: float
    R: float
    branch: ChainBranch
    lam: float
    iota: float
    rho: Optional[float]
    tilde_rho: float
    delta: Optional[float]
    alpha: Optional[float]
    c_n: float
    c_np: float
    theta0: float
    k_max: int = 12
    theta_schedule: Tuple[float, ...] = field(default=(), repr=False)
    radius_schedule: Tuple[float, ...] = field(default=(), repr=False)

    @property
    def theta1(self) -> float:
        return (self.theta0 + 1.0) * self.lam

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data['branch'] = self.branch.value
        data['theta_schedule'] = list(self.theta_schedule)
        data['radius_schedule'] = list(self.radius_schedule)
        return data


def _assemble_chain(n, kappa, R, branch, iota, rho_value, tilde_rho, delta, alpha, c_n, k_max) -> ConstantChain:
    lam = lambda_exponent(n)
    c_np = max(c_n, 2.0 * iota, 16.0 / tilde_rho)
    theta0 = c_np * (1.0 + math.sqrt(kappa) * R)
    thetas, radii = _schedules(n, theta0, R, k_max)
    return ConstantChain(
        n=n, kappa=kappa, R=R, branch=branch, lam=lam, iota=iota, rho=rho_value,
        tilde_rho=tilde_rho, delta=delta, alpha=alpha, c_n=c_n, c_np=c_np, theta0=theta0,
        k_max=k_max, theta_schedule=tuple(thetas.tolist()), radius_schedule=tuple(radii.tolist()),
    )


def build_constant_chain(params: Params, c_n: float, k_max: int = 12) -> ConstantChain:
    """Constants of the estimate for `params`; raises OutOfRegime outside both branches."""
    n, p = params.n, params.p
    if params.mu >= 0 and params.b >= 0:
        iota, tilde_rho = choose_iota(n, p, a=params.a)
        rho_value = rho(n, p, iota) if p >= 0 else None
        return _assemble_chain(n, params.kappa, params.R, ChainBranch.NONNEGATIVE_MU,
                               iota, rho_value, tilde_rho, None, None, c_n, k_max)

    delta = delta_ratio(params.mu, params.a, params.b)
    iota, alpha = alpha_const(n, p, delta)
    return _assemble_chain(n, params.kappa, params.R, ChainBranch.NEGATIVE_MU,
                           iota, None, alpha, delta, alpha, c_n, k_max)


def nominal_chain(n: int, R: float, kappa: float, c_n: float, k_max: int = 12) -> ConstantChain:
    """First-case constants (ι=1, ρ̃=2/(n-1)) for profiles outside every regime."""
    _check_dimension(n)
    tilde_rho = 2.0 / (n - 1)
    return _assemble_chain(n, kappa, R, ChainBranch.NOMINAL, 1.0, tilde_rho, tilde_rho,
                           None, None, c_n, k_max)


def _schedules(n: int, theta0: float, R: float, k_max: int) -> Tuple[np.ndarray, np.ndarray]:
    lam = lambda_exponent(n)
    k = np.arange(1, k_max + 1, dtype=float)
    thetas = (theta0 + 1.0) * lam ** k
    radii = R / 2.0 + R / 4.0 ** k
    return thetas, radii


class Schedule(NamedTuple):
    thetas: np.ndarray
    radii: np.ndarray
    sum_inv: float
    sum_i_inv: float


def iteration_schedule(chain: ConstantChain, k_max: int) -> Schedule:
    """First k_max exponents θ_k and radii r_k with the partial sums Σ1/θ_i and Σi/θ_i."""
    if k_max < 1:
        raise InvalidParams(f"k_max must be >= 1, got {k_max}")
    thetas, radii = _schedules(chain.n, chain.theta0, chain.R, k_max)
    inv = 1.0 / thetas
    idx = np.arange(1, k_max + 1, dtype=float)
    # math.fsum keeps the partial sums exact to the last bit
    return Schedule(thetas, radii, math.fsum(inv), math.fsum(idx * inv))


def series_limits(chain: ConstantChain) -> Tuple[float, float]:
    """Closed forms n/(2θ₁) and n²/(4θ₁) of the two series."""
    n, theta1 = chain.n, chain.theta1
    return n / (2.0 * theta1), n * n / (4.0 * theta1)


def series_tails(chain: ConstantChain, k_max: int) -> Tuple[float, float]:
    """Remainders of both series after k_max terms."""
    x = 1.0 / chain.lam
    theta1 = chain.theta1
    tail_inv = x ** k_max / (1.0 - x) / theta1
    tail_i_inv = ((k_max + 1) * x ** k_max - k_max * x ** (k_max + 1)) / (1.0 - x) ** 2 / theta1
    return tail_inv, tail_i_inv


class Verdict(Enum):
    GRADIENT_BOUND_HOLDS = 'GradientBoundHolds'
    NO_POSITIVE_SOLUTION = 'NoPositiveSolution'
    CONSTANT_ONLY = 'ConstantOnly'
    UNKNOWN = 'Unknown'


@dataclass(frozen=True)
class RegimeReport:
    verdict: Verdict
    theorem_source: Optional[str]
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'verdict': self.verdict.value,
            'theorem_source': self.theorem_source,
            'notes': list(self.notes),
        }


def first_case_holds(params: Params) -> bool:
    return params.a * _slack(params.n, params.p) >= 0 and params.p >= -1


def second_case_holds(params: Params) -> bool:
    return 0 < params.p < params.critical_p


def _gradient_case(params: Params) -> Optional[str]:
    # nonnegative mu and b, then either exponent condition
    if params.mu < 0 or params.b < 0:
        return None
    if first_case_holds(params):
        return 'Thm1-1'
    if second_case_holds(params):
        return 'Thm1-2'
    return None


def _negative_mu_window(params: Params, strict: bool) -> bool:
    try:
        delta = delta_ratio(params.mu, params.a, params.b)
    except OutOfRegime:
        return False
    upper = params.critical_p * (1.0 - delta)
    lower_ok = params.p > 0 if strict else params.p >= 0
    return lower_ok and params.p < upper


def _classify_flat(params: Params) -> RegimeReport:
    mu, a, b, p = params.mu, params.a, params.b, params.p
    nonneg = mu >= 0 and b >= 0

    if params.is_einstein_scalar:
        if a == 0 and nonneg and mu + b != 0:
            return RegimeReport(Verdict.NO_POSITIVE_SOLUTION, 'Thm4-1')
        if a < 0 and mu == 0 and b == 0:
            return RegimeReport(Verdict.NO_POSITIVE_SOLUTION, 'Thm4-2')
        if nonneg and a <= 0:
            return RegimeReport(Verdict.CONSTANT_ONLY, 'Thm3')

    if nonneg:
        if a > 0 and -1 <= p < params.critical_p:
            return RegimeReport(Verdict.NO_POSITIVE_SOLUTION, 'Cor1-1')
        if a == 0 and mu + b != 0:
            return RegimeReport(Verdict.NO_POSITIVE_SOLUTION, 'Cor1-2')
        if a < 0 and mu == 0 and b == 0 and p > 0:
            return RegimeReport(Verdict.NO_POSITIVE_SOLUTION, 'Cor1-3')
        if a < 0 and mu + b != 0 and p > 0:
            return RegimeReport(Verdict.CONSTANT_ONLY, 'Cor1-const')
        source = _gradient_case(params)
        if source is not None:
            return RegimeReport(Verdict.CONSTANT_ONLY, source,
                                ('gradient bound with R -> infinity forces |grad v| = 0',))

    if _negative_mu_window(params, strict=False):
        notes = ()
        if p == 0:
            notes = ('p = 0 is admitted by the nonexistence statement but excluded '
                     'from the matching gradient bound; reported with caveat',)
        return RegimeReport(Verdict.NO_POSITIVE_SOLUTION, 'Cor2', notes)

    return RegimeReport(Verdict.UNKNOWN, None, ('no hypothesis set matches',))


def _classify_curved(params: Params) -> RegimeReport:
    mu, a, b = params.mu, params.a, params.b
    if params.is_einstein_scalar and mu >= 0 and a <= 0 and b >= 0:
        return RegimeReport(Verdict.GRADIENT_BOUND_HOLDS, 'Thm3')
    source = _gradient_case(params)
    if source is not None:
        return RegimeReport(Verdict.GRADIENT_BOUND_HOLDS, source)
    if _negative_mu_window(params, strict=True):
        return RegimeReport(Verdict.GRADIENT_BOUND_HOLDS, 'Thm2')
    return RegimeReport(Verdict.UNKNOWN, None, ('no hypothesis set matches',))


def classify_regime(params: Params) -> RegimeReport:
    """Map a parameter tuple to the estimate or Liouville statement that covers it.

    kappa = 0 is read as the noncompact nonnegative-Ricci setting, so only there
    are nonexistence and constancy verdicts reported.
    """
    report = _classify_flat(params) if params.kappa == 0 else _classify_curved(params)
    log_message(f"classify {params} -> {report.verdict.value} ({report.theorem_source})", 'debug')
    return report
