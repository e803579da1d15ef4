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

# lichlab/verifier.py
"""Pointwise Bochner-type inequalities and gradient bounds evaluated on radial log profiles.

For radial data Δg = g'' + c(r) g', |∇f|² = f'² and ⟨∇u, ∇f⟩ = u'f', so the
left side  Δ(f^ι)/(ι f^(ι-1))  is  (ι-1) f'²/f + f'' + c f'.  Margins are
normalised as (LHS - RHS) / (1 + |LHS| + |RHS|).
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .errors import DomainTooSmall, InvalidIota, InvalidParams, OutOfRegime
from .logging import log_message
from .manifold import mean_curvature_coeff
from .params import (ChainBranch, ConstantChain, Params, build_constant_chain, first_case_holds, rho,
                     second_case_holds, y_coefficient)
from .solver import LogProfile

F_SKIP = 1e-8
LEMMA_TOLERANCE = 1e-6
BOUND_TOLERANCE = 1e-12


class LemmaId(Enum):
    L2_1 = 'L2_1'
    L2_2_CASE1 = 'L2_2_case1'
    L2_2_CASE2 = 'L2_2_case2'
    L2_3 = 'L2_3'
    L4_1 = 'L4_1'
    GRADIENT_BOUND = 'GradientBound'


@dataclass(frozen=True)
class CheckReport:
    lemma_id: LemmaId
    points_checked: int
    points_skipped_f_zero: int
    worst_margin: float
    passed: bool
    tolerance: float
    worst_r: Optional[float] = None
    sub_reports: Tuple['CheckReport', ...] = field(default=())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lemma_id': self.lemma_id.value,
            'points_checked': self.points_checked,
            'points_skipped_f_zero': self.points_skipped_f_zero,
            'worst_margin': self.worst_margin,
            'passed': self.passed,
            'tolerance': self.tolerance,
            'worst_r': self.worst_r,
            'sub_reports': [s.to_dict() for s in self.sub_reports],
        }


class _Nodes:
    """Interior node data shared by every check."""

    def __init__(self, lp: LogProfile):
        sl = slice(1, lp.grid.size - 1)
        self.r = lp.grid[sl]
        self.u = lp.u[sl]
        self.du = lp.du[sl]
        self.f = lp.f[sl]
        self.df = lp.df[sl]
        self.ddf = lp.ddf[sl]
        self.c = mean_curvature_coeff(lp.manifold, self.r) if self.r.size else self.r

    def lhs(self, iota: float) -> np.ndarray:
        with np.errstate(divide='ignore', invalid='ignore'):
            return (iota - 1.0) * self.df ** 2 / self.f + self.ddf + self.c * self.df

    def reduced_rhs(self, params: Params, coefficient: float) -> np.ndarray:
        """-2(n-1)κf + 2(n-2)/(n-1) u'f' + coefficient·f²."""
        n = params.n
        return (-2.0 * (n - 1) * params.kappa * self.f
                + 2.0 * (n - 2) / (n - 1) * self.du * self.df
                + coefficient * self.f ** 2)


def _evaluate(lemma_id: LemmaId, nodes: _Nodes, lhs: np.ndarray, rhs: np.ndarray,
              f_skip: float, tolerance: float, sub_reports=()) -> CheckReport:
    mask = nodes.f > f_skip
    checked = int(np.count_nonzero(mask))
    skipped = int(nodes.f.size - checked)
    if checked == 0:
        log_message(f"{lemma_id.value}: f vanishes on every interior node, vacuous pass", 'debug')
        return CheckReport(lemma_id, 0, skipped, 0.0, True, tolerance, None, tuple(sub_reports))
    l, rr = lhs[mask], rhs[mask]
    margins = (l - rr) / (1.0 + np.abs(l) + np.abs(rr))
    worst = int(np.argmin(margins))
    worst_margin = float(margins[worst])
    passed = worst_margin >= -tolerance
    log_message(f"{lemma_id.value}: {checked} nodes, worst margin {worst_margin:.3e} "
                f"at r={nodes.r[mask][worst]:.6g} -> {'pass' if passed else 'FAIL'}",
                'info' if passed else 'warning')
    return CheckReport(lemma_id, checked, skipped, worst_margin, passed, tolerance,
                       float(nodes.r[mask][worst]), tuple(sub_reports))


def _check_iota(iota: float) -> None:
    if not iota >= 1:
        raise InvalidIota(f"iota must be >= 1, got {iota}")


def check_lemma_2_1(lp: LogProfile, params: Params, iota: float,
                    f_skip: float = F_SKIP, tolerance: float = LEMMA_TOLERANCE) -> CheckReport:
    """Full Bochner lower bound for Δ(f^ι)/(ι f^(ι-1)), valid for every coefficient choice."""
    _check_iota(iota)
    nodes = _Nodes(lp)
    n, mu, a, b, p, q = params.n, params.mu, params.a, params.b, params.p, params.q
    ap = a * np.exp(-p * nodes.u)
    bq = b * np.exp(q * nodes.u)
    e = mu + ap + bq
    f = nodes.f
    rhs = (nodes.reduced_rhs(params, 2.0 / (n - 1))
           + e ** 2 / y_coefficient(n, iota)
           + 4.0 * f * e / (n - 1)
           + 2.0 * f * (q * bq - p * ap))
    return _evaluate(LemmaId.L2_1, nodes, nodes.lhs(iota), rhs, f_skip, tolerance)


def check_lemma_2_2(lp: LogProfile, params: Params, iota: float, case: int,
                    f_skip: float = F_SKIP, tolerance: float = LEMMA_TOLERANCE) -> CheckReport:
    """Reduced bound with coefficient 2/(n-1) (case 1) or ρ(n,p,ι) (case 2)."""
    _check_iota(iota)
    if params.mu < 0 or params.b < 0:
        raise OutOfRegime(f"reduced bound needs mu >= 0 and b >= 0, got mu={params.mu}, b={params.b}")
    if case == 1:
        if not first_case_holds(params):
            raise OutOfRegime(f"a(2/(n-1) - p) >= 0 fails for a={params.a}, p={params.p}")
        coefficient, lemma_id = 2.0 / (params.n - 1), LemmaId.L2_2_CASE1
    elif case == 2:
        if params.p < 0:
            raise OutOfRegime(f"second case needs p >= 0, got {params.p}")
        coefficient, lemma_id = rho(params.n, params.p, iota), LemmaId.L2_2_CASE2
    else:
        raise InvalidParams(f"case must be 1 or 2, got {case}")
    nodes = _Nodes(lp)
    return _evaluate(lemma_id, nodes, nodes.lhs(iota), nodes.reduced_rhs(params, coefficient),
                     f_skip, tolerance)


def check_lemma_2_3(lp: LogProfile, params: Params, chain: ConstantChain,
                    f_skip: float = F_SKIP, tolerance: float = LEMMA_TOLERANCE) -> CheckReport:
    """Bound with ρ̃(n,p) f² at the chain's ι; the intermediate forms ride along as sub-reports."""
    if params.mu < 0 or params.b < 0:
        raise OutOfRegime(f"needs mu >= 0 and b >= 0, got mu={params.mu}, b={params.b}")
    if not (first_case_holds(params) or second_case_holds(params)):
        raise OutOfRegime(f"neither exponent condition holds for a={params.a}, p={params.p}")
    if chain.branch is ChainBranch.NEGATIVE_MU:
        raise OutOfRegime("constant chain was built for the negative-mu branch")

    subs = []
    if first_case_holds(params):
        subs.append(check_lemma_2_2(lp, params, chain.iota, 1, f_skip, tolerance))
    if params.p >= 0:
        subs.append(check_lemma_2_2(lp, params, chain.iota, 2, f_skip, tolerance))
    nodes = _Nodes(lp)
    return _evaluate(LemmaId.L2_3, nodes, nodes.lhs(chain.iota),
                     nodes.reduced_rhs(params, chain.tilde_rho), f_skip, tolerance, subs)


def check_lemma_4_1(lp: LogProfile, params: Params, chain: ConstantChain,
                    f_skip: float = F_SKIP, tolerance: float = LEMMA_TOLERANCE) -> CheckReport:
    """Negative-μ bound with α(n,p,δ) f²."""
    if chain.branch is not ChainBranch.NEGATIVE_MU or chain.alpha is None:
        raise OutOfRegime(f"params outside the negative-mu regime: mu={params.mu}, a={params.a}, b={params.b}")
    if not (params.a > 0 and params.b > 0 and max(-params.a, -params.b) < params.mu < 0):
        raise OutOfRegime(f"params outside the negative-mu regime: mu={params.mu}, a={params.a}, b={params.b}")
    nodes = _Nodes(lp)
    return _evaluate(LemmaId.L4_1, nodes, nodes.lhs(chain.iota),
                     nodes.reduced_rhs(params, chain.alpha), f_skip, tolerance)


def lhs_identity_gap(lp: LogProfile, iota: float, f_skip: float = F_SKIP) -> float:
    """Max relative gap between Δ(f^ι)/(ι f^(ι-1)) differentiated directly and its decomposed form."""
    _check_iota(iota)
    nodes = _Nodes(lp)
    mask = nodes.f > f_skip
    if not np.any(mask):
        return 0.0
    f, df, ddf, c = nodes.f[mask], nodes.df[mask], nodes.ddf[mask], nodes.c[mask]
    # g = f^ι through the logarithm: g'/g = ι f'/f, g''/g = (g'/g)² + ι(f''/f - (f'/f)²)
    dlog = iota * df / f
    g1_over_g = dlog
    g2_over_g = dlog ** 2 + iota * (ddf / f - (df / f) ** 2)
    direct = f * (g2_over_g + c * g1_over_g) / iota
    decomposed = nodes.lhs(iota)[mask]
    return float(np.max(np.abs(direct - decomposed) / (1.0 + np.abs(decomposed))))


@dataclass(frozen=True)
class Verification:
    chain: Optional[ConstantChain]
    reports: Tuple[CheckReport, ...]
    notes: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def worst_margin(self) -> Optional[float]:
        margins = [r.worst_margin for r in self.reports if r.points_checked]
        return min(margins) if margins else (0.0 if self.reports else None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'constant_chain': self.chain.to_dict() if self.chain is not None else None,
            'checks': [r.to_dict() for r in self.reports],
            'passed': self.passed,
            'notes': list(self.notes),
        }


def verify_profile(lp: LogProfile, params: Params, c_n: float, k_max: int = 12, iota: Optional[float] = None,
                   f_skip: float = F_SKIP, tolerance: float = LEMMA_TOLERANCE) -> Verification:
    """Run every pointwise check whose hypotheses `params` satisfy.

    The full Bochner bound is always checked; outside both regimes it runs at
    ι = 1 (or the requested ι) and the note records why nothing else ran.
    """
    notes = []
    try:
        chain = build_constant_chain(params, c_n, k_max)
    except OutOfRegime as e:
        chain = None
        notes.append(f"no constant chain: {e}")
        log_message(f"Parameters outside both regimes, checking the full bound only: {e}", 'info')

    reports = []
    if chain is not None and chain.branch is ChainBranch.NEGATIVE_MU:
        reports.append(check_lemma_4_1(lp, params, chain, f_skip, tolerance))
    elif chain is not None:
        reports.append(check_lemma_2_3(lp, params, chain, f_skip, tolerance))
    full_iota = iota if iota is not None else (chain.iota if chain is not None else 1.0)
    reports.append(check_lemma_2_1(lp, params, full_iota, f_skip, tolerance))
    return Verification(chain, tuple(reports), tuple(notes))


def _half_ball_sup(lp: LogProfile, R: float) -> Tuple[float, int]:
    if not R > 0:
        raise InvalidParams(f"R must be > 0, got {R}")
    half = 0.5 * R
    if lp.grid[-1] < half * (1.0 - 1e-12):
        raise DomainTooSmall(f"profile ends at r={lp.grid[-1]:.6g}, gradient bound needs [0, {half:.6g}]")
    mask = lp.grid <= half * (1.0 + 1e-12)
    return float(np.max(lp.f[mask])), int(np.count_nonzero(mask))


def check_gradient_bound(lp: LogProfile, R: float, kappa: float, c_bound: float,
                         tolerance: float = BOUND_TOLERANCE) -> CheckReport:
    """sup_{B_{R/2}} |∇ln v|² against c_bound (1+√κR)²/R²."""
    if not c_bound > 0:
        raise InvalidParams(f"c_bound must be > 0, got {c_bound}")
    sup, count = _half_ball_sup(lp, R)
    bound = c_bound * (1.0 + math.sqrt(kappa) * R) ** 2 / R ** 2
    margin = (bound - sup) / (1.0 + bound + sup)
    passed = margin >= -tolerance
    log_message(f"gradient bound: sup f={sup:.6g} vs {bound:.6g} -> {'pass' if passed else 'FAIL'}",
                'info' if passed else 'warning')
    return CheckReport(LemmaId.GRADIENT_BOUND, count, 0, margin, passed, tolerance)


def empirical_constant(lp: LogProfile, R: float, kappa: float) -> float:
    """Smallest c for which the gradient bound holds on this profile: sup f · R²/(1+√κR)²."""
    sup, _ = _half_ball_sup(lp, R)
    return sup * R ** 2 / (1.0 + math.sqrt(kappa) * R) ** 2
