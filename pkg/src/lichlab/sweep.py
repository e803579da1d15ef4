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

# lichlab/sweep.py
import statistics
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, NamedTuple, Optional, Sequence

from .config import RunConfig
from .errors import DomainTooSmall, LichLabError
from .logging import log_message
from .manifold import ModelManifold
from .solver import SolveStatus, log_transform, solve_radial
from .params import classify_regime
from .verifier import empirical_constant, verify_profile

SWEEP_COLUMNS = ['axis', 'value', 'verdict', 'theorem_source', 'status', 'r_stop', 'c_obs', 'worst_margin', 'error']


class SweepRow(NamedTuple):
    axis: str
    value: float
    verdict: Optional[str]
    theorem_source: Optional[str]
    status: Optional[str]
    r_stop: Optional[float]
    c_obs: Optional[float]
    worst_margin: Optional[float]
    error: Optional[str]


def evaluate_point(config: RunConfig, axis: str, value: float) -> SweepRow:
    """Classify, solve and check one point of a sweep; failures become the row's error column."""
    try:
        v0 = config.v0
        params = config.params
        if axis == 'v0':
            v0 = float(value)
        else:
            params = params.with_value(axis, value)
        manifold = config.manifold
        if axis == 'kappa':
            manifold = ModelManifold(params.n, params.kappa)
        R_max = params.R if config.raw['solver']['R_max'] is None else config.R_max

        regime = classify_regime(params)
        profile = solve_radial(params, manifold, v0, R_max, config.solver)
        c_obs = worst = None
        if profile.status is SolveStatus.COMPLETE:
            lp = log_transform(profile)
            try:
                c_obs = empirical_constant(lp, params.R, params.kappa)
            except DomainTooSmall as e:
                log_message(f"{axis}={value}: {e}", 'warning')
            v = config.verify
            worst = verify_profile(lp, params, config.c_n, config.k_max, v['iota'],
                                   v['f_skip'], v['tolerance']).worst_margin
        return SweepRow(axis, float(value), regime.verdict.value, regime.theorem_source,
                        profile.status.value, profile.r_stop, c_obs, worst, None)
    except LichLabError as e:
        log_message(f"Sweep point {axis}={value} failed: {str(e)}", 'error')
        return SweepRow(axis, float(value), None, None, None, None, None, None, f"{type(e).__name__}: {e}")


def run_sweep(config: RunConfig, jobs: Optional[int] = None) -> List[SweepRow]:
    """Evaluate every sweep value in a worker pool; rows keep the input order.

    Workers are threads.  The solver's right-hand side is Python code that holds
    the GIL, so extra workers overlap little of a sweep and mostly help when
    points spend their time in numpy or scipy internals.
    """
    axis, values = config.sweep_request()
    workers = max(1, min(jobs or config.jobs, len(values)))
    log_message(f"Sweeping {axis} over {len(values)} values with {workers} workers", 'info')
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda value: evaluate_point(config, axis, value), values))


def summarize_sweep(rows: Sequence[SweepRow]) -> Dict[str, Any]:
    """Counts per verdict and the spread of the empirical constant."""
    verdicts = {}  # type: Dict[str, int]
    for row in rows:
        key = row.verdict or 'error'
        verdicts[key] = verdicts.get(key, 0) + 1
    summary = {'rows': len(rows), 'verdicts': verdicts}
    c_values = [row.c_obs for row in rows if row.c_obs is not None]
    if c_values:
        summary['c_obs_mean'] = statistics.mean(c_values)
        summary['c_obs_min'] = min(c_values)
        summary['c_obs_max'] = max(c_values)
    return summary
