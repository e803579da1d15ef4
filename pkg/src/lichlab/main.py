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

# lichlab/main.py
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

from .config import RunConfig, get_config, parse_args
from .errors import DomainTooSmall, LichLabError, OutOfRegime
from .logging import log_message, setup_logging
from .moser import (build_base_cutoff, calibrate_sobolev, cascade, iteration_inequality,
                    sobolev_check, standard_bump_suite, suite_fingerprint, tightened_constant)
from .params import build_constant_chain, classify_regime, nominal_chain
from .report import (CASCADE_COLUMNS, PROFILE_COLUMNS, build_report, cascade_rows, profile_rows,
                     write_csv, write_json)
from .solver import SolveStatus, constant_root_scan, constant_solution, log_transform, solve_radial
from .sweep import SWEEP_COLUMNS, run_sweep, summarize_sweep
from .verifier import check_gradient_bound, empirical_constant, verify_profile

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_OUT_OF_REGIME = 2

# (report sections, csv files as name -> (header, rows), every requested check passed)
CommandResult = Tuple[Dict[str, Any], Dict[str, Tuple[List[str], List[List[Any]]]], bool]


def _solve(config: RunConfig):
    profile = solve_radial(config.params, config.manifold, config.v0, config.R_max, config.solver)
    lp = log_transform(profile) if profile.status is SolveStatus.COMPLETE else None
    return profile, lp


def _solution_section(profile) -> Dict[str, Any]:
    section = {
        'v0': profile.v0,
        'status': profile.status.value,
        'r_stop': profile.r_stop,
        'r_end': profile.r_end,
        'points': int(profile.grid.size),
    }
    if profile.status is SolveStatus.POSITIVITY_LOST:
        section['note'] = f"positivity lost at r*={profile.r_stop:.17g}; profile truncated"
    elif profile.status is SolveStatus.BLOWUP:
        section['note'] = f"blow-up at r={profile.r_stop:.17g}; profile truncated"
    return section


def command_solve(config: RunConfig) -> CommandResult:
    profile, lp = _solve(config)
    sections = {
        'classification': classify_regime(config.params).to_dict(),
        'solution': _solution_section(profile),
    }
    return sections, {'profile.csv': (PROFILE_COLUMNS, profile_rows(profile, lp))}, True


def command_classify(config: RunConfig) -> CommandResult:
    params = config.params
    s = config.solver
    try:
        chain = build_constant_chain(params, config.c_n, config.k_max).to_dict()
    except OutOfRegime as e:
        log_message(f"No constant chain: {str(e)}", 'info')
        chain = None
    root = constant_solution(params, s.v_floor, s.v_ceil)
    sections = {
        'classification': classify_regime(params).to_dict(),
        'constant_solution': root,
        'constant_chain': chain,
    }
    if root is None:
        sections['constant_scan'] = constant_root_scan(params, s.v_floor, s.v_ceil).to_dict()
    return sections, {}, True


def command_verify(config: RunConfig) -> CommandResult:
    params = config.params
    profile, lp = _solve(config)
    sections = {
        'classification': classify_regime(params).to_dict(),
        'solution': _solution_section(profile),
    }
    files = {'profile.csv': (PROFILE_COLUMNS, profile_rows(profile, lp))}
    if lp is None:
        sections['verification'] = {'skipped': f"profile status {profile.status.value}"}
        return sections, files, True

    v = config.verify
    verification = verify_profile(lp, params, config.c_n, config.k_max, v['iota'], v['f_skip'], v['tolerance'])
    sections['verification'] = verification.to_dict()
    passed = verification.passed
    try:
        c_obs = empirical_constant(lp, params.R, params.kappa)
        sections['empirical_constant'] = c_obs
        if v['c_bound'] is not None:
            bound = check_gradient_bound(lp, params.R, params.kappa, float(v['c_bound']))
            sections['gradient_bound'] = bound.to_dict()
            passed = passed and bound.passed
    except DomainTooSmall as e:
        log_message(f"Gradient bound not evaluated: {str(e)}", 'warning')
        sections['empirical_constant'] = None
    return sections, files, passed


def command_cascade(config: RunConfig) -> CommandResult:
    params = config.params
    try:
        chain = build_constant_chain(params, config.c_n, config.k_max)
    except OutOfRegime:
        if not config.nominal:
            raise
        log_message("Parameters outside every regime, using the nominal chain", 'warning')
        chain = nominal_chain(params.n, params.R, params.kappa, config.c_n, config.k_max)

    profile, lp = _solve(config)
    if lp is None:
        raise DomainTooSmall(f"profile stopped at r={profile.r_stop} ({profile.status.value}), "
                             f"cascade needs [0, {params.R}]")
    result = cascade(config.manifold, lp, chain, config.k_max)
    step = iteration_inequality(config.manifold, lp, chain, build_base_cutoff(params.R))
    sections = {
        'constant_chain': chain.to_dict(),
        'solution': _solution_section(profile),
        'cascade': result.to_dict(),
        'iteration_inequality': step._asdict(),
    }
    files = {
        'profile.csv': (PROFILE_COLUMNS, profile_rows(profile, lp)),
        'cascade.csv': (CASCADE_COLUMNS, cascade_rows(result)),
    }
    return sections, files, True


def command_calibrate(config: RunConfig) -> CommandResult:
    cal = config.calibration
    R = float(cal['R'])
    suite = standard_bump_suite(R, int(cal['suite_size']))
    c_star = calibrate_sobolev(config.manifold, suite, R, float(cal['lower']), float(cal['tol']))
    tight = tightened_constant(c_star)
    rows = []
    failing = 0
    for member in suite:
        check = sobolev_check(config.manifold, member.g, R, c_star)
        rows.append([member.name, check.margin, check.lhs, check.rhs])
        if not sobolev_check(config.manifold, member.g, R, tight).holds:
            failing += 1
    sections = {
        'calibration': {
            'c_n': c_star,
            'R': R,
            'suite_size': len(suite),
            'suite_sha256': suite_fingerprint(suite),
            'min_margin': min(row[1] for row in rows),
            'tightened_c_n': tight,
            'failing_when_tightened': failing,
        }
    }
    return sections, {'calibration.csv': (['member', 'margin', 'lhs', 'rhs'], rows)}, True


def command_sweep(config: RunConfig) -> CommandResult:
    rows = run_sweep(config)
    axis, values = config.sweep_request()
    sections = {
        'sweep': {
            'axis': axis,
            'values': list(values),
            'summary': summarize_sweep(rows),
        }
    }
    return sections, {'sweep.csv': (SWEEP_COLUMNS, [list(row) for row in rows])}, True


COMMANDS = {
    'solve': command_solve,
    'classify': command_classify,
    'verify': command_verify,
    'cascade': command_cascade,
    'calibrate': command_calibrate,
    'sweep': command_sweep,
}  # type: Dict[str, Callable[[RunConfig], CommandResult]]


def run(config: RunConfig) -> int:
    """Run one command and write its outputs.

    A failed check is a result: it is recorded as `passed: false` in the report
    and the exit status stays 0.  Only errors raised on the way leave with 1 or 2.
    """
    log_message(f"Running {config.command}", 'info')
    sections, files, passed = COMMANDS[config.command](config)

    if 'csv' in config.formats:
        for name, (header, rows) in sorted(files.items()):
            write_csv(os.path.join(config.output_dir, name), header, rows)
    if 'json' in config.formats:
        report = build_report(config.command, config.reproducible_dict(), sections)
        report['passed'] = passed
        write_json(os.path.join(config.output_dir, 'report.json'), report)

    log_message(f"{config.command} finished: {'passed' if passed else 'checks FAILED'}",
                'info' if passed else 'warning')
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = parse_args(argv)
    try:
        config = get_config(args)
        setup_logging(config['logging']['file'], level=config['logging']['level'])
        return run(RunConfig.from_dict(config))
    except OutOfRegime as e:
        log_message(f"Out of regime: {str(e)}", 'error')
        return EXIT_OUT_OF_REGIME
    except LichLabError as e:
        log_message(f"{type(e).__name__}: {str(e)}", 'error')
        return EXIT_FAILURE
    except Exception as e:
        log_message(f"Unexpected error: {str(e)}", 'critical')
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
