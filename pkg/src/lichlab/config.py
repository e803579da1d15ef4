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

# lichlab/config.py
import os
import sys
import copy
import json
import argparse
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .errors import ConfigParse, EmptySweep, InvalidParams, UnknownAxis

COMMANDS = ('solve', 'classify', 'verify', 'cascade', 'calibrate', 'sweep')
SWEEP_AXES = ('p', 'mu', 'a', 'b', 'kappa', 'R', 'v0')
OUTPUT_FORMATS = ('csv', 'json')
PARAM_KEYS = ('n', 'mu', 'a', 'b', 'p', 'q', 'kappa', 'R')
DEFAULT_SEED = 42

# Handle path differences between operating systems
if sys.platform == 'win32':
    CONFIG_DIR = os.path.normpath(os.path.expanduser('~\\.lichlab'))
else:
    CONFIG_DIR = os.path.normpath(os.path.expanduser('~/.lichlab'))

DEFAULT_CONFIG = {
    'command': None,  # Required, from the file or --command
    'params': None,  # Required: n, mu, a, b, p, q and optionally kappa, R
    'manifold': {
        'n': None,  # Defaults to params.n
        'kappa': None  # Defaults to params.kappa
    },
    'solver': {
        'tol': 1e-8,
        'v0': 1.0,
        'R_max': None,  # Defaults to params.R
        'v_floor': 1e-10,
        'v_ceil': 1e10,
        'grid_points': 2001,
        'seed_fraction': 1e-4
    },
    'chain': {
        'c_n': 1.0,
        'k_max': 12,
        'nominal': False  # Cascade outside every regime with the first-case constants
    },
    'output': {
        'dir': os.path.normpath('run'),
        'formats': ['csv', 'json']
    },
    'sweep': {
        'axis': None,
        'values': [],
        'jobs': None  # Defaults to the logical CPU count
    },
    'calibration': {
        'R': 1.0,
        'suite_size': 50,
        'lower': -10.0,
        'tol': 1e-4
    },
    'verify': {
        'iota': None,  # Defaults to the constant chain's iota, or 1 outside every regime
        'f_skip': 1e-8,
        'tolerance': 1e-6,
        'c_bound': None  # Defaults to the empirical constant
    },
    'logging': {
        'level': 'INFO',
        'file': None
    }
}

# Default configuration file paths
DEFAULT_CONFIG_PATHS = [
    'lichlab.json',  # Current directory
    os.path.normpath(os.path.join(CONFIG_DIR, 'config.json')),  # User's home directory
    os.path.normpath('/etc/lichlab/config.json')  # System-wide configuration
]


def suite_seed() -> int:
    """Seed for randomised test-function suites, from LICHLAB_SEED."""
    raw = os.environ.get('LICHLAB_SEED', str(DEFAULT_SEED))
    try:
        return int(raw)
    except ValueError:
        raise ConfigParse(f"LICHLAB_SEED must be an integer, got {raw!r}")


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(description='Lichnerowicz equation estimate laboratory')
    parser.add_argument('-c', '--config', help='Path to configuration file')
    parser.add_argument('--command', choices=COMMANDS, help='Command to run (overrides the config file)')
    parser.add_argument('-j', '--jobs', type=int,
                        help='Worker threads for sweeps (default: logical CPU count); '
                             'solver-bound sweeps gain little from more than one')
    parser.add_argument('-o', '--out', help='Output directory')
    parser.add_argument('-f', '--format', help='Comma-separated output formats: csv,json')
    parser.add_argument('--axis', help=f"Sweep axis, one of {', '.join(SWEEP_AXES)}")
    parser.add_argument('--values', help='Comma-separated sweep values')
    parser.add_argument('-v', '--verbose', action='store_true', help='Enable verbose logging')
    parser.add_argument('-l', '--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='Set logging level')
    return parser.parse_args(argv)


def _read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, ValueError) as e:
        raise ConfigParse(f"Error loading config file {path}: {str(e)}")
    if not isinstance(data, dict):
        raise ConfigParse(f"Config file {path} must hold a JSON object")
    return data


def load_config_file(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Load the user configuration; an explicit path must exist."""
    if config_path:
        if not os.path.exists(config_path):
            raise ConfigParse(f"Config file {config_path} does not exist")
        return _read_json(config_path)

    # Try default config paths
    for path in DEFAULT_CONFIG_PATHS:
        if os.path.exists(path):
            return _read_json(path)

    return {}


def merge_config(defaults: Dict[str, Any], user: Dict[str, Any], prefix: str = '') -> Dict[str, Any]:
    """Deep-merge `user` over `defaults`; keys absent from the defaults are rejected."""
    merged = copy.deepcopy(defaults)
    for key, value in user.items():
        name = f"{prefix}{key}"
        if key not in defaults:
            raise ConfigParse(f"Unknown configuration key '{name}'")
        if key == 'params':
            if not isinstance(value, dict):
                raise ConfigParse("'params' must be an object")
            unknown = sorted(set(value) - set(PARAM_KEYS))
            if unknown:
                raise ConfigParse(f"Unknown parameter keys: {', '.join(unknown)}")
            merged[key] = dict(value)
        elif isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigParse(f"'{name}' must be an object")
            merged[key] = merge_config(defaults[key], value, prefix=f"{name}.")
        else:
            merged[key] = value
    return merged


def _split_values(raw: str) -> List[float]:
    try:
        return [float(x) for x in raw.split(',') if x.strip()]
    except ValueError:
        raise ConfigParse(f"--values must be comma-separated numbers, got {raw!r}")


def get_config(args: argparse.Namespace) -> Dict[str, Any]:
    """Get configuration from file and command line arguments."""
    # Load config from file
    config = merge_config(DEFAULT_CONFIG, load_config_file(args.config))

    # Override with command line arguments
    if args.command:
        config['command'] = args.command
    if args.jobs is not None:
        config['sweep']['jobs'] = args.jobs
    if args.out:
        config['output']['dir'] = args.out
    if args.format:
        config['output']['formats'] = [x.strip() for x in args.format.split(',') if x.strip()]
    if args.axis:
        config['sweep']['axis'] = args.axis
    if args.values is not None:
        config['sweep']['values'] = _split_values(args.values)

    # Set logging level from command line or config file
    if args.log_level:
        config['logging']['level'] = args.log_level
    elif args.verbose:
        config['logging']['level'] = 'DEBUG'

    return config


@dataclass(frozen=True)
class RunConfig:
    """Validated view of a merged configuration dictionary."""
    command: str
    params: Any
    manifold: Any
    solver: Any
    v0: float
    R_max: float
    c_n: float
    k_max: int
    nominal: bool
    output_dir: str
    formats: Tuple[str, ...]
    sweep_axis: Optional[str]
    sweep_values: Tuple[float, ...]
    jobs: int
    calibration: Dict[str, Any]
    verify: Dict[str, Any]
    raw: Dict[str, Any]

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> 'RunConfig':
        # deferred: moser imports this module
        from .manifold import ModelManifold
        from .params import Params
        from .solver import SolverOptions

        command = config.get('command')
        if command not in COMMANDS:
            raise ConfigParse(f"command must be one of {', '.join(COMMANDS)}, got {command!r}")
        if not config.get('params'):
            raise ConfigParse("'params' section is required")
        missing = [k for k in ('n', 'mu', 'a', 'b', 'p', 'q') if k not in config['params']]
        if missing:
            raise ConfigParse(f"'params' is missing {', '.join(missing)}")

        try:
            params = Params.from_dict(config['params'])
            geometry = config['manifold']
            n = params.n if geometry['n'] is None else int(geometry['n'])
            if n != params.n:
                raise ConfigParse(f"manifold.n={n} differs from params.n={params.n}")
            kappa = params.kappa if geometry['kappa'] is None else float(geometry['kappa'])
            manifold = ModelManifold(n, kappa)
            s = config['solver']
            solver = SolverOptions(tol=float(s['tol']), v_floor=float(s['v_floor']), v_ceil=float(s['v_ceil']),
                                   grid_points=int(s['grid_points']), seed_fraction=float(s['seed_fraction']))
        except (InvalidParams, TypeError, ValueError) as e:
            raise ConfigParse(f"Invalid parameters: {str(e)}")

        formats = tuple(config['output']['formats'])
        bad = [x for x in formats if x not in OUTPUT_FORMATS]
        if bad:
            raise ConfigParse(f"Unknown output formats: {', '.join(bad)}")

        jobs = config['sweep']['jobs'] or os.cpu_count() or 1
        if int(jobs) < 1:
            raise ConfigParse(f"jobs must be >= 1, got {jobs}")

        R_max = config['solver']['R_max']
        return cls(
            command=command,
            params=params,
            manifold=manifold,
            solver=solver,
            v0=float(config['solver']['v0']),
            R_max=params.R if R_max is None else float(R_max),
            c_n=float(config['chain']['c_n']),
            k_max=int(config['chain']['k_max']),
            nominal=bool(config['chain']['nominal']),
            output_dir=config['output']['dir'],
            formats=formats,
            sweep_axis=config['sweep']['axis'],
            sweep_values=tuple(float(x) for x in config['sweep']['values']),
            jobs=int(jobs),
            calibration=dict(config['calibration']),
            verify=dict(config['verify']),
            raw=config,
        )

    def sweep_request(self) -> Tuple[str, Tuple[float, ...]]:
        """Axis and values of a sweep, validated."""
        if self.sweep_axis not in SWEEP_AXES:
            raise UnknownAxis(f"sweep axis must be one of {', '.join(SWEEP_AXES)}, got {self.sweep_axis!r}")
        if not self.sweep_values:
            raise EmptySweep("sweep values list is empty")
        return self.sweep_axis, self.sweep_values

    def reproducible_dict(self) -> Dict[str, Any]:
        """The merged configuration minus settings that do not affect results."""
        data = copy.deepcopy(self.raw)
        data['sweep'].pop('jobs', None)
        data['output'].pop('dir', None)
        data['logging'] = {}
        return data
