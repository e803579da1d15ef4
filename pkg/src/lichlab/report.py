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

# lichlab/report.py
import io
import os
import csv
import json
import hashlib
import platform
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import scipy

from .errors import IoFailure
from .logging import log_message

SCHEMA_VERSION = 1
PROFILE_COLUMNS = ['r', 'v', 'dv', 'ddv', 'u', 'f']
CASCADE_COLUMNS = ['k', 'theta', 'r_k', 'norm', 'normalized']


def format_value(value: Any) -> str:
    """CSV cell text; floats carry 17 significant digits."""
    if value is None:
        return ''
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    return str(value)


def format_rows(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Format rows as CSV with a header row."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(x) for x in row])
    return output.getvalue()


def _jsonable(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def format_json(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True, default=_jsonable) + '\n'


def environment_fingerprint() -> Dict[str, str]:
    """Versions that can change numerical output, with a sha256 over them."""
    from . import __version__
    env = {
        'lichlab': __version__,
        'python': platform.python_version(),
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'machine': platform.machine(),
    }
    env['sha256'] = hashlib.sha256(json.dumps(env, sort_keys=True).encode('utf-8')).hexdigest()
    return env


def build_report(command: str, config: Dict[str, Any], sections: Dict[str, Any]) -> Dict[str, Any]:
    report = {
        'schema_version': SCHEMA_VERSION,
        'generated_at': datetime.now(timezone.utc).isoformat(timespec='seconds'),
        'command': command,
        'config': config,
        'environment': environment_fingerprint(),
        'notes': ['radial profiles are a verification vehicle; solutions need not be radial'],
    }
    report.update(sections)
    return report


def profile_rows(profile, lp=None) -> List[List[float]]:
    """Rows r, v, dv, ddv, u, f; u and f from the log profile when given."""
    u = lp.u if lp is not None else -np.log(profile.v)
    f = lp.f if lp is not None else (profile.dv / profile.v) ** 2
    return [list(row) for row in zip(profile.grid, profile.v, profile.dv, profile.ddv, u, f)]


def cascade_rows(result) -> List[List[Any]]:
    return [[e.k, e.theta, e.radius, e.norm, e.normalized] for e in result.entries]


def write_text(path: str, text: str) -> str:
    directory = os.path.dirname(path)
    try:
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
        with open(path, 'w', newline='') as f:
            f.write(text)
    except OSError as e:
        log_message(f"Failed to write {path}: {str(e)}", 'error')
        raise IoFailure(f"cannot write {path}: {e}")
    log_message(f"Wrote {path}", 'debug')
    return path


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    return write_text(path, format_rows(header, rows))


def write_json(path: str, document: Any) -> str:
    return write_text(path, format_json(document))
