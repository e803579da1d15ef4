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

# lichlab/__init__.py
__version__ = "0.1.0"

from .logging import setup_logging, log_message
from .params import Params, build_constant_chain, choose_iota, classify_regime
from .manifold import ModelManifold, RadialFunction
from .solver import log_transform, solve_radial

__all__ = ['setup_logging', 'log_message', 'Params', 'build_constant_chain', 'choose_iota',
           'classify_regime', 'ModelManifold', 'RadialFunction', 'log_transform', 'solve_radial']
