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

# lichlab/errors.py
"""Exception hierarchy shared by every lichlab module."""


class LichLabError(Exception):
    """Base class for all lichlab failures."""


class InvalidParams(LichLabError, ValueError):
    """Equation or geometry parameters outside their admissible range."""


class DimensionTooSmall(InvalidParams):
    pass


class InvalidIota(InvalidParams):
    pass


class InvalidExponent(InvalidParams):
    pass


class OutOfRegime(LichLabError):
    """Parameters do not satisfy the hypotheses of the requested estimate."""


class GeometryError(LichLabError, ValueError):
    pass


class NegativeRadius(GeometryError):
    pass


class OriginSingularity(GeometryError):
    pass


class GridMismatch(GeometryError):
    pass


class DomainTooSmall(GeometryError):
    pass


class SupportViolation(GeometryError):
    pass


class SolverError(LichLabError):
    pass


class StepFailure(SolverError):
    pass


class PositivityViolated(LichLabError, ValueError):
    pass


class NonconstantCurvature(LichLabError, ValueError):
    pass


class EmptySuite(LichLabError, ValueError):
    pass


class ConfigError(LichLabError):
    pass


class ConfigParse(ConfigError):
    pass


class UnknownAxis(ConfigError):
    pass


class EmptySweep(ConfigError):
    pass


class IoFailure(LichLabError):
    pass
