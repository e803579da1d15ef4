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

# lichlab/logging.py
import os
import sys
import logging
from typing import Optional

LOGGER_NAME = 'lichlab'

# Platform-specific color support
if sys.platform == 'win32':
    try:
        from colorama import Fore, Style, init
        init()
    except ImportError:
        class DummyColors:
            def __getattr__(self, name):
                return ''
        Fore = DummyColors()
        Style = DummyColors()
else:
    class Fore:
        RED = '\033[31m'
        GREEN = '\033[32m'
        YELLOW = '\033[33m'
        CYAN = '\033[36m'
        WHITE = '\033[37m'

    class Style:
        RESET_ALL = '\033[0m'
        BRIGHT = '\033[1m'

LEVEL_COLORS = {
    'DEBUG': Fore.CYAN,
    'INFO': Fore.GREEN,
    'WARNING': Fore.YELLOW,
    'ERROR': Fore.RED,
    'CRITICAL': Fore.RED + Style.BRIGHT,
}


def setup_logging(log_file: Optional[str] = None, level: str = 'INFO', verbose: bool = False) -> None:
    """Configure the lichlab logger with a console handler and an optional file handler."""
    log_level = getattr(logging, level.upper(), logging.INFO)
    if verbose:
        log_level = logging.DEBUG

    handlers = [logging.StreamHandler()]  # type: list
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        handlers.append(logging.FileHandler(log_file))

    formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    for handler in handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    logger.setLevel(log_level)
    logger.propagate = False


def log_message(message: str, level: str = 'info') -> None:
    """Log a message with color-coded output."""
    level = level.upper()
    logger = logging.getLogger(LOGGER_NAME)
    if not logger.isEnabledFor(getattr(logging, level, logging.INFO)):
        return

    color = LEVEL_COLORS.get(level, Fore.WHITE)
    if sys.platform != 'win32':
        message = f"{color}{message}{Style.RESET_ALL}"

    log_func = getattr(logger, level.lower(), logger.info)
    log_func(message)
