# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

This script contains various utility functions shared by the compiler, the
anchoring step and the parser: colored console output (always on stderr,
stdout is reserved for JSON lines), the base class of all input diagnostics
and the percentage arithmetic of the growth statistics.
"""
"""
Copyright (C) 2024  4wardEnergy Research GmbH

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""

import sys
from decimal import Decimal, ROUND_HALF_UP
import termcolor


class DiagnosticError(Exception):
    """Base class of every diagnostic caused by the input (grammar, lexicon,
    manifest, corpus). The command line maps it to exit code 1."""


def print_red(text):
    """Prints the provided text in red color on stderr.

    :param text: Text to print
    :type text: str
    """
    print(termcolor.colored(text, 'red'), file=sys.stderr)


def print_green(text):
    print(termcolor.colored(text, 'green'), file=sys.stderr)


def print_magenta(text):
    print(termcolor.colored(text, 'magenta'), file=sys.stderr)


def percent_change(old, new):
    """Relative change from old to new in percent, one decimal, rounded half-up.

    :param old: Count of the older project version
    :type old: int
    :param new: Count of the newer project version
    :type new: int
    :return: Rounded percentage, e.g. Decimal('18.2')
    :rtype: Decimal
    """
    if old == 0:
        raise ZeroDivisionError("Percentage change from a count of zero is undefined.")
    exact = Decimal(100) * (Decimal(new) - Decimal(old)) / Decimal(old)
    return exact.quantize(Decimal('0.1'), rounding=ROUND_HALF_UP)


def format_percent(value):
    """Formats a percentage with explicit sign, e.g. '+18.2%' or '-3.0%'."""
    sign = '-' if value < 0 else '+'
    return f"{sign}{abs(value)}%"
