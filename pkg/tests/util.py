"""Shared constants and helpers for the test suite."""
from __future__ import annotations

import contextlib
import io

# Weight vector that makes the five-state binary machine's level-1 search
# close at radius 2 (the best known assignment for that machine).
BARTHOLDI = [0.305061, 0.34747, 0.223839, 0.123631]

# One-state binary odometer: the integers acting by +1 in base 2.
ODOMETER_TEXT = "a = <e, a> (1,2)\n"


def run_cli(argv):
    """Run the CLI in-process; returns (exit_code, stdout, stderr)."""
    from mealybound.cli import main

    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def names_to_word(m, text: str):
    """Generator word from a string of single-letter state names."""
    return list(m.word_from_names(list(text)))
