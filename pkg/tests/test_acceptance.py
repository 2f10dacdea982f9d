"""Release gate: every acceptance criterion at its stated tolerance.

Each criterion prints one PASS/FAIL line (visible with ``pytest -s`` and in
the terminal summary).
"""

import pytest

from chronoglass.acceptance import CRITERIA

_lines = []


@pytest.mark.parametrize("number", range(1, 15))
def test_criterion(number):
    result = CRITERIA[number - 1](seed=0)
    line = result.line()
    _lines.append(line)
    print(line)
    assert result.number == number
    assert result.passed, line


def pytest_terminal_summary_lines():
    return list(_lines)
