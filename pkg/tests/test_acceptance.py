"""The eight acceptance criteria at their stated tolerances (full suite).

Each criterion prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected into the terminal summary so they show up under ``pytest -v``
even with output capture enabled.
"""

import pytest

from randfid.verify import CRITERIA, format_table

ACCEPTANCE_LINES = []


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion):
    result = criterion("full", seed=0)
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, f"{line}\n{format_table([result])}"
