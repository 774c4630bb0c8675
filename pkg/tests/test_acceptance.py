"""Acceptance criteria 1-11 at their stated tolerances; one line per criterion."""
import pytest

from montgomery.acceptance import CRITERIA

RESULT_LINES: dict[int, str] = {}


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    result = CRITERIA[number - 1]()
    RESULT_LINES[number] = result.line()
    print(result.line())
    assert result.passed, result.line()


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
