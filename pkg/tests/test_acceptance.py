"""One test per acceptance criterion; each prints its pass/fail line.

The checks live in discflux.acceptance so ``discflux suite`` reports the
same lines.  Failures here are real: see the README for the three criteria
that do not reach their stated tolerance.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from discflux import acceptance


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion):
    res = criterion()
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, line
