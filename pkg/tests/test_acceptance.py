"""Acceptance suite: every criterion at its stated tolerance, one line each.

These are the package's exit criteria; `csdk selftest` runs the same
functions from the command line.
"""

import pytest

from csdk.acceptance import ALL_CRITERIA


@pytest.mark.parametrize("criterion", ALL_CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion, capsys):
    result = criterion()
    status = "PASS" if result.passed else "FAIL"
    with capsys.disabled():
        print(f"\n[{status}] criterion {result.ident}: {result.title} -- {result.details}")
    assert result.passed, f"criterion {result.ident}: {result.details}"
