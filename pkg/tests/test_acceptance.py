"""Acceptance criteria, one test per criterion at its stated tolerance.

Each criterion prints a ``[PASS]`` or ``[FAIL]`` line; under pytest the lines
are also collected into the terminal summary.  Runnable as a script too.
"""

import sys

import pytest

from gadgetforge.suite import CRITERIA, run_suite

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="module")
def results():
    res = {r.number: r for r in run_suite()}
    for n in sorted(res):
        line = res[n].line()
        print(line)
        ACCEPTANCE_LINES.append(line)
    return res


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=[f"criterion_{n}" for n in sorted(CRITERIA)])
def test_criterion(results, number):
    r = results[number]
    assert r.passed, f"{r.title}: failing checks {r.failures()}"


if __name__ == "__main__":
    failed = 0
    for r in run_suite():
        print(r.line())
        if not r.passed:
            failed += 1
            print(f"      failing: {', '.join(r.failures())}")
    sys.exit(1 if failed else 0)
