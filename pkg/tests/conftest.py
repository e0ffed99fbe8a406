from __future__ import annotations

import pytest

from sol_reidemeister import make_spec, validate_spec

# One instance per family, all checked constructible.
FIXTURES = {
    "GammaA": dict(family="GammaA", A=[2, 1, 1, 1]),
    "Pi1": dict(family="Pi1", A=[2, 1, 1, 1]),
    "Pi1_3423": dict(family="Pi1", A=[3, 4, 2, 3]),
    "Pi2Plus": dict(family="Pi2Plus", A=[2, 3, 3, 5]),
    "Pi2Minus": dict(family="Pi2Minus", A=[2, 1, 1, 1]),
    "Pi3": dict(family="Pi3", A=[2, 1, 1, 1], M=[-1, 1, 0, 1]),
    "Pi4": dict(family="Pi4", A=[2, 1, 1, 1], N=[-1, -1, -1, 0]),
    "Pi5": dict(family="Pi5", A=[2, 1, 1, 1], M=[1, 0, -1, -1]),
    "Pi6": dict(family="Pi6", A=[2, 3, 3, 5], M=[1, 1, 0, -1]),
    "Pi7": dict(family="Pi7", A=[2, 1, 1, 1], M=[0, 1, -1, 0]),
    "Pi8": dict(family="Pi8", A=[2, 1, 1, 1], M=[0, 1, -1, 0]),
}


def fixture_spec(name):
    kw = dict(FIXTURES[name])
    return validate_spec(make_spec(kw.pop("family"), **kw))


@pytest.fixture(params=sorted(FIXTURES))
def any_spec(request):
    return fixture_spec(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
