from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("desk", max_examples=25, deadline=None)
settings.load_profile("desk")


@pytest.fixture
def F():
    return Fraction


ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
