import math

import pytest

from nonscatter.density import HerglotzDensity
from nonscatter.geometry import RadiusFunction

ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def circle():
    return RadiusFunction.constant(1.0)


@pytest.fixture
def ellipse():
    return RadiusFunction.centered_ellipse(1.2, 1.0)


@pytest.fixture
def disk2():
    """Offset disk with s = R0/|x0| = 2."""
    return RadiusFunction.offset_disk(1.0, (0.5, 0.0))


@pytest.fixture
def egg():
    return RadiusFunction.piecewise_egg(0.02)


@pytest.fixture
def ones():
    return HerglotzDensity.constant()


@pytest.fixture
def e_minus():
    return HerglotzDensity.fourier({-1: 1.0})


def admissible_domains():
    """The five shapes used by the property suites."""
    return {
        "circle": RadiusFunction.constant(1.0),
        "ellipse-1.2": RadiusFunction.centered_ellipse(1.2, 1.0),
        "ellipse-0.9": RadiusFunction.centered_ellipse(1.0, 0.9),
        "disk-s2": RadiusFunction.offset_disk(1.0, (0.5, 0.0)),
        "egg-0.02": RadiusFunction.piecewise_egg(0.02),
    }


TWO_PI = 2 * math.pi
