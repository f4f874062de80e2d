import numpy as np
import pytest

from edgediff.color import TristimulusImage, linear_srgb_to_xyz
from edgediff.scenes import make_scenes


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_image(rng, h=32, w=40, scale=100.0, low=0.01):
    rgb = rng.uniform(low, 1.0, size=(h, w, 3))
    return TristimulusImage(linear_srgb_to_xyz(rgb), luminance_scale=scale)


@pytest.fixture(scope="session")
def scenes256():
    return make_scenes(256)


@pytest.fixture(scope="session")
def scenes64():
    return make_scenes(64)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    def record(number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"criterion {number}: {status}  {title}  {detail}".rstrip())
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
