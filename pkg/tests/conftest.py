import numpy as np
import pytest

from curvekit import mannheim as mh
from curvekit.curvespace import frenet_apparatus
from curvekit.reconstruct import integrate_frenet, make_named_curve, mannheim_profile

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda x: int(x.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def helix_run():
    curve, app = integrate_frenet(make_named_curve("helix", {"a": 2, "b": 1}), step=1e-3)
    return curve, app


@pytest.fixture(scope="session")
def mannheim_run():
    """Curve with R kappa = kappa^2 + tau^2 (R = 4, theta = 0.4 s) on [0, 2]."""
    prof = mannheim_profile(4.0, lambda s: 0.4 * s, "T", s_max=2.0, step=1e-3)
    curve, app = integrate_frenet(prof, step=1e-3)
    return prof, curve, app, frenet_apparatus(curve)


@pytest.fixture(scope="session")
def field_T():
    return mh.FrameVectorField.constant(1.0, 0.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
