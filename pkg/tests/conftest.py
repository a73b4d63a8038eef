from importlib import resources
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from levy_opt import make_model, validate_model

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CONFIG_DIR = Path(str(resources.files("levy_opt") / "configs"))


@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture
def merton():
    return make_model(0.04, 0.04, p=2.0)


@pytest.fixture
def two_atom():
    return make_model(0.05, 0.01, [(-0.2, 1.0), (0.25, 1.0)], p=2.0)


@st.composite
def valid_models(draw, p=None):
    """Random finite-atom models satisfying the standing assumptions."""
    b = draw(st.floats(-0.2, 0.3))
    c = draw(st.sampled_from([0.0, 0.0, draw(st.floats(0.001, 0.2))]))
    n = draw(st.integers(0, 3))
    atoms = []
    for _ in range(n):
        x = draw(st.floats(-0.8, 1.5).filter(lambda v: abs(v) > 1e-3))
        lam = draw(st.floats(0.05, 3.0))
        atoms.append((x, lam))
    if p is None:
        p = draw(st.sampled_from([0.5, 1.0, 2.0, 3.5]))
    T = draw(st.sampled_from([0.5, 1.0, 2.0]))
    model = make_model(b, c, atoms, p=p, T=T)
    if not validate_model(model).ok:
        model = make_model(b, max(c, 0.01), atoms, p=p, T=T)
    return model


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
