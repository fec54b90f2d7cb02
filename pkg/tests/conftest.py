import numpy as np
import pytest

from pcal.grid import GridSignal, GridSpec


@pytest.fixture
def spec():
    return GridSpec(8.0, 1024)


@pytest.fixture
def spec4k():
    return GridSpec(8.0, 4096)


def smooth_signal(spec, rng, k_max=48, decay=1.0, mean=True):
    """Random trigonometric polynomial with Gaussian coefficients ~ k^-decay."""
    k = np.arange(1, k_max + 1)
    a = rng.standard_normal(k_max) * k**-decay
    b = rng.standard_normal(k_max) * k**-decay
    ph = np.pi * np.outer(k, spec.x) / spec.L
    c = rng.standard_normal() if mean else 0.0
    return GridSignal(spec, c + a @ np.cos(ph) + b @ np.sin(ph))


def anchored_bump(spec, rng, T=1.0, k_max=12):
    """phi_T (X - X(0)) for a random smooth X: a valid rough path driver."""
    from pcal.calculus import make_localizer
    X = smooth_signal(spec, rng, k_max)
    loc = make_localizer(T, spec).values.values
    return GridSignal(spec, loc * (X.values - X.at_origin()))


@pytest.fixture
def rng():
    return np.random.default_rng(20)


_CRITERIA = {}


@pytest.fixture
def criterion(record_property):
    """criterion(k, title) tags the test; criterion.detail(...) attaches measured values."""
    class Tag:
        def __call__(self, k, title):
            record_property("criterion", (k, title))

        def detail(self, text):
            record_property("detail", text)
    return Tag()


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    k, title = props["criterion"]
    if report.when == "call" or report.failed:
        ok = report.passed and _CRITERIA.get(k, (None, True))[1]
        _CRITERIA[k] = (title, ok, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[k]
        line = f"criterion {k:2d} {title}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
