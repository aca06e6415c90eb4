import numpy as np
import pytest

from ree_css.linalg import ket, projector

# criterion label -> "PASS"/"FAIL", filled by tests marked with ``criterion``
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    key = (marker.args[0], marker.args[1])
    ok = report.passed if report.when == "call" else False
    if not ok or key not in _CRITERIA:
        _CRITERIA[key] = "PASS" if ok else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), status in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {num:>2} {status}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def bell_singlet():
    v = (ket(0, 1, dims=(2, 2)) - ket(1, 0, dims=(2, 2))) / np.sqrt(2.0)
    return projector(v)


def _sample_product_values(x, dims, count, rng):
    """``<a|x|a>`` for `count` Haar-random pure product kets ``a``."""
    kets = np.ones((count, 1), dtype=complex)
    for d in dims:
        v = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        kets = np.einsum("ki,kj->kij", kets, v).reshape(count, -1)
    return np.real(np.einsum("ki,ij,kj->k", kets.conj(), x, kets))


@pytest.fixture
def product_values():
    return _sample_product_values
