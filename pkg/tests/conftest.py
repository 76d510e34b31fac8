import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from regionclust.data import generate_synthetic, serialize_dataset, table1_spec  # noqa: E402


@pytest.fixture(scope="session")
def zero_noise_panel():
    return generate_synthetic(table1_spec(0.0, seed=1))


@pytest.fixture(scope="session")
def noisy_panel():
    return generate_synthetic(table1_spec(0.05, seed=11))


@pytest.fixture
def panel_csv(tmp_path, noisy_panel):
    path = tmp_path / "panel.csv"
    path.write_text(serialize_dataset(noisy_panel.dataset), encoding="utf-8")
    return path


@pytest.fixture
def zero_panel_csv(tmp_path, zero_noise_panel):
    path = tmp_path / "panel0.csv"
    path.write_text(serialize_dataset(zero_noise_panel.dataset), encoding="utf-8")
    return path


_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion, reported in the terminal summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label = marker.args[0]
        if hasattr(item, "callspec"):
            label += f" [{item.callspec.id}]"
        _ACCEPTANCE.append((label, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {label}")
