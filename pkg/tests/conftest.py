import numpy as np
import pytest

from pairscan.sv import PairedEndModel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def pe36():
    return PairedEndModel()


@pytest.fixture(scope="session")
def pe100():
    return PairedEndModel(R=100, delta=220.0, sigma=63.0, p=0.033)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ac_report():
    """Record and print one verdict line per acceptance criterion."""

    def report(tag: str, ok: bool, detail: str) -> None:
        line = f"{tag} {'PASS' if ok else 'FAIL'} {detail}"
        _ACCEPTANCE_LINES.append(line)
        print("\n" + line)

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
