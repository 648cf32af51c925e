import pytest

from thzlink.channel import AtmosphereState
from thzlink.spectroscopy import LineCatalog, SpectralLine, bundled_catalog_path, load_bundled_catalog


def make_line(f0, intensity=1e-20, air=0.1, self_=0.1, n=0.7, molecule=1, iso=1, elower=100.0):
    return SpectralLine(
        molecule_id=molecule,
        isotopologue_id=iso,
        center_frequency=f0,
        intensity=intensity,
        air_halfwidth=air,
        self_halfwidth=self_,
        lower_state_energy=elower,
        temperature_exponent=n,
    )


def make_catalog(*lines):
    return LineCatalog.from_lines(lines, "synthetic")


@pytest.fixture(scope="session")
def catalog():
    return load_bundled_catalog()


@pytest.fixture(scope="session")
def bundled_records():
    return bundled_catalog_path().read_text(encoding="ascii").splitlines()


@pytest.fixture
def humid():
    return AtmosphereState(water_mixing_ratio=0.01)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = []


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
