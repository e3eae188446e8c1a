import pytest

from nextprime.sieve import PrimeEngine, SieveConfig


@pytest.fixture(scope="session")
def small():
    """Primes to 2e5: enough for every n <= 1e5 query plus its next prime."""
    return PrimeEngine(SieveConfig(limit=200_000, segment_size=4096))


@pytest.fixture(scope="session")
def medium():
    """Primes to 2e7: a_n for n <= 1e7 and gap indices up to 1e6."""
    return PrimeEngine(SieveConfig(limit=20_000_000))


@pytest.fixture(scope="session")
def large():
    """Primes slightly past 1e8, so a_n is defined at x = 1e8."""
    return PrimeEngine(SieveConfig(limit=100_001_000))


# acceptance criteria get one PASS/FAIL line each in the terminal summary
_CRITERIA = []


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    mark = item.get_closest_marker("criterion")
    if mark and (rep.when == "call" or (rep.when == "setup" and not rep.passed)):
        number, title = mark.args
        detail = dict(item.user_properties).get("detail", "")
        status = "PASS" if rep.passed else "FAIL"
        _CRITERIA.append((number, f"{status}  criterion {number:>2}: {title}" + (f" [{detail}]" if detail else "")))
    return rep


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
