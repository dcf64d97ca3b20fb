import pytest

from bestreply.model import EXPLICIT, Instance, PolyCost, Request


def explicit(coeffs: dict, allocs: list, weights=None) -> Instance:
    """Small explicit instance from {id: coeffs} and per-request allocation lists."""
    weights = weights or [1] * len(allocs)
    resources = {r: PolyCost(tuple(c)) for r, c in coeffs.items()}
    requests = tuple(
        Request(weight=w, allocations=tuple(tuple(a) for a in al)) for w, al in zip(weights, allocs)
    )
    return Instance(EXPLICIT, resources, requests)


@pytest.fixture
def forced():
    # request 2 can only use r1; best reply puts request 1 there too
    return explicit({"r1": [0, 1], "r2": [0, 1]}, [[["r1"], ["r2"]], [["r1"]]])


@pytest.fixture
def symmetric():
    return explicit({"r1": [0, 1], "r2": [0, 1]}, [[["r1"], ["r2"]], [["r1"], ["r2"]]])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
