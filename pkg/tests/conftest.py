import numpy as np
import pytest

from cogdist.model import CategoryCatalog, SimilarityMatrix, dense

WORKED_S = [
    [1.0, 0.1, 0.3, 0.8],
    [0.1, 1.0, 0.2, 0.1],
    [0.3, 0.2, 1.0, 0.6],
    [0.8, 0.1, 0.6, 1.0],
]


@pytest.fixture
def cat4():
    return CategoryCatalog(("A", "B", "C", "D"))


@pytest.fixture
def worked_s(cat4):
    return SimilarityMatrix(cat4, np.array(WORKED_S))


@pytest.fixture
def worked_m(cat4):
    return dense(cat4, [4, 1, 0, 0], "unit")


def random_similarity(rng, n):
    """Random valid similarity matrix: symmetric, entries in [0, 1], unit diagonal.

    About a third of the off-diagonal entries are zeroed to mimic the sparse
    published matrices.
    """
    a = rng.uniform(0, 1, size=(n, n))
    a[rng.uniform(size=(n, n)) < 0.3] = 0.0
    s = np.triu(a, 1)
    s = s + s.T
    np.fill_diagonal(s, 1.0)
    return s


def random_profile(rng, n):
    m = rng.integers(0, 30, size=n).astype(float)
    if m.sum() == 0:
        m[rng.integers(n)] = 1.0
    return m


# acceptance criteria report -------------------------------------------------

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record pass/fail of an acceptance criterion for the terminal summary."""

    def record(label):
        _CRITERIA[request.node.nodeid] = (label, None)

    yield record
    # outcome filled in by the report hook


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.nodeid in _CRITERIA and (rep.when == "call" or rep.failed):
        label, prev = _CRITERIA[item.nodeid]
        if prev is not False:
            _CRITERIA[item.nodeid] = (label, rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    by_label = {}
    for label, passed in _CRITERIA.values():
        by_label[label] = by_label.get(label, True) and bool(passed)
    terminalreporter.section("acceptance criteria")
    for label in sorted(by_label, key=_sort_key):
        terminalreporter.write_line(f"{'PASS' if by_label[label] else 'FAIL'}  {label}")


def _sort_key(label):
    head = label.split(" ", 1)[0].rstrip(".")
    return (int(head) if head.isdigit() else 999, label)
