import numpy as np
import pytest

from bikmeans.core import KMedianInstance, PointSet


def random_instance(rng, n, nc, dim=2, share=0):
    """Random squared-Euclidean instance; the first `share` centers sit on demands."""
    D = rng.normal(size=(n, dim))
    extra = rng.normal(size=(nc - share, dim)) * 1.5
    C = np.vstack([D[:share], extra]) if share else extra
    return KMedianInstance(PointSet(D), PointSet(C))


def line_instance(demands, centers):
    return KMedianInstance(PointSet(np.array(demands, float)), PointSet(np.array(centers, float)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---- acceptance summary: one line per test and one roll-up line per criterion

_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome == "failed":
        if _ACCEPTANCE.get(name) != "failed":
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    by_crit: dict[int, list[bool]] = {}
    for name, outcome in _ACCEPTANCE.items():
        ok = outcome == "passed"
        crit = int(name.split("_")[1][1:])
        by_crit.setdefault(crit, []).append(ok)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
    tr.write_sep("-", "per criterion")
    for crit in sorted(by_crit):
        oks = by_crit[crit]
        tr.write_line(f"criterion {crit}: {'PASS' if all(oks) else 'FAIL'} "
                      f"({sum(oks)}/{len(oks)} checks)")
