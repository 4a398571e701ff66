from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from orthocert.polyalg import Polynomial, monomials_of_degree, parse_polynomial

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "data"

CUBIC_F = "-27*x1^3 + 27*x2^2*x3 - 9*x3"
CUBIC_R = np.array([[2, -1, 2], [2, 2, -1], [-1, 2, 2]]) / 3.0


@pytest.fixture
def cubic_f():
    return parse_polynomial(CUBIC_F, 3)


@pytest.fixture
def cubic_g():
    return parse_polynomial((DATA / "cubic_g.poly").read_text(), 3)


@pytest.fixture
def cubic_R():
    return CUBIC_R.copy()


@pytest.fixture
def data_dir():
    return DATA


def random_homogeneous(n, d, rng, density=1.0, lo=-9, hi=9):
    """Integer-coefficient homogeneous polynomial; zero coefficients are redrawn."""
    exps = monomials_of_degree(n, d)
    keep = rng.random(len(exps)) < density
    keep[rng.integers(len(exps))] = True
    coefs = rng.integers(lo, hi + 1, size=len(exps)).astype(float)
    coefs[coefs == 0] = 1.0
    return Polynomial.from_arrays(n, exps[keep], coefs[keep])


def random_orthogonal(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


@st.composite
def polynomials(draw, nvars=st.integers(1, 3), max_degree=4, max_terms=6, homogeneous=False):
    n = draw(nvars) if isinstance(nvars, st.SearchStrategy) else nvars
    coef = st.integers(-20, 20).map(float)
    if homogeneous:
        d = draw(st.integers(1, max_degree))
        basis = monomials_of_degree(n, d)
        idx = draw(st.lists(st.integers(0, len(basis) - 1), min_size=1, max_size=max_terms))
        cs = draw(st.lists(coef.filter(bool), min_size=len(idx), max_size=len(idx)))
        return Polynomial.from_arrays(n, basis[idx], cs)
    mono = st.lists(st.integers(0, max_degree), min_size=n, max_size=n)
    items = draw(st.lists(st.tuples(mono, coef), max_size=max_terms))
    if not items:
        return Polynomial.zero(n)
    return Polynomial.from_arrays(n, [e for e, _ in items], [c for _, c in items])


# --------------------------------------------------------------------------
# one PASS/FAIL line per acceptance criterion


_criteria: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


def pytest_runtest_logreport(report):
    marks = getattr(report, "criteria", None)
    if not marks:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        for k in marks:
            _criteria.setdefault(k, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    report.criteria = [m.args[0] for m in item.iter_markers("criterion")]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        ok = all(_criteria[k])
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}")
