import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_pd(rng, d, shift=None):
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return x @ x.conj().T + (d if shift is None else shift) * np.eye(d)


def random_hermitian(rng, d):
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (x + x.conj().T) / 2


def symmetric_hoppings(rng, n):
    """Nonzero hoppings with arg t_{n-i} = arg t_i and unrelated moduli."""
    theta = rng.uniform(-np.pi, np.pi, n - 1)
    theta = (theta + theta[::-1]) / 2
    mod = rng.uniform(0.5, 1.5, n - 1)
    return tuple(mod * np.exp(1j * theta))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def spectra_match(w1, w2, tol):
    """Multiset equality of two complex spectra up to ``tol`` (greedy matching)."""
    rest = list(w2)
    for z in w1:
        d = np.abs(np.asarray(rest) - z)
        k = int(np.argmin(d))
        if d[k] > tol:
            return False
        rest.pop(k)
    return not rest


# --- acceptance summary ------------------------------------------------------

CRITERIA = {
    1: ("oracle equivalence", 120.0),
    2: ("unit-disk classification", 60.0),
    3: ("conds classification", 60.0),
    4: ("parity classification", 30.0),
    5: ("phase transition", 5.0),
    6: ("metric lift", 30.0),
    7: ("Schmidt tightness", 10.0),
    8: ("three-way local-observable equivalence", 60.0),
    9: ("similarity transform", 5.0),
    10: ("PT duality and diagonal independence", 30.0),
}
_outcomes: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(mark.args[0], []).append((item.name, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_outcomes):
        name, budget = CRITERIA[k]
        runs = _outcomes[k]
        elapsed = sum(r[2] for r in runs)
        failed = [r[0] for r in runs if not r[1]]
        ok = not failed and elapsed <= budget
        line = f"criterion {k:2d} {name}: {'PASS' if ok else 'FAIL'} ({len(runs) - len(failed)}/{len(runs)} tests, {elapsed:.1f}s of {budget:.0f}s)"
        if failed:
            line += " failing: " + ", ".join(failed)
        tr.write_line(line)
