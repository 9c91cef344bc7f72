import itertools
import random

import pytest

from safesynth.aiger import SpecBuilder, parse_aag
from safesynth.bench import BenchParams, gen_benchmark


def bench(family, k, unrealizable=False):
    return parse_aag(gen_benchmark(BenchParams(family, k, unrealizable)))


def assignments(variables):
    """All var -> bool maps over ``variables``."""
    variables = list(variables)
    for bits in itertools.product((False, True), repeat=len(variables)):
        yield dict(zip(variables, bits))


def holds(clauses, val):
    return all(any(val[abs(l)] == (l > 0) for l in c) for c in clauses)


def projected(clauses, shown, val):
    """Exists the variables outside ``shown`` such that ``clauses`` hold."""
    hidden = sorted({abs(l) for c in clauses for l in c} - set(shown))
    for ext in assignments(hidden):
        if holds(clauses, {**val, **ext}):
            return True
    return False


def random_cnf(rng, nvars, nclauses, width=3, first=1):
    out = []
    for _ in range(nclauses):
        vs = rng.sample(range(first, first + nvars), min(width, nvars))
        out.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return out


def copy_spec(latch_fn, error_fn=None, controls=1, inputs=0):
    """One-latch spec x' = latch_fn(b, x, cs, us); error optional."""
    b = SpecBuilder()
    x = b.latch("x")
    cs = [b.control("c%d" % k) for k in range(controls)]
    us = [b.input("u%d" % k) for k in range(inputs)]
    b.set_next(x, latch_fn(b, x, cs, us))
    err = error_fn(b, x, cs, us) if error_fn else None
    return b.build(error=err)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
