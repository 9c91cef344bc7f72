import pytest

from conftest import bench
from safesynth.aiger import parse_aag, read_aag
from safesynth.bench import FAMILIES, BenchParams, gen_benchmark
from safesynth.oracle import ExplicitGame


def counts(s):
    return len(s.x), len(s.i), len(s.c)


@pytest.mark.parametrize("k", [2, 3, 5, 10])
def test_cnt_sizes(k):
    assert counts(bench("cnt", k)) == (k + 1, 1, 1)
    assert counts(bench("cnt", k, True)) == (k + 1, 1, 1)


@pytest.mark.parametrize("k", [2, 4, 6])
def test_mv_sizes(k):
    assert counts(bench("mv", k)) == (k + 1, k - 1, k - 1)


def test_other_sizes():
    assert counts(bench("add", 3)) == (2, 6, 3)
    assert counts(bench("mult", 2)) == (1, 4, 4)
    assert counts(bench("bs", 8)) == (9, 3, 1)


@pytest.mark.parametrize("fam,k", [("cnt", 2), ("cnt", 3), ("cnt", 5), ("mv", 2), ("mv", 4), ("bs", 4),
                                   ("bs", 8), ("add", 2), ("mult", 2)])
def test_verdicts(fam, k):
    assert ExplicitGame(bench(fam, k)).realizable()
    if fam in ("cnt", "mv", "bs"):
        assert not ExplicitGame(bench(fam, k, True)).realizable()


def test_cnt_semantics_by_simulation():
    """Resetting whenever possible keeps cnt_4 below 15; never resetting
    reaches it after 15 increments."""
    s = bench("cnt", 4)
    node = s.cmap.node

    def run(reset):
        st = {v: False for v in s.x}
        for _ in range(40):
            vals = {node[v]: st[v] for v in s.x}
            vals[node[s.i[0]]] = True
            vals[node[s.c[0]]] = reset
            st = dict(zip(s.x, s.aig.evaluate(s.next_lits, vals)))
        return st[s.error_var]

    assert not run(True)
    assert run(False)


def test_roundtrip_and_comment():
    for fam in FAMILIES:
        p = BenchParams(fam, 4)
        text = gen_benchmark(p)
        assert p.name in read_aag(text).comments[0]
        assert gen_benchmark(p) == text
        parse_aag(text)


@pytest.mark.parametrize("p", [BenchParams("nope", 3), BenchParams("cnt", 0), BenchParams("cnt", 1),
                               BenchParams("bs", 6), BenchParams("add", 3, True), BenchParams("mult", 2, True)])
def test_invalid_params(p):
    with pytest.raises(ValueError):
        gen_benchmark(p)
