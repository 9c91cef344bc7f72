import threading

import pytest

from conftest import bench
from safesynth.aiger import SpecBuilder
from safesynth.cnf import Cnf
from safesynth.oracle import ExplicitGame, check_winning_area, equivalent, states_to_cnf
from safesynth.winning import (REALIZABLE, UNKNOWN, UNREALIZABLE, Cancelled, CounterexampleSearch, WinConfig,
                               export_w, import_w, qbf_win, sat_win1, solve_win)

ALL = {
    "sat1": WinConfig(),
    "sat1-eager": WinConfig(lazy_g=False),
    "rg": WinConfig(opt_rg=True),
    "rge": WinConfig(opt_rg=True, expand_cex=True, expand_gen=True),
    "rc": WinConfig(opt_rc=True),
    "exp": WinConfig(expand_cex=True, expand_gen=True, check_invariants=True),
    "qbf": WinConfig(backend="qbf"),
    "qbf-rg": WinConfig(backend="qbf", opt_rg=True),
}
EXACT = ("sat1", "sat1-eager", "exp", "qbf")
SUITE = [("cnt", 3, False), ("cnt", 3, True), ("cnt", 5, False), ("mv", 3, False), ("mv", 3, True),
         ("bs", 4, False), ("bs", 4, True), ("add", 2, False), ("mult", 2, False)]


def oracle(spec):
    g = ExplicitGame(spec)
    w = g.winning_region()
    return g.realizable(w), states_to_cnf(spec.x, w)


def rg_example():
    """a' = a, b' = b | c, error = a & b.  States with a=1 are never
    reached, so with RG the first lesson is the unit clause -a."""
    b = SpecBuilder()
    a, bb = b.latch("a"), b.latch("b")
    b.input("u")
    c = b.control("c")
    b.set_next(a, a)
    b.set_next(bb, b.aig.OR(bb, c))
    return b.build(error=b.aig.AND(a, bb))


@pytest.mark.parametrize("fn", [sat_win1, qbf_win])
def test_initial_unsafe(fn):
    b = SpecBuilder()
    x = b.latch("x")
    b.set_next(x, x)
    s = b.build(error=x)
    s.init = tuple(-v for v in s.x[:-1]) + (s.x[-1],)
    out = fn(s)
    assert out.verdict == UNREALIZABLE
    assert out.stats["refinements"] == 0


@pytest.mark.parametrize("fn", [sat_win1, qbf_win])
def test_always_safe(fn):
    b = SpecBuilder()
    x = b.latch("x")
    b.set_next(x, b.control("c"))
    out = fn(b.build())
    assert out.realizable and out.W.clauses == [] and out.stats["refinements"] == 0


@pytest.mark.parametrize("fam,k,unreal", SUITE)
@pytest.mark.parametrize("name", list(ALL))
def test_against_oracle(fam, k, unreal, name):
    spec = bench(fam, k, unreal)
    real, region = oracle(spec)
    out = solve_win(spec.clone(), ALL[name])
    assert out.realizable == real
    if real:
        assert check_winning_area(spec, out.W).ok
        if name in EXACT:
            assert out.kind == "winning-region"
            assert equivalent(out.W, region)
        else:
            assert out.kind == "winning-area"


def test_cnt4_exact_both_engines():
    spec = bench("cnt", 4)
    _, region = oracle(spec)
    for fn in (sat_win1, qbf_win):
        assert equivalent(fn(spec.clone()).W, region)


def test_cnt_refinements_double():
    counts = [sat_win1(bench("cnt", k)).stats["refinements"] for k in range(4, 8)]
    assert counts == [2 ** (k - 1) for k in range(4, 8)]


def test_rg_drops_extra_literal():
    spec = rg_example()
    a, b_ = spec.x[0], spec.x[1]
    runs = {}
    for name, cfg in (("off", WinConfig()), ("rg", WinConfig(opt_rg=True))):
        learned = []
        out = sat_win1(spec.clone(), cfg.replace(on_clause=learned.append))
        runs[name] = (out, learned)
    assert sorted(runs["off"][1][0]) == sorted((-a, -b_))
    assert runs["rg"][1][0] == (-a,)
    assert runs["rg"][0].realizable
    assert check_winning_area(spec, runs["rg"][0].W).ok


def test_rg_with_all_initial_states_matches_plain():
    spec = bench("cnt", 3)
    spec.init = ()
    real, region = oracle(spec)
    for cfg in (WinConfig(), WinConfig(opt_rg=True)):
        out = sat_win1(spec.clone(), cfg)
        assert out.realizable == real


def test_rc_not_extractable():
    out = sat_win1(bench("cnt", 4), WinConfig(opt_rc=True))
    assert out.realizable and not out.extractable


def test_expansion_same_region():
    spec = bench("cnt", 6)
    w1 = sat_win1(spec.clone()).W
    w2 = sat_win1(spec.clone(), WinConfig(expand_cex=True, expand_gen=True)).W
    assert equivalent(w1, w2)


def test_expansion_budget_falls_back():
    spec = bench("mult", 2)
    out = sat_win1(spec, WinConfig(expand_cex=True, expand_gen=True, expansion_limit=1))
    assert out.realizable


def test_budgets_give_unknown():
    out = sat_win1(bench("cnt", 6), WinConfig(iter_budget=1))
    assert out.verdict == UNKNOWN
    out = qbf_win(bench("cnt", 6), WinConfig(backend="qbf", iter_budget=1))
    assert out.verdict == UNKNOWN


def test_stop_event_cancels():
    ev = threading.Event()
    ev.set()
    with pytest.raises(Cancelled):
        sat_win1(bench("cnt", 4), WinConfig(stop=ev))


def test_injected_clauses_make_an_area():
    spec = bench("cnt", 4)
    _, region = oracle(spec)
    sent = [list(region.clauses)]

    def inbox():
        out = sent[0]
        sent[0] = []
        return out

    out = sat_win1(spec.clone(), WinConfig(inbox=inbox))
    assert out.realizable and out.kind == "winning-area"
    assert check_winning_area(spec, out.W).ok


def test_export_import_roundtrip():
    spec = bench("cnt", 4)
    w = sat_win1(spec.clone()).W
    text = export_w(spec, w)
    assert "__error_latch" in text
    again = import_w(bench("cnt", 4), text)
    assert again.clauses == w.clauses
    with pytest.raises(ValueError):
        import_w(bench("mv", 3), text)


def test_counterexample_search():
    spec = bench("cnt", 4)
    _, region = oracle(spec)
    assert CounterexampleSearch(spec, region).find() is None
    x, i = CounterexampleSearch(spec, spec.safe).find()
    assert len(x) == len(spec.x) and len(i) == len(spec.i)


def test_realizable_constant():
    assert REALIZABLE != UNREALIZABLE != UNKNOWN
    assert sat_win1(bench("cnt", 3), WinConfig(opt_rg=True)).W is not None
    assert isinstance(sat_win1(bench("cnt", 3)).W, Cnf)
