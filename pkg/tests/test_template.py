import time

import pytest

from conftest import assignments, bench
from safesynth.aiger import SpecBuilder
from safesynth.cnf import Cnf
from safesynth.oracle import ExplicitGame, check_winning_area
from safesynth.template import (TriviallyUnrealizable, build_template, complete_size, expected_params, schedule,
                                templ_schedule, templ_win_qbf, templ_win_sat)
from safesynth.winning import REALIZABLE, UNKNOWN, UNREALIZABLE


def three_latches():
    b = SpecBuilder()
    for n in ("x1", "x2", "x3"):
        l = b.latch(n)
        b.set_next(l, l)
    return b.build()


def diagonal():
    """From 00 the environment may jump to 11, from 11 it falls back;
    a != b is an error.  Only {00, 11} is winning, which needs two
    clauses."""
    b = SpecBuilder()
    a, bb = b.latch("a"), b.latch("b")
    u = b.input("u")
    go = b.aig.AND(u, b.aig.AND(a ^ 1, bb ^ 1))
    b.set_next(a, go)
    b.set_next(bb, go)
    return b.build(error=b.aig.XOR(a, bb))


def env_escape():
    """x' = u, error = x: the environment wins at once."""
    b = SpecBuilder()
    x = b.latch("x")
    b.set_next(x, b.input("u"))
    return b.build(error=x)


def test_param_counts():
    s = three_latches()
    assert build_template(s, "cnf", 3).num_params == 21 == expected_params("cnf", 3, 3)
    s = three_latches()
    assert build_template(s, "aig", 3).num_params == 25 == expected_params("aig", 3, 3)


def _by_name(spec, tmpl, ones):
    return {v: spec.pool.name(v) in ones for v in tmpl.params}


def test_cnf_worked_example():
    s = three_latches()
    t = build_template(s, "cnf", 3)
    k = _by_name(s, t, {"kc_0", "kc_1", "kv_0_0", "kv_0_1", "kv_1_2", "kn_0_1", "kn_1_2"})
    x1, x2, x3 = s.x
    for val in assignments(s.x):
        want = (val[x1] or not val[x2]) and not val[x3]
        assert t.evaluate(k, val, wrapped=False) == want
    f = t.instantiate(k)
    for val in assignments(s.x):
        assert f.evaluate(val) == ((val[x1] or not val[x2]) and not val[x3]) or not any(val.values())


def test_aig_worked_example():
    s = three_latches()
    t = build_template(s, "aig", 3)
    k = _by_name(s, t, {"kv_1_0", "kv_1_1", "kn_1_0", "kv_2_2", "kn_2_2", "ku_2_1", "km_2_1"})
    x1, x2, x3 = s.x
    for val in assignments(s.x):
        assert t.evaluate(k, val, wrapped=False) == ((val[x1] or not val[x2]) and not val[x3])


def test_wrapper_holds_for_any_parameters(rng):
    s = bench("cnt", 2)
    t = build_template(s, "cnf", 2)
    init = {abs(l): l > 0 for l in s.init}
    for _ in range(30):
        k = {v: rng.random() < 0.5 for v in t.params}
        assert t.evaluate(k, init)
        for val in assignments(s.x):
            if val[s.error_var]:
                assert not t.evaluate(k, val)


def test_trivially_unrealizable():
    b = SpecBuilder()
    x = b.latch("x")
    b.set_next(x, x)
    s = b.build(error=x)
    s.init = (-s.x[0], s.error_var)
    with pytest.raises(TriviallyUnrealizable):
        build_template(s, "cnf", 1)
    assert templ_schedule(s).verdict == UNREALIZABLE


@pytest.mark.parametrize("method", ["sat", "qbf"])
def test_always_safe_first_candidate(method):
    b = SpecBuilder()
    x = b.latch("x")
    b.set_next(x, b.control("c"))
    s = b.build()
    t = build_template(s, "cnf", 1)
    if method == "qbf":
        assert templ_win_qbf(s, t) is not None
    else:
        stats = {}
        assert templ_win_sat(s, t, stats=stats) is not None
        assert stats.get("refinements", 0) == 0


@pytest.mark.parametrize("fn", [templ_win_sat, templ_win_qbf])
def test_needs_two_clauses(fn):
    s = diagonal()
    g = ExplicitGame(s)
    assert g.realizable()
    assert fn(s, build_template(s, "cnf", 1)) is None
    s = diagonal()
    w = fn(s, build_template(s, "cnf", 2))
    assert w is not None and check_winning_area(s, w).ok


def test_single_clauses_really_fail():
    """Independent check: no clause over x (or none at all) gives a
    winning area (C & P) | I for the diagonal spec."""
    s = diagonal()
    a, b, e = s.x
    candidates = [()]
    for signs in assignments([a, b, e]):
        for used in assignments([a, b, e]):
            cl = tuple(v if signs[v] else -v for v in (a, b, e) if used[v])
            candidates.append(cl)
    for cl in candidates:
        h = Cnf(variables=s.x)
        for core in (cl, (-e,)):
            for l in s.init:
                c = set(core) | {l}
                if not any(-q in c for q in c):
                    h.add(c)
        assert not check_winning_area(s, h).ok, cl


def test_unrealizable_at_complete_size():
    out = templ_schedule(env_escape(), "cnf", "sat")
    assert out.verdict == UNREALIZABLE
    assert out.stats["N"] >= complete_size("cnf", 2) == 4


def test_schedule_sizes():
    assert list(schedule(16)) == [1, 2, 3, 4, 8, 16]
    assert complete_size("aig", 3) == 9


@pytest.mark.parametrize("kind", ["cnf", "aig"])
@pytest.mark.parametrize("method", ["sat", "qbf"])
def test_cnt4_small_n(kind, method):
    s = bench("cnt", 4)
    out = templ_schedule(s.clone(), kind, method)
    assert out.verdict == REALIZABLE and out.stats["N"] <= 4
    assert check_winning_area(s, out.W).ok


def test_cnt6_qbf():
    s = bench("cnt", 6)
    out = templ_schedule(s.clone(), "cnf", "qbf")
    assert out.realizable and out.stats["N"] <= 4
    assert check_winning_area(s, out.W).ok


@pytest.mark.parametrize("k", range(2, 11))
def test_cnt_cegis_fast(k):
    s = bench("cnt", k)
    t0 = time.monotonic()
    out = templ_schedule(s.clone(), "cnf", "sat")
    assert time.monotonic() - t0 < 10
    assert out.realizable and out.stats["N"] <= 4
    assert check_winning_area(s, out.W).ok


@pytest.mark.parametrize("fam,k,unreal", [("mv", 3, False), ("mv", 3, True), ("bs", 4, False),
                                          ("bs", 4, True), ("add", 2, False), ("mult", 2, False)])
def test_sat_and_qbf_agree(fam, k, unreal):
    s = bench(fam, k, unreal)
    real = ExplicitGame(s).realizable()
    for method in ("sat", "qbf"):
        out = templ_schedule(s.clone(), "cnf", method, time_budget=30)
        assert out.verdict in (REALIZABLE, UNREALIZABLE)
        assert out.realizable == real
        if out.realizable:
            assert check_winning_area(s, out.W).ok


def test_budget_gives_unknown():
    out = templ_schedule(bench("cnt", 8, True), "cnf", "sat", iter_budget=1)
    assert out.verdict == UNKNOWN


def test_fixed_clauses_respected():
    s = bench("cnt", 4)
    fixed = Cnf([(-s.x[-2],)], s.x)
    out = templ_schedule(s.clone(), "cnf", "sat", fixed=fixed)
    assert out.realizable
    assert check_winning_area(s, out.W).ok
    for val in assignments(s.x):
        if out.W.evaluate(val):
            assert not val[s.x[-2]]
