import threading

import pytest

from conftest import assignments, bench, holds, random_cnf
from safesynth.aiger import SpecBuilder
from safesynth.cnf import Cnf
from safesynth.extract import (CertificateError, ExtractConfig, _MSession, _Relation, _shared_vars, cnf_interpol,
                               dump_circuit, extract_qbf_learn, extract_sat_learn)
from safesynth.oracle import verify_controller
from safesynth.winning import Cancelled, sat_win1


def one_latch(invert):
    """x' = c (or not c), P = I = x."""
    b = SpecBuilder()
    x = b.latch("x")
    c = b.control("c")
    b.set_next(x, c ^ int(invert))
    s = b.build()
    s.init = (s.x[0],)
    s.safe = Cnf([(s.x[0],)])
    return s


def m_session(spec, w):
    rel = _Relation(spec)
    cvar = spec.c[0]
    shared = _shared_vars(rel, spec, cvar, set(), False)
    return _MSession(rel, w, cvar, shared, rel.clauses(), None)


def test_m1_m0_trace_copy():
    s = one_latch(False)
    x = s.x[0]
    ms = m_session(s, Cnf([(x,)]))
    assert ms.s.solve(ms.m1 + [x]).sat
    assert not ms.s.solve(ms.m1 + [-x]).sat
    assert not ms.s.solve(ms.m0).sat


def test_m1_m0_trace_inverted():
    s = one_latch(True)
    x = s.x[0]
    ms = m_session(s, Cnf([(x,)]))
    assert not ms.s.solve(ms.m1).sat
    assert ms.s.solve(ms.m0 + [x]).sat
    assert not ms.s.solve(ms.m0 + [-x]).sat


def test_m_true_region_empty():
    s = one_latch(False)
    ms = m_session(s, Cnf(variables=s.x))
    assert not ms.s.solve(ms.m1).sat
    assert not ms.s.solve(ms.m0).sat


def test_interpol_examples():
    assert cnf_interpol([(1,)], [(-1,)], [1]).clauses == [(1,)]
    assert cnf_interpol([()], [()], [1]).clauses == []
    with pytest.raises(ValueError):
        cnf_interpol([(1, 2)], [(1,)], [1])


def test_interpol_random(rng):
    done = 0
    while done < 60:
        shared = list(range(1, rng.randint(2, 7)))
        a_priv = [len(shared) + 1, len(shared) + 2]
        b_priv = [len(shared) + 3, len(shared) + 4]
        m1 = random_cnf(rng, len(shared) + 2, rng.randint(2, 8))
        m0 = [tuple(l if abs(l) <= len(shared) else (abs(l) + 2) * (1 if l > 0 else -1) for l in c)
              for c in random_cnf(rng, len(shared) + 2, rng.randint(2, 8))]
        every = shared + a_priv + b_priv
        if any(holds(m1, v) and holds(m0, v) for v in assignments(every)):
            continue
        f = cnf_interpol(m1, m0, shared)
        assert f.vars <= set(shared)
        for v in assignments(every):
            if holds(m1, v):
                assert holds(f.clauses, v)
            if holds(m0, v):
                assert not holds(f.clauses, v)
        done += 1


@pytest.mark.parametrize("extract", [extract_sat_learn, extract_qbf_learn])
def test_constant_controllers(extract):
    s = one_latch(False)
    ctrl = extract(s, Cnf([(s.x[0],)]))
    assert ctrl.outputs[s.c[0]] == 1 and ctrl.gates == 0
    s = one_latch(True)
    ctrl = extract(s, Cnf([(s.x[0],)]))
    assert ctrl.outputs[s.c[0]] == 0 and ctrl.solutions[s.c[0]].is_false


def test_qbf_learn_true_region():
    b = SpecBuilder()
    x = b.latch("x")
    b.set_next(x, b.control("c"))
    s = b.build()
    ctrl = extract_qbf_learn(s, Cnf(variables=s.x))
    assert ctrl.solutions[s.c[0]].clauses == []


CONFIGS = {
    "sat": lambda s, w: extract_sat_learn(s, w, ExtractConfig(dep_opt=False, check=True)),
    "sat-min": lambda s, w: extract_sat_learn(s, w, ExtractConfig(dep_opt=False, minimize=True)),
    "dep": lambda s, w: extract_sat_learn(s, w, ExtractConfig(dep_opt=True, check=True)),
    "dep-min": lambda s, w: extract_sat_learn(s, w, ExtractConfig(dep_opt=True, minimize=True)),
    "qbf": extract_qbf_learn,
}


@pytest.mark.parametrize("fam,k", [("cnt", 4), ("mv", 3), ("bs", 4), ("add", 2), ("mult", 2)])
@pytest.mark.parametrize("name", list(CONFIGS))
def test_controllers_verify(fam, k, name):
    s = bench(fam, k)
    w = sat_win1(s.clone()).W
    ctrl = CONFIGS[name](s.clone(), w)
    rep = verify_controller(s, ctrl, w, sim_steps=2000)
    assert rep.ok, rep.checks


@pytest.mark.parametrize("dep", [False, True])
def test_minimize_never_grows(dep):
    s = bench("add", 3)
    w = sat_win1(s.clone()).W
    plain = extract_sat_learn(s.clone(), w, ExtractConfig(dep_opt=dep))
    small = extract_sat_learn(s.clone(), w, ExtractConfig(dep_opt=dep, minimize=True))
    lits = lambda c: sum(f.num_literals() for f in c.solutions.values())  # noqa: E731
    assert lits(small) <= lits(plain)


def test_order_is_configurable():
    s = bench("add", 2)
    w = sat_win1(s.clone()).W
    ctrl = extract_sat_learn(s.clone(), w, ExtractConfig(order=sorted(s.c)))
    assert verify_controller(s, ctrl, w, sim_steps=500).ok


def test_rejects_bad_region():
    s = bench("cnt", 4)
    with pytest.raises(CertificateError):
        extract_sat_learn(s, s.safe)


def test_stop_event():
    ev = threading.Event()
    ev.set()
    s = bench("cnt", 4)
    w = sat_win1(s.clone()).W
    with pytest.raises(Cancelled):
        extract_sat_learn(s, w, ExtractConfig(stop=ev))


def _two_inputs():
    b = SpecBuilder()
    b.input("x1")
    b.input("x2")
    b.control("c")
    return b.build()


def test_dump_true_is_constant():
    s = _two_inputs()
    ctrl = dump_circuit(s, {s.c[0]: Cnf()})
    assert ctrl.gates == 0 and ctrl.outputs[s.c[0]] == 1


def test_dump_single_clause():
    s = _two_inputs()
    x1, x2 = s.i
    f = Cnf([(x1, -x2)])
    ctrl = dump_circuit(s, {s.c[0]: f})
    assert ctrl.gates <= 2
    for val in assignments(s.i):
        assert ctrl.evaluate(val)[s.c[0]] == f.evaluate(val)


def test_dump_matches_cnf(rng):
    b = SpecBuilder()
    for k in range(6):
        b.input("x%d" % k)
    b.control("c")
    s = b.build()
    for _ in range(20):
        clauses = [tuple(s.i[abs(l) - 1] * (1 if l > 0 else -1) for l in c)
                   for c in random_cnf(rng, 6, rng.randint(1, 6))]
        f = Cnf(clauses)
        ctrl = dump_circuit(s, {s.c[0]: f})
        for val in assignments(s.i):
            assert ctrl.evaluate(val)[s.c[0]] == f.evaluate(val)
