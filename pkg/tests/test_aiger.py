import pytest

from conftest import assignments, bench
from safesynth import sat
from safesynth.aig import Aig
from safesynth.aiger import (ERROR_LATCH_NAME, BinaryAigerUnsupported, DanglingLiteral, MalformedHeader,
                             MultipleOutputs, NonZeroInit, SpecBuilder, expand_circuit, parse_aag, write_aag)
from safesynth.extract import ControllerCircuit

EXAMPLE = """aag 4 2 1 1 1
2
4
6 8
8
8 6 4
i0 controllable_c
i1 u
"""


def test_parse_example():
    s = parse_aag(EXAMPLE)
    assert (len(s.x), len(s.i), len(s.c)) == (2, 1, 1)
    assert s.pool.name(s.x[-1]) == ERROR_LATCH_NAME
    assert s.safe.clauses == [(-s.error_var,)]
    assert s.init == tuple(-v for v in s.x)


def test_no_controls():
    s = parse_aag(EXAMPLE.replace("controllable_c", "plain"))
    assert s.c == [] and len(s.i) == 2


@pytest.mark.parametrize("text,err", [
    ("agg 1 0 0 0 0\n", MalformedHeader),
    ("aag 1 1 0 0\n2\n", MalformedHeader),
    ("aag 2 1 0 1 0\n2\n4\n", DanglingLiteral),
    ("aag 1 1 0 2 0\n2\n2\n2\n", MultipleOutputs),
    ("aag 1 0 1 1 0\n2 3 1\n2\n", NonZeroInit),
    ("aig 1 1 0 0 0\n", BinaryAigerUnsupported),
    ("aag 3 1 0 1 1\n2\n6\n6 2 4\n", DanglingLiteral),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_aag(text)


def test_uninitialized_latch_rejected():
    with pytest.raises(NonZeroInit):
        parse_aag("aag 1 0 1 1 0\n2 2 2\n2\n")


def _next_states(spec, xs, ins, cs):
    """All x' consistent with T for one (x, i, c) point."""
    s = sat.new_session(spec.T.clauses)
    assume = [v if val else -v for v, val in {**xs, **ins, **cs}.items()]
    found = []
    while True:
        r = s.solve(assume)
        if not r.sat:
            return found
        nxt = r.model.cube(spec.x_next)
        found.append(tuple(l > 0 for l in nxt))
        s.add_clause([-l for l in nxt])


def test_cnt2_transition_relation_exhaustive():
    s = bench("cnt", 2)
    assert (len(s.x), len(s.i), len(s.c)) == (3, 1, 1)
    b0, b1, err = s.x
    for xs in assignments(s.x):
        for ins in assignments(s.i):
            for cs in assignments(s.c):
                nexts = _next_states(s, xs, ins, cs)
                assert len(nexts) == 1
                cnt = xs[b0] + 2 * xs[b1]
                inc = ins[s.i[0]]
                new = 0 if (cnt == 1 and cs[s.c[0]]) else (cnt + inc) % 4
                want = (bool(new & 1), bool(new & 2), xs[err] or cnt == 3)
                assert nexts[0] == want


def test_copy_control_transition():
    b = SpecBuilder()
    x = b.latch("x")
    c = b.control("c")
    b.set_next(x, c)
    s = b.build()
    for val in assignments(s.x + s.c):
        (nxt,) = _next_states(s, {s.x[0]: val[s.x[0]]}, {}, {s.c[0]: val[s.c[0]]})
        assert nxt == (val[s.c[0]],)


def test_constant_false_error_latch_stuck():
    b = SpecBuilder()
    x = b.latch("x")
    b.set_next(x, x ^ 1)
    s = b.build(error=0)
    for xs in assignments(s.x):
        (nxt,) = _next_states(s, xs, {}, {})
        if not xs[s.error_var]:
            assert not nxt[-1]


def test_expand_independent_of_control():
    b = SpecBuilder()
    x = b.latch("x")
    u = b.input("u")
    b.control("c")
    b.set_next(x, u)
    s = b.build()
    assert len(expand_circuit(s, s.c)) == 1


def test_expand_two_controls_bounded():
    b = SpecBuilder()
    x = b.latch("x")
    y = b.latch("y")
    c1, c2 = b.control("c1"), b.control("c2")
    b.set_next(x, b.aig.XOR(x, c1))
    b.set_next(y, b.aig.AND(y, c2))
    s = b.build()
    assert len(expand_circuit(s, s.c)) <= 4


def test_expand_cnt4_semantics():
    s = bench("cnt", 4)
    copies = expand_circuit(s, s.c)
    assert len(copies) <= 2
    nodes = s.x + s.i + s.c
    for val in assignments(nodes):
        base = {s.cmap.node[v]: val[v] for v in nodes}
        for assign, lits, _ in copies:
            fixed = dict(base)
            fixed.update({s.cmap.node[v]: b for v, b in assign.items()})
            if all(val[v] == b for v, b in assign.items()):
                assert s.aig.evaluate(lits, base) == s.aig.evaluate(s.next_lits, base)


def test_write_constant_controller():
    s = parse_aag(EXAMPLE)
    ctrl = ControllerCircuit(Aig(), {}, {s.c[0]: 1})
    text = write_aag(s, ctrl)
    header = text.splitlines()[0].split()
    assert header[0] == "aag" and header[2] == "1"
    impl = parse_aag(text)
    assert impl.c == [] and len(impl.i) == 1


def test_write_requires_controller():
    with pytest.raises(Exception):
        write_aag(parse_aag(EXAMPLE))


def test_write_parse_write_fixpoint():
    for fam, k in (("cnt", 3), ("add", 2), ("bs", 4)):
        s = bench(fam, k)
        ctrl = ControllerCircuit(Aig(), {}, {c: 0 for c in s.c})
        once = write_aag(s, ctrl)
        twice = write_aag(parse_aag(once))
        assert write_aag(parse_aag(twice)) == twice
        assert twice == once


def test_clone_is_independent():
    s = bench("cnt", 3)
    t = s.clone()
    assert t.x == s.x and t.T.clauses == s.T.clauses
    t.pool.new(s.pool.kind(s.x[0]))
    assert t.pool.top > s.pool.top
