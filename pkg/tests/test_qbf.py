import pytest

from conftest import random_cnf
from safesynth.qbf import (QbfResourceError, TwoQbfQuery, TwoQbfSolver, qbf_solve, qbf_solve_expansion,
                           validate_model)


def test_small_queries():
    ok, model = qbf_solve(TwoQbfQuery([1], [2], [], [(1, 2)]))
    assert ok and model == (1,)
    xor = TwoQbfQuery([1], [2], [], [(1, 2), (-1, -2)])
    assert qbf_solve(xor) == (False, None)
    assert not qbf_solve_expansion(xor)
    skolem = TwoQbfQuery([], [2], [3], [(2, -3), (-2, 3)])
    assert qbf_solve(skolem)[0]
    assert qbf_solve_expansion(skolem)


def test_overlapping_blocks_rejected():
    with pytest.raises(ValueError):
        TwoQbfQuery([1], [1], [], [])


def test_expansion_bound():
    with pytest.raises(QbfResourceError):
        qbf_solve_expansion(TwoQbfQuery([], list(range(1, 20)), [], []), bound=16)


def test_iteration_budget():
    # needs one refinement per value of b
    q = TwoQbfQuery([1, 2], [3, 4], [], [(1, 3), (2, 4), (-1, -3), (-2, -4)])
    with pytest.raises(QbfResourceError):
        qbf_solve(q, max_iter=1)


def test_random_vs_expansion(rng):
    for _ in range(120):
        na, nb, nc = rng.randint(1, 4), rng.randint(1, 5), rng.randint(0, 4)
        n = na + nb + nc
        q = TwoQbfQuery(range(1, na + 1), range(na + 1, na + nb + 1), range(na + nb + 1, n + 1),
                        random_cnf(rng, n, rng.randint(2, 3 * n)))
        ok, model = qbf_solve(q)
        assert ok == qbf_solve_expansion(q)
        if ok:
            assert validate_model(q, model)


def test_incremental_assumptions_and_core():
    # exists a1 a2 forall b: (a1 | b) & (a2 | -b)
    s = TwoQbfSolver([1, 2], [3], clauses=[(1, 3), (2, -3)])
    assert s.solve()
    assert not s.solve([-1, 2])
    assert set(s.core) <= {-1, 2} and -1 in s.core
    s.add([(-2,)])
    assert not s.solve()


def test_qdimacs_text():
    text = TwoQbfQuery([1], [2], [3], [(1, -2, 3)]).to_qdimacs()
    assert text.splitlines() == ["p cnf 3 1", "e 1 0", "a 2 0", "e 3 0", "1 -2 3 0"]
