"""Solving prefix-shaped QBF queries  exists A forall B exists C . M.

The solver is a two-level counterexample-guided abstraction refinement
loop.  An abstraction session over A collects copies of the matrix
instantiated at refuting B-assignments (with fresh C copies).  A
candidate ``a`` is checked by a second CEGAR loop that searches for a
``b`` with no C completion: candidates ``b`` come from a session over
A and B that accumulates the negated matrix residuals at every C
assignment seen so far, and each ``b`` is checked with one SAT call on
the matrix itself.  All sessions are kept across calls, so queries can
be repeated cheaply under different assumptions on A.
"""
from . import sat
from .cnf import Cnf, Kind, VarPool, negate_pg, substitute
from .sat import COUNTERS


class QbfResourceError(RuntimeError):
    pass


class TwoQbfQuery:
    def __init__(self, a, b, c, matrix):
        self.a = list(a)
        self.b = list(b)
        self.c = list(c)
        self.matrix = matrix if isinstance(matrix, Cnf) else Cnf(matrix)
        blocks = [set(self.a), set(self.b), set(self.c)]
        if any(blocks[k] & blocks[l] for k, l in ((0, 1), (0, 2), (1, 2))):
            raise ValueError("quantifier blocks overlap")
        free = self.matrix.vars - blocks[0] - blocks[1] - blocks[2]
        # unlisted matrix variables are innermost existentials
        self.c += sorted(free)

    def to_qdimacs(self):
        nv = max([0] + self.a + self.b + self.c)
        lines = ["p cnf %d %d" % (nv, len(self.matrix))]
        for q, block in (("e", self.a), ("a", self.b), ("e", self.c)):
            if block:
                lines.append(q + " " + " ".join(map(str, block)) + " 0")
        for cl in self.matrix:
            lines.append(" ".join(map(str, cl)) + (" 0" if cl else "0"))
        return "\n".join(lines) + "\n"


class TwoQbfSolver:
    """Incremental solver for exists A forall B exists C . M.

    Every variable outside A and B is treated as inner existential, so
    callers only name the outer blocks.  ``add`` may be called between
    solves: clauses over A only constrain the abstraction directly,
    other clauses are instantiated into every recorded copy.
    ``solve(assumptions)`` takes literals over A; after an unsatisfiable
    answer ``core`` is a subset of the assumptions that is already
    unsatisfiable.  ``interrupt`` is polled once per refinement and
    aborts the solve with :class:`QbfResourceError` when it returns true."""

    def __init__(self, a, b, c=(), clauses=(), pool=None, backend=None, max_iter=None,
                 interrupt=None):
        self.A = list(a)
        self.B = list(b)
        self._aset = set(self.A)
        self._bset = set(self.B)
        self.C = []
        self._cset = set()
        if pool is None:
            pool = VarPool()
            pool.reserve(max(self.A + self.B + list(c) + [0]))
        self.pool = pool
        self.backend = backend
        self.max_iter = max_iter
        self.interrupt = interrupt
        self.inner = []
        self.alpha = sat.new_session(backend=backend)
        self.check = sat.new_session(backend=backend)
        self.beta = None
        self.copies = []
        self.model = None
        self.core = ()
        self.iterations = 0
        self._note_c(c)
        self.add(clauses)

    def extend_a(self, variables):
        """Declare further outer existential variables (before use)."""
        for v in variables:
            if v in self._cset or v in self._bset:
                raise ValueError("variable %d already quantified" % v)
            if v not in self._aset:
                self._aset.add(v)
                self.A.append(v)

    def _note_c(self, variables):
        for v in variables:
            if v not in self._aset and v not in self._bset and v not in self._cset:
                self._cset.add(v)
                self.C.append(v)

    def add(self, clauses):
        clauses = [tuple(cl) for cl in clauses]
        top = max((abs(l) for cl in clauses for l in cl), default=0)
        if top > self.pool.top:
            self.pool.reserve(top)
        fresh = []
        aset = self._aset
        for cl in clauses:
            if all(abs(l) in aset for l in cl):
                self.alpha.add_clause(cl)
            else:
                fresh.append(cl)
        if not fresh:
            return
        self._note_c(abs(l) for cl in fresh for l in cl)
        self.inner.extend(fresh)
        self.check.add_clauses(fresh)
        for mapping in self.copies:
            self.alpha.add_clauses(self._instantiate(fresh, mapping))
        self.beta = None

    def _instantiate(self, clauses, mapping):
        for cl in clauses:
            for l in cl:
                v = abs(l)
                if v in self._cset and v not in mapping:
                    mapping[v] = self.pool.new(Kind.AUX)
        return substitute(clauses, mapping)

    def _refine_alpha(self, bvals):
        mapping = dict(bvals)
        self.copies.append(mapping)
        self.alpha.add_clauses(self._instantiate(self.inner, mapping))

    def _counterexample(self, a):
        """A B-assignment refuting candidate ``a``, or None."""
        if self.beta is None:
            self.beta = sat.new_session(backend=self.backend)
        while True:
            r = self.beta.solve(a)
            if not r.sat:
                return None
            b = r.model.cube(self.B)
            v = self.check.solve(list(a) + list(b))
            if not v.sat:
                return {abs(l): l > 0 for l in b}
            cvals = {var: v.model.value(var) for var in self.C}
            residual = substitute(self.inner, cvals)
            self.beta.add_clauses(negate_pg(residual, self.pool).clauses)
            self._tick()

    def _tick(self):
        self.iterations += 1
        if self.max_iter is not None and self.iterations > self.max_iter:
            raise QbfResourceError("2QBF iteration budget of %d exhausted" % self.max_iter)
        if self.interrupt is not None and self.interrupt():
            raise QbfResourceError("2QBF solving interrupted")

    def solve(self, assumptions=()):
        COUNTERS.bump("qbf_calls")
        assumptions = list(assumptions)
        self.model = None
        self.core = ()
        while True:
            r = self.alpha.solve(assumptions)
            if not r.sat:
                self.core = tuple(r.core)
                return False
            a = r.model.cube(self.A)
            b = self._counterexample(a)
            if b is None:
                self.model = a
                return True
            self._refine_alpha(b)
            self._tick()


def qbf_solve(q, backend=None, max_iter=None):
    """Returns (verdict, model over A or None)."""
    s = TwoQbfSolver(q.a, q.b, q.c, q.matrix.clauses, backend=backend, max_iter=max_iter)
    if s.solve():
        return True, s.model
    return False, None


def qbf_solve_expansion(q, bound=16, backend=None):
    """Reference decision by full expansion of the universal block."""
    if len(q.b) > bound:
        raise QbfResourceError("expansion bound of %d universals exceeded" % bound)
    pool = VarPool()
    pool.reserve(max(q.a + q.b + q.c + [0]))
    s = sat.new_session(backend=backend)
    for bits in range(1 << len(q.b)):
        mapping = {v: bool(bits >> k & 1) for k, v in enumerate(q.b)}
        for v in q.c:
            mapping[v] = pool.new(Kind.AUX)
        s.add_clauses(substitute(q.matrix.clauses, mapping))
    return s.solve().sat


def validate_model(q, model, bound=16, backend=None):
    """Check forall B exists C . M under the A-assignment ``model``."""
    fixed = {abs(l): l > 0 for l in model}
    sub = TwoQbfQuery([], q.b, q.c, Cnf(substitute(q.matrix.clauses, fixed)))
    if len(q.b) <= bound:
        return qbf_solve_expansion(sub, bound, backend)
    return qbf_solve(sub, backend)[0]
