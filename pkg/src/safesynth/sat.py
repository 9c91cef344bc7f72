"""Incremental SAT sessions with assumptions, models and cores.

Two interchangeable backends sit behind :class:`SatSession`: the
built-in CDCL solver (``"cdcl"``) and MiniSat via python-sat
(``"pysat"``).  Both are deterministic for a fixed seed and call
sequence.
"""
import threading

from .cdcl import CdclSolver

try:
    from pysat.solvers import Solver as _PysatSolver
except ImportError:  # pragma: no cover - optional backend
    _PysatSolver = None

DEFAULT_BACKEND = "pysat" if _PysatSolver is not None else "cdcl"


class _Counter:
    """Process-wide solver call counter, safe across threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self.sat_calls = 0
        self.qbf_calls = 0

    def bump(self, field):
        with self._lock:
            setattr(self, field, getattr(self, field) + 1)

    def reset(self):
        with self._lock:
            self.sat_calls = 0
            self.qbf_calls = 0


COUNTERS = _Counter()


def set_default_backend(name):
    global DEFAULT_BACKEND
    if name not in ("cdcl", "pysat"):
        raise ValueError("unknown SAT backend %r" % name)
    if name == "pysat" and _PysatSolver is None:
        raise ValueError("python-sat is not installed")
    DEFAULT_BACKEND = name


class Model:
    """Satisfying assignment; unknown variables read as false."""

    __slots__ = ("_vals", "_signed")

    def __init__(self, vals, signed):
        self._vals = vals
        self._signed = signed

    def value(self, lit):
        v = lit if lit > 0 else -lit
        vals = self._vals
        if self._signed:
            val = v <= len(vals) and vals[v - 1] > 0
        else:
            val = v < len(vals) and vals[v] == 1
        return val if lit > 0 else not val

    __getitem__ = value

    def cube(self, variables):
        """Minterm over ``variables`` as a tuple of literals."""
        return tuple(v if self.value(v) else -v for v in variables)


class SolveResult:
    __slots__ = ("sat", "model", "core")

    def __init__(self, sat, model=None, core=()):
        self.sat = sat
        self.model = model
        self.core = core

    def __bool__(self):
        return self.sat

    def __repr__(self):
        return "SolveResult(%s)" % ("sat" if self.sat else "unsat")


class SatSession:
    """One incremental solver instance.  Confined to a single thread."""

    def __init__(self, backend=None, seed=0):
        self.backend = backend or DEFAULT_BACKEND
        self.seed = seed
        self.calls = 0
        self.num_clauses = 0
        self._false = False
        self._top = 0
        if self.backend == "pysat":
            if _PysatSolver is None:
                raise ValueError("python-sat is not installed")
            self._s = _PysatSolver(name="m22")
        elif self.backend == "cdcl":
            self._s = CdclSolver(seed)
        else:
            raise ValueError("unknown SAT backend %r" % self.backend)
        self.last = None

    def add_clause(self, clause):
        self.num_clauses += 1
        if not clause:
            self._false = True
            return
        m = max(abs(l) for l in clause)
        if m > self._top:
            self._top = m
        self._s.add_clause(list(clause))

    def add_clauses(self, clauses):
        for c in clauses:
            self.add_clause(c)

    def solve(self, assumptions=()):
        """Solve under ``assumptions``; returns a :class:`SolveResult`."""
        self.calls += 1
        COUNTERS.bump("sat_calls")
        assumptions = list(assumptions)
        if self._false:
            res = SolveResult(False, core=())
        elif self.backend == "pysat":
            for l in assumptions:
                if abs(l) > self._top:
                    self._top = abs(l)
            if self._s.solve(assumptions=assumptions):
                res = SolveResult(True, Model(self._s.get_model() or [], True))
            else:
                core = self._s.get_core()
                res = SolveResult(False, core=tuple(core or ()))
        else:
            if self._s.solve(assumptions):
                res = SolveResult(True, Model(self._s.model, False))
            else:
                res = SolveResult(False, core=self._s.core)
        self.last = res
        return res

    def close(self):
        if self.backend == "pysat" and self._s is not None:
            self._s.delete()
            self._s = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def new_session(clauses=(), backend=None, seed=0):
    s = SatSession(backend, seed)
    s.add_clauses(clauses)
    return s


def is_sat(clauses, assumptions=(), backend=None):
    with new_session(clauses, backend) as s:
        return s.solve(assumptions).sat


def min_unsat_core(cube, f, fixed=(), backend=None):
    """Minimal subset of ``cube`` that, with ``fixed``, is unsatisfiable
    against ``f`` (a session or an iterable of clauses).

    Drop-literal loop accelerated by backend cores; every literal of the
    result is necessary, so the result is minimal (not minimum)."""
    session = f if isinstance(f, SatSession) else new_session(f, backend)
    fixed = list(fixed)
    res = session.solve(fixed + list(cube))
    if res.sat:
        raise ValueError("cube is satisfiable against the formula")
    in_core = set(res.core)
    cand = [l for l in cube if l in in_core]
    k = 0
    while k < len(cand):
        trial = cand[:k] + cand[k + 1:]
        res = session.solve(fixed + trial)
        if res.sat:
            k += 1
        else:
            in_core = set(res.core)
            cand = [l for l in trial if l in in_core]
    return tuple(cand)
