"""Winning areas from parameterized templates.

A template H(x, k) is an AIG over the state variables and parameter
variables k.  It is always wrapped as H = (H' & P) | I, so I -> H -> P
holds for every k and only the inductiveness condition is left to
solve: exists k forall x,i exists c: H(x) -> H(x').
"""
import time

from . import sat
from .aig import ClauseList, Encoder
from .cnf import Cnf, Kind, compress_cnf
from .extract import cnf_interpol
from .qbf import QbfResourceError, TwoQbfSolver
from .winning import (REALIZABLE, UNKNOWN, UNREALIZABLE, Cancelled, CounterexampleSearch,
                      WinningOutcome)


class TriviallyUnrealizable(ValueError):
    """I and not P intersect, so no template can help."""


class Template:
    """``h`` is the wrapped template, ``core`` the unwrapped H'."""

    def __init__(self, spec, kind, n, params, core, h, groups, fixed=None):
        self.spec = spec
        self.kind = kind
        self.N = n
        self.params = params
        self.core = core
        self.h = h
        self.groups = groups
        self.fixed = fixed

    @property
    def num_params(self):
        return len(self.params)

    def evaluate(self, kvals, xvals, wrapped=True):
        """Value of H (or H') for parameter and state values (var -> bool)."""
        spec = self.spec
        values = {}
        for v in self.params:
            values[spec.cmap.node[v]] = bool(kvals[v])
        for v in spec.x:
            values[spec.cmap.node[v]] = bool(xvals.get(v, False))
        lit = self.h if wrapped else self.core
        return spec.aig.evaluate([lit], values)[0]

    def bind(self, kvals):
        """AIG literal of H with the parameters fixed (constant-folded)."""
        spec = self.spec
        subst = {spec.cmap.node[v]: int(bool(kvals[v])) for v in self.params}
        return spec.aig.compose([self.h], subst)[0]

    def instantiate(self, kvals, backend=None):
        """CNF over x equal to H(x, kvals)."""
        spec = self.spec
        if self.kind == "cnf" and self.fixed is None:
            f = _cnf_instance(self, kvals)
            return compress_cnf(f, backend=backend)
        lit = self.bind(kvals)
        sink = ClauseList()
        enc = Encoder(spec.aig, spec.cmap, sink)
        x = enc.need(lit)
        if x is True:
            return Cnf(variables=spec.x)
        if x is False:
            return Cnf([()], spec.x)
        m1 = sink.clauses + [(x,)]
        m0 = sink.clauses + [(-x,)]
        return compress_cnf(cnf_interpol(m1, m0, spec.x, backend), backend=backend)


def _cnf_instance(tmpl, kvals):
    """Direct reading of a CNF template: H' & P, or'ed with I."""
    spec = tmpl.spec
    kc, kv, kn = tmpl.groups["kc"], tmpl.groups["kv"], tmpl.groups["kn"]
    core = []
    for i in range(tmpl.N):
        if not kvals[kc[i]]:
            continue
        cl = [-x if kvals[kn[i][j]] else x
              for j, x in enumerate(spec.x) if kvals[kv[i][j]]]
        core.append(tuple(cl))
    clauses = list(core) + list(spec.safe.clauses)
    init = dict((abs(l), l > 0) for l in spec.init)
    if all(any(init.get(abs(l)) == (l > 0) for l in cl) for cl in clauses):
        return Cnf([c for c in clauses if not _tautology(c)], spec.x)
    out = Cnf(variables=spec.x)
    for cl in clauses:
        for l in spec.init:
            c = set(cl) | {l}
            if not _tautology(c):
                out.add(c)
    return out


def _tautology(c):
    c = set(c)
    return any(-l in c for l in c)


def _param(spec, name):
    lit = spec.aig.new_input()
    v = spec.pool.new(Kind.PARAM, name)
    spec.cmap.bind(lit >> 1, v)
    return v, lit


def _cnf_aig(aig, x):
    """AIG literal of a CNF (list of clauses over AIG literals)."""
    return aig.AND_all(aig.OR_all(c) for c in x)


def build_template(spec, kind, n, fixed=None):
    """Template with N clauses (``cnf``) or N gates (``aig``).  ``fixed``
    is an optional Cnf over x conjoined to every instance."""
    if n < 1:
        raise ValueError("template size must be at least 1")
    if kind not in ("cnf", "aig"):
        raise ValueError("unknown template kind %r" % kind)
    if spec.initial_unsafe():
        raise TriviallyUnrealizable("an initial state violates the safety property")
    aig = spec.aig
    xl = [spec.node(v) for v in spec.x]
    params = []
    groups = {}

    def new(name):
        v, lit = _param(spec, name)
        params.append(v)
        return v, lit

    if kind == "cnf":
        kc, kv, kn = [], [], []
        clauses = []
        for i in range(n):
            c, cl = new("kc_%d" % i)
            kc.append(c)
            kv.append([])
            kn.append([])
            lits = []
            for j, x in enumerate(xl):
                v, vl = new("kv_%d_%d" % (i, j))
                m, ml = new("kn_%d_%d" % (i, j))
                kv[i].append(v)
                kn[i].append(m)
                lits.append(aig.AND(vl, aig.XOR(x, ml)))
            clauses.append(aig.OR(cl ^ 1, aig.OR_all(lits)))
        core = aig.AND_all(clauses)
        groups = {"kc": kc, "kv": kv, "kn": kn}
    else:
        kv, kn, ku, km = [], [], [], []
        gates = []
        for i in range(n):
            kv.append([])
            kn.append([])
            ku.append([])
            km.append([])
            ins = []
            for j, x in enumerate(xl):
                v, vl = new("kv_%d_%d" % (i, j))
                m, ml = new("kn_%d_%d" % (i, j))
                kv[i].append(v)
                kn[i].append(m)
                ins.append(aig.OR(vl ^ 1, aig.XOR(x, ml)))
            for j in range(i):
                u, ul = new("ku_%d_%d" % (i, j))
                m, ml = new("km_%d_%d" % (i, j))
                ku[i].append(u)
                km[i].append(m)
                ins.append(aig.OR(ul ^ 1, aig.XOR(gates[j], ml)))
            gates.append(aig.AND_all(ins))
        out, outl = new("kn_out")
        core = aig.XOR(gates[-1], outl)
        groups = {"kv": kv, "kn": kn, "ku": ku, "km": km, "kn_out": out}
    node_of = {v: spec.node(v) for v in spec.x}

    def cnf_lit(l):
        return node_of[abs(l)] ^ (l < 0)

    p = _cnf_aig(aig, [[cnf_lit(l) for l in c] for c in spec.safe.clauses])
    i = aig.AND_all(cnf_lit(l) for l in spec.init)
    h = aig.OR(aig.AND(core, p), i)
    if fixed is not None:
        h = aig.AND(h, _cnf_aig(aig, [[cnf_lit(l) for l in c] for c in fixed.clauses]))
    return Template(spec, kind, n, params, core, h, groups, fixed)


def expected_params(kind, n, nx):
    if kind == "cnf":
        return 2 * n * nx + n
    return n * (2 * nx + n - 1) + 1


def templ_win_qbf(spec, tmpl, backend=None, max_iter=None, interrupt=None):
    """Single 2QBF query  exists k forall x,i exists c,aux: H -> H'.
    Returns the instantiated winning area or None (fail)."""
    aig = spec.aig
    sub = {spec.cmap.node[v]: l for v, l in zip(spec.x, spec.next_lits)}
    hn = aig.compose([tmpl.h], sub)[0]
    sink = ClauseList()
    enc = Encoder(aig, spec.cmap, sink)
    enc.assert_lit(aig.OR(tmpl.h ^ 1, hn))
    q = TwoQbfSolver(tmpl.params, spec.x + spec.i, pool=spec.pool, backend=backend,
                     max_iter=max_iter, interrupt=interrupt)
    q.add(sink.clauses)
    if not q.solve():
        return None
    kvals = {abs(l): l > 0 for l in q.model}
    return tmpl.instantiate(kvals, backend)


class _Cegis:
    """Incremental CEGIS state for one template."""

    def __init__(self, spec, tmpl, backend=None):
        self.spec = spec
        self.tmpl = tmpl
        self.backend = backend
        self.G = sat.new_session(backend=backend)
        self.enc = Encoder(spec.aig, spec.cmap, self)
        self.iterations = 0

    def add_clause(self, c):
        self.G.add_clause(c)

    def step(self, stop=None):
        """One candidate/check round: returns ("sat", W), ("fail", None)
        or ("refined", (x, i))."""
        spec, tmpl = self.spec, self.tmpl
        self.iterations += 1
        r = self.G.solve()
        if not r.sat:
            return "fail", None
        kvals = {v: r.model.value(v) for v in tmpl.params}
        f = tmpl.instantiate(kvals, self.backend)
        cex = CounterexampleSearch(spec, f, self.backend).find(stop)
        if cex is None:
            return "sat", f
        x, i = cex
        self._refine(x, i)
        return "refined", (x, i)

    def _refine(self, x, i):
        """H(x) -> H(T(x, i, t_c)) with a fresh copy t_c of c."""
        spec, aig = self.spec, self.spec.aig
        subst = {}
        for l in list(x) + list(i):
            subst[spec.cmap.node[abs(l)]] = int(l > 0)
        for v in spec.c:
            lit = aig.new_input()
            spec.cmap.bind(lit >> 1, spec.pool.new(Kind.AUX, spec.pool.name(v) + "@"))
            subst[spec.cmap.node[v]] = lit
        nxt = aig.compose(spec.next_lits, subst)
        hx = aig.compose([self.tmpl.h], {spec.cmap.node[abs(l)]: int(l > 0) for l in x})[0]
        hn = aig.compose([self.tmpl.h], {spec.cmap.node[v]: n for v, n in zip(spec.x, nxt)})[0]
        self.enc.assert_lit(aig.OR(hx ^ 1, hn))


def templ_win_sat(spec, tmpl, backend=None, max_iter=None, stop=None, deadline=None,
                  stats=None):
    """CEGIS with SAT solvers.  Returns the winning area or None (fail);
    raises :class:`TimeoutError` when an iteration or time budget runs out."""
    cg = _Cegis(spec, tmpl, backend)
    while True:
        if stop is not None and stop.is_set():
            raise Cancelled()
        if max_iter is not None and cg.iterations >= max_iter:
            raise TimeoutError("CEGIS iteration budget of %d exhausted" % max_iter)
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutError("CEGIS time budget exhausted")
        status, val = cg.step(stop)
        if status == "refined" and stats is not None:
            stats["refinements"] = stats.get("refinements", 0) + 1
        if status == "sat":
            return val
        if status == "fail":
            return None


def schedule(limit=None):
    """N = 1, 2, 3, 4, 8, 16, ..."""
    n = 1
    while limit is None or n <= limit:
        yield n
        n = n + 1 if n < 4 else 2 * n


def complete_size(kind, nx):
    """Smallest N whose template represents every function over nx bits."""
    return (1 << nx) + (1 if kind == "aig" else 0)


def templ_schedule(spec, kind="cnf", method="sat", max_n=None, time_budget=None,
                   iter_budget=None, backend=None, stop=None, fixed=None):
    """Try growing N until a winning area is found.  Unrealizable only
    when the template at a complete size fails; otherwise unknown."""
    t0 = time.monotonic()
    stats = {"refinements": 0, "N": 0}
    try:
        build_template(spec, kind, 1)
    except TriviallyUnrealizable:
        return WinningOutcome(UNREALIZABLE, stats=stats)
    full = complete_size(kind, len(spec.x))
    deadline = None if time_budget is None else t0 + time_budget

    def interrupt():
        return ((stop is not None and stop.is_set())
                or (deadline is not None and time.monotonic() > deadline))

    for n in schedule(max_n):
        stats["N"] = n
        tmpl = build_template(spec, kind, n, fixed)
        try:
            if method == "qbf":
                w = templ_win_qbf(spec, tmpl, backend, iter_budget, interrupt)
            else:
                left = None if iter_budget is None else max(0, iter_budget - stats["refinements"])
                w = templ_win_sat(spec, tmpl, backend, left, stop, deadline, stats)
        except (TimeoutError, QbfResourceError):
            if stop is not None and stop.is_set():
                raise Cancelled()
            break
        if w is not None:
            stats["time_ms"] = int(1000 * (time.monotonic() - t0))
            return WinningOutcome(REALIZABLE, w, "winning-area", stats)
        if n >= full:
            if fixed is not None:
                break
            stats["time_ms"] = int(1000 * (time.monotonic() - t0))
            return WinningOutcome(UNREALIZABLE, stats=stats)
    stats["time_ms"] = int(1000 * (time.monotonic() - t0))
    return WinningOutcome(UNKNOWN, stats=stats)
