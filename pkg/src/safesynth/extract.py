"""Controllers from winning areas.

Every control c_j gets a CNF definition F_j with M1 -> F_j -> not M0,
where M1 (M0) describes the situations in which c_j must be 1 (0) to
stay in W.  ``extract_sat_learn`` computes F_j as an interpolant by CNF
learning with a single SAT session per control; ``extract_qbf_learn``
learns F_j over (x, i) with 2QBF queries.  Each solution is
resubstituted into the transition relation (c_j <-> F_j), so later
controls are computed against the earlier ones; ``dump_circuit`` inlines
the resulting cascade into one AIG over x and i.
"""
from . import sat
from .aig import Aig, ClauseList, Encoder
from .cnf import Cnf, Kind, negate, negate_pg, substitute
from .oracle import check_winning_area
from .qbf import TwoQbfSolver
from .winning import Cancelled


class CertificateError(ValueError):
    """The given W is not a winning area."""


class ControllerCircuit:
    """Combinational controller: ``inputs`` maps state/input vars to AIG
    input nodes, ``outputs`` maps each control var to an AIG literal."""

    def __init__(self, aig, inputs, outputs, solutions=None, origin=None):
        self.aig = aig
        self.inputs = inputs
        self.outputs = outputs
        self.solutions = solutions or {}
        self.origin = origin

    @property
    def gates(self):
        return len(self.aig.cone(list(self.outputs.values())))

    def evaluate(self, values):
        """Control values for a var -> bool assignment of x and i."""
        ins = {node: bool(values.get(var, False)) for var, node in self.inputs.items()}
        outs = self.aig.evaluate(list(self.outputs.values()), ins)
        return dict(zip(self.outputs, outs))

    def __repr__(self):
        return "ControllerCircuit(%d outputs, %d gates)" % (len(self.outputs), self.gates)


class ExtractConfig:
    """``order``: control vars in processing order (default: descending
    index for interpolation, ascending for QBF learning).  ``check``
    asserts M1 & M0 unsat and both interpolant implications."""

    def __init__(self, dep_opt=True, minimize=False, order=None, backend=None,
                 check=False, check_w=True, stop=None):
        self.dep_opt = dep_opt
        self.minimize = minimize
        self.order = order
        self.backend = backend
        self.check = check
        self.check_w = check_w
        self.stop = stop


def cnf_interpol(m1, m0, shared, backend=None):
    """CNF F over ``shared`` with M1 -> F -> not M0 (M1 & M0 must be
    unsatisfiable).  F grows by negated minimal cores of M0-models
    against M1."""
    shared = sorted(shared)
    pos = sat.new_session(m1, backend)
    neg = sat.new_session(m0, backend)
    f = Cnf(variables=shared)
    while True:
        r = neg.solve()
        if not r.sat:
            return f
        d = r.model.cube(shared)
        try:
            core = sat.min_unsat_core(d, pos)
        except ValueError:
            raise ValueError("interpolation needs an unsatisfiable M1 & M0")
        cl = negate(core)
        f.add(cl)
        neg.add_clause(cl)


def _clause_vars(clauses):
    return {abs(l) for c in clauses for l in c}


class _Relation:
    """T' as clauses plus a dependency graph var -> defining vars."""

    def __init__(self, spec):
        self.spec = spec
        sink = ClauseList()
        enc = Encoder(spec.aig, spec.cmap, sink)
        self.next = {v: enc.need(l) for v, l in zip(spec.x, spec.next_lits)}
        self.base = list(sink.clauses)
        self.deps = {}
        for v in enc.aux:
            a, b = spec.aig.fanins[spec.cmap.node[v]]
            self.deps[v] = {spec.cmap.var[n >> 1] for n in (a, b) if n >> 1}
        self.defs = {}

    def define(self, cvar, f):
        """Add c <-> F with one auxiliary per non-unit clause; returns the
        clauses (kept separately so that definitions can be swapped)."""
        pool = self.spec.pool
        clauses = []
        conj = []
        deps = set()
        ys = []
        for cl in f.clauses:
            if len(cl) == 1:
                conj.append(cl[0])
                deps.add(abs(cl[0]))
                continue
            if not cl:
                conj = [False]
                break
            y = pool.new(Kind.AUX, "y_%s" % pool.name(cvar))
            ys.append(y)
            clauses.append((-y,) + tuple(cl))
            for l in cl:
                clauses.append((y, -l))
            self.deps[y] = {abs(l) for l in cl}
            conj.append(y)
            deps.add(y)
        if conj == [False]:
            clauses = [(-cvar,)]
            deps = set()
            for y in ys:
                del self.deps[y]
        else:
            for l in conj:
                clauses.append((-cvar, l))
            clauses.append((cvar,) + tuple(-l for l in conj))
        self.deps[cvar] = deps
        self.defs[cvar] = clauses
        return clauses

    def undefine(self, cvar):
        self.defs.pop(cvar, None)
        self.deps.pop(cvar, None)

    def clauses(self, skip=None):
        out = list(self.base)
        for c, d in self.defs.items():
            if c != skip:
                out.extend(d)
        return out

    def dependents(self, var):
        """All vars whose definition cone contains ``var``."""
        users = {}
        for v, ds in self.deps.items():
            for d in ds:
                users.setdefault(d, []).append(v)
        out = {var}
        stack = [var]
        while stack:
            for u in users.get(stack.pop(), ()):
                if u not in out:
                    out.add(u)
                    stack.append(u)
        return out

    def acyclic(self):
        state = {}
        for root in self.deps:
            if root in state:
                continue
            stack = [(root, iter(self.deps.get(root, ())))]
            state[root] = 1
            while stack:
                v, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[v] = 2
                    stack.pop()
                    continue
                s = state.get(nxt)
                if s == 1:
                    return False
                if s is None:
                    state[nxt] = 1
                    stack.append((nxt, iter(self.deps.get(nxt, ()))))
        return True


class _MSession:
    """One SAT session holding W(x), a copy of T' with W(x') (good) and
    a copy of T' with not W(x') (bad).  Only ``shared`` vars are common to
    both copies; c_j is renamed to ``cg``/``cb`` so that M1 is assumed by
    (cg, -cb) and M0 by (-cg, cb)."""

    def __init__(self, rel, w, cvar, shared, clauses, backend):
        spec = rel.spec
        pool = spec.pool
        wn = substitute(w.clauses, rel.next)
        good = clauses + wn
        bad = clauses + list(negate_pg(wn, pool).clauses)
        self.pool = pool
        self.s = sat.new_session(w.clauses, backend)
        self.shared = sorted(shared)
        self.cg = self._copy(good, cvar, shared, pool)
        self.cb = self._copy(bad, cvar, shared, pool)

    def _copy(self, clauses, cvar, shared, pool):
        mapping = {}
        for v in _clause_vars(clauses):
            if v not in shared:
                mapping[v] = pool.new(Kind.AUX)
        if cvar not in mapping:
            mapping[cvar] = pool.new(Kind.AUX)
        self.s.add_clauses(substitute(clauses, mapping))
        return mapping[cvar]

    @property
    def m1(self):
        return [self.cg, -self.cb]

    @property
    def m0(self):
        return [-self.cg, self.cb]


def _shared_vars(rel, spec, cvar, solved, dep_opt):
    inputs = set(spec.x) | set(spec.i)
    if not dep_opt:
        return inputs | {c for c in spec.c if c != cvar and c not in solved}
    blocked = rel.dependents(cvar)
    every = set(rel.deps) | inputs | set(spec.c)
    return {v for v in every if v not in blocked}


def _interpolate(ms, stop=None):
    """Incremental CNF learning: F-clauses are guarded by ``act`` so
    that the M1 queries see them switched off."""
    f = Cnf(variables=ms.shared)
    act = ms.pool.new(Kind.ACT, "act_F")
    while True:
        if stop is not None and stop.is_set():
            raise Cancelled()
        r = ms.s.solve(ms.m0 + [act])
        if not r.sat:
            return f
        d = r.model.cube(ms.shared)
        core = sat.min_unsat_core(d, ms.s, ms.m1)
        cl = negate(core)
        f.add(cl)
        ms.s.add_clause((-act,) + tuple(cl))


def _check_interpolant(ms, f):
    s = ms.s
    for cl in f.clauses:
        assert not s.solve(ms.m1 + list(negate(cl))).sat, "M1 -> F_j violated"
    act = ms.pool.new(Kind.ACT)
    for cl in f.clauses:
        s.add_clause((-act,) + tuple(cl))
    assert not s.solve(ms.m0 + [act]).sat, "F_j -> not M0 violated"
    s.add_clause((-act,))


def _check_disjoint(rel, w, cvar, shared, clauses, backend):
    """M1 & M0 unsat: both pairs of copies in one session."""
    a = _MSession(rel, w, cvar, shared, clauses, backend)
    pool = rel.spec.pool
    b_g = a._copy(clauses + substitute(w.clauses, rel.next), cvar, shared, pool)
    b_b = a._copy(clauses + list(negate_pg(substitute(w.clauses, rel.next), pool).clauses),
                  cvar, shared, pool)
    assert not a.s.solve(a.m1 + [-b_g, b_b]).sat, "M1 & M0 satisfiable"


def _minimize(rel, w, order, solutions, cfg):
    """Drop literals while M1 -> F_j, then clauses (longest first) while
    F_j -> not M0, each control against the fixed other solutions."""
    spec = rel.spec
    for cvar in order:
        f = solutions[cvar]
        rel.undefine(cvar)
        # every other control is defined now, so anything outside the
        # cone of c_j is a function of x and i and may be shared
        shared = _shared_vars(rel, spec, cvar, set(order), True)
        ms = _MSession(rel, w, cvar, shared, rel.clauses(), cfg.backend)
        lits_before = f.num_literals()
        clauses = []
        for cl in f.clauses:
            core = sat.min_unsat_core(negate(cl), ms.s, ms.m1)
            clauses.append(negate(core))
        acts = [spec.pool.new(Kind.ACT) for _ in clauses]
        for a, cl in zip(acts, clauses):
            ms.s.add_clause((-a,) + tuple(cl))
        keep = list(range(len(clauses)))
        for k in sorted(keep, key=lambda k: -len(clauses[k])):
            trial = [a for a in keep if a != k]
            if not ms.s.solve(ms.m0 + [acts[t] for t in trial]).sat:
                keep = trial
        g = Cnf([clauses[k] for k in keep], f.vars)
        assert g.num_literals() <= lits_before
        solutions[cvar] = g
        rel.define(cvar, g)
    return solutions


def _prepare(spec, w, cfg):
    if cfg.check_w:
        rep = check_winning_area(spec, w, cfg.backend)
        if not rep.ok:
            raise CertificateError("W fails the winning-area checks: %s" %
                                   ", ".join(k for k, v in rep.checks.items() if not v))


def extract_sat_learn(spec, w, cfg=None):
    cfg = cfg or ExtractConfig()
    _prepare(spec, w, cfg)
    rel = _Relation(spec)
    order = list(cfg.order) if cfg.order is not None else sorted(spec.c, reverse=True)
    solutions = {}
    for cvar in order:
        if cfg.stop is not None and cfg.stop.is_set():
            raise Cancelled()
        shared = _shared_vars(rel, spec, cvar, set(solutions), cfg.dep_opt)
        clauses = rel.clauses()
        ms = _MSession(rel, w, cvar, shared, clauses, cfg.backend)
        if cfg.check:
            _check_disjoint(rel, w, cvar, shared, clauses, cfg.backend)
        f = _interpolate(ms, cfg.stop)
        if cfg.check:
            _check_interpolant(ms, f)
        solutions[cvar] = f
        rel.define(cvar, f)
        if not rel.acyclic():
            raise AssertionError("cyclic control dependencies")
    if cfg.minimize:
        _minimize(rel, w, order, solutions, cfg)
    return dump_circuit(spec, solutions, rel, origin="sat-learn")


def extract_qbf_learn(spec, w, cfg=None):
    """Controls in ascending order; unsolved controls are universal."""
    cfg = cfg or ExtractConfig(dep_opt=False)
    _prepare(spec, w, cfg)
    rel = _Relation(spec)
    order = list(cfg.order) if cfg.order is not None else sorted(spec.c)
    wn = substitute(w.clauses, rel.next)
    notwn = list(negate_pg(wn, spec.pool).clauses)
    outer = spec.x + spec.i
    solutions = {}
    for n, cvar in enumerate(order):
        later = order[n + 1:]
        t = rel.clauses()
        stay = list(w.clauses) + notwn

        def m(value):
            return substitute(t + stay, {cvar: value})

        check = TwoQbfSolver(outer, later, pool=spec.pool, backend=cfg.backend)
        check.add(m(True))
        gen = TwoQbfSolver(outer, later, pool=spec.pool, backend=cfg.backend)
        gen.add(m(False))
        f = Cnf(variables=outer)
        while check.solve():
            if cfg.stop is not None and cfg.stop.is_set():
                raise Cancelled()
            xs = set(outer)
            d = [l for l in check.model if abs(l) in xs]
            if gen.solve(d):
                raise AssertionError("no safe value for %s" % spec.pool.name(cvar))
            dg = [l for l in d if l in set(gen.core)]
            k = 0
            while k < len(dg):
                trial = dg[:k] + dg[k + 1:]
                if gen.solve(trial):
                    k += 1
                else:
                    core = set(gen.core)
                    dg = [l for l in trial if l in core]
            cl = negate(dg)
            f.add(cl)
            check.add([cl])
        solutions[cvar] = f
        rel.define(cvar, f)
    return dump_circuit(spec, solutions, rel, origin="qbf-learn")


def dump_circuit(spec, solutions, rel=None, origin=None):
    """Inline the cascade of definitions into a fresh AIG over x and i.

    ``solutions`` maps control vars to CNFs over x, i, other controls and
    auxiliaries of the transition relation encoding."""
    aig = Aig()
    inputs = {}
    lit = {}
    for v in spec.x + spec.i:
        node = aig.new_input() >> 1
        inputs[v] = node
        lit[v] = 2 * node
    cvars = set(spec.c)
    tnode = {}
    visiting = set()

    def of_var(v):
        got = lit.get(v)
        if got is not None:
            return got
        if v in visiting:
            raise AssertionError("cyclic definition through %s" % spec.pool.name(v))
        visiting.add(v)
        if v in solutions:
            out = of_cnf(solutions[v])
        elif v in cvars:
            raise ValueError("control %s has no solution" % spec.pool.name(v))
        else:
            node = spec.cmap.node.get(v)
            if node is None or spec.aig.fanins[node] is None:
                raise ValueError("variable %s cannot be used by a controller" % spec.pool.name(v))
            out = of_node(node)
        visiting.discard(v)
        lit[v] = out
        return out

    def of_node(node):
        """Translate a gate of the spec AIG (iteratively)."""
        stack = [node]
        while stack:
            n = stack[-1]
            if n in tnode:
                stack.pop()
                continue
            f = spec.aig.fanins[n]
            if f is None:
                tnode[n] = of_var(spec.cmap.var[n])
                stack.pop()
                continue
            pend = [m >> 1 for m in f if m >> 1 and (m >> 1) not in tnode]
            if pend:
                stack.extend(pend)
                continue
            a, b = (tnode.get(m >> 1, 0) ^ (m & 1) for m in f)
            tnode[n] = aig.AND(a, b)
            stack.pop()
        return tnode[node]

    def of_cnf(f):
        out = 1
        for cl in f.clauses:
            c = 0
            for l in cl:
                x = of_var(abs(l))
                c = aig.OR(c, x if l > 0 else x ^ 1)
            out = aig.AND(out, c)
        return out

    outputs = {c: of_var(c) for c in spec.c}
    return ControllerCircuit(aig, inputs, outputs, dict(solutions), origin)
