"""Winning regions and winning areas by CNF learning.

``qbf_win`` learns the winning region from counterexamples found by
2QBF queries; ``sat_win1`` replaces every QBF query by SAT calls using
an over-approximation U of the counterexample candidates and a lazily
updated copy G of F.  Both start from F = P and remove generalized
counterexample cubes until no state in F can be forced out of F.
"""
import time

from . import sat
from .aig import BudgetExceeded, ClauseList, Encoder
from .aiger import expand_circuit, gates_copied
from .cnf import Cnf, Kind, compress_cnf, negate, negate_pg, parse_dimacs, substitute, to_dimacs
from .qbf import TwoQbfSolver

REALIZABLE = "realizable"
UNREALIZABLE = "unrealizable"
UNKNOWN = "unknown"


class Cancelled(Exception):
    """Cooperative termination request observed."""


class BudgetError(RuntimeError):
    pass


class WinConfig:
    """Options of the learning loops.

    ``lazy_g=False`` gives the simpler variant that resets U and G after
    every refinement.  ``compress_factor``: recompress F once the clauses
    added since the last compression exceed that multiple of its
    compressed size.  ``reset_limit``: rebuild solverG once it holds that
    many clauses more than the current F."""

    def __init__(self, backend="sat1", lazy_g=True, opt_rg=False, opt_rc=False,
                 expand_cex=False, expand_gen=False, time_budget=None, iter_budget=None,
                 expansion_limit=200000, reset_limit=5000, compress_factor=2.0,
                 sat_backend=None, check_invariants=False, qbf_max_iter=None,
                 on_clause=None, inbox=None, stop=None):
        self.backend = backend
        self.lazy_g = lazy_g
        self.opt_rg = opt_rg
        self.opt_rc = opt_rc
        self.expand_cex = expand_cex
        self.expand_gen = expand_gen
        self.time_budget = time_budget
        self.iter_budget = iter_budget
        self.expansion_limit = expansion_limit
        self.reset_limit = reset_limit
        self.compress_factor = compress_factor
        self.sat_backend = sat_backend
        self.check_invariants = check_invariants
        self.qbf_max_iter = qbf_max_iter
        self.on_clause = on_clause
        self.inbox = inbox
        self.stop = stop

    def replace(self, **kw):
        c = WinConfig()
        c.__dict__.update(self.__dict__)
        c.__dict__.update(kw)
        return c


class WinningOutcome:
    def __init__(self, verdict, w=None, kind=None, stats=None, extractable=True, origin=None):
        self.verdict = verdict
        self.W = w
        self.kind = kind
        self.stats = stats or {}
        self.extractable = extractable
        self.origin = origin

    @property
    def realizable(self):
        return self.verdict == REALIZABLE

    def __repr__(self):
        n = len(self.W) if self.W is not None else 0
        return "WinningOutcome(%s, %d clauses, %s)" % (self.verdict, n, self.kind)


def export_w(spec, w):
    """DIMACS text of W with a variable-name comment map."""
    names = {v: spec.pool.name(v) for v in spec.x}
    return to_dimacs(w, names, top=max(spec.x, default=0))


def import_w(spec, text):
    """Read W exported by :func:`export_w`, matching variables by name."""
    f, names = parse_dimacs(text)
    by_name = {spec.pool.name(v): v for v in spec.x}
    mapping = {}
    for v, n in names.items():
        if n not in by_name:
            raise ValueError("unknown state variable %r in winning area" % n)
        mapping[v] = by_name[n]
    out = Cnf(variables=spec.x)
    for cl in f.clauses:
        out.add([mapping[abs(l)] if l > 0 else -mapping[abs(l)] for l in cl])
    return out


def meets_init(cube, init):
    """True iff the cube intersects the initial-state cube."""
    iset = set(init)
    return not any(-l in iset for l in cube)


def excludes_init(cl, init):
    """True iff the clause removes some initial state."""
    return meets_init(negate(cl), init)


class _Predecessor:
    """Adds  I(x) | (q & F(x*) & T(x*, i*, c*) = x)  to a sink.

    Further constraints on the predecessor copy (F-clauses, the RG
    cube-negations, the RC disequality) are guarded by ``q``.  With a
    ``guard`` literal the whole disjunction is only enforced when the
    guard is assumed."""

    def __init__(self, spec, sink, guard=None):
        pool = spec.pool
        self.sink = sink
        self.q = pool.new(Kind.AUX, "pred_q")
        r = pool.new(Kind.AUX, "pred_init")
        enc = Encoder(spec.aig, spec.cmap, sink)
        subst = {}
        self.star = {}
        for v in spec.x + spec.i + spec.c:
            lit = spec.aig.new_input()
            nv = pool.new(pool.kind(v), pool.name(v) + "*")
            spec.cmap.bind(lit >> 1, nv)
            subst[spec.cmap.node[v]] = lit
            self.star[v] = nv
        nxt = spec.aig.compose(spec.next_lits, subst)
        q = self.q
        for v, l in zip(spec.x, nxt):
            L = enc.need(l)
            if L is True:
                sink.add_clause((-q, v))
            elif L is False:
                sink.add_clause((-q, -v))
            else:
                sink.add_clause((-q, -v, L))
                sink.add_clause((-q, v, -L))
        for l in spec.init:
            sink.add_clause((-r, l))
        top = (r, q) if guard is None else (-guard, r, q)
        sink.add_clause(top)
        self.vars = set(self.star.values()) | enc.aux | {q, r}
        self.x = spec.x

    def star_lits(self, lits):
        return tuple(self.star[abs(l)] if l > 0 else -self.star[abs(l)] for l in lits)

    def add_f(self, cl):
        self.sink.add_clause((-self.q,) + self.star_lits(cl))

    def add_guarded(self, lits, act):
        self.sink.add_clause((-self.q, -act) + tuple(lits))

    def add_distinct(self, pool):
        """x* != x (used by RC)."""
        ds = []
        for v in self.x:
            d = pool.new(Kind.AUX)
            s = self.star[v]
            self.sink.add_clause((-d, v, s))
            self.sink.add_clause((-d, -v, -s))
            ds.append(d)
            self.vars.add(d)
        self.sink.add_clause((-self.q,) + tuple(ds))


class _Learner:
    """Bookkeeping shared by both learning loops."""

    def __init__(self, spec, cfg):
        self.spec = spec
        self.cfg = cfg
        self.t0 = time.monotonic()
        self.stats = {"refinements": 0, "candidates": 0, "u_refinements": 0,
                      "restarts": 0, "received": 0, "expanded_cex": 0, "expanded_gen": 0}
        self.F = Cnf(spec.safe.clauses, spec.x)
        self.injected = False
        self._since_compress = 0
        self._compressed_size = len(self.F)

    def poll(self):
        cfg = self.cfg
        if cfg.stop is not None and cfg.stop.is_set():
            raise Cancelled()
        if cfg.time_budget is not None and time.monotonic() - self.t0 > cfg.time_budget:
            raise BudgetError("time budget of %ss exhausted" % cfg.time_budget)
        work = self.stats["refinements"] + self.stats["candidates"]
        if cfg.iter_budget is not None and work > cfg.iter_budget:
            raise BudgetError("iteration budget of %d exhausted" % cfg.iter_budget)
        if cfg.inbox is not None:
            return [tuple(c) for c in cfg.inbox()]
        return []

    def maybe_compress(self, force=False):
        if force or self._since_compress > self.cfg.compress_factor * max(1, self._compressed_size):
            self.F = compress_cnf(self.F, False, self.cfg.sat_backend)
            self._compressed_size = len(self.F)
            self._since_compress = 0

    def note_refinement(self, cl, received=False):
        if received:
            self.stats["received"] += 1
            self.injected = True
        else:
            self.stats["refinements"] += 1
            if self.cfg.on_clause is not None:
                self.cfg.on_clause(cl)
        self._since_compress += 1
        if self.cfg.check_invariants:
            self.check_lemma()

    def check_lemma(self):
        """I -> F -> P (holds after every refinement)."""
        spec = self.spec
        s = sat.new_session(backend=self.cfg.sat_backend)
        s.add_clauses(negate_pg(self.F, spec.pool).clauses)
        assert not s.solve(spec.init).sat, "I -> F violated"
        s = sat.new_session(self.F.clauses, self.cfg.sat_backend)
        s.add_clauses(negate_pg(spec.safe, spec.pool).clauses)
        assert not s.solve().sat, "F -> P violated"

    def outcome(self, verdict):
        self.stats["time_ms"] = int(1000 * (time.monotonic() - self.t0))
        if verdict != REALIZABLE:
            return WinningOutcome(verdict, None, None, dict(self.stats))
        cfg = self.cfg
        exact = not (cfg.opt_rg or cfg.opt_rc or self.injected)
        return WinningOutcome(REALIZABLE, self.F.copy(),
                              "winning-region" if exact else "winning-area",
                              dict(self.stats), extractable=not cfg.opt_rc)


def _min_core(session, cube, fixed, pred=None, guard=None, pool=None):
    """Minimal unsatisfiable sub-cube; with ``pred`` every trial cube t
    also asserts  not t*  on the predecessor copy (optimization RG)."""
    if pred is None:
        return sat.min_unsat_core(cube, session, fixed)
    fixed = list(fixed)

    def attempt(t):
        act = pool.new(Kind.ACT)
        pred.add_guarded(negate(pred.star_lits(t)), act)
        r = session.solve(fixed + [guard, act] + list(t))
        session.add_clause((-act,))
        return r

    r = attempt(cube)
    if r.sat:
        raise AssertionError("generalization query satisfiable for the full cube")
    core = set(r.core)
    cand = [l for l in cube if l in core]
    k = 0
    while k < len(cand):
        trial = cand[:k] + cand[k + 1:]
        r = attempt(trial)
        if r.sat:
            k += 1
        else:
            core = set(r.core)
            cand = [l for l in trial if l in core]
    return tuple(cand)


class _SessionSink:
    def __init__(self, session):
        self.session = session

    def add_clause(self, c):
        self.session.add_clause(c)


class SatWin1(_Learner):
    """SAT-based CNF learning with lazy G (or eager with lazy_g=False)."""

    def run(self):
        spec, cfg = self.spec, self.cfg
        if spec.initial_unsafe():
            return self.outcome(UNREALIZABLE)
        self.U = []
        self.G = self.F.copy()
        precise = True
        self._cex_renamings, self.cex_expanded = self._renamings()
        self._expand_gen()
        self._build_gen()
        self._build_cex()
        while True:
            for cl in self.poll():
                if not self._refine(cl, received=True):
                    return self.outcome(UNREALIZABLE)
                precise = False
            r = self.solverC.solve()
            if not r.sat:
                if precise:
                    return self.outcome(REALIZABLE)
                self._restart()
                precise = True
                continue
            self.stats["candidates"] += 1
            x = r.model.cube(spec.x)
            i = r.model.cube(spec.i)
            fixed = [l for l in i if abs(l) != self.i2]
            g = self.solverG.solve(list(x) + fixed)
            if not g.sat:
                xg = _min_core(self.solverG, x, fixed, self.pred, self.rg_guard, spec.pool)
                if meets_init(xg, spec.init):
                    return self.outcome(UNREALIZABLE)
                self._refine(negate(xg))
                if cfg.lazy_g:
                    precise = False
                else:
                    self._restart()
            else:
                if self.cex_expanded:
                    raise AssertionError("expanded candidate has a successor in F")
                c = self._control_values(g.model, i)
                core = sat.min_unsat_core(list(x) + list(i), self.solverC, c)
                ucl = negate(core)
                self.U.append(ucl)
                self.solverC.add_clause(ucl)
                self.stats["u_refinements"] += 1

    def _control_values(self, model, i):
        spec = self.spec
        if self.gen_branches is None:
            return [v if model.value(v) else -v for v in spec.c]
        i2val = self.i2 in i
        for assign, _, copies in self.gen_branches:
            if assign[self.i2] == i2val:
                return [v if model.value(copies[v]) else -v for v in spec.c]
        raise AssertionError("no expansion branch for the input value")

    def _refine(self, cl, received=False):
        """F &= cl in every session; returns False if cl excludes I."""
        if received and excludes_init(cl, self.spec.init):
            return False
        if not self.F.add_clause_with_subsumption(cl):
            return True
        self.solverC.add_clause(cl)
        if self.rc is not None:
            self.rc.add_f(cl)
        self.solverG.add_clause(cl)
        self.g_added += 1
        for mapping in self.gen_maps:
            self.solverG.add_clauses(substitute([cl], mapping))
            self.g_added += 1
        if self.pred is not None:
            self.pred.add_f(cl)
        self.note_refinement(cl, received)
        return True

    def _restart(self):
        self.stats["restarts"] += 1
        self.maybe_compress()
        self.U = []
        self.G = self.F.copy()
        self._build_cex()
        if self.g_added - len(self.F) > self.cfg.reset_limit:
            self._build_gen()

    def _renamings(self):
        spec, cfg = self.spec, self.cfg
        if cfg.expand_cex and spec.c:
            try:
                branches = expand_circuit(spec, spec.c, limit=cfg.expansion_limit)
                self.stats["expanded_cex"] = len(branches)
                return [lits for _, lits, _ in branches], True
            except BudgetExceeded:
                pass
        return [spec.next_lits], False

    def _build_cex(self):
        spec = self.spec
        s = sat.new_session(backend=self.cfg.sat_backend)
        sink = _SessionSink(s)
        enc = Encoder(spec.aig, spec.cmap, sink)
        s.add_clauses(self.F.clauses)
        s.add_clauses(self.U)
        cache = {}
        for lits in self._cex_renamings:
            mapping = {v: enc.need(l) for v, l in zip(spec.x, lits)}
            s.add_clauses(negate_pg(substitute(self.G.clauses, mapping), spec.pool, cache).clauses)
        self.rc = None
        if self.cfg.opt_rc:
            self.rc = _Predecessor(spec, sink)
            self.rc.add_distinct(spec.pool)
            for cl in self.F.clauses:
                self.rc.add_f(cl)
        self.solverC = s

    def _expand_gen(self):
        """Expansion of T over the input whose expansion copies the
        fewest gates, with a fresh copy of c per branch."""
        spec, cfg = self.spec, self.cfg
        self.gen_branches = None
        self.i2 = None
        if cfg.expand_gen and spec.i:
            i2 = min(spec.i, key=lambda v: gates_copied(spec, v))
            try:
                self.gen_branches = expand_circuit(spec, [i2], copy_vars=spec.c,
                                                   limit=cfg.expansion_limit)
                self.i2 = i2
                self.stats["expanded_gen"] = len(self.gen_branches)
            except BudgetExceeded:
                pass

    def _build_gen(self):
        spec, cfg = self.spec, self.cfg
        s = sat.new_session(backend=cfg.sat_backend)
        sink = _SessionSink(s)
        enc = Encoder(spec.aig, spec.cmap, sink)
        s.add_clauses(self.F.clauses)
        if self.gen_branches is None:
            lit_sets = [spec.next_lits]
        else:
            lit_sets = [lits for _, lits, _ in self.gen_branches]
        self.gen_maps = []
        for lits in lit_sets:
            mapping = {v: enc.need(l) for v, l in zip(spec.x, lits)}
            self.gen_maps.append(mapping)
            s.add_clauses(substitute(self.F.clauses, mapping))
        self.pred = None
        self.rg_guard = None
        if cfg.opt_rg:
            self.rg_guard = spec.pool.new(Kind.ACT, "rg_on")
            self.pred = _Predecessor(spec, sink, guard=self.rg_guard)
            for cl in self.F.clauses:
                self.pred.add_f(cl)
        self.g_added = len(self.F) * (1 + len(lit_sets))
        self.solverG = s


def sat_win1(spec, cfg=None):
    cfg = cfg or WinConfig()
    try:
        return SatWin1(spec, cfg).run()
    except BudgetError as e:
        out = WinningOutcome(UNKNOWN, stats={"reason": str(e)})
        return out


class QbfWin(_Learner):
    """QBF-based CNF learning with the strengthened generalization check:
    literals are dropped while  t & F & ~x_g & T & F' & ~x_g'  stays
    unsatisfiable for all i (as if F had already been refined by x_g)."""

    def run(self):
        spec = self.spec
        if spec.initial_unsafe():
            return self.outcome(UNREALIZABLE)
        sink = ClauseList()
        enc = Encoder(spec.aig, spec.cmap, sink)
        self.nxt = {v: enc.need(l) for v, l in zip(spec.x, spec.next_lits)}
        self.T = sink.clauses
        while True:
            for cl in self.poll():
                if excludes_init(cl, spec.init):
                    return self.outcome(UNREALIZABLE)
                if self.F.add_clause_with_subsumption(cl):
                    self.note_refinement(cl, received=True)
            x = self._counterexample()
            if x is None:
                return self.outcome(REALIZABLE)
            self.stats["candidates"] += 1
            xg = self._generalize(x)
            if meets_init(xg, spec.init):
                return self.outcome(UNREALIZABLE)
            cl = negate(xg)
            self.F.add_clause_with_subsumption(cl)
            self.note_refinement(cl)
            self.maybe_compress()

    def _solver(self, a, b):
        return TwoQbfSolver(a, b, pool=self.spec.pool, backend=self.cfg.sat_backend,
                            max_iter=self.cfg.qbf_max_iter)

    def _counterexample(self):
        """exists x,i forall c exists x',aux: F & T & ~F'."""
        spec = self.spec
        q = self._solver(spec.x + spec.i, spec.c)
        if self.cfg.opt_rc:
            sink = ClauseList()
            pred = _Predecessor(spec, sink)
            pred.add_distinct(spec.pool)
            for cl in self.F.clauses:
                pred.add_f(cl)
            q.extend_a(sorted(pred.vars))
            q.add(sink.clauses)
        q.add(self.F.clauses)
        q.add(self.T)
        q.add(negate_pg(substitute(self.F.clauses, self.nxt), spec.pool).clauses)
        if not q.solve():
            return None
        xs = set(spec.x)
        return tuple(l for l in q.model if abs(l) in xs)

    def _generalize(self, x):
        """exists x forall i exists c,x': t & F & ~xg & T & F' & ~xg'."""
        spec, pool = self.spec, self.spec.pool
        q = self._solver(spec.x, spec.i)
        pred = guard = None
        if self.cfg.opt_rg:
            sink = ClauseList()
            guard = pool.new(Kind.ACT, "rg_on")
            pred = _Predecessor(spec, sink, guard=guard)
            for cl in self.F.clauses:
                pred.add_f(cl)
            q.extend_a(sorted(pred.vars) + [guard])
            q.add(sink.clauses)
        q.add(self.F.clauses)
        q.add(self.T)
        q.add(substitute(self.F.clauses, self.nxt))
        xg = list(x)

        def block(cube):
            cl = negate(cube)
            q.add([cl])
            q.add(substitute([cl], self.nxt))

        block(xg)
        for lit in list(x):
            if lit not in xg:
                continue
            t = [l for l in xg if l != lit]
            extra = []
            if pred is not None:
                act = pool.new(Kind.ACT)
                q.extend_a([act])
                sink = ClauseList()
                pred.sink = sink
                pred.add_guarded(negate(pred.star_lits(t)), act)
                q.add(sink.clauses)
                extra = [guard, act]
            if not q.solve(t + extra):
                core = set(q.core)
                xg = [l for l in t if l in core]
                block(xg)
            if pred is not None:
                q.add([(-extra[1],)])
        return tuple(xg)


def qbf_win(spec, cfg=None):
    cfg = cfg or WinConfig(backend="qbf")
    try:
        return QbfWin(spec, cfg).run()
    except BudgetError as e:
        return WinningOutcome(UNKNOWN, stats={"reason": str(e)})


def solve_win(spec, cfg):
    if cfg.backend == "qbf":
        return qbf_win(spec, cfg)
    return sat_win1(spec, cfg)


class CounterexampleSearch:
    """Finds (x, i) with x in F from which the environment can leave F,
    using the SAT-based candidate/U machinery without refining F."""

    def __init__(self, spec, f, backend=None):
        self.spec = spec
        s = sat.new_session(f.clauses, backend)
        enc = Encoder(spec.aig, spec.cmap, _SessionSink(s))
        mapping = {v: enc.need(l) for v, l in zip(spec.x, spec.next_lits)}
        s.add_clauses(negate_pg(substitute(f.clauses, mapping), spec.pool).clauses)
        self.solverC = s
        g = sat.new_session(f.clauses, backend)
        enc = Encoder(spec.aig, spec.cmap, _SessionSink(g))
        mapping = {v: enc.need(l) for v, l in zip(spec.x, spec.next_lits)}
        g.add_clauses(substitute(f.clauses, mapping))
        self.solverG = g
        self.calls = 0

    def find(self, stop=None):
        spec = self.spec
        while True:
            if stop is not None and stop.is_set():
                raise Cancelled()
            self.calls += 1
            r = self.solverC.solve()
            if not r.sat:
                return None
            x = r.model.cube(spec.x)
            i = r.model.cube(spec.i)
            g = self.solverG.solve(list(x) + list(i))
            if not g.sat:
                return x, i
            c = [v if g.model.value(v) else -v for v in spec.c]
            core = sat.min_unsat_core(list(x) + list(i), self.solverC, c)
            self.solverC.add_clause(negate(core))
