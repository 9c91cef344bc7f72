"""A small conflict-driven clause-learning SAT solver.

Two watched literals, first-UIP learning, VSIDS-style activities with
phase saving, Luby restarts and MiniSat-style assumptions with final
conflict analysis for cores.  Literals are DIMACS ints.
"""
import heapq
import random

_UNDEF = 0


class _Clause:
    __slots__ = ("lits", "learnt", "act", "dead")

    def __init__(self, lits, learnt=False):
        self.lits = lits
        self.learnt = learnt
        self.act = 0.0
        self.dead = False


def _luby(y, x):
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y ** seq


def _code(lit):
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


class CdclSolver:
    """Incremental CDCL solver.  ``solve`` returns True/False; after a
    satisfiable call ``model`` holds per-variable values (index by var),
    after an unsatisfiable call ``core`` holds the failed assumptions."""

    def __init__(self, seed=0):
        self._rng = random.Random(seed)
        self.nvars = 0
        self.assign = [_UNDEF]
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.phase = [False]
        self.seen = [False]
        self.watches = [[], []]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.heap = []
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.learnts = []
        self.max_learnts = 2000
        self.ok = True
        self.model = None
        self.core = ()
        self.conflicts = 0

    # -- variables ---------------------------------------------------------

    def _ensure(self, v):
        while self.nvars < v:
            self.nvars += 1
            self.assign.append(_UNDEF)
            self.level.append(0)
            self.reason.append(None)
            act = self._rng.random() * 1e-5
            self.activity.append(act)
            self.phase.append(False)
            self.seen.append(False)
            self.watches.append([])
            self.watches.append([])
            heapq.heappush(self.heap, (-act, self.nvars))

    def _value(self, lit):
        a = self.assign[lit if lit > 0 else -lit]
        return a if lit > 0 else -a

    # -- clause database ---------------------------------------------------

    def add_clause(self, lits):
        if not self.ok:
            return
        self._cancel(0)
        for l in lits:
            self._ensure(abs(l))
        out = []
        seen = set()
        for l in lits:
            if -l in seen:
                return
            if l in seen:
                continue
            v = self._value(l)
            if v == 1:
                return
            if v == -1:
                continue
            seen.add(l)
            out.append(l)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            self._enqueue(out[0], None)
            if self._propagate() is not None:
                self.ok = False
            return
        self._attach(_Clause(out))

    def _attach(self, c):
        self.watches[_code(c.lits[0])].append(c)
        self.watches[_code(c.lits[1])].append(c)

    # -- search ------------------------------------------------------------

    def _enqueue(self, lit, reason):
        v = lit if lit > 0 else -lit
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _cancel(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        assign, phase, heap, act = self.assign, self.phase, self.heap, self.activity
        for lit in self.trail[lim:]:
            v = lit if lit > 0 else -lit
            assign[v] = _UNDEF
            self.reason[v] = None
            phase[v] = lit > 0
            heapq.heappush(heap, (-act[v], v))
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _propagate(self):
        assign, watches, trail = self.assign, self.watches, self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = watches[_code(false_lit)]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c.dead:
                    continue
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], false_lit
                first = lits[0]
                a = assign[first if first > 0 else -first]
                if (a if first > 0 else -a) == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(lits)):
                    lk = lits[k]
                    b = assign[lk if lk > 0 else -lk]
                    if (b if lk > 0 else -b) != -1:
                        lits[1], lits[k] = lk, false_lit
                        watches[_code(lk)].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if (a if first > 0 else -a) == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return c
                    self._enqueue(first, c)
            del ws[j:]
        return None

    def _bump_var(self, v):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for k in range(1, self.nvars + 1):
                act[k] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[k], k) for k in range(1, self.nvars + 1)]
            heapq.heapify(self.heap)
        elif self.assign[v] == _UNDEF:
            heapq.heappush(self.heap, (-act[v], v))

    def _bump_clause(self, c):
        c.act += self.cla_inc
        if c.act > 1e20:
            for d in self.learnts:
                d.act *= 1e-20
            self.cla_inc *= 1e-20

    def _analyze(self, confl):
        seen, level = self.seen, self.level
        cur = len(self.trail_lim)
        learnt = [0]
        touched = []
        path = 0
        p = 0
        idx = len(self.trail) - 1
        c = confl
        while True:
            if c.learnt:
                self._bump_clause(c)
            for q in (c.lits if p == 0 else c.lits[1:]):
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump_var(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = abs(p)
            c = self.reason[v]
            seen[v] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = -p
        for v in touched:
            seen[v] = False
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if level[abs(learnt[k])] > level[abs(learnt[best])]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _analyze_final(self, p):
        """Core for a falsified assumption; ``p`` is the true negation."""
        core = [-p]
        if not self.trail_lim:
            return core
        seen = self.seen
        seen[abs(p)] = True
        marked = [abs(p)]
        for k in range(len(self.trail) - 1, self.trail_lim[0] - 1, -1):
            lit = self.trail[k]
            v = abs(lit)
            if seen[v]:
                r = self.reason[v]
                if r is None:
                    if self.level[v] > 0:
                        core.append(lit)
                else:
                    for q in r.lits[1:]:
                        w = abs(q)
                        if self.level[w] > 0 and not seen[w]:
                            seen[w] = True
                            marked.append(w)
        for v in marked:
            seen[v] = False
        return core

    def _pick(self):
        if len(self.heap) > 4 * self.nvars + 100:
            self.heap = [(-self.activity[v], v) for v in range(1, self.nvars + 1)
                         if self.assign[v] == _UNDEF]
            heapq.heapify(self.heap)
        heap, assign, act = self.heap, self.assign, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if assign[v] == _UNDEF and -a == act[v]:
                return v if self.phase[v] else -v
        return 0

    def _reduce_db(self):
        self.learnts.sort(key=lambda c: c.act)
        keep = []
        half = len(self.learnts) // 2
        for k, c in enumerate(self.learnts):
            first = c.lits[0]
            locked = self.reason[abs(first)] is c and self._value(first) == 1
            if k < half and len(c.lits) > 2 and not locked:
                c.dead = True
            else:
                keep.append(c)
        self.learnts = keep

    def solve(self, assumptions=()):
        self.model = None
        self.core = ()
        if not self.ok:
            return False
        for l in assumptions:
            self._ensure(abs(l))
        self._cancel(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restarts = 0
        while True:
            budget = _luby(2, restarts) * 100
            restarts += 1
            status = self._search(budget, assumptions)
            if status is not None:
                self._cancel(0)
                return status

    def _search(self, budget, assumptions):
        conflicts = 0
        nassume = len(assumptions)
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    c = _Clause(learnt, learnt=True)
                    self._attach(c)
                    self.learnts.append(c)
                    self._bump_clause(c)
                    self._enqueue(learnt[0], c)
                self.var_inc /= 0.95
                self.cla_inc /= 0.999
                continue
            if conflicts >= budget:
                self._cancel(0)
                return None
            if len(self.learnts) - len(self.trail) >= self.max_learnts:
                self._reduce_db()
                self.max_learnts = int(self.max_learnts * 1.1)
            nxt = 0
            while len(self.trail_lim) < nassume:
                p = assumptions[len(self.trail_lim)]
                val = self._value(p)
                if val == 1:
                    self.trail_lim.append(len(self.trail))
                elif val == -1:
                    self.core = tuple(self._analyze_final(-p))
                    return False
                else:
                    nxt = p
                    break
            if nxt == 0:
                nxt = self._pick()
                if nxt == 0:
                    self.model = self.assign[:]
                    return True
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, None)
