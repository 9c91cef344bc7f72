"""Ground truth for small games and certificate checks.

The explicit game evaluates the AIG of the transition relation on all
(state, input, control) combinations at once, using Python integers as
bit-vectors, and then solves the safety game by the greatest fixpoint
F := P, F := F & Force_s1(F).  Certificates are checked symbolically
with SAT and 2QBF calls.
"""
import random

import numpy as np

from . import sat
from .aig import ClauseList, CnfMap, Encoder
from .cnf import Cnf, negate_pg, rename, substitute
from .qbf import TwoQbfSolver

MAX_STATE_BITS = 16
MAX_INPUT_BITS = 12
MAX_TOTAL_BITS = 24


class OracleBudgetError(RuntimeError):
    pass


def _pattern(bit, total):
    """Bit-vector over 2**total combos, set where combo index has ``bit``."""
    width = 1 << bit
    p = ((1 << width) - 1) << width
    length = 2 * width
    size = 1 << total
    while length < size:
        p |= p << length
        length *= 2
    return p


def _to_bools(vec, size):
    raw = vec.to_bytes((size + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size].astype(bool)


def _eval_cnf(f, var_vectors, ones):
    out = ones
    for cl in f.clauses:
        acc = 0
        for l in cl:
            v = var_vectors[abs(l)]
            acc |= v if l > 0 else v ^ ones
        out &= acc
    return out


class ExplicitGame:
    """Successor table of a spec: ``succ[c, i, s]`` is the next state."""

    def __init__(self, spec):
        n, m, p = len(spec.x), len(spec.i), len(spec.c)
        if n > MAX_STATE_BITS or m + p > MAX_INPUT_BITS or n + m + p > MAX_TOTAL_BITS:
            raise OracleBudgetError("game too large for explicit solving (|x|=%d, |i|+|c|=%d)" % (n, m + p))
        self.spec = spec
        self.n, self.m, self.p = n, m, p
        total = n + m + p
        size = 1 << total
        ones = (1 << size) - 1
        order = spec.x + spec.i + spec.c
        values = {spec.cmap.node[v]: _pattern(k, total) for k, v in enumerate(order)}
        nexts = spec.aig.evaluate(spec.next_lits, values, ones)
        succ = np.zeros(size, dtype=np.int64)
        for j, vec in enumerate(nexts):
            succ |= _to_bools(vec, size).astype(np.int64) << j
        self.succ = succ.reshape(1 << p, 1 << m, 1 << n)
        nstates = 1 << n
        sones = (1 << nstates) - 1
        svals = {v: _pattern(k, n) if n else 0 for k, v in enumerate(spec.x)}
        self.safe = _to_bools(_eval_cnf(spec.safe, svals, sones), nstates)
        self.initial = _to_bools(_eval_cnf(Cnf([(l,) for l in spec.init]), svals, sones), nstates)

    @property
    def num_states(self):
        return 1 << self.n

    def states_of(self, f):
        """Bitset of the states satisfying CNF ``f`` over x."""
        nstates = self.num_states
        sones = (1 << nstates) - 1
        svals = {v: _pattern(k, self.n) if self.n else 0 for k, v in enumerate(self.spec.x)}
        extra = f.vars - set(self.spec.x)
        if extra:
            raise ValueError("formula mentions non-state variables")
        return _to_bools(_eval_cnf(f, svals, sones), nstates)

    def force_s(self, f):
        """States where for every i some c leads into ``f``."""
        return f[self.succ].any(axis=0).all(axis=0)

    def force_e(self, f):
        """States where some i makes every c lead into ``f``."""
        return f[self.succ].all(axis=0).any(axis=0)

    def reach(self, f):
        return f[self.succ].any(axis=(0, 1))

    def winning_region(self):
        f = self.safe.copy()
        while True:
            g = f & self.force_s(f)
            if (g == f).all():
                return f
            f = g

    def realizable(self, region=None):
        region = self.winning_region() if region is None else region
        return bool(region[self.initial].all())


def explicit_attractor(spec):
    """Winning region as a boolean array indexed by state number (bit k of
    the index is the value of ``spec.x[k]``)."""
    return ExplicitGame(spec).winning_region()


def states_to_cnf(variables, bits):
    """CNF over ``variables`` whose models are exactly the set states."""
    f = Cnf(variables=variables)
    for s in np.flatnonzero(~np.asarray(bits, dtype=bool)):
        f.add([-v if s >> k & 1 else v for k, v in enumerate(variables)])
    return f


def equivalent(f, g, backend=None):
    """Two unsat checks: f & not g, g & not f."""
    for a, b in ((f, g), (g, f)):
        top = max(a.vars | b.vars | {0})
        nb = negate_pg(b)
        # aux ids of negate_pg start above b's own vars; shift clear of a's
        shift = {v: v + top for v in nb.vars - b.vars}
        nb = rename(nb, shift)
        if sat.is_sat(list(a.clauses) + list(nb.clauses), backend=backend):
            return False
    return True


class VerifyReport:
    """Per-check results; ``ok`` iff every executed check passed."""

    def __init__(self):
        self.checks = {}
        self.witness = None
        self.sim_steps = 0

    def record(self, name, passed, witness=None):
        self.checks[name] = bool(passed)
        if not passed and self.witness is None and witness is not None:
            self.witness = (name, witness)
        return passed

    @property
    def ok(self):
        return all(self.checks.values())

    def to_text(self):
        lines = ["check=%s result=%s" % (k, "PASS" if v else "FAIL") for k, v in self.checks.items()]
        lines.append("simulation_steps=%d" % self.sim_steps)
        if self.witness is not None:
            lines.append("witness_check=%s witness=%s" % (self.witness[0],
                                                        " ".join(map(str, self.witness[1]))))
        lines.append("verdict=%s" % ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return "VerifyReport(%r)" % self.checks


def _next_state_mapping(spec, sink):
    """Encode the next-state functions into ``sink``; returns var -> literal
    (or constant) for substituting x by x'."""
    enc = spec.encoder(sink)
    return {v: enc.need(l) for v, l in zip(spec.x, spec.next_lits)}


def _add_shifted_negation(spec, s, clauses):
    neg = negate_pg(clauses, spec.pool)
    s.add_clauses(neg.clauses)


def check_winning_area(spec, f, backend=None):
    """The three conditions: I -> F, F -> P, F -> Force_s1(F)."""
    rep = VerifyReport()
    s = sat.new_session(backend=backend)
    _add_shifted_negation(spec, s, f.clauses)
    r = s.solve(spec.init)
    rep.record("I->W", not r.sat, r.model.cube(spec.x) if r.sat else None)
    s = sat.new_session(f.clauses, backend=backend)
    _add_shifted_negation(spec, s, spec.safe.clauses)
    r = s.solve()
    rep.record("W->P", not r.sat, r.model.cube(spec.x) if r.sat else None)
    sink = ClauseList()
    nxt = _next_state_mapping(spec, sink)
    fn = substitute(f.clauses, nxt)
    neg = negate_pg(fn, spec.pool)
    matrix = list(f.clauses) + sink.clauses + list(neg.clauses)
    inner = {abs(l) for cl in matrix for l in cl} - set(spec.x) - set(spec.i) - set(spec.c)
    q = TwoQbfSolver(spec.x + spec.i, spec.c, sorted(inner), matrix, pool=spec.pool, backend=backend)
    found = q.solve()
    rep.record("W->Force(W)", not found, q.model)
    return rep


def encode_controller(spec, ctrl, sink):
    """Add c_j <-> ctrl_j(x, i) for every control to ``sink``."""
    cmap = CnfMap(spec.pool)
    for var, node in ctrl.inputs.items():
        cmap.bind(node, var)
    enc = Encoder(ctrl.aig, cmap, sink)
    for cvar in spec.c:
        enc.equiv(cvar, ctrl.outputs[cvar])
    return enc


def verify_controller(spec, ctrl, w, sim_steps=10000, seed=0, lanes=16, backend=None):
    """Induction with W as invariant of the closed loop, plus random
    simulation from I checking that P never fails."""
    rep = VerifyReport()
    s = sat.new_session(backend=backend)
    _add_shifted_negation(spec, s, w.clauses)
    r = s.solve(spec.init)
    rep.record("I->W", not r.sat, r.model.cube(spec.x) if r.sat else None)
    s = sat.new_session(w.clauses, backend=backend)
    _add_shifted_negation(spec, s, spec.safe.clauses)
    r = s.solve()
    rep.record("W->P", not r.sat, r.model.cube(spec.x) if r.sat else None)
    sink = ClauseList()
    nxt = _next_state_mapping(spec, sink)
    encode_controller(spec, ctrl, sink)
    s = sat.new_session(list(w.clauses) + sink.clauses, backend=backend)
    _add_shifted_negation(spec, s, substitute(w.clauses, nxt))
    r = s.solve()
    rep.record("induction", not r.sat, r.model.cube(spec.x + spec.i) if r.sat else None)
    ok, steps, wit = simulate(spec, ctrl, sim_steps, seed, lanes)
    rep.sim_steps = steps
    rep.record("simulation", ok, wit)
    return rep


def simulate(spec, ctrl, steps, seed=0, lanes=16):
    """Run ``steps`` random steps in ``lanes`` parallel traces from I.
    Returns (ok, steps run, failing state cube or None)."""
    rng = random.Random(seed)
    ones = (1 << lanes) - 1
    init = {abs(l): l > 0 for l in spec.init}
    state = {v: (ones if init.get(v, False) else 0) if v in init else rng.getrandbits(lanes)
             for v in spec.x}
    done = 0
    rounds = max(1, -(-steps // lanes)) if steps else 0
    for _ in range(rounds):
        bad = ones ^ _eval_cnf(spec.safe, state, ones)
        if bad:
            lane = (bad & -bad).bit_length() - 1
            return False, done, tuple(v if state[v] >> lane & 1 else -v for v in spec.x)
        ivals = {v: rng.getrandbits(lanes) for v in spec.i}
        cin = {}
        for var, node in ctrl.inputs.items():
            cin[node] = state[var] if var in state else ivals[var]
        couts = ctrl.aig.evaluate([ctrl.outputs[v] for v in spec.c], cin, ones) if spec.c else []
        values = {spec.cmap.node[v]: state[v] for v in spec.x}
        values.update({spec.cmap.node[v]: ivals[v] for v in spec.i})
        for v, val in zip(spec.c, couts):
            values[spec.cmap.node[v]] = val
        nxt = spec.aig.evaluate(spec.next_lits, values, ones)
        state = dict(zip(spec.x, nxt))
        done += lanes
    bad = ones ^ _eval_cnf(spec.safe, state, ones)
    if bad:
        lane = (bad & -bad).bit_length() - 1
        return False, done, tuple(v if state[v] >> lane & 1 else -v for v in spec.x)
    return True, min(done, steps) if steps else 0, None
