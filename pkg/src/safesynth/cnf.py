"""Variables, clauses, cubes and CNF formulas.

Literals are DIMACS-style signed ints: ``v`` is the positive literal of
variable ``v``, ``-v`` its negation.  Clauses and cubes are tuples
sorted by ``(var, negated)``; that canonical form gives stable hashing
and linear-time subsumption checks.
"""
import enum

from . import sat


class Kind(enum.Enum):
    STATE = "state"
    INPUT = "input"
    CONTROL = "control"
    NEXT = "next-state"
    AUX = "auxiliary"
    PARAM = "template-param"
    ACT = "activation"


class VarPool:
    """Global variable table.  Ids are allocated densely from 1."""

    def __init__(self):
        self._kinds = [None]
        self._names = [None]

    def new(self, kind, name=None):
        self._kinds.append(kind)
        self._names.append(name)
        return len(self._kinds) - 1

    def kind(self, v):
        return self._kinds[abs(v)]

    def name(self, v):
        n = self._names[abs(v)]
        return n if n is not None else "v%d" % abs(v)

    def set_name(self, v, name):
        self._names[abs(v)] = name

    def reserve(self, top):
        """Make sure ids up to ``top`` are taken (as auxiliaries)."""
        while len(self._kinds) <= top:
            self._kinds.append(Kind.AUX)
            self._names.append(None)

    @property
    def top(self):
        return len(self._kinds) - 1

    def copy(self):
        p = VarPool()
        p._kinds = list(self._kinds)
        p._names = list(self._names)
        return p


class TautologyError(ValueError):
    pass


def lit_key(lit):
    return (abs(lit), lit < 0)


def clause(lits):
    """Canonical clause; raises TautologyError on x and -x together."""
    out = sorted(set(lits), key=lit_key)
    for a, b in zip(out, out[1:]):
        if a == -b:
            raise TautologyError("complementary literals %d, %d" % (a, b))
    return tuple(out)


# a cube has the same canonical form; contradictory cubes are rejected too
cube = clause


def try_clause(lits):
    """Canonical clause, or None for a tautology."""
    try:
        return clause(lits)
    except TautologyError:
        return None


def negate(lits):
    """Cube <-> clause duality: negate every literal."""
    return tuple(sorted((-l for l in lits), key=lit_key))


def subsumes(a, b):
    """True iff clause ``a`` is a subset of clause ``b`` (both canonical)."""
    if len(a) > len(b):
        return False
    j = 0
    nb = len(b)
    for l in a:
        k = lit_key(l)
        while j < nb and lit_key(b[j]) < k:
            j += 1
        if j == nb or b[j] != l:
            return False
        j += 1
    return True


class Cnf:
    """A conjunction of canonical clauses over ``vars``."""

    def __init__(self, clauses=(), variables=()):
        self.clauses = []
        self.vars = set(variables)
        for c in clauses:
            self.add(c)

    def add(self, c):
        c = clause(c)
        self.clauses.append(c)
        self.vars.update(abs(l) for l in c)
        return c

    def add_clause_with_subsumption(self, c):
        """Add ``c`` unless subsumed; drop existing supersets of it.
        Returns True if the clause was added."""
        c = clause(c)
        for d in self.clauses:
            if subsumes(d, c):
                return False
        self.clauses = [d for d in self.clauses if not subsumes(c, d)]
        self.clauses.append(c)
        self.vars.update(abs(l) for l in c)
        return True

    @property
    def is_false(self):
        return any(len(c) == 0 for c in self.clauses)

    def copy(self):
        f = Cnf()
        f.clauses = list(self.clauses)
        f.vars = set(self.vars)
        return f

    def evaluate(self, value):
        """``value`` maps a variable to bool (callable or mapping)."""
        get = value if callable(value) else value.__getitem__
        return all(any(get(abs(l)) == (l > 0) for l in c) for c in self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __eq__(self, other):
        return isinstance(other, Cnf) and self.clauses == other.clauses

    def __repr__(self):
        return "Cnf(%r)" % (self.clauses,)

    def num_literals(self):
        return sum(len(c) for c in self.clauses)


def rename(f, mapping):
    """Rename variables by ``mapping`` (var -> var); others unchanged."""
    targets = [mapping.get(v, v) for v in f.vars]
    if len(set(targets)) != len(targets) or len(set(mapping.values())) != len(mapping):
        raise ValueError("renaming is not injective on the formula's variables")
    out = Cnf()
    for c in f.clauses:
        out.add([mapping.get(l, l) if l > 0 else -mapping.get(-l, -l) for l in c])
    out.vars = {mapping.get(v, v) for v in f.vars}
    return out


TRUE = True
FALSE = False


def substitute(clauses, mapping):
    """Substitute variables by literals or the constants True/False.

    Satisfied clauses vanish and false literals are removed; the result
    is a list of (non-canonical) literal tuples, possibly containing an
    empty clause.  Tautologies produced by the substitution are dropped."""
    out = []
    for c in clauses:
        lits = []
        done = False
        for l in c:
            t = mapping.get(abs(l), abs(l))
            if t is True or t is False:
                if t == (l > 0):
                    done = True
                    break
                continue
            lits.append(t if l > 0 else -t)
        if done:
            continue
        lits = set(lits)
        if any(-l in lits for l in lits):
            continue
        out.append(tuple(lits))
    return out


def negate_pg(f, pool=None, cache=None):
    """Plaisted-Greenbaum CNF of ``not f``.

    One auxiliary per non-unit clause, implying the negation of that
    clause, plus a top clause over the auxiliaries.  With a shared
    ``cache`` (clause -> aux) auxiliaries are reused across calls."""
    if isinstance(f, Cnf):
        clauses, variables = f.clauses, f.vars
    else:
        clauses = [tuple(c) for c in f]
        variables = {abs(l) for c in clauses for l in c}
    out = Cnf(variables=variables)
    top = []
    next_id = [max(out.vars, default=0)] if pool is None else None
    for c in clauses:
        c = tuple(c)
        if not c:
            # f contains false, so not f is true
            return Cnf(variables=out.vars)
        if len(c) == 1:
            top.append(-c[0])
            continue
        key = tuple(sorted(c))
        a = cache.get(key) if cache is not None else None
        if a is None:
            if pool is not None:
                a = pool.new(Kind.AUX)
            else:
                next_id[0] += 1
                a = next_id[0]
            for l in c:
                out.add((-a, -l))
            if cache is not None:
                cache[key] = a
        out.vars.add(a)
        top.append(a)
    t = try_clause(top)
    if t is not None:
        out.add(t)
    return out


def neg_learn(f, backend=None):
    """CNF over ``f.vars`` (no auxiliaries) equivalent to ``not f``.

    Learns clauses from minimal cores of models of ``f`` against the PG
    encoding of ``not f``."""
    variables = sorted(f.vars)
    result = Cnf(variables=variables)
    pos = sat.new_session(f.clauses, backend)
    neg = sat.new_session(negate_pg(f).clauses, backend)
    while True:
        r = pos.solve()
        if not r.sat:
            return result
        x = r.model.cube(variables)
        core = sat.min_unsat_core(x, neg)
        c = negate(core)
        result.add_clause_with_subsumption(c)
        pos.add_clause(c)


def compress_cnf(f, drop_literals=False, backend=None):
    """Equivalent CNF with redundant literals and clauses removed."""
    clauses = list(f.clauses)
    if any(len(c) == 0 for c in clauses):
        return Cnf([()], f.vars)
    if drop_literals:
        s = sat.new_session(clauses, backend)
        clauses = [negate(sat.min_unsat_core(negate(c), s)) for c in clauses]
    clauses = sorted(set(clauses), key=lambda c: (len(c), [lit_key(l) for l in c]))
    out = Cnf(variables=f.vars)
    g = sat.new_session(backend=backend)
    for c in clauses:
        if not c:
            return Cnf([()], f.vars)
        if g.solve(negate(c)).sat:
            g.add_clause(c)
            out.add(c)
    return out


def to_dimacs(f, names=None, top=None):
    """DIMACS text; ``names`` (var -> str) become ``c var`` comments."""
    nv = top if top is not None else max(f.vars, default=0)
    lines = []
    if names:
        for v in sorted(names):
            lines.append("c var %d %s" % (v, names[v]))
    lines.append("p cnf %d %d" % (nv, len(f.clauses)))
    for c in f.clauses:
        lines.append(" ".join(str(l) for l in c) + (" 0" if c else "0"))
    return "\n".join(lines) + "\n"


def parse_dimacs(text):
    """Inverse of :func:`to_dimacs`; returns (Cnf, names)."""
    names = {}
    f = Cnf()
    cur = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 4 and parts[1] == "var":
                names[int(parts[2])] = parts[3]
            continue
        if line.startswith("p"):
            continue
        for tok in line.split():
            l = int(tok)
            if l == 0:
                f.add(cur)
                cur = []
            else:
                cur.append(l)
    f.vars.update(names)
    return f, names
