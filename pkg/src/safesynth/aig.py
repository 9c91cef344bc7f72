"""And-inverter graphs with structural hashing, and their CNF encoding.

AIG literals follow the AIGER convention: ``2 * node + complement`` with
node 0 the constant false, so literal 0 is false and 1 is true.  AND
nodes are created after their fanins, so node order is topological.
"""
from .cnf import Kind


class BudgetExceeded(RuntimeError):
    """Raised when a rebuild would create more gates than allowed."""


def neg(lit):
    return lit ^ 1


class Aig:
    def __init__(self):
        self.fanins = [None]
        self.is_input = [False]
        self.strash = {}

    def copy(self):
        g = Aig()
        g.fanins = list(self.fanins)
        g.is_input = list(self.is_input)
        g.strash = dict(self.strash)
        return g

    @property
    def num_nodes(self):
        return len(self.fanins)

    def new_input(self):
        self.fanins.append(None)
        self.is_input.append(True)
        return 2 * (len(self.fanins) - 1)

    def AND(self, a, b):
        if a > b:
            a, b = b, a
        if a == 0:
            return 0
        if a == 1 or a == b:
            return b
        if a ^ 1 == b:
            return 0
        key = (a, b)
        hit = self.strash.get(key)
        if hit is not None:
            return hit
        self.fanins.append(key)
        self.is_input.append(False)
        lit = 2 * (len(self.fanins) - 1)
        self.strash[key] = lit
        return lit

    def OR(self, a, b):
        return self.AND(a ^ 1, b ^ 1) ^ 1

    def XOR(self, a, b):
        return self.OR(self.AND(a, b ^ 1), self.AND(a ^ 1, b))

    def XNOR(self, a, b):
        return self.XOR(a, b) ^ 1

    def MUX(self, s, t, e):
        return self.OR(self.AND(s, t), self.AND(s ^ 1, e))

    def AND_all(self, lits):
        out = 1
        for l in lits:
            out = self.AND(out, l)
        return out

    def OR_all(self, lits):
        out = 0
        for l in lits:
            out = self.OR(out, l)
        return out

    def cone(self, lits):
        """AND nodes in the fan-in cone of ``lits``, topologically sorted."""
        seen = set()
        stack = [l >> 1 for l in lits]
        fanins = self.fanins
        while stack:
            n = stack.pop()
            if n in seen or fanins[n] is None:
                continue
            seen.add(n)
            a, b = fanins[n]
            stack.append(a >> 1)
            stack.append(b >> 1)
        return sorted(seen)

    def support(self, lits):
        """Input nodes in the fan-in cone of ``lits``."""
        seen = set()
        out = set()
        stack = [l >> 1 for l in lits]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if self.is_input[n]:
                out.add(n)
            elif self.fanins[n] is not None:
                a, b = self.fanins[n]
                stack.append(a >> 1)
                stack.append(b >> 1)
        return out

    def compose(self, lits, subst, memo=None, limit=None):
        """Rebuild ``lits`` with input nodes replaced per ``subst``
        (input node -> literal).  Structural hashing shares every gate
        whose cone is untouched.  ``limit`` caps the number of new nodes."""
        if memo is None:
            memo = {}
        start = len(self.fanins)
        fanins = self.fanins
        out = []
        for root in lits:
            rn = root >> 1
            if rn not in memo:
                stack = [rn]
                while stack:
                    n = stack[-1]
                    if n in memo:
                        stack.pop()
                        continue
                    f = fanins[n]
                    if f is None:
                        memo[n] = subst.get(n, 2 * n)
                        stack.pop()
                        continue
                    a, b = f
                    ma = memo.get(a >> 1)
                    mb = memo.get(b >> 1)
                    if ma is None:
                        stack.append(a >> 1)
                        continue
                    if mb is None:
                        stack.append(b >> 1)
                        continue
                    memo[n] = self.AND(ma ^ (a & 1), mb ^ (b & 1))
                    stack.pop()
                    if limit is not None and len(fanins) - start > limit:
                        raise BudgetExceeded("expansion exceeded %d gates" % limit)
            out.append(memo[rn] ^ (root & 1))
        return out

    def evaluate(self, lits, values, ones=True):
        """Evaluate ``lits`` given ``values`` (input node -> bool or
        integer/array bit-vector).  ``ones`` is the all-true value of the
        vector type (True for bools, ~0 for numpy arrays)."""
        cone = self.cone(lits)
        val = dict(values)
        val[0] = ones ^ ones

        def get(l):
            v = val[l >> 1]
            return v ^ ones if l & 1 else v

        for n in cone:
            a, b = self.fanins[n]
            val[n] = get(a) & get(b)
        return [get(l) for l in lits]


class CnfMap:
    """Binding of AIG nodes to CNF variables, shared by all sessions
    that talk about one circuit."""

    def __init__(self, pool):
        self.pool = pool
        self.var = {}
        self.node = {}

    def copy(self, pool):
        m = CnfMap(pool)
        m.var = dict(self.var)
        m.node = dict(self.node)
        return m

    def bind(self, node, var):
        self.var[node] = var
        self.node[var] = node

    def var_of(self, node):
        v = self.var.get(node)
        if v is None:
            v = self.pool.new(Kind.AUX)
            self.bind(node, v)
        return v

    def lit(self, aig_lit):
        """CNF literal for an AIG literal; True/False for constants."""
        n = aig_lit >> 1
        if n == 0:
            return bool(aig_lit & 1)
        v = self.var_of(n)
        return -v if aig_lit & 1 else v


POS, NEG, BOTH = 1, 2, 3


class Encoder:
    """Emits polarity-aware Tseitin clauses for AIG cones into ``sink``
    (anything with ``add_clause``), never emitting a definition twice."""

    def __init__(self, aig, cmap, sink):
        self.aig = aig
        self.cmap = cmap
        self.sink = sink
        self.done = {}
        self.aux = set()

    def need(self, aig_lit, pol=BOTH):
        """Make sure the definition of ``aig_lit`` is present for the
        polarity in which the literal is used; returns the CNF literal
        (or a bool for constants)."""
        stack = [(aig_lit, pol)]
        fanins, cmap, done = self.aig.fanins, self.cmap, self.done
        while stack:
            l, p = stack.pop()
            n = l >> 1
            if n == 0 or fanins[n] is None:
                continue
            if l & 1:
                p = {POS: NEG, NEG: POS, BOTH: BOTH}[p]
            have = done.get(n, 0)
            todo = p & ~have
            if not todo:
                continue
            done[n] = have | todo
            v = cmap.var_of(n)
            self.aux.add(v)
            a, b = fanins[n]
            la, lb = cmap.lit(a), cmap.lit(b)
            if todo & POS:
                for x in (la, lb):
                    if x is not True:
                        self.sink.add_clause((-v,) if x is False else (-v, x))
                stack.append((a, POS))
                stack.append((b, POS))
            if todo & NEG:
                c = [v]
                for x in (la, lb):
                    if x is True:
                        continue
                    if x is False:
                        c = None
                        break
                    c.append(-x)
                if c is not None:
                    self.sink.add_clause(tuple(c))
                stack.append((a, NEG))
                stack.append((b, NEG))
        return cmap.lit(aig_lit)

    def assert_lit(self, aig_lit):
        """Add the constraint that ``aig_lit`` is true."""
        x = self.need(aig_lit, POS)
        if x is False:
            self.sink.add_clause(())
        elif x is not True:
            self.sink.add_clause((x,))

    def equiv(self, var, aig_lit):
        """Add ``var <-> aig_lit``."""
        x = self.need(aig_lit, BOTH)
        if x is True:
            self.sink.add_clause((var,))
        elif x is False:
            self.sink.add_clause((-var,))
        else:
            self.sink.add_clause((-var, x))
            self.sink.add_clause((var, -x))


class ClauseList:
    """Minimal clause sink."""

    def __init__(self):
        self.clauses = []

    def add_clause(self, c):
        self.clauses.append(tuple(c))
