"""AIGER (ASCII) safety specifications.

``parse_aag`` reads an ``aag`` file into a :class:`SafetySpec`: inputs
whose symbol starts with ``controllable_`` are controllable, the single
output is the error signal, and an absorbing error latch is appended so
that the safety property is the state predicate ``not err``.
"""
from . import sat
from .aig import Aig, BudgetExceeded, ClauseList, CnfMap, Encoder
from .cnf import Cnf, Kind, VarPool, negate_pg

CONTROLLABLE_PREFIX = "controllable_"
ERROR_LATCH_NAME = "__error_latch"


class AigerError(ValueError):
    pass


class MalformedHeader(AigerError):
    pass


class DanglingLiteral(AigerError):
    pass


class MultipleOutputs(AigerError):
    pass


class NonZeroInit(AigerError):
    pass


class BinaryAigerUnsupported(AigerError):
    pass


class AigCircuit:
    """Plain contents of an ``aag`` file (literals as in the file)."""

    def __init__(self, maxvar, inputs, latches, outputs, gates, symbols=None, comments=None):
        self.maxvar = maxvar
        self.inputs = list(inputs)
        self.latches = list(latches)
        self.outputs = list(outputs)
        self.gates = list(gates)
        self.symbols = dict(symbols or {})
        self.comments = list(comments or [])

    def input_name(self, k):
        return self.symbols.get(("i", k), "i%d" % k)

    def latch_name(self, k):
        return self.symbols.get(("l", k), "l%d" % k)

    def to_text(self):
        lines = ["aag %d %d %d %d %d" % (self.maxvar, len(self.inputs), len(self.latches),
                                         len(self.outputs), len(self.gates))]
        lines += [str(l) for l in self.inputs]
        lines += ["%d %d" % (cur, nxt) for cur, nxt in self.latches]
        lines += [str(o) for o in self.outputs]
        lines += ["%d %d %d" % g for g in self.gates]
        for kind in ("i", "l", "o"):
            for (k, n), name in sorted(self.symbols.items(), key=lambda t: (t[0][0], t[0][1])):
                if k == kind:
                    lines.append("%s%d %s" % (k, n, name))
        if self.comments:
            lines.append("c")
            lines += self.comments
        return "\n".join(lines) + "\n"


def read_aag(text):
    """Parse ``aag`` text into an :class:`AigCircuit` with checks."""
    if isinstance(text, bytes):
        if text.startswith(b"aig"):
            raise BinaryAigerUnsupported("binary AIGER is not supported; convert with aigtoaig")
        text = text.decode()
    lines = text.split("\n")
    header = lines[0].split() if lines else []
    if header and header[0] == "aig":
        raise BinaryAigerUnsupported("binary AIGER is not supported; convert with aigtoaig")
    if len(header) < 6 or header[0] != "aag":
        raise MalformedHeader("expected 'aag M I L O A', got %r" % (lines[0] if lines else ""))
    try:
        nums = [int(t) for t in header[1:]]
    except ValueError:
        raise MalformedHeader("non-numeric header field in %r" % lines[0])
    if any(n < 0 for n in nums) or len(nums) > 9:
        raise MalformedHeader("bad header %r" % lines[0])
    m, ni, nl, no, na = nums[:5]
    if any(nums[5:]):
        raise MalformedHeader("bad/constraint/justice/fairness sections are not supported")
    if no > 1:
        raise MultipleOutputs("expected a single error output, found %d" % no)
    body = lines[1:]
    need = ni + nl + no + na
    if len(body) < need:
        raise MalformedHeader("file ends before all %d declared lines" % need)

    def ints(s, count, what):
        parts = s.split()
        if len(parts) not in count:
            raise MalformedHeader("bad %s line %r" % (what, s))
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise MalformedHeader("bad %s line %r" % (what, s))

    pos = 0
    inputs = []
    for _ in range(ni):
        inputs.append(ints(body[pos], (1,), "input")[0])
        pos += 1
    latches = []
    for _ in range(nl):
        vals = ints(body[pos], (2, 3), "latch")
        pos += 1
        if len(vals) == 3 and vals[2] != 0:
            raise NonZeroInit("latch %d has initial value %d; only 0 is supported" % (vals[0], vals[2]))
        latches.append((vals[0], vals[1]))
    outputs = []
    for _ in range(no):
        outputs.append(ints(body[pos], (1,), "output")[0])
        pos += 1
    gates = []
    for _ in range(na):
        gates.append(tuple(ints(body[pos], (3,), "and")))
        pos += 1
    symbols = {}
    comments = []
    rest = body[pos:]
    for k, line in enumerate(rest):
        if not line.strip():
            continue
        if line[0] == "c":
            comments = rest[k + 1:]
            while comments and comments[-1] == "":
                comments.pop()
            break
        kind = line[0]
        head, _, name = line.partition(" ")
        if kind not in "ilo" or not head[1:].isdigit():
            raise MalformedHeader("bad symbol line %r" % line)
        symbols[(kind, int(head[1:]))] = name

    defined = {}
    for l in inputs:
        _check_def(l, m, defined, "input")
    for cur, _ in latches:
        _check_def(cur, m, defined, "latch")
    for g in gates:
        _check_def(g[0], m, defined, "and")
    for l in [n for _, n in latches] + outputs + [r for g in gates for r in g[1:]]:
        if l > 2 * m + 1:
            raise DanglingLiteral("literal %d exceeds maximum variable index %d" % (l, m))
        if l > 1 and (l >> 1) not in defined:
            raise DanglingLiteral("literal %d is never defined" % l)
    gates.sort()
    return AigCircuit(m, inputs, latches, outputs, gates, symbols, comments)


def _check_def(lit, m, defined, what):
    if lit < 2 or lit & 1:
        raise MalformedHeader("%s literal %d must be even and positive" % (what, lit))
    if lit > 2 * m + 1:
        raise DanglingLiteral("%s literal %d exceeds maximum variable index %d" % (what, lit, m))
    if (lit >> 1) in defined:
        raise MalformedHeader("variable %d defined twice" % (lit >> 1))
    defined[lit >> 1] = what


class SafetySpec:
    """The safety game (x, i, c, I, T, P).

    The transition relation is kept as an AIG (``aig`` with ``next_lits``
    over the input nodes of x, i and c); ``T`` is its CNF encoding with
    explicit next-state variables ``x_next``.
    """

    def __init__(self, aig, pool, cmap, x, i, c, next_lits, init=None, safe=None,
                 source=None, error_var=None, error_output=None):
        self.aig = aig
        self.pool = pool
        self.cmap = cmap
        self.x = list(x)
        self.i = list(i)
        self.c = list(c)
        self.next_lits = list(next_lits)
        self.init = tuple(init) if init is not None else tuple(-v for v in self.x)
        if safe is None:
            safe = Cnf([(-error_var,)]) if error_var is not None else Cnf()
        self.safe = safe
        self.source = source
        self.error_var = error_var
        self.error_output = error_output
        self.x_next = [pool.new(Kind.NEXT, pool.name(v) + "'") for v in self.x]
        self._T = None
        self._aux = None

    def node(self, var):
        """AIG input literal of a state/input/control variable."""
        return 2 * self.cmap.node[var]

    @property
    def T(self):
        if self._T is None:
            sink = ClauseList()
            enc = Encoder(self.aig, self.cmap, sink)
            for xn, l in zip(self.x_next, self.next_lits):
                enc.equiv(xn, l)
            self._T = Cnf(sink.clauses, self.x + self.i + self.c + self.x_next)
            self._aux = sorted(enc.aux)
        return self._T

    @property
    def aux(self):
        self.T
        return self._aux

    def encoder(self, sink):
        return Encoder(self.aig, self.cmap, sink)

    def clone(self):
        """Independent copy with identical variable numbering."""
        pool = self.pool.copy()
        s = object.__new__(SafetySpec)
        s.__dict__.update(self.__dict__)
        s.aig = self.aig.copy()
        s.pool = pool
        s.cmap = self.cmap.copy(pool)
        s._T = None
        s._aux = None
        return s

    def names(self):
        return {v: self.pool.name(v) for v in self.x + self.i + self.c}

    def initial_unsafe(self):
        """True iff I and not P intersect."""
        neg = negate_pg(self.safe, self.pool)
        return sat.is_sat(list(neg.clauses) + [(l,) for l in self.init])

    def __repr__(self):
        return "SafetySpec(|x|=%d, |i|=%d, |c|=%d)" % (len(self.x), len(self.i), len(self.c))


class SpecBuilder:
    """Build a :class:`SafetySpec` directly from AIG functions."""

    def __init__(self):
        self.aig = Aig()
        self.pool = VarPool()
        self.cmap = CnfMap(self.pool)
        self.latches = []
        self.inputs = []
        self.controls = []
        self.nexts = {}

    def _new(self, kind, name):
        lit = self.aig.new_input()
        v = self.pool.new(kind, name)
        self.cmap.bind(lit >> 1, v)
        return lit

    def latch(self, name):
        lit = self._new(Kind.STATE, name)
        self.latches.append(lit)
        return lit

    def input(self, name):
        lit = self._new(Kind.INPUT, name)
        self.inputs.append(lit)
        return lit

    def control(self, name):
        lit = self._new(Kind.CONTROL, name)
        self.controls.append(lit)
        return lit

    def set_next(self, latch, fn):
        self.nexts[latch] = fn

    def var(self, lit):
        return self.cmap.var[lit >> 1]

    def build(self, error=None, init=None, safe=None, source=None):
        """``error`` (AIG literal) appends the absorbing error latch.
        ``init`` and ``safe`` override I (cube) and P (Cnf)."""
        xs = list(self.latches)
        nexts = [self.nexts.get(l, l) for l in xs]
        err_var = None
        if error is not None:
            e = self._new(Kind.STATE, ERROR_LATCH_NAME)
            xs.append(e)
            nexts.append(self.aig.OR(e, error))
            err_var = self.var(e)
        return SafetySpec(self.aig, self.pool, self.cmap,
                          [self.var(l) for l in xs],
                          [self.var(l) for l in self.inputs],
                          [self.var(l) for l in self.controls],
                          nexts, init, safe, source, err_var, error)


def spec_from_circuit(circ):
    b = SpecBuilder()
    lit_map = {0: 0, 1: 1}
    for k, l in enumerate(circ.inputs):
        name = circ.input_name(k)
        if name.startswith(CONTROLLABLE_PREFIX):
            a = b.control(name)
        else:
            a = b.input(name)
        lit_map[l] = a
    for k, (cur, _) in enumerate(circ.latches):
        lit_map[cur] = b.latch(circ.latch_name(k))
    gate_def = {g[0]: (g[1], g[2]) for g in circ.gates}

    def tr(l):
        base = l & ~1
        if base not in lit_map:
            # iterative post-order over the gate definitions
            stack = [base]
            onstack = set()
            while stack:
                n = stack[-1]
                if n in lit_map:
                    stack.pop()
                    continue
                r0, r1 = gate_def[n]
                pend = [r & ~1 for r in (r0, r1) if (r & ~1) not in lit_map]
                if pend:
                    if n in onstack:
                        raise AigerError("combinational cycle through literal %d" % n)
                    onstack.add(n)
                    stack.extend(pend)
                    continue
                lit_map[n] = b.aig.AND(lit_map[r0 & ~1] ^ (r0 & 1), lit_map[r1 & ~1] ^ (r1 & 1))
                stack.pop()
        return lit_map[base] ^ (l & 1)

    for k, (cur, nxt) in enumerate(circ.latches):
        b.set_next(lit_map[cur], tr(nxt))
    err = tr(circ.outputs[0]) if circ.outputs else 0
    spec = b.build(error=err, source=circ)
    spec.source_map = lit_map
    return spec


def parse_aag(text):
    return spec_from_circuit(read_aag(text))


def expand_circuit(spec, over, copy_vars=(), limit=None):
    """Universal expansion of the next-state functions over ``over``.

    For every assignment to ``over`` the next-state literals are rebuilt
    with those variables fixed; variables in ``copy_vars`` (typically the
    inner existentials c) get fresh copies per assignment.  Structural
    hashing shares untouched gates; identical next-state vectors are
    deduplicated.  Returns a list of ``(assignment, next_lits, copies)``
    where ``copies`` maps each copied var to its fresh var.
    """
    aig = spec.aig
    over = list(over)
    out = []
    seen = {}
    base = aig.num_nodes
    for bits in range(1 << len(over)):
        assign = {v: bool(bits >> k & 1) for k, v in enumerate(over)}
        subst = {spec.cmap.node[v]: int(assign[v]) for v in over}
        copies = {}
        for v in copy_vars:
            lit = aig.new_input()
            nv = spec.pool.new(spec.pool.kind(v), spec.pool.name(v) + "#%d" % bits)
            spec.cmap.bind(lit >> 1, nv)
            subst[spec.cmap.node[v]] = lit
            copies[v] = nv
        budget = None if limit is None else limit - (aig.num_nodes - base)
        if budget is not None and budget < 0:
            raise BudgetExceeded("expansion exceeded %d gates" % limit)
        lits = tuple(aig.compose(spec.next_lits, subst, limit=budget))
        key = lits if not copy_vars else None
        if key is not None and key in seen:
            continue
        if key is not None:
            seen[key] = len(out)
        out.append((assign, list(lits), copies))
    return out


def gates_copied(spec, var):
    """Number of gates in the next-state cones that depend on ``var``."""
    aig = spec.aig
    node = spec.cmap.node[var]
    dep = {node}
    count = 0
    for n in aig.cone(spec.next_lits):
        a, b = aig.fanins[n]
        if (a >> 1) in dep or (b >> 1) in dep:
            dep.add(n)
            count += 1
    return count


def write_aag(spec, controller=None):
    """Original circuit with controllable inputs replaced by controller
    gates.  Gates are renumbered: controller logic first, then the
    original gates; the error latch (if referenced) is read as 0, which
    is its value in every state a correct controller can reach."""
    circ = spec.source
    if circ is None:
        raise AigerError("spec has no source circuit")
    lit_map = spec.source_map
    ctrl_inputs = [l for k, l in enumerate(circ.inputs)
                   if circ.input_name(k).startswith(CONTROLLABLE_PREFIX)]
    free_inputs = [(k, l) for k, l in enumerate(circ.inputs)
                   if not circ.input_name(k).startswith(CONTROLLABLE_PREFIX)]
    if ctrl_inputs and controller is None:
        raise AigerError("controller required for a spec with controllable inputs")

    new_lit = {0: 0}
    nxt = 1
    inputs_out = []
    for _, l in free_inputs:
        new_lit[l] = 2 * nxt
        inputs_out.append(2 * nxt)
        nxt += 1
    latches_cur = []
    for cur, _ in circ.latches:
        new_lit[cur] = 2 * nxt
        latches_cur.append(2 * nxt)
        nxt += 1
    gates = []

    def out_lit(l):
        return new_lit[l & ~1] ^ (l & 1)

    if ctrl_inputs:
        g = controller.aig
        # controller inputs are state/input vars of the spec
        node_lit = {0: 0}
        for var, node in controller.inputs.items():
            if var == spec.error_var:
                node_lit[node] = 0
                continue
            src = _source_lit(spec, var)
            node_lit[node] = new_lit[src]
        roots = [controller.outputs[spec.cmap.var[lit_map[l] >> 1]] for l in ctrl_inputs]
        for n in g.cone(roots):
            a, b = g.fanins[n]
            la = node_lit[a >> 1] ^ (a & 1)
            lb = node_lit[b >> 1] ^ (b & 1)
            if la == 0 or lb == 0 or la == lb ^ 1:
                node_lit[n] = 0
                continue
            if la == 1 or la == lb:
                node_lit[n] = lb
                continue
            if lb == 1:
                node_lit[n] = la
                continue
            lhs = 2 * nxt
            nxt += 1
            gates.append((lhs, max(la, lb), min(la, lb)))
            node_lit[n] = lhs
        for l, r in zip(ctrl_inputs, roots):
            new_lit[l] = node_lit[r >> 1] ^ (r & 1)
    for lhs, r0, r1 in circ.gates:
        a, b = out_lit(r0), out_lit(r1)
        new = 2 * nxt
        nxt += 1
        gates.append((new, max(a, b), min(a, b)))
        new_lit[lhs] = new
    latches = [(latches_cur[k], out_lit(n)) for k, (_, n) in enumerate(circ.latches)]
    outputs = [out_lit(o) for o in circ.outputs]
    symbols = {}
    for pos, (k, _) in enumerate(free_inputs):
        if ("i", k) in circ.symbols:
            symbols[("i", pos)] = circ.symbols[("i", k)]
    for (kind, k), name in circ.symbols.items():
        if kind in "lo":
            symbols[(kind, k)] = name
    out = AigCircuit(nxt - 1, inputs_out, latches, outputs, gates, symbols)
    return out.to_text()


def _source_lit(spec, var):
    node = spec.cmap.node[var]
    for src, lit in spec.source_map.items():
        if lit == 2 * node and src > 1:
            return src
    raise AigerError("variable %s has no source literal" % spec.pool.name(var))
