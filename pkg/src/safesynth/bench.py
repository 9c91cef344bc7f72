"""Parametric benchmark families as ASCII AIGER.

cnt    k-bit counter incremented by an input; the system may reset it
       when it sits at 2^(k-1)-1 and must keep it below its maximum.
mv     like cnt but k-1 increment inputs, and the reset fires at the msb
       when the XOR of k-1 controls is true.
add    the controls must equal the k sum bits of two k-bit inputs.
mult   the controls must equal the 2k product bits of two k-bit inputs.
bs     k-bit register holding a single one that a barrel shifter rotates
       by an input amount unless the control disables the shift; the top
       bit is marked as bad.

Unrealizable variants (cnt, mv, bs) cut the rescuing control path.
"""
from .aig import Aig
from .aiger import CONTROLLABLE_PREFIX, AigCircuit

FAMILIES = ("cnt", "add", "mult", "mv", "bs")


class BenchParams:
    def __init__(self, family, k, unrealizable=False):
        self.family = family
        self.k = k
        self.unrealizable = unrealizable

    @property
    def name(self):
        return "%s%d%s" % (self.family, self.k, "_unreal" if self.unrealizable else "")

    def __repr__(self):
        return "BenchParams(%r, %d, unrealizable=%r)" % (self.family, self.k, self.unrealizable)


class _Circuit:
    """AIG under construction with named inputs and latches."""

    def __init__(self):
        self.aig = Aig()
        self.inputs = []
        self.latches = []
        self.nexts = {}

    def input(self, name):
        lit = self.aig.new_input()
        self.inputs.append((lit, name))
        return lit

    def control(self, name):
        return self.input(CONTROLLABLE_PREFIX + name)

    def latch(self, name):
        lit = self.aig.new_input()
        self.latches.append((lit, name))
        return lit

    def text(self, error, comment):
        aig = self.aig
        index = {0: 0}
        n = 0
        for lit, _ in self.inputs + self.latches:
            n += 1
            index[lit >> 1] = n
        roots = [self.nexts[l] for l, _ in self.latches] + [error]
        gates = []
        for node in aig.cone(roots):
            n += 1
            index[node] = n

        def tr(l):
            return 2 * index[l >> 1] + (l & 1)

        for node in aig.cone(roots):
            a, b = aig.fanins[node]
            ta, tb = tr(a), tr(b)
            gates.append((2 * index[node], max(ta, tb), min(ta, tb)))
        symbols = {}
        for k, (_, name) in enumerate(self.inputs):
            symbols[("i", k)] = name
        for k, (_, name) in enumerate(self.latches):
            symbols[("l", k)] = name
        symbols[("o", 0)] = "err"
        circ = AigCircuit(n, [tr(l) for l, _ in self.inputs],
                          [(tr(l), tr(self.nexts[l])) for l, _ in self.latches],
                          [tr(error)], gates, symbols, [comment])
        return circ.to_text()


def _equals_const(aig, bits, value):
    return aig.AND_all(b if value >> k & 1 else b ^ 1 for k, b in enumerate(bits))


def _increment(aig, bits, enable):
    """bits + enable, wrapping."""
    out = []
    carry = enable
    for b in bits:
        out.append(aig.XOR(b, carry))
        carry = aig.AND(b, carry)
    return out


def _adder(aig, a, b):
    """Sum bits of a + b (same width, carry-out dropped)."""
    out = []
    carry = 0
    for x, y in zip(a, b):
        out.append(aig.XOR(aig.XOR(x, y), carry))
        carry = aig.OR(aig.AND(x, y), aig.AND(carry, aig.XOR(x, y)))
    return out


def _multiplier(aig, a, b):
    """All 2k product bits of a * b (shift-and-add)."""
    w = len(a) + len(b)
    acc = [0] * w
    for j, y in enumerate(b):
        row = [0] * j + [aig.AND(x, y) for x in a]
        row += [0] * (w - len(row))
        acc = _adder(aig, acc, row)
    return acc


def _cnt(k, unreal):
    c = _Circuit()
    i = c.input("inc")
    ctl = c.control("reset")
    aig = c.aig
    bits = [c.latch("cnt%d" % j) for j in range(k)]
    at = _equals_const(aig, bits, (1 << (k - 1)) - 1)
    reset = aig.AND(at, ctl)
    inc = _increment(aig, bits, i)
    for b, n in zip(bits, inc):
        c.nexts[b] = n if unreal else aig.AND(n, reset ^ 1)
    err = _equals_const(aig, bits, (1 << k) - 1)
    return c, err


def _mv(k, unreal):
    c = _Circuit()
    aig = c.aig
    ins = [c.input("inc%d" % j) for j in range(k - 1)]
    ctls = [c.control("c%d" % j) for j in range(k - 1)]
    bits = [c.latch("cnt%d" % j) for j in range(k)]
    parity = 0
    for l in ctls:
        parity = aig.XOR(parity, l)
    reset = aig.AND(bits[-1], parity)
    inc = _increment(aig, bits, aig.OR_all(ins))
    for b, n in zip(bits, inc):
        c.nexts[b] = n if unreal else aig.AND(n, reset ^ 1)
    err = _equals_const(aig, bits, (1 << k) - 1)
    return c, err


def _mismatch(aig, got, want):
    return aig.OR_all(aig.XOR(g, w) for g, w in zip(got, want))


def _add(k):
    c = _Circuit()
    aig = c.aig
    a = [c.input("a%d" % j) for j in range(k)]
    b = [c.input("b%d" % j) for j in range(k)]
    s = [c.control("s%d" % j) for j in range(k)]
    bad = c.latch("mismatch")
    c.nexts[bad] = _mismatch(aig, s, _adder(aig, a, b))
    return c, bad


def _mult(k):
    c = _Circuit()
    aig = c.aig
    a = [c.input("a%d" % j) for j in range(k)]
    b = [c.input("b%d" % j) for j in range(k)]
    p = [c.control("p%d" % j) for j in range(2 * k)]
    return c, _mismatch(aig, p, _multiplier(aig, a, b))


def _bs(k, unreal):
    if k < 2 or k & (k - 1):
        raise ValueError("bs needs a power of two k >= 2, got %d" % k)
    c = _Circuit()
    aig = c.aig
    width = k.bit_length() - 1
    amount = [c.input("shift%d" % j) for j in range(width)]
    hold = c.control("hold")
    stored = [c.latch("r%d" % j) for j in range(k)]
    # bit 0 is stored inverted so that the register starts at value 1
    reg = [stored[0] ^ 1] + stored[1:]
    cur = reg
    for j, s in enumerate(amount):
        step = 1 << j
        cur = [aig.MUX(s, cur[(m - step) % k], cur[m]) for m in range(k)]
    new = cur if unreal else [aig.MUX(hold, r, n) for r, n in zip(reg, cur)]
    for m, l in enumerate(stored):
        c.nexts[l] = new[m] ^ 1 if m == 0 else new[m]
    return c, reg[-1]


def gen_benchmark(p):
    """ASCII AIGER text of the benchmark described by ``p``."""
    if p.family not in FAMILIES:
        raise ValueError("unknown family %r (choose from %s)" % (p.family, ", ".join(FAMILIES)))
    if not isinstance(p.k, int) or p.k < 1:
        raise ValueError("size parameter must be a positive integer")
    if p.family in ("cnt", "mv") and p.k < 2:
        raise ValueError("%s needs k >= 2" % p.family)
    if p.unrealizable and p.family in ("add", "mult"):
        raise ValueError("%s has no unrealizable variant" % p.family)
    if p.family == "cnt":
        c, err = _cnt(p.k, p.unrealizable)
    elif p.family == "mv":
        c, err = _mv(p.k, p.unrealizable)
    elif p.family == "add":
        c, err = _add(p.k)
    elif p.family == "mult":
        c, err = _mult(p.k)
    else:
        c, err = _bs(p.k, p.unrealizable)
    return c.text(err, "%s generated by safesynth" % p.name)
