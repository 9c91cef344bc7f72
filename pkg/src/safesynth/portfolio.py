"""Parallel portfolios.

Winning-region threads exchange F-clauses through per-thread queues;
receivers pick them up at iteration boundaries.  The first definitive
verdict wins and the other threads are asked to stop.  Extraction runs
several configurations and keeps the smallest verified controller.
"""
import queue
import threading
import time

from .cnf import Cnf
from .extract import ExtractConfig, extract_qbf_learn, extract_sat_learn
from .oracle import check_winning_area, verify_controller
from .template import templ_schedule
from .winning import REALIZABLE, UNKNOWN, UNREALIZABLE, Cancelled, WinConfig, WinningOutcome, solve_win


class ShareMsg:
    """``kind`` is "clause", "result" or "error"."""

    __slots__ = ("kind", "payload", "origin")

    def __init__(self, kind, payload, origin):
        self.kind = kind
        self.payload = payload
        self.origin = origin


def _drain(q):
    out = []
    while True:
        try:
            out.append(q.get_nowait())
        except queue.Empty:
            return out


def win_thread_configs(threads):
    """Names and configs of the first ``threads`` portfolio members."""
    members = [("sat1-rge", WinConfig(opt_rg=True, expand_cex=True, expand_gen=True)),
               ("templ", None),
               ("sat1-rg", WinConfig(opt_rg=True))]
    return members[:threads]


def _template_worker(spec, stop, inbox, period, backend):
    """Alternate CEGIS and QBF template solving; received clauses are a
    fixed part of every candidate.  Only ever reports realizable."""
    fixed = None
    methods = ("sat", "qbf")
    k = 0
    while not stop.is_set():
        got = inbox()
        if got:
            fixed = fixed or Cnf(variables=spec.x)
            for cl in got:
                fixed.add_clause_with_subsumption(cl)
        out = templ_schedule(spec, "cnf", methods[k % 2], time_budget=period,
                             backend=backend, stop=stop, fixed=fixed)
        if out.verdict == REALIZABLE:
            return out
        k += 1
        if k % 2 == 0:
            period *= 2
    raise Cancelled()


def run_portfolio_win(spec, threads=1, time_budget=None, template_period=2.0, backend=None,
                      verify=True):
    if not 1 <= threads <= 3:
        raise ValueError("portfolio supports 1 to 3 threads")
    members = win_thread_configs(threads)
    if threads == 1:
        name, cfg = members[0]
        out = solve_win(spec.clone(), cfg.replace(time_budget=time_budget, sat_backend=backend))
        out.origin = name
        return _verified(spec, out, backend, verify)
    stop = threading.Event()
    results = queue.Queue()
    inboxes = [queue.Queue() for _ in members]

    def broadcast(me):
        def send(cl):
            for k, q in enumerate(inboxes):
                if k != me:
                    q.put(tuple(cl))
        return send

    def run(k, name, cfg):
        try:
            s = spec.clone()
            inbox = lambda: _drain(inboxes[k])  # noqa: E731
            if cfg is None:
                out = _template_worker(s, stop, inbox, template_period, backend)
            else:
                out = solve_win(s, cfg.replace(on_clause=broadcast(k), inbox=inbox, stop=stop,
                                               sat_backend=backend))
            out.origin = name
            results.put(ShareMsg("result", out, name))
        except Cancelled:
            results.put(ShareMsg("error", "cancelled", name))
        except Exception as e:  # reported, other threads keep going
            results.put(ShareMsg("error", e, name))

    workers = [threading.Thread(target=run, args=(k, name, cfg), daemon=True)
               for k, (name, cfg) in enumerate(members)]
    for w in workers:
        w.start()
    deadline = None if time_budget is None else time.monotonic() + time_budget
    pending = len(workers)
    errors = []
    winner = None
    while pending and winner is None:
        timeout = None if deadline is None else max(0.0, deadline - time.monotonic())
        try:
            msg = results.get(timeout=timeout)
        except queue.Empty:
            break
        pending -= 1
        if msg.kind == "result" and msg.payload.verdict in (REALIZABLE, UNREALIZABLE):
            winner = msg.payload
        else:
            errors.append("%s: %s" % (msg.origin, msg.payload if msg.kind == "error"
                                      else msg.payload.verdict))
    stop.set()
    for w in workers:
        w.join(timeout=5.0)
    if winner is None:
        return WinningOutcome(UNKNOWN, stats={"reason": "; ".join(errors) or "time budget"})
    winner.stats["origin"] = winner.origin
    return _verified(spec, winner, backend, verify)


def _verified(spec, out, backend, verify):
    if verify and out.verdict == REALIZABLE:
        rep = check_winning_area(spec, out.W, backend)
        if not rep.ok:
            raise AssertionError("portfolio winning area failed verification: %r" % rep)
    return out


def extract_thread_configs(threads):
    members = [("sat-learn-dep", lambda s, w, stop: extract_sat_learn(
                    s, w, ExtractConfig(dep_opt=True, check_w=False, stop=stop))),
               ("qbf-learn", lambda s, w, stop: extract_qbf_learn(
                    s, w, ExtractConfig(dep_opt=False, check_w=False, stop=stop))),
               ("sat-learn", lambda s, w, stop: extract_sat_learn(
                    s, w, ExtractConfig(dep_opt=False, check_w=False, stop=stop)))]
    return members[:threads]


def run_portfolio_extract(spec, w, threads=1, wait_ratio=10.0, time_budget=None,
                          sim_steps=10000):
    """Smallest verified controller among the finished threads.  After
    the first result at time t the others get until wait_ratio * t.
    ``finished`` on the result maps each finished thread to its gate count."""
    if not 1 <= threads <= 3:
        raise ValueError("portfolio supports 1 to 3 threads")
    members = extract_thread_configs(threads)
    if threads == 1:
        name, fn = members[0]
        c = fn(spec.clone(), w, None)
        c.origin = name
        c.finished = {name: c.gates}
        return c
    stop = threading.Event()
    results = queue.Queue()

    def run(name, fn):
        try:
            c = fn(spec.clone(), w, stop)
            c.origin = name
            rep = verify_controller(spec, c, w, sim_steps=sim_steps)
            results.put(ShareMsg("result" if rep.ok else "error", c, name))
        except Exception as e:
            results.put(ShareMsg("error", e, name))

    t0 = time.monotonic()
    workers = [threading.Thread(target=run, args=m, daemon=True) for m in members]
    for t in workers:
        t.start()
    deadline = None if time_budget is None else t0 + time_budget
    done = []
    errors = []
    pending = len(workers)
    while pending:
        timeout = None if deadline is None else max(0.0, deadline - time.monotonic())
        try:
            msg = results.get(timeout=timeout)
        except queue.Empty:
            break
        pending -= 1
        if msg.kind == "result":
            done.append(msg.payload)
            if len(done) == 1:
                first = time.monotonic() - t0
                wait_until = t0 + wait_ratio * max(first, 1e-3)
                deadline = wait_until if deadline is None else min(deadline, wait_until)
        else:
            errors.append("%s: %s" % (msg.origin, msg.payload))
    stop.set()
    for t in workers:
        t.join(timeout=5.0)
    # results that arrived while joining still count
    for msg in _drain(results):
        if msg.kind == "result":
            done.append(msg.payload)
    if not done:
        raise RuntimeError("no extraction thread finished: %s" % "; ".join(errors))
    best = min(done, key=lambda c: c.gates)
    best.finished = {c.origin: c.gates for c in done}
    return best
