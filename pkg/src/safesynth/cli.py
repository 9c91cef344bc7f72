"""Command-line front end.

    safesynth gen cnt 4 -o cnt4.aag
    safesynth realizability cnt4.aag --backend sat1-rge
    safesynth synth cnt4.aag --extract sat-learn-dep --verify -o impl.aag
    safesynth verify impl.aag --spec cnt4.aag

Exit codes: 10 realizable, 20 unrealizable, 1 error or unknown; verify
exits 0 when every check passes.
"""
import argparse
import sys
import time

from . import sat
from .aiger import CONTROLLABLE_PREFIX, AigerError, parse_aag, write_aag
from .bench import FAMILIES, BenchParams, gen_benchmark
from .extract import CertificateError, ExtractConfig, extract_qbf_learn, extract_sat_learn
from .oracle import VerifyReport, check_winning_area, verify_controller
from .portfolio import run_portfolio_extract, run_portfolio_win
from .template import templ_schedule
from .winning import (REALIZABLE, UNREALIZABLE, WinConfig, WinningOutcome, export_w, import_w,
                      solve_win)

EXIT_REALIZABLE = 10
EXIT_UNREALIZABLE = 20
EXIT_ERROR = 1

WIN_BACKENDS = ("sat1", "sat1-rg", "sat1-rge", "qbf", "templ-sat", "templ-qbf", "portfolio")
EXTRACTORS = ("sat-learn", "sat-learn-dep", "sat-learn-dep-min", "qbf-learn", "portfolio")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _win_config(name):
    return {"sat1": WinConfig(),
            "sat1-rg": WinConfig(opt_rg=True),
            "sat1-rge": WinConfig(opt_rg=True, expand_cex=True, expand_gen=True),
            "qbf": WinConfig(backend="qbf")}[name]


def solve(spec, backend="sat1-rge", threads=1, time_budget=None, template="cnf"):
    """Winning-area computation selected by CLI backend name."""
    if backend == "portfolio":
        return run_portfolio_win(spec, threads, time_budget=time_budget)
    if backend in ("templ-sat", "templ-qbf"):
        return templ_schedule(spec, template, backend[6:], time_budget=time_budget)
    return solve_win(spec, _win_config(backend).replace(time_budget=time_budget))


def extract(spec, w, method="sat-learn-dep", threads=1):
    if method == "portfolio":
        return run_portfolio_extract(spec, w, threads)
    if method == "qbf-learn":
        return extract_qbf_learn(spec, w, ExtractConfig(dep_opt=False))
    return extract_sat_learn(spec, w, ExtractConfig(dep_opt=method != "sat-learn",
                                                    minimize=method.endswith("-min")))


def _parser():
    p = _Parser(prog="safesynth", description="Safety synthesis for AIGER specifications.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("spec", help="ASCII AIGER specification")
        sp.add_argument("--backend", choices=WIN_BACKENDS, default="sat1-rge")
        sp.add_argument("--template", choices=("cnf", "aig"), default="cnf",
                        help="template shape for the templ-* backends")
        sp.add_argument("--threads", type=int, default=1, choices=(1, 2, 3))
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--time-budget", type=float, default=None, metavar="SEC")
        sp.add_argument("--sat-backend", choices=("pysat", "cdcl"), default=None)
        sp.add_argument("--stats", metavar="FILE", help="write key=value statistics")
        sp.add_argument("-o", dest="out", metavar="OUT")

    r = sub.add_parser("realizability", help="decide realizability; -o writes the winning area")
    common(r)
    s = sub.add_parser("synth", help="synthesize a controller; -o writes the implementation")
    common(s)
    s.add_argument("--extract", choices=EXTRACTORS, default="sat-learn-dep")
    s.add_argument("--verify", action="store_true", help="check the certificate and the controller")
    s.add_argument("--winning-area", metavar="FILE", help="use a previously exported winning area")
    g = sub.add_parser("gen", help="generate a benchmark")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("k", type=int)
    g.add_argument("--unrealizable", action="store_true")
    g.add_argument("-o", dest="out", metavar="OUT")
    v = sub.add_parser("verify", help="model-check an implementation circuit")
    v.add_argument("impl", help="ASCII AIGER implementation without controllable inputs")
    v.add_argument("--spec", help="specification the implementation must match")
    v.add_argument("--time-budget", type=float, default=None, metavar="SEC")
    return p


def _read(path):
    with open(path) as fh:
        return fh.read()


def _emit(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_stats(path, stats):
    if path:
        with open(path, "w") as fh:
            for k, v in stats.items():
                fh.write("%s=%s\n" % (k, v))


def _stats(out, t0, gates=None):
    st = {"verdict": out.verdict,
          "refinements": out.stats.get("refinements", 0),
          "sat_calls": sat.COUNTERS.sat_calls,
          "qbf_calls": sat.COUNTERS.qbf_calls}
    if gates is not None:
        st["gates"] = gates
    st["time_ms"] = int(1000 * (time.monotonic() - t0))
    return st


def _exit_for(verdict):
    return {REALIZABLE: EXIT_REALIZABLE, UNREALIZABLE: EXIT_UNREALIZABLE}.get(verdict, EXIT_ERROR)


def _cmd_gen(a):
    _emit(a.out, gen_benchmark(BenchParams(a.family, a.k, a.unrealizable)))
    return 0


def _cmd_realizability(a):
    t0 = time.monotonic()
    spec = parse_aag(_read(a.spec))
    out = solve(spec, a.backend, a.threads, a.time_budget, a.template)
    print(out.verdict)
    if out.verdict == REALIZABLE and a.out:
        _emit(a.out, export_w(spec, out.W))
    _write_stats(a.stats, _stats(out, t0))
    return _exit_for(out.verdict)


def _cmd_synth(a):
    t0 = time.monotonic()
    spec = parse_aag(_read(a.spec))
    if a.winning_area:
        out = WinningOutcome(REALIZABLE, import_w(spec, _read(a.winning_area)), "winning-area")
    else:
        out = solve(spec, a.backend, a.threads, a.time_budget, a.template)
    print(out.verdict, file=sys.stderr)
    if out.verdict != REALIZABLE:
        _write_stats(a.stats, _stats(out, t0))
        return _exit_for(out.verdict)
    if not out.extractable:
        raise CertificateError("this winning-area kind cannot be used for extraction")
    ctrl = extract(spec, out.W, a.extract, a.threads)
    if a.verify:
        rep = check_winning_area(spec, out.W)
        crep = verify_controller(spec, ctrl, out.W, seed=a.seed)
        sys.stderr.write(rep.to_text() + crep.to_text())
        if not (rep.ok and crep.ok):
            _write_stats(a.stats, _stats(out, t0, ctrl.gates))
            return EXIT_ERROR
    _emit(a.out, write_aag(spec, ctrl))
    _write_stats(a.stats, _stats(out, t0, ctrl.gates))
    return EXIT_REALIZABLE


def verify_implementation(impl_text, spec_text=None, time_budget=None):
    """Model-check a controller-free circuit: its error output must be
    unreachable.  Returns a VerifyReport."""
    impl = parse_aag(impl_text)
    if impl.c:
        raise AigerError("implementation still has controllable inputs")
    rep = VerifyReport()
    if spec_text is not None:
        spec = parse_aag(spec_text)
        names = [impl.source.input_name(k) for k in range(len(impl.source.inputs))]
        want = [spec.source.input_name(k) for k in range(len(spec.source.inputs))]
        want = [n for n in want if not n.startswith(CONTROLLABLE_PREFIX)]
        rep.record("interface", names == want and len(impl.x) == len(spec.x),
                   ["inputs"] + names)
    out = solve_win(impl, WinConfig(opt_rg=True, time_budget=time_budget))
    rep.record("safety", out.verdict == REALIZABLE)
    if out.verdict == REALIZABLE:
        cert = check_winning_area(impl, out.W)
        for name, ok in cert.checks.items():
            rep.record("invariant_" + name, ok)
    return rep


def _cmd_verify(a):
    rep = verify_implementation(_read(a.impl), _read(a.spec) if a.spec else None, a.time_budget)
    sys.stdout.write(rep.to_text())
    return 0 if rep.ok else EXIT_ERROR


def main(argv=None):
    try:
        a = _parser().parse_args(argv)
        if getattr(a, "sat_backend", None):
            sat.set_default_backend(a.sat_backend)
        sat.COUNTERS.reset()
        return {"gen": _cmd_gen, "realizability": _cmd_realizability,
                "synth": _cmd_synth, "verify": _cmd_verify}[a.cmd](a)
    except UsageError as e:
        print("usage error: %s" % e, file=sys.stderr)
    except (OSError, AigerError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
