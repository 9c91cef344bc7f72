import pytest

from safesynth.cli import main, verify_implementation


@pytest.fixture
def files(tmp_path):
    for name, args in (("cnt4.aag", ["cnt", "4"]), ("cnt3_unreal.aag", ["cnt", "3", "--unrealizable"])):
        assert main(["gen"] + args + ["-o", str(tmp_path / name)]) == 0
    return tmp_path


def test_realizability_exit_codes(files):
    assert main(["realizability", str(files / "cnt4.aag"), "--backend", "sat1-rge"]) == 10
    assert main(["realizability", str(files / "cnt3_unreal.aag")]) == 20


@pytest.mark.parametrize("backend", ["sat1", "sat1-rg", "qbf", "templ-sat", "templ-qbf", "portfolio"])
def test_backends(files, backend):
    assert main(["realizability", str(files / "cnt4.aag"), "--backend", backend, "--threads", "2"]) == 10


def test_synth_portfolio_verified(files, capsys):
    out = files / "c.aag"
    stats = files / "st.txt"
    code = main(["synth", str(files / "cnt4.aag"), "--backend", "portfolio", "--extract", "sat-learn-dep",
                 "--verify", "-o", str(out), "--stats", str(stats)])
    assert code == 10
    rep = verify_implementation(out.read_text(), (files / "cnt4.aag").read_text())
    assert rep.ok, rep.checks
    st = dict(line.split("=", 1) for line in stats.read_text().splitlines())
    assert set(st) == {"verdict", "refinements", "sat_calls", "qbf_calls", "gates", "time_ms"}
    assert st["verdict"] == "realizable" and int(st["sat_calls"]) > 0
    assert main(["verify", str(out), "--spec", str(files / "cnt4.aag")]) == 0
    assert "verdict=PASS" in capsys.readouterr().out


@pytest.mark.parametrize("method", ["sat-learn", "sat-learn-dep-min", "qbf-learn", "portfolio"])
def test_extractors(files, method):
    out = files / ("%s.aag" % method)
    assert main(["synth", str(files / "cnt4.aag"), "--extract", method, "--threads", "3", "-o", str(out)]) == 10
    assert verify_implementation(out.read_text()).ok


def test_winning_area_file(files):
    wfile = files / "w.cnf"
    assert main(["realizability", str(files / "cnt4.aag"), "-o", str(wfile)]) == 10
    assert main(["synth", str(files / "cnt4.aag"), "--winning-area", str(wfile), "--verify",
                 "-o", str(files / "c2.aag")]) == 10


def test_synth_unrealizable(files):
    assert main(["synth", str(files / "cnt3_unreal.aag")]) == 20


def test_verify_catches_unsafe(files, tmp_path):
    bad = tmp_path / "bad.aag"
    # a latch that turns on at once and is the error output
    bad.write_text("aag 1 0 1 1 0\n2 1\n2\n")
    assert main(["verify", str(bad)]) == 1


def test_stats_for_growth_check(files):
    stats = files / "s.txt"
    assert main(["realizability", str(files / "cnt4.aag"), "--backend", "sat1", "--stats", str(stats)]) == 10
    st = dict(line.split("=", 1) for line in stats.read_text().splitlines())
    assert int(st["refinements"]) == 8


@pytest.mark.parametrize("argv", [[], ["bogus"], ["realizability"], ["realizability", "/nonexistent.aag"],
                                  ["realizability", "x.aag", "--backend", "nope"], ["gen", "cnt", "0"]])
def test_errors(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_malformed_input(tmp_path):
    p = tmp_path / "m.aag"
    p.write_text("aag 1 2\n")
    assert main(["realizability", str(p)]) == 1
