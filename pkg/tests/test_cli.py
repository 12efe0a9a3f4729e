import json
import subprocess
import sys

import pytest

from fptkit import __version__, cli
from fptkit.cli import CACHE_FILE, NuFileCache, ProblemSpec, main
from fptkit.errors import ResourceLimit
from fptkit.frobenius import IdealPair

E8 = ["--prime", "11", "--vars", "X,Y,Z", "--gens", "X;Y;Z", "--multiplier", "X^2+Y^3+Z^5", "--e", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_exit(capsys, *argv):
    with pytest.raises(SystemExit) as info:
        main(list(argv))
    return info.value.code, capsys.readouterr().err


def test_nu_e8_human(capsys):
    code, out, _ = run(capsys, "nu", *E8, "--explain")
    assert code == 0
    assert "e=1 q=11 nu=1" in out
    assert "e=2 q=121 nu=16 witness=" in out
    assert "bounds: [16/121, 20/121]" in out
    assert "conjecture: 3/22 (CONJECTURED" in out


def test_nu_e8_json(capsys):
    code, out, _ = run(capsys, "nu", *E8, "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["version"] == 1
    assert doc["prime"] == 11 and doc["vars"] == ["X", "Y", "Z"]
    assert doc["pair"] == {"gens": ["X", "Y", "Z"], "multiplier": "X^2 + Y^3 + Z^5"}
    assert [lv["nu"] for lv in doc["levels"]] == [1, 16]
    assert [lv["q"] for lv in doc["levels"]] == [11, 121]
    assert doc["bounds"] == {"lower": "16/121", "upper": "20/121"}
    assert doc["conjecture"] == {"limit": "3/22", "confirmed_steps": 1}


def test_nu_maximal_ideal(capsys):
    code, out, _ = run(capsys, "nu", "--prime", "5", "--vars", "X,Y", "--gens", "X;Y", "--e", "1", "--json")
    assert code == 0
    assert json.loads(out)["levels"][0]["nu"] == 8


def test_nu_not_f_pure_exit_3(capsys):
    code, out, _ = run(capsys, "nu", "--prime", "2", "--vars", "X", "--gens", "X^2", "--multiplier", "X^2", "--e", "1",
                       "--json")
    assert code == 3
    doc = json.loads(out)
    assert doc["levels"][0]["nu"] is None and doc["bounds"] is None


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["--prime", "4", "--vars", "X", "--gens", "X"], "--prime"),
        (["--prime", "five", "--vars", "X", "--gens", "X"], "--prime"),
        (["--prime", "5", "--vars", "X", "--gens", "2X"], "--gens"),
        (["--prime", "5", "--vars", "X", "--gens", "X + 1"], "--gens"),
        (["--prime", "5", "--vars", "X", "--gens", "W"], "--gens"),
        (["--prime", "5", "--vars", "X", "--gens", " ; "], "--gens"),
        (["--prime", "5", "--vars", "X,X", "--gens", "X"], "--vars"),
        (["--prime", "5", "--vars", "X", "--gens", "X", "--multiplier", "X+1"], "--multiplier"),
        (["--prime", "5", "--vars", "X", "--gens", "X", "--e", "0"], "--e"),
    ],
)
def test_nu_validation_exit_2(capsys, argv, flag):
    code, err = run_exit(capsys, "nu", *argv)
    assert code == 2
    assert flag in err


def test_nu_resource_limit_exit_4(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise ResourceLimit("too big")

    monkeypatch.setattr(cli, "nu_sequence", boom)
    code, _, err = run(capsys, "nu", "--prime", "5", "--vars", "X", "--gens", "X")
    assert code == 4 and "resource limit" in err


def test_monomial_examples(capsys):
    assert run(capsys, "monomial", "--vars", "X,Y", "--gens", "X^2,Y^3", "--what", "fpt")[1].strip() == "5/6"
    assert run(capsys, "monomial", "--vars", "X,Y", "--gens", "X^2,Y^3", "--what", "mult")[1].strip() == "6"
    assert run(capsys, "monomial", "--vars", "X,Y", "--gens", "X^2,Y^3", "--what", "height")[1].strip() == "2"
    code, out, _ = run(capsys, "monomial", "--vars", "X,Y,Z", "--gens", "X^2,Y^2,Z^2", "--what", "closure")
    assert code == 0
    assert sorted(out.strip().split(", ")) == sorted(["X^2", "X*Y", "X*Z", "Y^2", "Y*Z", "Z^2"])
    code, out, _ = run(capsys, "monomial", "--vars", "X,Y", "--gens", "X^2,Y^3", "--what", "fpt", "--json")
    assert json.loads(out)["result"] == "5/6"


@pytest.mark.parametrize("gens", ["X+Y,Y^2", "2*X,Y", "X^2;Y", "1,X"])
def test_monomial_rejects_non_monomials(capsys, gens):
    code, err = run_exit(capsys, "monomial", "--vars", "X,Y", "--gens", gens, "--what", "fpt")
    assert code == 2 and "--gens" in err


def test_mult_not_m_primary_names_variable(capsys):
    code, err = run_exit(capsys, "monomial", "--vars", "X,Y", "--gens", "X^2,X*Y", "--what", "mult")
    assert code == 2
    assert "--gens" in err and "pure power of Y" in err


def test_suite_commands(capsys):
    code, out, _ = run(capsys, "suite", "--name", "threshold-edge")
    assert code == 0 and "threshold-edge: 7/7 cases pass" in out
    code, _, _ = run(capsys, "suite", "--name", "threshold-edge", "--golden", "check")
    assert code == 0
    code, _, _ = run(capsys, "suite", "--name", "summation", "--seed", "42", "--cases", "20")
    assert code == 0


def test_suite_failure_exit_1(capsys, monkeypatch):
    monkeypatch.setattr(cli, "check_golden", lambda report: False)
    code, _, err = run(capsys, "suite", "--name", "threshold-edge", "--golden", "check")
    assert code == 1 and "mismatch" in err


def test_suite_golden_write(capsys, monkeypatch, tmp_path):
    written = []
    monkeypatch.setattr(cli, "write_golden", lambda report: written.append(report) or tmp_path / "x.tsv")
    code, out, _ = run(capsys, "suite", "--name", "threshold-edge", "--golden", "write")
    assert code == 0 and written and "written" in out


def test_suite_bad_flags(capsys):
    assert run_exit(capsys, "suite", "--name", "nope")[0] == 2
    code, err = run_exit(capsys, "suite", "--name", "duval", "--primes", "2,4")
    assert code == 2 and "--primes" in err


# --- canonical specs, JSON round trip, cache -------------------------------------

def test_json_round_trip_reproduces_digest(capsys):
    code, out, _ = run(capsys, "nu", *E8, "--json")
    spec = ProblemSpec.from_json(json.loads(out))
    pair = IdealPair.from_text(11, ["X", "Y", "Z"], ["X", "Y", "Z"], "X^2+Y^3+Z^5")
    assert spec.digest() == ProblemSpec.from_pair(pair).digest()
    assert spec.digest(2) == ProblemSpec.from_pair(pair).digest(2)


def test_digest_ignores_input_formatting():
    a = IdealPair.from_text(7, ["X", "Y"], ["X^2+Y^3", "X*Y"])
    b = IdealPair.from_text(7, ["X", "Y"], ["Y^3 + 8*X^2", "Y*X"])
    assert ProblemSpec.from_pair(a).canonical() == ProblemSpec.from_pair(b).canonical()
    c = IdealPair.from_text(7, ["X", "Y"], ["X^2+Y^3", "X*Y"], "X^2")
    assert ProblemSpec.from_pair(a).digest() != ProblemSpec.from_pair(c).digest()
    assert ProblemSpec.from_pair(a).digest(1) != ProblemSpec.from_pair(a).digest(2)


def test_cache_on_off_identical(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FPT_CACHE_DIR", str(tmp_path))
    argv = ["nu", "--prime", "3", "--vars", "X,Y,Z", "--gens", "X^2;Y*Z;X*Y+Z^2", "--e", "3", "--json"]
    first = run(capsys, *argv)
    assert (tmp_path / CACHE_FILE).exists()
    second = run(capsys, *argv)
    off = run(capsys, *argv, "--no-cache")
    assert first == second == off
    assert run(capsys, *argv, "--verify-cache")[0] == 0
    assert len((tmp_path / CACHE_FILE).read_text().splitlines()) == 3


def test_cache_hits_and_verify_detects_tampering(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FPT_CACHE_DIR", str(tmp_path))
    argv = ["nu", "--prime", "5", "--vars", "X,Y", "--gens", "X;Y", "--e", "2", "--json"]
    run(capsys, *argv)
    path = tmp_path / CACHE_FILE
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    for entry in lines:
        entry["value"]["nu"] += 1
    path.write_text("".join(json.dumps(e) + "\n" for e in lines))
    code, out, _ = run(capsys, *argv)
    assert [lv["nu"] for lv in json.loads(out)["levels"]] == [9, 49]  # served from cache
    code, _, err = run(capsys, *argv, "--verify-cache")
    assert code == 1 and "mismatch" in err


def test_cache_skips_torn_line_and_other_versions(tmp_path):
    pair = IdealPair.from_text(3, ["X"], ["X"])
    from fptkit.estimator import nu_sequence

    cache = NuFileCache(tmp_path)
    seq = nu_sequence(pair, 2, cache=cache)
    path = tmp_path / CACHE_FILE
    with open(path, "a") as fh:
        fh.write('{"key": "abc", "vers')
    fresh = NuFileCache(tmp_path)
    assert nu_sequence(pair, 2, cache=fresh) == seq
    assert fresh.hits == 2

    entries = [json.loads(x) for x in path.read_text().splitlines()[:2]]
    for entry in entries:
        entry["version"] = "0.0.0-other"
    path.write_text("".join(json.dumps(e) + "\n" for e in entries))
    stale = NuFileCache(tmp_path)
    assert nu_sequence(pair, 2, cache=stale) == seq
    assert stale.hits == 0


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# pair\nprime = 7\nvars = X,Y\ngens = X^2;Y^3\ne = 1\njson = true\n")
    code, out, _ = run(capsys, "nu", "--config", str(cfg))
    doc = json.loads(out)
    assert code == 0 and doc["prime"] == 7 and doc["levels"][0]["nu"] == 5
    # explicit flags win over the file
    code, out, _ = run(capsys, "nu", "--config", str(cfg), "--prime", "5")
    assert json.loads(out)["prime"] == 5
    cfg.write_text("prime 7\n")
    code, err = run_exit(capsys, "nu", "--config", str(cfg), "--vars", "X", "--gens", "X")
    assert code == 2 and "--config" in err


def test_entry_points():
    out = subprocess.run([sys.executable, "-m", "fptkit", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
    out = subprocess.run([sys.executable, "-m", "fptkit", "monomial", "--vars", "X,Y", "--gens", "X^2,Y^3",
                          "--what", "fpt"], capture_output=True, text=True)
    assert out.stdout.strip() == "5/6"
