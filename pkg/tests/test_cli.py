import json
import subprocess
import sys

import pytest

from sigmalab.cli import EXIT_HOLDOUTS, EXIT_INTERRUPTED, main
from sigmalab.ordinals import succ, zero


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def test_search_2x2(tmp_path, capsys):
    code, out = run_cli(capsys, "search", "--states", 2, "--out", tmp_path / "s", "--no-timestamps")
    assert code == 0
    assert "S=6 Sigma=4 (exact)" in out
    rep = json.loads((tmp_path / "s" / "report.json").read_text())
    assert (rep["S"], rep["Sigma"], rep["exact"]) == (6, 4, True)
    assert "generated_at" not in rep
    lines = (tmp_path / "s" / "machines.jsonl").read_text().splitlines()
    assert len(lines) == rep["records"] == 149
    assert {"code", "machine", "classification", "steps", "score", "certificate"} <= \
        set(json.loads(lines[0]))


def test_search_1x2_and_timestamps(tmp_path, capsys):
    code, out = run_cli(capsys, "search", "--states", 1, "--out", tmp_path / "s")
    assert code == 0 and "S=1 Sigma=1" in out
    assert "generated_at" in json.loads((tmp_path / "s" / "report.json").read_text())


def test_search_reports_holdouts(tmp_path, capsys):
    code, out = run_cli(capsys, "search", "--states", 2, "--out", tmp_path / "s",
                        "--fuel", 3, "--fuel-stage2", 3, "--deciders", "")
    assert code == EXIT_HOLDOUTS
    assert "lower bounds" in out


def test_resume_rejects_other_policy(tmp_path, capsys):
    out = tmp_path / "s"
    assert run_cli(capsys, "search", "--states", 2, "--out", out, "--stop-after-units", 2)[0] \
        == EXIT_INTERRUPTED
    code, _ = run_cli(capsys, "search", "--states", 2, "--out", out, "--resume", "--fuel", 500)
    assert code == 1


def test_resume_2x2_matches(tmp_path, capsys):
    run_cli(capsys, "search", "--states", 2, "--out", tmp_path / "a", "--no-timestamps")
    b = tmp_path / "b"
    assert run_cli(capsys, "search", "--states", 2, "--out", b, "--no-timestamps",
                   "--stop-after-units", 5)[0] == EXIT_INTERRUPTED
    # a crash may leave records past the checkpoint; resume discards them
    with (b / "machines.jsonl").open("a") as fh:
        fh.write('{"partial": true}\n')
    assert run_cli(capsys, "search", "--states", 2, "--out", b, "--no-timestamps", "--resume")[0] == 0
    for name in ("report.json", "machines.jsonl"):
        assert (tmp_path / "a" / name).read_bytes() == (b / name).read_bytes()


def test_classify(capsys):
    code, out = run_cli(capsys, "classify", "--machine", "1RB1LB_1LA1RZ")
    assert code == 0
    rec = json.loads(out)
    assert (rec["classification"], rec["steps"], rec["score"]) == ("halts", 6, 4)
    code, out = run_cli(capsys, "classify", "--machine", "0RA0RA", "--deciders", "")
    assert code == EXIT_HOLDOUTS


def test_sigma_tables(capsys):
    code, out = run_cli(capsys, "sigma-steps", "--code-max", 0)
    assert code == 0 and len(out.splitlines()) == 1
    code, out = run_cli(capsys, "sigma-steps", "--code-max", 300, "--json")
    values = [json.loads(line)["value"] for line in out.splitlines()]
    assert values == sorted(values) and len(values) == 301
    code, out = run_cli(capsys, "sigma-value", "--code-max", 5)
    assert len(out.splitlines()) == 6
    code, out = run_cli(capsys, "relate-sigmas", "--code-max", 10)
    assert json.loads(out)["dominance"] is True


def test_kphi_and_friends(tmp_path, capsys):
    code, out = run_cli(capsys, "kphi", 0, 1, 2, "--index-budget", 1000, "--out", tmp_path / "k.jsonl")
    assert out.splitlines() == ["K(0|0) = 0  (fuel used 0)", "K(1|0) = 5  (fuel used 1)",
                                "K(2|0) = 168  (fuel used 2)"]
    assert len((tmp_path / "k.jsonl").read_text().splitlines()) == 3
    code, out = run_cli(capsys, "kphi", 3, "--index-budget", 10)
    assert "K(3|0) > 10" in out
    code, out = run_cli(capsys, "incompressibles", "--bound", 3, "--index-budget", 1000)
    assert out.split() == ["0", "1", "2", "3"]
    code, out = run_cli(capsys, "halting", 1)
    assert out.strip() == "Yes"
    code, out = run_cli(capsys, "halting", 2, "--fuel", 100)
    assert out.strip() == "Unknown"


def test_ord_commands(tmp_path, capsys):
    assert run_cli(capsys, "ord", "cmp", 0, succ(zero()))[1].strip() == "True"
    assert run_cli(capsys, "ord", "cmp", succ(zero()), 0)[1].strip() == "False"
    code, out = run_cli(capsys, "ord", "omega", "--registry-out", tmp_path / "r.jsonl")
    notation = int(out.splitlines()[1].split("=")[1])
    assert "value = ω" in out and "probe: Ok" in out
    assert run_cli(capsys, "ord", "value", succ(notation), "--registry", tmp_path / "r.jsonl")[1] \
        .strip() == "ω+1"
    assert run_cli(capsys, "ord", "value", 4)[0] == 1
    code, out = run_cli(capsys, "ord", "pathological")
    assert out.startswith("e = ")
    assert "phi_e(0) = succ(lim(e)): True" in out
    assert "probe: CycleFound" in out
    assert run_cli(capsys, "ord", "probe", succ(succ(zero())))[1].startswith("Ok")


def test_prog_commands(capsys):
    code, out = run_cli(capsys, "prog", "expand", succ(succ(zero())))
    assert len(out.splitlines()) == 3
    code, out = run_cli(capsys, "prog", "expand", 0, "--json")
    assert json.loads(out)["kind"] == "base"
    code, out = run_cli(capsys, "prog", "branch", 0, succ(zero()), succ(succ(zero())))
    assert out.strip() == "LinearlyOrdered"


def test_verify(tmp_path, capsys):
    stmts = tmp_path / "stmt.txt"
    stmts.write_text("\n".join([
        json.dumps({"class": [2, 2], "max_score": 4, "description": "no score above 4"}),
        json.dumps({"class": [2, 2], "max_score": 3, "description": "no score above 3"}),
    ]))
    code, out = run_cli(capsys, "verify", "--bound-from-class", "2,2", stmts)
    recs = [json.loads(line) for line in out.splitlines()]
    assert [r["outcome"] for r in recs] == ["Verified", "CounterexampleFound"]
    assert recs[0]["bound"] == 6 and recs[0]["trusted"] is True
    code, out = run_cli(capsys, "verify", "--bound", 6, stmts)
    assert json.loads(out.splitlines()[0])["outcome"] == "BoundInsufficient"
    assert run_cli(capsys, "verify", stmts)[0] == 1


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"index-budget": 10}))
    code, out = run_cli(capsys, "--config", conf, "kphi", 3)
    assert "K(3|0) > 10" in out
    # explicit flags beat the config
    code, out = run_cli(capsys, "--config", conf, "kphi", 1, "--index-budget", 100)
    assert "K(1|0) = 5" in out
    conf.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(SystemExit):
        main(["--config", str(conf), "kphi", "3"])


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "sigmalab", "ord", "cmp", "0", "1"],
                       capture_output=True, text=True, check=True)
    assert r.stdout.strip() == "True"
