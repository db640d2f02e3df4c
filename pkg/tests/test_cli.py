import csv
import json

import pytest

from padicds import cli


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def test_group_ring_table(tmp_path):
    code, out = run(tmp_path, "verify", "group-ring", "--max", "10")
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 100 and all(r["holds"] == "true" for r in rows)
    assert b"\r\n" not in out.read_bytes()


def test_measure_padic_row(tmp_path):
    code, out = run(tmp_path, "measure", "--space", "padic", "--p", "5", "--psi", "power:1,2;round:5", "--range", "1..10")
    assert code == 0
    rows = {int(r["n"]): r for r in csv.DictReader(out.open())}
    assert rows[3]["measure"] == "4/25"


def test_measure_real_and_product(tmp_path):
    code, out = run(tmp_path, "measure", "--space", "real", "--psi", "power:1,2", "--range", "2..3")
    assert code == 0 and [r["measure"] for r in csv.DictReader(out.open())] == ["1/2", "4/9"]
    code, out = run(tmp_path, "measure", "--space", "product:1:3", "--psi", "power:1,2", "--range", "3..3")
    assert code == 0


def test_empty_table_qia_is_flagged(tmp_path):
    table = tmp_path / "empty.txt"
    table.write_text("")
    code, out = run(tmp_path, "qia", "--psi", f"table:{table}", "--N", "8")
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and all(r["ratio"] == "0/1" and r["flagged"] == "true" for r in rows)


def test_qia_both_json_matches_csv(tmp_path):
    argv = ["qia", "--psi", "power:1/4,2", "--N", "25", "--method", "both"]
    code_j, js = run(tmp_path, *argv, name="q.json")
    code_c, cs = run(tmp_path, *argv, name="q.csv")
    assert code_j == code_c == 0
    doc = json.loads(js.read_text())
    assert set(doc) == {"config", "rows", "summary"}
    assert doc["summary"]["mismatches"] == 0
    csv_rows = list(csv.DictReader(cs.open()))
    for jr, cr in zip(doc["rows"], csv_rows):
        assert {k: (str(v).lower() if isinstance(v, bool) else str(v)) for k, v in jr.items()} == cr


def test_outputs_are_byte_identical(tmp_path):
    argv = ["simulate", "hits", "--p", "3", "--psi", "power:1,2", "--N", "200", "--samples", "5", "--seed", "42"]
    _, a = run(tmp_path, *argv, name="a.json")
    _, b = run(tmp_path, *argv, "--threads", "3", name="b.json")
    assert a.read_bytes() == b.read_bytes()
    _, c = run(tmp_path, *argv[:-1], "43", name="c.json")
    assert a.read_bytes() != c.read_bytes()


def test_verify_commands(tmp_path):
    assert run(tmp_path, "verify", "zero-one", "--primes", "2,3,5")[0] == 0
    assert run(tmp_path, "verify", "counting", "--max", "25")[0] == 0
    code, out = run(tmp_path, "verify", "overlaps", "--max", "6", "--primes", "5")
    rows = list(csv.DictReader(out.open()))
    off_diag = [r for r in rows if r["diagonal"] == "false"]
    assert all(r["sandwich_holds"] == "true" for r in rows)
    assert all(r["product_holds"] == "true" for r in off_diag)
    # the product bound does not cover m = n, and the command reports that honestly
    assert code == 1


def test_sums(tmp_path):
    code, out = run(tmp_path, "sums", "--which", "phi-asymptotic", "--params", "p=2", "N=10")
    assert code == 0 and list(csv.DictReader(out.open()))[0]["sum"] == "19"
    code, out = run(tmp_path, "sums", "--which", "hausdorff", "--psi", "power:1,2", "--params", "f=power:2", "N=500",
                    name="h.json")
    assert code == 0 and json.loads(out.read_text())["summary"]["classification"] == "convergent-trend"


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# qia run\npsi = power:1/4,2\nN = 30\nmethod = both\nformat = json\n")
    code, out = run(tmp_path, "qia", "--config", str(cfg), "--N", "12", name="o.json")
    doc = json.loads(out.read_text())
    assert code == 0 and doc["config"]["N"] == 12 and doc["config"]["method"] == "both"
    assert len(doc["rows"]) == 12


@pytest.mark.parametrize("argv, code", [
    (["qia", "--psi", "nope", "--N", "5"], 2),
    (["qia", "--psi", "power:1,1", "--N", "5", "--method", "fast"], 2),
    (["qia", "--psi", "power:1,2", "--N", "0"], 2),
    (["simulate", "hits", "--p", "3", "--psi", "power:1,2", "--N", "5", "--seed", "-1"], 2),
    (["sums", "--which", "phi-asymptotic", "--params", "p=2", "N=100000000"], 3),
    (["measure", "--space", "padic", "--p", "2", "--psi", "power:1,60", "--range", "3..3"], 3),
])
def test_exit_codes(tmp_path, argv, code, capsys):
    assert cli.main(argv + ["--out", str(tmp_path / "x.csv")]) == code


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("wobble = 3\n")
    assert cli.main(["qia", "--config", str(cfg), "--psi", "zero", "--N", "3"]) == 2


def test_thread_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("PADICDS_THREADS", "2")
    assert cli.parse_args(["qia", "--psi", "zero", "--N", "3"]).threads == 2
    assert cli.parse_args(["qia", "--psi", "zero", "--N", "3", "--threads", "1"]).threads == 1


def test_stdout_output(capsys):
    assert cli.main(["verify", "zero-one", "--primes", "3", "--multiples", "2"]) == 0
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "p,n,measure,expected,holds"
    assert captured.err.startswith("verify zero-one:")
