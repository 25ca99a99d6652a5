import json
import subprocess
import sys

import pytest

from pmreduce.cli import main
from pmreduce.instance import load_instance


@pytest.fixture
def artifacts(tmp_path):
    """Full n=6 pipeline written to disk."""
    inst = tmp_path / "inst.json"
    cnf = tmp_path / "inst.cnf"
    ss = tmp_path / "inst.ss.json"
    assert main(["generate", "--n", "6", "--k", "3", "--seed", "7", "-o", str(inst)]) == 0
    assert main(["reduce", "sat", str(inst), "-o", str(cnf)]) == 0
    assert main(["reduce", "subset-sum", str(cnf), "-o", str(ss)]) == 0
    return inst, cnf, ss


def small_pipeline(tmp_path, n=1):
    inst, cnf, ss = (tmp_path / f"s{n}.json", tmp_path / f"s{n}.cnf", tmp_path / f"s{n}.ss.json")
    main(["generate", "--n", str(n), "--k", "1", "--seed", "0", "-o", str(inst)])
    main(["reduce", "sat", str(inst), "-o", str(cnf)])
    main(["reduce", "subset-sum", str(cnf), "-o", str(ss)])
    return inst, cnf, ss


class TestGenerate:
    def test_passes_verify(self, artifacts, capsys):
        inst, _, _ = artifacts
        assert main(["verify", str(inst)]) == 0
        assert "[PASS] unique-violation" in capsys.readouterr().out

    def test_n_zero_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["generate", "--n", "0"])
        assert info.value.code != 0

    def test_k_too_large(self, capsys):
        assert main(["generate", "--n", "3", "--k", "4"]) == 1
        assert "error" in capsys.readouterr().err

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["generate", "--n", "6", "--k", "3", "--seed", "7", "-o", str(a)])
        main(["generate", "--n", "6", "--k", "3", "--seed", "7", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_redact(self, tmp_path):
        out = tmp_path / "blind.json"
        assert main(["generate", "--n", "5", "--seed", "1", "--redact", "-o", str(out)]) == 0
        assert json.loads(out.read_text())["witness"] is None

    def test_stdout_when_no_output(self, capsys):
        assert main(["generate", "--n", "3", "--seed", "2"]) == 0
        assert load_instance(capsys.readouterr().out).n == 3

    def test_verify_limit_refusal(self, capsys):
        assert main(["generate", "--n", "6", "--verify-limit", "5"]) == 1
        assert "limit 5" in capsys.readouterr().err


class TestReduce:
    def test_n6_header(self, artifacts):
        _, cnf, _ = artifacts
        assert cnf.read_text().splitlines()[0] == "p cnf 18 30"
        sidecar = json.loads((cnf.parent / "inst.cnf.varmap.json").read_text())
        assert sidecar["aux_match"] == [7, 12] and sidecar["aux_chain"] == [13, 18]

    def test_n6_subset_sum(self, artifacts):
        _, _, ss = artifacts
        assert len(json.loads(ss.read_text())["items"]) == 96
        assert (ss.parent / "inst.ss.json.decode.json").exists()

    def test_n1_full_pipeline(self, tmp_path):
        _, _, ss = small_pipeline(tmp_path)
        assert len(json.loads(ss.read_text())["items"]) == 16

    def test_malformed_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["reduce", "sat", str(bad)]) == 1
        bad_cnf = tmp_path / "bad.cnf"
        bad_cnf.write_text("p cnf 2 5\n1 2 0\n")
        assert main(["reduce", "subset-sum", str(bad_cnf)]) == 1
        assert capsys.readouterr().err.count("error") == 2

    def test_missing_witness(self, tmp_path, capsys):
        blind = tmp_path / "blind.json"
        main(["generate", "--n", "4", "--redact", "-o", str(blind)])
        assert main(["reduce", "sat", str(blind)]) == 1
        assert "solution-aware" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["reduce", "sat", str(tmp_path / "nope.json")]) == 1


class TestSolve:
    def test_direct(self, artifacts, tmp_path, capsys):
        inst, _, _ = artifacts
        out = tmp_path / "direct.json"
        assert main(["solve", "direct", str(inst), "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        stored = json.loads(inst.read_text())["witness"]
        assert doc["witness"] == stored and doc["matches_stored_witness"]
        assert 1 <= doc["log"]["trials"] <= 64
        assert "witness:" in capsys.readouterr().out

    def test_ppsz(self, artifacts, tmp_path):
        inst, cnf, _ = artifacts
        out = tmp_path / "ppsz.json"
        assert main(["solve", "ppsz", str(cnf), "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["witnesses"] == [json.loads(inst.read_text())["witness"]]
        assert doc["log"]["outcome"] == "found" and doc["log"]["trials"] == 1

    def test_enumerate(self, artifacts, tmp_path):
        inst, cnf, _ = artifacts
        out = tmp_path / "enum.json"
        assert main(["solve", "enumerate", str(cnf), "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["models"]) == 1
        assert doc["witnesses"] == [json.loads(inst.read_text())["witness"]]

    def test_mitm_refuses_96_items(self, artifacts, capsys):
        _, _, ss = artifacts
        assert main(["solve", "mitm", str(ss)]) == 1
        assert "exceeds exhaustive limit 40" in capsys.readouterr().err

    @pytest.mark.parametrize("solver", ["mitm", "brute"])
    def test_subset_sum_n1(self, tmp_path, solver):
        inst, _, ss = small_pipeline(tmp_path)
        out = tmp_path / f"{solver}.json"
        assert main(["solve", solver, str(ss), "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["witnesses"][0] == json.loads(inst.read_text())["witness"]

    def test_log_file(self, artifacts, tmp_path):
        inst, _, _ = artifacts
        log = tmp_path / "trials.jsonl"
        main(["solve", "direct", str(inst), "--seed", "3", "--log", str(log), "-o", str(tmp_path / "o.json")])
        main(["solve", "direct", str(inst), "--seed", "4", "--log", str(log), "-o", str(tmp_path / "o.json")])
        lines = [json.loads(l) for l in log.read_text().splitlines()]
        assert [l["seed"] for l in lines] == [3, 4]
        assert set(lines[0]) == {"representation", "n", "d", "seed", "trials", "outcome", "table_entries", "millis"}

    def test_timing_flag(self, artifacts, tmp_path):
        inst, _, _ = artifacts
        out = tmp_path / "t.json"
        main(["solve", "ppsz", str(artifacts[1]), "--timing", "-o", str(out)])
        assert json.loads(out.read_text())["log"]["millis"] is not None

    def test_ppsz_exhaustion_still_writes_log(self, tmp_path, capsys):
        cnf = tmp_path / "unsat.cnf"
        cnf.write_text("p cnf 1 2\n1 0\n-1 0\n")
        out = tmp_path / "u.json"
        assert main(["solve", "ppsz", str(cnf), "--max-trials", "5", "-o", str(out)]) == 1
        assert json.loads(out.read_text())["log"]["outcome"] == "exhausted"


class TestReport:
    def test_expansion_nominal(self, capsys):
        assert main(["report", "expansion", "--n", "6", "--mode", "nominal", "--format", "csv"]) == 0
        assert capsys.readouterr().out.splitlines()[1:] == [
            "Direct Matrix,0,0.0,6,nominal",
            "3-SAT (Tseytin-style),12,2.0,18,nominal",
            "Subset Sum (via 3-SAT encoding),42,7.0,48,nominal"]

    def test_expansion_measured(self, capsys):
        assert main(["report", "expansion", "--n", "6", "--mode", "measured", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["clauses"] == 30
        assert [(r["M"], r["d"]) for r in doc["rows"]] == [(0, 6), (12, 18), (90, 96)]

    def test_expansion_measured_from_file(self, artifacts, capsys):
        inst, _, _ = artifacts
        assert main(["report", "expansion", "--n", "1", "--mode", "measured", "--format", "csv", "--instance", str(inst)]) == 0
        assert "Subset Sum (via 3-SAT encoding),90,15.0,96,measured" in capsys.readouterr().out

    def test_ratios(self, capsys):
        assert main(["report", "ratios", "--n", "6", "--format", "csv"]) == 0
        rows = [l.split(",") for l in capsys.readouterr().out.splitlines()[1:]]
        assert [r[4] for r in rows] == ["1.0", "1.9", "487.1", "45.9"]
        assert [r[3] for r in rows] == ["64", "123", "3.12e4", "2.94e3"]

    def test_accessibility(self, capsys):
        assert main(["report", "accessibility", "--n", "6", "--format", "json"]) == 0
        row = json.loads(capsys.readouterr().out)[0]
        assert row["H(W)"] == 6 and row["Pr(Y=1)"] == 1 / 64
        assert row["I_per_query"] == pytest.approx(0.116115, abs=1e-6)

    @pytest.mark.parametrize("fmt", ["md", "csv", "json"])
    def test_all_formats(self, fmt, capsys):
        for kind in ["expansion", "ratios", "accessibility"]:
            assert main(["report", kind, "--n", "4", "--format", fmt]) == 0
        assert capsys.readouterr().out


class TestVerify:
    def test_fresh_pipeline_passes(self, artifacts, capsys):
        assert main(["verify", *map(str, artifacts)]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        for name in ["unique-violation", "sat-unique-model", "sat-decode-roundtrip",
                     "carry-free", "forward-sum", "subset-sum-matches-cnf"]:
            assert f"[PASS] {name}" in out

    def test_tampered_witness(self, artifacts, capsys):
        inst = artifacts[0]
        doc = json.loads(inst.read_text())
        doc["witness"] = [i for i in range(6) if i not in doc["witness"]]
        inst.write_text(json.dumps(doc))
        assert main(["verify", str(inst)]) == 1
        assert "[FAIL] unique-violation" in capsys.readouterr().out

    @pytest.mark.parametrize("item, col", [(0, 0), (1, 10), (40, 20), (95, 35)])
    def test_edited_digit(self, artifacts, capsys, item, col):
        _, cnf, ss = artifacts
        doc = json.loads(ss.read_text())
        digits = doc["items"][item]["digits"]
        doc["items"][item]["digits"] = digits[:col] + str((int(digits[col]) + 1) % 10) + digits[col + 1:]
        ss.write_text(json.dumps(doc))
        assert main(["verify", str(cnf), str(ss)]) == 1
        assert "[FAIL]" in capsys.readouterr().out

    def test_checklist_to_file(self, artifacts, tmp_path, capsys):
        out = tmp_path / "audit.txt"
        assert main(["verify", *map(str, artifacts), "-o", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert out.read_text().startswith("[PASS]")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "pmreduce", "report", "expansion", "--n", "6"],
                          capture_output=True, text=True, check=True)
    assert "| 3-SAT (Tseytin-style) | 12 | 2.0 | 18 |" in proc.stdout
