import csv
import io
import json

import numpy as np
import pytest

from procmat.cli import main

SQRT2 = np.sqrt(2)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(rows))))


class TestValidate:
    def test_ocb_passes(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "ocb")
        assert code == 0
        assert "valid" in out

    def test_feix_large_eps_fails_psd(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "feix", "--q", "0.5", "--eps", "10")
        assert code == 1
        assert "FAIL" in out and "positive semidefinite" in out

    def test_maximally_mixed_file(self, capsys, tmp_path):
        path = tmp_path / "mixed.json"
        path.write_text(json.dumps({"IIII": 0.25}))
        code, out, _ = run_cli(capsys, "validate", "--file", str(path))
        assert code == 0

    def test_bad_file_key_reported_with_exit_2(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"WXYZ": 0.25}))
        code, _, err = run_cli(capsys, "validate", "--file", str(path))
        assert code == 2
        assert "WXYZ" in err

    def test_unparseable_json_exit_2(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "validate", "--file", str(path))
        assert code == 2
        assert "broken.json" in err

    def test_infeasible_sep_params_exit_1(self, capsys, tmp_path):
        path = tmp_path / "infeasible.json"
        path.write_text(json.dumps({"q": 0.5, "c_0zz": 0.4}))
        code, _, err = run_cli(capsys, "validate", "sep", "--params", str(path))
        assert code == 1
        assert "positive semidefinite" in err and "A<B" in err

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "validate", "ocb", "--format", "json")
        doc = json.loads(out)
        assert doc["valid"] is True
        assert len(doc["checks"]) == 5
        assert doc["manifest"]["command"] == "validate"

    def test_usage_error_exit_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["validate", "nonsense"])
        assert err.value.code == 2


class TestEntropy:
    def test_ocb_text_output(self, capsys):
        code, out, _ = run_cli(capsys, "entropy", "ocb")
        assert code == 0
        assert "H_AB = 1.84565 bits" in out

    def test_ocb_json_values(self, capsys):
        code, out, _ = run_cli(capsys, "entropy", "ocb", "--format", "json")
        doc = json.loads(out)
        assert doc["joint"]["0,0"] == pytest.approx((1 + 1 / SQRT2) / 16, abs=1e-12)
        assert doc["entropies"]["H_AB"] == pytest.approx(1.8458, abs=5e-4)

    def test_formats_agree_to_machine_precision(self, capsys):
        _, json_out, _ = run_cli(capsys, "entropy", "ocb", "--format", "json")
        doc = json.loads(json_out)
        _, csv_out, _ = run_cli(capsys, "entropy", "ocb", "--format", "csv")
        rows = parse_csv(csv_out)
        for row in rows:
            value = float(row["value"])
            if row["record"] == "cond":
                key = ",".join(row[k] for k in ("a", "b", "x", "y"))
                assert value == pytest.approx(doc["cond_probs"][key], abs=1e-12)
            elif row["record"] == "joint":
                key = f"{row['a']},{row['b']}"
                assert value == pytest.approx(doc["joint"][key], abs=1e-12)
            else:
                assert value == pytest.approx(doc["entropies"][row["a"]], abs=1e-12)

    def test_text_six_significant_digits(self, capsys):
        _, out, _ = run_cli(capsys, "entropy", "ocb")
        assert "0.853553" in out  # conditional probability at x=0, y=1

    def test_mixed_file_process(self, capsys, tmp_path):
        path = tmp_path / "mixed.json"
        path.write_text(json.dumps({"IIII": 0.25}))
        code, out, _ = run_cli(capsys, "entropy", "--file", str(path), "--format", "json")
        doc = json.loads(out)
        # frozen value from the naive pre-build oracle on the trivial process
        assert doc["entropies"]["H_AB"] == pytest.approx(1.6225562489182659, abs=1e-12)

    def test_invalid_process_exit_1(self, capsys, tmp_path):
        path = tmp_path / "invalid.json"
        path.write_text(json.dumps({"IIII": 0.25, "IIIZ": 0.25}))
        code, _, err = run_cli(capsys, "entropy", "--file", str(path))
        assert code == 1
        assert "failed validation" in err

    def test_custom_inputs_file(self, capsys, tmp_path):
        path = tmp_path / "inputs.json"
        path.write_text(json.dumps({"00": 1.0, "01": 0.0, "10": 0.0, "11": 0.0}))
        code, out, _ = run_cli(
            capsys, "entropy", "ocb", "--inputs", str(path), "--format", "json"
        )
        doc = json.loads(out)
        # with inputs pinned at (0,0) both parties forward and output 1
        assert doc["joint"]["1,1"] == pytest.approx(1.0, abs=1e-12)

    def test_custom_instruments_file(self, capsys, tmp_path):
        from procmat.instruments import gyni_strategy, instrument_to_pauli_maps

        data = {
            "A": instrument_to_pauli_maps(gyni_strategy("A")),
            "B": instrument_to_pauli_maps(gyni_strategy("B")),
        }
        path = tmp_path / "instruments.json"
        path.write_text(json.dumps(data))
        code, out, _ = run_cli(
            capsys, "entropy", "ocb", "--instruments", str(path), "--format", "json"
        )
        doc = json.loads(out)
        assert doc["entropies"]["H_AB"] == pytest.approx(1.8456526640405408, abs=1e-10)


class TestGame:
    def test_ocb_flags_violation(self, capsys):
        code, out, _ = run_cli(capsys, "game", "ocb")
        assert code == 0
        assert "VIOLATION" in out
        assert "0.533471" in out

    def test_zero_separable_within_bound(self, capsys, tmp_path):
        path = tmp_path / "zeros.json"
        path.write_text(json.dumps({"q": 0.5}))
        code, out, _ = run_cli(capsys, "game", "sep", "--params", str(path))
        assert code == 0
        assert "within the causal bound" in out
        assert "0.3125" in out

    def test_feix_members_respect_bound(self, capsys):
        code, out, _ = run_cli(
            capsys, "game", "feix", "--q", "1.0", "--eps", "0.0", "--format", "json"
        )
        doc = json.loads(out)
        assert doc["p_succ"] <= 0.5 + 1e-9
        assert doc["violation"] is False

    def test_json_csv_agree(self, capsys):
        _, json_out, _ = run_cli(capsys, "game", "ocb", "--format", "json")
        _, csv_out, _ = run_cli(capsys, "game", "ocb", "--format", "csv")
        doc = json.loads(json_out)
        row = parse_csv(csv_out)[0]
        assert float(row["p_succ"]) == pytest.approx(doc["p_succ"], abs=1e-12)


class TestOptimize:
    def test_feix_mode(self, capsys, tmp_path):
        out_path = tmp_path / "feix.json"
        code, out, _ = run_cli(
            capsys, "optimize", "feix", "--out", str(out_path), "--format", "json"
        )
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["best_value"] == pytest.approx(1.68, abs=0.02)
        assert doc["verdict"] == "inequality not satisfied"
        assert doc["manifest"]["rng"]["generator"].startswith("numpy PCG64")

    def test_sep_small_run_deterministic(self, capsys, tmp_path):
        args = [
            "optimize", "sep", "--restarts", "2", "--seed", "7",
            "--format", "json",
        ]
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        code1, _, _ = run_cli(capsys, *args, "--out", str(out1))
        code2, _, _ = run_cli(capsys, *args, "--out", str(out2))
        assert code1 == code2 == 0
        doc1 = json.loads(out1.read_text())
        doc2 = json.loads(out2.read_text())
        doc1["manifest"].pop("duration_s")
        doc2["manifest"].pop("duration_s")
        assert doc1 == doc2

    def test_sep_result_document_shape(self, capsys, tmp_path):
        out_path = tmp_path / "sep.json"
        code, out, _ = run_cli(
            capsys, "optimize", "sep", "--restarts", "2", "--seed", "7",
            "--jobs", "2", "--out", str(out_path),
        )
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert len(doc["restarts"]) == 2
        assert doc["restarts"][0]["seed"] == 7
        assert doc["best_value"] == max(r["value"] for r in doc["restarts"])
        assert doc["reference"]["value"] == pytest.approx(1.8456526640405408, abs=1e-10)
        assert set(doc["best_params"]) > {"q", "c_0xx", "cp_zzz"}
        assert "verdict" in doc

    def test_trace_file(self, capsys, tmp_path):
        out_path = tmp_path / "sep.json"
        trace_path = tmp_path / "trace.csv"
        code, _, _ = run_cli(
            capsys, "optimize", "sep", "--restarts", "2", "--seed", "7",
            "--out", str(out_path), "--trace", str(trace_path),
        )
        assert code == 0
        rows = parse_csv(trace_path.read_text())
        assert {row["restart"] for row in rows} == {"0", "1"}
        values = [float(r["objective"]) for r in rows if r["restart"] == "0"]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_default_out_dir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("PROCMAT_OUT_DIR", str(tmp_path))
        code, _, _ = run_cli(capsys, "optimize", "feix")
        assert code == 0
        assert (tmp_path / "optimize_feix.json").exists()

    def test_feix_sep_max_override(self, capsys, tmp_path):
        out_path = tmp_path / "feix.json"
        code, _, _ = run_cli(
            capsys, "optimize", "feix", "--sep-max", "1.0", "--out", str(out_path)
        )
        doc = json.loads(out_path.read_text())
        assert doc["verdict"] == "inequality satisfied"
