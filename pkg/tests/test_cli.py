import json

import numpy as np
import pytest

from modaldyn.cli import main
from modaldyn.serialize import matrix_to_pairs


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_epistemic_json(capsys):
    code, out, _ = run(capsys, "epistemic", "--scenario", "epr-bohm", "--subsystem", "A")
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "epistemic"
    assert payload["probabilities"] == pytest.approx([0.5, 0.5])
    assert payload["degenerate_clusters"] == [[0, 1]]


def test_epistemic_unknown_scenario(capsys):
    code, _, err = run(capsys, "epistemic", "--scenario", "nope")
    assert code == 2
    assert "unknown scenario" in err


def test_epistemic_unknown_subsystem(capsys):
    code, _, err = run(
        capsys, "epistemic", "--scenario", "epr-bohm", "--subsystem", "Z"
    )
    assert code == 2


def test_conditional_strict_refuses_epr(capsys):
    code, _, err = run(
        capsys, "conditional", "--scenario", "epr-bohm", "--blocks", "A,B"
    )
    assert code == 4
    assert "degenera" in err.lower()


def test_conditional_permissive_epr(capsys):
    code, out, _ = run(
        capsys,
        "conditional",
        "--scenario",
        "epr-bohm",
        "--blocks",
        "A,B",
        "--mode",
        "permissive",
    )
    assert code == 0
    payload = json.loads(out)
    probs = np.asarray(payload["probabilities"])
    assert probs.shape == (1, 2, 2)
    assert probs[0, 0, 0] == pytest.approx(0.0, abs=1e-12)
    assert probs[0, 0, 1] == pytest.approx(0.5, abs=1e-12)


def test_conditional_bad_blocks(capsys):
    code, _, err = run(
        capsys,
        "conditional",
        "--scenario",
        "epr-bohm",
        "--blocks",
        "A",  # does not cover B
        "--mode",
        "permissive",
    )
    assert code == 2


def test_sample_requires_seed(capsys, monkeypatch):
    monkeypatch.delenv("MODALDYN_SEED", raising=False)
    code, _, err = run(
        capsys, "sample", "--scenario", "damping", "--t", "1.0", "--steps", "4"
    )
    assert code == 2
    assert "seed" in err.lower()


def test_sample_env_seed(capsys, monkeypatch):
    monkeypatch.setenv("MODALDYN_SEED", "777")
    code, out, _ = run(
        capsys, "sample", "--scenario", "damping", "--t", "1.0", "--steps", "4"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["seed"] == 777


def test_sample_seed_flag_overrides_env(capsys, monkeypatch):
    monkeypatch.setenv("MODALDYN_SEED", "777")
    code, out, _ = run(
        capsys,
        "sample",
        "--scenario",
        "damping",
        "--t",
        "1.0",
        "--steps",
        "4",
        "--seed",
        "5",
    )
    assert code == 0
    assert json.loads(out)["seed"] == 5


def test_sample_static_scenario_rejected(capsys):
    code, _, err = run(
        capsys,
        "sample",
        "--scenario",
        "epr-bohm",
        "--t",
        "1.0",
        "--steps",
        "4",
        "--seed",
        "1",
    )
    assert code == 2
    assert "generator" in err


def test_outputs_are_byte_identical(capsys):
    cases = [
        ("epistemic", "--scenario", "ghz-mermin", "--subsystem", "A,B"),
        (
            "conditional",
            "--scenario",
            "ghz-mermin",
            "--blocks",
            "A,B+C",
            "--mode",
            "permissive",
            "--format",
            "csv",
        ),
        (
            "sample",
            "--scenario",
            "damping",
            "--t",
            "1.0",
            "--steps",
            "8",
            "--n",
            "50",
            "--seed",
            "2024",
        ),
        (
            "sample",
            "--scenario",
            "dephasing",
            "--rho0",
            "diag:0.6,0.4",
            "--t",
            "0.5",
            "--steps",
            "3",
            "--seed",
            "9",
            "--format",
            "csv",
        ),
    ]
    for argv in cases:
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2
        assert out1


def test_output_file_matches_stdout(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "epistemic", "--scenario", "epr-bohm")
    code2 = main(
        ["epistemic", "--scenario", "epr-bohm", "--output", str(target)]
    )
    capsys.readouterr()
    assert code == code2 == 0
    assert target.read_text(encoding="utf-8") == out


def test_verify_channel_accepts_valid_kraus(capsys, tmp_path):
    p = 0.3
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]])
    k1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]])
    doc = {
        "schema_version": 1,
        "kind": "kraus",
        "operators": [matrix_to_pairs(k0), matrix_to_pairs(k1)],
    }
    path = tmp_path / "ok.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(capsys, "verify-channel", "--channel", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["is_cp"] and payload["is_tp"]


def test_verify_channel_rejects_transpose_map(capsys, tmp_path):
    d = 2
    s = np.zeros((4, 4))
    for i in range(d):
        for j in range(d):
            s[d * j + i, d * i + j] = 1.0
    doc = {"schema_version": 1, "kind": "superoperator", "matrix": matrix_to_pairs(s)}
    path = tmp_path / "transpose.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(capsys, "verify-channel", "--channel", str(path))
    assert code == 5
    payload = json.loads(out)
    assert payload["is_tp"] is True
    assert payload["is_cp"] is False
    assert payload["choi_min_eigenvalue"] == pytest.approx(-1.0, abs=1e-12)


def test_verify_channel_flags_completeness_residual(capsys, tmp_path):
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(0.7)]])
    k1 = np.array([[0.0, np.sqrt(0.3 + 1e-6)], [0.0, 0.0]])
    doc = {
        "schema_version": 1,
        "kind": "kraus",
        "operators": [matrix_to_pairs(k0), matrix_to_pairs(k1)],
    }
    path = tmp_path / "leaky.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(capsys, "verify-channel", "--channel", str(path))
    assert code == 5
    payload = json.loads(out)
    assert payload["is_tp"] is False
    assert payload["completeness_residual"] > 1e-7


def test_verify_channel_malformed_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, "verify-channel", "--channel", str(path))
    assert code == 2


def test_verify_channel_lindblad_document(capsys, tmp_path):
    doc = {
        "schema_version": 1,
        "kind": "lindblad",
        "hamiltonian": matrix_to_pairs(np.zeros((2, 2))),
        "jumps": [{"operator": matrix_to_pairs(np.diag([1.0, -1.0])), "rate": 1.0}],
        "duration": 0.5,
    }
    path = tmp_path / "lind.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(capsys, "verify-channel", "--channel", str(path))
    assert code == 0
    assert json.loads(out)["is_cp"] is True


def test_scenario_file_source(capsys, tmp_path):
    from modaldyn import dephasing_qubit
    from modaldyn.serialize import scenario_to_document

    doc = scenario_to_document(dephasing_qubit(gamma=0.5))
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(
        capsys,
        "sample",
        "--scenario",
        str(path),
        "--t",
        "1.0",
        "--steps",
        "2",
        "--seed",
        "3",
        "--mode",
        "permissive",
    )
    assert code == 0
    assert json.loads(out)["kind"] == "trajectory"


def test_argparse_errors_exit_2(capsys):
    assert main(["conditional", "--scenario", "epr-bohm"]) == 2  # missing --blocks
    capsys.readouterr()
    assert main(["no-such-command"]) == 2
    capsys.readouterr()
