import json
import subprocess
import sys

import numpy as np
import pytest

from cpinvariance.cli import cmd_check, cmd_decompose, cmd_verify, main
from cpinvariance.fixtures import fixture_path
from cpinvariance.serialize import Report, SpecError, decode_matrix, load_spec, parse_spec


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_check_example_generator(capsys):
    code, out = run(["check", str(fixture_path("example41_generator.json")), "--format", "json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdicts"]["invariant"] and rep["verdicts"]["markov"]
    assert np.allclose(decode_matrix(rep["classical"]["q_matrix"], "q"), [[0, 0], [1, -1]])
    zeta = rep["certificates"]["zeta"]
    assert np.allclose(decode_matrix(zeta["gamma"], "gamma"), -np.diag([0, 1]), atol=1e-9)


def test_check_cp_part_not_invariant(capsys):
    code, out = run(["check", str(fixture_path("example41_cp_part.json"))], capsys)
    assert code == 1
    assert "invariant" in out


def test_check_shape_error(capsys):
    code, out = run(["check", str(fixture_path("bad_shape.json"))], capsys)
    assert code == 2
    assert "shape" in out


def test_check_refuses_non_maximal(capsys):
    code, out = run(["check", str(fixture_path("scalar_subalgebra.json"))], capsys)
    assert code == 2
    assert "maximal" in out


def test_check_missing_file_and_bad_json(tmp_path, capsys):
    assert run(["check", str(tmp_path / "nope.json")], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2,\n "object": }')
    code, out = run(["check", str(bad)], capsys)
    assert code == 2 and "line 2" in out


def test_check_reduced_form_and_grid():
    rep = cmd_check(fixture_path("example43_reduced.json"), grid=[0.0, 1.0])
    assert rep.exit_code == 0
    sg = rep.classical["restricted_semigroup"]
    assert np.allclose(decode_matrix(sg[1], "p"), [[1, 0], [1 - np.exp(-1), np.exp(-1)]])
    assert max(rep.residuals["leakage_over_time"]) <= 1e-9


def test_decompose_example():
    rep = cmd_decompose(fixture_path("example41_generator.json"))
    assert rep.exit_code == 0
    d = rep.decompositions
    assert np.allclose(decode_matrix(d["h"], "h"), 0, atol=1e-12)
    kraus = [decode_matrix(k, "k") for k in d["kraus"]]
    assert len(kraus) == 1 and np.allclose(kraus[0], [[0, 1], [0, 0]])
    assert d["gns_multiplicity"] == 1 and d["ccp_gram_rank"] == 4
    assert d["offset"] is None


def test_decompose_hamiltonian_and_non_ccp():
    rep = cmd_decompose(fixture_path("pure_hamiltonian.json"))
    assert rep.exit_code == 0 and rep.decompositions["kraus"] == []
    rep = cmd_decompose(fixture_path("non_ccp_superop.json"))
    assert rep.exit_code == 1
    assert rep.residuals["projected_choi_min"] < 0
    assert any("most negative" in w for w in rep.warnings)


def test_verify_modes(capsys):
    assert run(["verify", "--fixtures-only"], capsys)[0] == 0
    code, out = run(["verify", "--trials", "0", "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["certificates"]["crosscheck"]["trials"] == 0
    assert cmd_verify(trials=6, seed=3, dim=2, samples=200).exit_code == 0
    assert cmd_verify(trials=1, dim=7).exit_code == 2


def test_same_seed_gives_identical_bytes():
    a = cmd_verify(trials=4, seed=11, samples=100).to_json()
    b = cmd_verify(trials=4, seed=11, samples=100).to_json()
    assert a == b


@pytest.mark.parametrize(
    "name", ["example41_generator.json", "example41_cp_part.json", "example43_reduced.json", "pure_hamiltonian.json"]
)
def test_report_round_trip(name):
    for rep in (cmd_check(fixture_path(name)), cmd_decompose(fixture_path(name))):
        again = Report.from_json(rep.to_json())
        assert again == rep
        assert again.to_json() == rep.to_json()


def test_parse_diagnostics():
    with pytest.raises(SpecError, match="dim"):
        parse_spec({"object": {"kind": "cp_map", "kraus": []}})
    with pytest.raises(SpecError, match="exactly one"):
        parse_spec({"dim": 1, "object": {"kind": "cp_map", "kraus": [[[1]]], "superop": [[1]]}})
    with pytest.raises(SpecError, match=r"object\.kraus\[0\]"):
        parse_spec({"dim": 2, "object": {"kind": "cp_map", "kraus": [[[1, "x"], [0, 1]]]}})


def test_spec_variants():
    spec = parse_spec({
        "dim": 2,
        "object": {"kind": "cp_map", "kraus": [[[1, 0], [0, [0, 1]]]]},
        "subalgebra": {"diagonal_in_basis": [[0.7071067811865476, 0.7071067811865476],
                                             [0.7071067811865476, -0.7071067811865476]]},
    })
    assert spec.subalgebra.dim == 2
    spec = load_spec(fixture_path("example43_reduced.json"))
    assert spec.kind == "generator"


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "cpinvariance", "verify", "--fixtures-only"], capture_output=True, text=True
    )
    assert out.returncode == 0
