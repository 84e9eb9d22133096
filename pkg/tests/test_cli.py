import json
import subprocess
import sys

import pytest

import oracles
from conftest import INSTANCES
from sidecode.cli import InstanceError, main, parse_instance

H_QUARTER = oracles.h2(0.25)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_rates_complementary(capsys):
    code, out, _ = run(capsys, "rates", INSTANCES / "dsbs_complementary.json", "--letters", "1")
    assert code == 0
    data = json.loads(out)
    assert data["zero_error_exact"] == pytest.approx(H_QUARTER, abs=1e-9)
    assert data["cutset"] == pytest.approx(H_QUARTER, abs=1e-9)
    assert data["inner_RI"] == pytest.approx(H_QUARTER, abs=1e-6)
    assert data["name"] == "dsbs_complementary"
    assert list(data) == sorted(data)


def test_rates_one_edge_and_index(capsys):
    code, out, _ = run(capsys, "rates", INSTANCES / "dsbs_one_edge.json", "--no-ri", "--letters", "0")
    data = json.loads(out)
    assert code == 0 and not data["compatible"]
    assert data["eps_error_exact"] == pytest.approx(0.5 * H_QUARTER, abs=1e-9)
    code, out, _ = run(capsys, "rates", INSTANCES / "three_bits_index.json")
    assert code == 0 and json.loads(out)["index_coding_rate"] == pytest.approx(2.0)


def test_code_then_verify(capsys, tmp_path):
    book = tmp_path / "book.json"
    code, _, err = run(capsys, "code", INSTANCES / "dsbs_complementary.json", "--n", "2", "--out", book)
    assert code == 0
    summary = json.loads(err)
    assert summary["measured_rate"] == pytest.approx(0.84375)
    code, out, _ = run(capsys, "verify", book, INSTANCES / "dsbs_complementary.json")
    assert code == 0 and out.startswith("PASS")


def test_verify_reports_counterexample(capsys, tmp_path):
    book = tmp_path / "book.json"
    run(capsys, "code", INSTANCES / "dsbs_complementary.json", "--out", book)
    data = json.loads(book.read_text())
    for entry in data["colors"]:
        entry["color"] = 0
    data["codewords"] = [""]
    book.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", book, INSTANCES / "dsbs_complementary.json")
    assert code == 1 and out.startswith("FAIL")
    assert "conflicting_block" in json.loads(out[5:])


def test_index_code_and_verify(capsys, tmp_path):
    book = tmp_path / "index.json"
    assert run(capsys, "code", INSTANCES / "three_bits_index.json", "--out", book)[0] == 0
    code, out, _ = run(capsys, "verify", book, INSTANCES / "three_bits_index.json")
    assert code == 0 and out.startswith("PASS")


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", INSTANCES / "dsbs_xor.json", "--rate", "1.0", "--n", "300", "--trials", "20", "--no-uncoded")
    data = json.loads(out)
    assert code == 0 and data["trials"] == 20 and data["path"] == "ensemble"
    code, _, err = run(capsys, "simulate", INSTANCES / "dsbs_one_edge.json", "--rate", "1.0", "--n", "10")
    assert code == 2 and "compatible" in err


def test_graph_export(capsys, tmp_path):
    code, out, _ = run(capsys, "graph", INSTANCES / "dsbs_one_edge.json")
    assert code == 0 and out.count("--") == 1
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "graph", INSTANCES / "dsbs_complementary.json", "--n", "2", "--dot", dot)
    assert code == 0 and json.loads(out)["vertices"] == 16
    assert dot.read_text().startswith("graph")


def test_invalid_instance_diagnostics(capsys, tmp_path):
    code, _, err = run(capsys, "rates", INSTANCES / "bad_sum.json")
    assert code == 2
    assert err.startswith(f"{INSTANCES / 'bad_sum.json'}:3: error:")
    broken = tmp_path / "broken.json"
    broken.write_text('{"pmf": [[1.0]],\n "f": [[0]]\n')
    code, _, err = run(capsys, "rates", broken)
    assert code == 2 and ":3: error: invalid JSON" in err
    code, _, err = run(capsys, "rates", tmp_path / "missing.json")
    assert code == 2 and "cannot read" in err


def test_parse_instance_errors():
    with pytest.raises(InstanceError) as e:
        parse_instance('{"pmf": [[0.5, 0.5]],\n "f": [[0]],\n "g": [[0, 0]]}')
    assert e.value.line == 2
    with pytest.raises(InstanceError):
        parse_instance('{"pmf": [[0.5, 0.5]], "f": [[0, null]], "g": [[0, 0]]}')
    with pytest.raises(InstanceError):
        parse_instance('{"pmf": [[0.5, 0.5]], "x_alphabet": 3, "f": [[0, 0]], "g": [[0, 0]]}')
    inst = parse_instance('{"pmf": [[0.5, 0.5]], "y_alphabet": ["a", "b"], "f": [[0, 1]], "g": [[0, 0]]}')
    assert inst.pmf.y_labels == ("a", "b")


def test_cap_override_exit_code(capsys):
    code, _, err = run(capsys, "--cap", "power_vertices=10", "graph", INSTANCES / "dsbs_complementary.json", "--n", "2")
    assert code == 3 and "cap exceeded" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sidecode.cli", "rates", str(INSTANCES / "dsbs_product.json"), "--no-ri", "--letters", "0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["compatible"] is True


def test_cap_override_is_scoped_to_the_command(capsys):
    from sidecode import get_caps

    before = get_caps()
    run(capsys, "--cap", "power_vertices=10", "graph", INSTANCES / "dsbs_complementary.json", "--n", "2")
    assert get_caps() == before
