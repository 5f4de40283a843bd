import csv
import json
import math

import numpy as np
import pytest

from seqbell import io
from seqbell.cli import RunManifest, build_parser, main
from seqbell.linalg import SX, SZ, matrix_to_json
from seqbell.quantum import canonical_realization
from seqbell.sweep import SWEEP_COLUMNS, chain_sweep, eta_grid, resolve_threads

BLACK = 120 / 29


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fmt_is_round_trip_exact():
    for x in (0.1, 1 / 3, 120 / 29, math.pi * 1e-300, 2.0**60):
        assert float(io.fmt(x)) == x
    assert io.fmt(0.1) == "0.10000000000000001"


def test_dumps_handles_nan_and_nesting():
    text = io.dumps({"a": [1.0, float("nan")], "b": {"c": True, 2: None}, "m": np.eye(2)})
    data = json.loads(text)
    assert data["a"] == [1.0, None]
    assert data["b"] == {"c": True, "2": None}
    assert data["m"] == [[1.0, 0.0], [0.0, 1.0]]
    with pytest.raises(TypeError):
        io.dumps({"x": object()})


def test_csv_text_has_header():
    text = io.csv_text(("a", "b"), [(1.0, 0.1)])
    assert text.splitlines() == ["a,b", "1,0.10000000000000001"]


def test_load_scenario_forms(tmp_path):
    rho, alice, bob = canonical_realization()
    cfg = io.load_scenario({"etas": [0.5, 0.9]})
    assert cfg.etas == [0.5, 0.9]
    explicit = {
        "dims": [2, 2],
        "state": matrix_to_json(rho.matrix),
        "alice": [matrix_to_json(a) for a in alice],
        "bobs": [{"triple": [matrix_to_json(b) for b in bob], "eta": 0.7}, {"triple": "canonical", "eta": 1.0}],
    }
    path = tmp_path / "s.json"
    path.write_text(json.dumps(explicit))
    cfg2 = io.load_scenario(path)
    assert np.allclose(cfg2.initial_state.matrix, rho.matrix)
    assert cfg2.etas == [0.7, 1.0]
    with pytest.raises(ValueError):
        io.load_scenario({"state": "canonical"})
    with pytest.raises(ValueError):
        io.load_scenario({"alice": [SX, SZ], "etas": [0.5]})


def test_manifest_validation():
    RunManifest("reproduce")
    for kwargs in ({"command": "plot"}, {"command": "chain", "tolerance": 0.0}, {"command": "chain", "threads": 0}):
        with pytest.raises(ValueError):
            RunManifest(**kwargs)


def test_threads_from_env(monkeypatch):
    monkeypatch.setenv("SEQBELL_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.delenv("SEQBELL_THREADS")
    assert resolve_threads(None) == 1


def test_sweep_order_independent_of_threads():
    a = chain_sweep(0.25, threads=1)
    b = chain_sweep(0.25, threads=3)
    assert a == b
    assert len(a) == 64
    assert [r[:3] for r in a] == sorted(r[:3] for r in a)
    with pytest.raises(ValueError):
        eta_grid(0.3)


def test_unknown_command_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["plot"])
    assert exc.value.code == 2


def test_bad_input_exits_2(capsys):
    code, _, err = run(capsys, "certify", "--i1", "7")
    assert code == 2 and "outside" in err
    code, _, err = run(capsys, "chain")
    assert code == 2
    code, _, _ = run(capsys, "incompat", "--mode", "chsh", "--eta1", "0.8")
    assert code == 2


def test_bounds_command(capsys):
    code, out, _ = run(capsys, "bounds", "--restarts", "3", "--dim", "2")
    data = json.loads(out)
    assert code == 0
    assert data["local_bound"] == 5 and data["pnc_bound"] == 4
    assert data["quantum_value"] == pytest.approx(6.0, abs=1e-12)
    assert data["seesaw"][0]["value"] <= 6 + 1e-6


def test_chain_command_black_point(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, _, _ = run(capsys, "chain", "--eta1", repr(20 / 29), "--eta2", "0.8", "--eta3", "1", "--out", str(out_file))
    data = json.loads(out_file.read_text())
    assert code == 0
    assert data["bell_values"] == pytest.approx([BLACK] * 3, abs=1e-12)
    assert data["predicted_values"] == pytest.approx([BLACK] * 3, abs=1e-12)
    assert data["violations"] == [True, True, True]


def test_chain_command_from_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"state": "canonical", "alice": "canonical", "bobs": [{"triple": "canonical", "eta": 1}]}))
    code, out, _ = run(capsys, "chain", "--config", str(cfg))
    assert code == 0 and json.loads(out)["bell_values"] == pytest.approx([6.0])


def test_certify_command(capsys):
    b = repr(BLACK)
    code, out, _ = run(capsys, "certify", "--i1", b, "--i2", b, "--i3", b)
    data = json.loads(out)
    assert code == 0
    assert data["eta1"] == pytest.approx(20 / 29, abs=1e-12)
    assert data["eta2"] == pytest.approx(0.8, abs=1e-12)
    assert data["valid"] is True
    code, out, _ = run(capsys, "certify", "--i1", "4.5")
    data = json.loads(out)
    assert data["eta2"] is None and data["ranges"]["eta1"]["hi"] == 1


def test_surface_command(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, _, _ = run(capsys, "surface", "--step", "0.05", "--out", str(path))
    rows = list(csv.reader(path.open()))
    assert code == 0
    assert rows[0] == ["I1", "I2", "I3_exact", "I3_paraboloid", "abs_error"]
    assert len(rows) > 10


def test_sweep_command_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--step", "0.5", "--out", str(a)]) == 0
    assert main(["sweep", "--step", "0.5", "--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 9
    assert [float(x) for x in lines[-1].split(",")] == pytest.approx([1, 1, 1, 6, 3, 1.5, 0.75], abs=1e-12)


@pytest.mark.parametrize(
    "mode,key,expected",
    [("pair", "degree", 2 * math.sqrt(2) - 2), ("triple", "degree", 4 * math.sqrt(3) - 4), ("trine", "degree", 2.0)],
)
def test_incompat_modes(capsys, mode, key, expected):
    code, out, _ = run(capsys, "incompat", "--mode", mode)
    assert code == 0
    assert json.loads(out)[key] == pytest.approx(expected, abs=1e-12)


def test_incompat_config_observables(capsys, tmp_path):
    cfg = tmp_path / "o.json"
    cfg.write_text(json.dumps({"observables": [matrix_to_json(SZ), matrix_to_json(SZ)]}))
    code, out, _ = run(capsys, "incompat", "--mode", "pair", "--config", str(cfg))
    assert code == 0 and json.loads(out)["incompatible"] is False


def test_incompat_chsh_and_sequential(capsys):
    code, out, _ = run(capsys, "incompat", "--mode", "chsh", "--eta1", "0.8", "--eta2", "1")
    data = json.loads(out)
    assert code == 0 and data["bound2"] == pytest.approx(2 * math.sqrt(2) - 2, abs=1e-12)
    code, out, _ = run(capsys, "incompat", "--mode", "sequential", "--step", "0.25")
    lines = out.splitlines()
    assert lines[0] == "eta1,eta2,eta3,I1,I2,I3,D1,D2,D3" and len(lines) == 17
    b = repr(BLACK)
    code, out, _ = run(
        capsys, "incompat", "--mode", "sequential", "--i1", b, "--i2", b, "--i3", b,
        "--eta1", repr(20 / 29), "--eta2", "0.8", "--eta3", "1",
    )
    assert [x["lower_bound"] for x in json.loads(out)] == pytest.approx([2, 2, 2], abs=1e-12)


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify")
    data = json.loads(out)
    assert code == 0 and data["within_tolerance"] is True
    assert len(data["bobs"]) == 4
    assert data["correlation_operators"]["commutators"] <= 1e-12


def test_reproduce_command(capsys, tmp_path):
    path = tmp_path / "rep.json"
    code, out, _ = run(capsys, "reproduce", "--out", str(path))
    assert code == 0
    assert "FAIL" not in out
    names = [c["name"] for c in json.loads(path.read_text())["checks"]]
    for must in ("quantum optimum", "local bound", "pnc bound (vertices)", "black point I1", "fourth-observer ceiling",
                 "eta3 minimum", "pair degree (sx, sz)", "triple degree (sx, sy, sz)", "trine degree (canonical)"):
        assert must in names
    code, out, _ = run(capsys, "reproduce", "--tolerance", "1e-3")
    assert code == 0 and "FAIL" not in out


def test_reproduce_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["reproduce", "--out", str(a), "--seed", "4"])
    main(["reproduce", "--out", str(b), "--seed", "4"])
    assert a.read_bytes() == b.read_bytes()


def test_parser_lists_all_commands():
    p = build_parser()
    sub = next(a for a in p._actions if a.dest == "command")
    assert set(sub.choices) == {"bounds", "chain", "sweep", "certify", "surface", "incompat", "verify", "reproduce"}
