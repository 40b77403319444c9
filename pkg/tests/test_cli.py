"""Command-line interface: exit codes, artifacts, round trips."""

import csv
import io
import json

import pytest

from hstateprep.circuit import Circuit
from hstateprep.cli import CACHE_ENV, EncodedSimConfig, config_hash, main, parse_config, ConfigSchemaError
from hstateprep.montecarlo import MCStats


def _run(*argv):
    return main(list(argv))


def test_catalog_round_trip(tmp_path):
    assert _run("catalog", "--d", "3", "--out", str(tmp_path)) == 0
    index = json.loads((tmp_path / "index.json").read_text())
    assert index["provenance"]["decoder_id"]
    for name, meta in index["circuits"].items():
        c = Circuit.from_text((tmp_path / meta["file"]).read_text())
        assert c.depth == meta["depth"]
    assert json.loads((tmp_path / "lattice.json").read_text())["n"] == 7


def test_verify(tmp_path):
    out = tmp_path / "v.json"
    assert _run("verify", "--circuit", "Hm", "--d", "3", "--t", "1", "--out", str(out)) == 0
    body = json.loads(out.read_text())
    assert body["verdict"] == "t-flag" and body["provenance"]["config"]["t"] == 1
    assert _run("verify", "--circuit", "Hm-reduced", "--d", "5", "--t", "2", "--out", str(out)) == 0
    assert json.loads(out.read_text())["counterexample"] is not None


def test_verify_budget_is_domain_error(tmp_path):
    assert _run("verify", "--circuit", "Hm", "--d", "5", "--t", "2", "--budget", "10", "--out", str(tmp_path / "x")) == 1


def test_verify_long_needs_ack():
    assert _run("verify", "--circuit", "Hm", "--d", "7", "--t", "3") == 2


def test_simulate_reproducible(tmp_path, monkeypatch):
    monkeypatch.delenv(CACHE_ENV, raising=False)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _run("simulate", "--d", "3", "--p", "2e-3,1e-3", "--trials", "20000", "--seed", "4", "--out", str(a)) == 0
    first = json.loads(a.read_text())
    cfg = first["provenance"]["config"]
    assert first["provenance"]["config_hash"] == config_hash(cfg)
    p_list = ",".join(str(p) for p in cfg["p"])
    assert _run("simulate", "--d", str(cfg["d"]), "--p", p_list, "--trials", str(cfg["trials"]),
                "--seed", str(cfg["seed"]), "--jobs", "2", "--out", str(b)) == 0
    second = json.loads(b.read_text())
    for x, y in zip(first["points"], second["points"]):
        assert MCStats.from_dict(x).counters() == MCStats.from_dict(y).counters()


def test_simulate_checkpoint_env(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    assert _run("simulate", "--d", "3", "--p", "1e-3", "--trials", "1000", "--out", str(tmp_path / "s.json")) == 0
    assert list((tmp_path / "cache").glob("ckpt-*.json"))


def test_simulate_long_needs_ack():
    assert _run("simulate", "--d", "3", "--p", "1e-3", "--trials", "1e9") == 2


def test_simulate_bad_distance():
    assert _run("simulate", "--d", "4", "--p", "1e-3", "--trials", "10") == 2


def test_encoded_simulate(tmp_path):
    cfg = tmp_path / "enc.json"
    cfg.write_text(json.dumps({"d1": 3, "d2": 7, "d_f": 3, "p_lc": [0.0, 1.0], "p_inject": [0.0, 1.0], "t_only": True}))
    out = tmp_path / "o.json"
    assert _run("simulate", "--d", "3", "--p", "1e-3", "--trials", "2000", "--mode", "encoded", "--config", str(cfg), "--out", str(out)) == 0
    assert json.loads(out.read_text())["points"][0]["mode"] == "encoded"
    cfg.write_text(json.dumps({"d1": 3, "d2": 7, "d_f": 3, "p_lc": [0.0], "p_inject": [0.0], "typo": 1}))
    assert _run("simulate", "--d", "3", "--p", "1e-3", "--trials", "10", "--mode", "encoded", "--config", str(cfg)) == 2


def test_table1_and_fit(tmp_path):
    out = tmp_path / "t1.json"
    assert _run("reproduce-table1", "--d", "3", "--p", "5e-3,3e-3", "--trials", "50000", "--seed", "1", "--out", str(out)) == 0
    body = json.loads(out.read_text())
    row = body["table"][0]
    assert row["min_qubits"] == 16 and row["avg_qubits"] * row["p_acc"] == pytest.approx(16)
    fo = tmp_path / "fit.json"
    assert _run("fit", "--in", str(out), "--extrapolate", "1e-4", "--out", str(fo)) == 0
    fit = json.loads(fo.read_text())
    assert fit["fit"]["exponent"] == 2 and "1e-4" in fit["extrapolated"] or "0.0001" in fit["extrapolated"]


def test_fit_rejects_bad_input(tmp_path):
    f = tmp_path / "empty.json"
    f.write_text("{}")
    assert _run("fit", "--in", str(f)) == 2


def test_table2_min(capsys):
    assert _run("reproduce-table2-min") == 0
    body = json.loads(capsys.readouterr().out)
    assert [r["min_n_f"] for r in body["rows"]] == [6288, 12795, 15600]


def test_overhead_csv_round_trip(tmp_path):
    cfg = tmp_path / "rows.json"
    cfg.write_text(json.dumps({"rows": [{"d": 3, "p_acc": 0.85}, {"d": 5, "p_acc": 0.35, "t_hm": 11, "t_ec": 16}]}))
    out = tmp_path / "table.csv"
    assert _run("overhead", "physical", "--config", str(cfg), "--out", str(out)) == 0
    text = out.read_text()
    assert text.startswith("# provenance ")
    rows = list(csv.DictReader(io.StringIO(text.split("\n", 1)[1])))
    assert [int(r["min_qubits"]) for r in rows] == [16, 55]
    assert float(rows[0]["avg_qubits"]) * 0.85 == pytest.approx(16)


def test_overhead_encoded_json(tmp_path):
    cfg = tmp_path / "rows.json"
    cfg.write_text(json.dumps({"rows": [{"d1": 7, "d2": 11, "d_f": 3, "p_acc_d1": 0.51}]}))
    out = tmp_path / "enc.json"
    assert _run("overhead", "encoded", "--config", str(cfg), "--out", str(out)) == 0
    assert json.loads(out.read_text())["rows"][0]["min_qubits"] == 6288


@pytest.mark.parametrize(
    "rows,code",
    [
        ({"rows": [{"d": 3, "p_acc": 0.8, "colour": "red"}]}, 2),
        ({"rows": [{"p_acc": 0.8}]}, 2),
        ({"rows": [{"d": "3", "p_acc": 0.8}]}, 2),
        ({"table": []}, 2),
        ({"rows": [{"d": 4, "p_acc": 0.8}]}, 1),
    ],
)
def test_overhead_config_errors(tmp_path, rows, code):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(rows))
    assert _run("overhead", "physical", "--config", str(cfg)) == code


def test_parse_config():
    c = parse_config(EncodedSimConfig, {"d1": 3, "d2": 7, "d_f": 3, "p_lc": [0.1], "p_inject": [0.0]})
    assert c.class_weights == [1 / 3, 1 / 3, 1 / 3]
    with pytest.raises(ConfigSchemaError):
        parse_config(EncodedSimConfig, {"d1": 3})


def test_version():
    assert _run("--version") == 0
