import csv
import json
from pathlib import Path

import pytest

from multixfer import cli
from multixfer.harness import (CSV_COLUMNS, ConfigError, build_weight, emit_report, render_csv,
                               run_experiment, validate_config)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

ESTIMATE = {
    "task": "estimate",
    "symbol": {"form": "modulation", "shifts": [0.25, -0.5]},
    "exponents": [2, 2],
    "seed": 4,
    "search": {"restarts": 2, "steps": 20, "freq_box": 2},
}


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_bad_exponent_exits_with_config_error(tmp_path, capsys):
    cfg = dict(ESTIMATE, exponents=[0.5, 2])
    code = cli.main(["estimate", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_CONFIG
    assert "p_list[0]" in capsys.readouterr().err


def test_schema_error_names_the_field():
    with pytest.raises(ConfigError, match="/search/restarts"):
        validate_config(dict(ESTIMATE, search={"restarts": 0}))
    with pytest.raises(ConfigError, match="/symbol"):
        validate_config({"task": "estimate", "exponents": [2, 2]})


def test_task_mismatch_is_config_error(tmp_path):
    code = cli.main(["transfer", "--config", write(tmp_path, ESTIMATE), "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert cli.main(["estimate", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG


def test_empty_results_render_header_only():
    assert render_csv([]) == ",".join(CSV_COLUMNS) + "\n"


def test_reruns_are_byte_identical(tmp_path):
    path = write(tmp_path, ESTIMATE)
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["estimate", "--config", path, "--out", str(out)]) == cli.EXIT_OK
        outs.append(((out / "report.json").read_bytes(), (out / "report.csv").read_bytes()))
    assert outs[0] == outs[1]
    row = list(csv.reader(outs[0][1].decode().splitlines()))[1]
    assert row[CSV_COLUMNS.index("runtime_ms")] == ""


def test_seed_override_and_jobs_do_not_change_value(tmp_path):
    a = run_experiment(ESTIMATE, seed=9, jobs=1)[0]
    b = run_experiment(ESTIMATE, seed=9, jobs=2)[0]
    assert a["seed"] == 9 and a["value"] == b["value"]


def test_timing_fills_runtime():
    rec = run_experiment(ESTIMATE, timing=True)[0]
    assert isinstance(rec["runtime_ms"], int)


def test_report_round_trip(tmp_path):
    results = run_experiment(ESTIMATE)
    jpath, cpath = emit_report(results, str(tmp_path / "a"))
    assert cli.main(["report", jpath, "--out", str(tmp_path / "b")]) == cli.EXIT_OK
    assert (tmp_path / "b" / "report.csv").read_text() == Path(cpath).read_text()


def test_estimate_record_fields():
    rec = run_experiment(ESTIMATE)[0]
    assert rec["task"] == "estimate" and rec["N"] == 2 and rec["d"] == 1
    assert rec["p1"] == 2 and rec["p"] == 1
    assert 0.999 <= rec["value"] <= 1 + 1e-9 and rec["pass"]


def test_build_weight_forms():
    assert build_weight("unit") is None
    w = build_weight({"form": "smoothed", "base": {"form": "power", "alphas": [0.5]},
                      "radius": 0.25})
    assert w is not None
    with pytest.raises(ConfigError):
        validate_config(dict(ESTIMATE, weights={"form": "power", "alphas": []}))


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
def test_shipped_configs_validate(name):
    validate_config(json.loads((CONFIGS / name).read_text()))


def test_shipped_classify_config(tmp_path):
    out = tmp_path / "c"
    code = cli.main(["classify", "--config", str(CONFIGS / "classify_bessel.json"),
                     "--out", str(out)])
    assert code == cli.EXIT_OK
    doc = json.loads((out / "report.json").read_text())
    assert "hormander_class" in doc["results"][0]["details"]["applicable"]
