import csv
import json
import logging
import math
from pathlib import Path

import pytest  # type: ignore

from pacstate.cli.cli_handler import (
    EXIT_FAILURE,
    EXIT_USAGE,
    load_scenario,
    main,
    scenario_arguments,
)
from pacstate.cli.export import write_document
from pacstate.errors import ConvergenceError
from pacstate.oracle import failed_report

SCENARIOS = Path(__file__).parents[2] / "scenarios"
SCHEMA = json.loads((SCENARIOS / "output_schema.json").read_text())
JSON_SCALARS = (int, float, str, bool, type(None))


def read_csv(path: Path) -> list[dict[str, str]]:
    with open(path) as stream:
        return list(csv.DictReader(stream))


def reject_constant(token: str) -> None:
    raise ValueError(f"invalid JSON constant {token}")


def assert_matches_schema(document: dict) -> None:
    """Required keys and cell types of the matching output layout."""
    if "layout" in document:
        branch = next(
            branch for branch in SCHEMA["oneOf"]
            if branch["properties"].get("layout", {}).get("const")
            == document["layout"]
        )
    else:
        branch = SCHEMA["oneOf"][-1]
        required = branch["properties"]["reports"]["items"]["required"]
        for entry in document["reports"]:
            assert set(required) <= set(entry)
    assert set(branch["required"]) <= set(document)
    if document.get("layout") == "table":
        for row in document["rows"]:
            assert all(isinstance(cell, JSON_SCALARS) for cell in row)
    if document.get("layout") == "grid":
        for row in document["values"]:
            assert all(
                cell is None or isinstance(cell, (int, float)) for cell in row
            )


def test_pnum_lossless(tmp_path):
    output = tmp_path / "pn.csv"
    code = main([
        "pnum", "--nalpha", "3", "--eta", "1", "--nmax", "4",
        "--output", str(output),
    ])
    assert code == 0
    rows = read_csv(output)
    assert len(rows) == 5
    assert float(rows[1]["p_n [1]"]) == pytest.approx(
        0.25 * math.exp(-3), rel=1e-11,
    )
    assert float(rows[0]["mean [1]"]) == pytest.approx(4.75)
    assert rows[0]["L [um]"] == ""


def test_pnum_default_etas(tmp_path):
    output = tmp_path / "pn.json"
    assert main(["pnum", "--output", str(output), "--format", "json"]) == 0
    document = json.loads(output.read_text())
    etas = {row[0] for row in document["rows"]}
    assert etas == {1.0, 0.75, 0.5, 0.25, 0.0}


def test_pnum_preset_lengths(tmp_path):
    output = tmp_path / "pn.csv"
    code = main([
        "pnum", "--state", "fock", "--m", "2", "--preset", "nanowire",
        "--L", "0", "1.2", "--output", str(output),
    ])
    assert code == 0
    rows = read_csv(output)
    assert [float(row["L [um]"]) for row in rows] == [0, 0, 0, 1.2, 1.2, 1.2]
    assert float(rows[3]["eta [1]"]) == pytest.approx(math.exp(-1))


def test_fidelity_command(tmp_path):
    output = tmp_path / "fidelity.csv"
    assert main(["fidelity", "--tau", "1", "--output", str(output)]) == 0
    assert float(read_csv(output)[0]["fidelity [1]"]) == pytest.approx(
        0.70, abs=0.005,
    )


def test_quad_command(tmp_path):
    output = tmp_path / "quad.csv"
    code = main([
        "quad", "--preset", "stripe", "--L", "15", "--output", str(output),
    ])
    assert code == 0
    row = read_csv(output)[0]
    assert float(row["eta [1]"]) == pytest.approx(math.exp(-1))
    assert float(row["lab_start [1/Omega]"]) == pytest.approx(5.0)
    assert row["squeezed [1]"] == "true"


def test_g2grid_command(tmp_path):
    output = tmp_path / "g2.json"
    code = main([
        "g2grid", "--resolution", "11", "--format", "json",
        "--output", str(output),
    ])
    assert code == 0
    document = json.loads(output.read_text())
    assert len(document["values"]) == 11
    assert document["meta"]["g2zero"] == pytest.approx(336 / 361)


def test_sweep_command(tmp_path):
    output = tmp_path / "sweep.csv"
    code = main([
        "sweep", "--quantity", "eta", "--preset", "fibre",
        "--axis", "L", "0", "1e10", "5e9", "--output", str(output),
    ])
    assert code == 0
    assert len(read_csv(output)) == 3


def test_presets_command(tmp_path):
    output = tmp_path / "presets.csv"
    assert main(["presets", "--output", str(output)]) == 0
    rows = {row["label [1]"]: row for row in read_csv(output)}
    assert float(rows["nanowire"]["L_eta_0.5 [um]"]) == pytest.approx(
        0.83, abs=0.01,
    )


def test_presets_config(tmp_path):
    config = tmp_path / "presets.json"
    config.write_text(json.dumps([{"label": "slot", "k_i": 0.5}]))
    output = tmp_path / "presets.csv"
    code = main([
        "presets", "--presets-config", str(config), "--output", str(output),
    ])
    assert code == 0
    assert "slot" in {row["label [1]"] for row in read_csv(output)}


@pytest.mark.parametrize("argv", [
    ["pnum", "--eta", "1.5"],
    ["fidelity", "--nalpha", "0"],
    ["fidelity", "--preset", "copper", "--L", "1"],
    ["quad", "--start", "0"],
    ["sweep", "--quantity", "pn"],
])
def test_usage_errors(argv: list[str], capsys):
    assert main(argv) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_scenario_arguments():
    argv = scenario_arguments({
        "command": "sweep",
        "arguments": {
            "quantity": "fidelity",
            "exponent_scale": 1,
            "axis": [["tau", 0, 1, 0.5]],
            "eta": [0.5],
            "quick": False,
        },
    })
    assert argv == [
        "sweep", "--quantity", "fidelity", "--exponent-scale", "1",
        "--axis", "tau", "0", "1", "0.5", "--eta", "0.5",
    ]


def test_bundled_scenarios_parse():
    paths = sorted(SCENARIOS.glob("*.json"))
    assert len(paths) > 1
    for path in paths:
        if path.name == "output_schema.json":
            continue
        assert load_scenario(path)[0] in {
            "pnum", "sweep", "g2grid", "quad", "fidelity",
        }


def test_scenario_command(tmp_path):
    output = tmp_path / "fidelity.csv"
    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps({
        "command": "fidelity",
        "arguments": {"nalpha": 3, "eta": [0.5], "output": str(output)},
    }))
    assert main(["scenario", str(scenario)]) == 0
    assert float(read_csv(output)[0]["fidelity [1]"]) == pytest.approx(
        0.0525, abs=5e-4,
    )


def test_scenario_cannot_nest(tmp_path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps({
        "command": "scenario", "arguments": {},
    }))
    with pytest.raises(SystemExit):
        main(["scenario", str(scenario)])


@pytest.mark.parametrize("name", ["pn_pac_eta", "pn_pac_nanowire"])
def test_bundled_scenario_output_is_stable(name: str, capsys):
    path = str(SCENARIOS / f"{name}.json")
    assert main(["scenario", path]) == 0
    first = capsys.readouterr().out
    assert main(["scenario", path]) == 0
    assert capsys.readouterr().out == first
    assert first.startswith("eta [1],L [um],n [1],p_n [1]")


def test_quad_loss_reaches_fock_state(tmp_path):
    output = tmp_path / "quad.csv"
    code = main([
        "quad", "--state", "fock", "--m", "1", "--eta", "0.5",
        "--output", str(output),
    ])
    assert code == 0
    row = read_csv(output)[0]
    assert float(row["eta [1]"]) == 0.5
    assert float(row["depth [1]"]) == pytest.approx(
        0.25 * math.sqrt(2 * math.pi), rel=1e-9,
    )


def test_quad_loss_reaches_coherent_state(tmp_path):
    lossless = tmp_path / "lossless.csv"
    lossy = tmp_path / "lossy.csv"
    assert main(["quad", "--state", "coherent", "--output", str(lossless)]) == 0
    assert main([
        "quad", "--state", "coherent", "--eta", "0.25",
        "--output", str(lossy),
    ]) == 0
    before, after = read_csv(lossless)[0], read_csv(lossy)[0]
    assert float(after["mean [1]"]) == pytest.approx(
        0.5 * float(before["mean [1]"]), rel=1e-9,
    )
    assert float(after["depth [1]"]) == 0.0


def test_oracle_command_fails_at_tight_tolerance(tmp_path):
    report = tmp_path / "oracle.json"
    output = tmp_path / "oracle.csv"
    code = main([
        "oracle", "--quick", "--tolerance", "1e-15",
        "--report", str(report), "--output", str(output),
    ])
    assert code == EXIT_FAILURE
    document = json.loads(
        report.read_text(), parse_constant=reject_constant,
    )
    assert document["passed"] is False
    quantities = {
        entry["label"].split("[")[0] for entry in document["reports"]
    }
    assert len(quantities) >= 12
    assert_matches_schema(document)


def test_oracle_command_passes_at_default_tolerance(tmp_path):
    output = tmp_path / "oracle.csv"
    assert main(["oracle", "--quick", "--output", str(output)]) == 0
    assert all(row["passed [1]"] == "true" for row in read_csv(output))


def test_oracle_report_writes_null_for_missing_values(tmp_path):
    report = tmp_path / "report.json"
    failed = failed_report(
        "grid", math.nan, ConvergenceError("stalled", math.nan, 1.0),
    )
    write_document(
        {"tolerance": 1e-6, "passed": False, "reports": [failed.as_dict()]},
        report,
    )
    document = json.loads(
        report.read_text(), parse_constant=reject_constant,
    )
    assert document["reports"][0]["closed_form"] is None
    assert_matches_schema(document)


@pytest.mark.parametrize("argv", [
    ["pnum", "--nmax", "3", "--format", "json"],
    ["g2grid", "--resolution", "5", "--format", "json"],
    ["presets", "--format", "json"],
])
def test_json_output_matches_schema(argv: list[str], capsys):
    assert main(argv) == 0
    document = json.loads(
        capsys.readouterr().out, parse_constant=reject_constant,
    )
    assert_matches_schema(document)


def test_verbose_surfaces_debug_logging(caplog, capsys):
    assert main(["--verbose", "g2grid", "--resolution", "5"]) == 0
    assert any(
        record.name == "pacstate.correlations"
        and record.levelno == logging.DEBUG
        for record in caplog.records
    )


def test_quiet_run_keeps_library_logging_below_warning(caplog, capsys):
    argv = ["sweep", "--quantity", "g2zero", "--axis", "tau", "0", "1", "1"]
    assert main(argv) == 0
    assert not [
        record for record in caplog.records
        if record.name.startswith("pacstate")
        and record.levelno < logging.WARNING
    ]
